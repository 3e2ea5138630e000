#pragma once

#include <Eigen/Dense>
#include <complex>
#include <variant>

#include "mcarma/rng.hpp"

namespace mcarma::levy {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Gamma subordinator with scale b and shape a: unit increments are
/// Gamma(scale b, shape a).  One-dimensional by construction.
struct GammaSubordinator {
    double scale_b = 1.0;
    double shape_a = 1.0;
};

/// Brownian motion with drift.
struct BrownianDrift {
    Vector drift;
    Matrix cov;  // symmetric PSD
};

/// Compound Poisson process with a discrete jump law: jumps are drawn from
/// the given atoms with the given probabilities.
struct CompoundPoisson {
    double rate = 1.0;
    Matrix atoms;    // m x k, one column per atom
    Vector weights;  // k probabilities summing to one
};

/// Deterministic drift, no randomness.
struct DriftOnly {
    Vector drift;
};

/// Parametric driving-process description.
struct LevySpec {
    std::variant<GammaSubordinator, BrownianDrift, CompoundPoisson, DriftOnly> family;

    Eigen::Index dimension() const;
    void validate() const;
};

/// Symbolic jump-measure descriptor: family tag plus parameters, rich enough
/// to evaluate moments of the measure restricted to the unit ball and to its
/// complement.
struct LevyMeasureDescriptor {
    enum class Family { Zero, GammaJumps, DiscreteJumps };
    Family family = Family::Zero;
    // GammaJumps: density a x^{-1} e^{-x/b} on x > 0.
    double gamma_scale_b = 0.0;
    double gamma_shape_a = 0.0;
    // DiscreteJumps: intensity rate * sum_i weights[i] delta_{atoms.col(i)}.
    double rate = 0.0;
    Matrix atoms;
    Vector weights;

    /// Integral of ||x||^r over { ||x|| < 1 } (inside_unit_ball) or
    /// { ||x|| >= 1 } against the measure, r >= 1.
    double moment(int r, bool inside_unit_ball) const;
};

/// Characteristic triplet (drift, Gaussian covariance, jump measure) of the
/// unit-time law, with jumps truncated at the unit ball.
struct CharacteristicTriplet {
    Vector drift;
    Matrix gaussian_cov;
    LevyMeasureDescriptor levy_measure;
};

/// Equally spaced increment sample; spacing 1.0 for unit increments.
struct IncrementSample {
    Matrix values;       // m x N, one column per increment
    double spacing = 1.0;

    Eigen::Index count() const { return values.cols(); }
    Eigen::Index dim() const { return values.rows(); }
};

/// Draws one increment of L over a window of length dt.
Vector sample_increment(const LevySpec& spec, double dt, rng::Stream& stream);

/// Characteristic triplet of the unit-time law.
CharacteristicTriplet triplet_of(const LevySpec& spec);

/// log of the Gamma(scale b, shape a) density; -inf for x <= 0.
double gamma_logpdf(double x, double b, double a);

/// Regularized lower incomplete gamma P(a, x/b), i.e. the Gamma CDF.
double gamma_cdf(double x, double b, double a);

/// Gradient of gamma_logpdf in (b, a).
Eigen::Vector2d gamma_score(double x, double b, double a);

double digamma(double a);
double trigamma(double a);

/// Characteristic exponent of the Gamma subordinator,
/// psi(u) = -a Log(1 - i b u) on the principal branch; 1 - i b u has real
/// part 1 for real u, so the branch cut is never crossed.
std::complex<double> gamma_char_exponent(double u, double b, double a);

/// Regularized lower incomplete gamma P(a, x), series/continued-fraction split.
double regularized_lower_gamma(double a, double x);

}  // namespace mcarma::levy
