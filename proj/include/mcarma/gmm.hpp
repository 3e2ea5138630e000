#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "mcarma/carma.hpp"
#include "mcarma/levy.hpp"
#include "mcarma/recovery.hpp"

namespace mcarma::gmm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Moment conditions g(x, theta) in R^q with gradient in R^{q x r} and a
/// parameter-domain description.  Identification requires q >= r.
struct MomentFunction {
    int q_dim = 0;
    int r_dim = 0;
    std::function<Vector(const Vector& x, const Vector& theta)> g;
    std::function<Matrix(const Vector& x, const Vector& theta)> grad;
    std::vector<bool> positive;  // per-parameter positivity (log transform in the optimizer)
    // Sample points outside the domain are dropped and counted; empty accepts all.
    std::function<bool(const Vector& x)> sample_domain;

    void validate() const;
};

struct OptimizerConfig {
    int max_iterations = 500;   // per Nelder-Mead attempt
    double tolerance = 1e-8;    // simplex diameter in transformed coordinates
    int restarts = 3;           // additional attempts from perturbed starts
    std::optional<Vector> start;
};

struct GmmDiagnostics {
    int iterations = 0;       // total Nelder-Mead iterations
    int restarts_used = 0;
    bool converged = false;
    long dropped = 0;         // sample points outside the moment function domain
    bool drop_flagged = false;  // more than 1% of the sample dropped
    bool omega_floored = false; // weighting eigenvalues clamped at the floor
};

struct GmmResult {
    Vector theta;        // r
    Matrix weighting;    // q x q matrix used in the criterion
    Matrix omega;        // q x q estimated moment covariance at theta
    Matrix g_matrix;     // q x r estimated score matrix at theta
    Matrix sigma;        // r x r estimated asymptotic covariance
    double criterion = 0.0;
    long n_used = 0;
    GmmDiagnostics diagnostics;
    // Populated by estimate_from_observations.
    std::optional<int> n_increments;
    std::optional<double> h;
};

/// Minimizes || mean g(x_n, theta) ||^2_W over the parameter domain.
/// Positivity-constrained coordinates are optimized on a log scale, so the
/// search never leaves the domain.  Throws on non-convergence after all
/// restarts and on degenerate samples.
GmmResult gmm_estimate(const levy::IncrementSample& sample, const MomentFunction& mf,
                       const Matrix& weighting, const OptimizerConfig& opt = {});

/// Two-stage estimation: identity weighting first, then the inverse of the
/// estimated moment covariance at the first-stage estimate.
GmmResult two_stage_estimate(const levy::IncrementSample& sample, const MomentFunction& mf,
                             const OptimizerConfig& opt = {});

/// [G^T W G]^{-1} G^T W Omega W G [G^T W G]^{-1}, symmetrized.
Matrix asymptotic_covariance(const Matrix& g, const Matrix& omega, const Matrix& weighting);

/// Maximum-likelihood moment conditions for the Gamma family: the score in
/// (b, a) with its Hessian as gradient; q = r = 2, both parameters positive,
/// sample domain x > 0.
MomentFunction gamma_mle_moment_function();

/// Characteristic exponent of a parametric family at a probe point.
using CharExponent = std::function<std::complex<double>(const Vector& u, const Vector& theta)>;
/// Gradient of the characteristic exponent in theta.
using CharExponentGradient =
    std::function<Eigen::VectorXcd(const Vector& u, const Vector& theta)>;

/// Characteristic-function matching conditions: for each probe u the real
/// and imaginary parts of e^{i<u,x>} - e^{psi_theta(u)} are stacked as
/// consecutive rows.  Probes must be nonzero and pairwise distinct.
MomentFunction cf_moment_function(const std::vector<Vector>& u_points, CharExponent psi,
                                  CharExponentGradient dpsi, int r_dim,
                                  std::vector<bool> positive);

/// CF-matching conditions for the Gamma family with theta = (b, a) and the
/// default scalar probes.
MomentFunction gamma_cf_moment_function(const std::vector<double>& u_points = {0.5, 1.0});

/// Population G0 = -E grad g and Omega0 = E g g^T at the true parameter for
/// CF-matching conditions; both follow from the characteristic function at
/// sums and differences of the probes.
void cf_population_moments(const std::vector<Vector>& u_points, const CharExponent& psi,
                           const CharExponentGradient& dpsi, const Vector& theta_true,
                           Matrix& g0_out, Matrix& omega0_out);

/// Fisher information of the Gamma family at (b, a).
Eigen::Matrix2d gamma_fisher_information(double b, double a);

/// Recovers increments from the sampled series and runs the two-stage
/// estimator; the result records N and h.
GmmResult estimate_from_observations(const carma::CarmaModel& model,
                                     const carma::StateSpaceRealization& ssr,
                                     const carma::SampledSeries& series, const MomentFunction& mf,
                                     const OptimizerConfig& opt = {});

}  // namespace mcarma::gmm
