#include "mcarma/levy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mcarma::levy {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

Matrix psd_sqrt(const Matrix& cov) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
    if (es.info() != Eigen::Success) throw std::runtime_error("covariance eigendecomposition failed");
    Vector vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

Eigen::Index LevySpec::dimension() const {
    return std::visit(
        [](const auto& fam) -> Eigen::Index {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, GammaSubordinator>) {
                return 1;
            } else if constexpr (std::is_same_v<T, BrownianDrift>) {
                return fam.drift.size();
            } else if constexpr (std::is_same_v<T, CompoundPoisson>) {
                return fam.atoms.rows();
            } else {
                return fam.drift.size();
            }
        },
        family);
}

void LevySpec::validate() const {
    std::visit(
        [](const auto& fam) {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, GammaSubordinator>) {
                require(fam.scale_b > 0.0 && fam.shape_a > 0.0,
                        "gamma subordinator: b and a must be positive");
            } else if constexpr (std::is_same_v<T, BrownianDrift>) {
                require(fam.drift.size() > 0, "brownian drift: dimension must be positive");
                require(fam.cov.rows() == fam.drift.size() && fam.cov.cols() == fam.drift.size(),
                        "brownian drift: covariance dimensions must match the drift");
                require(fam.cov.isApprox(fam.cov.transpose(), 1e-12),
                        "brownian drift: covariance must be symmetric");
            } else if constexpr (std::is_same_v<T, CompoundPoisson>) {
                require(fam.rate > 0.0, "compound poisson: rate must be positive");
                require(fam.atoms.cols() > 0 && fam.atoms.rows() > 0,
                        "compound poisson: at least one jump atom required");
                require(fam.weights.size() == fam.atoms.cols(),
                        "compound poisson: one weight per atom required");
                require(fam.weights.minCoeff() > 0.0, "compound poisson: weights must be positive");
                require(std::abs(fam.weights.sum() - 1.0) < 1e-10,
                        "compound poisson: weights must sum to one");
            } else {
                require(fam.drift.size() > 0, "drift only: dimension must be positive");
            }
        },
        family);
}

Vector sample_increment(const LevySpec& spec, double dt, rng::Stream& stream) {
    require(dt > 0.0, "sample_increment: dt must be positive");
    return std::visit(
        [&](const auto& fam) -> Vector {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, GammaSubordinator>) {
                Vector out(1);
                out[0] = stream.gamma(fam.shape_a * dt, fam.scale_b);
                return out;
            } else if constexpr (std::is_same_v<T, BrownianDrift>) {
                const Matrix root = psd_sqrt(fam.cov);
                Vector z(fam.drift.size());
                for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = stream.normal();
                return fam.drift * dt + std::sqrt(dt) * (root * z);
            } else if constexpr (std::is_same_v<T, CompoundPoisson>) {
                const std::uint64_t jumps = stream.poisson(fam.rate * dt);
                Vector out = Vector::Zero(fam.atoms.rows());
                for (std::uint64_t j = 0; j < jumps; ++j) {
                    double u = stream.uniform01();
                    Eigen::Index pick = fam.weights.size() - 1;
                    for (Eigen::Index k = 0; k < fam.weights.size(); ++k) {
                        u -= fam.weights[k];
                        if (u <= 0.0) {
                            pick = k;
                            break;
                        }
                    }
                    out += fam.atoms.col(pick);
                }
                return out;
            } else {
                return fam.drift * dt;
            }
        },
        spec.family);
}

double LevyMeasureDescriptor::moment(int r, bool inside_unit_ball) const {
    require(r >= 1, "levy measure moment: order must be >= 1");
    switch (family) {
        case Family::Zero:
            return 0.0;
        case Family::GammaJumps: {
            // int x^r a x^{-1} e^{-x/b} dx = a b^r Gamma(r) P(r, cut/b) over (0, cut).
            const double p = regularized_lower_gamma(static_cast<double>(r), 1.0 / gamma_scale_b);
            const double full = gamma_shape_a * std::pow(gamma_scale_b, r) * std::tgamma(static_cast<double>(r));
            return inside_unit_ball ? full * p : full * (1.0 - p);
        }
        case Family::DiscreteJumps: {
            double acc = 0.0;
            for (Eigen::Index k = 0; k < weights.size(); ++k) {
                const double nrm = atoms.col(k).norm();
                const bool inside = nrm < 1.0;
                if (inside == inside_unit_ball) acc += weights[k] * std::pow(nrm, r);
            }
            return rate * acc;
        }
    }
    return 0.0;
}

CharacteristicTriplet triplet_of(const LevySpec& spec) {
    spec.validate();
    return std::visit(
        [](const auto& fam) -> CharacteristicTriplet {
            using T = std::decay_t<decltype(fam)>;
            CharacteristicTriplet t;
            if constexpr (std::is_same_v<T, GammaSubordinator>) {
                t.gaussian_cov = Matrix::Zero(1, 1);
                t.levy_measure.family = LevyMeasureDescriptor::Family::GammaJumps;
                t.levy_measure.gamma_scale_b = fam.scale_b;
                t.levy_measure.gamma_shape_a = fam.shape_a;
                // Truncated drift: int_{0<x<=1} x nu(dx) = a b (1 - e^{-1/b}).
                t.drift = Vector::Constant(
                    1, fam.shape_a * fam.scale_b * (1.0 - std::exp(-1.0 / fam.scale_b)));
            } else if constexpr (std::is_same_v<T, BrownianDrift>) {
                t.drift = fam.drift;
                t.gaussian_cov = fam.cov;
            } else if constexpr (std::is_same_v<T, CompoundPoisson>) {
                t.gaussian_cov = Matrix::Zero(fam.atoms.rows(), fam.atoms.rows());
                t.levy_measure.family = LevyMeasureDescriptor::Family::DiscreteJumps;
                t.levy_measure.rate = fam.rate;
                t.levy_measure.atoms = fam.atoms;
                t.levy_measure.weights = fam.weights;
                Vector drift = Vector::Zero(fam.atoms.rows());
                for (Eigen::Index k = 0; k < fam.weights.size(); ++k) {
                    if (fam.atoms.col(k).norm() <= 1.0) drift += fam.weights[k] * fam.atoms.col(k);
                }
                t.drift = fam.rate * drift;
            } else {
                t.drift = fam.drift;
                t.gaussian_cov = Matrix::Zero(fam.drift.size(), fam.drift.size());
            }
            return t;
        },
        spec.family);
}

double gamma_logpdf(double x, double b, double a) {
    require(b > 0.0 && a > 0.0, "gamma_logpdf: b and a must be positive");
    if (x <= 0.0) return -std::numeric_limits<double>::infinity();
    return -std::lgamma(a) - std::log(b) + (a - 1.0) * std::log(x / b) - x / b;
}

double regularized_lower_gamma(double a, double x) {
    require(a > 0.0, "regularized_lower_gamma: a must be positive");
    if (x <= 0.0) return 0.0;
    constexpr int kMaxIter = 500;
    constexpr double kEps = 1e-16;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        // Lower series: P(a,x) = x^a e^{-x} / Gamma(a) * sum_n x^n / (a)_{n+1}.
        double ap = a;
        double term = 1.0 / a;
        double sum = term;
        for (int n = 0; n < kMaxIter; ++n) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * kEps) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    // Upper continued fraction (modified Lentz), Q(a,x) = e^{-x+a ln x - lnG(a)} * cf.
    constexpr double kTiny = 1e-300;
    double b0 = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b0;
    double frac = d;
    for (int n = 1; n <= kMaxIter; ++n) {
        const double an = -static_cast<double>(n) * (static_cast<double>(n) - a);
        b0 += 2.0;
        d = an * d + b0;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b0 + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        frac *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return 1.0 - frac * std::exp(-x + a * std::log(x) - lg);
}

double gamma_cdf(double x, double b, double a) {
    require(b > 0.0 && a > 0.0, "gamma_cdf: b and a must be positive");
    require(x >= 0.0, "gamma_cdf: x must be >= 0");
    if (x == 0.0) return 0.0;
    return regularized_lower_gamma(a, x / b);
}

Eigen::Vector2d gamma_score(double x, double b, double a) {
    require(b > 0.0 && a > 0.0, "gamma_score: b and a must be positive");
    require(x > 0.0, "gamma_score: x must be positive");
    Eigen::Vector2d g;
    g[0] = (x / b - a) / b;
    g[1] = std::log(x / b) - digamma(a);
    return g;
}

double digamma(double a) {
    require(a > 0.0, "digamma: argument must be positive");
    double shift = 0.0;
    while (a < 10.0) {
        shift -= 1.0 / a;
        a += 1.0;
    }
    const double inv = 1.0 / a;
    const double inv2 = inv * inv;
    // Asymptotic series with Bernoulli coefficients through a^{-12}.
    double series = inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 -
                    inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32760.0)))));
    return shift + std::log(a) - 0.5 * inv - series;
}

double trigamma(double a) {
    require(a > 0.0, "trigamma: argument must be positive");
    double shift = 0.0;
    while (a < 10.0) {
        shift += 1.0 / (a * a);
        a += 1.0;
    }
    const double inv = 1.0 / a;
    const double inv2 = inv * inv;
    double series = 1.0 + inv * (0.5 + inv * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 *
                    (1.0 / 42.0 - inv2 * (1.0 / 30.0 - inv2 * 5.0 / 66.0)))));
    return shift + inv * series;
}

std::complex<double> gamma_char_exponent(double u, double b, double a) {
    require(b > 0.0 && a > 0.0, "gamma_char_exponent: b and a must be positive");
    return -a * std::log(std::complex<double>(1.0, -b * u));
}

}  // namespace mcarma::levy
