#include "mcarma/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mcarma::gmm {

namespace {

void require(bool cond, const std::string& what) {
    if (!cond) throw std::invalid_argument(what);
}

struct Transform {
    std::vector<bool> positive;

    Vector to_eta(const Vector& theta) const {
        Vector eta = theta;
        for (Eigen::Index i = 0; i < eta.size(); ++i) {
            if (positive[static_cast<size_t>(i)]) eta[i] = std::log(theta[i]);
        }
        return eta;
    }
    Vector to_theta(const Vector& eta) const {
        Vector theta = eta;
        for (Eigen::Index i = 0; i < theta.size(); ++i) {
            if (positive[static_cast<size_t>(i)]) theta[i] = std::exp(eta[i]);
        }
        return theta;
    }
    // d theta / d eta, diagonal.
    Vector jacobian(const Vector& eta) const {
        Vector j = Vector::Ones(eta.size());
        for (Eigen::Index i = 0; i < eta.size(); ++i) {
            if (positive[static_cast<size_t>(i)]) j[i] = std::exp(eta[i]);
        }
        return j;
    }
};

struct Criterion {
    const Matrix* sample;  // m x n, filtered
    const MomentFunction* mf;
    const Matrix* weighting;
    Transform transform;

    Vector mean_moment(const Vector& theta) const {
        Vector acc = Vector::Zero(mf->q_dim);
        for (Eigen::Index k = 0; k < sample->cols(); ++k) acc += mf->g(sample->col(k), theta);
        return acc / static_cast<double>(sample->cols());
    }
    Matrix mean_gradient(const Vector& theta) const {
        Matrix acc = Matrix::Zero(mf->q_dim, mf->r_dim);
        for (Eigen::Index k = 0; k < sample->cols(); ++k) acc += mf->grad(sample->col(k), theta);
        return acc / static_cast<double>(sample->cols());
    }
    double value_eta(const Vector& eta) const {
        const Vector mbar = mean_moment(transform.to_theta(eta));
        return mbar.dot(*weighting * mbar);
    }
};

struct NelderMeadResult {
    Vector eta;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

NelderMeadResult nelder_mead(const Criterion& crit, const Vector& eta0, double tol,
                             int max_iterations) {
    const Eigen::Index r = eta0.size();
    const Eigen::Index np = r + 1;
    std::vector<Vector> pts(static_cast<size_t>(np));
    std::vector<double> vals(static_cast<size_t>(np));
    pts[0] = eta0;
    for (Eigen::Index i = 0; i < r; ++i) {
        Vector v = eta0;
        v[i] += 0.05 * std::max(1.0, std::abs(eta0[i]));
        pts[static_cast<size_t>(i) + 1] = v;
    }
    for (size_t i = 0; i < pts.size(); ++i) vals[i] = crit.value_eta(pts[i]);

    std::vector<size_t> order(pts.size());
    NelderMeadResult res;
    for (res.iterations = 0; res.iterations < max_iterations; ++res.iterations) {
        std::iota(order.begin(), order.end(), size_t{0});
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return vals[a] < vals[b]; });

        double diameter = 0.0;
        for (size_t i = 1; i < pts.size(); ++i) {
            diameter = std::max(diameter, (pts[order[i]] - pts[order[0]]).cwiseAbs().maxCoeff());
        }
        if (diameter < tol) {
            res.converged = true;
            break;
        }

        const size_t best = order[0];
        const size_t worst = order.back();
        const size_t second_worst = order[order.size() - 2];
        Vector centroid = Vector::Zero(r);
        for (size_t i = 0; i + 1 < order.size(); ++i) centroid += pts[order[i]];
        centroid /= static_cast<double>(np - 1);

        const Vector reflected = centroid + (centroid - pts[worst]);
        const double f_reflected = crit.value_eta(reflected);
        if (f_reflected < vals[best]) {
            const Vector expanded = centroid + 2.0 * (centroid - pts[worst]);
            const double f_expanded = crit.value_eta(expanded);
            if (f_expanded < f_reflected) {
                pts[worst] = expanded;
                vals[worst] = f_expanded;
            } else {
                pts[worst] = reflected;
                vals[worst] = f_reflected;
            }
            continue;
        }
        if (f_reflected < vals[second_worst]) {
            pts[worst] = reflected;
            vals[worst] = f_reflected;
            continue;
        }
        const Vector contracted = centroid + 0.5 * (pts[worst] - centroid);
        const double f_contracted = crit.value_eta(contracted);
        if (f_contracted < vals[worst]) {
            pts[worst] = contracted;
            vals[worst] = f_contracted;
            continue;
        }
        for (size_t i = 0; i < pts.size(); ++i) {  // shrink toward the best vertex
            if (i == best) continue;
            pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
            vals[i] = crit.value_eta(pts[i]);
        }
    }
    size_t arg = 0;
    for (size_t i = 1; i < vals.size(); ++i) {
        if (vals[i] < vals[arg]) arg = i;
    }
    res.eta = pts[arg];
    res.value = vals[arg];
    return res;
}

// Damped Gauss-Newton refinement of the criterion minimum using the supplied
// moment gradients; tightens the Nelder-Mead output to machine precision.
void polish(const Criterion& crit, Vector& eta, double& value) {
    for (int pass = 0; pass < 30; ++pass) {
        const Vector theta = crit.transform.to_theta(eta);
        const Vector mbar = crit.mean_moment(theta);
        const Matrix jac = crit.mean_gradient(theta) * crit.transform.jacobian(eta).asDiagonal();
        const Matrix jw = jac.transpose() * (*crit.weighting);
        Eigen::FullPivLU<Matrix> lu(jw * jac);
        if (!lu.isInvertible()) return;
        const Vector step = lu.solve(jw * mbar);
        if (step.cwiseAbs().maxCoeff() < 1e-15) return;

        double scale = 1.0;
        bool accepted = false;
        for (int attempt = 0; attempt < 12; ++attempt) {
            const Vector cand = eta - scale * step;
            const double cand_value = crit.value_eta(cand);
            if (cand_value <= value) {
                const double moved = (scale * step).cwiseAbs().maxCoeff();
                eta = cand;
                value = cand_value;
                accepted = true;
                if (moved < 1e-14) return;
                break;
            }
            scale *= 0.5;
        }
        if (!accepted) return;
    }
}

Matrix filter_sample(const levy::IncrementSample& sample, const MomentFunction& mf,
                     long& dropped) {
    dropped = 0;
    if (!mf.sample_domain) return sample.values;
    std::vector<Eigen::Index> keep;
    keep.reserve(static_cast<size_t>(sample.values.cols()));
    for (Eigen::Index k = 0; k < sample.values.cols(); ++k) {
        if (mf.sample_domain(sample.values.col(k))) {
            keep.push_back(k);
        } else {
            ++dropped;
        }
    }
    Matrix out(sample.values.rows(), static_cast<Eigen::Index>(keep.size()));
    for (size_t i = 0; i < keep.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = sample.values.col(keep[i]);
    return out;
}

Vector default_start(const Matrix& sample, const MomentFunction& mf) {
    // Method-of-moments start for two positive parameters interpreted as
    // (scale, shape); otherwise start at one (zero for unconstrained
    // coordinates handled by the caller through OptimizerConfig).
    const bool all_positive =
        std::all_of(mf.positive.begin(), mf.positive.end(), [](bool b) { return b; });
    if (mf.r_dim == 2 && all_positive && sample.rows() == 1) {
        const double n = static_cast<double>(sample.cols());
        const double mean = sample.row(0).sum() / n;
        const double var = (sample.row(0).array() - mean).square().sum() / n;
        if (mean > 0.0 && var > 0.0) {
            Vector start(2);
            start[0] = var / mean;          // scale
            start[1] = mean * mean / var;   // shape
            return start;
        }
    }
    Vector start = Vector::Ones(mf.r_dim);
    return start;
}

Matrix floored_inverse(const Matrix& omega, int r_dim, bool& floored) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(omega);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("weighting: eigendecomposition of the moment covariance failed");
    }
    const Eigen::Index q = omega.rows();
    const double floor = 1e-10 * es.eigenvalues().sum() / static_cast<double>(q);
    int below = 0;
    Vector inv(q);
    for (Eigen::Index i = 0; i < q; ++i) {
        double v = es.eigenvalues()[i];
        if (v < floor) {
            ++below;
            v = floor;
        }
        inv[i] = 1.0 / v;
    }
    if (below > static_cast<int>(q) - r_dim) {
        throw std::runtime_error(
            "weighting: estimated moment covariance is singular; use more data or fewer "
            "moment conditions");
    }
    floored = below > 0;
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

void MomentFunction::validate() const {
    require(q_dim >= r_dim && r_dim >= 1, "moment function: need q >= r >= 1 for identification");
    require(static_cast<int>(positive.size()) == r_dim,
            "moment function: positivity flags must match the parameter dimension");
    require(static_cast<bool>(g) && static_cast<bool>(grad),
            "moment function: evaluators must be set");
}

GmmResult gmm_estimate(const levy::IncrementSample& sample, const MomentFunction& mf,
                       const Matrix& weighting, const OptimizerConfig& opt) {
    mf.validate();
    require(sample.values.cols() > 0, "gmm: sample must be nonempty");
    require(weighting.rows() == mf.q_dim && weighting.cols() == mf.q_dim,
            "gmm: weighting matrix must be q x q");

    GmmResult result;
    Matrix filtered = filter_sample(sample, mf, result.diagnostics.dropped);
    result.n_used = filtered.cols();
    if (filtered.cols() == 0) {
        throw std::runtime_error("gmm: degenerate sample, no points inside the moment domain");
    }
    result.diagnostics.drop_flagged =
        static_cast<double>(result.diagnostics.dropped) >
        0.01 * static_cast<double>(sample.values.cols());

    Transform transform{mf.positive};
    Vector start = opt.start ? *opt.start : default_start(filtered, mf);
    for (Eigen::Index i = 0; i < start.size(); ++i) {
        if (mf.positive[static_cast<size_t>(i)] && !(start[i] > 0.0)) {
            throw std::runtime_error("gmm: degenerate sample, no valid starting point");
        }
    }

    Criterion crit{&filtered, &mf, &weighting, transform};
    Vector eta = transform.to_eta(start);

    NelderMeadResult best;
    best.value = std::numeric_limits<double>::infinity();
    bool converged = false;
    int total_iterations = 0;
    int attempts = 0;
    for (int attempt = 0; attempt <= opt.restarts; ++attempt) {
        Vector eta_start = eta;
        if (attempt > 0) {
            // Deterministic perturbation around the best point so far.
            for (Eigen::Index i = 0; i < eta_start.size(); ++i) {
                const double sign = ((attempt + i) % 2 == 0) ? 1.0 : -1.0;
                eta_start[i] += sign * 0.1 * attempt;
            }
        }
        NelderMeadResult run = nelder_mead(crit, eta_start, opt.tolerance, opt.max_iterations);
        total_iterations += run.iterations;
        ++attempts;
        if (run.value < best.value) best = run;
        if (run.converged) {
            converged = true;
            if (run.value <= best.value) best = run;
            break;
        }
        eta = best.eta;
    }
    result.diagnostics.iterations = total_iterations;
    result.diagnostics.restarts_used = attempts - 1;
    result.diagnostics.converged = converged;
    if (!converged) {
        throw std::runtime_error(
            "gmm: optimizer did not converge after " + std::to_string(attempts) +
            " attempts (best criterion " + std::to_string(best.value) + ")");
    }
    polish(crit, best.eta, best.value);

    result.theta = transform.to_theta(best.eta);
    result.criterion = best.value;
    result.weighting = weighting;

    Matrix omega = Matrix::Zero(mf.q_dim, mf.q_dim);
    for (Eigen::Index k = 0; k < filtered.cols(); ++k) {
        const Vector gk = mf.g(filtered.col(k), result.theta);
        omega += gk * gk.transpose();
    }
    result.omega = omega / static_cast<double>(filtered.cols());
    result.g_matrix = -crit.mean_gradient(result.theta);
    result.sigma = asymptotic_covariance(result.g_matrix, result.omega, weighting);
    return result;
}

GmmResult two_stage_estimate(const levy::IncrementSample& sample, const MomentFunction& mf,
                             const OptimizerConfig& opt) {
    mf.validate();
    const Matrix identity = Matrix::Identity(mf.q_dim, mf.q_dim);
    GmmResult stage1 = gmm_estimate(sample, mf, identity, opt);

    bool floored = false;
    const Matrix optimal_weighting = floored_inverse(stage1.omega, mf.r_dim, floored);

    OptimizerConfig second = opt;
    second.start = stage1.theta;
    GmmResult stage2 = gmm_estimate(sample, mf, optimal_weighting, second);
    stage2.diagnostics.omega_floored = floored;
    stage2.diagnostics.iterations += stage1.diagnostics.iterations;
    return stage2;
}

Matrix asymptotic_covariance(const Matrix& g, const Matrix& omega, const Matrix& weighting) {
    require(g.rows() == omega.rows() && omega.rows() == omega.cols(),
            "asymptotic covariance: dimension mismatch between G and Omega");
    require(weighting.rows() == g.rows() && weighting.cols() == g.rows(),
            "asymptotic covariance: weighting must be q x q");
    const Matrix gwg = g.transpose() * weighting * g;
    Eigen::FullPivLU<Matrix> lu(gwg);
    if (!lu.isInvertible()) {
        throw std::runtime_error("asymptotic covariance: G^T W G is rank deficient");
    }
    const Matrix bread = lu.inverse();
    const Matrix sigma = bread * g.transpose() * weighting * omega * weighting * g * bread;
    return 0.5 * (sigma + sigma.transpose());
}

Eigen::Matrix2d gamma_fisher_information(double b, double a) {
    Eigen::Matrix2d info;
    info << a / (b * b), 1.0 / b, 1.0 / b, levy::trigamma(a);
    return info;
}

MomentFunction gamma_mle_moment_function() {
    MomentFunction mf;
    mf.q_dim = 2;
    mf.r_dim = 2;
    mf.positive = {true, true};
    mf.g = [](const Vector& x, const Vector& theta) -> Vector {
        return levy::gamma_score(x[0], theta[0], theta[1]);
    };
    mf.grad = [](const Vector& x, const Vector& theta) -> Matrix {
        const double b = theta[0];
        const double a = theta[1];
        Matrix h(2, 2);
        h(0, 0) = a / (b * b) - 2.0 * x[0] / (b * b * b);
        h(0, 1) = -1.0 / b;
        h(1, 0) = -1.0 / b;
        h(1, 1) = -levy::trigamma(a);
        return h;
    };
    mf.sample_domain = [](const Vector& x) { return x[0] > 0.0; };
    return mf;
}

MomentFunction cf_moment_function(const std::vector<Vector>& u_points, CharExponent psi,
                                  CharExponentGradient dpsi, int r_dim,
                                  std::vector<bool> positive) {
    require(!u_points.empty(), "cf moments: at least one probe point required");
    for (size_t i = 0; i < u_points.size(); ++i) {
        require(u_points[i].norm() > 0.0, "cf moments: zero probe gives an identically zero moment");
        for (size_t j = i + 1; j < u_points.size(); ++j) {
            require((u_points[i] - u_points[j]).norm() > 0.0, "cf moments: duplicate probe points");
        }
    }
    MomentFunction mf;
    mf.q_dim = 2 * static_cast<int>(u_points.size());
    mf.r_dim = r_dim;
    mf.positive = std::move(positive);
    mf.g = [u_points, psi](const Vector& x, const Vector& theta) -> Vector {
        Vector out(2 * static_cast<Eigen::Index>(u_points.size()));
        for (size_t k = 0; k < u_points.size(); ++k) {
            const double phase = u_points[k].dot(x);
            const std::complex<double> diff =
                std::complex<double>(std::cos(phase), std::sin(phase)) -
                std::exp(psi(u_points[k], theta));
            out[2 * static_cast<Eigen::Index>(k)] = diff.real();
            out[2 * static_cast<Eigen::Index>(k) + 1] = diff.imag();
        }
        return out;
    };
    mf.grad = [u_points, psi, dpsi, r_dim](const Vector&, const Vector& theta) -> Matrix {
        Matrix out(2 * static_cast<Eigen::Index>(u_points.size()), r_dim);
        for (size_t k = 0; k < u_points.size(); ++k) {
            const std::complex<double> cf = std::exp(psi(u_points[k], theta));
            const Eigen::VectorXcd row = -cf * dpsi(u_points[k], theta).array();
            out.row(2 * static_cast<Eigen::Index>(k)) = row.real().transpose();
            out.row(2 * static_cast<Eigen::Index>(k) + 1) = row.imag().transpose();
        }
        return out;
    };
    return mf;
}

MomentFunction gamma_cf_moment_function(const std::vector<double>& u_points) {
    std::vector<Vector> probes;
    probes.reserve(u_points.size());
    for (double u : u_points) probes.push_back(Vector::Constant(1, u));
    CharExponent psi = [](const Vector& u, const Vector& theta) {
        return levy::gamma_char_exponent(u[0], theta[0], theta[1]);
    };
    CharExponentGradient dpsi = [](const Vector& u, const Vector& theta) -> Eigen::VectorXcd {
        const double b = theta[0];
        const double a = theta[1];
        const std::complex<double> denom(1.0, -b * u[0]);
        Eigen::VectorXcd grad(2);
        grad[0] = std::complex<double>(0.0, a * u[0]) / denom;  // d psi / d b
        grad[1] = -std::log(denom);                             // d psi / d a
        return grad;
    };
    return cf_moment_function(probes, psi, dpsi, 2, {true, true});
}

void cf_population_moments(const std::vector<Vector>& u_points, const CharExponent& psi,
                           const CharExponentGradient& dpsi, const Vector& theta_true,
                           Matrix& g0_out, Matrix& omega0_out) {
    const int kq = static_cast<int>(u_points.size());
    const int q = 2 * kq;
    g0_out.resize(q, theta_true.size());
    omega0_out.resize(q, q);

    auto cf = [&](const Vector& u) { return std::exp(psi(u, theta_true)); };

    for (int k = 0; k < kq; ++k) {
        const std::complex<double> c = cf(u_points[static_cast<size_t>(k)]);
        const Eigen::VectorXcd row = c * dpsi(u_points[static_cast<size_t>(k)], theta_true).array();
        g0_out.row(2 * k) = row.real().transpose();
        g0_out.row(2 * k + 1) = row.imag().transpose();
    }

    // Second moments of (cos<u,X>, sin<u,X>) follow from the characteristic
    // function at probe sums and differences.
    for (int j = 0; j < kq; ++j) {
        for (int k = 0; k < kq; ++k) {
            const Vector& uj = u_points[static_cast<size_t>(j)];
            const Vector& uk = u_points[static_cast<size_t>(k)];
            const std::complex<double> plus = cf(uj + uk);
            const std::complex<double> minus = cf(uj - uk);
            const std::complex<double> cj = cf(uj);
            const std::complex<double> ck = cf(uk);

            const double e_cc = 0.5 * (minus.real() + plus.real());
            const double e_ss = 0.5 * (minus.real() - plus.real());
            const double e_cs = 0.5 * (plus.imag() - minus.imag());  // cos(uj x) sin(uk x)
            const double e_sc = 0.5 * (plus.imag() + minus.imag());  // sin(uj x) cos(uk x)

            omega0_out(2 * j, 2 * k) = e_cc - cj.real() * ck.real();
            omega0_out(2 * j, 2 * k + 1) = e_cs - cj.real() * ck.imag();
            omega0_out(2 * j + 1, 2 * k) = e_sc - cj.imag() * ck.real();
            omega0_out(2 * j + 1, 2 * k + 1) = e_ss - cj.imag() * ck.imag();
        }
    }
}

GmmResult estimate_from_observations(const carma::CarmaModel& model,
                                     const carma::StateSpaceRealization& ssr,
                                     const carma::SampledSeries& series, const MomentFunction& mf,
                                     const OptimizerConfig& opt) {
    (void)model;
    recovery::RecoveryConfig rc;
    const recovery::RecoveryOutput rec = recover_increments(ssr, series, rc);
    GmmResult result = two_stage_estimate(rec.increments, mf, opt);
    result.n_increments = series.N;
    result.h = series.h;
    return result;
}

}  // namespace mcarma::gmm
