#include "mcarma/carma.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mcarma::carma {

namespace {

void require(bool cond, const std::string& what) {
    if (!cond) throw std::invalid_argument(what);
}

long to_count(double span, double step, const char* what) {
    const double ratio = span / step;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, std::abs(ratio)) || rounded < 0) {
        throw std::invalid_argument(std::string(what) + ": grid ratio " + std::to_string(ratio) +
                                    " is not a nonnegative integer");
    }
    return static_cast<long>(rounded);
}

// Last-block selector [0 ... 0 I_m], m x qm.
Matrix block_selector(Eigen::Index m, int q) {
    Matrix s = Matrix::Zero(m, q * m);
    s.block(0, (q - 1) * m, m, m) = Matrix::Identity(m, m);
    return s;
}

}  // namespace

matpoly::MatrixPolynomialMonic CarmaModel::ar_poly() const {
    return matpoly::MatrixPolynomialMonic{m, ar};
}

matpoly::MatrixPolynomialGeneral CarmaModel::ma_poly() const {
    return matpoly::MatrixPolynomialGeneral{d, m, ma};
}

CarmaModel CarmaModel::create(int p, int q, Eigen::Index m, Eigen::Index d,
                              std::vector<Matrix> ar, std::vector<Matrix> ma) {
    require(p > q && q > 0, "carma model: orders must satisfy p > q > 0");
    require(m > 0 && d > 0 && m <= d, "carma model: dimensions must satisfy 0 < m <= d");
    require(static_cast<int>(ar.size()) == p, "carma model: expected p autoregressive coefficients");
    require(static_cast<int>(ma.size()) == q + 1, "carma model: expected q+1 moving-average coefficients");
    for (const auto& a : ar)
        require(a.rows() == m && a.cols() == m, "carma model: autoregressive coefficients must be m x m");
    for (const auto& b : ma)
        require(b.rows() == d && b.cols() == m, "carma model: moving-average coefficients must be d x m");

    CarmaModel model{p, q, m, d, std::move(ar), std::move(ma)};

    // Stability of the autoregressive side: zeros of det P(z) are exactly the
    // eigenvalues of the block companion matrix.
    const auto comp = matpoly::companion(model.ar_poly());
    if (!matpoly::is_hurwitz(comp.dense)) {
        throw std::invalid_argument(
            "carma model: autoregressive polynomial is not stable "
            "(det P has a zero with nonnegative real part)");
    }

    Matrix bq_li;
    try {
        bq_li = matpoly::left_inverse(model.ma.back());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("carma model: leading moving-average "
                                                "coefficient has no left inverse: ") +
                                    e.what());
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(model.ma.back().transpose() * model.ma.front());
    if (qr.rank() < m) {
        throw std::invalid_argument(
            "carma model: B_q^T B_0 is rank deficient; the moving-average side is not invertible");
    }

    matpoly::MatrixPolynomialMonic reduced;
    reduced.block_dim = m;
    for (int j = q - 1; j >= 0; --j) reduced.coeffs.push_back(bq_li * model.ma[static_cast<size_t>(j)]);
    const auto bbold = matpoly::companion(reduced);
    if (!matpoly::is_hurwitz(bbold.dense)) {
        throw std::invalid_argument(
            "carma model: reduced moving-average polynomial is not stable "
            "(det B_q^{~1}Q has a zero with nonnegative real part)");
    }
    return model;
}

StateSpaceRealization build_state_space(const CarmaModel& model) {
    const Eigen::Index m = model.m;
    const Eigen::Index d = model.d;
    const int p = model.p;
    const int q = model.q;

    StateSpaceRealization ssr;
    ssr.A = matpoly::companion(model.ar_poly()).dense;
    ssr.Ep = Matrix::Zero(p * m, m);
    ssr.Ep.block((p - 1) * m, 0, m, m) = Matrix::Identity(m, m);
    ssr.Bline = Matrix::Zero(d, p * m);
    for (int j = 0; j <= q; ++j) ssr.Bline.block(0, j * m, d, m) = model.ma[static_cast<size_t>(j)];

    ssr.Bq_li = matpoly::left_inverse(model.ma.back());
    matpoly::MatrixPolynomialMonic reduced;
    reduced.block_dim = m;
    for (int j = q - 1; j >= 0; --j) reduced.coeffs.push_back(ssr.Bq_li * model.ma[static_cast<size_t>(j)]);
    ssr.Bbold = matpoly::companion(reduced).dense;
    ssr.Eq = Matrix::Zero(q * m, d);
    ssr.Eq.block((q - 1) * m, 0, m, d) = ssr.Bq_li;

    const Matrix sel = block_selector(m, q);  // [0 ... 0 I_m]
    const auto A_at = [&](int idx) -> const Matrix& {  // A_idx, 1-based
        return model.ar[static_cast<size_t>(idx - 1)];
    };

    // Powers of Bbold up to p-q.
    std::vector<Matrix> bpow;
    bpow.push_back(Matrix::Identity(q * m, q * m));
    for (int k = 1; k <= p - q; ++k) bpow.push_back(bpow.back() * ssr.Bbold);

    ssr.k_deriv.clear();
    for (int nu = 0; nu <= p - q - 1; ++nu) {
        Matrix coeff = sel * bpow[static_cast<size_t>(p - q - 1 - nu)] * ssr.Eq;
        for (int k = nu; k <= p - q - 2; ++k) {
            coeff += A_at(p - q - k - 1) * (sel * bpow[static_cast<size_t>(k - nu)] * ssr.Eq);
        }
        ssr.k_deriv.push_back(std::move(coeff));
    }

    Matrix aq_line(m, q * m);  // [A_p  A_{p-1} ... A_{p-q+1}]
    for (int j = 0; j < q; ++j) aq_line.block(0, j * m, m, m) = A_at(p - j);
    // aq_line * Bbold^{-1} via a solve against Bbold^T.
    Eigen::PartialPivLU<Matrix> bbold_t_lu(ssr.Bbold.transpose());
    ssr.k_state = bbold_t_lu.solve(aq_line.transpose()).transpose();
    for (int k = 1; k <= p - q; ++k) {
        ssr.k_state += A_at(p - q - k + 1) * (sel * bpow[static_cast<size_t>(k - 1)]);
    }
    ssr.k_state += sel * bpow[static_cast<size_t>(p - q)];

    const Matrix bq_li_b0 = ssr.Bq_li * model.ma.front();
    ssr.k_int = A_at(p) * bq_li_b0.partialPivLu().solve(ssr.Bq_li);

#ifndef NDEBUG
    {
        using namespace std::complex_literals;
        const std::complex<double> probes[] = {0.31 + 0.77i, 1.3 - 0.4i, 2.0 + 2.0i};
        const double dev = transfer_identity_check(ssr, model, probes);
        if (!(dev <= 1e-8)) {
            throw std::logic_error("state space self-check: transfer function mismatch " +
                                   std::to_string(dev));
        }
    }
#endif
    return ssr;
}

double transfer_identity_check(const StateSpaceRealization& ssr, const CarmaModel& model,
                               std::span<const std::complex<double>> z_probes) {
    using ComplexMatrix = Eigen::MatrixXcd;
    double worst = 0.0;
    const Eigen::Index n = ssr.A.rows();
    for (const auto& z : z_probes) {
        ComplexMatrix shifted = -ssr.A.cast<std::complex<double>>();
        shifted.diagonal().array() += z;
        const ComplexMatrix lhs =
            ssr.Bline.cast<std::complex<double>>() *
            shifted.partialPivLu().solve(ssr.Ep.cast<std::complex<double>>());

        const ComplexMatrix pz = matpoly::eval_monic(model.ar_poly(), z);
        Eigen::FullPivLU<ComplexMatrix> plu(pz);
        if (!plu.isInvertible()) {
            std::ostringstream msg;
            msg << "transfer check: P(z) singular at z = " << z.real() << " + " << z.imag() << "i";
            throw std::domain_error(msg.str());
        }
        const ComplexMatrix rhs = matpoly::eval_general(model.ma_poly(), z) * plu.inverse();
        worst = std::max(worst, (lhs - rhs).norm());
        (void)n;
    }
    return worst;
}

FinePath simulate(const CarmaModel& model, const StateSpaceRealization& ssr,
                  const levy::LevySpec& levy_spec, double T, double dt, const Vector& x0,
                  rng::Stream& stream, double warmup) {
    require(dt > 0.0 && T > 0.0, "simulate: T and dt must be positive");
    require(warmup >= 0.0, "simulate: warmup must be nonnegative");
    levy_spec.validate();
    require(levy_spec.dimension() == model.m, "simulate: driver dimension must match the model");
    require(x0.size() == ssr.A.rows(), "simulate: initial state has wrong dimension");
    const long steps = to_count(T, dt, "simulate: T/dt");
    const long warm_steps = to_count(warmup, dt, "simulate: warmup/dt");

    FinePath path;
    path.dt = dt;
    path.X.resize(ssr.A.rows(), steps + 1);
    path.Y.resize(model.d, steps + 1);
    path.L.resize(model.m, steps + 1);

    Vector x = x0;
    for (long k = 0; k < warm_steps; ++k) {
        const Vector dl = levy::sample_increment(levy_spec, dt, stream);
        x += ssr.A * x * dt + ssr.Ep * dl;
    }

    Vector l = Vector::Zero(model.m);
    path.X.col(0) = x;
    path.Y.col(0) = ssr.Bline * x;
    path.L.col(0) = l;
    for (long k = 0; k < steps; ++k) {
        const Vector dl = levy::sample_increment(levy_spec, dt, stream);
        x += ssr.A * x * dt + ssr.Ep * dl;
        l += dl;
        if (!x.allFinite()) {
            throw std::runtime_error("simulate: state became non-finite at step " +
                                     std::to_string(k + 1));
        }
        path.X.col(k + 1) = x;
        path.Y.col(k + 1) = ssr.Bline * x;
        path.L.col(k + 1) = l;
    }
    return path;
}

int SampledSeries::per_unit() const {
    const double k = 1.0 / h;
    const double rounded = std::round(k);
    if (std::abs(k - rounded) > 1e-9) {
        throw std::invalid_argument("sampled series: 1/h must be an integer");
    }
    return static_cast<int>(rounded);
}

void SampledSeries::validate() const {
    require(h > 0.0 && h <= 1.0, "sampled series: h must lie in (0, 1]");
    require(N >= 1, "sampled series: N must be >= 1");
    require(extra >= 0, "sampled series: extra sample count must be >= 0");
    const long expected = static_cast<long>(N) * per_unit() + extra + 1;
    require(values.cols() == expected, "sampled series: unexpected sample count");
}

SampledSeries sample(const FinePath& path, double h, int N, int extra) {
    require(N >= 1, "sample: N must be >= 1");
    require(extra >= 0, "sample: extra must be >= 0");
    const long stride = to_count(h, path.dt, "sample: h/dt");
    require(stride >= 1, "sample: h must be at least the simulation step");

    SampledSeries series;
    series.h = h;
    series.N = N;
    series.extra = extra;
    const long per_unit = series.per_unit();
    const long count = static_cast<long>(N) * per_unit + extra + 1;
    const long last_index = (count - 1) * stride;
    if (last_index > path.steps()) {
        throw std::invalid_argument("sample: fine path too short for the requested grid (needs " +
                                    std::to_string(last_index) + " steps, has " +
                                    std::to_string(path.steps()) + ")");
    }
    series.values.resize(path.Y.rows(), count);
    for (long j = 0; j < count; ++j) series.values.col(j) = path.Y.col(j * stride);
    return series;
}

levy::IncrementSample true_unit_increments(const FinePath& path, int N) {
    const long per_unit = to_count(1.0, path.dt, "true increments: 1/dt");
    require(static_cast<long>(N) * per_unit <= path.steps(), "true increments: path too short");
    levy::IncrementSample inc;
    inc.spacing = 1.0;
    inc.values.resize(path.L.rows(), N);
    for (int n = 1; n <= N; ++n) {
        inc.values.col(n - 1) =
            path.L.col(static_cast<long>(n) * per_unit) - path.L.col(static_cast<long>(n - 1) * per_unit);
    }
    return inc;
}

}  // namespace mcarma::carma
