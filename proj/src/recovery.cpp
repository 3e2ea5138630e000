#include "mcarma/recovery.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcarma/matpoly.hpp"

namespace mcarma::recovery {

namespace {

double binomial(int n, int k) {
    double acc = 1.0;
    for (int i = 1; i <= k; ++i) acc = acc * static_cast<double>(n - k + i) / static_cast<double>(i);
    return acc;
}

// Kernel values e^{B j h} Eq for j = 0..K, by iterated multiplication with
// the one-step propagator.
std::vector<Matrix> kernel_table(const Matrix& bbold, const Matrix& eq, double h, int K) {
    std::vector<Matrix> table;
    table.reserve(static_cast<size_t>(K) + 1);
    table.push_back(eq);
    const Matrix step = matpoly::expm(bbold * h);
    for (int j = 1; j <= K; ++j) table.push_back(step * table.back());
    return table;
}

}  // namespace

Vector forward_difference(const Matrix& series, int nu, double h, Eigen::Index t_index) {
    if (nu < 0) throw std::invalid_argument("forward_difference: order must be >= 0");
    if (h <= 0.0) throw std::invalid_argument("forward_difference: spacing must be positive");
    if (t_index < 0 || t_index + nu >= series.cols()) {
        throw std::out_of_range("forward_difference: sample at index " +
                                std::to_string(t_index + nu) + " required but series has " +
                                std::to_string(series.cols()) + " columns");
    }
    if (nu == 0) return series.col(t_index);
    Vector acc = Vector::Zero(series.rows());
    for (int i = 0; i <= nu; ++i) {
        const double sign = ((nu - i) % 2 == 0) ? 1.0 : -1.0;
        acc += sign * binomial(nu, i) * series.col(t_index + i);
    }
    return acc / std::pow(h, nu);
}

Vector trapezoid(const Matrix& segment, double h, const std::function<Matrix(double)>& kernel) {
    const int K = static_cast<int>(std::round(1.0 / h));
    if (std::abs(1.0 / h - K) > 1e-9) {
        throw std::invalid_argument("trapezoid: 1/h must be an integer");
    }
    if (segment.cols() != K + 1) {
        throw std::invalid_argument("trapezoid: segment must have exactly 1/h + 1 points, got " +
                                    std::to_string(segment.cols()));
    }
    auto weighted = [&](int i) -> Vector {
        if (!kernel) return segment.col(i);
        return kernel(static_cast<double>(K - i) * h) * segment.col(i);
    };
    Vector acc = 0.5 * (weighted(0) + weighted(K));
    for (int i = 1; i < K; ++i) acc += weighted(i);
    return h * acc;
}

Matrix xq_recursion(const carma::StateSpaceRealization& ssr, const carma::SampledSeries& series,
                    const RecoveryConfig& cfg) {
    series.validate();
    const Eigen::Index qm = ssr.Bbold.rows();
    Vector xq = cfg.xq0.size() == 0 ? Vector::Zero(qm) : cfg.xq0;
    if (xq.size() != qm) {
        throw std::invalid_argument("xq_recursion: initial value has wrong dimension");
    }
    const int K = series.per_unit();
    const auto kernels = kernel_table(ssr.Bbold, ssr.Eq, series.h, K);
    const Matrix propagator = matpoly::expm(ssr.Bbold);

    Matrix path(qm, series.N + 1);
    path.col(0) = xq;
    for (int n = 1; n <= series.N; ++n) {
        const Eigen::Index base = static_cast<Eigen::Index>(n - 1) * K;
        // Trapezoidal approximation of the kernel integral over [n-1, n];
        // sample i sits at distance (K - i) h from the right endpoint.
        Vector integral = 0.5 * (kernels[static_cast<size_t>(K)] * series.values.col(base) +
                                 kernels[0] * series.values.col(base + K));
        for (int i = 1; i < K; ++i) {
            integral += kernels[static_cast<size_t>(K - i)] * series.values.col(base + i);
        }
        integral *= series.h;
        xq = propagator * xq + integral;
        path.col(n) = xq;
    }
    return path;
}

RecoveryOutput recover_increments(const carma::StateSpaceRealization& ssr,
                                  const carma::SampledSeries& series, const RecoveryConfig& cfg) {
    series.validate();
    const int max_order = static_cast<int>(ssr.k_deriv.size()) - 1;  // p - q - 1
    if (series.extra < max_order) {
        throw std::invalid_argument(
            "recover_increments: series lacks the " + std::to_string(max_order) +
            " trailing samples needed by the highest-order forward difference");
    }
    const Eigen::Index m = ssr.k_int.rows();
    const int K = series.per_unit();
    const int N = series.N;

    RecoveryOutput out;
    out.xq_path = xq_recursion(ssr, series, cfg);
    out.increments.spacing = 1.0;
    out.increments.values.resize(m, N);
    if (cfg.diagnostics) {
        out.diagnostics = RecoveryDiagnostics{Matrix::Zero(m, N), Matrix::Zero(m, N),
                                              Matrix::Zero(m, N)};
    }

    for (int n = 1; n <= N; ++n) {
        Vector deriv_part = Vector::Zero(m);
        for (int nu = 0; nu <= max_order; ++nu) {
            const Vector diff =
                forward_difference(series.values, nu, series.h, static_cast<Eigen::Index>(n) * K) -
                forward_difference(series.values, nu, series.h,
                                   static_cast<Eigen::Index>(n - 1) * K);
            deriv_part += ssr.k_deriv[static_cast<size_t>(nu)] * diff;
        }
        const Vector state_part = ssr.k_state * (out.xq_path.col(n) - out.xq_path.col(n - 1));
        const Vector int_part =
            ssr.k_int * trapezoid(series.values.middleCols(static_cast<Eigen::Index>(n - 1) * K,
                                                           K + 1),
                                  series.h);
        out.increments.values.col(n - 1) = deriv_part + state_part + int_part;
        if (out.diagnostics) {
            out.diagnostics->term_deriv.col(n - 1) = deriv_part;
            out.diagnostics->term_state.col(n - 1) = state_part;
            out.diagnostics->term_int.col(n - 1) = int_part;
        }
    }
    return out;
}

Matrix recover_state_blocks(const carma::StateSpaceRealization& ssr,
                            const carma::SampledSeries& series, const Matrix& xq_path, int n) {
    series.validate();
    if (n < 0 || n >= xq_path.cols()) {
        throw std::out_of_range("recover_state_blocks: state path index out of range");
    }
    const Eigen::Index m = ssr.k_int.rows();
    const Eigen::Index qm = ssr.Bbold.rows();
    const int q = static_cast<int>(qm / m);
    const int p_minus_q = static_cast<int>(ssr.k_deriv.size());  // p - q

    Matrix sel = Matrix::Zero(m, qm);
    sel.block(0, (q - 1) * m, m, m) = Matrix::Identity(m, m);

    const int K = series.per_unit();
    Matrix blocks(m, p_minus_q);
    Matrix bpow = Matrix::Identity(qm, qm);
    for (int nhat = 1; nhat <= p_minus_q; ++nhat) {
        bpow *= ssr.Bbold;  // Bbold^{nhat}
        Vector acc = bpow * xq_path.col(n);
        Matrix bk = Matrix::Identity(qm, qm);
        // Accumulate Bbold^{nhat-1-nu} Eq D^nu Y backwards in nu.
        std::vector<Vector> diffs;
        for (int nu = 0; nu <= nhat - 1; ++nu) {
            diffs.push_back(forward_difference(series.values, nu, series.h,
                                               static_cast<Eigen::Index>(n) * K));
        }
        for (int nu = nhat - 1; nu >= 0; --nu) {
            acc += bk * (ssr.Eq * diffs[static_cast<size_t>(nu)]);
            if (nu > 0) bk *= ssr.Bbold;
        }
        blocks.col(nhat - 1) = sel * acc;
    }
    return blocks;
}

}  // namespace mcarma::recovery
