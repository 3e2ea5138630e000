#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "mcarma/carma.hpp"
#include "mcarma/levy.hpp"

namespace mcarma::recovery {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct RecoveryConfig {
    Vector xq0;               // initial value of the filtered state, qm; empty means zero
    bool diagnostics = false; // retain the three additive increment terms
};

/// Per-increment diagnostic terms of the reconstruction, kept only when
/// requested: the forward-difference part, the filtered-state part and the
/// integral part, each m x N.
struct RecoveryDiagnostics {
    Matrix term_deriv;
    Matrix term_state;
    Matrix term_int;
};

struct RecoveryOutput {
    levy::IncrementSample increments;  // unit increments, m x N
    Matrix xq_path;                    // qm x (N+1), filtered state at 0..N
    std::optional<RecoveryDiagnostics> diagnostics;
};

/// nu-fold forward difference quotient at column t_index of an equally
/// spaced series: h^{-nu} sum_i (-1)^{nu-i} C(nu,i) f(t + i h).  nu = 0
/// returns the sample itself.  Missing trailing samples raise a bounds
/// error naming the needed index.
Vector forward_difference(const Matrix& series, int nu, double h, Eigen::Index t_index);

/// Composite trapezoidal rule over one unit interval sampled at spacing h
/// (the segment must have exactly 1/h + 1 columns).  When a kernel is given
/// it is evaluated at the distance to the right endpoint, so the quadrature
/// approximates the convolution integral of kernel(b - s) f(s).
Vector trapezoid(const Matrix& segment, double h,
                 const std::function<Matrix(double)>& kernel = {});

/// Filtered-state recursion on the unit grid: X(n) = e^B X(n-1) + I_n where
/// I_n is the trapezoidal approximation of the kernel integral of Y over
/// [n-1, n].  Returns qm x (N+1).
Matrix xq_recursion(const carma::StateSpaceRealization& ssr, const carma::SampledSeries& series,
                    const RecoveryConfig& cfg);

/// Reconstructs the unit increments of the driving process from sampled
/// observations, combining forward differences, the filtered state and the
/// trapezoidal integral with the precomputed coefficient matrices.
RecoveryOutput recover_increments(const carma::StateSpaceRealization& ssr,
                                  const carma::SampledSeries& series, const RecoveryConfig& cfg);

/// Diagnostic reconstruction of the upper state blocks at grid time n,
/// derivatives replaced by forward differences.  Returns an m x (p-q)
/// matrix whose column nhat-1 is block q+nhat.
Matrix recover_state_blocks(const carma::StateSpaceRealization& ssr,
                            const carma::SampledSeries& series, const Matrix& xq_path, int n);

}  // namespace mcarma::recovery
