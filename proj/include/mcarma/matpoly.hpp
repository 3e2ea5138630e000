#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace mcarma::matpoly {

using Matrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Monic matrix polynomial R(z) = z^r I + M_1 z^{r-1} + ... + M_r with
/// square s x s coefficients.  The leading identity is implicit.
struct MatrixPolynomialMonic {
    Eigen::Index block_dim = 0;   // s
    std::vector<Matrix> coeffs;   // M_1 .. M_r

    int degree() const { return static_cast<int>(coeffs.size()); }
    void validate() const;
};

/// General matrix polynomial B_0 + B_1 z + ... + B_q z^q with d x m coefficients.
struct MatrixPolynomialGeneral {
    Eigen::Index rows = 0;   // d
    Eigen::Index cols = 0;   // m
    std::vector<Matrix> coeffs;  // B_0 .. B_q

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    void validate() const;
};

/// Block companion matrix of a monic matrix polynomial: identity blocks on
/// the super-diagonal, negated coefficients (-M_r, ..., -M_1) in the last
/// block row.
struct CompanionMatrix {
    Eigen::Index block_dim = 0;  // s
    int degree = 0;              // r
    Matrix dense;                // rs x rs
};

CompanionMatrix companion(const MatrixPolynomialMonic& poly);

/// Evaluates R(z) (monic) at a complex point.
ComplexMatrix eval_monic(const MatrixPolynomialMonic& poly, std::complex<double> z);

/// Evaluates a general matrix polynomial at a complex point.
ComplexMatrix eval_general(const MatrixPolynomialGeneral& poly, std::complex<double> z);

/// Block (i,j), 1-based, of the resolvent (z I - M)^{-1} of the companion
/// matrix of `poly`, in closed form.  Throws std::domain_error when R(z) is
/// numerically singular; the message carries z.
ComplexMatrix resolvent_block(const MatrixPolynomialMonic& poly, std::complex<double> z,
                              int i, int j);

/// Assembles all r x r resolvent blocks into the full rs x rs matrix.
ComplexMatrix assemble_resolvent(const MatrixPolynomialMonic& poly, std::complex<double> z);

/// True iff every eigenvalue has real part < -margin.  Real parts within
/// 1e-12 of the threshold are rejected, so borderline spectra never pass.
bool is_hurwitz(const Matrix& matrix, double margin = 0.0);

/// Left inverse (M^T M)^{-1} M^T of a full-column-rank d x m matrix, m <= d.
/// Throws std::invalid_argument with the numerical rank on rank deficiency.
Matrix left_inverse(const Matrix& m);

/// Matrix exponential by scaling-and-squaring with a degree-13 Pade
/// approximant.
Matrix expm(const Matrix& a);

}  // namespace mcarma::matpoly
