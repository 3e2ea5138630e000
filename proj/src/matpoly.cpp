#include "mcarma/matpoly.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mcarma::matpoly {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

}  // namespace

void MatrixPolynomialMonic::validate() const {
    require(block_dim > 0, "matrix polynomial: block dimension must be positive");
    require(!coeffs.empty(), "matrix polynomial: degree must be positive");
    for (const auto& c : coeffs) {
        require(c.rows() == block_dim && c.cols() == block_dim,
                "matrix polynomial: all coefficients must be square of the block dimension");
    }
}

void MatrixPolynomialGeneral::validate() const {
    require(rows > 0 && cols > 0, "matrix polynomial: dimensions must be positive");
    require(!coeffs.empty(), "matrix polynomial: coefficient list must not be empty");
    for (const auto& c : coeffs) {
        require(c.rows() == rows && c.cols() == cols,
                "matrix polynomial: all coefficients must be rows x cols");
    }
}

CompanionMatrix companion(const MatrixPolynomialMonic& poly) {
    poly.validate();
    const Eigen::Index s = poly.block_dim;
    const int r = poly.degree();
    Matrix dense = Matrix::Zero(r * s, r * s);
    for (int blk = 0; blk + 1 < r; ++blk) {
        dense.block(blk * s, (blk + 1) * s, s, s) = Matrix::Identity(s, s);
    }
    for (int j = 0; j < r; ++j) {
        // Last block row carries (-M_r, -M_{r-1}, ..., -M_1).
        dense.block((r - 1) * s, j * s, s, s) = -poly.coeffs[static_cast<size_t>(r - 1 - j)];
    }
    return CompanionMatrix{s, r, std::move(dense)};
}

ComplexMatrix eval_monic(const MatrixPolynomialMonic& poly, std::complex<double> z) {
    poly.validate();
    const Eigen::Index s = poly.block_dim;
    const int r = poly.degree();
    ComplexMatrix acc = ComplexMatrix::Identity(s, s);
    for (int k = 0; k < r; ++k) {
        acc = acc * z + poly.coeffs[static_cast<size_t>(k)].cast<std::complex<double>>();
    }
    return acc;
}

ComplexMatrix eval_general(const MatrixPolynomialGeneral& poly, std::complex<double> z) {
    poly.validate();
    const int q = poly.degree();
    ComplexMatrix acc = poly.coeffs.back().cast<std::complex<double>>();
    for (int k = q - 1; k >= 0; --k) {
        acc = acc * z + poly.coeffs[static_cast<size_t>(k)].cast<std::complex<double>>();
    }
    return acc;
}

ComplexMatrix resolvent_block(const MatrixPolynomialMonic& poly, std::complex<double> z,
                              int i, int j) {
    poly.validate();
    const int r = poly.degree();
    const Eigen::Index s = poly.block_dim;
    require(i >= 1 && i <= r && j >= 1 && j <= r, "resolvent_block: block index out of range");

    const ComplexMatrix rz = eval_monic(poly, z);
    Eigen::FullPivLU<ComplexMatrix> lu(rz);
    if (!lu.isInvertible()) {
        std::ostringstream msg;
        msg << "resolvent: R(z) singular at z = " << z.real() << " + " << z.imag() << "i";
        throw std::domain_error(msg.str());
    }

    auto zpow = [&z](int e) {
        std::complex<double> acc(1.0, 0.0);
        for (int k = 0; k < e; ++k) acc *= z;
        return acc;
    };

    ComplexMatrix num = ComplexMatrix::Zero(s, s);
    if (j >= i) {
        num = zpow(r - 1 + i - j) * ComplexMatrix::Identity(s, s);
        for (int k = 1; k <= r - j; ++k) {
            num += poly.coeffs[static_cast<size_t>(k - 1)].cast<std::complex<double>>() *
                   zpow(r - 1 - k + i - j);
        }
    } else {
        for (int k = r - j + 1; k <= r; ++k) {
            num -= poly.coeffs[static_cast<size_t>(k - 1)].cast<std::complex<double>>() *
                   zpow(r - 1 - k + i - j);
        }
    }
    return lu.solve(num);
}

ComplexMatrix assemble_resolvent(const MatrixPolynomialMonic& poly, std::complex<double> z) {
    const int r = poly.degree();
    const Eigen::Index s = poly.block_dim;
    ComplexMatrix out(r * s, r * s);
    for (int i = 1; i <= r; ++i)
        for (int j = 1; j <= r; ++j)
            out.block((i - 1) * s, (j - 1) * s, s, s) = resolvent_block(poly, z, i, j);
    return out;
}

bool is_hurwitz(const Matrix& matrix, double margin) {
    require(matrix.rows() == matrix.cols(), "is_hurwitz: matrix must be square");
    require(margin >= 0.0, "is_hurwitz: margin must be nonnegative");
    Eigen::EigenSolver<Matrix> solver(matrix, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("is_hurwitz: eigenvalue computation failed");
    }
    constexpr double kStrictTol = 1e-12;
    const auto& ev = solver.eigenvalues();
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        if (!(ev[k].real() < -margin - kStrictTol)) return false;
    }
    return true;
}

Matrix left_inverse(const Matrix& m) {
    require(m.cols() <= m.rows(), "left_inverse: need at least as many rows as columns");
    Eigen::ColPivHouseholderQR<Matrix> qr(m);
    if (qr.rank() < m.cols()) {
        std::ostringstream msg;
        msg << "left_inverse: rank deficient input (numerical rank " << qr.rank() << " of "
            << m.cols() << ")";
        throw std::invalid_argument(msg.str());
    }
    // Least-squares solve of M X = I equals (M^T M)^{-1} M^T for full column rank.
    return qr.solve(Matrix::Identity(m.rows(), m.rows()));
}

Matrix expm(const Matrix& a) {
    require(a.rows() == a.cols(), "expm: matrix must be square");
    require(a.allFinite(), "expm: input must be finite");
    const Eigen::Index n = a.rows();
    const Matrix ident = Matrix::Identity(n, n);

    static const double kPade13[] = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
        129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
        1323241920.0,        40840800.0,          960960.0,           16380.0,
        182.0,               1.0};
    constexpr double kTheta13 = 5.371920351148152;

    const double norm = a.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
    int squarings = 0;
    if (norm > kTheta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
    }
    const Matrix as = a / std::ldexp(1.0, squarings);

    const Matrix a2 = as * as;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a2 * a4;
    const Matrix u = as * (a6 * (kPade13[13] * a6 + kPade13[11] * a4 + kPade13[9] * a2) +
                           kPade13[7] * a6 + kPade13[5] * a4 + kPade13[3] * a2 + kPade13[1] * ident);
    const Matrix v = a6 * (kPade13[12] * a6 + kPade13[10] * a4 + kPade13[8] * a2) +
                     kPade13[6] * a6 + kPade13[4] * a4 + kPade13[2] * a2 + kPade13[0] * ident;

    Matrix res = (v - u).partialPivLu().solve(v + u);
    for (int k = 0; k < squarings; ++k) res = res * res;
    return res;
}

}  // namespace mcarma::matpoly
