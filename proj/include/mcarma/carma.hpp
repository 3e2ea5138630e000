#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

#include "mcarma/levy.hpp"
#include "mcarma/matpoly.hpp"
#include "mcarma/rng.hpp"

namespace mcarma::carma {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Controller-canonical CARMA(p,q) model: autoregressive coefficients
/// A_1..A_p (m x m) and moving-average coefficients B_0..B_q (d x m),
/// with p > q > 0 and m <= d.  Construction validates stability of the
/// autoregressive polynomial and invertibility of the moving-average side
/// (B_q and B_q^T B_0 full rank, stable reduced MA polynomial).
struct CarmaModel {
    int p = 0;
    int q = 0;
    Eigen::Index m = 0;
    Eigen::Index d = 0;
    std::vector<Matrix> ar;  // A_1 .. A_p
    std::vector<Matrix> ma;  // B_0 .. B_q

    static CarmaModel create(int p, int q, Eigen::Index m, Eigen::Index d,
                             std::vector<Matrix> ar, std::vector<Matrix> ma);

    matpoly::MatrixPolynomialMonic ar_poly() const;
    matpoly::MatrixPolynomialGeneral ma_poly() const;
};

/// State-space matrices of the controller canonical form plus the recovery
/// operators and the precomputed increment-reconstruction coefficients.
struct StateSpaceRealization {
    Matrix A;       // pm x pm block companion of the AR polynomial
    Matrix Ep;      // pm x m, last-block injector
    Matrix Bline;   // d x pm, [B_0 ... B_q 0 ... 0]
    Matrix Bbold;   // qm x qm block companion of the reduced MA polynomial
    Matrix Eq;      // qm x d, last block B_q^{~1}
    Matrix Bq_li;   // m x d left inverse of B_q

    std::vector<Matrix> k_deriv;  // nu = 0 .. p-q-1, each m x d
    Matrix k_state;               // m x qm
    Matrix k_int;                 // m x d
};

StateSpaceRealization build_state_space(const CarmaModel& model);

/// Max over probes of || Bline (zI - A)^{-1} Ep  -  Q(z) P(z)^{-1} ||.
/// Probes must avoid eigenvalues of A and zeros of det P; a singular P(z)
/// raises std::domain_error.
double transfer_identity_check(const StateSpaceRealization& ssr, const CarmaModel& model,
                               std::span<const std::complex<double>> z_probes);

/// Euler path of the state equation at resolution dt, with the driving path
/// retained as ground truth.  Columns index time 0, dt, 2dt, ..., T.
struct FinePath {
    double dt = 0.0;
    Matrix X;  // pm x (steps+1)
    Matrix Y;  // d  x (steps+1)
    Matrix L;  // m  x (steps+1), L(0) = 0

    Eigen::Index steps() const { return X.cols() - 1; }
    double horizon() const { return dt * static_cast<double>(steps()); }
};

/// Euler scheme X_{k+1} = X_k + A X_k dt + Ep dL_k, Y_k = Bline X_k.
/// T/dt must be integral.  A warmup period (also a multiple of dt) is
/// simulated first and discarded; the driver path restarts at zero there.
/// Non-finite states abort with the offending step index.
FinePath simulate(const CarmaModel& model, const StateSpaceRealization& ssr,
                  const levy::LevySpec& levy_spec, double T, double dt, const Vector& x0,
                  rng::Stream& stream, double warmup = 0.0);

/// Observations of Y on the grid (0, h, ..., N + extra*h), obtained by exact
/// subsampling of a fine path; extra = p - q - 1 trailing samples keep the
/// highest-order forward difference at n = N well defined.
struct SampledSeries {
    double h = 0.0;
    int N = 0;
    int extra = 0;
    Matrix values;  // d x (N/h + extra + 1)

    Eigen::Index points() const { return values.cols(); }
    int per_unit() const;  // 1/h as an integer
    void validate() const;
};

SampledSeries sample(const FinePath& path, double h, int N, int extra);

/// True unit increments L(n) - L(n-1), n = 1..N, read off a fine path.
levy::IncrementSample true_unit_increments(const FinePath& path, int N);

}  // namespace mcarma::carma
