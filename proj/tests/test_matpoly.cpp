#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <complex>
#include <random>
#include <vector>

#include "mcarma/matpoly.hpp"

using namespace mcarma;
using matpoly::Matrix;
using Complex = std::complex<double>;

namespace {

matpoly::MatrixPolynomialMonic scalar_poly(const std::vector<double>& coeffs) {
    matpoly::MatrixPolynomialMonic poly;
    poly.block_dim = 1;
    for (double c : coeffs) poly.coeffs.push_back(Matrix::Constant(1, 1, c));
    return poly;
}

// Durand-Kerner root finder, the oracle for companion eigenvalues; works on
// monic scalar polynomials given as coefficient lists c_1..c_r.
std::vector<Complex> polynomial_roots(const std::vector<double>& coeffs) {
    const int r = static_cast<int>(coeffs.size());
    auto eval = [&](Complex z) {
        Complex acc(1.0, 0.0);
        for (double c : coeffs) acc = acc * z + c;
        return acc;
    };
    std::vector<Complex> roots(r);
    for (int k = 0; k < r; ++k) roots[k] = std::pow(Complex(0.4, 0.9), k + 1);
    for (int iter = 0; iter < 300; ++iter) {
        double moved = 0.0;
        for (int k = 0; k < r; ++k) {
            Complex denom(1.0, 0.0);
            for (int j = 0; j < r; ++j) {
                if (j != k) denom *= roots[k] - roots[j];
            }
            const Complex delta = eval(roots[k]) / denom;
            roots[k] -= delta;
            moved = std::max(moved, std::abs(delta));
        }
        if (moved < 1e-14) break;
    }
    return roots;
}

std::mt19937_64 test_rng(0xC0FFEEull);

double uniform(double lo, double hi) {
    return lo + (hi - lo) * std::generate_canonical<double, 53>(test_rng);
}

matpoly::MatrixPolynomialMonic random_poly(int r, Eigen::Index s) {
    matpoly::MatrixPolynomialMonic poly;
    poly.block_dim = s;
    for (int k = 0; k < r; ++k) {
        Matrix c(s, s);
        for (Eigen::Index i = 0; i < s; ++i)
            for (Eigen::Index j = 0; j < s; ++j) c(i, j) = uniform(-2.0, 2.0);
        poly.coeffs.push_back(c);
    }
    return poly;
}

// A probe point away from the companion spectrum keeps the comparison with
// the dense inverse well-conditioned.
Complex probe_away_from_spectrum(const matpoly::CompanionMatrix& comp) {
    Eigen::ComplexEigenSolver<Matrix> es(comp.dense);
    for (;;) {
        const Complex z(uniform(-3.0, 3.0), uniform(-3.0, 3.0));
        double dist = 1e300;
        for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
            dist = std::min(dist, std::abs(z - es.eigenvalues()[k]));
        }
        if (dist > 0.3 && std::abs(z) < 3.5) return z;
    }
}

}  // namespace

TEST_CASE("companion layout for the cubic example") {
    const auto comp = matpoly::companion(scalar_poly({2.0, 1.5, 0.5}));
    Matrix expected(3, 3);
    expected << 0, 1, 0, 0, 0, 1, -0.5, -1.5, -2.0;
    CHECK((comp.dense - expected).cwiseAbs().maxCoeff() == 0.0);
    CHECK(comp.block_dim == 1);
    CHECK(comp.degree == 3);
}

TEST_CASE("companion of a degree-one block polynomial is -M1") {
    matpoly::MatrixPolynomialMonic poly;
    poly.block_dim = 2;
    Matrix m1(2, 2);
    m1 << 1.0, -0.5, 0.25, 3.0;
    poly.coeffs.push_back(m1);
    const auto comp = matpoly::companion(poly);
    CHECK((comp.dense + m1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("companion eigenvalues match scalar roots") {
    const std::vector<double> coeffs = {3.0, 2.0};  // z^2 + 3z + 2 -> roots -1, -2
    const auto comp = matpoly::companion(scalar_poly(coeffs));
    Eigen::EigenSolver<Matrix> es(comp.dense);
    std::vector<double> re;
    for (Eigen::Index k = 0; k < 2; ++k) re.push_back(es.eigenvalues()[k].real());
    std::sort(re.begin(), re.end());
    CHECK(re[0] == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(re[1] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("companion eigenvalues equal polynomial roots for random scalar polys") {
    for (int trial = 0; trial < 20; ++trial) {
        const int r = 2 + static_cast<int>(uniform(0.0, 2.0));
        std::vector<double> coeffs;
        for (int k = 0; k < r; ++k) coeffs.push_back(uniform(-2.0, 2.0));
        const auto comp = matpoly::companion(scalar_poly(coeffs));
        Eigen::ComplexEigenSolver<Matrix> es(comp.dense);
        auto oracle = polynomial_roots(coeffs);

        // Greedy nearest matching; sorting by (re, im) is unstable when the
        // real parts of a conjugate pair differ in the last ulp.
        std::vector<Complex> got;
        for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) got.push_back(es.eigenvalues()[k]);
        for (const Complex& ev : got) {
            size_t arg = 0;
            for (size_t j = 1; j < oracle.size(); ++j) {
                if (std::abs(ev - oracle[j]) < std::abs(ev - oracle[arg])) arg = j;
            }
            CHECK(std::abs(ev - oracle[arg]) < 1e-8);
            oracle.erase(oracle.begin() + static_cast<std::ptrdiff_t>(arg));
        }
    }
}

TEST_CASE("resolvent single-block case is R(z)^{-1}") {
    matpoly::MatrixPolynomialMonic poly;
    poly.block_dim = 2;
    Matrix m1(2, 2);
    m1 << 2.0, 0.3, -0.1, 1.5;
    poly.coeffs.push_back(m1);
    const Complex z(0.7, 0.2);
    const auto block = matpoly::resolvent_block(poly, z, 1, 1);
    Eigen::MatrixXcd direct = (z * Eigen::MatrixXcd::Identity(2, 2) + m1.cast<Complex>()).inverse();
    CHECK((block - direct).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("resolvent of z^2+3z+2 at z=0 matches the analytic inverse") {
    const auto poly = scalar_poly({3.0, 2.0});
    CHECK(matpoly::resolvent_block(poly, 0.0, 1, 1)(0, 0).real() == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(matpoly::resolvent_block(poly, 0.0, 1, 2)(0, 0).real() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(matpoly::resolvent_block(poly, 0.0, 2, 1)(0, 0).real() == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(matpoly::resolvent_block(poly, 0.0, 2, 2)(0, 0).real() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("assembled resolvent equals dense inversion on random instances") {
    for (int trial = 0; trial < 50; ++trial) {
        const int r = 1 + static_cast<int>(uniform(0.0, 3.0));
        const Eigen::Index s = 1 + static_cast<Eigen::Index>(uniform(0.0, 2.0));
        const auto poly = random_poly(std::min(r, 3), std::min<Eigen::Index>(s, 2));
        const auto comp = matpoly::companion(poly);
        const Complex z = probe_away_from_spectrum(comp);

        const auto assembled = matpoly::assemble_resolvent(poly, z);
        Eigen::MatrixXcd shifted = -comp.dense.cast<Complex>();
        shifted.diagonal().array() += z;
        const Eigen::MatrixXcd direct = shifted.inverse();
        CHECK((assembled - direct).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("resolvent reports singular R(z)") {
    const auto poly = scalar_poly({3.0, 2.0});
    CHECK_THROWS_AS(matpoly::resolvent_block(poly, Complex(-1.0, 0.0), 1, 1), std::domain_error);
}

TEST_CASE("is_hurwitz on the reference examples") {
    const auto comp = matpoly::companion(scalar_poly({2.0, 1.5, 0.5}));
    CHECK(matpoly::is_hurwitz(comp.dense));
    CHECK_FALSE(matpoly::is_hurwitz(Matrix::Zero(3, 3)));
    Matrix diag = Matrix::Zero(2, 2);
    diag(0, 0) = -0.5;
    diag(1, 1) = -3.0;
    CHECK_FALSE(matpoly::is_hurwitz(diag, 1.0));
    CHECK(matpoly::is_hurwitz(diag, 0.25));
}

TEST_CASE("is_hurwitz rejects real parts inside the strictness tolerance") {
    Matrix nearly = Matrix::Constant(1, 1, -1e-13);
    CHECK_FALSE(matpoly::is_hurwitz(nearly));
}

TEST_CASE("left inverse basics") {
    CHECK((matpoly::left_inverse(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3))
              .cwiseAbs()
              .maxCoeff() < 1e-14);
    Matrix column(2, 1);
    column << 1.0, 1.0;
    const Matrix li = matpoly::left_inverse(column);
    CHECK(li(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(li(0, 1) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("left inverse times the matrix is the identity") {
    for (int trial = 0; trial < 25; ++trial) {
        Matrix m(4, 2);
        for (Eigen::Index i = 0; i < 4; ++i)
            for (Eigen::Index j = 0; j < 2; ++j) m(i, j) = uniform(-3.0, 3.0);
        Eigen::ColPivHouseholderQR<Matrix> qr(m);
        if (qr.rank() < 2) continue;
        const Matrix li = matpoly::left_inverse(m);
        CHECK((li * m - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
        // QR route gives the same least-squares inverse.
        const Matrix via_qr = (m.transpose() * m).ldlt().solve(m.transpose());
        CHECK((li - via_qr).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("left inverse reports the numerical rank") {
    Matrix rank1(3, 2);
    rank1 << 1.0, 2.0, 2.0, 4.0, 3.0, 6.0;
    CHECK_THROWS_WITH_AS(matpoly::left_inverse(rank1),
                         doctest::Contains("numerical rank 1"), std::invalid_argument);
}

TEST_CASE("expm basics") {
    CHECK((matpoly::expm(Matrix::Zero(3, 3)) - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <
          1e-15);
    const Matrix e = matpoly::expm(Matrix::Constant(1, 1, -1.0));
    CHECK(e(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));

    // Nilpotent closed form: exp([[0,t],[0,0]]) = [[1,t],[0,1]].
    Matrix nil = Matrix::Zero(2, 2);
    nil(0, 1) = 3.7;
    Matrix expected = Matrix::Identity(2, 2);
    expected(0, 1) = 3.7;
    CHECK((matpoly::expm(nil) - expected).cwiseAbs().maxCoeff() < 1e-13);

    // Diagonal closed form at a norm near the accuracy contract's edge.
    Matrix diag = Matrix::Zero(2, 2);
    diag(0, 0) = -9.5;
    diag(1, 1) = 4.0;
    const Matrix got = matpoly::expm(diag);
    CHECK(got(0, 0) == doctest::Approx(std::exp(-9.5)).epsilon(1e-12));
    CHECK(got(1, 1) == doctest::Approx(std::exp(4.0)).epsilon(1e-12));
    CHECK(std::abs(got(0, 1)) + std::abs(got(1, 0)) < 1e-14);
}

TEST_CASE("expm group inverse and semigroup properties") {
    for (int trial = 0; trial < 20; ++trial) {
        Matrix a(3, 3);
        for (Eigen::Index i = 0; i < 3; ++i)
            for (Eigen::Index j = 0; j < 3; ++j) a(i, j) = uniform(-1.0, 1.0);
        if (a.norm() > 2.0) a *= 2.0 / a.norm();
        const Matrix prod = matpoly::expm(a) * matpoly::expm(-a);
        CHECK((prod - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);

        const double t = uniform(0.0, 1.0);
        const double s = uniform(0.0, 1.0);
        const Matrix lhs = matpoly::expm(a * (t + s));
        const Matrix rhs = matpoly::expm(a * t) * matpoly::expm(a * s);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
}
