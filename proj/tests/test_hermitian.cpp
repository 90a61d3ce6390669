#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "specsub/hermitian.hpp"
#include "test_support.hpp"

using namespace specsub;
using Catch::Approx;

namespace {
const Complex kI(0.0, 1.0);
}

TEST_CASE("validate_hermitian accepts exactly Hermitian input unchanged") {
  Matrix id = Matrix::Identity(3, 3);
  const HermitianOperator h = validate_hermitian(id);
  REQUIRE(h.n() == 3);
  REQUIRE(h.symmetrization_residual() == 0.0);
  REQUIRE((h.matrix() - id).cwiseAbs().maxCoeff() == 0.0);

  Matrix m(2, 2);
  m << 0.0, 1.0 + kI, 1.0 - kI, 2.0;
  const HermitianOperator g = validate_hermitian(m);
  REQUIRE((g.matrix() - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("validate_hermitian rejects asymmetric and non-square input") {
  Matrix m(2, 2);
  m << 0.0, 1.0, 0.0, 0.0;
  REQUIRE_THROWS_AS(validate_hermitian(m, 1e-12), Error);
  try {
    validate_hermitian(m, 1e-12);
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::NotHermitian);
  }

  Matrix rect = Matrix::Zero(2, 3);
  try {
    validate_hermitian(rect);
    FAIL("expected NotSquare");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::NotSquare);
  }
}

TEST_CASE("validate_hermitian symmetrizes within tolerance and records the residual") {
  Matrix m(2, 2);
  m << 1.0, 0.5 + 1e-13, 0.5, 2.0;
  const HermitianOperator h = validate_hermitian(m, 1e-12);
  REQUIRE(h.symmetrization_residual() > 0.0);
  REQUIRE((h.matrix() - h.matrix().adjoint()).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(h(0, 1).real() == Approx(0.5 + 0.5e-13).epsilon(1e-12));
}

TEST_CASE("eigh on a diagonal matrix sorts values and permutes the basis") {
  RealVector d(3);
  d << 3.0, 1.0, 2.0;
  const EigenDecomposition eig = eigh(HermitianOperator::diagonal(d));
  REQUIRE(eig.values(0) == Approx(1.0).margin(1e-14));
  REQUIRE(eig.values(1) == Approx(2.0).margin(1e-14));
  REQUIRE(eig.values(2) == Approx(3.0).margin(1e-14));
  // eigenvector of value 1 is e_1, of 2 is e_2, of 3 is e_0
  REQUIRE(std::abs(eig.vectors(1, 0)) == Approx(1.0).margin(1e-12));
  REQUIRE(std::abs(eig.vectors(2, 1)) == Approx(1.0).margin(1e-12));
  REQUIRE(std::abs(eig.vectors(0, 2)) == Approx(1.0).margin(1e-12));
}

TEST_CASE("eigh 2x2 closed form") {
  Matrix m(2, 2);
  m << 0.0, 0.5, 0.5, 1.0;
  const EigenDecomposition eig = eigh(HermitianOperator(m));
  // characteristic polynomial: l^2 - l - 1/4 = 0
  const double lo = 0.5 * (1.0 - std::sqrt(2.0));
  const double hi = 0.5 * (1.0 + std::sqrt(2.0));
  REQUIRE(eig.values(0) == Approx(lo).margin(1e-12));
  REQUIRE(eig.values(1) == Approx(hi).margin(1e-12));
  REQUIRE(eig.values(0) == Approx(-0.20711).margin(5e-6));
}

TEST_CASE("eigh identity") {
  const EigenDecomposition eig = eigh(HermitianOperator::identity(5));
  for (Eigen::Index i = 0; i < 5; ++i) REQUIRE(eig.values(i) == Approx(1.0).margin(1e-14));
}

TEST_CASE("eigh invariants on random matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng() % 63;
    const bool complex_case = trial % 2;
    const HermitianOperator a(complex_case
                                  ? testing::random_complex_hermitian(n, rng)
                                  : Matrix(testing::random_real_symmetric(n, rng).cast<Complex>()));
    const EigenDecomposition eig = eigh(a);

    for (std::size_t i = 1; i < n; ++i)
      REQUIRE(eig.values(static_cast<Eigen::Index>(i)) >=
              eig.values(static_cast<Eigen::Index>(i - 1)));

    const Matrix gram = eig.vectors.adjoint() * eig.vectors;
    REQUIRE((gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <=
            1e-10);

    const Matrix recon =
        eig.vectors * eig.values.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
    REQUIRE(detail::hermitian_norm(a.matrix() - recon) <=
            1e-10 * (1.0 + eig.spectral_norm()));

    // fixed phase: the largest-magnitude component of each column is real >= 0
    for (Eigen::Index c = 0; c < eig.vectors.cols(); ++c) {
      Eigen::Index k = 0;
      eig.vectors.col(c).cwiseAbs().maxCoeff(&k);
      REQUIRE(eig.vectors(k, c).imag() == 0.0);
      REQUIRE(eig.vectors(k, c).real() >= 0.0);
    }
  }
}

TEST_CASE("eigh real and complex paths agree") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 3 + rng() % 14;
    const RealMatrix s = testing::random_real_symmetric(n, rng);
    const HermitianOperator real_op(Matrix(s.cast<Complex>()));
    // push the same operator through the complex path with a negligible
    // imaginary perturbation above the fast-path cut
    Matrix skew = Matrix::Zero(n, n);
    skew(0, static_cast<Eigen::Index>(n - 1)) = Complex(0.0, 1e-13);
    skew(static_cast<Eigen::Index>(n - 1), 0) = Complex(0.0, -1e-13);
    const HermitianOperator complex_op(Matrix(s.cast<Complex>() + skew));
    REQUIRE(real_op.is_real());
    REQUIRE(!complex_op.is_real());
    const EigenDecomposition e1 = eigh(real_op);
    const EigenDecomposition e2 = eigh(complex_op);
    for (Eigen::Index i = 0; i < e1.values.size(); ++i)
      REQUIRE(e1.values(i) == Approx(e2.values(i)).margin(1e-10));
  }
}

TEST_CASE("eigh is deterministic for fixed input") {
  std::mt19937_64 rng(13);
  const HermitianOperator a(testing::random_complex_hermitian(9, rng));
  const EigenDecomposition e1 = eigh(a);
  const EigenDecomposition e2 = eigh(a);
  REQUIRE(e1.values == e2.values);
  REQUIRE(e1.vectors == e2.vectors);
}

TEST_CASE("operator_norm matches the rank-one and diagonal identities") {
  std::mt19937_64 rng(14);
  const auto phi = testing::random_unit_vector(6, rng);
  const Matrix rank_one = detail::symmetrize(-0.7 * phi * phi.adjoint());
  REQUIRE(operator_norm(HermitianOperator(rank_one)) == Approx(0.7).margin(1e-12));

  RealVector w(4);
  w << 0.1, -0.3, 0.2, 0.05;
  REQUIRE(operator_norm(HermitianOperator::diagonal(w)) == Approx(0.3).margin(1e-14));

  REQUIRE(operator_norm(HermitianOperator::zero(3)) == 0.0);
}

TEST_CASE("operator_norm is a norm: homogeneity and triangle inequality") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 2 + rng() % 9;
    const HermitianOperator a(testing::random_complex_hermitian(n, rng));
    const HermitianOperator b(testing::random_complex_hermitian(n, rng));
    std::uniform_real_distribution<double> uni(-3.0, 3.0);
    const double s = uni(rng);
    REQUIRE(operator_norm(s * a) ==
            Approx(std::abs(s) * operator_norm(a)).margin(1e-10));
    REQUIRE(operator_norm(a + b) <= operator_norm(a) + operator_norm(b) + 1e-10);
  }
}

TEST_CASE("spectral_projection diagonal case and validation") {
  RealVector d(3);
  d << 0.0, 1.0, 2.0;
  const EigenDecomposition eig = eigh(HermitianOperator::diagonal(d));
  const OrthogonalProjection p = spectral_projection(eig, {0});
  REQUIRE(p.rank == 1);
  REQUIRE(std::abs(p.matrix(0, 0) - 1.0) <= 1e-14);
  REQUIRE(std::abs(p.matrix(1, 1)) <= 1e-14);
  REQUIRE(std::abs(p.matrix(2, 2)) <= 1e-14);

  try {
    spectral_projection(eig, {0, 1, 2});
    FAIL("expected EmptySet");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::EmptySet);
  }
  try {
    spectral_projection(eig, {});
    FAIL("expected EmptySet");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::EmptySet);
  }
}

TEST_CASE("spectral_projection 2x2 closed form and idempotency") {
  Matrix m(2, 2);
  m << 0.0, 0.5, 0.5, 1.0;
  const HermitianOperator a(m);
  const EigenDecomposition eig = eigh(a);
  const OrthogonalProjection p = spectral_projection(eig, {0});
  const Matrix pm = p.matrix.matrix();
  REQUIRE(detail::max_abs(pm * pm - pm) <= 1e-12);
  REQUIRE(detail::max_abs(pm - pm.adjoint()) == 0.0);
  REQUIRE(std::abs(pm.trace().real() - 1.0) <= 1e-8);
  // commutes with A
  REQUIRE(detail::hermitian_norm(pm * a.matrix() - a.matrix() * pm) <=
          1e-9 * (1.0 + eig.spectral_norm()));
  // projects onto the eigenvector of (1 - sqrt(2))/2
  const Eigen::VectorXcd u = eig.vectors.col(0);
  REQUIRE((pm * u - u).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("spectral_projection refuses to split a degenerate group") {
  RealVector d(3);
  d << 0.0, 1e-12, 1.0;
  const EigenDecomposition eig = eigh(HermitianOperator::diagonal(d));
  try {
    spectral_projection(eig, {0});
    FAIL("expected SplitDegeneracy");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::SplitDegeneracy);
  }
  // taking the whole group is fine
  REQUIRE(spectral_projection(eig, {0, 1}).rank == 2);
}

TEST_CASE("subspace_max_angle basics") {
  std::mt19937_64 rng(16);
  const OrthogonalProjection p = testing::random_projection(5, 2, rng);
  const SubspaceAngle same = subspace_max_angle(p, p);
  REQUIRE(same.theta == 0.0);
  REQUIRE(same.ranks_equal);
  REQUIRE(same.unitarily_equivalent);

  const OrthogonalProjection q = testing::random_projection(4, 2, rng);
  REQUIRE_THROWS_AS(subspace_max_angle(p, q), Error);
}

TEST_CASE("subspace_max_angle equals the vector angle for rank-one projections") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng() % 7;
    const auto u = testing::random_unit_vector(n, rng);
    const auto v = testing::random_unit_vector(n, rng);
    const OrthogonalProjection p{HermitianOperator(detail::symmetrize(u * u.adjoint())), 1};
    const OrthogonalProjection q{HermitianOperator(detail::symmetrize(v * v.adjoint())), 1};
    const SubspaceAngle angle = subspace_max_angle(p, q);
    const double overlap = std::abs((u.adjoint() * v)(0, 0));
    REQUIRE(angle.theta == Approx(std::acos(std::min(overlap, 1.0))).margin(1e-10));
    REQUIRE(angle.proj_diff_norm >= 0.0);
    REQUIRE(angle.proj_diff_norm <= 1.0);
  }
}

TEST_CASE("subspace_max_angle of a plane rotation is the rotation angle") {
  const double phi = 0.3;
  Matrix p(2, 2), q(2, 2);
  p << 1.0, 0.0, 0.0, 0.0;
  const double c = std::cos(phi), s = std::sin(phi);
  q << c * c, c * s, c * s, s * s;
  const SubspaceAngle angle =
      subspace_max_angle({HermitianOperator(p), 1}, {HermitianOperator(q), 1});
  REQUIRE(angle.theta == Approx(phi).margin(1e-12));
}

TEST_CASE("complement symmetry of the maximal angle") {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + rng() % 6;
    const OrthogonalProjection p = testing::random_projection(n, 1 + rng() % (n - 1), rng);
    const OrthogonalProjection q = testing::random_projection(n, 1 + rng() % (n - 1), rng);
    const double direct = subspace_max_angle(p, q).theta;
    const double complemented = subspace_max_angle(p.complement(), q.complement()).theta;
    REQUIRE(direct == Approx(complemented).margin(1e-10));
  }
}

TEST_CASE("perturbed spectrum stays in the ||V||-neighborhood of the original") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 2 + rng() % 15;
    const HermitianOperator a(testing::random_complex_hermitian(n, rng));
    const HermitianOperator v(testing::random_complex_hermitian(n, rng));
    const double norm_v = operator_norm(v);
    const EigenDecomposition ea = eigh(a);
    const EigenDecomposition eh = eigh(a + v);
    for (Eigen::Index i = 0; i < eh.values.size(); ++i) {
      double dist = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < ea.values.size(); ++j)
        dist = std::min(dist, std::abs(eh.values(i) - ea.values(j)));
      REQUIRE(dist <= norm_v + 1e-10);
    }
  }
}
