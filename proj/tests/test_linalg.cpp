#include <doctest.h>

#include <cmath>

#include "polarbound/errors.hpp"
#include "polarbound/linalg.hpp"
#include "polarbound/montecarlo.hpp"

using namespace polarbound;

namespace {

DenseMatrix random_matrix(Index m, Index n, std::uint64_t seed) {
  const DenseMatrix u = haar_random_unitary(std::max(m, n), seed);
  return u.topLeftCorner(m, n) * Complex(2.0, -1.0) + haar_random_unitary(std::max(m, n), seed + 1).topLeftCorner(m, n);
}

}  // namespace

TEST_CASE("svd of diag(3,4) sorts the singular values") {
  DenseMatrix a = DenseMatrix::Zero(2, 2);
  a(0, 0) = 3.0;
  a(1, 1) = 4.0;
  const SvdResult s = svd(a);
  CHECK(s.singular_values(0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(s.singular_values(1) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(s.rank == 2);
}

TEST_CASE("svd of the zero matrix has rank 0") {
  const SvdResult s = svd(DenseMatrix::Zero(2, 2));
  CHECK(s.singular_values.isZero());
  CHECK(s.rank == 0);
}

TEST_CASE("svd of a unit-norm rank-one row") {
  const double c = 0.634;
  DenseMatrix a = DenseMatrix::Zero(3, 3);
  a(0, 0) = c;
  a(0, 2) = std::sqrt(1.0 - c * c);
  const SvdResult s = svd(a);
  CHECK(std::abs(s.singular_values(0) - 1.0) <= 1e-12);
  CHECK(std::abs(s.singular_values(1)) <= 1e-12);
  CHECK(std::abs(s.singular_values(2)) <= 1e-12);
  CHECK(s.rank == 1);
}

TEST_CASE("svd contract on random complex matrices") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Index m = 2 + static_cast<Index>(seed % 4), n = 1 + static_cast<Index>(seed % 5);
    const DenseMatrix a = random_matrix(m, n, seed);
    const SvdResult s = svd(a);
    CHECK(unitarity_defect(s.u) <= 1e-12 * static_cast<double>(m));
    CHECK(unitarity_defect(s.v) <= 1e-12 * static_cast<double>(n));
    for (Index j = 1; j < s.singular_values.size(); ++j) CHECK(s.singular_values(j) <= s.singular_values(j - 1));
    DenseMatrix sigma = DenseMatrix::Zero(m, n);
    for (Index j = 0; j < s.singular_values.size(); ++j) sigma(j, j) = s.singular_values(j);
    CHECK((a - s.u * sigma * s.v.adjoint()).norm() <= 1e-10 * a.norm());
    CHECK(std::abs(a.squaredNorm() - s.singular_values.squaredNorm()) <= 1e-10 * a.squaredNorm());

    // Phase convention: the largest entry of every column of U is real positive.
    for (Index j = 0; j < m; ++j) {
      Index best = 0;
      for (Index i = 1; i < m; ++i)
        if (std::abs(s.u(i, j)) > std::abs(s.u(best, j))) best = i;
      CHECK(s.u(best, j).real() > 0.0);
      CHECK(std::abs(s.u(best, j).imag()) <= 1e-15);
    }
  }
}

TEST_CASE("svd is deterministic and rejects non-finite input") {
  const DenseMatrix a = random_matrix(4, 3, 99);
  const SvdResult s1 = svd(a), s2 = svd(a);
  CHECK(s1.u == s2.u);
  CHECK(s1.v == s2.v);
  DenseMatrix bad = a;
  bad(1, 1) = Complex(std::nan(""), 0.0);
  CHECK_THROWS_AS(svd(bad), ValidationError);
  CHECK_THROWS_AS(svd(a, 0.0), ValidationError);
}

TEST_CASE("polar factors of small hand examples") {
  SUBCASE("diag(3,4)") {
    DenseMatrix a = DenseMatrix::Zero(2, 2);
    a(0, 0) = 3.0;
    a(1, 1) = 4.0;
    const PolarFactors p = polar_decompose(a);
    CHECK((p.q - DenseMatrix::Identity(2, 2)).norm() <= 1e-14);
    CHECK((p.h - a).norm() <= 1e-14);
  }
  SUBCASE("rank-one projector") {
    DenseMatrix a = DenseMatrix::Zero(2, 2);
    a(0, 0) = 1.0;
    const PolarFactors p = polar_decompose(a);
    CHECK(p.rank == 1);
    CHECK((p.q - a).norm() <= 1e-14);
    CHECK((p.h - a).norm() <= 1e-14);
  }
  SUBCASE("negative scalar") {
    DenseMatrix a(1, 1);
    a(0, 0) = -5.0;
    const PolarFactors p = polar_decompose(a);
    CHECK(std::abs(p.q(0, 0) - Complex(-1.0, 0.0)) <= 1e-15);
    CHECK(std::abs(p.h(0, 0) - Complex(5.0, 0.0)) <= 1e-15);
  }
  SUBCASE("zero matrix is degenerate") {
    const PolarFactors p = polar_decompose(DenseMatrix::Zero(3, 2));
    CHECK(p.degenerate);
    CHECK(p.q.isZero());
    CHECK(p.h.isZero());
  }
}

TEST_CASE("polar factor invariants on rank-deficient matrices") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const Index m = 5, n = 4;
    const std::size_t r = 1 + seed % 3;
    std::vector<double> sigma;
    for (std::size_t j = 0; j < r; ++j) sigma.push_back(3.0 / static_cast<double>(j + 1));
    const DenseMatrix a = random_matrix_with_spectrum(sigma, m, n, seed);
    const PolarFactors p = polar_decompose(a);
    CHECK(p.rank == static_cast<Index>(r));
    CHECK((p.q * p.h - a).norm() <= 1e-10 * a.norm());
    const DenseMatrix proj = p.q.adjoint() * p.q;
    CHECK((proj * proj - proj).norm() <= 1e-10);
    CHECK((p.h - p.h.adjoint()).norm() <= 1e-12);
    const Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(p.h);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-12 * a.norm());
    // range(Q^*) = range(H): stacking them side by side does not raise the rank.
    DenseMatrix stacked(n, m + n);
    stacked << p.q.adjoint(), p.h;
    CHECK(svd(stacked, 1e-10).rank == static_cast<Index>(r));
  }
}

TEST_CASE("unitary completion examples") {
  SUBCASE("e1 completes to the identity") {
    DenseMatrix e1 = DenseMatrix::Zero(2, 1);
    e1(0, 0) = 1.0;
    CHECK((unitary_completion(e1) - DenseMatrix::Identity(2, 2)).norm() <= 1e-15);
  }
  SUBCASE("negative first column is kept") {
    DenseMatrix p = DenseMatrix::Zero(2, 1);
    p(0, 0) = -1.0;
    const DenseMatrix u = unitary_completion(p);
    CHECK(u.col(0) == p.col(0));
    CHECK(unitarity_defect(u) <= 2e-12);
  }
  SUBCASE("exact column with a zero-row constraint") {
    const double c = 0.634;
    DenseMatrix p = DenseMatrix::Zero(3, 1);
    p(0, 0) = c;
    p(2, 0) = std::sqrt(1.0 - c * c);
    const DenseMatrix u = unitary_completion(p, RowBand{1, 2});
    CHECK(u.col(0) == p.col(0));
    CHECK(unitarity_defect(u) <= 3e-12);
  }
  SUBCASE("short columns are topped up outside the band") {
    DenseMatrix p = DenseMatrix::Zero(6, 2);
    p(0, 0) = 0.6;
    p(1, 1) = -0.8;
    const DenseMatrix u = unitary_completion(p, RowBand{2, 4});
    CHECK(unitarity_defect(u) <= 6e-12);
    CHECK(u.block(2, 0, 2, 2).isZero());
    CHECK(u(0, 0) == Complex(0.6, 0.0));
    CHECK(u(1, 1) == Complex(-0.8, 0.0));
  }
  SUBCASE("infeasible when the free rows cannot supply the missing mass") {
    DenseMatrix p = DenseMatrix::Zero(3, 1);
    p(0, 0) = 0.5;
    CHECK_THROWS_AS(unitary_completion(p, RowBand{1, 3}), CompletionInfeasible);
  }
  SUBCASE("invalid partial blocks are rejected") {
    DenseMatrix p = DenseMatrix::Zero(3, 2);
    p(0, 0) = 1.0;
    p(0, 1) = 0.5;
    CHECK_THROWS_AS(unitary_completion(p), ValidationError);
    DenseMatrix longcol = DenseMatrix::Zero(2, 1);
    longcol(0, 0) = 1.5;
    CHECK_THROWS_AS(unitary_completion(longcol), ValidationError);
    DenseMatrix inband = DenseMatrix::Zero(3, 1);
    inband(1, 0) = 1.0;
    CHECK_THROWS_AS(unitary_completion(inband, RowBand{1, 2}), ValidationError);
  }
}

TEST_CASE("Haar sampler") {
  const DenseMatrix u1 = haar_random_unitary(1, 12345);
  CHECK(std::abs(std::abs(u1(0, 0)) - 1.0) <= 1e-15);
  CHECK(haar_random_unitary(4, 7) == haar_random_unitary(4, 7));
  CHECK(haar_random_unitary(4, 7) != haar_random_unitary(4, 8));
  CHECK(unitarity_defect(haar_random_unitary(3, 1)) <= 1e-12);
  CHECK(unitarity_defect(haar_random_orthogonal(5, 3)) <= 5e-12);
  CHECK((haar_random_orthogonal(5, 3).imag().array() == 0.0).all());

  double mean = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) mean += std::norm(haar_random_unitary(2, 1000 + i)(0, 0));
  mean /= draws;
  CHECK(std::abs(mean - 0.5) <= 0.02);
  CHECK_THROWS_AS(haar_random_unitary(0, 1), ValidationError);
}

TEST_CASE("Frobenius inner product") {
  const DenseMatrix a = random_matrix(3, 2, 5), b = random_matrix(3, 2, 6);
  const Complex expected = (b.adjoint() * a).trace();
  CHECK(std::abs(frobenius_inner(a, b) - expected) <= 1e-13);
  CHECK(std::abs(frobenius_inner(a, a).real() - a.squaredNorm()) <= 1e-13);
}
