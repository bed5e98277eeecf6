#pragma once

#include <complex>
#include <cstdint>
#include <optional>

#include <Eigen/Dense>

namespace polarbound {

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative rank threshold: sigma_j counts iff sigma_j > rank_tol * sigma_1.
inline constexpr double kDefaultRankTol = 1e-12;

/// Full SVD A = U diag(singular_values) V^*.
///
/// Phase convention: the largest-magnitude entry of every column of U is real
/// and positive (first such entry on ties). For j < min(m, n) the matching
/// column of V is rotated by the same phase so the product is unchanged;
/// surplus columns of V are normalized the same way on their own.
struct SvdResult {
  DenseMatrix u;               // m x m
  RealVector singular_values;  // min(m, n), non-increasing
  DenseMatrix v;               // n x n
  Index rank = 0;
};

SvdResult svd(const DenseMatrix& a, double rank_tol = kDefaultRankTol);

/// Generalized polar factors A = QH with Q subunitary of rank r and
/// H = |A| positive semidefinite of rank r. Both are built from the rank-r
/// truncated SVD, so range(Q^*) = range(H).
struct PolarFactors {
  DenseMatrix q;  // m x n
  DenseMatrix h;  // n x n
  Index rank = 0;
  bool degenerate = false;  // rank 0: Q = 0, H = 0
};

PolarFactors polar_decompose(const DenseMatrix& a,
                             double rank_tol = kDefaultRankTol);

/// Half-open row range [begin, end) that must stay zero in the prescribed
/// columns of a completion.
struct RowBand {
  Index begin = 0;
  Index end = 0;
  bool contains(Index row) const { return row >= begin && row < end; }
};

/// Extends an n x r block of mutually orthogonal columns (norms <= 1) to an
/// n x n unitary.
///
/// Columns with norm below one are topped up with a vector orthogonal to
/// everything fixed so far, built from canonical basis vectors outside
/// `zero_rows` taken in index order. The remaining n - r columns are
/// canonical basis vectors orthonormalized against the first r, again in
/// index order, skipping candidates whose projected norm is below 1e-8.
/// Entries of the first r columns on `zero_rows` are copied unchanged.
///
/// Throws ValidationError when the columns are not orthogonal or too long,
/// CompletionInfeasible when the free rows cannot supply the missing mass.
DenseMatrix unitary_completion(const DenseMatrix& partial,
                               std::optional<RowBand> zero_rows = std::nullopt);

/// Haar-distributed n x n unitary: QR of a complex standard Gaussian matrix
/// with the phases of diag(R) moved into Q. Same seed, same bits.
DenseMatrix haar_random_unitary(Index n, std::uint64_t seed);

/// Real counterpart: Haar-distributed orthogonal matrix (stored complex).
DenseMatrix haar_random_orthogonal(Index n, std::uint64_t seed);

/// ||U^* U - I||_F.
double unitarity_defect(const DenseMatrix& u);

/// tr(B^* A) = sum_ij conj(b_ij) a_ij.
Complex frobenius_inner(const DenseMatrix& a, const DenseMatrix& b);

bool all_finite(const DenseMatrix& a);

}  // namespace polarbound
