#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "polarbound/linalg.hpp"

namespace polarbound {

enum class Field { kComplex, kReal };

std::string_view to_string(Field field);

/// Counter-based per-trial seed (splitmix64 of seed and index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// U diag(sigma) V^* with Haar U (m x m) and V (n x n). Throws
/// ValidationError when sigma has more than min(m, n) entries or a negative
/// or non-finite entry.
DenseMatrix random_matrix_with_spectrum(std::span<const double> sigma, Index m, Index n, std::uint64_t seed,
                                        Field field = Field::kComplex);

struct EnsembleConfig {
  Index m = 6;
  Index n = 6;
  std::size_t r = 0;  // 0: drawn per trial from 1..min(m, n)
  std::size_t s = 0;  // 0: drawn per trial from 1..min(m, n)
  double spectrum_lo = 1e-2;  // singular values log-uniform on [lo, hi]
  double spectrum_hi = 1e2;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  Field field = Field::kComplex;
  double rank_tol = kDefaultRankTol;
  double slack_tol = 1e-9;
  std::size_t normal_dim_cap = 6;  // the Kittaneh channel works in min(n, cap)
  unsigned threads = 1;
};

/// Throws ValidationError on an unusable config.
void validate_config(const EnsembleConfig& config);

/// cos(alpha) = Re tr(B^*A) / (||A|| ||B||), cos(beta) the same for |A|, |B|.
struct AngleDiagnostics {
  double cos_alpha = 0.0;
  double cos_beta = 0.0;
};

AngleDiagnostics angle_diagnostics(const DenseMatrix& a, const DenseMatrix& b, double rank_tol = kDefaultRankTol);

/// One `lhs <= rhs` assertion evaluated on a sample.
struct Check {
  std::string id;
  double lhs = 0.0;
  double rhs = 0.0;
  bool violated = false;
};

/// Families (a)-(f) and (h) on an explicit pair whose singular values are
/// `sigma` (of A) and `sigma_tilde` (of A~); polar factors are recomputed.
/// A check is violated when lhs - rhs > slack * max(|lhs|, |rhs|), except the
/// angle check, which uses slack absolutely.
std::vector<Check> check_pair(const DenseMatrix& a, const DenseMatrix& a_tilde, std::span<const double> sigma,
                              std::span<const double> sigma_tilde, double rank_tol, double slack);

/// Family (g) on square normal A, B with the given non-zero eigenvalues. The
/// upper Kittaneh bound is checked when either matrix has full rank.
std::vector<Check> check_normal_pair(const DenseMatrix& a, const DenseMatrix& b,
                                     std::span<const Complex> lambda, std::span<const Complex> lambda_hat,
                                     double rank_tol, double slack);

struct Violation {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::string id;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // lhs - rhs
};

struct CheckSummary {
  std::uint64_t evaluated = 0;
  double max_ratio = 0.0;  // max lhs / rhs over samples with rhs > 0
};

struct SuiteReport {
  std::uint64_t trials = 0;
  std::uint64_t normal_trials = 0;
  std::map<std::string, CheckSummary> checks;
  std::vector<Violation> violations;
  double max_angle_excess = 0.0;  // max cos^2(alpha) - cos(beta), <= 0 when the angle lemma holds
  double wall_seconds = 0.0;
};

/// Runs every trial (in parallel when config.threads > 1); the report apart
/// from wall_seconds does not depend on the thread count.
SuiteReport run_verification_suite(const EnsembleConfig& config);

}  // namespace polarbound
