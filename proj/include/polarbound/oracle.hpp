#pragma once

// Brute-force ground truth for the closed-form bounds. Nothing in here calls
// into bounds.cpp's evaluation paths; agreement between the two is what the
// tests check.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "polarbound/bounds.hpp"
#include "polarbound/spectra.hpp"

namespace polarbound {

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

struct SignedEntry {
  std::size_t row = 0;  // 0-based, < s
  std::size_t col = 0;  // 0-based, < r
  int sign = 1;         // +1 or -1
};

/// Extreme point of the s x r polytope {X real : row and column absolute
/// sums <= 1}: zero, or a sum of row/column-disjoint +-E_ij.
struct SignedSubPermutation {
  std::size_t rows = 0;  // s
  std::size_t cols = 0;  // r
  std::vector<SignedEntry> support;

  std::size_t k() const { return support.size(); }
  std::size_t plus_count() const;
  std::size_t minus_count() const;
  Eigen::MatrixXd to_dense() const;
};

/// 1 + sum_{k=1}^{r} C(s,k) C(r,k) k! 2^k, saturating at UINT64_MAX.
std::uint64_t extreme_point_count(std::size_t r, std::size_t s);

/// Streams every extreme point exactly once: the zero point, then k = 1..r;
/// within a k, row subsets lexicographically, then ordered column choices
/// lexicographically, then sign patterns (all-plus first).
class ExtremePointStream {
 public:
  /// Throws ValidationError unless 1 <= r <= s, BudgetExceeded when the
  /// total count exceeds `budget`.
  ExtremePointStream(std::size_t r, std::size_t s, std::uint64_t budget = kDefaultEnumerationBudget);

  bool next(SignedSubPermutation& out);
  std::uint64_t total() const { return total_; }

 private:
  void start_stratum();
  bool advance();
  void emit(SignedSubPermutation& out) const;

  std::size_t r_, s_;
  std::uint64_t total_;
  std::size_t k_ = 0;
  bool started_ = false;
  bool done_ = false;
  std::vector<std::size_t> rows_;
  std::vector<std::size_t> cols_;
  std::uint64_t signs_ = 0;
};

/// f(X) = (r + s - 2 sum x_ij) / (F - 2 sum sigma~_i sigma_j x_ij).
struct FEvaluation {
  SignedSubPermutation point;
  double numerator = 0.0;
  double denominator = 0.0;
  std::optional<double> value;  // empty when 0/0
};

FEvaluation evaluate_f(const SpectrumPair& pair, const SignedSubPermutation& x);

/// f at an arbitrary s x r point (no membership check); empty when 0/0.
std::optional<double> evaluate_f_dense(const SpectrumPair& pair, const Eigen::MatrixXd& x);

struct FExtrema {
  FEvaluation max;
  FEvaluation min;
  // Best points with k1 + k2 = r; ties elsewhere do not hide them.
  std::optional<FEvaluation> face_max;
  std::optional<FEvaluation> face_min;
  std::uint64_t points = 0;
};

/// Max and min of f over every extreme point (zero point included), first
/// occurrence in stream order on ties.
FExtrema brute_force_f_extrema(const SpectrumPair& pair,
                               std::uint64_t budget = kDefaultEnumerationBudget);

enum class KittanehMode { kLower, kUpper };

/// Re-derives the Kittaneh-type coefficients by walking dense partial
/// injection maps [r] -> [s] u {unmatched} with a mixed-radix counter and
/// evaluating F^ - 2 sum(...) directly. `n` is only used in upper mode.
KittanehResult brute_force_kittaneh(const EigenPair& eig, KittanehMode mode, std::size_t n = 0,
                                    std::size_t cap = kDefaultKittanehCap);

/// A step on the reduced (k1, k2) grid: k1 = number of -1 entries,
/// k2 = number of +1 entries, each placed by the rearrangement rule.
struct DirectionalMove {
  std::pair<std::size_t, std::size_t> from;
  std::pair<std::size_t, std::size_t> to;
  double delta_numerator = 0.0;
  double delta_denominator = 0.0;
};

/// Checks the monotonicity steps that push the extremum onto k1 + k2 = r:
/// the diagonal move changes the denominator with the proved sign, and one of
/// the right/up moves never worsens f. Returns the failing moves.
std::vector<DirectionalMove> directional_move_check(const SpectrumPair& pair, Extremum variant);

}  // namespace polarbound
