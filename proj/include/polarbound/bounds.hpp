#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "polarbound/spectra.hpp"

namespace polarbound {

/// One candidate f(k) = numerator / denominator of a max/min-over-k bound.
struct KRatioEntry {
  std::size_t k = 0;
  double numerator = 0.0;
  double denominator = 0.0;
  std::optional<double> value;  // empty when 0/0
};

struct KRatioTable {
  std::vector<KRatioEntry> entries;
  std::optional<std::size_t> argmax;  // smallest maximizing k
  std::optional<std::size_t> argmin;  // smallest minimizing k

  /// f(k), empty if k is absent from the table or indeterminate.
  std::optional<double> at(std::size_t k) const;
};

struct KRatioBound {
  BoundResult bound;
  KRatioTable table;
};

/// 0/0 detection threshold used by every ratio evaluation.
inline double indeterminate_tol(double scale) { return 1e-12 * (scale > 1.0 ? scale : 1.0); }

/// 2 / (sigma_r + sigma~_r); equal ranks only.
BoundResult li_sun_coeff(const SpectrumPair& pair);

/// Sharp upper coefficient for ||Q - Q~||_F / ||E||_F:
///   c^2 = max_{0<=k<=r} (s - r + 4k) / D(k),
///   D(k) = sum_{j<=r-k} (sigma_j - sigma~_j)^2
///        + sum_{j<=k} (sigma_{r+1-j} + sigma~_{s-k+j})^2
///        + sum_{j=r-k+1}^{s-k} sigma~_j^2.
KRatioBound q_upper_coeff(const SpectrumPair& pair);

/// Sharp lower coefficient, the minimum over k of (s - r + 4k) / D(k) with
///   D(k) = sum_{j<=k} (sigma_j + sigma~_j)^2
///        + sum_{j<=r-k} (sigma_{r+1-j} - sigma~_{s-r+k+j})^2
///        + sum_{j=k+1}^{s-r+k} sigma~_j^2.
KRatioBound q_lower_coeff(const SpectrumPair& pair);

/// Equal-rank refinement of li_sun_coeff, max over 1 <= k <= r.
KRatioBound refined_li_sun_coeff(const SpectrumPair& pair);

/// sqrt((F - sqrt(F^2 - 2GF)) / G), at most sqrt(2).
BoundResult h_upper_coeff(const SpectrumPair& pair);
/// sqrt((F - 2G) / (F + 2G)).
BoundResult h_lower_coeff(const SpectrumPair& pair);
/// sqrt(G / (sqrt(F^2 + 2GF) - F)), at most sqrt((1 + sqrt 2) / 2).
BoundResult lee_upper_coeff(const SpectrumPair& pair);
BoundResult lee_lower_coeff(const SpectrumPair& pair);
/// Constant in ||AB^*|| <= c || |A|^2 + |B|^2 ||, at most 1/2.
BoundResult amgm_coeff(const SpectrumPair& pair);
/// Constant in |tr B^*A| <= c ||A|| ||B||, at most 1.
BoundResult cauchy_schwarz_coeff(const SpectrumPair& pair);

inline constexpr std::size_t kDefaultKittanehCap = 6;

/// Matched eigenvalue indices (i into lambda_hat, j into lambda), 0-based.
using Arrangement = std::vector<std::pair<std::size_t, std::size_t>>;

struct KittanehResult {
  BoundResult bound;
  Arrangement arrangement;      // optimizing matching; empty when degenerate
  std::uint64_t terms = 0;      // candidates evaluated
};

/// Number of candidate matchings the lower bound enumerates:
/// sum_{k=1}^{r} C(r,k) s!/(s-k)!  (saturating).
std::uint64_t kittaneh_lower_term_count(std::size_t r, std::size_t s);

/// Lower coefficient for || |A| - |B| ||_F / ||A - B||_F over normal pairs.
/// Exact enumeration over k-strata; refuses (BudgetExceeded) when r or s
/// exceeds `cap`. All-0/0 input yields degenerate = true with value 1.
KittanehResult kittaneh_lower_coeff(const EigenPair& eig, std::size_t cap = kDefaultKittanehCap);

/// Upper coefficient when the second matrix has full rank s = n: maximum
/// over injections [r] -> [n]. DomainError unless s == n.
KittanehResult kittaneh_upper_coeff(const EigenPair& eig, std::size_t n,
                                    std::size_t cap = kDefaultKittanehCap);

}  // namespace polarbound
