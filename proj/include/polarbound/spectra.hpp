#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace polarbound {

/// Neumaier-compensated accumulator. Results do not depend on whether terms
/// arrive large-first or small-first to within a few ulps.
class CompensatedSum {
 public:
  CompensatedSum& operator+=(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      carry_ += (sum_ - t) + x;
    else
      carry_ += (x - t) + sum_;
    sum_ = t;
    return *this;
  }
  /// Adds x*y exactly: the rounding error of the product is recovered
  /// with an fma and accumulated alongside.
  CompensatedSum& add_product(double x, double y) {
    const double p = x * y;
    const double e = std::fma(x, y, -p);
    *this += p;
    *this += e;
    return *this;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Singular spectra of a rank-r matrix and a rank-s matrix, r <= s, both
/// strictly positive and non-increasing. Construct through
/// validate_spectrum_pair(); the inputs are checked, never re-sorted.
class SpectrumPair {
 public:
  const std::vector<double>& sigma() const { return sigma_; }
  const std::vector<double>& sigma_tilde() const { return sigma_tilde_; }
  std::size_t r() const { return sigma_.size(); }
  std::size_t s() const { return sigma_tilde_.size(); }
  /// True when the caller passed the longer list first.
  bool swapped() const { return swapped_; }

  /// 1-based accessors matching the usual sigma_j / sigma~_j indexing.
  double sig(std::size_t j) const { return sigma_[j - 1]; }
  double sig_t(std::size_t j) const { return sigma_tilde_[j - 1]; }

 private:
  friend SpectrumPair validate_spectrum_pair(std::span<const double>, std::span<const double>);
  std::vector<double> sigma_;
  std::vector<double> sigma_tilde_;
  bool swapped_ = false;
};

/// Throws ValidationError naming the list and 0-based index of the first
/// non-positive, non-finite or out-of-order entry (1e-14 slack on order).
SpectrumPair validate_spectrum_pair(std::span<const double> sigma,
                                    std::span<const double> sigma_tilde);

/// F = sum sigma_j^2 + sum sigma~_j^2, G = sum_{j<=r} sigma_j sigma~_j.
/// `gap` is F - 2G accumulated as sum (sigma_j - sigma~_j)^2 + tail, so it is
/// exactly zero for identical spectra and free of cancellation otherwise.
struct FGScalars {
  double f = 0.0;
  double g = 0.0;
  double gap = 0.0;
};

FGScalars fg_scalars(const SpectrumPair& pair);

/// Non-zero eigenvalues of two normal matrices, r <= s.
class EigenPair {
 public:
  using Complex = std::complex<double>;
  const std::vector<Complex>& lambda() const { return lambda_; }
  const std::vector<Complex>& lambda_hat() const { return lambda_hat_; }
  std::size_t r() const { return lambda_.size(); }
  std::size_t s() const { return lambda_hat_.size(); }
  /// sum |lambda_j|^2 + sum |lambda^_j|^2
  double f_hat() const { return f_hat_; }
  bool swapped() const { return swapped_; }

 private:
  friend EigenPair validate_eigen_pair(std::span<const Complex>, std::span<const Complex>);
  std::vector<Complex> lambda_;
  std::vector<Complex> lambda_hat_;
  double f_hat_ = 0.0;
  bool swapped_ = false;
};

EigenPair validate_eigen_pair(std::span<const std::complex<double>> lambda,
                              std::span<const std::complex<double>> lambda_hat);

enum class TheoremId {
  kLiSun,
  kQUpper,
  kQLower,
  kRefinedLiSun,
  kHUpper,
  kHLower,
  kLeeUpper,
  kLeeLower,
  kAmGm,
  kCauchySchwarz,
  kKittanehLower,
  kKittanehUpper,
};

std::string_view to_string(TheoremId id);

enum class Extremum { kMax, kMin };

struct BoundResult {
  TheoremId theorem = TheoremId::kLiSun;
  double coefficient = 0.0;
  std::optional<std::size_t> optimal_index;
  /// Every candidate term was 0/0; `coefficient` then holds the vacuous bound.
  bool degenerate = false;
};

}  // namespace polarbound
