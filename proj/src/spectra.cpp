#include "polarbound/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "polarbound/errors.hpp"

namespace polarbound {

namespace {

void check_spectrum(std::span<const double> xs, const char* name) {
  if (xs.empty()) throw ValidationError(std::string(name) + ": empty spectrum");
  for (std::size_t j = 0; j < xs.size(); ++j) {
    if (!std::isfinite(xs[j]) || !(xs[j] > 0.0))
      throw ValidationError(std::string(name) + ": non-positive entry at index " + std::to_string(j),
                            static_cast<std::ptrdiff_t>(j));
    if (j > 0 && xs[j] > xs[j - 1] + 1e-14 * std::max(1.0, xs[j - 1]))
      throw ValidationError(std::string(name) + ": not decreasing at index " + std::to_string(j),
                            static_cast<std::ptrdiff_t>(j));
  }
}

}  // namespace

SpectrumPair validate_spectrum_pair(std::span<const double> sigma,
                                    std::span<const double> sigma_tilde) {
  check_spectrum(sigma, "sigma");
  check_spectrum(sigma_tilde, "sigma_tilde");
  SpectrumPair p;
  p.sigma_.assign(sigma.begin(), sigma.end());
  p.sigma_tilde_.assign(sigma_tilde.begin(), sigma_tilde.end());
  if (p.sigma_.size() > p.sigma_tilde_.size()) {
    std::swap(p.sigma_, p.sigma_tilde_);
    p.swapped_ = true;
  }
  return p;
}

FGScalars fg_scalars(const SpectrumPair& pair) {
  CompensatedSum f, g, gap;
  const auto& a = pair.sigma();
  const auto& b = pair.sigma_tilde();
  for (double x : a) f.add_product(x, x);
  for (double x : b) f.add_product(x, x);
  for (std::size_t j = 0; j < a.size(); ++j) {
    g.add_product(a[j], b[j]);
    const double d = a[j] - b[j];
    gap.add_product(d, d);
  }
  for (std::size_t j = a.size(); j < b.size(); ++j) gap.add_product(b[j], b[j]);
  FGScalars out{f.value(), g.value(), gap.value()};
  // Cauchy-Schwarz: 2G <= F.
  if (2.0 * out.g > out.f * (1.0 + 1e-14))
    throw std::logic_error("fg_scalars: 2G > F");
  return out;
}

EigenPair validate_eigen_pair(std::span<const std::complex<double>> lambda,
                              std::span<const std::complex<double>> lambda_hat) {
  auto check = [](std::span<const std::complex<double>> xs, const char* name) {
    if (xs.empty()) throw ValidationError(std::string(name) + ": empty eigenvalue list");
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (!std::isfinite(xs[j].real()) || !std::isfinite(xs[j].imag()) || std::abs(xs[j]) == 0.0)
        throw ValidationError(std::string(name) + ": zero or non-finite eigenvalue at index " +
                                  std::to_string(j),
                              static_cast<std::ptrdiff_t>(j));
    }
  };
  check(lambda, "lambda");
  check(lambda_hat, "lambda_hat");
  EigenPair p;
  p.lambda_.assign(lambda.begin(), lambda.end());
  p.lambda_hat_.assign(lambda_hat.begin(), lambda_hat.end());
  if (p.lambda_.size() > p.lambda_hat_.size()) {
    std::swap(p.lambda_, p.lambda_hat_);
    p.swapped_ = true;
  }
  CompensatedSum f;
  for (const auto& z : p.lambda_) f.add_product(z.real(), z.real()).add_product(z.imag(), z.imag());
  for (const auto& z : p.lambda_hat_) f.add_product(z.real(), z.real()).add_product(z.imag(), z.imag());
  p.f_hat_ = f.value();
  return p;
}

std::string_view to_string(TheoremId id) {
  switch (id) {
    case TheoremId::kLiSun: return "li_sun";
    case TheoremId::kQUpper: return "q_upper";
    case TheoremId::kQLower: return "q_lower";
    case TheoremId::kRefinedLiSun: return "refined_li_sun";
    case TheoremId::kHUpper: return "h_upper";
    case TheoremId::kHLower: return "h_lower";
    case TheoremId::kLeeUpper: return "lee_upper";
    case TheoremId::kLeeLower: return "lee_lower";
    case TheoremId::kAmGm: return "amgm";
    case TheoremId::kCauchySchwarz: return "cauchy_schwarz";
    case TheoremId::kKittanehLower: return "kittaneh_lower";
    case TheoremId::kKittanehUpper: return "kittaneh_upper";
  }
  return "unknown";
}

}  // namespace polarbound
