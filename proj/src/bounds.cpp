#include "polarbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "polarbound/errors.hpp"

namespace polarbound {

std::optional<double> KRatioTable::at(std::size_t k) const {
  for (const auto& e : entries)
    if (e.k == k) return e.value;
  return std::nullopt;
}

namespace {

constexpr double kChainSlack = 1e-12;

void require_equal_ranks(const SpectrumPair& pair, const char* who) {
  if (pair.r() != pair.s())
    throw DomainError(std::string(who) + ": requires equal ranks, got r=" + std::to_string(pair.r()) +
                      ", s=" + std::to_string(pair.s()));
}

KRatioEntry make_entry(std::size_t k, double num, double den, double scale) {
  KRatioEntry e{k, num, den, std::nullopt};
  const double tol = indeterminate_tol(scale);
  if (std::abs(num) < tol && std::abs(den) < tol) return e;
  if (!(den > 0.0)) throw std::logic_error("k-ratio: non-positive denominator with non-zero numerator");
  e.value = num / den;
  return e;
}

// Fills argmax / argmin (smallest k on ties) and returns sqrt of the chosen
// extreme. Throws if every entry is 0/0.
void select_extrema(KRatioTable& t) {
  std::optional<double> best_max, best_min;
  for (const auto& e : t.entries) {
    if (!e.value) continue;
    if (!best_max || *e.value > *best_max) {
      best_max = e.value;
      t.argmax = e.k;
    }
    if (!best_min || *e.value < *best_min) {
      best_min = e.value;
      t.argmin = e.k;
    }
  }
  if (!best_max) throw std::logic_error("k-ratio: every candidate is indeterminate");
}

KRatioBound finish(TheoremId id, KRatioTable table, bool use_max) {
  select_extrema(table);
  KRatioBound out;
  out.bound.theorem = id;
  out.bound.optimal_index = use_max ? table.argmax : table.argmin;
  out.bound.coefficient = std::sqrt(*table.at(*out.bound.optimal_index));
  out.table = std::move(table);
  return out;
}

void add_sq(CompensatedSum& acc, double x) { acc.add_product(x, x); }

}  // namespace

BoundResult li_sun_coeff(const SpectrumPair& pair) {
  require_equal_ranks(pair, "li_sun_coeff");
  const std::size_t r = pair.r();
  return BoundResult{TheoremId::kLiSun, 2.0 / (pair.sig(r) + pair.sig_t(r)), std::nullopt, false};
}

KRatioBound q_upper_coeff(const SpectrumPair& pair) {
  const std::size_t r = pair.r(), s = pair.s();
  const double f = fg_scalars(pair).f;
  KRatioTable table;
  for (std::size_t k = 0; k <= r; ++k) {
    CompensatedSum den;
    for (std::size_t j = 1; j <= r - k; ++j) add_sq(den, pair.sig(j) - pair.sig_t(j));
    for (std::size_t j = 1; j <= k; ++j) add_sq(den, pair.sig(r + 1 - j) + pair.sig_t(s - k + j));
    for (std::size_t j = r - k + 1; j <= s - k; ++j) add_sq(den, pair.sig_t(j));
    const double num = static_cast<double>(s - r + 4 * k);
    table.entries.push_back(make_entry(k, num, den.value(), f));
  }
  return finish(TheoremId::kQUpper, std::move(table), true);
}

KRatioBound q_lower_coeff(const SpectrumPair& pair) {
  const std::size_t r = pair.r(), s = pair.s();
  const double f = fg_scalars(pair).f;
  KRatioTable table;
  for (std::size_t k = 0; k <= r; ++k) {
    CompensatedSum den;
    for (std::size_t j = 1; j <= k; ++j) add_sq(den, pair.sig(j) + pair.sig_t(j));
    for (std::size_t j = 1; j <= r - k; ++j) add_sq(den, pair.sig(r + 1 - j) - pair.sig_t(s - r + k + j));
    for (std::size_t j = k + 1; j <= s - r + k; ++j) add_sq(den, pair.sig_t(j));
    const double num = static_cast<double>(s - r + 4 * k);
    table.entries.push_back(make_entry(k, num, den.value(), f));
  }
  return finish(TheoremId::kQLower, std::move(table), false);
}

KRatioBound refined_li_sun_coeff(const SpectrumPair& pair) {
  require_equal_ranks(pair, "refined_li_sun_coeff");
  const std::size_t r = pair.r();
  const double f = fg_scalars(pair).f;
  KRatioTable table;
  for (std::size_t k = 1; k <= r; ++k) {
    CompensatedSum den;
    for (std::size_t j = 1; j <= r - k; ++j) add_sq(den, pair.sig(j) - pair.sig_t(j));
    for (std::size_t j = 1; j <= k; ++j) add_sq(den, pair.sig(r + 1 - j) + pair.sig_t(r - k + j));
    table.entries.push_back(make_entry(k, 4.0 * static_cast<double>(k), den.value(), f));
  }
  KRatioBound out = finish(TheoremId::kRefinedLiSun, std::move(table), true);
  if (out.bound.coefficient > li_sun_coeff(pair).coefficient * (1.0 + kChainSlack))
    throw std::logic_error("refined_li_sun_coeff: exceeds Li-Sun constant");
  return out;
}

BoundResult h_upper_coeff(const SpectrumPair& pair) {
  const FGScalars fg = fg_scalars(pair);
  // (F - sqrt(F^2 - 2GF)) / G rewritten without the subtraction.
  const double c2 = 2.0 * fg.f / (fg.f + std::sqrt(fg.f * fg.gap));
  const double c = std::sqrt(c2);
  if (c > std::sqrt(2.0) * (1.0 + 1e-14)) throw std::logic_error("h_upper_coeff: exceeds sqrt(2)");
  return BoundResult{TheoremId::kHUpper, c, std::nullopt, false};
}

BoundResult h_lower_coeff(const SpectrumPair& pair) {
  const FGScalars fg = fg_scalars(pair);
  const double c = std::sqrt(fg.gap / (fg.f + 2.0 * fg.g));
  if (c < 0.0 || c > 1.0) throw std::logic_error("h_lower_coeff: outside [0, 1]");
  return BoundResult{TheoremId::kHLower, c, std::nullopt, false};
}

BoundResult lee_upper_coeff(const SpectrumPair& pair) {
  const FGScalars fg = fg_scalars(pair);
  // G / (sqrt(F^2 + 2GF) - F) = (1 + sqrt(1 + 2G/F)) / 2.
  const double c2 = 0.5 * (1.0 + std::sqrt(1.0 + 2.0 * fg.g / fg.f));
  const double c = std::sqrt(c2);
  if (c > std::sqrt(0.5 * (1.0 + std::sqrt(2.0))) * (1.0 + 1e-14))
    throw std::logic_error("lee_upper_coeff: exceeds Lee's constant");
  return BoundResult{TheoremId::kLeeUpper, c, std::nullopt, false};
}

BoundResult lee_lower_coeff(const SpectrumPair& pair) {
  BoundResult b = h_lower_coeff(pair);
  b.theorem = TheoremId::kLeeLower;
  return b;
}

BoundResult amgm_coeff(const SpectrumPair& pair) {
  const auto& a = pair.sigma();
  const auto& b = pair.sigma_tilde();
  CompensatedSum cross, quartic;
  for (std::size_t j = 0; j < a.size(); ++j) cross.add_product(a[j] * a[j], b[j] * b[j]);
  for (double x : a) quartic.add_product(x * x, x * x);
  for (double x : b) quartic.add_product(x * x, x * x);
  const double c = std::sqrt(cross.value() / (quartic.value() + 2.0 * cross.value()));
  if (c > 0.5 * (1.0 + 1e-14)) throw std::logic_error("amgm_coeff: exceeds 1/2");
  return BoundResult{TheoremId::kAmGm, c, std::nullopt, false};
}

BoundResult cauchy_schwarz_coeff(const SpectrumPair& pair) {
  const auto& a = pair.sigma();
  const auto& b = pair.sigma_tilde();
  CompensatedSum g, na, nb;
  for (std::size_t j = 0; j < a.size(); ++j) g.add_product(a[j], b[j]);
  for (double x : a) na.add_product(x, x);
  for (double x : b) nb.add_product(x, x);
  const double c = g.value() / (std::sqrt(na.value()) * std::sqrt(nb.value()));
  if (c > 1.0 + 1e-14) throw std::logic_error("cauchy_schwarz_coeff: exceeds 1");
  return BoundResult{TheoremId::kCauchySchwarz, std::min(c, 1.0), std::nullopt, false};
}

// --- Kittaneh-type bounds ---------------------------------------------------

namespace {

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return (b > std::numeric_limits<std::uint64_t>::max() - a) ? std::numeric_limits<std::uint64_t>::max()
                                                             : a + b;
}

std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::uint64_t c = 1;
  for (std::size_t i = 1; i <= k; ++i) c = sat_mul(c, n - k + i) / i;
  return c;
}

std::uint64_t falling(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::uint64_t c = 1;
  for (std::size_t i = 0; i < k; ++i) c = sat_mul(c, n - i);
  return c;
}

// Ratio terms for one matching, evaluated as sums of squares:
//   num = sum_matched (|l^_i| - |l_j|)^2 + unmatched |.|^2
//   den = sum_matched |l^_i - l_j|^2     + unmatched |.|^2
struct MatchingEvaluator {
  const EigenPair& eig;
  std::vector<char> used_hat, used;

  explicit MatchingEvaluator(const EigenPair& e)
      : eig(e), used_hat(e.s(), 0), used(e.r(), 0) {}

  std::pair<double, double> operator()(const Arrangement& m) {
    std::fill(used_hat.begin(), used_hat.end(), 0);
    std::fill(used.begin(), used.end(), 0);
    CompensatedSum num, den;
    for (const auto& [i, j] : m) {
      used_hat[i] = used[j] = 1;
      const auto& lh = eig.lambda_hat()[i];
      const auto& l = eig.lambda()[j];
      const double dm = std::abs(lh) - std::abs(l);
      num += dm * dm;
      den += std::norm(lh - l);
    }
    for (std::size_t i = 0; i < eig.s(); ++i)
      if (!used_hat[i]) {
        num += std::norm(eig.lambda_hat()[i]);
        den += std::norm(eig.lambda_hat()[i]);
      }
    for (std::size_t j = 0; j < eig.r(); ++j)
      if (!used[j]) {
        num += std::norm(eig.lambda()[j]);
        den += std::norm(eig.lambda()[j]);
      }
    return {num.value(), den.value()};
  }
};

// Visits every ordered selection of `k` distinct values from [0, n) in
// lexicographic order.
void for_each_injection(std::size_t n, std::size_t k,
                        const std::function<void(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> cur;
  std::vector<char> taken(n, 0);
  std::function<void()> rec = [&] {
    if (cur.size() == k) {
      visit(cur);
      return;
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (taken[v]) continue;
      taken[v] = 1;
      cur.push_back(v);
      rec();
      cur.pop_back();
      taken[v] = 0;
    }
  };
  rec();
}

// Visits every k-subset of [0, n) as an ascending list, lexicographically.
void for_each_combination(std::size_t n, std::size_t k,
                          const std::function<void(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  while (true) {
    visit(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t t = i; t < k; ++t) idx[t] = idx[t - 1] + 1;
  }
}

}  // namespace

std::uint64_t kittaneh_lower_term_count(std::size_t r, std::size_t s) {
  std::uint64_t total = 0;
  for (std::size_t k = 1; k <= r; ++k) total = sat_add(total, sat_mul(binomial(r, k), falling(s, k)));
  return total;
}

KittanehResult kittaneh_lower_coeff(const EigenPair& eig, std::size_t cap) {
  const std::size_t r = eig.r(), s = eig.s();
  if (r > cap || s > cap) {
    const std::uint64_t need = kittaneh_lower_term_count(r, s);
    throw BudgetExceeded("kittaneh_lower_coeff: r=" + std::to_string(r) + ", s=" + std::to_string(s) +
                             " exceeds cap " + std::to_string(cap) + "; exact enumeration needs " +
                             std::to_string(need) + " terms",
                         need);
  }
  const double tol = indeterminate_tol(eig.f_hat());
  MatchingEvaluator eval(eig);
  KittanehResult out;
  out.bound.theorem = TheoremId::kKittanehLower;
  std::optional<double> best;
  Arrangement m;
  for (std::size_t k = 1; k <= r; ++k) {
    for_each_combination(r, k, [&](const std::vector<std::size_t>& js) {
      for_each_injection(s, k, [&](const std::vector<std::size_t>& is) {
        m.clear();
        for (std::size_t t = 0; t < k; ++t) m.emplace_back(is[t], js[t]);
        ++out.terms;
        const auto [num, den] = eval(m);
        if (std::abs(num) < tol && std::abs(den) < tol) return;
        const double v = num / den;
        if (!best || v < *best) {
          best = v;
          out.arrangement = m;
          out.bound.optimal_index = k;
        }
      });
    });
  }
  if (!best) {
    out.bound.degenerate = true;
    out.bound.coefficient = 1.0;
    return out;
  }
  out.bound.coefficient = std::sqrt(*best);
  if (out.bound.coefficient > 1.0 + kChainSlack) throw std::logic_error("kittaneh_lower_coeff: exceeds 1");
  return out;
}

KittanehResult kittaneh_upper_coeff(const EigenPair& eig, std::size_t n, std::size_t cap) {
  const std::size_t r = eig.r(), s = eig.s();
  if (s != n)
    throw DomainError("kittaneh_upper_coeff: second matrix must have full rank (s=" + std::to_string(s) +
                      ", n=" + std::to_string(n) + ")");
  if (r > cap || n > cap) {
    const std::uint64_t need = falling(n, r);
    throw BudgetExceeded("kittaneh_upper_coeff: r=" + std::to_string(r) + ", n=" + std::to_string(n) +
                             " exceeds cap " + std::to_string(cap) + "; exact enumeration needs " +
                             std::to_string(need) + " terms",
                         need);
  }
  const double tol = indeterminate_tol(eig.f_hat());
  MatchingEvaluator eval(eig);
  KittanehResult out;
  out.bound.theorem = TheoremId::kKittanehUpper;
  std::optional<double> best;
  Arrangement m;
  for_each_injection(n, r, [&](const std::vector<std::size_t>& image) {
    m.clear();
    for (std::size_t j = 0; j < r; ++j) m.emplace_back(image[j], j);
    ++out.terms;
    const auto [num, den] = eval(m);
    if (std::abs(num) < tol && std::abs(den) < tol) return;
    const double v = num / den;
    if (!best || v > *best) {
      best = v;
      out.arrangement = m;
    }
  });
  out.bound.optimal_index = r;
  if (!best) {
    out.bound.degenerate = true;
    out.bound.coefficient = 1.0;
    out.bound.optimal_index.reset();
    return out;
  }
  out.bound.coefficient = std::sqrt(*best);
  if (out.bound.coefficient > 1.0 + kChainSlack) throw std::logic_error("kittaneh_upper_coeff: exceeds 1");
  return out;
}

}  // namespace polarbound
