#include "polarbound/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "polarbound/errors.hpp"

namespace polarbound {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t mul_sat(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > kSaturated / a) return kSaturated;
  return a * b;
}

std::uint64_t choose(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::uint64_t c = 1;
  for (std::size_t i = 1; i <= k; ++i) c = mul_sat(c, n - k + i) / i;
  return c;
}

// Lexicographic successor of an ascending k-subset of [0, n).
bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  std::size_t i = k;
  while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
  if (i == 0) return false;
  ++idx[i - 1];
  for (std::size_t t = i; t < k; ++t) idx[t] = idx[t - 1] + 1;
  return true;
}

// Lexicographic successor of an ordered k-tuple of distinct values in [0, n).
bool next_injection(std::vector<std::size_t>& tup, std::size_t n) {
  const std::size_t k = tup.size();
  for (std::size_t pos = k; pos-- > 0;) {
    std::vector<char> used(n, 0);
    for (std::size_t t = 0; t < pos; ++t) used[tup[t]] = 1;
    std::size_t v = tup[pos] + 1;
    while (v < n && used[v]) ++v;
    if (v >= n) continue;
    tup[pos] = v;
    used[v] = 1;
    std::size_t fill = 0;
    for (std::size_t t = pos + 1; t < k; ++t) {
      while (used[fill]) ++fill;
      tup[t] = fill;
      used[fill] = 1;
    }
    return true;
  }
  return false;
}

std::vector<std::size_t> iota_vec(std::size_t k) {
  std::vector<std::size_t> v(k);
  for (std::size_t i = 0; i < k; ++i) v[i] = i;
  return v;
}

}  // namespace

std::size_t SignedSubPermutation::plus_count() const {
  std::size_t c = 0;
  for (const auto& e : support) c += e.sign > 0;
  return c;
}

std::size_t SignedSubPermutation::minus_count() const { return k() - plus_count(); }

Eigen::MatrixXd SignedSubPermutation::to_dense() const {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (const auto& e : support)
    x(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) = e.sign;
  return x;
}

std::uint64_t extreme_point_count(std::size_t r, std::size_t s) {
  std::uint64_t total = 1;
  std::uint64_t fact = 1;
  for (std::size_t k = 1; k <= r; ++k) {
    fact = mul_sat(fact, k);
    std::uint64_t term = mul_sat(mul_sat(choose(s, k), choose(r, k)), fact);
    term = k >= 64 ? kSaturated : mul_sat(term, std::uint64_t{1} << k);
    total = term > kSaturated - total ? kSaturated : total + term;
  }
  return total;
}

ExtremePointStream::ExtremePointStream(std::size_t r, std::size_t s, std::uint64_t budget)
    : r_(r), s_(s), total_(0) {
  if (r < 1 || r > s)
    throw ValidationError("enumerate_extreme_points: need 1 <= r <= s, got r=" + std::to_string(r) +
                          ", s=" + std::to_string(s));
  total_ = extreme_point_count(r, s);
  if (total_ > budget)
    throw BudgetExceeded("enumerate_extreme_points: " + std::to_string(total_) +
                             " extreme points exceed budget " + std::to_string(budget),
                         total_);
}

void ExtremePointStream::start_stratum() {
  rows_ = iota_vec(k_);
  cols_ = iota_vec(k_);
  signs_ = 0;
}

bool ExtremePointStream::advance() {
  if (++signs_ < (std::uint64_t{1} << k_)) return true;
  signs_ = 0;
  if (next_injection(cols_, r_)) return true;
  cols_ = iota_vec(k_);
  if (next_combination(rows_, s_)) return true;
  if (++k_ > r_) return false;
  start_stratum();
  return true;
}

void ExtremePointStream::emit(SignedSubPermutation& out) const {
  out.rows = s_;
  out.cols = r_;
  out.support.clear();
  for (std::size_t t = 0; t < k_; ++t)
    out.support.push_back({rows_[t], cols_[t], ((signs_ >> t) & 1U) ? -1 : 1});
}

bool ExtremePointStream::next(SignedSubPermutation& out) {
  if (done_) return false;
  if (!started_) {
    started_ = true;
    k_ = 0;
    emit(out);
    return true;
  }
  if (k_ == 0) {
    k_ = 1;
    start_stratum();
  } else if (!advance()) {
    done_ = true;
    return false;
  }
  emit(out);
  return true;
}

namespace {

CompensatedSum f_denominator_base(const SpectrumPair& pair) {
  CompensatedSum den;
  for (double x : pair.sigma()) den.add_product(x, x);
  for (double x : pair.sigma_tilde()) den.add_product(x, x);
  return den;
}

double scale_of(const SpectrumPair& pair) { return f_denominator_base(pair).value(); }

}  // namespace

FEvaluation evaluate_f(const SpectrumPair& pair, const SignedSubPermutation& x) {
  FEvaluation ev;
  ev.point = x;
  long long signed_total = 0;
  CompensatedSum den = f_denominator_base(pair);
  const double f = den.value();
  for (const auto& e : x.support) {
    signed_total += e.sign;
    den.add_product(-2.0 * e.sign * pair.sigma_tilde()[e.row], pair.sigma()[e.col]);
  }
  ev.numerator = static_cast<double>(static_cast<long long>(pair.r() + pair.s()) - 2 * signed_total);
  ev.denominator = den.value();
  const double tol = indeterminate_tol(f);
  if (!(std::abs(ev.numerator) < tol && std::abs(ev.denominator) < tol))
    ev.value = ev.numerator / ev.denominator;
  return ev;
}

std::optional<double> evaluate_f_dense(const SpectrumPair& pair, const Eigen::MatrixXd& x) {
  CompensatedSum num, den = f_denominator_base(pair);
  const double f = den.value();
  num += static_cast<double>(pair.r() + pair.s());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      num += -2.0 * x(i, j);
      den.add_product(-2.0 * pair.sigma_tilde()[static_cast<std::size_t>(i)] * x(i, j),
                      pair.sigma()[static_cast<std::size_t>(j)]);
    }
  const double tol = indeterminate_tol(f);
  if (std::abs(num.value()) < tol && std::abs(den.value()) < tol) return std::nullopt;
  return num.value() / den.value();
}

FExtrema brute_force_f_extrema(const SpectrumPair& pair, std::uint64_t budget) {
  ExtremePointStream stream(pair.r(), pair.s(), budget);
  FExtrema out;
  bool have = false;
  SignedSubPermutation x;
  while (stream.next(x)) {
    ++out.points;
    FEvaluation ev = evaluate_f(pair, x);
    if (!ev.value) continue;
    if (!have || *ev.value > *out.max.value) out.max = ev;
    if (!have || *ev.value < *out.min.value) out.min = ev;
    have = true;
    if (x.k() == pair.r()) {
      if (!out.face_max || *ev.value > *out.face_max->value) out.face_max = ev;
      if (!out.face_min || *ev.value < *out.face_min->value) out.face_min = ev;
    }
  }
  if (!have) throw std::logic_error("brute_force_f_extrema: every extreme point is indeterminate");
  return out;
}

KittanehResult brute_force_kittaneh(const EigenPair& eig, KittanehMode mode, std::size_t n, std::size_t cap) {
  const std::size_t r = eig.r(), s = eig.s();
  const bool upper = mode == KittanehMode::kUpper;
  if (upper && s != n)
    throw DomainError("brute_force_kittaneh: upper mode needs s == n (s=" + std::to_string(s) +
                      ", n=" + std::to_string(n) + ")");
  if (r > cap || s > cap)
    throw BudgetExceeded("brute_force_kittaneh: sizes exceed cap " + std::to_string(cap), kSaturated);

  // Digit d_j per column j: lower mode uses 0 = unmatched, i + 1 = matched to
  // lambda_hat[i]; upper mode uses d_j = i directly.
  const std::size_t radix = upper ? s : s + 1;
  std::vector<std::size_t> digit(r, 0);
  const double tol = indeterminate_tol(eig.f_hat());

  KittanehResult out;
  out.bound.theorem = upper ? TheoremId::kKittanehUpper : TheoremId::kKittanehLower;
  std::optional<double> best;
  std::vector<char> seen(s);
  while (true) {
    std::fill(seen.begin(), seen.end(), 0);
    bool injective = true;
    std::size_t matched = 0;
    for (std::size_t j = 0; j < r && injective; ++j) {
      if (!upper && digit[j] == 0) continue;
      const std::size_t i = upper ? digit[j] : digit[j] - 1;
      if (seen[i]) injective = false;
      seen[i] = 1;
      ++matched;
    }
    if (injective && matched > 0) {
      ++out.terms;
      CompensatedSum num, den;
      for (const auto& z : eig.lambda()) {
        num.add_product(z.real(), z.real()).add_product(z.imag(), z.imag());
        den.add_product(z.real(), z.real()).add_product(z.imag(), z.imag());
      }
      for (const auto& z : eig.lambda_hat()) {
        num.add_product(z.real(), z.real()).add_product(z.imag(), z.imag());
        den.add_product(z.real(), z.real()).add_product(z.imag(), z.imag());
      }
      Arrangement m;
      for (std::size_t j = 0; j < r; ++j) {
        if (!upper && digit[j] == 0) continue;
        const std::size_t i = upper ? digit[j] : digit[j] - 1;
        const auto& lh = eig.lambda_hat()[i];
        const auto& l = eig.lambda()[j];
        num.add_product(-2.0 * std::abs(lh), std::abs(l));
        den.add_product(-2.0 * lh.real(), l.real()).add_product(-2.0 * lh.imag(), l.imag());
        m.emplace_back(i, j);
      }
      const double nv = num.value(), dv = den.value();
      if (!(std::abs(nv) < tol && std::abs(dv) < tol)) {
        const double v = nv / dv;
        if (!best || (upper ? v > *best : v < *best)) {
          best = v;
          out.arrangement = std::move(m);
          out.bound.optimal_index = matched;
        }
      }
    }
    std::size_t pos = 0;
    while (pos < r && ++digit[pos] == radix) digit[pos++] = 0;
    if (pos == r) break;
  }
  if (!best) {
    out.bound.degenerate = true;
    out.bound.coefficient = 1.0;
    out.bound.optimal_index.reset();
    out.arrangement.clear();
    return out;
  }
  out.bound.coefficient = std::sqrt(std::max(*best, 0.0));
  return out;
}

std::vector<DirectionalMove> directional_move_check(const SpectrumPair& pair, Extremum variant) {
  const std::size_t r = pair.r(), s = pair.s();
  // A(k): k smallest sigma~ against k smallest sigma in reverse order.
  // B(k): k largest of each, same order.
  auto a_sum = [&](std::size_t k) {
    CompensatedSum acc;
    for (std::size_t j = 1; j <= k; ++j) acc.add_product(pair.sig_t(s - k + j), pair.sig(r + 1 - j));
    return acc;
  };
  auto b_sum = [&](std::size_t k) {
    CompensatedSum acc;
    for (std::size_t j = 1; j <= k; ++j) acc.add_product(pair.sig_t(j), pair.sig(j));
    return acc;
  };
  const double f_total = scale_of(pair);
  const double tol = indeterminate_tol(f_total);
  const bool is_max = variant == Extremum::kMax;

  auto num_at = [&](std::size_t k1, std::size_t k2) {
    return static_cast<double>(r + s + 2 * k1) - 2.0 * static_cast<double>(k2);
  };
  auto den_at = [&](std::size_t k1, std::size_t k2) {
    CompensatedSum d = f_denominator_base(pair);
    const double plus = (is_max ? a_sum(k1) : b_sum(k1)).value();
    const double minus = (is_max ? b_sum(k2) : a_sum(k2)).value();
    d += 2.0 * plus;
    d += -2.0 * minus;
    return d.value();
  };
  auto f_at = [&](std::size_t k1, std::size_t k2) -> std::optional<double> {
    const double nv = num_at(k1, k2), dv = den_at(k1, k2);
    if (std::abs(nv) < tol && std::abs(dv) < tol) return std::nullopt;
    return nv / dv;
  };
  auto move = [&](std::size_t k1, std::size_t k2, std::size_t t1, std::size_t t2) {
    return DirectionalMove{{k1, k2}, {t1, t2}, num_at(t1, t2) - num_at(k1, k2), den_at(t1, t2) - den_at(k1, k2)};
  };

  std::vector<DirectionalMove> violations;
  for (std::size_t k1 = 0; k1 <= r; ++k1) {
    for (std::size_t k2 = 0; k1 + k2 <= r; ++k2) {
      if (k1 + k2 + 2 <= r) {
        const DirectionalMove diag = move(k1, k2, k1 + 1, k2 + 1);
        if (is_max ? diag.delta_denominator > tol : diag.delta_denominator < -tol) violations.push_back(diag);
      }
      if (k1 + k2 + 1 <= r) {
        const auto here = f_at(k1, k2);
        const auto right = f_at(k1 + 1, k2);
        const auto up = f_at(k1, k2 + 1);
        if (!here || !right || !up) continue;
        const double slack = 1e-12 * std::abs(*here);
        const bool ok = is_max ? std::max(*right, *up) >= *here - slack : std::min(*right, *up) <= *here + slack;
        if (!ok) {
          violations.push_back(move(k1, k2, k1 + 1, k2));
          violations.push_back(move(k1, k2, k1, k2 + 1));
        }
      }
    }
  }
  return violations;
}

}  // namespace polarbound
