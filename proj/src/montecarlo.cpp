#include "polarbound/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "polarbound/bounds.hpp"
#include "polarbound/errors.hpp"
#include "polarbound/spectra.hpp"

namespace polarbound {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Check make_check(std::string id, double lhs, double rhs, double slack) {
  const bool violated = lhs - rhs > slack * std::max(std::abs(lhs), std::abs(rhs));
  return Check{std::move(id), lhs, rhs, violated};
}

std::vector<double> draw_spectrum(std::mt19937_64& rng, std::size_t count, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  std::vector<double> v(count);
  for (double& x : v) x = std::exp(u(rng));
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

struct TrialResult {
  std::uint64_t seed = 0;
  std::vector<Check> checks;
  bool normal = false;
};

TrialResult run_trial(const EnsembleConfig& cfg, std::uint64_t index) {
  TrialResult out;
  out.seed = derive_seed(cfg.seed, index);
  std::mt19937_64 rng(out.seed);
  const auto d = static_cast<std::size_t>(std::min(cfg.m, cfg.n));
  auto draw_rank = [&](std::size_t fixed, std::size_t top) {
    return fixed ? fixed : std::uniform_int_distribution<std::size_t>(1, top)(rng);
  };

  try {
    const std::size_t r = draw_rank(cfg.r, d);
    const std::size_t s = draw_rank(cfg.s, d);
    // 0: shared singular vectors, 1: shared leading singular values, else generic.
    const int variant = std::uniform_int_distribution<int>(0, 7)(rng);
    std::vector<double> sigma = draw_spectrum(rng, r, cfg.spectrum_lo, cfg.spectrum_hi);
    std::vector<double> sigma_t = draw_spectrum(rng, s, cfg.spectrum_lo, cfg.spectrum_hi);
    if (variant == 1) {
      for (std::size_t j = 0; j < std::min(r, s); ++j) sigma_t[j] = sigma[j];
      std::sort(sigma_t.begin(), sigma_t.end(), std::greater<>());
    }
    const std::uint64_t seed_a = derive_seed(out.seed, 1);
    const std::uint64_t seed_b = variant == 0 ? seed_a : derive_seed(out.seed, 2);
    const DenseMatrix a = random_matrix_with_spectrum(sigma, cfg.m, cfg.n, seed_a, cfg.field);
    const DenseMatrix a_t = random_matrix_with_spectrum(sigma_t, cfg.m, cfg.n, seed_b, cfg.field);
    out.checks = check_pair(a, a_t, sigma, sigma_t, cfg.rank_tol, cfg.slack_tol);

    // Normal channel: U diag(lambda, 0) U^* with lambda on an annulus.
    const auto dn = std::min(static_cast<std::size_t>(cfg.n), cfg.normal_dim_cap);
    const std::size_t rn = draw_rank(0, dn);
    const std::size_t sn = std::uniform_int_distribution<int>(0, 1)(rng) ? dn : draw_rank(0, dn);
    const bool commuting = std::uniform_int_distribution<int>(0, 7)(rng) == 0;
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    auto draw_eigs = [&](std::size_t count) {
      std::vector<Complex> v;
      for (double mod : draw_spectrum(rng, count, cfg.spectrum_lo, cfg.spectrum_hi))
        v.push_back(std::polar(mod, phase(rng)));
      return v;
    };
    const std::vector<Complex> lambda = draw_eigs(rn);
    const std::vector<Complex> lambda_hat = draw_eigs(sn);
    const Index nd = static_cast<Index>(dn);
    const DenseMatrix u = haar_random_unitary(nd, derive_seed(out.seed, 3));
    const DenseMatrix w = commuting ? u : haar_random_unitary(nd, derive_seed(out.seed, 4));
    Eigen::VectorXcd da = Eigen::VectorXcd::Zero(nd), db = Eigen::VectorXcd::Zero(nd);
    for (std::size_t j = 0; j < rn; ++j) da(static_cast<Index>(j)) = lambda[j];
    for (std::size_t j = 0; j < sn; ++j) db(static_cast<Index>(j)) = lambda_hat[j];
    const DenseMatrix na = u * da.asDiagonal() * u.adjoint();
    const DenseMatrix nb = w * db.asDiagonal() * w.adjoint();
    for (Check& c : check_normal_pair(na, nb, lambda, lambda_hat, cfg.rank_tol, cfg.slack_tol))
      out.checks.push_back(std::move(c));
    out.normal = true;
  } catch (const std::exception& e) {
    out.checks.push_back(Check{std::string("error: ") + e.what(), 1.0, 0.0, true});
  }
  return out;
}

}  // namespace

std::string_view to_string(Field field) { return field == Field::kReal ? "real" : "complex"; }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ (index * 0xD1B54A32D192ED03ULL));
}

DenseMatrix random_matrix_with_spectrum(std::span<const double> sigma, Index m, Index n, std::uint64_t seed,
                                        Field field) {
  if (m < 1 || n < 1) throw ValidationError("random_matrix_with_spectrum: dimensions must be positive");
  const auto k = static_cast<Index>(sigma.size());
  if (k > std::min(m, n))
    throw ValidationError("random_matrix_with_spectrum: " + std::to_string(k) + " singular values exceed min(m, n) = " +
                          std::to_string(std::min(m, n)));
  for (std::size_t j = 0; j < sigma.size(); ++j)
    if (!std::isfinite(sigma[j]) || sigma[j] < 0.0)
      throw ValidationError("random_matrix_with_spectrum: bad singular value at index " + std::to_string(j),
                            static_cast<std::ptrdiff_t>(j));
  const std::uint64_t su = derive_seed(seed, 0), sv = derive_seed(seed, 1);
  const DenseMatrix u = field == Field::kReal ? haar_random_orthogonal(m, su) : haar_random_unitary(m, su);
  const DenseMatrix v = field == Field::kReal ? haar_random_orthogonal(n, sv) : haar_random_unitary(n, sv);
  Eigen::VectorXcd d(k);
  for (Index j = 0; j < k; ++j) d(j) = sigma[static_cast<std::size_t>(j)];
  return u.leftCols(k) * d.asDiagonal() * v.leftCols(k).adjoint();
}

void validate_config(const EnsembleConfig& c) {
  const auto d = static_cast<std::size_t>(std::max<Index>(0, std::min(c.m, c.n)));
  if (c.m < 1 || c.n < 1) throw ValidationError("ensemble: m and n must be at least 1");
  if (c.r > d || c.s > d) throw ValidationError("ensemble: ranks must not exceed min(m, n)");
  if (c.trials < 1) throw ValidationError("ensemble: trials must be at least 1");
  if (!(c.spectrum_lo > 0.0) || !(c.spectrum_hi >= c.spectrum_lo) || !std::isfinite(c.spectrum_hi))
    throw ValidationError("ensemble: spectrum law needs 0 < lo <= hi < inf");
  if (!(c.rank_tol > 0.0) || !(c.slack_tol >= 0.0)) throw ValidationError("ensemble: tolerances must be positive");
  if (c.normal_dim_cap < 1 || c.normal_dim_cap > kDefaultKittanehCap)
    throw ValidationError("ensemble: normal_dim_cap must be in [1, " + std::to_string(kDefaultKittanehCap) + "]");
  if (c.threads < 1) throw ValidationError("ensemble: threads must be at least 1");
}

AngleDiagnostics angle_diagnostics(const DenseMatrix& a, const DenseMatrix& b, double rank_tol) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw DomainError("angle_diagnostics: zero matrix");
  const DenseMatrix ha = polar_decompose(a, rank_tol).h;
  const DenseMatrix hb = polar_decompose(b, rank_tol).h;
  AngleDiagnostics out;
  out.cos_alpha = std::clamp(frobenius_inner(a, b).real() / (na * nb), -1.0, 1.0);
  out.cos_beta = std::clamp(frobenius_inner(ha, hb).real() / (ha.norm() * hb.norm()), -1.0, 1.0);
  return out;
}

std::vector<Check> check_pair(const DenseMatrix& a, const DenseMatrix& a_tilde, std::span<const double> sigma,
                              std::span<const double> sigma_tilde, double rank_tol, double slack) {
  const SpectrumPair pair = validate_spectrum_pair(sigma, sigma_tilde);
  const PolarFactors p = polar_decompose(a, rank_tol);
  const PolarFactors pt = polar_decompose(a_tilde, rank_tol);
  const double e = (a - a_tilde).norm();
  const double q_gap = (p.q - pt.q).norm();
  const double h_gap = (p.h - pt.h).norm();
  const double a_sum = (a + a_tilde).norm();
  const double h_sum = (p.h + pt.h).norm();
  const double na = a.norm(), nb = a_tilde.norm();

  std::vector<Check> out;
  auto add = [&](const char* id, double lhs, double rhs) { out.push_back(make_check(id, lhs, rhs, slack)); };

  const double qu = q_upper_coeff(pair).bound.coefficient;
  add("a.q_lower", q_lower_coeff(pair).bound.coefficient * e, q_gap);
  add("a.q_upper", q_gap, qu * e);
  if (pair.r() == pair.s()) add("a.refines_li_sun", qu, li_sun_coeff(pair).coefficient);

  const double hu = h_upper_coeff(pair).coefficient;
  add("b.h_lower", h_lower_coeff(pair).coefficient * e, h_gap);
  add("b.h_upper", h_gap, hu * e);
  add("b.sqrt2", hu * e, std::numbers::sqrt2 * e);

  add("c.lee_lower", lee_lower_coeff(pair).coefficient * h_sum, a_sum);
  add("c.lee_upper", a_sum, lee_upper_coeff(pair).coefficient * h_sum);

  const double sq_sum = (a.adjoint() * a + a_tilde.adjoint() * a_tilde).norm();
  const double am = amgm_coeff(pair).coefficient;
  add("d.amgm", (a * a_tilde.adjoint()).norm(), am * sq_sum);
  add("d.half", am * sq_sum, 0.5 * sq_sum);

  const double cs = cauchy_schwarz_coeff(pair).coefficient;
  add("e.cs", std::abs(frobenius_inner(a, a_tilde)), cs * na * nb);
  add("e.one", cs * na * nb, na * nb);

  const DenseMatrix ha_star = polar_decompose(a.adjoint(), rank_tol).h;
  const DenseMatrix hb_star = polar_decompose(a_tilde.adjoint(), rank_tol).h;
  add("f.araki_yamagami", (p.h - pt.h).squaredNorm() + (ha_star - hb_star).squaredNorm(), 2.0 * e * e);

  const AngleDiagnostics ang = angle_diagnostics(a, a_tilde, rank_tol);
  const double lhs = ang.cos_alpha * ang.cos_alpha;
  out.push_back(Check{"h.angle", lhs, ang.cos_beta, lhs - ang.cos_beta > slack});
  return out;
}

std::vector<Check> check_normal_pair(const DenseMatrix& a, const DenseMatrix& b, std::span<const Complex> lambda,
                                     std::span<const Complex> lambda_hat, double rank_tol, double slack) {
  const EigenPair eig = validate_eigen_pair(lambda, lambda_hat);
  const auto n = static_cast<std::size_t>(a.rows());
  const double e = (a - b).norm();
  const double gap = (polar_decompose(a, rank_tol).h - polar_decompose(b, rank_tol).h).norm();
  std::vector<Check> out;
  out.push_back(make_check("g.kittaneh_lower", kittaneh_lower_coeff(eig).bound.coefficient * e, gap, slack));
  out.push_back(make_check("g.contraction", gap, e, slack));
  if (eig.s() == n)
    out.push_back(make_check("g.kittaneh_upper", gap, kittaneh_upper_coeff(eig, n).bound.coefficient * e, slack));
  return out;
}

SuiteReport run_verification_suite(const EnsembleConfig& config) {
  validate_config(config);
  const auto start = std::chrono::steady_clock::now();
  std::vector<TrialResult> results(config.trials);

  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t i = next++; i < config.trials; i = next++) results[i] = run_trial(config, i);
  };
  const unsigned threads = static_cast<unsigned>(std::min<std::uint64_t>(config.threads, config.trials));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SuiteReport report;
  report.trials = config.trials;
  report.max_angle_excess = -std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < config.trials; ++i) {
    const TrialResult& tr = results[i];
    report.normal_trials += tr.normal;
    for (const Check& c : tr.checks) {
      CheckSummary& sum = report.checks[c.id];
      ++sum.evaluated;
      if (c.rhs > 0.0) sum.max_ratio = std::max(sum.max_ratio, c.lhs / c.rhs);
      if (c.id == "h.angle") report.max_angle_excess = std::max(report.max_angle_excess, c.lhs - c.rhs);
      if (c.violated) report.violations.push_back({i, tr.seed, c.id, c.lhs, c.rhs, c.lhs - c.rhs});
    }
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace polarbound
