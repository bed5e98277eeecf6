#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "polarbound/errors.hpp"
#include "polarbound/extremal.hpp"
#include "polarbound/linalg.hpp"
#include "polarbound/montecarlo.hpp"

using namespace polarbound;
using V = std::vector<double>;

namespace {

std::map<std::string, Check> by_id(const std::vector<Check>& checks) {
  std::map<std::string, Check> out;
  for (const Check& c : checks) out[c.id] = c;
  return out;
}

DenseMatrix embed_diag(const V& d, Index dim) {
  DenseMatrix a = DenseMatrix::Zero(dim, dim);
  for (std::size_t j = 0; j < d.size(); ++j) a(static_cast<Index>(j), static_cast<Index>(j)) = d[j];
  return a;
}

}  // namespace

TEST_CASE("random_matrix_with_spectrum") {
  const DenseMatrix one = random_matrix_with_spectrum(V{1.0}, 1, 1, 42);
  CHECK(std::abs(std::abs(one(0, 0)) - 1.0) <= 1e-15);

  const DenseMatrix a = random_matrix_with_spectrum(V{3.0, 1.0}, 2, 2, 42);
  const SvdResult s = svd(a);
  CHECK(std::abs(s.singular_values(0) - 3.0) <= 1e-11 * 3.0);
  CHECK(std::abs(s.singular_values(1) - 1.0) <= 1e-11);
  CHECK(a == random_matrix_with_spectrum(V{3.0, 1.0}, 2, 2, 42));
  CHECK(a != random_matrix_with_spectrum(V{3.0, 1.0}, 2, 2, 43));

  const DenseMatrix rect = random_matrix_with_spectrum(V{5.0, 2.0, 0.5}, 6, 4, 9, Field::kReal);
  CHECK((rect.imag().array() == 0.0).all());
  const SvdResult sr = svd(rect);
  CHECK(sr.rank == 3);
  CHECK(std::abs(sr.singular_values(2) - 0.5) <= 1e-11 * 0.5);

  CHECK_THROWS_AS(random_matrix_with_spectrum(V{1, 1, 1}, 2, 3, 1), ValidationError);
  CHECK_THROWS_AS(random_matrix_with_spectrum(V{1}, 0, 3, 1), ValidationError);
}

TEST_CASE("derive_seed is a deterministic scrambler") {
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("config validation") {
  EnsembleConfig c;
  CHECK_NOTHROW(validate_config(c));
  c.m = 0;
  CHECK_THROWS_AS(validate_config(c), ValidationError);
  c = EnsembleConfig{};
  c.r = 7;
  CHECK_THROWS_AS(validate_config(c), ValidationError);
  c = EnsembleConfig{};
  c.trials = 0;
  CHECK_THROWS_AS(validate_config(c), ValidationError);
  c = EnsembleConfig{};
  c.spectrum_lo = 0.0;
  CHECK_THROWS_AS(validate_config(c), ValidationError);
  c = EnsembleConfig{};
  c.threads = 0;
  CHECK_THROWS_AS(run_verification_suite(c), ValidationError);
}

TEST_CASE("a single trial at rank one") {
  EnsembleConfig c;
  c.m = c.n = 1;
  c.r = c.s = 1;
  c.trials = 1;
  const SuiteReport rep = run_verification_suite(c);
  CHECK(rep.trials == 1);
  CHECK(rep.violations.empty());
  CHECK(rep.checks.count("a.q_upper") == 1);
}

TEST_CASE("suite is deterministic and thread-count independent") {
  EnsembleConfig c;
  c.trials = 150;
  c.seed = 77;
  const SuiteReport a = run_verification_suite(c);
  c.threads = 4;
  const SuiteReport b = run_verification_suite(c);
  CHECK(a.violations.empty());
  CHECK(a.normal_trials == b.normal_trials);
  CHECK(a.max_angle_excess == b.max_angle_excess);
  REQUIRE(a.checks.size() == b.checks.size());
  for (const auto& [id, summary] : a.checks) {
    CAPTURE(id);
    CHECK(summary.evaluated == b.checks.at(id).evaluated);
    CHECK(summary.max_ratio == b.checks.at(id).max_ratio);
  }
  for (const char* id : {"a.q_lower", "a.q_upper", "b.h_upper", "b.sqrt2", "c.lee_upper", "d.amgm", "e.cs",
                         "f.araki_yamagami", "h.angle", "g.kittaneh_lower", "g.contraction"})
    CHECK(a.checks.count(id) == 1);
  CHECK(a.normal_trials > 0);
  CHECK(a.max_angle_excess <= 1e-9);

  c.field = Field::kReal;
  c.threads = 1;
  CHECK(run_verification_suite(c).violations.empty());
}

TEST_CASE("witness replay meets the bounds with equality") {
  const SpectrumPair p = validate_spectrum_pair(V{3.0, 1.5}, V{2.5, 2.0, 0.7});
  const std::map<WitnessKind, std::string> ids = {
      {WitnessKind::kQMax, "a.q_upper"},   {WitnessKind::kQMin, "a.q_lower"},
      {WitnessKind::kHMax, "b.h_upper"},   {WitnessKind::kHMin, "b.h_lower"},
      {WitnessKind::kLeeMax, "c.lee_upper"}, {WitnessKind::kLeeMin, "c.lee_lower"}};
  for (const auto& [kind, id] : ids) {
    CAPTURE(id);
    const ExtremalWitness w = make_witness(p, kind);
    const auto checks = by_id(check_pair(w.a, w.a_tilde, p.sigma(), p.sigma_tilde(), kDefaultRankTol, 1e-9));
    for (const auto& [cid, chk] : checks) {
      CAPTURE(cid);
      CHECK_FALSE(chk.violated);
    }
    const Check& c = checks.at(id);
    CHECK(std::abs(c.lhs - c.rhs) <= 1e-8 * std::max(std::abs(c.lhs), std::abs(c.rhs)));
  }
}

TEST_CASE("aligned diagonal pairs attain the AM-GM and Cauchy-Schwarz constants") {
  const V sigma{3.0, 1.0}, sigma_tilde{2.0, 2.0, 0.5};
  const DenseMatrix a = embed_diag(sigma, 3), b = embed_diag(sigma_tilde, 3);
  const auto checks = by_id(check_pair(a, b, sigma, sigma_tilde, kDefaultRankTol, 1e-9));
  for (const char* id : {"d.amgm", "e.cs"}) {
    CAPTURE(id);
    const Check& c = checks.at(id);
    CHECK_FALSE(c.violated);
    CHECK(std::abs(c.lhs - c.rhs) <= 1e-12 * c.rhs);
  }
}

TEST_CASE("angle diagnostics") {
  const DenseMatrix a = random_matrix_with_spectrum(V{2.0, 1.0}, 3, 3, 5);
  const AngleDiagnostics self = angle_diagnostics(a, a);
  CHECK(self.cos_alpha == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(self.cos_beta == doctest::Approx(1.0).epsilon(1e-12));
  const AngleDiagnostics neg = angle_diagnostics(a, -a);
  CHECK(neg.cos_alpha == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(neg.cos_beta == doctest::Approx(1.0).epsilon(1e-12));
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const DenseMatrix x = random_matrix_with_spectrum(V{4.0, 2.0, 1.0}, 3, 3, seed);
    const DenseMatrix y = random_matrix_with_spectrum(V{3.0, 0.5}, 3, 3, seed + 1000);
    const AngleDiagnostics d = angle_diagnostics(x, y);
    CHECK(d.cos_alpha * d.cos_alpha <= d.cos_beta + 1e-12);
    CHECK(std::abs(d.cos_alpha) <= 1.0);
    CHECK(d.cos_beta <= 1.0 + 1e-15);
  }
}
