#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "cli_support.hpp"
#include "polarbound/polarbound.hpp"
#include "table1_data.hpp"

namespace pb = polarbound;
using pb::cli::Json;

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr int kSchemaVersion = 1;

enum Exit : int { kOk = 0, kFailed = 1, kInputRejected = 2, kDegenerate = 3, kBudget = 4, kUsage = 64 };

struct Globals {
  double rank_tol = pb::kDefaultRankTol;
  double slack_tol = 1e-9;
  std::uint64_t budget = pb::kDefaultEnumerationBudget;
  std::uint64_t seed = 1;
  std::uint64_t trials = 1000;
  std::string format = "text";
  std::string out;
};

struct Input {
  std::string name;
  std::string text;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

Json bound_json(const pb::BoundResult& b) {
  Json j;
  j["coefficient"] = b.coefficient;
  if (b.optimal_index) j["optimal_k"] = *b.optimal_index;
  if (b.degenerate) j["degenerate"] = true;
  return j;
}

Json kratio_json(const pb::KRatioBound& kb) {
  Json j = bound_json(kb.bound);
  j["coefficient_squared"] = kb.bound.coefficient * kb.bound.coefficient;
  Json table = Json::array();
  for (const auto& e : kb.table.entries)
    table.push_back({{"k", e.k}, {"numerator", e.numerator}, {"denominator", e.denominator}, {"f", opt(e.value)}});
  j["f"] = table;
  return j;
}

Json not_applicable(const std::string& reason) { return {{"applicable", false}, {"reason", reason}}; }

Json arrangement_json(const pb::Arrangement& m) {
  Json a = Json::array();
  for (const auto& [i, j] : m) a.push_back({i, j});
  return a;
}

Json input_json(const Input& in) { return {{"source", in.name}, {"sha256", pb::cli::sha256_hex(in.text)}}; }

Json rejected_json(const std::vector<pb::cli::RecordError>& errors, const Input& in) {
  Json a = Json::array();
  for (const auto& e : errors) {
    std::cerr << in.name << ":" << e.line << ": " << e.message << "\n";
    a.push_back({{"line", e.line}, {"error", e.message}});
  }
  return a;
}

Input load_input(const std::string& path) { return {path, pb::cli::read_file(path)}; }

void emit(const Globals& g, const std::string& command, Json input, Json body, double wall) {
  Json report;
  report["schema_version"] = kSchemaVersion;
  report["tool"] = {{"name", "polarbound"}, {"version", kToolVersion}};
  report["command"] = command;
  if (!input.is_null()) report["input"] = std::move(input);
  report["body"] = std::move(body);
  report["meta"] = {{"generated_at", utc_now()}, {"wall_seconds", wall}};
  const std::string text = g.format == "structured" ? report.dump(2) + "\n" : pb::cli::render_text(report);
  if (g.out.empty())
    std::cout << text;
  else
    pb::cli::atomic_write(g.out, text);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- bounds

Json kittaneh_json(const pb::cli::SpectraRecord& rec, bool& budget_hit) {
  Json j;
  const pb::EigenPair& eig = *rec.eig;
  j["r"] = eig.r();
  j["s"] = eig.s();
  try {
    const pb::KittanehResult lo = pb::kittaneh_lower_coeff(eig);
    j["lower"] = bound_json(lo.bound);
    j["lower"]["arrangement"] = arrangement_json(lo.arrangement);
    j["lower"]["terms"] = lo.terms;
  } catch (const pb::BudgetExceeded& e) {
    budget_hit = true;
    j["lower"] = {{"budget_exceeded", true}, {"required", e.required()}, {"reason", e.what()}};
  }
  if (!rec.n) {
    j["upper"] = not_applicable("dimension 'n' not given");
  } else if (eig.s() != *rec.n) {
    j["upper"] = not_applicable("requires the longer eigenvalue list to have full rank s = n");
  } else {
    try {
      const pb::KittanehResult up = pb::kittaneh_upper_coeff(eig, *rec.n);
      j["upper"] = bound_json(up.bound);
      j["upper"]["arrangement"] = arrangement_json(up.arrangement);
    } catch (const pb::BudgetExceeded& e) {
      budget_hit = true;
      j["upper"] = {{"budget_exceeded", true}, {"required", e.required()}, {"reason", e.what()}};
    }
  }
  return j;
}

Json record_bounds(const pb::cli::SpectraRecord& rec, bool& budget_hit) {
  const pb::SpectrumPair& p = rec.pair;
  Json j;
  j["id"] = rec.id;
  j["r"] = p.r();
  j["s"] = p.s();
  j["swapped"] = p.swapped();
  Json b;
  b["q_upper"] = kratio_json(pb::q_upper_coeff(p));
  b["q_lower"] = kratio_json(pb::q_lower_coeff(p));
  if (p.r() == p.s()) {
    b["li_sun"] = bound_json(pb::li_sun_coeff(p));
    b["refined_li_sun"] = kratio_json(pb::refined_li_sun_coeff(p));
  } else {
    b["li_sun"] = not_applicable("requires r = s");
    b["refined_li_sun"] = not_applicable("requires r = s");
  }
  b["h_upper"] = bound_json(pb::h_upper_coeff(p));
  b["h_lower"] = bound_json(pb::h_lower_coeff(p));
  b["lee_upper"] = bound_json(pb::lee_upper_coeff(p));
  b["lee_lower"] = bound_json(pb::lee_lower_coeff(p));
  b["amgm"] = bound_json(pb::amgm_coeff(p));
  b["cauchy_schwarz"] = bound_json(pb::cauchy_schwarz_coeff(p));
  j["bounds"] = b;
  if (rec.eig) j["kittaneh"] = kittaneh_json(rec, budget_hit);
  return j;
}

int cmd_bounds(const Globals& g, const Input& in, const std::string& command) {
  const auto t0 = std::chrono::steady_clock::now();
  const pb::cli::SpectraFile file = pb::cli::parse_spectra(in.text);
  bool budget_hit = false;
  Json body;
  Json records = Json::array();
  for (const auto& rec : file.records) records.push_back(record_bounds(rec, budget_hit));
  body["records"] = records;
  body["rejected"] = rejected_json(file.errors, in);
  emit(g, command, input_json(in), body, seconds_since(t0));
  if (!file.errors.empty()) return kInputRejected;
  return budget_hit ? kBudget : kOk;
}

// ---------------------------------------------------------------- oracle

Json point_json(const pb::FEvaluation& ev) {
  Json support = Json::array();
  for (const auto& e : ev.point.support) support.push_back({e.row, e.col, e.sign});
  return {{"f", opt(ev.value)},
          {"k1_minus", ev.point.minus_count()},
          {"k2_plus", ev.point.plus_count()},
          {"support", support}};
}

int cmd_oracle(const Globals& g, const Input& in) {
  constexpr double kTol = 1e-10;
  const auto t0 = std::chrono::steady_clock::now();
  const pb::cli::SpectraFile file = pb::cli::parse_spectra(in.text);
  bool budget_hit = false, all_agree = true;
  Json records = Json::array();
  for (const auto& rec : file.records) {
    const pb::SpectrumPair& p = rec.pair;
    Json j;
    j["id"] = rec.id;
    j["r"] = p.r();
    j["s"] = p.s();
    try {
      const pb::FExtrema fx = pb::brute_force_f_extrema(p, g.budget);
      const double up = std::pow(pb::q_upper_coeff(p).bound.coefficient, 2);
      const double lo = std::pow(pb::q_lower_coeff(p).bound.coefficient, 2);
      const bool max_ok = rel_close(*fx.max.value, up, kTol);
      const bool min_ok = rel_close(*fx.min.value, lo, kTol) || (lo == 0.0 && std::abs(*fx.min.value) <= kTol);
      const bool max_face = fx.face_max && rel_close(*fx.face_max->value, *fx.max.value, kTol);
      const bool min_face = fx.face_min && (rel_close(*fx.face_min->value, *fx.min.value, kTol) ||
                                            std::abs(*fx.face_min->value - *fx.min.value) <= kTol);
      const auto dmax = pb::directional_move_check(p, pb::Extremum::kMax);
      const auto dmin = pb::directional_move_check(p, pb::Extremum::kMin);
      const bool agree = max_ok && min_ok && max_face && min_face && dmax.empty() && dmin.empty();
      all_agree = all_agree && agree;
      j["extreme_points"] = fx.points;
      j["max"] = point_json(fx.max);
      j["max"]["closed_form"] = up;
      j["min"] = point_json(fx.min);
      j["min"]["closed_form"] = lo;
      j["extremum_attained_on_k1_plus_k2_eq_r"] = max_face && min_face;
      j["directional_violations"] = dmax.size() + dmin.size();
      j["agree"] = agree;
    } catch (const pb::BudgetExceeded& e) {
      budget_hit = true;
      j["budget_exceeded"] = true;
      j["required"] = e.required();
      j["budget"] = g.budget;
      std::cerr << in.name << ":" << rec.line << ": " << e.what() << "\n";
    }
    if (rec.eig) {
      Json k;
      try {
        const auto closed = pb::kittaneh_lower_coeff(*rec.eig);
        const auto brute = pb::brute_force_kittaneh(*rec.eig, pb::KittanehMode::kLower);
        const bool ok = rel_close(closed.bound.coefficient, brute.bound.coefficient, kTol);
        all_agree = all_agree && ok;
        k["lower"] = {{"closed_form", closed.bound.coefficient}, {"brute_force", brute.bound.coefficient}, {"agree", ok}};
        if (rec.n && rec.eig->s() == *rec.n) {
          const auto cu = pb::kittaneh_upper_coeff(*rec.eig, *rec.n);
          const auto bu = pb::brute_force_kittaneh(*rec.eig, pb::KittanehMode::kUpper, *rec.n);
          const bool uok = rel_close(cu.bound.coefficient, bu.bound.coefficient, kTol);
          all_agree = all_agree && uok;
          k["upper"] = {{"closed_form", cu.bound.coefficient}, {"brute_force", bu.bound.coefficient}, {"agree", uok}};
        }
      } catch (const pb::BudgetExceeded& e) {
        budget_hit = true;
        k["budget_exceeded"] = true;
        k["required"] = e.required();
      }
      j["kittaneh"] = k;
    }
    records.push_back(j);
  }
  Json body;
  body["tolerance"] = kTol;
  body["records"] = records;
  body["rejected"] = rejected_json(file.errors, in);
  body["all_agree"] = all_agree;
  emit(g, "oracle", input_json(in), body, seconds_since(t0));
  if (!file.errors.empty()) return kInputRejected;
  if (budget_hit) return kBudget;
  return all_agree ? kOk : kFailed;
}

// ---------------------------------------------------------------- witness

int cmd_witness(const Globals& g, const Input& in, const std::string& record_id, const std::string& bound,
                const std::string& dir) {
  const auto t0 = std::chrono::steady_clock::now();
  const pb::cli::SpectraFile file = pb::cli::parse_spectra(in.text);
  const pb::cli::SpectraRecord* rec = nullptr;
  for (const auto& r : file.records)
    if (r.id == record_id) rec = &r;
  if (!rec) {
    for (const auto& e : file.errors) std::cerr << in.name << ":" << e.line << ": " << e.message << "\n";
    std::cerr << in.name << ": no valid record with id '" << record_id << "'\n";
    return kInputRejected;
  }
  const pb::WitnessKind kind = *pb::parse_witness_kind(bound);

  pb::ExtremalWitness w;
  try {
    w = pb::make_witness(rec->pair, kind);
  } catch (const pb::DegenerateSupremum& e) {
    std::cerr << "witness '" << bound << "' for record '" << record_id << "': " << e.what() << "\n";
    return kDegenerate;
  }

  std::filesystem::create_directories(dir);
  const std::string stem = (std::filesystem::path(dir) / (rec->id + "." + bound)).string();
  const std::pair<const char*, const pb::DenseMatrix*> mats[] = {
      {"A", &w.a}, {"A_tilde", &w.a_tilde}, {"S", &w.couple.s}, {"T", &w.couple.t}};
  Json files;
  for (const auto& [name, m] : mats) {
    const std::string path = stem + "." + name + ".mat";
    pb::cli::atomic_write(path, pb::cli::format_matrix(*m));
    files[name] = path;
  }

  // Reload from disk and verify the round-tripped matrices from scratch.
  pb::ExtremalWitness reloaded = w;
  reloaded.a = pb::cli::parse_matrix(pb::cli::read_file(stem + ".A.mat"));
  reloaded.a_tilde = pb::cli::parse_matrix(pb::cli::read_file(stem + ".A_tilde.mat"));
  reloaded.couple.s = pb::cli::parse_matrix(pb::cli::read_file(stem + ".S.mat"));
  reloaded.couple.t = pb::cli::parse_matrix(pb::cli::read_file(stem + ".T.mat"));
  const pb::WitnessDiagnostics d = pb::verify_witness(reloaded, g.rank_tol);

  Json body;
  body["id"] = rec->id;
  body["bound"] = bound;
  body["theorem"] = std::string(pb::to_string(pb::target_theorem(kind)));
  body["r"] = rec->pair.r();
  body["s"] = rec->pair.s();
  body["swapped"] = rec->pair.swapped();
  body["dims"] = {w.rows, w.cols};
  if (w.k) body["k"] = *w.k;
  body["target"] = w.target;
  body["diagnostics"] = {{"M", d.m},
                         {"N", d.n},
                         {"E_norm", d.e_norm},
                         {"factor_gap_norm", d.factor_gap_norm},
                         {"achieved_ratio", d.achieved_ratio},
                         {"achieved_ratio_squared", d.achieved_ratio * d.achieved_ratio}};
  body["real_entries"] = (w.a.array().imag() == 0.0).all() && (w.couple.t.array().imag() == 0.0).all();
  body["files"] = files;
  body["reload_verified"] = true;
  emit(g, "witness", input_json(in), body, seconds_since(t0));
  return kOk;
}

// ---------------------------------------------------------------- verify

std::pair<pb::Index, pb::Index> parse_dims(const std::string& text) {
  const auto x = text.find('x');
  auto one = [&](const std::string& s) {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || v < 1 || v > 64) throw UsageError("--dims: expected N or MxN with 1 <= N <= 64, got '" + text + "'");
    return static_cast<pb::Index>(v);
  };
  if (x == std::string::npos) {
    const auto n = one(text);
    return {n, n};
  }
  return {one(text.substr(0, x)), one(text.substr(x + 1))};
}

int cmd_verify(const Globals& g, const std::string& dims, const std::string& field, unsigned threads) {
  const auto t0 = std::chrono::steady_clock::now();
  pb::EnsembleConfig cfg;
  std::tie(cfg.m, cfg.n) = parse_dims(dims);
  cfg.trials = g.trials;
  cfg.seed = g.seed;
  cfg.field = field == "real" ? pb::Field::kReal : pb::Field::kComplex;
  cfg.rank_tol = g.rank_tol;
  cfg.slack_tol = g.slack_tol;
  cfg.threads = threads;
  try {
    pb::validate_config(cfg);
  } catch (const pb::ValidationError& e) {
    throw UsageError(e.what());
  }
  const pb::SuiteReport rep = pb::run_verification_suite(cfg);

  Json body;
  body["config"] = {{"m", cfg.m},
                    {"n", cfg.n},
                    {"ranks", "mixed"},
                    {"spectrum_law", {{"log_uniform", {cfg.spectrum_lo, cfg.spectrum_hi}}}},
                    {"trials", cfg.trials},
                    {"seed", cfg.seed},
                    {"field", std::string(pb::to_string(cfg.field))},
                    {"rank_tol", cfg.rank_tol},
                    {"slack_tol", cfg.slack_tol},
                    {"normal_dim", std::min<std::size_t>(static_cast<std::size_t>(cfg.n), cfg.normal_dim_cap)}};
  body["trials"] = rep.trials;
  body["normal_trials"] = rep.normal_trials;
  Json checks;
  for (const auto& [id, s] : rep.checks) checks[id] = {{"evaluated", s.evaluated}, {"max_ratio", s.max_ratio}};
  body["checks"] = checks;
  body["max_cos2_alpha_minus_cos_beta"] = rep.max_angle_excess;
  body["violation_count"] = rep.violations.size();
  Json v = Json::array();
  for (std::size_t i = 0; i < std::min<std::size_t>(rep.violations.size(), 100); ++i) {
    const auto& x = rep.violations[i];
    v.push_back({{"trial", x.trial}, {"seed", x.seed}, {"id", x.id}, {"lhs", x.lhs}, {"rhs", x.rhs}, {"margin", x.margin}});
  }
  body["violations"] = v;
  emit(g, "verify", nullptr, body, seconds_since(t0));
  return rep.violations.empty() ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perturbation coefficients for subunitary and positive polar factors"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--rank-tol", g.rank_tol, "Relative rank threshold")->check(CLI::PositiveNumber);
  app.add_option("--slack-tol", g.slack_tol, "Relative slack before a Monte-Carlo check counts as violated")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--budget", g.budget, "Maximum extreme points the oracle may enumerate");
  app.add_option("--seed", g.seed, "Monte-Carlo seed");
  app.add_option("--trials", g.trials, "Monte-Carlo trial count")->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"text", "structured"}));
  app.add_option("--out", g.out, "Write the report here (atomically) instead of stdout");

  std::string input_path;
  auto* bounds = app.add_subcommand("bounds", "All applicable coefficients for each record of a spectra file");
  bounds->add_option("input", input_path, "Spectra file (JSON Lines)")->required();

  app.add_subcommand("table1", "bounds on the bundled reference spectra (data/table1.jsonl)");

  auto* oracle = app.add_subcommand("oracle", "Brute-force extreme-point check of the closed forms");
  oracle->add_option("input", input_path, "Spectra file (JSON Lines)")->required();

  std::string record_id, bound, dir = ".";
  auto* witness = app.add_subcommand("witness", "Write an attaining pair (A, A~) and verify it after reload");
  witness->add_option("input", input_path, "Spectra file (JSON Lines)")->required();
  witness->add_option("--record", record_id, "Record id")->required();
  witness->add_option("--bound", bound, "Which bound to attain")
      ->required()
      ->check(CLI::IsMember({"q-max", "q-min", "h-max", "h-min", "lee-max", "lee-min"}));
  witness->add_option("--dir", dir, "Directory for the matrix files");

  std::string dims = "6", field = "complex";
  unsigned threads = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  auto* verify = app.add_subcommand("verify", "Seeded Monte-Carlo falsification suite");
  verify->add_option("--dims", dims, "N or MxN");
  verify->add_option("--field", field, "Scalar field")->check(CLI::IsMember({"complex", "real"}));
  verify->add_option("--threads", threads, "Worker threads (results do not depend on this)")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (bounds->parsed()) return cmd_bounds(g, load_input(input_path), "bounds");
    if (app.got_subcommand("table1"))
      return cmd_bounds(g, Input{"bundled:table1.jsonl", std::string(kTable1Jsonl)}, "table1");
    if (oracle->parsed()) return cmd_oracle(g, load_input(input_path));
    if (witness->parsed()) return cmd_witness(g, load_input(input_path), record_id, bound, dir);
    if (verify->parsed()) return cmd_verify(g, dims, field, threads);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const pb::cli::InputError& e) {
    std::cerr << e.what() << "\n";
    return kInputRejected;
  } catch (const pb::VerificationFailure& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return kFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}
