#include "polarbound/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "polarbound/bounds.hpp"
#include "polarbound/errors.hpp"

namespace polarbound {

namespace {

Index as_index(std::size_t v) { return static_cast<Index>(v); }

DenseMatrix embedded_tilde(const SpectrumPair& pair, Index dim) {
  DenseMatrix a = DenseMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i < pair.s(); ++i) a(as_index(i), as_index(i)) = pair.sigma_tilde()[i];
  return a;
}

// Completes the given first-r-column blocks and assembles the witness.
ExtremalWitness assemble(const SpectrumPair& pair, WitnessKind kind, double target, const DenseMatrix& s_cols,
                         const DenseMatrix& t_cols, RowBand s_band, RowBand t_band) {
  const Index r = as_index(pair.r());
  const Index dim = as_index(pair.s() + pair.r());
  ExtremalWitness w;
  w.kind = kind;
  w.pair = pair;
  w.target = target;
  w.rows = dim;
  w.cols = dim;
  w.couple.s = unitary_completion(s_cols, s_band);
  w.couple.t = unitary_completion(t_cols, t_band);
  RealVector sigma(r);
  for (Index j = 0; j < r; ++j) sigma(j) = pair.sigma()[static_cast<std::size_t>(j)];
  w.a = w.couple.s.leftCols(r) * sigma.cast<Complex>().asDiagonal() * w.couple.t.leftCols(r).adjoint();
  w.a_tilde = embedded_tilde(pair, dim);
  w.diagnostics = verify_witness(w);
  return w;
}

bool close(double a, double b, double rel, double abs_floor) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs_floor;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string_view to_string(WitnessKind kind) {
  switch (kind) {
    case WitnessKind::kQMax: return "q-max";
    case WitnessKind::kQMin: return "q-min";
    case WitnessKind::kHMax: return "h-max";
    case WitnessKind::kHMin: return "h-min";
    case WitnessKind::kLeeMax: return "lee-max";
    case WitnessKind::kLeeMin: return "lee-min";
  }
  return "?";
}

std::optional<WitnessKind> parse_witness_kind(std::string_view text) {
  for (WitnessKind k : {WitnessKind::kQMax, WitnessKind::kQMin, WitnessKind::kHMax, WitnessKind::kHMin,
                        WitnessKind::kLeeMax, WitnessKind::kLeeMin})
    if (to_string(k) == text) return k;
  return std::nullopt;
}

TheoremId target_theorem(WitnessKind kind) {
  switch (kind) {
    case WitnessKind::kQMax: return TheoremId::kQUpper;
    case WitnessKind::kQMin: return TheoremId::kQLower;
    case WitnessKind::kHMax: return TheoremId::kHUpper;
    case WitnessKind::kHMin: return TheoremId::kHLower;
    case WitnessKind::kLeeMax: return TheoremId::kLeeUpper;
    case WitnessKind::kLeeMin: return TheoremId::kLeeLower;
  }
  return TheoremId::kQUpper;
}

ExtremalWitness q_witness(const SpectrumPair& pair, Extremum which) {
  const bool is_max = which == Extremum::kMax;
  const KRatioBound kb = is_max ? q_upper_coeff(pair) : q_lower_coeff(pair);
  const auto k_opt = is_max ? kb.table.argmax : kb.table.argmin;
  if (!k_opt) throw DegenerateSupremum("q_witness: every f(k) is 0/0");
  const std::size_t k = *k_opt;
  const Index r = as_index(pair.r()), s = as_index(pair.s()), dim = r + s;

  // Max: identity on the leading r-k columns, reversal (sign +1 in S, -1 in T)
  // on the trailing k columns against the last k rows of the s-block.
  // Min: -I_k / +I_k on the leading k columns, reversal on the trailing r-k.
  const Index lead = is_max ? r - as_index(k) : as_index(k);
  const Index tail = r - lead;
  DenseMatrix sc = DenseMatrix::Zero(dim, r), tc = DenseMatrix::Zero(dim, r);
  for (Index j = 0; j < lead; ++j) {
    sc(j, j) = 1.0;
    tc(j, j) = is_max ? 1.0 : -1.0;
  }
  for (Index t = 0; t < tail; ++t) {
    sc(s - 1 - t, lead + t) = 1.0;
    tc(s - 1 - t, lead + t) = is_max ? -1.0 : 1.0;
  }
  const RowBand band{lead, s - tail};
  ExtremalWitness w = assemble(pair, is_max ? WitnessKind::kQMax : WitnessKind::kQMin, kb.bound.coefficient, sc,
                               tc, band, band);
  w.k = k;
  return w;
}

ExtremalWitness h_witness(const SpectrumPair& pair, Extremum which) {
  const Index r = as_index(pair.r()), s = as_index(pair.s()), dim = r + s;
  const RowBand band{r, s};
  DenseMatrix sc = DenseMatrix::Zero(dim, r), tc = DenseMatrix::Zero(dim, r);
  if (which == Extremum::kMin) {
    for (Index j = 0; j < r; ++j) {
      sc(j, j) = -1.0;
      tc(j, j) = 1.0;
    }
    return assemble(pair, WitnessKind::kHMin, h_lower_coeff(pair).coefficient, sc, tc, band, band);
  }
  const FGScalars fg = fg_scalars(pair);
  if (fg.gap <= 1e-12 * fg.f)
    throw DegenerateSupremum("h-max: F = 2G (identical spectra); the constant sqrt(2) is approached as the "
                             "c*I block tends to I but is not attained");
  const double root = std::sqrt(fg.f * fg.gap);
  const double c = fg.f / (fg.f + root);
  const double one_minus_c = root / (fg.f + root);
  const double tail = std::sqrt(one_minus_c * (1.0 + c));
  for (Index j = 0; j < r; ++j) {
    sc(j, j) = 1.0;
    tc(j, j) = c;
    tc(s + j, j) = tail;
  }
  return assemble(pair, WitnessKind::kHMax, h_upper_coeff(pair).coefficient, sc, tc, band, band);
}

ExtremalWitness lee_witness(const SpectrumPair& pair, Extremum which) {
  const Index r = as_index(pair.r()), s = as_index(pair.s()), dim = r + s;
  const RowBand band{r, s};
  DenseMatrix sc = DenseMatrix::Zero(dim, r), tc = DenseMatrix::Zero(dim, r);
  if (which == Extremum::kMin) {
    for (Index j = 0; j < r; ++j) {
      sc(j, j) = -1.0;
      tc(j, j) = 1.0;
    }
    return assemble(pair, WitnessKind::kLeeMin, lee_lower_coeff(pair).coefficient, sc, tc, band, band);
  }
  const FGScalars fg = fg_scalars(pair);
  const double root = std::sqrt(fg.f * (fg.f + 2.0 * fg.g));
  const double c = fg.f / (fg.f + root);
  const double tail = std::sqrt((1.0 - c) * (1.0 + c));
  for (Index j = 0; j < r; ++j) {
    sc(j, j) = 1.0;
    tc(j, j) = c;
    tc(s + j, j) = tail;
  }
  return assemble(pair, WitnessKind::kLeeMax, lee_upper_coeff(pair).coefficient, sc, tc, band, band);
}

ExtremalWitness make_witness(const SpectrumPair& pair, WitnessKind kind) {
  switch (kind) {
    case WitnessKind::kQMax: return q_witness(pair, Extremum::kMax);
    case WitnessKind::kQMin: return q_witness(pair, Extremum::kMin);
    case WitnessKind::kHMax: return h_witness(pair, Extremum::kMax);
    case WitnessKind::kHMin: return h_witness(pair, Extremum::kMin);
    case WitnessKind::kLeeMax: return lee_witness(pair, Extremum::kMax);
    case WitnessKind::kLeeMin: return lee_witness(pair, Extremum::kMin);
  }
  throw std::logic_error("make_witness: unknown kind");
}

double measured_ratio(WitnessKind kind, const DenseMatrix& a, const DenseMatrix& a_tilde, double rank_tol) {
  const PolarFactors p = polar_decompose(a, rank_tol);
  const PolarFactors pt = polar_decompose(a_tilde, rank_tol);
  switch (kind) {
    case WitnessKind::kQMax:
    case WitnessKind::kQMin: return (p.q - pt.q).norm() / (a - a_tilde).norm();
    case WitnessKind::kHMax:
    case WitnessKind::kHMin: return (p.h - pt.h).norm() / (a - a_tilde).norm();
    case WitnessKind::kLeeMax:
    case WitnessKind::kLeeMin: return (a + a_tilde).norm() / (p.h + pt.h).norm();
  }
  throw std::logic_error("measured_ratio: unknown kind");
}

WitnessDiagnostics verify_witness(const ExtremalWitness& w, double rank_tol) {
  const auto fail = [&](const std::string& what) {
    throw VerificationFailure(std::string(to_string(w.kind)) + " witness: " + what);
  };
  if (!all_finite(w.a) || !all_finite(w.a_tilde) || !all_finite(w.couple.s) || !all_finite(w.couple.t))
    fail("non-finite entry");
  const std::size_t r = w.pair.r(), s = w.pair.s();
  const Index m = w.couple.s.rows(), n = w.couple.t.rows();
  if (unitarity_defect(w.couple.s) > 1e-12 * static_cast<double>(m)) fail("S is not unitary");
  if (unitarity_defect(w.couple.t) > 1e-12 * static_cast<double>(n)) fail("T is not unitary");
  if (as_index(s) > std::min(m, n)) fail("couple too small for the spectra");

  CompensatedSum msum, nsum;
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      const double w_ij = w.pair.sigma_tilde()[i] * w.pair.sigma()[j];
      const Complex sij = w.couple.s(as_index(i), as_index(j)), tij = w.couple.t(as_index(i), as_index(j));
      msum.add_product(w_ij, (sij * std::conj(tij)).real());
      nsum.add_product(w_ij, std::norm(tij));
    }
  const FGScalars fg = fg_scalars(w.pair);
  WitnessDiagnostics d;
  d.m = msum.value();
  d.n = nsum.value();

  const double slack = 1e-12 * fg.f;
  if (d.n < -slack || d.n > fg.g + slack) fail("N outside [0, G]");
  if (std::abs(d.m) > std::sqrt(fg.g * std::max(d.n, 0.0)) + slack) fail("|M| > sqrt(GN)");

  const PolarFactors p = polar_decompose(w.a, rank_tol);
  const PolarFactors pt = polar_decompose(w.a_tilde, rank_tol);
  if (p.rank != as_index(r)) fail("rank(A) = " + std::to_string(p.rank) + ", expected " + std::to_string(r));
  if (pt.rank != as_index(s)) fail("rank(A~) = " + std::to_string(pt.rank) + ", expected " + std::to_string(s));

  struct Identity {
    const char* name;
    double direct;
    double scalar;
  };
  const double floor = 1e-14 * fg.f;
  const Identity ids[] = {
      {"||A - A~||^2 = F - 2M", (w.a - w.a_tilde).squaredNorm(), fg.f - 2.0 * d.m},
      {"||H - H~||^2 = F - 2N", (p.h - pt.h).squaredNorm(), fg.f - 2.0 * d.n},
      {"||A + A~||^2 = F + 2M", (w.a + w.a_tilde).squaredNorm(), fg.f + 2.0 * d.m},
      {"||H + H~||^2 = F + 2N", (p.h + pt.h).squaredNorm(), fg.f + 2.0 * d.n},
  };
  for (const Identity& id : ids)
    if (!close(id.direct, id.scalar, 1e-10, floor))
      fail(std::string(id.name) + " mismatch: " + fmt(id.direct) + " vs " + fmt(id.scalar));

  d.e_norm = (w.a - w.a_tilde).norm();
  switch (w.kind) {
    case WitnessKind::kQMax:
    case WitnessKind::kQMin: d.factor_gap_norm = (p.q - pt.q).norm(); break;
    case WitnessKind::kHMax:
    case WitnessKind::kHMin: d.factor_gap_norm = (p.h - pt.h).norm(); break;
    case WitnessKind::kLeeMax:
    case WitnessKind::kLeeMin: d.factor_gap_norm = (p.h + pt.h).norm(); break;
  }
  d.achieved_ratio = measured_ratio(w.kind, w.a, w.a_tilde, rank_tol);
  if (!close(d.achieved_ratio, w.target, 1e-8, 1e-14))
    fail("achieved ratio " + fmt(d.achieved_ratio) + " != target " + fmt(w.target));
  return d;
}

}  // namespace polarbound
