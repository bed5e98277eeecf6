#pragma once

// Explicit pairs (A, A~) on which the sharp coefficients are attained.
// Convention: U~ = V~ = I, so S = U and T = V, A = S Sigma T^* and A~ is
// diag(sigma~) embedded in an (s + r) x (s + r) zero matrix.

#include <optional>
#include <string_view>

#include "polarbound/linalg.hpp"
#include "polarbound/spectra.hpp"

namespace polarbound {

enum class WitnessKind { kQMax, kQMin, kHMax, kHMin, kLeeMax, kLeeMin };

std::string_view to_string(WitnessKind kind);
/// Accepts "q-max", "q-min", "h-max", "h-min", "lee-max", "lee-min".
std::optional<WitnessKind> parse_witness_kind(std::string_view text);
TheoremId target_theorem(WitnessKind kind);

struct UnitaryCouple {
  DenseMatrix s;  // m x m
  DenseMatrix t;  // n x n
};

struct WitnessDiagnostics {
  double m = 0.0;  // sum_{i<=s, j<=r} sigma~_i sigma_j Re(s_ij conj t_ij)
  double n = 0.0;  // sum_{i<=s, j<=r} sigma~_i sigma_j |t_ij|^2
  double e_norm = 0.0;
  double factor_gap_norm = 0.0;
  double achieved_ratio = 0.0;
};

struct ExtremalWitness {
  WitnessKind kind = WitnessKind::kQMax;
  SpectrumPair pair;
  DenseMatrix a;
  DenseMatrix a_tilde;
  UnitaryCouple couple;
  double target = 0.0;
  std::optional<std::size_t> k;  // optimizing k for the q witnesses
  WitnessDiagnostics diagnostics;
  Index rows = 0;
  Index cols = 0;
};

/// Both q witnesses: the +-reversal blocks at the optimizing k.
ExtremalWitness q_witness(const SpectrumPair& pair, Extremum which);
/// Throws DegenerateSupremum for `kMax` when F = 2G.
ExtremalWitness h_witness(const SpectrumPair& pair, Extremum which);
ExtremalWitness lee_witness(const SpectrumPair& pair, Extremum which);

ExtremalWitness make_witness(const SpectrumPair& pair, WitnessKind kind);

/// The ratio a witness of `kind` is meant to realize, measured on (A, A~)
/// with polar factors recomputed from scratch:
///   q:   ||Q - Q~|| / ||A - A~||
///   h:   ||H - H~|| / ||A - A~||
///   lee: ||A + A~|| / ||H + H~||
double measured_ratio(WitnessKind kind, const DenseMatrix& a, const DenseMatrix& a_tilde,
                      double rank_tol = kDefaultRankTol);

/// Recomputes ||A -+ A~||^2 and ||H -+ H~||^2 from the matrices and from
/// F -+ 2M, F -+ 2N (agreement 1e-10 relative), checks 0 <= N <= G,
/// |M| <= sqrt(GN), both ranks, and the achieved ratio against the target
/// (1e-8 relative). Throws VerificationFailure naming the first failed check.
WitnessDiagnostics verify_witness(const ExtremalWitness& w, double rank_tol = kDefaultRankTol);

}  // namespace polarbound
