#include "polarbound/linalg.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "polarbound/errors.hpp"

namespace polarbound {

namespace {

// Phase that makes the largest-magnitude entry of `col` real positive.
Complex normalizing_phase(const Eigen::Ref<const Eigen::VectorXcd>& col) {
  Index best = 0;
  double best_abs = -1.0;
  for (Index i = 0; i < col.size(); ++i) {
    const double a = std::abs(col(i));
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  if (best_abs <= 0.0) return Complex(1.0, 0.0);
  return std::conj(col(best)) / best_abs;
}

std::string dims(const DenseMatrix& a) {
  std::ostringstream os;
  os << a.rows() << "x" << a.cols();
  return os.str();
}

// Orthogonalize `v` against the columns of `basis` (first `count` columns),
// two passes of classical Gram-Schmidt.
void project_out(Eigen::VectorXcd& v, const DenseMatrix& basis, Index count) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Index k = 0; k < count; ++k) {
      const Complex c = basis.col(k).dot(v);
      v -= c * basis.col(k);
    }
  }
}

}  // namespace

bool all_finite(const DenseMatrix& a) {
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag()))
        return false;
  return true;
}

double unitarity_defect(const DenseMatrix& u) {
  return (u.adjoint() * u - DenseMatrix::Identity(u.cols(), u.cols())).norm();
}

Complex frobenius_inner(const DenseMatrix& a, const DenseMatrix& b) {
  return (b.array().conjugate() * a.array()).sum();
}

SvdResult svd(const DenseMatrix& a, double rank_tol) {
  if (a.rows() < 1 || a.cols() < 1)
    throw ValidationError("svd: empty matrix " + dims(a));
  if (!all_finite(a)) throw ValidationError("svd: non-finite entry in " + dims(a));
  if (!(rank_tol > 0.0)) throw ValidationError("svd: rank_tol must be positive");

  Eigen::JacobiSVD<DenseMatrix> jacobi(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (jacobi.info() != Eigen::Success) {
    throw SvdFailure("svd: Jacobi sweeps did not converge for " + dims(a) +
                     " input with ||A||_F = " + std::to_string(a.norm()));
  }

  SvdResult out;
  out.u = jacobi.matrixU();
  out.v = jacobi.matrixV();
  out.singular_values = jacobi.singularValues();

  const Index p = out.singular_values.size();
  for (Index j = 0; j < p; ++j) {
    const Complex phase = normalizing_phase(out.u.col(j));
    out.u.col(j) *= phase;
    out.v.col(j) *= phase;
  }
  for (Index j = p; j < out.u.cols(); ++j) out.u.col(j) *= normalizing_phase(out.u.col(j));
  for (Index j = p; j < out.v.cols(); ++j) out.v.col(j) *= normalizing_phase(out.v.col(j));

  const double top = p > 0 ? out.singular_values(0) : 0.0;
  for (Index j = 0; j < p; ++j)
    if (out.singular_values(j) > rank_tol * top) ++out.rank;

  // Post-conditions; a failure here means the backend returned garbage.
  const double scale = a.norm();
  const double ud = unitarity_defect(out.u);
  const double vd = unitarity_defect(out.v);
  DenseMatrix sigma = DenseMatrix::Zero(a.rows(), a.cols());
  for (Index j = 0; j < p; ++j) sigma(j, j) = out.singular_values(j);
  const double residual = (a - out.u * sigma * out.v.adjoint()).norm();
  if (ud > 1e-12 * a.rows() || vd > 1e-12 * a.cols() || residual > 1e-10 * scale) {
    std::ostringstream os;
    os << "svd: post-check failed for " << dims(a) << " (||U*U-I||=" << ud
       << ", ||V*V-I||=" << vd << ", residual=" << residual << ")";
    throw SvdFailure(os.str());
  }
  return out;
}

PolarFactors polar_decompose(const DenseMatrix& a, double rank_tol) {
  const SvdResult s = svd(a, rank_tol);
  PolarFactors f;
  f.rank = s.rank;
  f.degenerate = s.rank == 0;
  if (f.degenerate) {
    f.q = DenseMatrix::Zero(a.rows(), a.cols());
    f.h = DenseMatrix::Zero(a.cols(), a.cols());
    return f;
  }
  const auto u1 = s.u.leftCols(s.rank);
  const auto v1 = s.v.leftCols(s.rank);
  f.q = u1 * v1.adjoint();
  const DenseMatrix h = v1 * s.singular_values.head(s.rank).asDiagonal() * v1.adjoint();
  f.h = 0.5 * (h + h.adjoint());
  return f;
}

DenseMatrix unitary_completion(const DenseMatrix& partial, std::optional<RowBand> zero_rows) {
  const Index n = partial.rows();
  const Index r = partial.cols();
  if (n < 1 || r > n) throw ValidationError("unitary_completion: need 1 <= r <= n, got " + dims(partial));
  if (!all_finite(partial)) throw ValidationError("unitary_completion: non-finite entry");
  if (zero_rows && (zero_rows->begin < 0 || zero_rows->end > n || zero_rows->begin > zero_rows->end))
    throw ValidationError("unitary_completion: zero-row band out of range");

  constexpr double kOrthTol = 1e-10;
  constexpr double kSkipTol = 1e-8;
  for (Index j = 0; j < r; ++j) {
    if (partial.col(j).norm() > 1.0 + kOrthTol)
      throw ValidationError("unitary_completion: column norm exceeds 1", j);
    if (zero_rows && partial.col(j).segment(zero_rows->begin, zero_rows->end - zero_rows->begin).norm() != 0.0)
      throw ValidationError("unitary_completion: column has mass inside the zero-row band", j);
    for (Index k = 0; k < j; ++k)
      if (std::abs(partial.col(k).dot(partial.col(j))) > kOrthTol)
        throw ValidationError("unitary_completion: columns are not orthogonal", j);
  }

  DenseMatrix out = DenseMatrix::Zero(n, n);
  out.leftCols(r) = partial;

  // Phase 1: top up short columns using free rows only. `fixed` holds an
  // orthonormal basis of everything placed so far.
  DenseMatrix fixed(n, 2 * r);
  Index fixed_count = 0;
  for (Index j = 0; j < r; ++j) {
    const double nrm = partial.col(j).norm();
    if (nrm > 0.0) fixed.col(fixed_count++) = partial.col(j) / nrm;
  }
  Index cursor = 0;
  for (Index j = 0; j < r; ++j) {
    const double deficit = 1.0 - partial.col(j).squaredNorm();
    if (deficit <= 1e-14) continue;
    bool placed = false;
    while (cursor < n && !placed) {
      const Index row = cursor++;
      if (zero_rows && zero_rows->contains(row)) continue;
      Eigen::VectorXcd v = Eigen::VectorXcd::Unit(n, row);
      project_out(v, fixed, fixed_count);
      const double vn = v.norm();
      if (vn < kSkipTol) continue;
      v /= vn;
      fixed.col(fixed_count++) = v;
      out.col(j) += std::sqrt(deficit) * v;
      placed = true;
    }
    if (!placed) {
      std::ostringstream os;
      os << "unitary_completion: no free row left to restore the norm of column " << j
         << " (n=" << n << ", r=" << r << ")";
      throw CompletionInfeasible(os.str());
    }
  }

  // Phase 2: remaining columns from e_0, e_1, ... against the first r.
  Index filled = r;
  for (Index row = 0; row < n && filled < n; ++row) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Unit(n, row);
    project_out(v, out, filled);
    const double vn = v.norm();
    if (vn < kSkipTol) continue;
    out.col(filled++) = v / vn;
  }
  if (filled < n) throw CompletionInfeasible("unitary_completion: basis exhausted");

  if (unitarity_defect(out) > 1e-12 * n)
    throw CompletionInfeasible("unitary_completion: result is not unitary to 1e-12*n");
  return out;
}

namespace {

DenseMatrix haar_from_gaussian(const DenseMatrix& z) {
  Eigen::HouseholderQR<DenseMatrix> qr(z);
  DenseMatrix q = qr.householderQ();
  const DenseMatrix& r = qr.matrixQR();
  for (Index j = 0; j < z.cols(); ++j) {
    const Complex d = r(j, j);
    const double ad = std::abs(d);
    if (ad > 0.0) q.col(j) *= d / ad;
  }
  return q;
}

}  // namespace

DenseMatrix haar_random_unitary(Index n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("haar_random_unitary: n must be >= 1");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(2.0);
  DenseMatrix z(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) {
      const double re = normal(gen);
      const double im = normal(gen);
      z(i, j) = Complex(scale * re, scale * im);
    }
  return haar_from_gaussian(z);
}

DenseMatrix haar_random_orthogonal(Index n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("haar_random_orthogonal: n must be >= 1");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseMatrix z(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) z(i, j) = Complex(normal(gen), 0.0);
  DenseMatrix q = haar_from_gaussian(z);
  // Householder on a real input stays real up to signed zeros.
  return q.real().cast<Complex>();
}

}  // namespace polarbound
