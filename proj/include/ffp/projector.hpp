#pragma once

#include "ffp/common.hpp"
#include "ffp/operators.hpp"
#include "ffp/region.hpp"

#include <memory>
#include <utility>

namespace ffp {

// Orthogonal projector on H_Λ.  `kernel` optionally carries an orthonormal
// basis of ker(mat); builders that know the kernel cheaply (span complements,
// windowwise meets) fill it in so verification never needs a fresh
// eigendecomposition.  Members are immutable after construction.
struct Projector {
  Matrix mat;
  Region region;
  int site_dim = 0;
  std::shared_ptr<const Matrix> kernel;

  Eigen::Index dim() const { return mat.rows(); }

  Eigen::Index rank() const {
    double t = mat.trace().real();
    auto r = static_cast<Eigen::Index>(std::llround(t));
    if (std::abs(t - static_cast<double>(r)) > 0.1)
      throw std::runtime_error("Projector::rank: trace is not near an integer");
    return r;
  }

  Eigen::Index corank() const { return dim() - rank(); }
};

struct ProjectorResiduals {
  double hermiticity;
  double idempotency;
};

inline ProjectorResiduals projector_residuals(const Projector& p) {
  return {op_norm(Matrix(p.mat - p.mat.adjoint())), op_norm(Matrix(p.mat * p.mat - p.mat))};
}

inline Projector zero_projector(Region r, int site_dim) {
  std::size_t d = hilbert_dim(site_dim, r.size());
  return {Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)),
          std::move(r), site_dim, nullptr};
}

inline Projector identity_projector(Region r, int site_dim) {
  std::size_t d = hilbert_dim(site_dim, r.size());
  Projector p{Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)),
              std::move(r), site_dim, nullptr};
  p.kernel = std::make_shared<const Matrix>(Matrix::Zero(p.dim(), 0));
  return p;
}

inline Projector complement(const Projector& p) {
  return {Matrix::Identity(p.dim(), p.dim()) - p.mat, p.region, p.site_dim, nullptr};
}

// Uniform shifts keep the lexicographic site order, so the matrix and any
// stored kernel basis carry over unchanged.
inline Projector translate(const Projector& p, const Site& g) {
  return {p.mat, translate(p.region, g), p.site_dim, p.kernel};
}

// Orthonormal basis of ker(p); uses the stored basis when present.
inline Matrix kernel_basis(const Projector& p) {
  if (p.kernel) return *p.kernel;
  Eigh es = eigh(p.mat);
  Eigen::Index k = 0;
  while (k < es.values.size() && es.values[k] < 0.5) ++k;
  return es.vectors.leftCols(k);
}

inline Matrix range_basis(const Projector& p) {
  Eigh es = eigh(p.mat);
  Eigen::Index k = 0;
  while (k < es.values.size() && es.values[k] < 0.5) ++k;
  return es.vectors.rightCols(es.values.size() - k);
}

struct SpanResult {
  Projector proj;   // projector onto the column span
  Matrix basis;     // orthonormal basis of that span
};

// Projector onto the column span of `columns` (dim × k, any k ≥ 0).
inline SpanResult span_projector(const Matrix& columns, Region r, int site_dim) {
  std::size_t d = hilbert_dim(site_dim, r.size());
  if (columns.rows() != static_cast<Eigen::Index>(d))
    throw std::invalid_argument("span_projector: vector length does not match the region");
  if (columns.cols() == 0)
    return {zero_projector(std::move(r), site_dim), Matrix::Zero(columns.rows(), 0)};
  Eigen::BDCSVD<Matrix> svd(columns, Eigen::ComputeThinU);
  RealVector sv = svd.singularValues();
  Eigen::Index rank = rank_policy().rank(sv);
  Matrix u = svd.matrixU().leftCols(rank);
  Projector p{u * u.adjoint(), std::move(r), site_dim, nullptr};
  return {std::move(p), std::move(u)};
}

// Projector onto the range of a PSD operator (e.g. a Gram accumulation V·V†).
// Rank decisions land on the PSD spectrum, i.e. squared singular values.
inline SpanResult range_of_psd(const Matrix& psd, Region r, int site_dim) {
  std::size_t d = hilbert_dim(site_dim, r.size());
  if (psd.rows() != static_cast<Eigen::Index>(d) || psd.rows() != psd.cols())
    throw std::invalid_argument("range_of_psd: operator does not match the region");
  Eigh es = eigh(psd);
  double largest = es.values.size() ? std::max(0.0, es.values[es.values.size() - 1]) : 0.0;
  double t = rank_policy().threshold(largest);
  Eigen::Index k = 0;
  while (k < es.values.size() && es.values[k] <= t) ++k;
  Matrix u = es.vectors.rightCols(es.values.size() - k);
  Projector p{u * u.adjoint(), std::move(r), site_dim, nullptr};
  return {std::move(p), std::move(u)};
}

inline void check_same_window(const Projector& a, const Projector& b, const char* who) {
  if (a.region != b.region || a.site_dim != b.site_dim)
    throw std::invalid_argument(std::string(who) + ": projectors live on different windows");
}

// Largest projector below both: projector onto Ran(p) ∩ Ran(q).  When both
// kernels are stored the intersection is the complement of the joined
// kernels; otherwise it is read off the null space of (1-p) + (1-q).
inline Projector meet(const Projector& p, const Projector& q) {
  check_same_window(p, q, "meet");
  if (p.kernel && q.kernel) {
    Matrix stacked(p.dim(), p.kernel->cols() + q.kernel->cols());
    stacked << *p.kernel, *q.kernel;
    SpanResult joined = span_projector(stacked, p.region, p.site_dim);
    Projector out{Matrix::Identity(p.dim(), p.dim()) - joined.proj.mat, p.region, p.site_dim,
                  nullptr};
    out.kernel = std::make_shared<const Matrix>(std::move(joined.basis));
    return out;
  }
  Matrix s = (Matrix::Identity(p.dim(), p.dim()) - p.mat) +
             (Matrix::Identity(q.dim(), q.dim()) - q.mat);
  Eigh es = eigh(s);
  double largest = std::max(0.0, es.values[es.values.size() - 1]);
  double t = rank_policy().threshold(largest);
  Eigen::Index k = 0;
  while (k < es.values.size() && es.values[k] <= t) ++k;
  Matrix u = es.vectors.leftCols(k);
  return {u * u.adjoint(), p.region, p.site_dim, nullptr};
}

// Smallest projector above both: projector onto Ran(p) + Ran(q).
inline Projector join(const Projector& p, const Projector& q) {
  check_same_window(p, q, "join");
  return range_of_psd(Matrix(p.mat + q.mat), p.region, p.site_dim).proj;
}

inline double leq_residual(const Projector& p, const Projector& q) {
  check_same_window(p, q, "leq");
  return op_norm(Matrix(p.mat * q.mat - p.mat));
}

inline bool proj_leq(const Projector& p, const Projector& q, double tol = default_tol) {
  return leq_residual(p, q) <= tol;
}

inline double subspace_distance(const Projector& p, const Projector& q) {
  check_same_window(p, q, "subspace_distance");
  return op_norm(Matrix(p.mat - q.mat));
}

}  // namespace ffp
