#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "ffp/common.hpp"
#include "ffp/operators.hpp"
#include "ffp/projector.hpp"
#include "ffp/region.hpp"
#include "ffp/system.hpp"

namespace ffp {

// At a finite ambient window the physically meaningful solutions commute
// with p_Γ^⊥ only approximately: their residuals decay with the window size
// while everything else stays at order one, so a fixed cut between the two
// groups picks out the boundary algebra.  0.3 clears the decaying group on
// every bundled fixture and sits well under the order-one floor.
inline constexpr double boundary_default_tol = 0.3;

// Operators of the form x p_Γ^⊥ with x in the corner p_Λ^⊥ S_Λ p_Λ^⊥ and
// ‖[x, p_Γ^⊥]‖ ≤ tol · ‖x‖.  The ambient window Γ is a finite stand-in for
// the half lattice, so only answers that survive enlarging Γ carry meaning;
// the scan below reports that rung by rung instead of asserting it.
struct BoundaryAlgebraBasis {
  Region window;
  Region ambient;
  std::vector<LocalOperator> basis;  // orthonormal images x p_Γ^⊥, on Γ
  std::vector<Matrix> corner;        // orthonormal solutions, as coefficients on ker p_Λ
  bool injective = true;             // x ↦ x p_Γ^⊥ kills no solution
  double tol = boundary_default_tol;

  int dimension() const { return static_cast<int>(basis.size()); }
};

namespace detail {

inline Vector vec_of(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

struct BoundarySolve {
  Matrix kernel_small;  // basis of ker p_Λ, d^{|Λ|} × r
  Matrix kernel_big;    // basis of ker p_Γ, d^{|Γ|} × s
  Matrix constraint;    // commutation constraints, one column per corner coefficient
  std::vector<Matrix> solutions;
};

// The corner operator with coefficient matrix a is u a u†.  Its embedding
// into Γ applied to the columns of the big kernel basis determines the image
// x p_Γ^⊥ completely, so full d^{|Γ|}-square matrices are never formed here.
inline Matrix image_frame(const Matrix& u, const Matrix& a, const Region& lambda, int site_dim,
                          const Region& gamma, const Matrix& kernel_big) {
  LocalOperator op = make_local(Matrix(u * a * u.adjoint()), lambda, site_dim);
  return apply_embedded(op, gamma, kernel_big);
}

inline BoundarySolve solve_boundary(const Projector& pl, const Projector& pg,
                                    const Region& lambda, const Region& gamma, double tol) {
  BoundarySolve out;
  out.kernel_small = kernel_basis(pl);
  out.kernel_big = kernel_basis(pg);
  const Eigen::Index r = out.kernel_small.cols();
  const Eigen::Index s = out.kernel_big.cols();
  const Eigen::Index dg = pg.mat.rows();
  if (r == 0) return out;
  if (s == 0) {
    // saturated ambient window: the commutation constraint is vacuous
    for (Eigen::Index b = 0; b < r; ++b)
      for (Eigen::Index a = 0; a < r; ++a) {
        Matrix e = Matrix::Zero(r, r);
        e(a, b) = 1.0;
        out.solutions.push_back(std::move(e));
      }
    return out;
  }

  // [X, p_Γ^⊥] = 0 splits into the two off-diagonal blocks
  //   U_Γ† X (1 − U_Γ U_Γ†) = 0   and   (1 − U_Γ U_Γ†) X U_Γ = 0,
  // which only ever touch X through X U_Γ and X† U_Γ.
  Matrix c(2 * s * dg, r * r);
  for (Eigen::Index b = 0; b < r; ++b)
    for (Eigen::Index a = 0; a < r; ++a) {
      Matrix x = Matrix(out.kernel_small.col(a) * out.kernel_small.col(b).adjoint());
      LocalOperator op = make_local(x, lambda, pl.site_dim);
      LocalOperator op_adj = make_local(Matrix(x.adjoint()), lambda, pl.site_dim);
      Matrix t2 = apply_embedded(op, gamma, out.kernel_big);
      Matrix t1 = apply_embedded(op_adj, gamma, out.kernel_big);
      Matrix mid = out.kernel_big.adjoint() * t2;
      Matrix n1 = Matrix(t1.adjoint() - mid * out.kernel_big.adjoint());
      Matrix n2 = Matrix(t2 - out.kernel_big * mid);
      c.col(a + b * r).head(s * dg) = vec_of(n1);
      c.col(a + b * r).tail(s * dg) = vec_of(n2);
    }

  Eigen::BDCSVD<Matrix> svd(c, Eigen::ComputeFullV);
  const RankPolicy policy = rank_policy();
  double top = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  double thr = std::max(tol, policy.threshold(top));
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > thr) ++rank;
  for (Eigen::Index i = rank; i < r * r; ++i) {
    Vector v = svd.matrixV().col(i);
    out.solutions.push_back(Matrix(Eigen::Map<const Matrix>(v.data(), r, r)));
  }
  out.constraint = std::move(c);
  return out;
}

}  // namespace detail

inline BoundaryAlgebraBasis boundary_basis(const FFSystem& sys, const Region& lambda,
                                           const Region& gamma,
                                           double tol = boundary_default_tol) {
  if (!sys.has(lambda) || !sys.has(gamma))
    throw std::invalid_argument("boundary_basis: both windows must belong to the system");
  if (!gamma.contains(lambda))
    throw std::invalid_argument("boundary_basis: ambient window must contain the window");
  HalfLatticeRegion hl(lambda);
  HalfLatticeRegion hg(gamma);
  if (boundary(hl).size() == 0)
    throw std::invalid_argument("boundary_basis: window does not touch the lattice boundary");

  const Projector& pl = sys.at(lambda);
  const Projector& pg = sys.at(gamma);
  detail::BoundarySolve sol = detail::solve_boundary(pl, pg, lambda, gamma, tol);

  BoundaryAlgebraBasis out;
  out.window = lambda;
  out.ambient = gamma;
  out.tol = tol;
  out.corner = sol.solutions;
  if (sol.solutions.empty()) return out;

  const Eigen::Index s = sol.kernel_big.cols();
  const Eigen::Index dg = pg.mat.rows();
  if (s == 0) {
    out.injective = false;  // every image is zero
    return out;
  }

  Matrix frames(dg * s, static_cast<Eigen::Index>(sol.solutions.size()));
  for (std::size_t i = 0; i < sol.solutions.size(); ++i)
    frames.col(static_cast<Eigen::Index>(i)) = detail::vec_of(detail::image_frame(
        sol.kernel_small, sol.solutions[i], lambda, pl.site_dim, gamma, sol.kernel_big));

  Eigen::BDCSVD<Matrix> svd(frames, Eigen::ComputeThinU);
  const RankPolicy policy = rank_policy();
  double top = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  double thr = policy.threshold(top);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > thr) ++rank;
  out.injective = rank == frames.cols();
  for (Eigen::Index k = 0; k < rank; ++k) {
    Vector col = svd.matrixU().col(k);
    Matrix w = Eigen::Map<const Matrix>(col.data(), dg, s);
    out.basis.push_back(make_local(Matrix(w * sol.kernel_big.adjoint()), gamma, pg.site_dim));
  }
  return out;
}

struct BoundaryRung {
  Region window;
  Region ambient;
};

struct BoundaryScanRow {
  Region window;
  Region ambient;
  int dimension = 0;           // of the image space
  int solution_dimension = 0;  // of the commutation null space
  bool injective = true;
  bool stabilized = false;  // same dimension as the rung before
  double inclusion_residual = 0;
  bool includes_previous = true;
};

struct BoundaryScan {
  std::vector<BoundaryScanRow> rows;
  bool stabilized = false;
  double tol = 0;
};

// Dimensions along a nested ladder of (Λ, Γ) rungs, with two health reports
// per rung: whether the previous rung's solutions, compressed into the
// current corner, still satisfy the current constraints, and whether the
// dimension has stopped moving.
inline BoundaryScan boundary_dim_scan(const FFSystem& sys, const std::vector<BoundaryRung>& rungs,
                                      double tol = boundary_default_tol) {
  BoundaryScan out;
  out.tol = tol;
  const RankPolicy policy = rank_policy();
  detail::BoundarySolve prev;
  Region prev_window;
  for (std::size_t i = 0; i < rungs.size(); ++i) {
    const Region& lambda = rungs[i].window;
    const Region& gamma = rungs[i].ambient;
    if (i > 0 && !(lambda.contains(rungs[i - 1].window) && gamma.contains(rungs[i - 1].ambient)))
      throw std::invalid_argument("boundary_dim_scan: ladder is not nested");
    if (!sys.has(lambda) || !sys.has(gamma))
      throw std::invalid_argument("boundary_dim_scan: window not in system");
    if (!gamma.contains(lambda))
      throw std::invalid_argument("boundary_dim_scan: ambient window must contain the window");

    const Projector& pl = sys.at(lambda);
    const Projector& pg = sys.at(gamma);
    detail::BoundarySolve cur = detail::solve_boundary(pl, pg, lambda, gamma, tol);

    BoundaryScanRow row;
    row.window = lambda;
    row.ambient = gamma;
    row.solution_dimension = static_cast<int>(cur.solutions.size());

    const Eigen::Index s = cur.kernel_big.cols();
    const Eigen::Index dg = pg.mat.rows();
    if (!cur.solutions.empty() && s > 0) {
      Matrix frames(dg * s, static_cast<Eigen::Index>(cur.solutions.size()));
      for (std::size_t j = 0; j < cur.solutions.size(); ++j)
        frames.col(static_cast<Eigen::Index>(j)) = detail::vec_of(detail::image_frame(
            cur.kernel_small, cur.solutions[j], lambda, pl.site_dim, gamma, cur.kernel_big));
      Eigen::BDCSVD<Matrix> svd(frames);
      double top = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
      double thr = policy.threshold(top);
      Eigen::Index rank = 0;
      for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
        if (svd.singularValues()(k) > thr) ++rank;
      row.dimension = static_cast<int>(rank);
      row.injective = rank == frames.cols();
    } else {
      row.dimension = 0;
      row.injective = cur.solutions.empty();
    }

    if (i > 0) {
      row.stabilized = row.dimension == out.rows.back().dimension;
      const Eigen::Index r = cur.kernel_small.cols();
      double worst = 0;
      for (const Matrix& a : prev.solutions) {
        if (r == 0) {
          worst = 1.0;
          break;
        }
        Matrix lifted = cur.kernel_small.adjoint() *
                        detail::image_frame(prev.kernel_small, a, prev_window, pl.site_dim,
                                            lambda, cur.kernel_small);
        double scale = lifted.norm();
        if (scale <= policy.abs) {
          worst = std::max(worst, 1.0);
          continue;
        }
        double res = cur.constraint.size() == 0
                         ? 0.0
                         : (cur.constraint * detail::vec_of(lifted)).norm() / scale;
        worst = std::max(worst, res);
      }
      row.inclusion_residual = worst;
      row.includes_previous = worst <= tol;
    }

    out.rows.push_back(row);
    prev = std::move(cur);
    prev_window = lambda;
  }
  out.stabilized = out.rows.size() >= 2 &&
                   out.rows.back().dimension == out.rows[out.rows.size() - 2].dimension;
  return out;
}

struct CommutantReport {
  Region window;
  int dimension = 0;  // commutant of the corner generators inside the window algebra
  int predicted = 0;
  bool degenerate = false;  // vanishing projector: the corner is zero
  bool matches = false;
};

// Relative commutant of p_Λ S_Λ p_Λ inside S_Λ, found by solving [x, g] = 0
// against two algebra generators of the corner.  A diagonal with distinct
// nonzero entries together with a cyclic shift generates the full corner, so
// commuting with both is the same as commuting with the whole of it.
inline CommutantReport commutant_structure_check(const FFSystem& sys, const Region& lambda) {
  const Projector& p = sys.at(lambda);
  CommutantReport rep;
  rep.window = lambda;
  const Eigen::Index dim = p.mat.rows();
  const int rank = p.rank();
  if (rank == 0) {
    rep.degenerate = true;
    rep.dimension = static_cast<int>(dim * dim);
    rep.predicted = rep.dimension;
    rep.matches = true;
    return rep;
  }
  rep.predicted = 1 + p.corank() * p.corank();

  Matrix range = range_basis(p);
  Matrix diag = Matrix::Zero(rank, rank);
  Matrix shift = Matrix::Zero(rank, rank);
  for (int i = 0; i < rank; ++i) {
    diag(i, i) = i + 1;
    shift((i + 1) % rank, i) = 1.0;
  }
  Matrix g1 = range * diag * range.adjoint();
  Matrix g2 = range * shift * range.adjoint();

  Matrix id = Matrix::Identity(dim, dim);
  Matrix c(2 * dim * dim, dim * dim);
  c.topRows(dim * dim) = kron(id, g1) - kron(Matrix(g1.transpose()), id);
  c.bottomRows(dim * dim) = kron(id, g2) - kron(Matrix(g2.transpose()), id);

  Eigen::BDCSVD<Matrix> svd(c);
  const RankPolicy policy = rank_policy();
  double top = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  double thr = policy.threshold(top);
  Eigen::Index crank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > thr) ++crank;
  rep.dimension = static_cast<int>(dim * dim - crank);
  rep.matches = rep.dimension == rep.predicted;
  return rep;
}

struct TraceEstimateRow {
  Region window;
  double value = 0;        // Tr p_Λ / d^{|Λ|}
  double lower_bound = 0;  // 1 − corank(p_Λ) / d^{|Λ|}
};

inline std::vector<TraceEstimateRow> cuntz_trace_estimate(const FFSystem& sys,
                                                          const std::vector<Region>& ladder) {
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (!(ladder[i].contains(ladder[i - 1]) && ladder[i].size() > ladder[i - 1].size()))
      throw std::invalid_argument("cuntz_trace_estimate: ladder is not increasing");
  std::vector<TraceEstimateRow> out;
  for (const Region& w : ladder) {
    const Projector& p = sys.at(w);
    double full = static_cast<double>(hilbert_dim(p.site_dim, w.size()));
    TraceEstimateRow row;
    row.window = w;
    row.value = p.mat.trace().real() / full;
    row.lower_bound = 1.0 - static_cast<double>(p.corank()) / full;
    out.push_back(row);
  }
  return out;
}

}  // namespace ffp
