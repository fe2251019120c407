#pragma once

#include "ffp/common.hpp"
#include "ffp/operators.hpp"
#include "ffp/projector.hpp"
#include "ffp/region.hpp"
#include "ffp/system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

namespace ffp {

// Finite marginals standing in for a state: one density matrix per window,
// consistent under partial traces.
struct WindowState {
  int site_dim = 0;
  std::vector<Region> windows;
  std::map<Region, Matrix> rho;

  const Matrix& at(const Region& w) const {
    auto it = rho.find(w);
    if (it == rho.end()) throw std::invalid_argument("WindowState: window not stored");
    return it->second;
  }
};

inline WindowState make_window_state(int site_dim, std::map<Region, Matrix> rho,
                                     double tol = default_tol) {
  WindowState out;
  out.site_dim = site_dim;
  for (auto& [w, m] : rho) {
    std::size_t dim = hilbert_dim(site_dim, w.size());
    if (m.rows() != static_cast<Eigen::Index>(dim) || m.cols() != m.rows())
      throw std::invalid_argument("make_window_state: matrix does not match its window");
    if (op_norm(Matrix(m - m.adjoint())) > tol)
      throw std::invalid_argument("make_window_state: density matrix is not Hermitian");
    if (std::abs(m.trace().real() - 1.0) > tol || std::abs(m.trace().imag()) > tol)
      throw std::invalid_argument("make_window_state: trace is not 1");
    if (eigh(m).values.minCoeff() < -tol)
      throw std::invalid_argument("make_window_state: density matrix is not positive");
    out.windows.push_back(w);
  }
  for (const Region& small : out.windows)
    for (const Region& big : out.windows) {
      if (small == big || !big.contains(small)) continue;
      Matrix marg = partial_trace(rho.at(big), big, small, site_dim);
      if (op_norm(Matrix(marg - rho.at(small))) > tol)
        throw std::invalid_argument("make_window_state: marginals are inconsistent");
    }
  out.rho = std::move(rho);
  return out;
}

inline WindowState product_state(const Vector& psi, const std::vector<Region>& windows) {
  double nrm = psi.norm();
  if (nrm == 0.0) throw std::invalid_argument("product_state: zero vector");
  Vector unit = psi / nrm;
  std::map<Region, Matrix> rho;
  for (const Region& w : windows) {
    Vector v = Vector::Ones(1);
    for (std::size_t i = 0; i < w.size(); ++i) {
      Vector next(v.size() * unit.size());
      for (Eigen::Index a = 0; a < v.size(); ++a)
        next.segment(a * unit.size(), unit.size()) = v[a] * unit;
      v = next;
    }
    rho[w] = v * v.adjoint();
  }
  return make_window_state(static_cast<int>(unit.size()), std::move(rho));
}

inline WindowState maximally_mixed(int site_dim, const std::vector<Region>& windows) {
  std::map<Region, Matrix> rho;
  for (const Region& w : windows) {
    std::size_t dim = hilbert_dim(site_dim, w.size());
    rho[w] = Matrix::Identity(static_cast<Eigen::Index>(dim),
                              static_cast<Eigen::Index>(dim)) /
             static_cast<double>(dim);
  }
  return make_window_state(site_dim, std::move(rho));
}

// Uniform mixture over the ground space of the largest window, marginalized
// down to every other window.  Materializing at the top and partial-tracing is
// what keeps the marginals consistent.
inline WindowState kernel_mixture(const FFSystem& sys) {
  const Region* top = nullptr;
  for (const Region& w : sys.windows) {
    bool covers = true;
    for (const Region& o : sys.windows)
      if (!w.contains(o)) { covers = false; break; }
    if (covers) { top = &w; break; }
  }
  if (!top)
    throw std::invalid_argument("kernel_mixture: no window contains all others");
  Matrix u = kernel_basis(sys.at(*top));
  if (u.cols() == 0)
    throw std::invalid_argument("kernel_mixture: the top window has no ground space");
  Matrix rho_top = u * u.adjoint() / static_cast<double>(u.cols());
  std::map<Region, Matrix> rho;
  for (const Region& w : sys.windows)
    rho[w] = (w == *top) ? rho_top : partial_trace(rho_top, *top, w, sys.site_dim);
  return make_window_state(sys.site_dim, std::move(rho));
}

inline WindowState restrict_state(const WindowState& omega, const std::vector<Region>& windows) {
  std::map<Region, Matrix> rho;
  for (const Region& w : windows) rho[w] = omega.at(w);
  return make_window_state(omega.site_dim, std::move(rho));
}

// Projector onto the range of a density matrix, under the shared rank policy.
inline SpanResult support_projection(const Matrix& rho, const Region& w, int site_dim) {
  return range_of_psd(rho, w, site_dim);
}

struct MonotoneReport {
  bool ok = true;
  double worst = 0.0;
};

// Corner-defining projectors of a hereditary subalgebra along a window chain,
// together with the weighted truncation w = Σ_m 2^{-m} p_m on the top window.
struct HereditaryTruncation {
  int site_dim = 0;
  std::vector<Region> ladder;
  std::map<Region, Projector> unit;
  LocalOperator w;
  MonotoneReport monotone;
};

inline HereditaryTruncation assemble_truncation(std::vector<Projector> units) {
  if (units.empty()) throw std::invalid_argument("assemble_truncation: empty family");
  std::sort(units.begin(), units.end(),
            [](const Projector& a, const Projector& b) { return a.region < b.region; });
  for (std::size_t i = 0; i + 1 < units.size(); ++i)
    if (!units[i + 1].region.contains(units[i].region))
      throw std::invalid_argument("assemble_truncation: windows do not form a chain");
  HereditaryTruncation out;
  out.site_dim = units[0].site_dim;
  const Region& top = units.back().region;
  std::size_t dim = hilbert_dim(out.site_dim, top.size());
  Matrix w = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  double coeff = 1.0;
  for (std::size_t i = 0; i < units.size(); ++i) {
    coeff *= 0.5;
    w += coeff * embed(LocalOperator{units[i].mat, units[i].region, out.site_dim}, top).mat;
    for (std::size_t j = 0; j < i; ++j) {
      double r = leq_residual(
          Projector{embed(LocalOperator{units[j].mat, units[j].region, out.site_dim},
                          units[i].region)
                        .mat,
                    units[i].region, out.site_dim, nullptr},
          units[i]);
      out.monotone.worst = std::max(out.monotone.worst, r);
    }
  }
  out.monotone.ok = out.monotone.worst <= default_tol;
  out.w = make_local(std::move(w), top, out.site_dim);
  for (Projector& p : units) {
    out.ladder.push_back(p.region);
    Region key = p.region;
    out.unit.emplace(std::move(key), std::move(p));
  }
  return out;
}

// p_Λ(B) = 1 − supp(ρ_Λ) along the state's window chain.  The support basis is
// attached as the projector's kernel.
inline HereditaryTruncation localized_unit(const WindowState& omega, double tol = default_tol) {
  std::vector<Region> chain = omega.windows;
  std::sort(chain.begin(), chain.end(),
            [](const Region& a, const Region& b) { return a.size() < b.size(); });
  for (std::size_t i = 0; i + 1 < chain.size(); ++i)
    if (!chain[i + 1].contains(chain[i]))
      throw std::invalid_argument("localized_unit: windows are not inclusion-ordered");
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    Matrix marg = partial_trace(omega.at(chain.back()), chain.back(), chain[i], omega.site_dim);
    if (op_norm(Matrix(marg - omega.at(chain[i]))) > tol)
      throw std::invalid_argument("localized_unit: marginals are inconsistent");
  }
  std::vector<Projector> units;
  for (const Region& w : chain) {
    SpanResult supp = support_projection(omega.at(w), w, omega.site_dim);
    Projector p{Matrix(Matrix::Identity(supp.proj.dim(), supp.proj.dim()) - supp.proj.mat),
                w, omega.site_dim, std::make_shared<const Matrix>(std::move(supp.basis))};
    units.push_back(std::move(p));
  }
  return assemble_truncation(std::move(units));
}

// Distance (Hilbert–Schmidt) from the truncation's w to the nearest single
// corner p_m S_m p_m embedded at the top window, minimized over m ≤ depth.
// Zero exactly when w already lives in one finite-window corner, which is the
// finite form of the union characterization.
inline double property_f_residual(const HereditaryTruncation& t, std::size_t depth) {
  if (t.ladder.empty()) throw std::invalid_argument("property_f_residual: empty ladder");
  depth = std::min(depth == 0 ? std::size_t{1} : depth, t.ladder.size());
  const Region& top = t.ladder.back();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < depth; ++m) {
    const Region& small = t.ladder[m];
    const Projector& q = t.unit.at(small);
    Matrix b;
    if (small == top) {
      b = q.mat * t.w.mat * q.mat;
    } else {
      double rest = static_cast<double>(hilbert_dim(t.site_dim, top.size() - small.size()));
      Matrix ptr = partial_trace(t.w.mat, top, small, t.site_dim) / rest;
      b = q.mat * ptr * q.mat;
    }
    double dist =
        (t.w.mat - embed(LocalOperator{std::move(b), small, t.site_dim}, top).mat).norm();
    best = std::min(best, dist);
  }
  return best;
}

struct GroundReport {
  bool ok = true;            // trace route: Tr(ρ_Λ p_Λ) ≤ tol everywhere
  double worst_trace = 0.0;
  bool support_ok = true;    // operator route: supp(ρ_Λ) ≤ p_Λ^⊥ everywhere
  double worst_support = 0.0;
  bool paths_agree = true;
};

inline GroundReport ff_ground_state_report(const WindowState& omega, const FFSystem& sys,
                                           double tol = default_tol) {
  GroundReport report;
  for (const Region& w : sys.windows) {
    if (!omega.rho.count(w))
      throw std::invalid_argument("ff_ground_state_report: window missing from the state");
    const Projector& p = sys.at(w);
    double tr = (omega.at(w) * p.mat).trace().real();
    report.worst_trace = std::max(report.worst_trace, tr);
    Projector supp = support_projection(omega.at(w), w, omega.site_dim).proj;
    double r = leq_residual(supp, complement(p));
    report.worst_support = std::max(report.worst_support, r);
  }
  report.ok = report.worst_trace <= tol;
  report.support_ok = report.worst_support <= std::sqrt(tol);
  report.paths_agree = (report.ok == report.support_ok);
  return report;
}

inline bool is_ff_ground_state(const WindowState& omega, const FFSystem& sys,
                               double tol = default_tol) {
  GroundReport report = ff_ground_state_report(omega, sys, tol);
  if (!report.paths_agree)
    throw std::runtime_error("is_ff_ground_state: trace and support routes disagree");
  return report.ok;
}

inline bool support_leq(const WindowState& omega, const WindowState& eta,
                        double tol = default_tol) {
  if (omega.windows != eta.windows)
    throw std::invalid_argument("support_leq: window families differ");
  for (const Region& w : omega.windows) {
    Projector a = support_projection(omega.at(w), w, omega.site_dim).proj;
    Projector b = support_projection(eta.at(w), w, eta.site_dim).proj;
    if (leq_residual(a, b) > std::sqrt(tol)) return false;
  }
  return true;
}

// ‖p_Λ^⊥ ã p_Λ^⊥ − ω_Λ(ã) p_Λ^⊥‖ with ω_Λ(ã) = Tr(ã p_Λ^⊥)/rank(p_Λ^⊥),
// evaluated in the kernel basis: for ã = U A U† + ..., the norm equals
// ‖A − ω·1_r‖ with A = U† ã U, exactly.
inline double ltqo_norm(const FFSystem& sys, const LocalOperator& a, const Region& window) {
  const Projector& p = sys.at(window);
  if (!window.contains(a.region))
    throw std::invalid_argument("ltqo_norm: observable support outside the window");
  Matrix u = kernel_basis(p);
  if (u.cols() == 0)
    throw std::invalid_argument("ltqo_norm: the window projector has empty kernel");
  Matrix atilde = embed(a, window).mat;
  Matrix compressed = u.adjoint() * atilde * u;
  Complex omega = compressed.trace() / static_cast<double>(u.cols());
  return op_norm(Matrix(compressed - omega * Matrix::Identity(u.cols(), u.cols())));
}

struct LtqoRow {
  Region window;
  Eigen::Index corank = 0;
  std::vector<double> norms;
};

struct LtqoScan {
  std::vector<LtqoRow> rows;
  bool unique_indicator = false;  // constant corank 1 across the ladder
};

inline LtqoScan ltqo_scan(const FFSystem& sys, const std::vector<LocalOperator>& observables,
                          const std::vector<Region>& ladder) {
  for (std::size_t i = 0; i + 1 < ladder.size(); ++i)
    if (!ladder[i + 1].contains(ladder[i]))
      throw std::invalid_argument("ltqo_scan: ladder is not increasing");
  LtqoScan out;
  out.unique_indicator = !ladder.empty();
  for (const Region& w : ladder) {
    LtqoRow row;
    row.window = w;
    row.corank = sys.at(w).corank();
    if (row.corank != 1) out.unique_indicator = false;
    for (const LocalOperator& a : observables) row.norms.push_back(ltqo_norm(sys, a, w));
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace ffp
