#pragma once

#include "ffp/common.hpp"
#include "ffp/operators.hpp"
#include "ffp/projector.hpp"
#include "ffp/region.hpp"
#include "ffp/system.hpp"

#include <limits>
#include <vector>

namespace ffp {

struct Interaction {
  LocalOperator op;
};

inline Interaction make_interaction(LocalOperator q, double tol = default_tol) {
  if (op_norm(Matrix(q.mat - q.mat.adjoint())) > tol)
    throw std::invalid_argument("make_interaction: operator is not Hermitian");
  return {std::move(q)};
}

// Finite-volume Hamiltonian, shifted so the lowest eigenvalue is zero.  The
// subtracted constant epsilon is the minimum of the raw translate sum, kept so
// callers can reconstruct the unnormalized operator.
struct Hamiltonian {
  LocalOperator h;
  double epsilon = 0.0;
  RealVector spectrum;  // ascending, of the normalized h
  Matrix modes;         // eigenvector columns aligned with spectrum
};

inline Hamiltonian assemble(const Interaction& q, const Region& window) {
  std::vector<Site> shifts = enumerate_translates(q.op.region, window);
  if (shifts.empty())
    throw std::invalid_argument("assemble: no translate of the interaction fits the window");
  std::size_t dim = hilbert_dim(q.op.site_dim, window.size());
  Matrix raw = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const Site& g : shifts) raw += embed(translate(q.op, g), window).mat;
  Eigh eg = eigh(raw);
  Hamiltonian out;
  out.epsilon = eg.values[0];
  out.h = make_local(
      Matrix(raw - out.epsilon * Matrix::Identity(raw.rows(), raw.cols())), window,
      q.op.site_dim);
  out.spectrum = eg.values.array() - out.epsilon;
  out.modes = eg.vectors;
  return out;
}

struct FFModelRow {
  Region window;
  double epsilon;  // of the positivity-normalized interaction
};

struct FFModelReport {
  bool ok = true;
  double tol = default_tol;
  std::vector<FFModelRow> rows;
  std::vector<Region> violations;
};

// A model is frustration free when the normalization constant of every window
// equals the minimum of the (positivity-normalized) interaction, i.e. zero.
inline FFModelReport is_ff_model(const Interaction& q, const std::vector<Region>& windows,
                                 double tol = default_tol) {
  Eigh eg = eigh(q.op.mat);
  Interaction shifted = {make_local(
      Matrix(q.op.mat - eg.values[0] * Matrix::Identity(q.op.mat.rows(), q.op.mat.cols())),
      q.op.region, q.op.site_dim)};
  FFModelReport report;
  report.tol = tol;
  for (const Region& w : windows) {
    double eps = assemble(shifted, w).epsilon;
    report.rows.push_back({w, eps});
    if (std::abs(eps) > tol) {
      report.ok = false;
      report.violations.push_back(w);
    }
  }
  return report;
}

// h_Λ = Σ_{g·Δ ⊆ Λ} embedded p_{g·Δ}, taken from the system (stored windows
// preferred, translates of p_Δ otherwise).  Frustration-freeness makes the
// minimum eigenvalue zero, so no constant is subtracted; the kernel is checked
// to contain the stored ground space of Λ when available.
inline Hamiltonian assemble_from_system(const FFSystem& sys, const Region& delta,
                                        const Region& window, double tol = default_tol) {
  FFReport ff = check_ff(sys, tol);
  if (!ff.ok)
    throw std::invalid_argument("assemble_from_system: the system fails the nesting check");
  const Projector& pd = sys.at(delta);
  std::vector<Site> shifts = enumerate_translates(delta, window);
  if (shifts.empty())
    throw std::invalid_argument("assemble_from_system: no translate of the base window fits");
  std::size_t dim = hilbert_dim(sys.site_dim, window.size());
  Matrix raw = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const Site& g : shifts) {
    Region wg = translate(delta, g);
    const Projector& pg = sys.has(wg) ? sys.at(wg) : pd;
    raw += embed(LocalOperator{pg.mat, wg, sys.site_dim}, window).mat;
  }
  Eigh eg = eigh(raw);
  if (eg.values[0] > static_cast<double>(shifts.size()) * tol)
    throw std::runtime_error("assemble_from_system: no zero mode despite nesting");
  if (sys.has(window)) {
    Matrix u = kernel_basis(sys.at(window));
    if (u.cols() > 0 && op_norm(Matrix(raw * u)) > static_cast<double>(shifts.size()) * tol)
      throw std::runtime_error(
          "assemble_from_system: stored ground space escapes the kernel");
  }
  Hamiltonian out;
  out.epsilon = 0.0;
  out.h = make_local(std::move(raw), window, sys.site_dim);
  out.spectrum = eg.values;
  out.modes = eg.vectors;
  return out;
}

// Eigenvalues at most 100·eps·‖h‖ count as exact zero modes.
inline double zero_cluster_threshold(const Hamiltonian& h) {
  double top = 0.0;
  if (h.spectrum.size() > 0)
    top = std::max(std::abs(h.spectrum[0]), std::abs(h.spectrum[h.spectrum.size() - 1]));
  return 100.0 * std::numeric_limits<double>::epsilon() * top;
}

// Projector onto the nonzero spectral part; its complement is ker h.
inline Projector supporting_projection(const Hamiltonian& h) {
  double thr = zero_cluster_threshold(h);
  Eigen::Index zeros = 0;
  while (zeros < h.spectrum.size() && h.spectrum[zeros] <= thr) ++zeros;
  Matrix above = h.modes.rightCols(h.modes.cols() - zeros);
  Projector out{Matrix(above * above.adjoint()), h.h.region, h.h.site_dim,
                std::make_shared<const Matrix>(Matrix(h.modes.leftCols(zeros)))};
  return out;
}

// Smallest eigenvalue above the zero cluster; +inf when none exists.
inline double spectral_gap(const Hamiltonian& h) {
  double thr = zero_cluster_threshold(h);
  for (Eigen::Index i = 0; i < h.spectrum.size(); ++i)
    if (h.spectrum[i] > thr) return h.spectrum[i];
  return std::numeric_limits<double>::infinity();
}

struct DerivationResult {
  LocalOperator commutator;  // [h_Λ, embedded a], on Λ
  bool stabilized = false;
  double shell_change = 0.0;  // discrepancy after growing Λ by one shell
};

// Finite-window derivation action.  The normalization constant drops out of
// the commutator, so the result is independent of epsilon.  Stabilization is
// probed by growing the window's bounding box by one site in every direction
// and comparing the recomputed commutator against the embedded one.
inline DerivationResult derivation_action(const Interaction& q, const LocalOperator& a,
                                          const Region& window, double tol = default_tol) {
  if (!window.contains(a.region))
    throw std::invalid_argument("derivation_action: observable support outside the window");
  Hamiltonian h = assemble(q, window);
  Matrix c = commutator(h.h.mat, embed(a, window).mat);
  DerivationResult out;
  out.commutator = make_local(std::move(c), window, a.site_dim);

  Site lo = window.sites().front(), hi = window.sites().front();
  for (const Site& s : window.sites())
    for (std::size_t i = 0; i < s.size(); ++i) {
      lo[i] = std::min(lo[i], s[i]);
      hi[i] = std::max(hi[i], s[i]);
    }
  for (std::size_t i = 0; i < lo.size(); ++i) {
    lo[i] -= 1;
    hi[i] += 2;
  }
  Region grown = Region::box(lo, hi);
  Hamiltonian hg = assemble(q, grown);
  Matrix cg = commutator(hg.h.mat, embed(a, grown).mat);
  out.shell_change = op_norm(Matrix(cg - embed(out.commutator, grown).mat));
  out.stabilized = out.shell_change <= tol;
  return out;
}

}  // namespace ffp
