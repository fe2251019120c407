#pragma once

#include "ffp/common.hpp"
#include "ffp/operators.hpp"
#include "ffp/projector.hpp"
#include "ffp/region.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace ffp {

// Family {p_Λ} of commuting local constraints indexed by finite windows.
// Frustration-free means p_Λ1 · p_Λ2 = p_Λ1 whenever Λ1 ⊆ Λ2; equivalently
// the kernels (ground spaces) shrink as windows grow.
struct FFSystem {
  int site_dim = 0;
  std::vector<Region> windows;
  std::map<Region, Projector> projectors;
  std::string provenance;

  const Projector& at(const Region& r) const {
    auto it = projectors.find(r);
    if (it == projectors.end())
      throw std::invalid_argument("FFSystem: window not stored");
    return it->second;
  }

  bool has(const Region& r) const { return projectors.count(r) != 0; }
};

inline FFSystem make_system(int site_dim, std::vector<Projector> ps, std::string provenance) {
  FFSystem sys;
  sys.site_dim = site_dim;
  sys.provenance = std::move(provenance);
  for (Projector& p : ps) {
    if (p.site_dim != site_dim)
      throw std::invalid_argument("make_system: mixed site dimensions");
    Region r = p.region;
    if (!sys.projectors.emplace(r, std::move(p)).second)
      throw std::invalid_argument("make_system: duplicate window");
    sys.windows.push_back(std::move(r));
  }
  std::sort(sys.windows.begin(), sys.windows.end());
  return sys;
}

struct PairResidual {
  Region small, big;
  double value = 0.0;
};

struct FFReport {
  bool ok = true;
  double tol = default_tol;
  double worst = 0.0;
  PairResidual worst_pair;
  std::vector<PairResidual> residuals;  // one row per nested pair, in window order
};

// ‖p_small · p_big - p_small‖ over all stored nested pairs.  The residual is
// evaluated as ‖p_small · (1 - p_big)‖ on a kernel basis of p_big, which
// avoids materializing any embedded operator.
inline FFReport check_ff(const FFSystem& sys, double tol = default_tol, int jobs = 1) {
  std::vector<std::pair<const Region*, const Region*>> pairs;
  for (const Region& big : sys.windows)
    for (const Region& small : sys.windows)
      if (small != big && big.contains(small)) pairs.emplace_back(&small, &big);

  // Kernel bases of the enclosing windows, computed once each.
  std::map<Region, Matrix> kernels;
  for (auto& [small, big] : pairs)
    if (!kernels.count(*big)) kernels.emplace(*big, kernel_basis(sys.at(*big)));

  FFReport rep;
  rep.tol = tol;
  rep.residuals.resize(pairs.size());
  parallel_for(pairs.size(), jobs, [&](std::size_t i) {
    const Region& small = *pairs[i].first;
    const Region& big = *pairs[i].second;
    const Projector& ps = sys.at(small);
    double value = 0.0;
    const Matrix& ker = kernels.at(big);
    if (ps.rank() > 0 && ker.cols() > 0) {
      LocalOperator op{ps.mat, ps.region, ps.site_dim};
      value = op_norm(apply_embedded(op, big, ker));
    }
    rep.residuals[i] = {small, big, value};
  });
  for (const PairResidual& r : rep.residuals)
    if (r.value >= rep.worst) {
      rep.worst = r.value;
      rep.worst_pair = r;
    }
  rep.ok = rep.worst <= tol;
  return rep;
}

struct ProperReport {
  bool ok = true;
  std::vector<Region> violations;  // windows with p_Λ = 1
};

// Proper: p_Λ < 1, i.e. every window retains at least one ground vector.
inline ProperReport check_proper(const FFSystem& sys) {
  ProperReport rep;
  for (const Region& w : sys.windows)
    if (sys.at(w).rank() == sys.at(w).dim()) {
      rep.ok = false;
      rep.violations.push_back(w);
    }
  return rep;
}

struct EquivarianceRow {
  Site shift;
  std::size_t pairs = 0;
  double worst = 0.0;
};

struct EquivarianceReport {
  bool ok = true;
  double tol = default_tol;
  std::vector<EquivarianceRow> rows;
};

// α_g(p_Λ) = p_{Λ+g} for the stored translate pairs.  Translation preserves
// the canonical leg order, so the check is a plain matrix comparison.
inline EquivarianceReport check_equivariance(const FFSystem& sys,
                                             const std::vector<Site>& shifts,
                                             double tol = default_tol) {
  EquivarianceReport rep;
  rep.tol = tol;
  for (const Site& g : shifts) {
    EquivarianceRow row;
    row.shift = g;
    for (const Region& w : sys.windows) {
      Region shifted = translate(w, g);
      if (!sys.has(shifted)) continue;
      ++row.pairs;
      row.worst = std::max(row.worst, op_norm(Matrix(sys.at(w).mat - sys.at(shifted).mat)));
    }
    if (row.pairs == 0)
      throw std::invalid_argument("check_equivariance: no stored translate for a shift");
    rep.rows.push_back(row);
    if (row.worst > tol) rep.ok = false;
  }
  return rep;
}

inline void check_compatible(const FFSystem& a, const FFSystem& b, const char* who) {
  if (a.site_dim != b.site_dim || a.windows != b.windows)
    throw std::invalid_argument(std::string(who) +
                                ": systems have different windows or site dimension");
}

// Windowwise lattice operations (the FF family of systems is a lattice).
inline FFSystem system_meet(const FFSystem& a, const FFSystem& b) {
  check_compatible(a, b, "system_meet");
  std::vector<Projector> ps;
  ps.reserve(a.windows.size());
  for (const Region& w : a.windows) ps.push_back(meet(a.at(w), b.at(w)));
  return make_system(a.site_dim, std::move(ps),
                     "meet(" + a.provenance + ", " + b.provenance + ")");
}

inline FFSystem system_join(const FFSystem& a, const FFSystem& b) {
  check_compatible(a, b, "system_join");
  std::vector<Projector> ps;
  ps.reserve(a.windows.size());
  for (const Region& w : a.windows) ps.push_back(join(a.at(w), b.at(w)));
  return make_system(a.site_dim, std::move(ps),
                     "join(" + a.provenance + ", " + b.provenance + ")");
}

inline bool system_leq(const FFSystem& a, const FFSystem& b, double tol = default_tol) {
  check_compatible(a, b, "system_leq");
  for (const Region& w : a.windows)
    if (!proj_leq(a.at(w), b.at(w), tol)) return false;
  return true;
}

}  // namespace ffp
