#pragma once

#include "ffp/common.hpp"
#include "ffp/operators.hpp"
#include "ffp/projector.hpp"
#include "ffp/region.hpp"
#include "ffp/system.hpp"

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace ffp {

// ---------------------------------------------------------------------------
// VBS specs.  T = generators (first entry 0); each generator t carries an
// index set J(t) of size index_sizes[t]; every lattice site holds one index
// per generator.  psi maps a full per-site index tuple to a vector in ℂ^d
// (column per tuple, row-major over the tuple); gamma assigns an amplitude to
// each tuple, coupling site g's t=0 index with site g+t's t index.
// ---------------------------------------------------------------------------

struct VbsSpec {
  int site_dim = 0;
  std::vector<Site> generators;
  std::vector<int> index_sizes;
  Matrix psi;
  Vector gamma;

  std::size_t tuple_count() const {
    std::size_t n = 1;
    for (int s : index_sizes) n *= static_cast<std::size_t>(s);
    return n;
  }

  std::size_t encode(const std::vector<int>& tuple) const {
    std::size_t idx = 0;
    for (std::size_t j = 0; j < index_sizes.size(); ++j)
      idx = idx * static_cast<std::size_t>(index_sizes[j]) + static_cast<std::size_t>(tuple[j]);
    return idx;
  }
};

inline void validate_vbs(const VbsSpec& spec) {
  if (spec.site_dim < 1) throw std::invalid_argument("VbsSpec: site_dim must be >= 1");
  if (spec.generators.empty() ||
      spec.generators[0] != Site(spec.generators[0].size(), 0))
    throw std::invalid_argument("VbsSpec: generators must start with 0");
  std::set<Site> uniq(spec.generators.begin(), spec.generators.end());
  if (uniq.size() != spec.generators.size())
    throw std::invalid_argument("VbsSpec: duplicate generator");
  if (spec.index_sizes.size() != spec.generators.size())
    throw std::invalid_argument("VbsSpec: one index set per generator required");
  for (int s : spec.index_sizes)
    if (s < 1) throw std::invalid_argument("VbsSpec: index sets must be non-empty");
  if (spec.psi.rows() != spec.site_dim ||
      spec.psi.cols() != static_cast<Eigen::Index>(spec.tuple_count()))
    throw std::invalid_argument("VbsSpec: psi must be site_dim x (number of tuples)");
  if (spec.gamma.size() != static_cast<Eigen::Index>(spec.tuple_count()))
    throw std::invalid_argument("VbsSpec: gamma must have one amplitude per tuple");
  if (spec.gamma.cwiseAbs().sum() == 0.0)
    throw std::invalid_argument("VbsSpec: all amplitudes vanish");
}

// Λ_T = {g : g + t ∈ Λ for every generator t}.
inline Region lambda_T(const Region& window, const std::vector<Site>& generators) {
  std::vector<Site> out;
  for (const Site& g : window.sites()) {
    bool ok = true;
    for (const Site& t : generators)
      if (!window.contains(site_add(g, t))) { ok = false; break; }
    if (ok) out.push_back(g);
  }
  return Region(std::move(out));
}

// Decorated site: (lattice site, generator index).
using DecoratedSite = std::pair<Site, int>;

// Λ_B = {(g + t_j, j) : g ∈ Λ_T, j over generators}: the decorated sites whose
// index is read by some amplitude factor.  Sorted by (site, generator index).
inline std::vector<DecoratedSite> lambda_B(const Region& window,
                                           const std::vector<Site>& generators) {
  std::set<DecoratedSite> legs;
  Region lt = lambda_T(window, generators);
  for (const Site& g : lt.sites())
    for (std::size_t j = 0; j < generators.size(); ++j)
      legs.emplace(site_add(g, generators[j]), static_cast<int>(j));
  return {legs.begin(), legs.end()};
}

// ∏_{g ∈ Λ_T} Γ(values at the legs of g), with X listed in lambda_B order.
inline Complex vbs_amplitude(const Region& window, const VbsSpec& spec,
                             const std::vector<int>& x) {
  auto legs = lambda_B(window, spec.generators);
  if (x.size() != legs.size())
    throw std::invalid_argument("vbs_amplitude: configuration size does not match lambda_B");
  std::map<DecoratedSite, int> value;
  for (std::size_t i = 0; i < legs.size(); ++i) {
    if (x[i] < 0 || x[i] >= spec.index_sizes[static_cast<std::size_t>(legs[i].second)])
      throw std::invalid_argument("vbs_amplitude: index out of range");
    value[legs[i]] = x[i];
  }
  Complex c(1, 0);
  std::vector<int> tuple(spec.generators.size());
  Region lt = lambda_T(window, spec.generators);
  for (const Site& g : lt.sites()) {
    for (std::size_t j = 0; j < spec.generators.size(); ++j)
      tuple[j] = value.at({site_add(g, spec.generators[j]), static_cast<int>(j)});
    c *= spec.gamma[static_cast<Eigen::Index>(spec.encode(tuple))];
  }
  return c;
}

namespace detail {

// One leg of the contraction: where its value comes from during enumeration.
struct LegRef {
  enum Kind { kInternal, kCut, kFree } kind;
  std::size_t slot;  // position within the internal / cut / per-site free list
};

struct HalfPlan {
  std::vector<std::size_t> sites;                     // positions in the window
  std::vector<int> internal_sizes;                    // internal enumeration radices
  std::vector<std::vector<std::pair<int, LegRef>>> site_legs;  // per site: (gen j, source)
  std::vector<std::vector<int>> free_sizes;           // per site: radices of its free legs
  std::vector<std::size_t> nodes;                     // Λ_T positions owned by this half
};

inline std::size_t radix_count(const std::vector<int>& sizes) {
  std::size_t n = 1;
  for (int s : sizes) n *= static_cast<std::size_t>(s);
  return n;
}

inline void decode_radix(std::size_t idx, const std::vector<int>& sizes, std::vector<int>& out) {
  out.resize(sizes.size());
  for (std::size_t i = sizes.size(); i-- > 0;) {
    out[i] = static_cast<int>(idx % static_cast<std::size_t>(sizes[i]));
    idx /= static_cast<std::size_t>(sizes[i]);
  }
}

}  // namespace detail

// Projector onto V_Λ together with an orthonormal basis.  The spanning family
// is indexed by the free decorated indices; the bonded sum is carried out
// exactly, factored across a split of the window so the enumeration stays at
// |C(bonded legs on one side)| × |C(cut legs)| instead of |C(Λ_B)| × |C(free)|.
// Windows with Λ_T = ∅ carry no amplitude factor at all; by convention the
// span is the whole space (their constraint projector downstream is 0).
inline SpanResult vbs_subspace(const Region& window, const VbsSpec& spec) {
  validate_vbs(spec);
  std::size_t n = window.size();
  std::size_t dim = hilbert_dim(spec.site_dim, n);
  Region lt = lambda_T(window, spec.generators);
  if (lt.empty()) {
    Projector full = identity_projector(window, spec.site_dim);
    return {full, Matrix::Identity(static_cast<Eigen::Index>(dim),
                                   static_cast<Eigen::Index>(dim))};
  }

  auto legs = lambda_B(window, spec.generators);
  {
    double log_total = 0.0;
    for (const DecoratedSite& l : legs)
      log_total += std::log2(static_cast<double>(spec.index_sizes[static_cast<std::size_t>(l.second)]));
    if (log_total > 20.0)
      throw std::domain_error("vbs_subspace: |C(lambda_B)| exceeds the 2^20 cap");
  }

  std::size_t split = (n + 1) / 2;
  auto half_of = [&](std::size_t pos) { return pos < split ? 0 : 1; };

  // Classify every bonded leg; legs whose site and amplitude node sit in
  // different halves become cut legs, enumerated explicitly.
  std::map<DecoratedSite, detail::LegRef> leg_ref;
  std::vector<int> cut_sizes;
  std::vector<int> internal_sizes[2];
  detail::HalfPlan plan[2];
  for (int h = 0; h < 2; ++h)
    for (std::size_t pos = (h == 0 ? 0 : split); pos < (h == 0 ? split : n); ++pos)
      plan[h].sites.push_back(pos);

  for (const DecoratedSite& leg : legs) {
    std::size_t site_pos = static_cast<std::size_t>(window.position_of(leg.first));
    Site node = site_sub(leg.first, spec.generators[static_cast<std::size_t>(leg.second)]);
    std::size_t node_pos = static_cast<std::size_t>(window.position_of(node));
    int sz = spec.index_sizes[static_cast<std::size_t>(leg.second)];
    if (half_of(site_pos) == half_of(node_pos)) {
      int h = half_of(site_pos);
      leg_ref[leg] = {detail::LegRef::kInternal, internal_sizes[h].size()};
      internal_sizes[h].push_back(sz);
    } else {
      leg_ref[leg] = {detail::LegRef::kCut, cut_sizes.size()};
      cut_sizes.push_back(sz);
    }
  }
  for (int h = 0; h < 2; ++h) plan[h].internal_sizes = internal_sizes[h];

  for (int h = 0; h < 2; ++h) {
    for (std::size_t pos : plan[h].sites) {
      const Site& s = window.sites()[pos];
      std::vector<std::pair<int, detail::LegRef>> srcs;
      std::vector<int> fsizes;
      for (std::size_t j = 0; j < spec.generators.size(); ++j) {
        DecoratedSite leg{s, static_cast<int>(j)};
        auto it = leg_ref.find(leg);
        if (it != leg_ref.end()) {
          srcs.emplace_back(static_cast<int>(j), it->second);
        } else {
          srcs.emplace_back(static_cast<int>(j),
                            detail::LegRef{detail::LegRef::kFree, fsizes.size()});
          fsizes.push_back(spec.index_sizes[j]);
        }
      }
      plan[h].site_legs.push_back(std::move(srcs));
      plan[h].free_sizes.push_back(std::move(fsizes));
    }
    for (const Site& g : lt.sites()) {
      std::size_t pos = static_cast<std::size_t>(window.position_of(g));
      if (half_of(pos) == h) plan[h].nodes.push_back(pos);
    }
  }

  std::size_t n_cut = detail::radix_count(cut_sizes);

  // T_h[c] = Σ over the half's internal legs of (amplitude factors owned by
  // the half) × ⊗_{sites} (d × f_site matrix of ψ columns).
  auto build_half = [&](int h) {
    std::size_t dh = hilbert_dim(spec.site_dim, plan[h].sites.size());
    std::size_t fh = 1;
    for (const auto& fs : plan[h].free_sizes) fh *= detail::radix_count(fs);
    std::size_t n_int = detail::radix_count(plan[h].internal_sizes);
    if (n_int > (1u << 20))
      throw std::domain_error("vbs_subspace: internal enumeration exceeds the cap");
    std::vector<Matrix> t(n_cut, Matrix::Zero(static_cast<Eigen::Index>(dh),
                                              static_cast<Eigen::Index>(fh)));
    std::vector<int> ivals, cvals, yvals, tuple(spec.generators.size());
    for (std::size_t ic = 0; ic < n_int; ++ic) {
      detail::decode_radix(ic, plan[h].internal_sizes, ivals);
      for (std::size_t cc = 0; cc < n_cut; ++cc) {
        detail::decode_radix(cc, cut_sizes, cvals);
        auto leg_value = [&](const detail::LegRef& ref, int y_digit) {
          switch (ref.kind) {
            case detail::LegRef::kInternal: return ivals[ref.slot];
            case detail::LegRef::kCut: return cvals[ref.slot];
            default: return y_digit;
          }
        };
        Complex amp(1, 0);
        for (std::size_t node_pos : plan[h].nodes) {
          const Site& g = window.sites()[node_pos];
          for (std::size_t j = 0; j < spec.generators.size(); ++j) {
            DecoratedSite leg{site_add(g, spec.generators[j]), static_cast<int>(j)};
            tuple[j] = leg_value(leg_ref.at(leg), 0);
          }
          amp *= spec.gamma[static_cast<Eigen::Index>(spec.encode(tuple))];
          if (amp == Complex(0, 0)) break;
        }
        if (amp == Complex(0, 0)) continue;
        Matrix acc = Matrix::Ones(1, 1);
        for (std::size_t si = 0; si < plan[h].sites.size(); ++si) {
          std::size_t fs = detail::radix_count(plan[h].free_sizes[si]);
          Matrix m(spec.site_dim, static_cast<Eigen::Index>(fs));
          for (std::size_t y = 0; y < fs; ++y) {
            detail::decode_radix(y, plan[h].free_sizes[si], yvals);
            for (std::size_t j = 0; j < spec.generators.size(); ++j) {
              const auto& src = plan[h].site_legs[si][j];
              tuple[j] = leg_value(src.second,
                                   src.second.kind == detail::LegRef::kFree
                                       ? yvals[src.second.slot]
                                       : 0);
            }
            m.col(static_cast<Eigen::Index>(y)) =
                spec.psi.col(static_cast<Eigen::Index>(spec.encode(tuple)));
          }
          acc = kron(acc, m);
        }
        t[cc] += amp * acc;
      }
    }
    return t;
  };

  std::vector<Matrix> ta = build_half(0), tb = build_half(1);
  Matrix gram = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t c = 0; c < n_cut; ++c)
    for (std::size_t c2 = 0; c2 < n_cut; ++c2)
      gram += kron(Matrix(ta[c] * ta[c2].adjoint()), Matrix(tb[c] * tb[c2].adjoint()));
  if (gram.norm() == 0.0)
    throw std::domain_error("vbs_subspace: every spanning vector vanishes on this window");
  return range_of_psd(gram, window, spec.site_dim);
}

// FF system of a VBS spec over all sub-boxes of [0, extent).  p_Λ projects
// onto V_Λ^⊥; windows with Λ_T = ∅ get p_Λ = 0.  Projectors are computed once
// per translation class.
inline FFSystem vbs_system(const Site& extent, const VbsSpec& spec) {
  validate_vbs(spec);
  std::map<Region, std::pair<Matrix, std::shared_ptr<const Matrix>>> by_shape;
  std::vector<Projector> ps;
  for (const Region& w : box_windows(extent)) {
    Site anchor = w.sites().front();
    Site back(anchor.size());
    for (std::size_t i = 0; i < anchor.size(); ++i) back[i] = -anchor[i];
    Region shape = translate(w, back);
    auto it = by_shape.find(shape);
    if (it == by_shape.end()) {
      Projector p = zero_projector(shape, spec.site_dim);
      if (!lambda_T(shape, spec.generators).empty()) {
        SpanResult sr = vbs_subspace(shape, spec);
        p.mat = Matrix::Identity(p.dim(), p.dim()) - sr.proj.mat;
        p.kernel = std::make_shared<const Matrix>(std::move(sr.basis));
      } else {
        p.kernel = std::make_shared<const Matrix>(
            Matrix(Matrix::Identity(p.dim(), p.dim())));
      }
      it = by_shape.emplace(shape, std::make_pair(p.mat, p.kernel)).first;
    }
    ps.push_back(Projector{it->second.first, w, spec.site_dim, it->second.second});
  }
  return make_system(spec.site_dim, std::move(ps), "vbs");
}

// ---------------------------------------------------------------------------
// Matrix product specs.  v holds d bond matrices (k × k); Γ_n(B) lists
// Tr(v_{j_n} ··· v_{j_1} B) over the product basis with the first site most
// significant.  rho is the dual transfer fixed point.
// ---------------------------------------------------------------------------

struct MpsSpec {
  int site_dim = 0;
  int bond_dim = 0;
  std::vector<Matrix> v;
  Matrix rho;
};

struct MpsValidation {
  double identity_residual;    // ‖Σ v v† - 1‖
  double fixed_point_residual; // ‖Σ v† ρ v - ρ‖
  bool transfer_nondegenerate; // spectral radius 1, simple peripheral eigenvalue
};

inline Matrix transfer_matrix(const MpsSpec& spec) {
  int k = spec.bond_dim;
  Matrix m = Matrix::Zero(k * k, k * k);
  for (const Matrix& v : spec.v) m += kron(v.conjugate(), v);
  return m;
}

inline MpsValidation validate_mps(const MpsSpec& spec, double tol = default_tol) {
  if (spec.site_dim < 1 || spec.bond_dim < 1)
    throw std::invalid_argument("MpsSpec: dimensions must be >= 1");
  if (static_cast<int>(spec.v.size()) != spec.site_dim)
    throw std::invalid_argument("MpsSpec: one bond matrix per physical basis state");
  int k = spec.bond_dim;
  for (const Matrix& v : spec.v)
    if (v.rows() != k || v.cols() != k)
      throw std::invalid_argument("MpsSpec: bond matrices must be k x k");
  if (spec.rho.rows() != k || spec.rho.cols() != k)
    throw std::invalid_argument("MpsSpec: rho must be k x k");

  Matrix id = Matrix::Zero(k, k);
  Matrix fp = Matrix::Zero(k, k);
  for (const Matrix& v : spec.v) {
    id += v * v.adjoint();
    fp += v.adjoint() * spec.rho * v;
  }
  MpsValidation out;
  out.identity_residual = op_norm(Matrix(id - Matrix::Identity(k, k)));
  out.fixed_point_residual = op_norm(Matrix(fp - spec.rho));

  Eigen::ComplexEigenSolver<Matrix> es(transfer_matrix(spec));
  int peripheral = 0;
  double radius = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    radius = std::max(radius, std::abs(es.eigenvalues()[i]));
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()[i]) > 1.0 - 1e-8) ++peripheral;
  out.transfer_nondegenerate =
      std::abs(radius - 1.0) <= 100 * tol && peripheral == 1;
  return out;
}

// Fixed point of the dual transfer map B ↦ Σ v† B v, scaled Hermitian with
// trace k.  Defined up to scale when the transfer map is primitive.
inline Matrix dual_transfer_fixed_point(int bond_dim, const std::vector<Matrix>& v) {
  int k = bond_dim;
  Matrix m = Matrix::Zero(k * k, k * k);
  for (const Matrix& vi : v) m += kron(vi.transpose(), vi.adjoint());
  Eigen::ComplexEigenSolver<Matrix> es(m);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()[i] - Complex(1, 0)) <
        std::abs(es.eigenvalues()[best] - Complex(1, 0)))
      best = i;
  if (std::abs(es.eigenvalues()[best] - Complex(1, 0)) > 1e-8)
    throw std::runtime_error("dual_transfer_fixed_point: no eigenvalue at 1");
  Vector vec = es.eigenvectors().col(best);
  Matrix rho(k, k);
  for (int c = 0; c < k; ++c) rho.col(c) = vec.segment(c * k, k);
  rho = Matrix(0.5 * (rho + rho.adjoint()));
  double tr = rho.trace().real();
  if (std::abs(tr) < 1e-12)
    throw std::runtime_error("dual_transfer_fixed_point: traceless fixed point");
  return Matrix(rho * (static_cast<double>(k) / tr));
}

// Γ_n(B) over the n-site product basis.
inline Vector mps_gamma(int n, const Matrix& b, const MpsSpec& spec) {
  if (n < 1) throw std::invalid_argument("mps_gamma: n must be >= 1");
  if (b.rows() != spec.bond_dim || b.cols() != spec.bond_dim)
    throw std::invalid_argument("mps_gamma: boundary matrix must be k x k");
  std::size_t dim = hilbert_dim(spec.site_dim, static_cast<std::size_t>(n));
  std::vector<Matrix> cur{b};
  for (int s = 0; s < n; ++s) {
    std::vector<Matrix> next(cur.size() * static_cast<std::size_t>(spec.site_dim));
    for (std::size_t i = 0; i < cur.size(); ++i)
      for (int j = 0; j < spec.site_dim; ++j)
        next[i * static_cast<std::size_t>(spec.site_dim) + static_cast<std::size_t>(j)] =
            spec.v[static_cast<std::size_t>(j)] * cur[i];
    cur = std::move(next);
  }
  Vector out(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) out[static_cast<Eigen::Index>(i)] = cur[i].trace();
  return out;
}

// d^n × k² matrix of Γ_n over the matrix-unit basis E_{ab}, column a·k+b.
inline Matrix mps_gamma_matrix(int n, const MpsSpec& spec) {
  int k = spec.bond_dim;
  std::size_t dim = hilbert_dim(spec.site_dim, static_cast<std::size_t>(n));
  Matrix out(static_cast<Eigen::Index>(dim), k * k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      Matrix e = Matrix::Zero(k, k);
      e(a, b) = 1.0;
      out.col(a * k + b) = mps_gamma(n, e, spec);
    }
  return out;
}

// Smallest n with rank Γ_n = k² (the injectivity length), if any up to n_max.
inline std::optional<int> mps_injectivity_length(const MpsSpec& spec, int n_max = 8) {
  for (int n = 1; n <= n_max; ++n) {
    Matrix g = mps_gamma_matrix(n, spec);
    Eigen::BDCSVD<Matrix> svd(g);
    if (rank_policy().rank(svd.singularValues()) == spec.bond_dim * spec.bond_dim)
      return n;
  }
  return std::nullopt;
}

// FF system with p_[a,b)^⊥ projecting onto Ran Γ_{b-a}, over every interval
// of length ≥ the injectivity length inside [0, N).
inline FFSystem mps_system(int chain_length, const MpsSpec& spec) {
  std::optional<int> ell = mps_injectivity_length(spec);
  if (!ell)
    throw std::invalid_argument("mps_system: spec never reaches injectivity (degenerate)");
  std::map<int, std::pair<Matrix, std::shared_ptr<const Matrix>>> by_len;
  std::vector<Projector> ps;
  for (int a = 0; a < chain_length; ++a)
    for (int b = a + *ell; b <= chain_length; ++b) {
      int len = b - a;
      auto it = by_len.find(len);
      if (it == by_len.end()) {
        SpanResult sr = span_projector(mps_gamma_matrix(len, spec),
                                       Region::interval(0, len), spec.site_dim);
        Matrix p = Matrix::Identity(sr.proj.dim(), sr.proj.dim()) - sr.proj.mat;
        it = by_len
                 .emplace(len, std::make_pair(std::move(p), std::make_shared<const Matrix>(
                                                                std::move(sr.basis))))
                 .first;
      }
      ps.push_back(Projector{it->second.first, Region::interval(a, b), spec.site_dim,
                             it->second.second});
    }
  return make_system(spec.site_dim, std::move(ps), "mps");
}

// The standard reduction: an MPS is the VBS spec with two generators, J(0) =
// J(1) = {1..k}, ψ(i,j) = Σ_μ v_μ(i,j) e_μ and Γ = δ.
inline VbsSpec mps_as_vbs(const MpsSpec& spec) {
  int k = spec.bond_dim;
  VbsSpec out;
  out.site_dim = spec.site_dim;
  out.generators = {Site{0}, Site{1}};
  out.index_sizes = {k, k};
  out.psi = Matrix::Zero(spec.site_dim, k * k);
  out.gamma = Vector::Zero(k * k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      for (int mu = 0; mu < spec.site_dim; ++mu)
        out.psi(mu, i * k + j) = spec.v[static_cast<std::size_t>(mu)](i, j);
      if (i == j) out.gamma[i * k + j] = 1.0;
    }
  return out;
}

// Product state system: p_Λ = 1 - |ψ0^⊗Λ⟩⟨ψ0^⊗Λ| over all sub-boxes of the
// extent.
inline FFSystem product_system(const Vector& psi0, const Site& extent) {
  double nrm = psi0.norm();
  if (nrm == 0.0) throw std::invalid_argument("product_system: zero vector");
  Vector unit = psi0 / nrm;
  int d = static_cast<int>(unit.size());
  std::vector<Projector> ps;
  for (const Region& w : box_windows(extent)) {
    hilbert_dim(d, w.size());
    Vector v = Vector::Ones(1);
    for (std::size_t i = 0; i < w.size(); ++i) {
      Vector next(v.size() * unit.size());
      for (Eigen::Index a = 0; a < v.size(); ++a)
        next.segment(a * unit.size(), unit.size()) = v[a] * unit;
      v = next;
    }
    Projector p{Matrix::Identity(v.size(), v.size()) - v * v.adjoint(), w, d, nullptr};
    p.kernel = std::make_shared<const Matrix>(Matrix(v));
    ps.push_back(std::move(p));
  }
  return make_system(d, std::move(ps), "product");
}

}  // namespace ffp
