#pragma once

#include "ffp/common.hpp"
#include "ffp/models.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace ffp {

// Spin-1 chain with bond dimension 2: v = scale · (σ⁺, -σ^z/√2, -σ⁻), where
// the scale makes Σ v v† the identity.  Dual transfer fixed point is 1₂.
inline MpsSpec aklt_spec() {
  Matrix sp = Matrix::Zero(2, 2), sz = Matrix::Zero(2, 2), sm = Matrix::Zero(2, 2);
  sp(0, 1) = 1.0;
  sm(1, 0) = 1.0;
  sz(0, 0) = 1.0;
  sz(1, 1) = -1.0;
  std::vector<Matrix> w{sp, Matrix(-sz / std::sqrt(2.0)), Matrix(-sm)};
  Matrix s = Matrix::Zero(2, 2);
  for (const Matrix& m : w) s += m * m.adjoint();
  double scale = 1.0 / std::sqrt(s(0, 0).real());
  MpsSpec spec;
  spec.site_dim = 3;
  spec.bond_dim = 2;
  for (const Matrix& m : w) spec.v.push_back(Matrix(scale * m));
  spec.rho = dual_transfer_fixed_point(2, spec.v);
  return spec;
}

// Bond matrices proportional to each other; the transfer map's peripheral
// eigenvalue is degenerate and no Γ_n ever reaches full rank.
inline MpsSpec degenerate_mps_spec() {
  MpsSpec spec;
  spec.site_dim = 2;
  spec.bond_dim = 2;
  Matrix h(2, 2);
  h << 1, 1, 1, -1;
  h /= 2.0;  // Σ v v† = 1 still holds for the pair (h, h)
  spec.v = {h, h};
  spec.rho = Matrix::Identity(2, 2);
  return spec;
}

// Seeded qubit chain VBS with dense random ψ and Γ, two bond indices of size 2.
inline VbsSpec random_chain_vbs(std::uint64_t seed = 11) {
  VbsSpec spec;
  spec.site_dim = 2;
  spec.generators = {Site{0}, Site{1}};
  spec.index_sizes = {2, 2};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  spec.psi = Matrix(2, 4);
  for (Eigen::Index r = 0; r < 2; ++r)
    for (Eigen::Index c = 0; c < 4; ++c) spec.psi(r, c) = Complex(g(rng), g(rng));
  spec.gamma = Vector(4);
  for (Eigen::Index c = 0; c < 4; ++c) spec.gamma[c] = Complex(g(rng), g(rng));
  return spec;
}

// Two-dimensional qubit VBS locked to the all-equal sector: ψ and Γ are
// supported on constant index tuples only, so window subspaces are spanned by
// basis vectors constant on each bond-connected component.
inline VbsSpec ghz_grid_vbs() {
  VbsSpec spec;
  spec.site_dim = 2;
  spec.generators = {Site{0, 0}, Site{1, 0}, Site{0, 1}};
  spec.index_sizes = {2, 2, 2};
  spec.psi = Matrix::Zero(2, 8);
  spec.gamma = Vector::Zero(8);
  spec.psi(0, 0) = 1.0;  // tuple (0,0,0)
  spec.psi(1, 7) = 1.0;  // tuple (1,1,1)
  spec.gamma[0] = 1.0;
  spec.gamma[7] = 1.0;
  return spec;
}

// Qubit product fixture: every window constrains to |0…0⟩.
inline FFSystem product_fixture(int chain_length = 4) {
  Vector e0 = Vector::Zero(2);
  e0[0] = 1.0;
  return product_system(e0, Site{chain_length});
}

// Meet of the |0⟩ and |1⟩ product systems: windowwise corank 2.
inline FFSystem two_product_meet(int chain_length = 4) {
  Vector e0 = Vector::Zero(2), e1 = Vector::Zero(2);
  e0[0] = 1.0;
  e1[1] = 1.0;
  return system_meet(product_system(e0, Site{chain_length}),
                     product_system(e1, Site{chain_length}));
}

// A deliberately frustrated family on a 3-site qutrit chain: a seeded rank-6
// two-site projector on both nearest-neighbour pairs has no common kernel
// vector, so the top window's one-dimensional kernel (the minimiser of the
// embedded sum) is not annihilated by the pair terms and nesting fails.
inline FFSystem frustrated_random_system(std::uint64_t seed = 5) {
  int d = 3;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix raw(9, 6);
  for (Eigen::Index r = 0; r < 9; ++r)
    for (Eigen::Index c = 0; c < 6; ++c) raw(r, c) = Complex(g(rng), g(rng));
  SpanResult sr = span_projector(raw, Region::interval(0, 2), d);
  Projector q01 = sr.proj;
  Projector q12 = translate(q01, Site{1});
  Matrix i3 = Matrix::Identity(3, 3);
  Eigh eg = eigh(Matrix(kron(q01.mat, i3) + kron(i3, q12.mat)));
  Vector ground = eg.vectors.col(0);
  Projector top{Matrix(Matrix::Identity(27, 27) - ground * ground.adjoint()),
                Region::interval(0, 3), d,
                std::make_shared<const Matrix>(Matrix(ground))};
  std::vector<Projector> ps{q01, q12, top};
  return make_system(d, std::move(ps), "frustrated-random");
}

struct FixtureInfo {
  std::string name;
  std::string summary;
};

inline std::vector<FixtureInfo> fixture_registry() {
  std::vector<FixtureInfo> out;
  out.push_back({"product", "qubit chain locked to |0...0>"});
  out.push_back({"two-product-meet", "windowwise meet of |0> and |1> product systems"});
  MpsSpec aklt = aklt_spec();
  std::optional<int> ell = mps_injectivity_length(aklt);
  out.push_back({"aklt", "spin-1 bond-dimension-2 chain, injectivity length " +
                             std::to_string(ell.value_or(-1))});
  out.push_back({"random-chain-vbs", "seeded dense qubit VBS on a chain"});
  out.push_back({"ghz-grid-vbs", "all-equal-locked qubit VBS on the square lattice"});
  out.push_back({"frustrated-random", "seeded non-frustration-free 3-site qutrit family"});
  return out;
}

}  // namespace ffp
