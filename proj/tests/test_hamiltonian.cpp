#include "ffp/hamiltonian.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ffp/fixtures.hpp"

using namespace ffp;

namespace {

Matrix random_hermitian(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = Complex(g(rng), g(rng));
  return Matrix(0.5 * (m + m.adjoint()));
}

// Independent route to the smallest eigenvalue: the general (non-selfadjoint)
// solver, which runs a different reduction than the tridiagonal path used by
// assemble.
double min_eig_general(const Matrix& m) {
  Eigen::ComplexEigenSolver<Matrix> es(m);
  double best = es.eigenvalues()[0].real();
  for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i)
    best = std::min(best, es.eigenvalues()[i].real());
  return best;
}

Interaction aklt_interaction() {
  FFSystem sys = mps_system(2, aklt_spec());
  const Projector& p = sys.at(Region::interval(0, 2));
  return {LocalOperator{p.mat, p.region, p.site_dim}};
}

Matrix raw_translate_sum(const Interaction& q, const Region& w) {
  std::size_t dim = hilbert_dim(q.op.site_dim, w.size());
  Matrix raw = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const Site& g : enumerate_translates(q.op.region, w))
    raw += embed(translate(q.op, g), w).mat;
  return raw;
}

}  // namespace

TEST_CASE("assembly normalizes the minimum eigenvalue to zero") {
  Interaction q = {make_local(random_hermitian(4, 7), Region::interval(0, 2), 2)};
  Region w = Region::interval(0, 4);
  Hamiltonian h = assemble(q, w);
  REQUIRE(h.spectrum[0] == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(op_norm(Matrix(h.h.mat - h.h.mat.adjoint())) < 1e-12);
  // epsilon matches an independent eigensolver on the raw sum
  REQUIRE(std::abs(h.epsilon - min_eig_general(raw_translate_sum(q, w))) < 1e-9);
  // spectrum is ascending and consistent with the stored modes
  for (Eigen::Index i = 1; i < h.spectrum.size(); ++i)
    REQUIRE(h.spectrum[i] >= h.spectrum[i - 1]);
  REQUIRE(op_norm(Matrix(h.h.mat * h.modes.col(0))) < 1e-10);
}

TEST_CASE("identity interaction assembles to zero") {
  Interaction q = {identity_on(Region::interval(0, 2), 2)};
  Hamiltonian h = assemble(q, Region::interval(0, 4));
  REQUIRE(h.epsilon == Catch::Approx(3.0).margin(1e-12));
  REQUIRE(op_norm(h.h.mat) < 1e-12);
}

TEST_CASE("projector interactions from a nested family keep epsilon at zero") {
  FFSystem sys = product_fixture(4);
  const Projector& p = sys.at(Region::interval(0, 2));
  Interaction q = {LocalOperator{p.mat, p.region, p.site_dim}};
  Hamiltonian h = assemble(q, Region::interval(0, 4));
  REQUIRE(std::abs(h.epsilon) < 1e-12);
  REQUIRE(h.spectrum[0] == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("assembly requires at least one fitting translate") {
  Interaction q = {identity_on(Region::interval(0, 3), 2)};
  REQUIRE_THROWS_AS(assemble(q, Region::interval(0, 2)), std::invalid_argument);
}

TEST_CASE("normalization constant scales linearly with the interaction") {
  Interaction q = {make_local(random_hermitian(4, 13), Region::interval(0, 2), 2)};
  Interaction q2 = {make_local(Matrix(2.5 * q.op.mat), q.op.region, 2)};
  Region w = Region::interval(0, 3);
  REQUIRE(assemble(q2, w).epsilon ==
          Catch::Approx(2.5 * assemble(q, w).epsilon).margin(1e-10));
}

TEST_CASE("interaction validation rejects non-Hermitian input") {
  Matrix m = random_hermitian(4, 3);
  m(0, 1) += Complex(0.0, 0.5);
  REQUIRE_THROWS_AS(make_interaction(make_local(m, Region::interval(0, 2), 2)),
                    std::invalid_argument);
}

TEST_CASE("frustration-free models have vanishing epsilon everywhere") {
  Interaction q = aklt_interaction();
  std::vector<Region> windows;
  for (int n = 2; n <= 5; ++n) windows.push_back(Region::interval(0, n));
  FFModelReport report = is_ff_model(q, windows);
  REQUIRE(report.ok);
  for (const FFModelRow& row : report.rows) REQUIRE(std::abs(row.epsilon) < 1e-10);
}

TEST_CASE("a generic projector interaction is frustrated") {
  FFSystem sys = frustrated_random_system();
  const Projector& p = sys.at(Region::interval(0, 2));
  Interaction q = {LocalOperator{p.mat, p.region, p.site_dim}};
  FFModelReport report = is_ff_model(q, {Region::interval(0, 2), Region::interval(0, 3)});
  REQUIRE_FALSE(report.ok);
  REQUIRE(report.rows[0].epsilon < 1e-10);  // single translate: always minimized
  REQUIRE(report.rows[1].epsilon > 1e-3);
  REQUIRE(report.violations.size() == 1);
}

TEST_CASE("positivity normalization happens before the model test") {
  // shifting the interaction by a constant must not change the verdict
  Interaction q = aklt_interaction();
  Interaction shifted = {make_local(
      Matrix(q.op.mat - 3.0 * Matrix::Identity(q.op.mat.rows(), q.op.mat.cols())),
      q.op.region, q.op.site_dim)};
  FFModelReport report = is_ff_model(shifted, {Region::interval(0, 3)});
  REQUIRE(report.ok);
}

TEST_CASE("system assembly reproduces the stored ground space") {
  FFSystem sys = mps_system(6, aklt_spec());
  Region delta = Region::interval(0, 2);
  for (int n = 2; n <= 6; ++n) {
    Region w = Region::interval(0, n);
    Hamiltonian h = assemble_from_system(sys, delta, w);
    REQUIRE(h.epsilon == 0.0);
    REQUIRE(h.spectrum[0] > -1e-12);
    REQUIRE(h.spectrum[0] < 1e-10);
    // dense diagonalization oracle: the zero cluster has dimension 4 and
    // spans exactly the stored kernel
    double thr = zero_cluster_threshold(h);
    Eigen::Index zeros = 0;
    while (zeros < h.spectrum.size() && h.spectrum[zeros] <= thr) ++zeros;
    REQUIRE(zeros == 4);
    Matrix ground = h.modes.leftCols(zeros);
    Matrix stored = kernel_basis(sys.at(w));
    REQUIRE(op_norm(Matrix(ground * ground.adjoint() - stored * stored.adjoint())) < 1e-8);
  }
}

TEST_CASE("product systems keep the product vector in the kernel") {
  FFSystem sys = product_fixture(4);
  Hamiltonian h = assemble_from_system(sys, Region::interval(0, 2), Region::interval(0, 4));
  Matrix v = kernel_basis(sys.at(Region::interval(0, 4)));
  REQUIRE(op_norm(Matrix(h.h.mat * v)) < 1e-10);
}

TEST_CASE("assembling over the base window returns the projector itself") {
  FFSystem sys = product_fixture(3);
  Region delta = Region::interval(0, 2);
  Hamiltonian h = assemble_from_system(sys, delta, delta);
  REQUIRE(op_norm(Matrix(h.h.mat - sys.at(delta).mat)) < 1e-12);
}

TEST_CASE("system assembly refuses frustrated families") {
  FFSystem sys = frustrated_random_system();
  REQUIRE_THROWS_AS(
      assemble_from_system(sys, Region::interval(0, 2), Region::interval(0, 3)),
      std::invalid_argument);
}

TEST_CASE("supporting projection splits the spectrum at the zero cluster") {
  FFSystem sys = product_fixture(3);
  Region w = Region::interval(0, 3);
  Hamiltonian h = assemble_from_system(sys, Region::interval(0, 2), w);

  Projector supp = supporting_projection(h);
  REQUIRE(projector_residuals(supp).idempotency < 1e-10);
  REQUIRE(supp.corank() == 1);
  REQUIRE(op_norm(Matrix(h.h.mat * kernel_basis(supp))) < 1e-10);

  // a bare projector is its own supporting projection
  Hamiltonian hp;
  const Projector& p = sys.at(w);
  hp.h = LocalOperator{p.mat, w, 2};
  Eigh eg = eigh(p.mat);
  hp.spectrum = eg.values;
  hp.modes = eg.vectors;
  REQUIRE(op_norm(Matrix(supporting_projection(hp).mat - p.mat)) < 1e-10);

  // the zero Hamiltonian supports nothing
  Hamiltonian hz;
  hz.h = LocalOperator{Matrix::Zero(8, 8), w, 2};
  hz.spectrum = RealVector::Zero(8);
  hz.modes = Matrix::Identity(8, 8);
  REQUIRE(supporting_projection(hz).rank() == 0);
  REQUIRE(std::isinf(spectral_gap(hz)));
  REQUIRE(spectral_gap(hp) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("supporting projections of window assemblies form a nested family") {
  FFSystem sys = mps_system(5, aklt_spec());
  Region delta = Region::interval(0, 2);
  std::vector<Projector> ps;
  for (const Region& w : sys.windows) {
    Hamiltonian h = assemble_from_system(sys, delta, w);
    Projector supp = supporting_projection(h);
    ps.push_back(supp);
    // the split reproduces the system projector windowwise
    REQUIRE(subspace_distance(supp, sys.at(w)) < 1e-8);
  }
  FFSystem rebuilt = make_system(3, std::move(ps), "supports");
  REQUIRE(check_ff(rebuilt).ok);
}

TEST_CASE("spectral gap agrees with an independent eigensolver") {
  FFSystem sys = mps_system(4, aklt_spec());
  Hamiltonian h = assemble_from_system(sys, Region::interval(0, 2), Region::interval(0, 4));
  double gap = spectral_gap(h);
  REQUIRE(std::isfinite(gap));
  Eigen::ComplexEigenSolver<Matrix> es(h.h.mat);
  std::vector<double> eigs;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    eigs.push_back(es.eigenvalues()[i].real());
  std::sort(eigs.begin(), eigs.end());
  double thr = zero_cluster_threshold(h);
  double oracle = std::numeric_limits<double>::infinity();
  for (double e : eigs)
    if (e > thr) {
      oracle = e;
      break;
    }
  REQUIRE(gap == Catch::Approx(oracle).margin(1e-9));
}

TEST_CASE("derivations vanish on the identity and on commuting pairs") {
  Interaction q = {make_local(random_hermitian(4, 19), Region::interval(0, 2), 2)};
  Region w = Region::interval(0, 3);
  DerivationResult on_id = derivation_action(q, identity_on(Region::interval(1, 2), 2), w);
  REQUIRE(op_norm(on_id.commutator.mat) < 1e-10);
  REQUIRE(on_id.stabilized);

  RealVector dq(4), da(2);
  dq << 0.3, -1.1, 0.7, 2.0;
  da << 1.5, -0.4;
  Interaction diag_q = {make_local(Matrix(dq.cast<Complex>().asDiagonal()),
                                   Region::interval(0, 2), 2)};
  LocalOperator diag_a = make_local(Matrix(da.cast<Complex>().asDiagonal()),
                                    Region::interval(1, 2), 2);
  DerivationResult on_diag = derivation_action(diag_q, diag_a, w);
  REQUIRE(op_norm(on_diag.commutator.mat) < 1e-10);
  REQUIRE(on_diag.stabilized);
}

TEST_CASE("derivations stabilize only when the window clears the support") {
  Interaction q = {make_local(random_hermitian(4, 23), Region::interval(0, 2), 2)};
  Region w = Region::interval(0, 3);
  Matrix am = random_hermitian(2, 27);

  // interior site: every translate touching the observable already fits
  DerivationResult inner = derivation_action(q, make_local(am, Region::interval(1, 2), 2), w);
  REQUIRE(inner.stabilized);

  // boundary site: the grown window brings in a new crossing term
  DerivationResult edge = derivation_action(q, make_local(am, Region::interval(0, 1), 2), w);
  REQUIRE_FALSE(edge.stabilized);
  REQUIRE(edge.shell_change > 1e-3);

  REQUIRE_THROWS_AS(
      derivation_action(q, make_local(am, Region::interval(4, 5), 2), w),
      std::invalid_argument);
}

TEST_CASE("ground states see nonnegative dissipation") {
  FFSystem sys = mps_system(4, aklt_spec());
  Region w = Region::interval(0, 4);
  Matrix u = kernel_basis(sys.at(w));
  Matrix rho = u * u.adjoint() / static_cast<double>(u.cols());
  Interaction q = aklt_interaction();
  Hamiltonian h = assemble(q, w);
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix am = random_hermitian(3, rng());
    Matrix a = embed(make_local(am, Region::interval(1, 2), 3), w).mat;
    Complex val = (rho * a.adjoint() * commutator(h.h.mat, a)).trace();
    REQUIRE(val.real() > -1e-10);
  }
}
