#include "ffp/states.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ffp/fixtures.hpp"

using namespace ffp;

namespace {

Vector basis_vector(int d, int k) {
  Vector v = Vector::Zero(d);
  v[k] = 1.0;
  return v;
}

std::vector<Region> interval_ladder(int n) {
  std::vector<Region> out;
  for (int m = 1; m <= n; ++m) out.push_back(Region::interval(0, m));
  return out;
}

Matrix random_hermitian(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = Complex(g(rng), g(rng));
  return Matrix(0.5 * (m + m.adjoint()));
}

}  // namespace

TEST_CASE("window states reject malformed marginals") {
  Region w1 = Region::interval(0, 1), w2 = Region::interval(0, 2);
  Matrix rho1 = Matrix::Zero(2, 2);
  rho1(0, 0) = 1.0;
  Matrix rho2 = Matrix::Zero(4, 4);
  rho2(0, 0) = 1.0;

  REQUIRE_NOTHROW(make_window_state(2, {{w1, rho1}, {w2, rho2}}));

  Matrix skew = rho1;
  skew(0, 1) = Complex(0, 0.3);
  REQUIRE_THROWS_AS(make_window_state(2, {{w1, skew}}), std::invalid_argument);

  REQUIRE_THROWS_AS(make_window_state(2, {{w1, Matrix(2.0 * rho1)}}), std::invalid_argument);

  Matrix indef = Matrix::Zero(2, 2);
  indef(0, 0) = 1.5;
  indef(1, 1) = -0.5;
  REQUIRE_THROWS_AS(make_window_state(2, {{w1, indef}}), std::invalid_argument);

  // marginal of rho2 is |0><0| at site 0, so claiming |1><1| there must fail
  Matrix wrong = Matrix::Zero(2, 2);
  wrong(1, 1) = 1.0;
  REQUIRE_THROWS_AS(make_window_state(2, {{w1, wrong}, {w2, rho2}}), std::invalid_argument);
}

TEST_CASE("ground-space mixtures have consistent marginals by construction") {
  FFSystem sys = mps_system(4, aklt_spec());
  WindowState omega = kernel_mixture(sys);
  REQUIRE(omega.windows.size() == sys.windows.size());
  const Matrix& top = omega.at(Region::interval(0, 4));
  REQUIRE(std::abs(top.trace().real() - 1.0) < 1e-12);
  // explicit marginal re-check on one pair
  Matrix marg = partial_trace(top, Region::interval(0, 4), Region::interval(1, 3), 3);
  REQUIRE(op_norm(Matrix(marg - omega.at(Region::interval(1, 3)))) < 1e-12);
}

TEST_CASE("mixtures need a top window and a nonzero ground space") {
  // two incomparable windows: no top
  Vector e0 = basis_vector(2, 0);
  FFSystem prod = product_system(e0, Site{3});
  std::vector<Projector> ps{prod.at(Region::interval(0, 2)), prod.at(Region::interval(1, 3))};
  FFSystem no_top = make_system(2, std::move(ps), "partial");
  REQUIRE_THROWS_AS(kernel_mixture(no_top), std::invalid_argument);

  // saturated top: empty kernel
  FFSystem join = system_join(product_system(e0, Site{2}),
                              product_system(basis_vector(2, 1), Site{2}));
  REQUIRE_THROWS_AS(kernel_mixture(join), std::invalid_argument);
}

TEST_CASE("ground-state verification agrees along both routes") {
  Vector e0 = basis_vector(2, 0);
  FFSystem prod = product_system(e0, Site{3});
  WindowState own = product_state(e0, prod.windows);
  GroundReport good = ff_ground_state_report(own, prod);
  REQUIRE(good.ok);
  REQUIRE(good.support_ok);
  REQUIRE(good.paths_agree);
  REQUIRE(is_ff_ground_state(own, prod));

  WindowState mixed = maximally_mixed(2, prod.windows);
  GroundReport bad = ff_ground_state_report(mixed, prod);
  REQUIRE_FALSE(bad.ok);
  REQUIRE_FALSE(bad.support_ok);
  REQUIRE(bad.paths_agree);
  REQUIRE(bad.worst_trace > 0.1);

  FFSystem aklt = mps_system(4, aklt_spec());
  REQUIRE(is_ff_ground_state(kernel_mixture(aklt), aklt));

  WindowState partial = product_state(e0, {Region::interval(0, 1)});
  REQUIRE_THROWS_AS(is_ff_ground_state(partial, prod), std::invalid_argument);
}

TEST_CASE("support order is reflexive and respects mixing") {
  Vector e0 = basis_vector(2, 0);
  std::vector<Region> windows = interval_ladder(3);
  WindowState pure = product_state(e0, windows);
  WindowState mixed = maximally_mixed(2, windows);
  REQUIRE(support_leq(pure, pure));
  REQUIRE(support_leq(pure, mixed));
  REQUIRE_FALSE(support_leq(mixed, pure));
  WindowState other = product_state(e0, interval_ladder(2));
  REQUIRE_THROWS_AS(support_leq(pure, other), std::invalid_argument);
}

TEST_CASE("states below a ground state are ground states") {
  FFSystem meet = two_product_meet(3);
  WindowState omega = kernel_mixture(meet);
  WindowState below = product_state(basis_vector(2, 0), meet.windows);
  REQUIRE(is_ff_ground_state(omega, meet));
  REQUIRE(support_leq(below, omega));
  REQUIRE(is_ff_ground_state(below, meet));
}

TEST_CASE("localized units recover the product system from its state") {
  Vector e0 = basis_vector(2, 0);
  std::vector<Region> ladder = interval_ladder(3);
  WindowState omega = product_state(e0, ladder);
  HereditaryTruncation t = localized_unit(omega);
  REQUIRE(t.monotone.ok);
  FFSystem prod = product_system(e0, Site{3});
  for (const Region& w : ladder)
    REQUIRE(subspace_distance(t.unit.at(w), prod.at(w)) < 1e-10);
}

TEST_CASE("maximally mixed states have trivial localized units") {
  WindowState omega = maximally_mixed(2, interval_ladder(2));
  HereditaryTruncation t = localized_unit(omega);
  for (const Region& w : t.ladder) REQUIRE(t.unit.at(w).rank() == 0);
}

TEST_CASE("localized units of the spin-1 ground state recover its system") {
  FFSystem sys = mps_system(5, aklt_spec());
  std::vector<Region> ladder;
  for (int n = 2; n <= 5; ++n) ladder.push_back(Region::interval(0, n));
  WindowState omega = restrict_state(kernel_mixture(sys), ladder);
  HereditaryTruncation t = localized_unit(omega);
  REQUIRE(t.monotone.ok);
  for (const Region& w : ladder)
    REQUIRE(subspace_distance(t.unit.at(w), sys.at(w)) < 1e-8);
  // the unit family is itself a nested projector family
  std::vector<Projector> ps;
  for (const Region& w : ladder) ps.push_back(t.unit.at(w));
  FFSystem rebuilt = make_system(3, std::move(ps), "localized-units");
  REQUIRE(check_ff(rebuilt).ok);
}

TEST_CASE("localized units demand an inclusion chain and consistent marginals") {
  Vector e0 = basis_vector(2, 0);
  WindowState omega = product_state(e0, {Region::interval(0, 2), Region::interval(1, 3)});
  REQUIRE_THROWS_AS(localized_unit(omega), std::invalid_argument);
}

TEST_CASE("truncations from localized units sit inside their top corner") {
  Vector e0 = basis_vector(2, 0);
  WindowState omega = product_state(e0, interval_ladder(3));
  HereditaryTruncation t = localized_unit(omega);
  for (std::size_t depth = 1; depth <= 3; ++depth) {
    double r = property_f_residual(t, 3);
    REQUIRE(r < 1e-12);
    (void)depth;
  }
  // a single-window ladder is always inside its own corner
  WindowState single = product_state(e0, {Region::interval(0, 2)});
  REQUIRE(property_f_residual(localized_unit(single), 1) < 1e-12);
}

TEST_CASE("twisting the largest unit breaks the union containment") {
  Vector e0 = basis_vector(2, 0);
  FFSystem prod = product_system(e0, Site{3});
  std::vector<Projector> units;
  for (int m = 1; m <= 3; ++m) units.push_back(prod.at(Region::interval(0, m)));
  // conjugate the top unit by a bit flip on the first site: its kernel moves
  // to |100>, which the smaller units do not annihilate
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  Matrix u = kron(x, Matrix::Identity(4, 4));
  units[2] = Projector{Matrix(u * units[2].mat * u.adjoint()), units[2].region, 2, nullptr};
  HereditaryTruncation t = assemble_truncation(std::move(units));
  REQUIRE_FALSE(t.monotone.ok);
  REQUIRE(property_f_residual(t, 3) > 1e-2);

  // the honest family, by contrast, is monotone with zero residual
  std::vector<Projector> honest;
  for (int m = 1; m <= 3; ++m) honest.push_back(prod.at(Region::interval(0, m)));
  HereditaryTruncation h = assemble_truncation(std::move(honest));
  REQUIRE(h.monotone.ok);
  REQUIRE(property_f_residual(h, 3) < 1e-12);
}

TEST_CASE("depth-limited searches can miss the containing corner") {
  Vector e0 = basis_vector(2, 0);
  WindowState omega = product_state(e0, interval_ladder(3));
  HereditaryTruncation t = localized_unit(omega);
  // w contains terms acting on sites outside the first window
  REQUIRE(property_f_residual(t, 1) > 1e-3);
  REQUIRE(property_f_residual(t, 3) < 1e-12);
}

TEST_CASE("rank-one complements give exactly zero LTQO norms") {
  Vector e0 = basis_vector(2, 0);
  FFSystem prod = product_system(e0, Site{4});
  std::mt19937_64 rng(7);
  for (int n = 2; n <= 4; ++n) {
    LocalOperator a = make_local(random_hermitian(2, rng()), Region::interval(0, 1), 2);
    REQUIRE(ltqo_norm(prod, a, Region::interval(0, n)) < 1e-12);
  }
}

TEST_CASE("the identity observable has zero LTQO norm") {
  FFSystem sys = mps_system(4, aklt_spec());
  LocalOperator one = identity_on(Region::interval(1, 2), 3);
  REQUIRE(ltqo_norm(sys, one, Region::interval(0, 4)) < 1e-12);
}

TEST_CASE("degenerate kernels keep LTQO norms away from zero") {
  FFSystem meet = two_product_meet(4);
  Matrix z(2, 2);
  z << 1, 0, 0, -1;
  LocalOperator a = make_local(z, Region::interval(0, 1), 2);
  for (int n = 2; n <= 4; ++n) {
    Region w = Region::interval(0, n);
    double norm = ltqo_norm(meet, a, w);
    // oracle: kernel {|0..0>, |1..1>} compresses a to diag(1,-1), mean 0
    REQUIRE(norm == Catch::Approx(1.0).margin(1e-10));
    REQUIRE(norm >= 0.4);
  }
}

TEST_CASE("LTQO norm preconditions") {
  Vector e0 = basis_vector(2, 0);
  FFSystem join = system_join(product_system(e0, Site{2}),
                              product_system(basis_vector(2, 1), Site{2}));
  LocalOperator a = make_local(random_hermitian(2, 11), Region::interval(0, 1), 2);
  REQUIRE_THROWS_AS(ltqo_norm(join, a, Region::interval(0, 2)), std::invalid_argument);

  FFSystem prod = product_system(e0, Site{3});
  LocalOperator far = make_local(random_hermitian(2, 13), Region::interval(2, 3), 2);
  REQUIRE_THROWS_AS(ltqo_norm(prod, far, Region::interval(0, 2)), std::invalid_argument);
}

TEST_CASE("observable compressions on the spin chain lose structure with distance") {
  FFSystem sys = mps_system(6, aklt_spec());
  Matrix sz = Matrix::Zero(3, 3);
  sz(0, 0) = 1.0;
  sz(2, 2) = -1.0;
  LocalOperator a = make_local(sz, Region::interval(0, 1), 3);
  std::vector<double> norms;
  for (int n = 2; n <= 6; ++n)
    norms.push_back(ltqo_norm(sys, translate(a, Site{n / 2}), Region::interval(0, n)));
  for (std::size_t i = 0; i + 2 <= norms.size(); ++i)
    REQUIRE(norms[i + 1] <= norms[i] + 1e-12);
  REQUIRE(norms.back() < norms.front());
}

TEST_CASE("scans aggregate norms and the uniqueness indicator") {
  Vector e0 = basis_vector(2, 0);
  FFSystem prod = product_system(e0, Site{4});
  std::vector<Region> ladder;
  for (int n = 2; n <= 4; ++n) ladder.push_back(Region::interval(0, n));
  Matrix z(2, 2);
  z << 1, 0, 0, -1;
  std::vector<LocalOperator> obs{make_local(z, Region::interval(0, 1), 2),
                                 identity_on(Region::interval(0, 1), 2)};
  LtqoScan scan = ltqo_scan(prod, obs, ladder);
  REQUIRE(scan.unique_indicator);
  for (const LtqoRow& row : scan.rows) {
    REQUIRE(row.corank == 1);
    for (double v : row.norms) REQUIRE(v < 1e-12);
  }

  FFSystem aklt = mps_system(4, aklt_spec());
  std::vector<Region> ladder3;
  for (int n = 2; n <= 4; ++n) ladder3.push_back(Region::interval(0, n));
  Matrix sz = Matrix::Zero(3, 3);
  sz(0, 0) = 1.0;
  sz(2, 2) = -1.0;
  LtqoScan scan3 = ltqo_scan(aklt, {make_local(sz, Region::interval(0, 1), 3)}, ladder3);
  REQUIRE_FALSE(scan3.unique_indicator);
  for (const LtqoRow& row : scan3.rows) REQUIRE(row.corank == 4);

  FFSystem meet = two_product_meet(4);
  LtqoScan scan2 = ltqo_scan(meet, {make_local(z, Region::interval(0, 1), 2)},
                             {Region::interval(0, 2), Region::interval(0, 3)});
  REQUIRE_FALSE(scan2.unique_indicator);
  for (const LtqoRow& row : scan2.rows) REQUIRE(row.norms[0] >= 0.4);

  REQUIRE_THROWS_AS(
      ltqo_scan(prod, obs, {Region::interval(0, 3), Region::interval(0, 2)}),
      std::invalid_argument);
}
