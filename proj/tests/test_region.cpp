#include "ffp/region.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <set>

using namespace ffp;

namespace {

// Oracle for enumerate_translates: scan every offset in the difference of the
// bounding boxes, independent of the anchor-based implementation.
std::vector<Site> brute_translates(const Region& delta, const Region& lambda) {
  int d = lambda.space_dim();
  Site lo(d, 0), hi(d, 0);
  const auto& ls = lambda.sites();
  const auto& ds = delta.sites();
  for (int i = 0; i < d; ++i) {
    int lmin = ls[0][i], lmax = ls[0][i], dmin = ds[0][i], dmax = ds[0][i];
    for (const Site& s : ls) { lmin = std::min(lmin, s[i]); lmax = std::max(lmax, s[i]); }
    for (const Site& s : ds) { dmin = std::min(dmin, s[i]); dmax = std::max(dmax, s[i]); }
    lo[i] = lmin - dmax;
    hi[i] = lmax - dmin + 1;
  }
  std::vector<Site> out;
  Region scan = Region::box(lo, hi);
  for (const Site& g : scan.sites()) {
    bool ok = true;
    for (const Site& s : ds)
      if (!lambda.contains(site_add(s, g))) { ok = false; break; }
    if (ok) out.push_back(g);
  }
  return out;
}

}  // namespace

TEST_CASE("region construction sorts and validates") {
  Region r(std::vector<Site>{{3}, {1}, {2}});
  REQUIRE(r.sites() == std::vector<Site>{{1}, {2}, {3}});
  REQUIRE(r.size() == 3);
  REQUIRE(r.space_dim() == 1);

  REQUIRE_THROWS_AS(Region(std::vector<Site>{{1}, {1}}), std::invalid_argument);
  REQUIRE_THROWS_AS(Region(std::vector<Site>{{1}, {1, 2}}), std::invalid_argument);

  Region empty;
  REQUIRE(empty.empty());
  REQUIRE(empty.size() == 0);
}

TEST_CASE("interval and box constructors") {
  REQUIRE(Region::interval(0, 3).sites() == std::vector<Site>{{0}, {1}, {2}});
  REQUIRE(Region::interval(2, 2).empty());

  Region b = Region::box({0, 0}, {2, 2});
  REQUIRE(b.sites() == std::vector<Site>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  REQUIRE(Region::box({0, 0}, {0, 3}).empty());
}

TEST_CASE("containment and position lookup") {
  Region r = Region::box({0, 0}, {2, 3});
  REQUIRE(r.contains(Site{1, 2}));
  REQUIRE_FALSE(r.contains(Site{2, 0}));
  REQUIRE(r.contains(Region::box({0, 1}, {2, 3})));
  REQUIRE_FALSE(r.contains(Region::box({0, 0}, {3, 1})));
  REQUIRE(r.position_of({0, 0}) == 0);
  REQUIRE(r.position_of({1, 2}) == 5);
  REQUIRE(r.position_of({5, 5}) == -1);
}

TEST_CASE("translate shifts every site and keeps canonical order") {
  Region r = Region::interval(0, 2);
  REQUIRE(translate(r, {2}) == Region::interval(2, 4));
  REQUIRE(translate(translate(r, {3}), {-3}) == r);

  Region b = Region::box({0, 0}, {2, 2});
  Region t = translate(b, {-1, 5});
  REQUIRE(t.sites() == std::vector<Site>{{-1, 5}, {-1, 6}, {0, 5}, {0, 6}});
  REQUIRE_THROWS_AS(translate(b, {1}), std::invalid_argument);
}

TEST_CASE("enumerate_translates on intervals") {
  auto g = enumerate_translates(Region::interval(0, 2), Region::interval(0, 4));
  REQUIRE(g == std::vector<Site>{{0}, {1}, {2}});
  REQUIRE(enumerate_translates(Region::interval(0, 5), Region::interval(0, 4)).empty());
  REQUIRE_THROWS_AS(enumerate_translates(Region(), Region::interval(0, 4)),
                    std::invalid_argument);
}

TEST_CASE("enumerate_translates on boxes") {
  auto g = enumerate_translates(Region::box({0, 0}, {2, 2}), Region::box({0, 0}, {3, 3}));
  REQUIRE(g == std::vector<Site>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
}

TEST_CASE("enumerate_translates agrees with bounding-box oracle") {
  // Irregular shapes, including an L and a region with a hole.
  Region ell(std::vector<Site>{{0, 0}, {1, 0}, {1, 1}});
  Region big = Region::box({0, 0}, {4, 3});
  Region holed(std::vector<Site>{{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 2},
                                 {2, 0}, {2, 1}, {2, 2}, {3, 1}});
  for (const Region& delta : {ell, Region::box({0, 0}, {1, 2})}) {
    for (const Region& lambda : {big, holed}) {
      auto fast = enumerate_translates(delta, lambda);
      auto slow = brute_translates(delta, lambda);
      REQUIRE(fast == slow);
    }
  }
}

TEST_CASE("translate of every enumerated offset is contained") {
  Region delta(std::vector<Site>{{0, 0}, {1, 1}});
  Region lambda = Region::box({0, 0}, {3, 3});
  for (const Site& g : enumerate_translates(delta, lambda))
    REQUIRE(lambda.contains(translate(delta, g)));
}

TEST_CASE("half-lattice regions and their boundary") {
  HalfLatticeRegion h(Region::interval(0, 4));
  REQUIRE(boundary(h) == Region::interval(0, 1));

  HalfLatticeRegion inner(Region::interval(2, 5));
  REQUIRE(boundary(inner).empty());

  REQUIRE_THROWS_AS(HalfLatticeRegion(Region::interval(-1, 3)), std::invalid_argument);

  HalfLatticeRegion strip(Region::box({0, -1}, {2, 1}));
  REQUIRE(boundary(strip) == Region(std::vector<Site>{{0, -1}, {0, 0}}));
}

TEST_CASE("window families") {
  auto w = interval_windows(3);
  REQUIRE(w.size() == 6);  // [0,1) [0,2) [0,3) [1,2) [1,3) [2,3)
  std::set<Region> ws(w.begin(), w.end());
  REQUIRE(ws.count(Region::interval(1, 3)) == 1);

  auto bw = box_windows({2, 2});
  REQUIRE(bw.size() == 9);  // 3 x-intervals times 3 y-intervals
  for (const Region& r : bw) REQUIRE(Region::box({0, 0}, {2, 2}).contains(r));
}
