#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ffp {

// Site in ℤ^d.  Comparisons are lexicographic (std::vector's operator<),
// which is the canonical site order; every tensor-leg ordering downstream
// derives from it.  Lexicographic order is invariant under uniform shifts,
// so translating a region never permutes legs.
using Site = std::vector<int>;

inline Site site_add(const Site& a, const Site& b) {
  if (a.size() != b.size()) throw std::invalid_argument("site_add: dimension mismatch");
  Site out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline Site site_sub(const Site& a, const Site& b) {
  if (a.size() != b.size()) throw std::invalid_argument("site_sub: dimension mismatch");
  Site out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

// Finite subset of ℤ^d, stored sorted and duplicate-free.
class Region {
 public:
  Region() = default;

  explicit Region(std::vector<Site> sites) : sites_(std::move(sites)) {
    if (sites_.empty()) return;
    space_dim_ = static_cast<int>(sites_[0].size());
    for (const Site& s : sites_)
      if (static_cast<int>(s.size()) != space_dim_)
        throw std::invalid_argument("Region: sites of mixed dimension");
    std::sort(sites_.begin(), sites_.end());
    if (std::adjacent_find(sites_.begin(), sites_.end()) != sites_.end())
      throw std::invalid_argument("Region: duplicate site");
  }

  // Half-open interval {a, ..., b-1} in ℤ.
  static Region interval(int a, int b) {
    if (a > b) throw std::invalid_argument("Region::interval: a > b");
    std::vector<Site> s;
    s.reserve(static_cast<std::size_t>(b - a));
    for (int x = a; x < b; ++x) s.push_back({x});
    return Region(std::move(s));
  }

  // Half-open box ∏ [lo_i, hi_i) in ℤ^d.
  static Region box(const Site& lo, const Site& hi) {
    if (lo.size() != hi.size()) throw std::invalid_argument("Region::box: dimension mismatch");
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (lo[i] > hi[i]) throw std::invalid_argument("Region::box: lo > hi");
    std::size_t total = 1;
    for (std::size_t i = 0; i < lo.size(); ++i)
      total *= static_cast<std::size_t>(hi[i] - lo[i]);
    std::vector<Site> out;
    out.reserve(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
      Site s(lo.size());
      std::size_t rem = idx;
      for (std::size_t i = lo.size(); i-- > 0;) {
        std::size_t w = static_cast<std::size_t>(hi[i] - lo[i]);
        s[i] = lo[i] + static_cast<int>(rem % w);
        rem /= w;
      }
      out.push_back(std::move(s));
    }
    return Region(std::move(out));
  }

  const std::vector<Site>& sites() const { return sites_; }
  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  int space_dim() const { return space_dim_; }

  bool contains(const Site& s) const {
    return std::binary_search(sites_.begin(), sites_.end(), s);
  }

  bool contains(const Region& other) const {
    return std::includes(sites_.begin(), sites_.end(), other.sites_.begin(),
                         other.sites_.end());
  }

  // Index of s in the canonical order, -1 if absent.
  std::ptrdiff_t position_of(const Site& s) const {
    auto it = std::lower_bound(sites_.begin(), sites_.end(), s);
    if (it == sites_.end() || *it != s) return -1;
    return it - sites_.begin();
  }

  friend bool operator==(const Region& a, const Region& b) { return a.sites_ == b.sites_; }
  friend bool operator!=(const Region& a, const Region& b) { return !(a == b); }
  friend bool operator<(const Region& a, const Region& b) { return a.sites_ < b.sites_; }

 private:
  std::vector<Site> sites_;
  int space_dim_ = 0;
};

inline Region translate(const Region& r, const Site& g) {
  if (r.empty()) return r;
  if (static_cast<int>(g.size()) != r.space_dim())
    throw std::invalid_argument("translate: shift dimension mismatch");
  std::vector<Site> out;
  out.reserve(r.size());
  for (const Site& s : r.sites()) out.push_back(site_add(s, g));
  return Region(std::move(out));
}

// All g with translate(delta, g) ⊆ lambda, in canonical order.
inline std::vector<Site> enumerate_translates(const Region& delta, const Region& lambda) {
  if (delta.empty()) throw std::invalid_argument("enumerate_translates: empty base region");
  if (lambda.empty()) return {};
  if (delta.space_dim() != lambda.space_dim())
    throw std::invalid_argument("enumerate_translates: dimension mismatch");
  const Site& anchor = delta.sites().front();
  std::vector<Site> out;
  for (const Site& s : lambda.sites()) {
    Site g = site_sub(s, anchor);
    bool ok = true;
    for (const Site& d : delta.sites())
      if (!lambda.contains(site_add(d, g))) { ok = false; break; }
    if (ok) out.push_back(g);
  }
  return out;  // lambda's sites are sorted, so the g's come out sorted
}

// Region inside the half lattice {x ∈ ℤ^d : x_1 ≥ 0}.
class HalfLatticeRegion {
 public:
  explicit HalfLatticeRegion(Region r) : region_(std::move(r)) {
    for (const Site& s : region_.sites())
      if (s[0] < 0)
        throw std::invalid_argument("HalfLatticeRegion: site with negative first coordinate");
  }
  const Region& region() const { return region_; }

 private:
  Region region_;
};

// Sites of Λ on the boundary hyperplane x_1 = 0.  May be empty.
inline Region boundary(const HalfLatticeRegion& h) {
  std::vector<Site> out;
  for (const Site& s : h.region().sites())
    if (s[0] == 0) out.push_back(s);
  return Region(std::move(out));
}

// All intervals [a, b) ⊆ [0, n) with b > a.
inline std::vector<Region> interval_windows(int n) {
  std::vector<Region> out;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b <= n; ++b) out.push_back(Region::interval(a, b));
  return out;
}

// All sub-boxes ∏ [a_i, b_i) of the box [0, extent) with b_i > a_i.
inline std::vector<Region> box_windows(const Site& extent) {
  std::vector<std::pair<int, int>> cur(extent.size());
  std::vector<Region> out;
  std::function<void(std::size_t)> rec = [&](std::size_t axis) {
    if (axis == extent.size()) {
      Site lo(extent.size()), hi(extent.size());
      for (std::size_t i = 0; i < extent.size(); ++i) {
        lo[i] = cur[i].first;
        hi[i] = cur[i].second;
      }
      out.push_back(Region::box(lo, hi));
      return;
    }
    for (int a = 0; a < extent[axis]; ++a)
      for (int b = a + 1; b <= extent[axis]; ++b) {
        cur[axis] = {a, b};
        rec(axis + 1);
      }
  };
  if (!extent.empty()) rec(0);
  return out;
}

}  // namespace ffp
