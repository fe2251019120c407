#pragma once

#include "ffp/common.hpp"
#include "ffp/region.hpp"

namespace ffp {

// Operator on H_Λ = (ℂ^d)^⊗|Λ|.  Tensor legs follow the canonical site order;
// the first site is the most significant digit of the basis index.
struct LocalOperator {
  Matrix mat;
  Region region;
  int site_dim = 0;
};

inline LocalOperator make_local(Matrix m, Region r, int site_dim) {
  std::size_t d = hilbert_dim(site_dim, r.size());
  if (m.rows() != static_cast<Eigen::Index>(d) || m.cols() != static_cast<Eigen::Index>(d))
    throw std::invalid_argument("make_local: matrix is " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + ", region needs " + std::to_string(d));
  return {std::move(m), std::move(r), site_dim};
}

inline LocalOperator identity_on(Region r, int site_dim) {
  std::size_t d = hilbert_dim(site_dim, r.size());
  return {Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)),
          std::move(r), site_dim};
}

// Translating a region shifts all sites uniformly, which preserves the
// canonical (lexicographic) order, so the matrix carries over unchanged.
inline LocalOperator translate(const LocalOperator& a, const Site& g) {
  return {a.mat, translate(a.region, g), a.site_dim};
}

namespace detail {

struct EmbedIndex {
  std::vector<std::size_t> sub_base_row;  // d^m entries: Ξ-index contribution of each Λ-index
  std::vector<std::size_t> rest_offsets;  // d^(n-m) entries: contribution of the complement
  std::size_t big_dim;
};

inline EmbedIndex embed_index(const Region& sub, const Region& big, int site_dim) {
  std::size_t n = big.size(), m = sub.size();
  std::size_t big_dim = hilbert_dim(site_dim, n);
  std::vector<std::size_t> stride(n);
  {
    std::size_t s = 1;
    for (std::size_t p = n; p-- > 0;) {
      stride[p] = s;
      s *= static_cast<std::size_t>(site_dim);
    }
  }
  std::vector<std::size_t> pos(m);
  std::vector<bool> taken(n, false);
  for (std::size_t i = 0; i < m; ++i) {
    std::ptrdiff_t p = big.position_of(sub.sites()[i]);
    if (p < 0) throw std::invalid_argument("embed: region is not contained in the target");
    pos[i] = static_cast<std::size_t>(p);
    taken[pos[i]] = true;
  }
  std::size_t sub_dim = hilbert_dim(site_dim, m);
  EmbedIndex out;
  out.big_dim = big_dim;
  out.sub_base_row.assign(sub_dim, 0);
  for (std::size_t a = 0; a < sub_dim; ++a) {
    std::size_t rem = a, base = 0;
    for (std::size_t i = m; i-- > 0;) {
      base += (rem % site_dim) * stride[pos[i]];
      rem /= site_dim;
    }
    out.sub_base_row[a] = base;
  }
  std::vector<std::size_t> rest;
  for (std::size_t p = 0; p < n; ++p)
    if (!taken[p]) rest.push_back(p);
  std::size_t rest_dim = big_dim / sub_dim;
  out.rest_offsets.assign(rest_dim, 0);
  for (std::size_t r = 0; r < rest_dim; ++r) {
    std::size_t rem = r, off = 0;
    for (std::size_t i = rest.size(); i-- > 0;) {
      off += (rem % site_dim) * stride[rest[i]];
      rem /= site_dim;
    }
    out.rest_offsets[r] = off;
  }
  return out;
}

}  // namespace detail

// a ⊗ 1 on H_into, with legs interleaved per the canonical site order.
inline LocalOperator embed(const LocalOperator& a, const Region& into) {
  if (a.region == into) return {a.mat, into, a.site_dim};
  auto ix = detail::embed_index(a.region, into, a.site_dim);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(ix.big_dim),
                            static_cast<Eigen::Index>(ix.big_dim));
  Eigen::Index sub_dim = a.mat.rows();
  for (Eigen::Index r = 0; r < sub_dim; ++r)
    for (Eigen::Index c = 0; c < sub_dim; ++c) {
      Complex v = a.mat(r, c);
      if (v == Complex(0, 0)) continue;
      std::size_t br = ix.sub_base_row[static_cast<std::size_t>(r)];
      std::size_t bc = ix.sub_base_row[static_cast<std::size_t>(c)];
      for (std::size_t off : ix.rest_offsets)
        out(static_cast<Eigen::Index>(br + off), static_cast<Eigen::Index>(bc + off)) = v;
    }
  return {std::move(out), into, a.site_dim};
}

// (a ⊗ 1) · x without materializing the embedded operator.  x has
// hilbert_dim(site_dim, |into|) rows; any number of columns.
inline Matrix apply_embedded(const LocalOperator& a, const Region& into, const Matrix& x) {
  auto ix = detail::embed_index(a.region, into, a.site_dim);
  if (x.rows() != static_cast<Eigen::Index>(ix.big_dim))
    throw std::invalid_argument("apply_embedded: row count mismatch");
  Matrix y = Matrix::Zero(x.rows(), x.cols());
  Eigen::Index sub_dim = a.mat.rows();
  for (Eigen::Index r = 0; r < sub_dim; ++r)
    for (Eigen::Index c = 0; c < sub_dim; ++c) {
      Complex v = a.mat(r, c);
      if (v == Complex(0, 0)) continue;
      std::size_t br = ix.sub_base_row[static_cast<std::size_t>(r)];
      std::size_t bc = ix.sub_base_row[static_cast<std::size_t>(c)];
      for (std::size_t off : ix.rest_offsets)
        y.row(static_cast<Eigen::Index>(br + off)) +=
            v * x.row(static_cast<Eigen::Index>(bc + off));
    }
  return y;
}

// Trace out full∖keep.  Result lives on keep with its own canonical order.
inline Matrix partial_trace(const Matrix& m, const Region& full, const Region& keep,
                            int site_dim) {
  auto ix = detail::embed_index(keep, full, site_dim);
  if (m.rows() != static_cast<Eigen::Index>(ix.big_dim) || m.rows() != m.cols())
    throw std::invalid_argument("partial_trace: matrix does not match the full region");
  std::size_t keep_dim = ix.sub_base_row.size();
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(keep_dim),
                            static_cast<Eigen::Index>(keep_dim));
  for (std::size_t r = 0; r < keep_dim; ++r)
    for (std::size_t c = 0; c < keep_dim; ++c) {
      Complex acc(0, 0);
      for (std::size_t off : ix.rest_offsets)
        acc += m(static_cast<Eigen::Index>(ix.sub_base_row[r] + off),
                 static_cast<Eigen::Index>(ix.sub_base_row[c] + off));
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = acc;
    }
  return out;
}

// Tr(a·b) without forming the product.
inline Complex trace_product(const Matrix& a, const Matrix& b) {
  return (a.array() * b.transpose().array()).sum();
}

}  // namespace ffp
