#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ffp {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Default tolerance for verification residuals (FF checks, leq, equivariance).
inline constexpr double default_tol = 1e-9;

// Rank decisions everywhere: keep singular/eigen values > rel * largest,
// with an absolute floor so an all-tiny spectrum counts as rank 0.
struct RankPolicy {
  double rel = 1e-10;
  double abs = 1e-12;

  double threshold(double largest) const {
    double t = rel * largest;
    return t > abs ? t : abs;
  }

  Eigen::Index rank(const RealVector& values) const {
    if (values.size() == 0) return 0;
    double t = threshold(values.maxCoeff());
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < values.size(); ++i)
      if (values[i] > t) ++r;
    return r;
  }
};

inline const RankPolicy& rank_policy() {
  static RankPolicy p;
  return p;
}

// Hard cap on dense Hilbert space dimension (d^|Λ|).  2^14 corresponds to the
// documented 14-site limit for d = 2.  Configurable; exceeding it is an error.
inline std::size_t& max_hilbert_dim() {
  static std::size_t cap = 16384;
  return cap;
}

inline std::size_t hilbert_dim(int site_dim, std::size_t nsites) {
  if (site_dim < 1) throw std::invalid_argument("hilbert_dim: site_dim must be >= 1");
  std::size_t cap = max_hilbert_dim();
  std::size_t dim = 1;
  for (std::size_t i = 0; i < nsites; ++i) {
    dim *= static_cast<std::size_t>(site_dim);
    if (dim > cap)
      throw std::domain_error("hilbert_dim: d^n = " + std::to_string(site_dim) + "^" +
                              std::to_string(nsites) + " exceeds the configured cap " +
                              std::to_string(cap));
  }
  return dim;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

namespace detail {

// splitmix64; used for deterministic non-degenerate start vectors.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline Vector deterministic_unit_vector(Eigen::Index n, std::uint64_t seed) {
  Vector v(n);
  std::uint64_t s = seed;
  for (Eigen::Index i = 0; i < n; ++i) {
    double re = static_cast<double>(splitmix64(s) >> 11) / 9007199254740992.0 - 0.5;
    double im = static_cast<double>(splitmix64(s) >> 11) / 9007199254740992.0 - 0.5;
    v[i] = Complex(re, im);
  }
  double nv = v.norm();
  if (nv == 0.0) { v.setOnes(); nv = v.norm(); }
  return v / nv;
}

}  // namespace detail

// Spectral norm by power iteration on A†A.  Deterministic start, monotone
// lower-bounding estimate; also floored by ‖A‖_F / sqrt(min(m,n)).  Callers
// compare against thresholds ~1e-9 while true residuals sit at ~1e-13 or
// ~1e-3, so the one-sided error cannot flip a verdict.
inline double op_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  double fro = a.norm();
  if (fro == 0.0) return 0.0;
  Eigen::Index m = a.rows(), n = a.cols();
  double floor_est = fro / std::sqrt(static_cast<double>(std::min(m, n)));
  Vector v = detail::deterministic_unit_vector(n, 0x5eedull);
  double sigma = 0.0;
  for (int it = 0; it < 200; ++it) {
    Vector w = a * v;
    double s = w.norm();
    if (s < 1e-300) return floor_est;
    Vector u = a.adjoint() * w;
    double un = u.norm();
    if (un < 1e-300) return std::max(s, floor_est);
    v = u / un;
    double prev = sigma;
    sigma = un / s;  // ‖A†Av‖/‖Av‖ -> largest singular value from below
    if (it > 4 && std::abs(sigma - prev) <= 1e-9 * std::max(1.0, sigma)) break;
  }
  return std::max(sigma, floor_est);
}

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

// Hermitian eigendecomposition, ascending eigenvalues.
struct Eigh {
  RealVector values;
  Matrix vectors;
};

inline Eigh eigh(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigh: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

// Ordered parallel map: fn(i) for i in [0,n), results merged by index, so the
// outcome is independent of the job count.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  std::atomic<std::size_t> next{0};
  for (std::size_t t = 0; t < nthreads; ++t)
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  for (auto& th : pool) th.join();
}

}  // namespace ffp
