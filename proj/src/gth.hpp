#pragma once
// Subtraction-free inverse of a grounded weighted Laplacian plus a diagonal shift.
// Internal header; instantiated for double and __float128.

#include <cmath>
#include <utility>
#include <vector>

#include "feyn/errors.hpp"

namespace feyn::detail {

// per edge: the two relative-vertex ends, -1 for the ground
using EdgeEnds = std::vector<std::pair<int, int>>;

template <class T>
struct GthResult {
  double log_det = 0;
  std::vector<T> inverse;  // row-major n x n
};

template <class T>
GthResult<T> gth_inverse(const EdgeEnds& ends, int n, const double* t, double edge_scale, double shift) {
  std::vector<T> c(n * n, T(0)), excess(n, T(shift)), pivot(n), lower(n * n, T(0));
  for (size_t e = 0; e < ends.size(); ++e) {
    auto [a, b] = ends[e];
    const T w = T(edge_scale) / T(t[e]);
    if (a >= 0 && b >= 0) {
      c[a * n + b] += w;
      c[b * n + a] += w;
    } else if (a >= 0 || b >= 0) {
      excess[a >= 0 ? a : b] += w;
    }
  }
  GthResult<T> out;
  for (int p = 0; p < n; ++p) {
    T dp = excess[p];
    for (int j = p + 1; j < n; ++j) dp += c[p * n + j];
    if (!(dp > T(0))) throw Error(ErrorKind::Assertion, "singular shifted Laplacian");
    pivot[p] = dp;
    out.log_det += std::log(static_cast<double>(dp));
    for (int i = p + 1; i < n; ++i) {
      if (c[i * n + p] == T(0)) continue;
      const T f = c[i * n + p] / dp;
      lower[i * n + p] = f;
      excess[i] += f * excess[p];
      for (int j = p + 1; j < n; ++j)
        if (j != i) c[i * n + j] += f * c[p * n + j];
    }
  }
  out.inverse.assign(n * n, T(0));
  std::vector<T> x(n);
  for (int col = 0; col < n; ++col) {
    for (int i = 0; i < n; ++i) x[i] = T(i == col ? 1 : 0);
    for (int i = 0; i < n; ++i)
      for (int p = 0; p < i; ++p) x[i] += lower[i * n + p] * x[p];
    for (int p = n - 1; p >= 0; --p) {
      x[p] /= pivot[p];
      for (int i = p + 1; i < n; ++i) x[p] += lower[i * n + p] * x[i];
    }
    for (int i = 0; i < n; ++i) out.inverse[i * n + col] = x[i];
  }
  return out;
}

inline EdgeEnds edge_ends(const std::vector<std::vector<double>>& rho) {
  EdgeEnds ends;
  for (auto& row : rho) {
    int k[2] = {-1, -1}, c = 0;
    for (int i = 0; i < static_cast<int>(row.size()) && c < 2; ++i)
      if (row[i] != 0) k[c++] = i;
    ends.emplace_back(k[0], k[1]);
  }
  return ends;
}

}  // namespace feyn::detail
