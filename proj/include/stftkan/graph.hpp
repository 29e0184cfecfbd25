#pragma once

#include "stftkan/core.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace stftkan {

struct KnnGraph {
  Eigen::Index n = 0;
  int k = 0;
  IndexMatrix neighbor_idx;  // n x k, no self-loops, ties broken by lowest index
};

// Exact brute-force Euclidean k-NN; deterministic by (distance, index) order.
template <typename S>
KnnGraph knn(const Matrix<S>& points, int k) {
  const Eigen::Index n = points.rows();
  if (k < 1 || n <= k) throw ConfigError("knn: need n > k >= 1");
  KnnGraph g;
  g.n = n;
  g.k = k;
  g.neighbor_idx.resize(n, k);
  std::vector<std::pair<S, Eigen::Index>> dist;
  dist.reserve(n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    dist.clear();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      dist.emplace_back((points.row(i) - points.row(j)).squaredNorm(), j);
    }
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    for (int c = 0; c < k; ++c) g.neighbor_idx(i, c) = dist[c].second;
  }
  return g;
}

// Edge feature for (i, j): concat(x_i, x_j - x_i). Rows ordered i*k + c.
template <typename S>
Matrix<S> edge_features(const Matrix<S>& x, const KnnGraph& g) {
  if (x.rows() != g.n) throw DimensionError("edge_features: point count mismatch");
  const Eigen::Index d = x.cols();
  Matrix<S> e(g.n * g.k, 2 * d);
  for (Eigen::Index i = 0; i < g.n; ++i)
    for (int c = 0; c < g.k; ++c) {
      const Eigen::Index j = g.neighbor_idx(i, c);
      if (j < 0 || j >= g.n) throw DimensionError("edge_features: bad index");
      e.block(i * g.k + c, 0, 1, d) = x.row(i);
      e.block(i * g.k + c, d, 1, d) = x.row(j) - x.row(i);
    }
  return e;
}

// d(x_i) collects +grad(center) - grad(relative) from its own edges and
// +grad(relative) from edges where i is the neighbor.
template <typename S>
Matrix<S> edge_features_backward(const Matrix<S>& grad_e, const KnnGraph& g,
                                 Eigen::Index d) {
  if (grad_e.rows() != g.n * g.k || grad_e.cols() != 2 * d)
    throw DimensionError("edge_features_backward: gradient shape mismatch");
  Matrix<S> grad_x = Matrix<S>::Zero(g.n, d);
  for (Eigen::Index i = 0; i < g.n; ++i)
    for (int c = 0; c < g.k; ++c) {
      const Eigen::Index j = g.neighbor_idx(i, c);
      const auto g_center = grad_e.block(i * g.k + c, 0, 1, d);
      const auto g_rel = grad_e.block(i * g.k + c, d, 1, d);
      grad_x.row(i) += g_center - g_rel;
      grad_x.row(j) += g_rel;
    }
  return grad_x;
}

template <typename S>
struct EdgeAggregate {
  Matrix<S> values;       // n x c
  IndexMatrix argmax;     // n x c, edge slot in [0, k)
};

// Channelwise max over each point's k edges; winner recorded for backprop.
template <typename S>
EdgeAggregate<S> edge_aggregate_max(const Matrix<S>& per_edge, Eigen::Index n,
                                    int k) {
  if (per_edge.rows() != n * k)
    throw DimensionError("edge_aggregate_max: row count mismatch");
  const Eigen::Index c = per_edge.cols();
  EdgeAggregate<S> out;
  out.values.resize(n, c);
  out.argmax.resize(n, c);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index ch = 0; ch < c; ++ch) {
      S best = per_edge(i * k, ch);
      Eigen::Index arg = 0;
      for (int e = 1; e < k; ++e) {
        const S v = per_edge(i * k + e, ch);
        if (v > best) {
          best = v;
          arg = e;
        }
      }
      out.values(i, ch) = best;
      out.argmax(i, ch) = arg;
    }
  return out;
}

template <typename S>
Matrix<S> edge_aggregate_max_backward(const Matrix<S>& grad_out,
                                      const EdgeAggregate<S>& agg, int k) {
  const Eigen::Index n = agg.values.rows();
  const Eigen::Index c = agg.values.cols();
  if (grad_out.rows() != n || grad_out.cols() != c)
    throw DimensionError("edge_aggregate_max_backward: shape mismatch");
  Matrix<S> grad_e = Matrix<S>::Zero(n * k, c);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index ch = 0; ch < c; ++ch)
      grad_e(i * k + agg.argmax(i, ch), ch) = grad_out(i, ch);
  return grad_e;
}

template <typename S>
struct GlobalPool {
  Vector<S> pooled;     // 2c: [max | mean]
  IndexVector argmax;   // c, winning point per channel
  Eigen::Index n = 0;
};

// Parallel channelwise max and mean over points, concatenated.
template <typename S>
GlobalPool<S> global_pool(const Matrix<S>& features) {
  const Eigen::Index n = features.rows();
  const Eigen::Index c = features.cols();
  if (n < 1) throw DimensionError("global_pool: empty input");
  GlobalPool<S> out;
  out.n = n;
  out.pooled.resize(2 * c);
  out.argmax.resize(c);
  const auto mx = reduce_max<S>(features, 0);
  out.pooled.head(c) = mx.values;
  out.argmax = mx.argmax;
  out.pooled.tail(c) = reduce_mean<S>(features, 0);
  return out;
}

template <typename S>
Matrix<S> global_pool_backward(const Vector<S>& grad_pooled,
                               const GlobalPool<S>& pool) {
  const Eigen::Index c = pool.argmax.size();
  if (grad_pooled.size() != 2 * c)
    throw DimensionError("global_pool_backward: shape mismatch");
  Matrix<S> grad_f = Matrix<S>::Zero(pool.n, c);
  for (Eigen::Index ch = 0; ch < c; ++ch) {
    grad_f(pool.argmax(ch), ch) += grad_pooled(ch);
    grad_f.col(ch).array() += grad_pooled(c + ch) / static_cast<S>(pool.n);
  }
  return grad_f;
}

}  // namespace stftkan
