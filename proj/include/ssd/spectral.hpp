#ifndef SSD_SPECTRAL_HPP
#define SSD_SPECTRAL_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "ssd/common.hpp"
#include "ssd/distance_matrix.hpp"

namespace ssd {

/// Gaussian similarity matrix w_ij = exp(-d_ij^2 / (2 sigma^2)).
using SimilarityMatrix = Eigen::MatrixXd;

/// Integer cluster labels in [0, C).
using ClusterAssignment = std::vector<int>;

inline SimilarityMatrix gaussian_kernel(const DistanceMatrix& d, double sigma) {
  validate_distance_matrix(d);
  require(sigma > 0.0 && std::isfinite(sigma), "gaussian kernel: sigma must be positive");
  const double inv = 1.0 / (2.0 * sigma * sigma);
  // Coefficient-wise std::exp rather than Eigen's vectorized exp: the latter
  // returns a denormal for exp(-inf), and infinite distances must drop out
  // of the graph exactly.
  return d.unaryExpr([inv](double x) { return std::exp(-x * x * inv); });
}

/// Symmetric normalized Laplacian L = D^{-1/2} (D - W) D^{-1/2} with
/// d_ii = sum_j w_ij.
inline Eigen::MatrixXd laplacian_sym(const SimilarityMatrix& w) {
  require(w.rows() == w.cols() && w.rows() >= 1, "laplacian: similarity must be square");
  require(w.allFinite(), "laplacian: non-finite similarity");
  const Eigen::VectorXd degree = w.rowwise().sum();
  require(degree.minCoeff() > 0.0, "laplacian: isolated vertex (zero degree)");
  const Eigen::VectorXd inv_sqrt = degree.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd lap =
      Eigen::MatrixXd::Identity(w.rows(), w.cols()) -
      (inv_sqrt.asDiagonal() * w * inv_sqrt.asDiagonal());
  return 0.5 * (lap + lap.transpose());
}

/// Rows of the C lowest eigenvectors of L_sym, each normalized to unit
/// length. Rows with vanishing norm are left at zero; callers assign those
/// items by nearest centroid afterwards.
struct SpectralEmbedding {
  Eigen::MatrixXd rows;         // N x C
  Eigen::VectorXd eigenvalues;  // all N, ascending
};

inline SpectralEmbedding spectral_embedding(const SimilarityMatrix& w, int c) {
  require(c >= 1 && c <= w.rows(), "embedding: need 1 <= C <= N");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian_sym(w));
  if (solver.info() != Eigen::Success)
    throw NumericalError("embedding: eigendecomposition failed");
  SpectralEmbedding embedding;
  embedding.eigenvalues = solver.eigenvalues();
  embedding.rows = solver.eigenvectors().leftCols(c);
  for (Eigen::Index i = 0; i < embedding.rows.rows(); ++i) {
    const double norm = embedding.rows.row(i).norm();
    if (norm > 1e-12)
      embedding.rows.row(i) /= norm;
    else
      embedding.rows.row(i).setZero();
  }
  return embedding;
}

/// Kernel width chosen on a fixed grid of 20 logarithmically spaced
/// candidates in [0.1, 10] times the median off-diagonal distance,
/// maximizing the eigengap lambda_{C+1} - lambda_C of L_sym.
inline double select_sigma_eigengap(const DistanceMatrix& d, int c) {
  validate_distance_matrix(d);
  const Eigen::Index n = d.rows();
  require(c >= 2, "sigma selection: C must be >= 2");
  require(n > c, "sigma selection: needs N > C");

  std::vector<double> off;
  off.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::isfinite(d(i, j))) off.push_back(d(i, j));
  if (off.empty()) throw NumericalError("sigma selection: no finite off-diagonal distances");
  std::nth_element(off.begin(), off.begin() + off.size() / 2, off.end());
  const double median = off[off.size() / 2];
  if (!(median > 0.0))
    throw NumericalError("sigma selection: median off-diagonal distance is zero");

  constexpr int kGridSize = 20;
  double best_sigma = 0.0;
  double best_gap = -std::numeric_limits<double>::infinity();
  for (int g = 0; g < kGridSize; ++g) {
    const double sigma = median * std::pow(10.0, -1.0 + 2.0 * g / (kGridSize - 1));
    const SpectralEmbedding e = spectral_embedding(gaussian_kernel(d, sigma), c);
    const double gap = e.eigenvalues(c) - e.eigenvalues(c - 1);
    if (std::isfinite(gap) && gap > best_gap) {
      best_gap = gap;
      best_sigma = sigma;
    }
  }
  if (!(best_sigma > 0.0))
    throw NumericalError("sigma selection: every candidate width was degenerate");
  return best_sigma;
}

struct KmeansResult {
  ClusterAssignment labels;
  Eigen::MatrixXd centroids;  // C x dim
  double distortion = 0.0;
};

namespace detail {

inline double squared_distance(const Eigen::MatrixXd& points, Eigen::Index i,
                               const Eigen::MatrixXd& centroids, Eigen::Index c) {
  return (points.row(i) - centroids.row(c)).squaredNorm();
}

inline KmeansResult kmeans_single_run(const Eigen::MatrixXd& points, int c,
                                      std::uint64_t seed) {
  const Eigen::Index n = points.rows();
  Rng rng(seed);

  // Greedy farthest-point seeding from a random start.
  Eigen::MatrixXd centroids(c, points.cols());
  centroids.row(0) = points.row(rng.uniform_int(0, n - 1));
  Eigen::VectorXd nearest = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  for (int k = 1; k < c; ++k) {
    Eigen::Index farthest = 0;
    double far_dist = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      nearest(i) = std::min(nearest(i), squared_distance(points, i, centroids, k - 1));
      if (nearest(i) > far_dist) {
        far_dist = nearest(i);
        farthest = i;
      }
    }
    centroids.row(k) = points.row(farthest);
  }

  KmeansResult result;
  result.labels.assign(static_cast<std::size_t>(n), 0);
  constexpr int kMaxIters = 200;
  for (int iter = 0; iter < kMaxIters; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_dist = squared_distance(points, i, centroids, 0);
      for (int k = 1; k < c; ++k) {
        const double dist = squared_distance(points, i, centroids, k);
        if (dist < best_dist) {
          best_dist = dist;
          best = k;
        }
      }
      if (result.labels[static_cast<std::size_t>(i)] != best) {
        result.labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(c, points.cols());
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(c);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(result.labels[static_cast<std::size_t>(i)]) += points.row(i);
      counts(result.labels[static_cast<std::size_t>(i)]) += 1;
    }
    for (int k = 0; k < c; ++k)
      if (counts(k) > 0) centroids.row(k) = sums.row(k) / counts(k);
    // Re-seed empty clusters at the point farthest from its own centroid.
    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    for (int k = 0; k < c; ++k) {
      if (counts(k) > 0) continue;
      Eigen::Index farthest = -1;
      double far_dist = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (taken[static_cast<std::size_t>(i)]) continue;
        const double dist =
            squared_distance(points, i, centroids, result.labels[static_cast<std::size_t>(i)]);
        if (dist > far_dist) {
          far_dist = dist;
          farthest = i;
        }
      }
      if (farthest >= 0) {
        centroids.row(k) = points.row(farthest);
        taken[static_cast<std::size_t>(farthest)] = true;
      }
    }
  }

  result.distortion = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    result.distortion +=
        squared_distance(points, i, centroids, result.labels[static_cast<std::size_t>(i)]);
  result.centroids = std::move(centroids);
  return result;
}

}  // namespace detail

/// Lloyd's k-means over several seeded runs, keeping the assignment with
/// minimum distortion (ties keep the earliest run).
inline KmeansResult kmeans(const Eigen::MatrixXd& points, int c, int runs,
                           std::uint64_t seed) {
  require(points.rows() >= 1, "kmeans: empty input");
  require(c >= 1, "kmeans: C must be >= 1");
  require(points.rows() >= c, "kmeans: needs at least C points");
  require(runs >= 1, "kmeans: needs at least one run");
  require(points.allFinite(), "kmeans: non-finite input");

  KmeansResult best;
  double best_distortion = std::numeric_limits<double>::infinity();
  for (int r = 0; r < runs; ++r) {
    KmeansResult run = detail::kmeans_single_run(
        points, c, derive_seed(seed, "kmeans-run", static_cast<std::uint64_t>(r)));
    if (run.distortion < best_distortion) {
      best_distortion = run.distortion;
      best = std::move(run);
    }
  }
  return best;
}

struct SpectralClusterResult {
  ClusterAssignment labels;
  double sigma = 0.0;
  double eigengap = 0.0;
  double distortion = 0.0;
};

/// Spectral clustering on the symmetric normalized Laplacian: Gaussian
/// kernel with eigengap-selected width, row-normalized bottom-C eigenvector
/// embedding, k-means with multiple runs on the rows.
inline SpectralClusterResult spectral_cluster(const DistanceMatrix& d, int c,
                                              int kmeans_runs = 10,
                                              std::uint64_t seed = 0) {
  validate_distance_matrix(d);
  const Eigen::Index n = d.rows();
  require(c >= 2, "spectral clustering: C must be >= 2");
  require(n >= c, "spectral clustering: needs N >= C");
  require(kmeans_runs >= 1, "spectral clustering: needs at least one k-means run");

  SpectralClusterResult result;
  if (n == c) {  // one item per cluster; nothing to optimize
    result.labels.resize(static_cast<std::size_t>(n));
    std::iota(result.labels.begin(), result.labels.end(), 0);
    return result;
  }

  result.sigma = select_sigma_eigengap(d, c);
  const SpectralEmbedding embedding = spectral_embedding(gaussian_kernel(d, result.sigma), c);
  result.eigengap = embedding.eigenvalues(c) - embedding.eigenvalues(c - 1);

  std::vector<Eigen::Index> live;
  for (Eigen::Index i = 0; i < n; ++i)
    if (embedding.rows.row(i).norm() > 0.0) live.push_back(i);
  require(static_cast<Eigen::Index>(live.size()) >= c,
          "spectral clustering: too few non-degenerate embedding rows");

  Eigen::MatrixXd points(static_cast<Eigen::Index>(live.size()), c);
  for (std::size_t i = 0; i < live.size(); ++i) points.row(static_cast<Eigen::Index>(i)) =
      embedding.rows.row(live[i]);
  const KmeansResult km =
      kmeans(points, c, kmeans_runs, derive_seed(seed, "spectral-kmeans"));
  result.distortion = km.distortion;

  result.labels.assign(static_cast<std::size_t>(n), 0);
  for (std::size_t i = 0; i < live.size(); ++i)
    result.labels[static_cast<std::size_t>(live[i])] = km.labels[i];
  for (Eigen::Index i = 0; i < n; ++i) {  // isolated rows: nearest centroid
    if (embedding.rows.row(i).norm() > 0.0) continue;
    int bestc = 0;
    double best_dist = (embedding.rows.row(i) - km.centroids.row(0)).squaredNorm();
    for (int k = 1; k < c; ++k) {
      const double dist = (embedding.rows.row(i) - km.centroids.row(k)).squaredNorm();
      if (dist < best_dist) {
        best_dist = dist;
        bestc = k;
      }
    }
    result.labels[static_cast<std::size_t>(i)] = bestc;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Spectral segmentation: contiguous partition of temporally ordered items by
// dynamic programming on the embedding rows.
// ---------------------------------------------------------------------------

/// C contiguous segments over [0, N): segment k spans
/// [starts[k], starts[k+1]) with starts[0] = 0.
struct Segmentation {
  std::vector<Eigen::Index> starts;  // strictly increasing, size C, first is 0
  Eigen::Index n = 0;

  Eigen::Index num_segments() const { return static_cast<Eigen::Index>(starts.size()); }

  std::vector<int> labels() const {
    std::vector<int> out(static_cast<std::size_t>(n), 0);
    for (std::size_t k = 1; k < starts.size(); ++k)
      for (Eigen::Index i = starts[k]; i < n; ++i) out[static_cast<std::size_t>(i)] = static_cast<int>(k);
    return out;
  }
};

inline void validate_segmentation(const Segmentation& seg) {
  require(seg.n >= 1, "segmentation: empty range");
  require(!seg.starts.empty() && seg.starts.front() == 0,
          "segmentation: first segment must start at 0");
  for (std::size_t k = 1; k < seg.starts.size(); ++k)
    require(seg.starts[k] > seg.starts[k - 1] && seg.starts[k] < seg.n,
            "segmentation: boundaries must be strictly increasing inside [0, N)");
}

/// Prefix-sum table for within-segment squared deviation costs. Both the
/// DP and any exhaustive verification should price segments through one
/// table so costs agree bit for bit.
class SegmentCostTable {
 public:
  explicit SegmentCostTable(const Eigen::MatrixXd& points)
      : sum_(points.rows() + 1, points.cols()), sum_sq_(points.rows() + 1) {
    sum_.row(0).setZero();
    sum_sq_(0) = 0.0;
    for (Eigen::Index t = 0; t < points.rows(); ++t) {
      sum_.row(t + 1) = sum_.row(t) + points.row(t);
      sum_sq_(t + 1) = sum_sq_(t) + points.row(t).squaredNorm();
    }
  }

  /// Total squared deviation from the mean over rows [a, b), b > a.
  double cost(Eigen::Index a, Eigen::Index b) const {
    const double len = static_cast<double>(b - a);
    const double sse =
        sum_sq_(b) - sum_sq_(a) - (sum_.row(b) - sum_.row(a)).squaredNorm() / len;
    return std::max(0.0, sse);
  }

 private:
  Eigen::MatrixXd sum_;
  Eigen::VectorXd sum_sq_;
};

/// Optimal partition of the rows into C contiguous segments minimizing the
/// total within-segment squared deviation. Exact O(N^2 C) dynamic program.
inline Segmentation segment_rows(const Eigen::MatrixXd& points, int c) {
  const Eigen::Index n = points.rows();
  require(c >= 1, "segmentation: C must be >= 1");
  require(n >= c, "segmentation: needs N >= C");
  require(points.allFinite(), "segmentation: non-finite input");

  const SegmentCostTable table(points);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd dp = Eigen::MatrixXd::Constant(c + 1, n + 1, kInf);
  Eigen::MatrixXi arg = Eigen::MatrixXi::Constant(c + 1, n + 1, -1);
  dp(0, 0) = 0.0;
  for (int seg = 1; seg <= c; ++seg) {
    for (Eigen::Index j = seg; j + (c - seg) <= n; ++j) {
      for (Eigen::Index i = seg - 1; i < j; ++i) {
        if (!std::isfinite(dp(seg - 1, i))) continue;
        const double total = dp(seg - 1, i) + table.cost(i, j);
        if (total < dp(seg, j)) {
          dp(seg, j) = total;
          arg(seg, j) = static_cast<int>(i);
        }
      }
    }
  }

  Segmentation seg;
  seg.n = n;
  seg.starts.assign(static_cast<std::size_t>(c), 0);
  Eigen::Index j = n;
  for (int k = c; k >= 1; --k) {
    const Eigen::Index i = arg(k, j);
    seg.starts[static_cast<std::size_t>(k - 1)] = i;
    j = i;
  }
  validate_segmentation(seg);
  return seg;
}

struct SpectralSegmentResult {
  Segmentation segmentation;
  double sigma = 0.0;
  double cost = 0.0;
};

/// Spectral segmentation: embed the ordered items exactly as in spectral
/// clustering, then cut the embedding rows into C contiguous segments by
/// exact dynamic programming.
inline SpectralSegmentResult spectral_segment(const DistanceMatrix& d, int c) {
  validate_distance_matrix(d);
  const Eigen::Index n = d.rows();
  require(c >= 2, "spectral segmentation: C must be >= 2");
  require(n >= c, "spectral segmentation: needs N >= C");

  SpectralSegmentResult result;
  if (n == c) {
    result.segmentation.n = n;
    result.segmentation.starts.resize(static_cast<std::size_t>(c));
    std::iota(result.segmentation.starts.begin(), result.segmentation.starts.end(),
              Eigen::Index{0});
    return result;
  }
  result.sigma = select_sigma_eigengap(d, c);
  const SpectralEmbedding embedding = spectral_embedding(gaussian_kernel(d, result.sigma), c);
  result.segmentation = segment_rows(embedding.rows, c);

  const SegmentCostTable table(embedding.rows);
  for (std::size_t k = 0; k < result.segmentation.starts.size(); ++k) {
    const Eigen::Index a = result.segmentation.starts[k];
    const Eigen::Index b = (k + 1 < result.segmentation.starts.size())
                               ? result.segmentation.starts[k + 1]
                               : n;
    result.cost += table.cost(a, b);
  }
  return result;
}

}  // namespace ssd

#endif  // SSD_SPECTRAL_HPP
