#ifndef SSD_EVAL_HPP
#define SSD_EVAL_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "ssd/common.hpp"
#include "ssd/spectral.hpp"

namespace ssd {

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian
/// algorithm with potentials, O(n^3)). Returns column assigned to each row.
inline std::vector<int> hungarian_assignment(const Eigen::MatrixXd& cost) {
  require(cost.rows() == cost.cols() && cost.rows() >= 1,
          "assignment: cost matrix must be square and non-empty");
  require(cost.allFinite(), "assignment: non-finite cost");
  const int n = static_cast<int>(cost.rows());

  // 1-based arrays; p[j] is the row matched to column j (p[0] = current row).
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = std::numeric_limits<double>::infinity();
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] >= 1) row_to_col[static_cast<std::size_t>(p[j] - 1)] = j - 1;
  return row_to_col;
}

struct AccuracyReport {
  double accuracy = 0.0;         // percent of items correct under best relabeling
  std::vector<int> permutation;  // predicted label -> matched true label
  Eigen::MatrixXi confusion;     // rows = truth, cols = relabeled prediction
};

/// Clustering accuracy: the fraction of items whose predicted label matches
/// the truth under the best one-to-one relabeling of clusters, found exactly
/// via minimum-cost assignment on the negated confusion matrix. The reported
/// confusion matrix has its columns permuted by that relabeling, so matched
/// counts sit on the diagonal.
inline AccuracyReport clustering_accuracy(const std::vector<int>& truth,
                                          const std::vector<int>& predicted) {
  require(!truth.empty(), "accuracy: empty label vectors");
  require(truth.size() == predicted.size(), "accuracy: label vectors differ in length");
  int c = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    require(truth[i] >= 0 && predicted[i] >= 0, "accuracy: labels must be non-negative");
    c = std::max({c, truth[i] + 1, predicted[i] + 1});
  }

  Eigen::MatrixXi raw = Eigen::MatrixXi::Zero(c, c);
  for (std::size_t i = 0; i < truth.size(); ++i) raw(truth[i], predicted[i]) += 1;

  // Maximize matched counts == minimize negated counts; rows of the cost are
  // predicted labels, columns are candidate true labels.
  AccuracyReport report;
  report.permutation = hungarian_assignment(-raw.transpose().cast<double>());
  long matched = 0;
  for (int p = 0; p < c; ++p) matched += raw(report.permutation[static_cast<std::size_t>(p)], p);
  report.accuracy = 100.0 * static_cast<double>(matched) / static_cast<double>(truth.size());
  report.confusion = Eigen::MatrixXi::Zero(c, c);
  for (int p = 0; p < c; ++p)
    report.confusion.col(report.permutation[static_cast<std::size_t>(p)]) = raw.col(p);
  return report;
}

/// Segmentation error: percent of items misassigned under the best
/// relabeling, i.e. 100 - clustering accuracy of the window labels.
inline double segmentation_error(const std::vector<int>& truth,
                                 const std::vector<int>& predicted) {
  return 100.0 - clustering_accuracy(truth, predicted).accuracy;
}

inline double segmentation_error(const Segmentation& truth, const Segmentation& predicted) {
  validate_segmentation(truth);
  validate_segmentation(predicted);
  require(truth.n == predicted.n, "segmentation error: item counts differ");
  return segmentation_error(truth.labels(), predicted.labels());
}

}  // namespace ssd

#endif  // SSD_EVAL_HPP
