#ifndef SSD_SEQUENCE_HPP
#define SSD_SEQUENCE_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ssd/common.hpp"

namespace ssd {

/// A sequence is a T x d matrix: one observation vector per row.
using Sequence = Eigen::MatrixXd;

inline void validate_sequence(const Sequence& seq, const std::string& what = "sequence") {
  require(seq.rows() >= 1, what + ": needs at least one observation");
  require(seq.cols() >= 1, what + ": needs at least one feature dimension");
  require(seq.allFinite(), what + ": contains non-finite values");
}

/// Sequences plus optional integer class labels in [0, C).
struct LabeledDataset {
  std::vector<Sequence> sequences;
  std::vector<int> labels;  // empty when unlabeled; else one per sequence

  bool labeled() const { return !labels.empty(); }

  int num_classes() const {
    int c = 0;
    for (int l : labels) c = std::max(c, l + 1);
    return c;
  }
};

inline Eigen::Index dataset_dim(const std::vector<Sequence>& sequences) {
  require(!sequences.empty(), "dataset: empty");
  return sequences.front().cols();
}

inline void validate_dataset(const std::vector<Sequence>& sequences) {
  const Eigen::Index d = dataset_dim(sequences);
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    validate_sequence(sequences[i], "sequence " + std::to_string(i));
    require(sequences[i].cols() == d,
            "sequence " + std::to_string(i) + ": dimension " +
                std::to_string(sequences[i].cols()) + " != dataset dimension " +
                std::to_string(d));
  }
}

inline Eigen::Index dataset_dim(const LabeledDataset& data) {
  return dataset_dim(data.sequences);
}

inline void validate_dataset(const LabeledDataset& data) {
  validate_dataset(data.sequences);
  if (!data.labeled()) return;
  require(data.labels.size() == data.sequences.size(),
          "dataset: label count does not match sequence count");
  for (std::size_t i = 0; i < data.labels.size(); ++i)
    require(data.labels[i] >= 0, "dataset: negative label at index " + std::to_string(i));
}

inline Eigen::Index total_observations(const std::vector<Sequence>& sequences) {
  Eigen::Index n = 0;
  for (const auto& s : sequences) n += s.rows();
  return n;
}

/// Pooled per-dimension variance over all observations (population form).
inline Eigen::VectorXd global_variance(const std::vector<Sequence>& sequences) {
  const Eigen::Index d = dataset_dim(sequences);
  const double n = static_cast<double>(total_observations(sequences));
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd sumsq = Eigen::VectorXd::Zero(d);
  for (const auto& s : sequences) {
    sum += s.colwise().sum().transpose();
    sumsq += s.array().square().colwise().sum().matrix().transpose();
  }
  const Eigen::VectorXd mean = sum / n;
  return (sumsq / n - mean.cwiseProduct(mean)).cwiseMax(0.0);
}

}  // namespace ssd

#endif  // SSD_SEQUENCE_HPP
