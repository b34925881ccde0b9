#ifndef SSD_SSD_DISTANCE_HPP
#define SSD_SSD_DISTANCE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ssd/common.hpp"
#include "ssd/hmm.hpp"
#include "ssd/sequence.hpp"

namespace ssd {

/// Per-sequence K x K row-stochastic matrix projected through a global model.
using InducedTransitionMatrix = Eigen::MatrixXd;

/// Knobs for the induced-matrix representation before distances are taken.
/// row_smoothing_epsilon mixes each row with the uniform distribution,
/// (1-eps)*row + eps/K, which keeps every pairwise distance finite.
struct SsdOptions {
  bool strip_self_transitions = false;
  int diffusion_power = 1;
  double row_smoothing_epsilon = 1e-6;
};

inline void validate_ssd_options(const SsdOptions& options) {
  require(options.diffusion_power >= 1, "ssd options: diffusion_power must be >= 1");
  require(options.row_smoothing_epsilon >= 0.0 && options.row_smoothing_epsilon <= 1.0,
          "ssd options: row_smoothing_epsilon must be in [0, 1]");
}

inline void validate_induced(const InducedTransitionMatrix& a,
                             const std::string& what = "induced matrix") {
  require(a.rows() >= 1 && a.rows() == a.cols(), what + ": must be square");
  require(a.allFinite(), what + ": non-finite entries");
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    require(a.row(i).minCoeff() >= 0.0, what + ": negative entry in row " + std::to_string(i));
    require(std::abs(a.row(i).sum() - 1.0) <= 1e-8,
            what + ": row " + std::to_string(i) + " does not sum to 1");
  }
}

/// Transition matrix a single sequence induces in the state-space of the
/// global model: expected transition counts from one forward-backward pass,
/// row-normalized. Rows of states the sequence never occupies carry no
/// evidence and fall back to the global transition row (occupancy counts
/// transition steps, i.e. the xi row sum).
inline InducedTransitionMatrix induced_transition(const Sequence& seq, const HmmModel& model) {
  const FbResult fb = forward_backward(seq, model);
  const int k = model.num_states();
  InducedTransitionMatrix induced(k, k);
  for (int i = 0; i < k; ++i) {
    const double row_sum = fb.xi_sum.row(i).sum();
    if (row_sum < 1e-8) {
      induced.row(i) = model.transition.row(i);
    } else {
      induced.row(i) = fb.xi_sum.row(i) / row_sum;
    }
  }
  return induced;
}

/// Bhattacharyya affinity between two discrete distributions:
/// sum_x sqrt(p(x) q(x)), in [0, 1], 1 iff p = q.
inline double bhattacharyya_affinity(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  require(p.size() == q.size(), "bhattacharyya: size mismatch");
  require(p.size() >= 1, "bhattacharyya: empty distributions");
  require(p.allFinite() && q.allFinite(), "bhattacharyya: non-finite input");
  require(p.minCoeff() >= 0.0 && q.minCoeff() >= 0.0, "bhattacharyya: negative mass");
  require(std::abs(p.sum() - 1.0) <= 1e-6 && std::abs(q.sum() - 1.0) <= 1e-6,
          "bhattacharyya: inputs must lie on the probability simplex");
  const double affinity = p.cwiseProduct(q).cwiseSqrt().sum();
  return std::min(affinity, 1.0);
}

/// SSD distance between two induced matrices: -log of the mean Bhattacharyya
/// affinity between corresponding rows. +infinity when the mean affinity is
/// zero (disjoint supports everywhere; impossible with row smoothing on).
inline double ssd_pair_distance(const InducedTransitionMatrix& a,
                                const InducedTransitionMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(),
          "ssd distance: state count mismatch");
  const Eigen::Index k = a.rows();
  double mean_affinity = 0.0;
  for (Eigen::Index i = 0; i < k; ++i)
    mean_affinity += bhattacharyya_affinity(a.row(i).transpose(), b.row(i).transpose());
  mean_affinity /= static_cast<double>(k);
  if (mean_affinity <= 0.0) return std::numeric_limits<double>::infinity();
  return -std::log(std::min(mean_affinity, 1.0));
}

/// Zero the diagonal and renormalize each row. Degenerate without smoothing
/// when a row holds all its mass on the diagonal.
inline InducedTransitionMatrix strip_self_transitions(const InducedTransitionMatrix& a) {
  validate_induced(a);
  require(a.rows() >= 2, "strip_self_transitions: needs K >= 2");
  InducedTransitionMatrix stripped = a;
  stripped.diagonal().setZero();
  for (Eigen::Index i = 0; i < stripped.rows(); ++i) {
    const double off = stripped.row(i).sum();
    if (off <= 0.0)
      throw NumericalError("strip_self_transitions: row " + std::to_string(i) +
                           " has no off-diagonal mass");
    stripped.row(i) /= off;
  }
  return stripped;
}

/// t-step random-walk matrix (plain matrix power).
inline InducedTransitionMatrix power_transition(const InducedTransitionMatrix& a, int t) {
  require(t >= 1, "power_transition: exponent must be >= 1");
  InducedTransitionMatrix result = InducedTransitionMatrix::Identity(a.rows(), a.cols());
  InducedTransitionMatrix base = a;
  int e = t;
  while (e > 0) {
    if (e & 1) result = result * base;
    if (e >>= 1) base = base * base;
  }
  return result;
}

namespace detail {

inline void smooth_rows(InducedTransitionMatrix& a, double epsilon) {
  if (epsilon <= 0.0) return;
  const double k = static_cast<double>(a.cols());
  a = (1.0 - epsilon) * a;
  a.array() += epsilon / k;
}

/// Representation pipeline applied to each induced matrix before distances:
/// diffusion power, then smoothing, then optional self-transition stripping.
/// Smoothing precedes stripping so stripped rows keep positive off-diagonal
/// mass.
inline InducedTransitionMatrix apply_options(const InducedTransitionMatrix& induced,
                                             const SsdOptions& options) {
  InducedTransitionMatrix a = induced;
  if (options.diffusion_power > 1) a = power_transition(a, options.diffusion_power);
  smooth_rows(a, options.row_smoothing_epsilon);
  if (options.strip_self_transitions) a = strip_self_transitions(a);
  return a;
}

}  // namespace detail

/// Full SSD pipeline result. forward_backward_calls counts only the
/// projection stage (one pass per sequence), not training.
struct SsdDistanceResult {
  Eigen::MatrixXd distances;
  HmmModel model;
  std::vector<double> train_log_likelihood_trace;
  std::uint64_t forward_backward_calls = 0;
};

/// SSD distance matrix for a dataset: train one global model on all
/// sequences, project each sequence to its induced transition matrix with a
/// single forward-backward pass, then take pairwise -log mean row affinity.
inline SsdDistanceResult ssd_distance_matrix(const std::vector<Sequence>& dataset, int k,
                                             const TrainConfig& train_config,
                                             const SsdOptions& options = {}) {
  validate_dataset(dataset);
  validate_ssd_options(options);
  const std::size_t n = dataset.size();

  SsdDistanceResult result;
  TrainResult train = train_hmm(dataset, k, train_config);
  result.model = std::move(train.model);
  result.train_log_likelihood_trace = std::move(train.log_likelihood_trace);

  const std::uint64_t fb_before = instrument::forward_backward_calls().load();
  std::vector<InducedTransitionMatrix> induced(n);
  parallel::for_index(n, [&](std::size_t i) {
    induced[i] = detail::apply_options(induced_transition(dataset[i], result.model), options);
  });
  result.forward_backward_calls = instrument::forward_backward_calls().load() - fb_before;

  result.distances = Eigen::MatrixXd::Zero(n, n);
  parallel::for_index(n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = ssd_pair_distance(induced[i], induced[j]);
      result.distances(i, j) = d;
      result.distances(j, i) = d;
    }
  });
  return result;
}

}  // namespace ssd

#endif  // SSD_SSD_DISTANCE_HPP
