#ifndef SSD_DATASETS_HPP
#define SSD_DATASETS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ssd/common.hpp"
#include "ssd/hmm.hpp"
#include "ssd/sequence.hpp"

namespace ssd {

// ---------------------------------------------------------------------------
// Two-class mixture-of-HMMs benchmark. Both classes share uniform initial
// probabilities and scalar emissions N(0,1) / N(3,1); they differ only in the
// transition matrix:
//   class 0: [[0.6, 0.4], [0.4, 0.6]]      class 1: [[0.4, 0.6], [0.6, 0.4]]
// so any distance that ignores dynamics cannot separate them.
// ---------------------------------------------------------------------------

struct MohmmConfig {
  int num_sequences = 100;
  int mean_length = 200;  // lengths drawn uniformly from [0.6, 1.4] x mean
  std::uint64_t seed = 0;
};

inline HmmModel mohmm_class_model(int label) {
  require(label == 0 || label == 1, "mohmm: label must be 0 or 1");
  HmmModel model;
  model.pi = Eigen::Vector2d(0.5, 0.5);
  if (label == 0)
    model.transition = (Eigen::Matrix2d() << 0.6, 0.4, 0.4, 0.6).finished();
  else
    model.transition = (Eigen::Matrix2d() << 0.4, 0.6, 0.6, 0.4).finished();
  model.emissions.resize(2);
  model.emissions[0].mean = Eigen::VectorXd::Constant(1, 0.0);
  model.emissions[0].variance = Eigen::VectorXd::Constant(1, 1.0);
  model.emissions[1].mean = Eigen::VectorXd::Constant(1, 3.0);
  model.emissions[1].variance = Eigen::VectorXd::Constant(1, 1.0);
  return model;
}

inline LabeledDataset generate_mohmm(const MohmmConfig& config) {
  require(config.num_sequences >= 2, "mohmm: need at least 2 sequences");
  require(config.mean_length >= 5, "mohmm: mean length must be >= 5");
  const auto lo = static_cast<Eigen::Index>(std::ceil(0.6 * config.mean_length));
  const auto hi = static_cast<Eigen::Index>(std::floor(1.4 * config.mean_length));

  const HmmModel models[2] = {mohmm_class_model(0), mohmm_class_model(1)};
  LabeledDataset data;
  data.sequences.reserve(static_cast<std::size_t>(config.num_sequences));
  data.labels.reserve(static_cast<std::size_t>(config.num_sequences));
  for (int i = 0; i < config.num_sequences; ++i) {
    const std::uint64_t seq_seed =
        derive_seed(config.seed, "mohmm-seq", static_cast<std::uint64_t>(i));
    Rng rng(seq_seed);
    const int label = rng.uniform() < 0.5 ? 0 : 1;
    const Eigen::Index t_len = rng.uniform_int(lo, hi);
    data.sequences.push_back(
        sample_sequence(models[label], t_len, derive_seed(seq_seed, "emit")));
    data.labels.push_back(label);
  }
  return data;
}

// ---------------------------------------------------------------------------
// Synthetic control-chart sequences, following the six classic pattern
// classes (normal, cyclic, increasing trend, decreasing trend, upward shift,
// downward shift): x(t) = m + noise + pattern term, with randomized pattern
// amplitude, period, gradient, shift magnitude and shift time per sequence.
// ---------------------------------------------------------------------------

struct ControlChartConfig {
  int per_class = 10;      // sequences per pattern class
  Eigen::Index length = 60;
  std::uint64_t seed = 0;
};

constexpr int kControlChartClasses = 6;

namespace detail {

inline Sequence control_chart_sequence(int label, Eigen::Index t_len, Rng& rng) {
  constexpr double kBase = 30.0;
  constexpr double kNoise = 2.0;
  const double amplitude = 10.0 + 5.0 * rng.uniform();       // cyclic
  const double period = 10.0 + 5.0 * rng.uniform();          // cyclic
  const double gradient = 0.2 + 0.3 * rng.uniform();         // trends
  const double shift = 7.5 + 12.5 * rng.uniform();           // shifts
  const double t3 = static_cast<double>(t_len) / 3.0;        // shift onset in
  const Eigen::Index onset =                                 // [T/3, 2T/3]
      static_cast<Eigen::Index>(t3 + (t3 * rng.uniform()));

  Sequence seq(t_len, 1);
  for (Eigen::Index t = 0; t < t_len; ++t) {
    double x = kBase + kNoise * rng.normal();
    switch (label) {
      case 0: break;                                                   // normal
      case 1: x += amplitude * std::sin(2.0 * M_PI * t / period); break;  // cyclic
      case 2: x += gradient * t; break;                                // increasing
      case 3: x -= gradient * t; break;                                // decreasing
      case 4: x += (t >= onset) ? shift : 0.0; break;                  // up shift
      case 5: x -= (t >= onset) ? shift : 0.0; break;                  // down shift
      default: throw ValidationError("control chart: label out of range");
    }
    seq(t, 0) = x;
  }
  return seq;
}

}  // namespace detail

inline LabeledDataset generate_control_chart(const ControlChartConfig& config) {
  require(config.per_class >= 1, "control chart: need at least 1 sequence per class");
  require(config.length >= 10, "control chart: length must be >= 10");
  LabeledDataset data;
  const int total = config.per_class * kControlChartClasses;
  data.sequences.reserve(static_cast<std::size_t>(total));
  data.labels.reserve(static_cast<std::size_t>(total));
  for (int label = 0; label < kControlChartClasses; ++label) {
    for (int i = 0; i < config.per_class; ++i) {
      Rng rng(derive_seed(config.seed, "control-chart",
                          static_cast<std::uint64_t>(label * config.per_class + i)));
      data.sequences.push_back(detail::control_chart_sequence(label, config.length, rng));
      data.labels.push_back(label);
    }
  }
  return data;
}

// ---------------------------------------------------------------------------
// Windowing for segmentation experiments: chop one long sequence into
// consecutive non-overlapping windows of fixed width (remainder dropped).
// ---------------------------------------------------------------------------

inline std::vector<Sequence> window_subsequences(const Sequence& seq, Eigen::Index width) {
  validate_sequence(seq);
  require(width >= 2, "windowing: width must be >= 2");
  require(seq.rows() >= width, "windowing: sequence shorter than one window");
  const Eigen::Index count = seq.rows() / width;
  std::vector<Sequence> windows;
  windows.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index w = 0; w < count; ++w)
    windows.push_back(seq.middleRows(w * width, width));
  return windows;
}

}  // namespace ssd

#endif  // SSD_DATASETS_HPP
