#ifndef SSD_HMM_HPP
#define SSD_HMM_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "ssd/common.hpp"
#include "ssd/sequence.hpp"

namespace ssd {

/// Diagonal-covariance Gaussian emission density.
struct GaussianEmission {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;  // strictly positive, one entry per dimension
};

/// Gaussian-emission hidden Markov model.
struct HmmModel {
  Eigen::VectorXd pi;          // initial state distribution, K entries
  Eigen::MatrixXd transition;  // K x K, row-stochastic
  std::vector<GaussianEmission> emissions;

  int num_states() const { return static_cast<int>(pi.size()); }
  int dim() const { return emissions.empty() ? 0 : static_cast<int>(emissions.front().mean.size()); }
};

inline void validate_model(const HmmModel& model) {
  const int k = model.num_states();
  require(k >= 1, "model: needs at least one state");
  require(model.transition.rows() == k && model.transition.cols() == k,
          "model: transition matrix must be K x K");
  require(static_cast<int>(model.emissions.size()) == k,
          "model: needs one emission per state");
  require(model.pi.allFinite() && model.transition.allFinite(),
          "model: non-finite parameters");
  require(model.pi.minCoeff() >= 0.0, "model: negative initial probability");
  require(std::abs(model.pi.sum() - 1.0) <= 1e-10, "model: initial distribution must sum to 1");
  for (int i = 0; i < k; ++i) {
    require(model.transition.row(i).minCoeff() >= 0.0,
            "model: negative transition probability in row " + std::to_string(i));
    require(std::abs(model.transition.row(i).sum() - 1.0) <= 1e-10,
            "model: transition row " + std::to_string(i) + " must sum to 1");
  }
  const int d = model.dim();
  require(d >= 1, "model: emission dimension must be positive");
  for (int i = 0; i < k; ++i) {
    const auto& e = model.emissions[i];
    require(e.mean.size() == d && e.variance.size() == d,
            "model: emission " + std::to_string(i) + " has inconsistent dimension");
    require(e.mean.allFinite() && e.variance.allFinite(),
            "model: emission " + std::to_string(i) + " has non-finite parameters");
    require(e.variance.minCoeff() > 0.0,
            "model: emission " + std::to_string(i) + " has non-positive variance");
  }
}

/// Posteriors and likelihood from one forward-backward pass.
///
/// gamma holds the scaled alpha*beta products without renormalization, so
/// each row summing to 1 is a genuine consistency check on the recursion
/// rather than true by construction. xi_sum accumulates expected transition
/// counts over t = 0..T-2. log_scaling(t) is the log of the per-step
/// normalizer; the entries sum to the log-likelihood.
struct FbResult {
  double log_likelihood = 0.0;
  Eigen::MatrixXd gamma;        // T x K
  Eigen::MatrixXd xi_sum;       // K x K
  Eigen::VectorXd log_scaling;  // T
};

namespace detail {

/// Log emission densities, one column per time step (K x T layout).
inline Eigen::MatrixXd emission_log_probs(const Sequence& seq, const HmmModel& model) {
  const Eigen::Index t_len = seq.rows();
  const int k = model.num_states();
  Eigen::MatrixXd log_b(k, t_len);
  for (int i = 0; i < k; ++i) {
    const auto& e = model.emissions[i];
    const Eigen::VectorXd inv_var = e.variance.cwiseInverse();
    const double cst = 0.5 * (static_cast<double>(seq.cols()) * std::log(2.0 * M_PI) +
                              e.variance.array().log().sum());
    Eigen::MatrixXd centered = seq.rowwise() - e.mean.transpose();
    log_b.row(i) =
        (-0.5 * (centered.array().square().rowwise() * inv_var.transpose().array())
                    .rowwise()
                    .sum() -
         cst)
            .transpose();
  }
  return log_b;
}

struct ForwardPass {
  Eigen::MatrixXd alpha;        // K x T, scaled
  Eigen::MatrixXd b_shift;      // K x T, emissions scaled by exp(-max per column)
  Eigen::VectorXd step_norm;    // T, normalizer of the shifted recursion
  Eigen::VectorXd log_scaling;  // T, log_scaling(t) = log(step_norm(t)) + shift(t)
};

inline ForwardPass run_forward(const Sequence& seq, const HmmModel& model) {
  const Eigen::Index t_len = seq.rows();
  const int k = model.num_states();

  ForwardPass fp;
  const Eigen::MatrixXd log_b = emission_log_probs(seq, model);
  const Eigen::RowVectorXd shift = log_b.colwise().maxCoeff();
  fp.b_shift = (log_b.rowwise() - shift).array().exp();
  fp.alpha.resize(k, t_len);
  fp.step_norm.resize(t_len);
  fp.log_scaling.resize(t_len);

  Eigen::VectorXd raw = model.pi.cwiseProduct(fp.b_shift.col(0));
  for (Eigen::Index t = 0;; ++t) {
    const double c = raw.sum();
    if (!(c > 0.0) || !std::isfinite(c))
      throw NumericalError("forward pass: vanishing probability mass at t=" +
                           std::to_string(t));
    fp.step_norm(t) = c;
    fp.log_scaling(t) = std::log(c) + shift(t);
    fp.alpha.col(t) = raw / c;
    if (t + 1 == t_len) break;
    raw = (model.transition.transpose() * fp.alpha.col(t))
              .cwiseProduct(fp.b_shift.col(t + 1));
  }
  return fp;
}

inline void validate_inference_inputs(const Sequence& seq, const HmmModel& model) {
  validate_sequence(seq);
  validate_model(model);
  require(seq.cols() == model.dim(),
          "sequence dimension " + std::to_string(seq.cols()) +
              " does not match model dimension " + std::to_string(model.dim()));
}

}  // namespace detail

/// Scaled forward-backward pass: posteriors, expected transition counts and
/// log-likelihood in O(K^2 T).
inline FbResult forward_backward(const Sequence& seq, const HmmModel& model) {
  detail::validate_inference_inputs(seq, model);
  instrument::forward_backward_calls().fetch_add(1);

  const Eigen::Index t_len = seq.rows();
  const int k = model.num_states();
  const detail::ForwardPass fp = detail::run_forward(seq, model);

  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(k, t_len);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(k, t_len);
  beta.col(t_len - 1).setOnes();
  for (Eigen::Index t = t_len - 1; t >= 1; --t) {
    w.col(t) = fp.b_shift.col(t).cwiseProduct(beta.col(t)) / fp.step_norm(t);
    beta.col(t - 1) = model.transition * w.col(t);
  }

  FbResult out;
  out.log_scaling = fp.log_scaling;
  out.log_likelihood = fp.log_scaling.sum();
  out.gamma = (fp.alpha.array() * beta.array()).transpose();
  if (t_len >= 2) {
    out.xi_sum = model.transition.cwiseProduct(
        fp.alpha.leftCols(t_len - 1) * w.rightCols(t_len - 1).transpose());
  } else {
    out.xi_sum = Eigen::MatrixXd::Zero(k, k);
  }
  if (!std::isfinite(out.log_likelihood))
    throw NumericalError("forward-backward: non-finite log-likelihood");
  return out;
}

/// Log-likelihood of a sequence under a model (forward pass only).
inline double log_likelihood(const Sequence& seq, const HmmModel& model) {
  detail::validate_inference_inputs(seq, model);
  instrument::likelihood_evaluations().fetch_add(1);
  const double ll = detail::run_forward(seq, model).log_scaling.sum();
  if (!std::isfinite(ll)) throw NumericalError("log_likelihood: non-finite result");
  return ll;
}

/// Baum-Welch settings. variance_floor is relative: the effective floor per
/// dimension is variance_floor times the pooled sample variance.
struct TrainConfig {
  int max_iters = 200;
  double log_lik_rel_tol = 1e-6;
  int restarts = 5;
  std::uint64_t seed = 0;
  double variance_floor = 1e-6;
};

inline void validate_train_config(const TrainConfig& config) {
  require(config.max_iters >= 1, "train config: max_iters must be >= 1");
  require(config.restarts >= 1, "train config: restarts must be >= 1");
  require(config.log_lik_rel_tol > 0.0, "train config: tolerance must be > 0");
  require(config.variance_floor > 0.0, "train config: variance_floor must be > 0");
}

/// Seeded initial model: emission means are K distinct observation vectors
/// drawn at random, variances the pooled per-dimension sample variance, pi
/// and the transition rows uniform.
inline HmmModel init_model(const std::vector<Sequence>& dataset, int k, std::uint64_t seed) {
  validate_dataset(dataset);
  require(k >= 1, "init_model: K must be >= 1");
  const Eigen::Index total = total_observations(dataset);
  require(total >= k, "init_model: fewer than K observations in the dataset");

  Rng rng(derive_seed(seed, "hmm-init"));
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(total));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  for (int i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(
        rng.uniform_int(i, static_cast<std::int64_t>(total) - 1));
    std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
  }

  const Eigen::Index d = dataset_dim(dataset);
  const Eigen::VectorXd var = global_variance(dataset).cwiseMax(1e-12);

  HmmModel model;
  model.pi = Eigen::VectorXd::Constant(k, 1.0 / k);
  model.transition = Eigen::MatrixXd::Constant(k, k, 1.0 / k);
  model.emissions.resize(static_cast<std::size_t>(k));
  for (int s = 0; s < k; ++s) {
    Eigen::Index flat = idx[static_cast<std::size_t>(s)];
    Eigen::VectorXd mean(d);
    for (const auto& seq : dataset) {
      if (flat < seq.rows()) {
        mean = seq.row(flat).transpose();
        break;
      }
      flat -= seq.rows();
    }
    model.emissions[static_cast<std::size_t>(s)] = {mean, var};
  }
  return model;
}

/// Training outcome: the best restart's model, its per-iteration total
/// log-likelihood trace (one entry per E-step plus the final model's value)
/// and bookkeeping about the winning run.
struct TrainResult {
  HmmModel model;
  std::vector<double> log_likelihood_trace;
  int iterations = 0;  // number of M-steps performed
  int best_restart = 0;
  bool converged = false;
};

/// Observer invoked after each M-step with the restart index, iteration,
/// the pre-update total log-likelihood and the updated model.
using TrainObserver =
    std::function<void(int restart, int iteration, double log_lik, const HmmModel&)>;

namespace detail {

struct SequenceStats {
  double log_lik = 0.0;
  Eigen::VectorXd gamma0;    // K
  Eigen::MatrixXd xi;        // K x K
  Eigen::VectorXd occupancy; // K
  Eigen::MatrixXd wx;        // K x d
  Eigen::MatrixXd wxx;       // K x d
};

inline SequenceStats accumulate_stats(const Sequence& seq, const HmmModel& model) {
  const FbResult fb = forward_backward(seq, model);
  SequenceStats st;
  st.log_lik = fb.log_likelihood;
  st.gamma0 = fb.gamma.row(0).transpose();
  st.xi = fb.xi_sum;
  st.occupancy = fb.gamma.colwise().sum().transpose();
  st.wx = fb.gamma.transpose() * seq;
  st.wxx = fb.gamma.transpose() * seq.array().square().matrix();
  return st;
}

inline TrainResult run_em(const std::vector<Sequence>& dataset, int k,
                          const TrainConfig& config, std::uint64_t restart_seed,
                          int restart_index, const Eigen::VectorXd& floor,
                          const TrainObserver& observer) {
  const Eigen::Index n = static_cast<Eigen::Index>(dataset.size());
  const Eigen::Index d = dataset_dim(dataset);

  TrainResult result;
  result.best_restart = restart_index;
  HmmModel model = init_model(dataset, k, restart_seed);
  for (auto& e : model.emissions) e.variance = e.variance.cwiseMax(floor);

  std::vector<SequenceStats> stats(static_cast<std::size_t>(n));
  for (int iter = 0; iter < config.max_iters; ++iter) {
    parallel::for_index(static_cast<std::size_t>(n), [&](std::size_t i) {
      stats[i] = accumulate_stats(dataset[i], model);
    });

    double total_ll = 0.0;
    Eigen::VectorXd acc_gamma0 = Eigen::VectorXd::Zero(k);
    Eigen::MatrixXd acc_xi = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd acc_occ = Eigen::VectorXd::Zero(k);
    Eigen::MatrixXd acc_wx = Eigen::MatrixXd::Zero(k, d);
    Eigen::MatrixXd acc_wxx = Eigen::MatrixXd::Zero(k, d);
    for (const auto& st : stats) {  // fixed reduction order
      total_ll += st.log_lik;
      acc_gamma0 += st.gamma0;
      acc_xi += st.xi;
      acc_occ += st.occupancy;
      acc_wx += st.wx;
      acc_wxx += st.wxx;
    }

    if (!result.log_likelihood_trace.empty()) {
      const double prev = result.log_likelihood_trace.back();
      if (total_ll - prev <= config.log_lik_rel_tol * std::max(1.0, std::abs(prev))) {
        result.log_likelihood_trace.push_back(total_ll);
        result.converged = true;
        break;
      }
    }
    result.log_likelihood_trace.push_back(total_ll);

    // M-step
    model.pi = acc_gamma0 / acc_gamma0.sum();
    for (int i = 0; i < k; ++i) {
      const double row_sum = acc_xi.row(i).sum();
      if (row_sum < 1e-8) {
        // No transition evidence for this state: reset to uniform.
        model.transition.row(i).setConstant(1.0 / k);
      } else {
        model.transition.row(i) = acc_xi.row(i) / row_sum;
      }
    }
    for (int i = 0; i < k; ++i) {
      const double occ = acc_occ(i);
      if (occ < 1e-8) continue;  // no evidence: keep previous parameters
      auto& e = model.emissions[static_cast<std::size_t>(i)];
      e.mean = acc_wx.row(i).transpose() / occ;
      e.variance =
          (acc_wxx.row(i).transpose() / occ - e.mean.cwiseProduct(e.mean)).cwiseMax(floor);
    }
    ++result.iterations;
    if (observer) observer(restart_index, iter, total_ll, model);
  }

  if (!result.converged) {
    double final_ll = 0.0;
    for (const auto& seq : dataset) final_ll += log_likelihood(seq, model);
    result.log_likelihood_trace.push_back(final_ll);
  }
  result.model = std::move(model);
  return result;
}

}  // namespace detail

/// Multi-sequence Baum-Welch with random restarts; keeps the restart with
/// the highest final total log-likelihood (ties broken by lowest restart
/// index).
inline TrainResult train_hmm(const std::vector<Sequence>& dataset, int k,
                             const TrainConfig& config,
                             const TrainObserver& observer = {}) {
  validate_dataset(dataset);
  validate_train_config(config);
  require(k >= 1, "train: K must be >= 1");
  require(total_observations(dataset) >= k,
          "train: K exceeds the total observation count (ill-posed fit)");

  const Eigen::VectorXd floor =
      config.variance_floor * global_variance(dataset).cwiseMax(1e-12);

  TrainResult best;
  double best_ll = -std::numeric_limits<double>::infinity();
  bool have_best = false;
  for (int r = 0; r < config.restarts; ++r) {
    TrainResult run = detail::run_em(dataset, k, config,
                                     derive_seed(config.seed, "baum-welch-restart",
                                                 static_cast<std::uint64_t>(r)),
                                     r, floor, observer);
    const double final_ll = run.log_likelihood_trace.back();
    if (!std::isfinite(final_ll)) continue;
    if (!have_best || final_ll > best_ll) {
      best = std::move(run);
      best_ll = final_ll;
      have_best = true;
    }
  }
  if (!have_best) throw NumericalError("train: every restart diverged");
  return best;
}

inline HmmModel baum_welch(const std::vector<Sequence>& dataset, int k,
                           const TrainConfig& config) {
  return train_hmm(dataset, k, config).model;
}

/// Draw a length-T sequence from the model. Deterministic given the seed.
inline Sequence sample_sequence(const HmmModel& model, Eigen::Index t_len,
                                std::uint64_t seed) {
  validate_model(model);
  require(t_len >= 1, "sample: T must be >= 1");
  Rng rng(derive_seed(seed, "hmm-sample"));
  const int k = model.num_states();
  const int d = model.dim();

  auto draw_state = [&](const Eigen::VectorXd& dist) {
    const double u = rng.uniform();
    double cum = 0.0;
    for (int i = 0; i < k; ++i) {
      cum += dist(i);
      if (u < cum) return i;
    }
    return k - 1;
  };

  Sequence seq(t_len, d);
  int state = draw_state(model.pi);
  for (Eigen::Index t = 0; t < t_len; ++t) {
    const auto& e = model.emissions[static_cast<std::size_t>(state)];
    for (int j = 0; j < d; ++j)
      seq(t, j) = e.mean(j) + std::sqrt(e.variance(j)) * rng.normal();
    if (t + 1 < t_len) state = draw_state(model.transition.row(state).transpose());
  }
  return seq;
}

}  // namespace ssd

#endif  // SSD_HMM_HPP
