#ifndef SSD_BASELINES_HPP
#define SSD_BASELINES_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "ssd/common.hpp"
#include "ssd/distance_matrix.hpp"
#include "ssd/hmm.hpp"
#include "ssd/sequence.hpp"

namespace ssd {

/// N x N matrix of length-normalized cross log-likelihoods:
/// L(i, j) = log p(S_j | model_i) / length(S_j).
using LikelihoodMatrix = Eigen::MatrixXd;

/// One HMM per sequence, model i trained only on sequence i.
inline std::vector<HmmModel> train_per_sequence_models(const std::vector<Sequence>& dataset,
                                                       int km, const TrainConfig& config) {
  validate_dataset(dataset);
  require(km >= 1, "per-sequence training: K_m must be >= 1");
  for (std::size_t i = 0; i < dataset.size(); ++i)
    require(dataset[i].rows() >= km, "sequence " + std::to_string(i) +
                                         " is too short for K_m = " + std::to_string(km) +
                                         " states");
  std::vector<HmmModel> models(dataset.size());
  parallel::for_index(dataset.size(), [&](std::size_t i) {
    models[i] = train_hmm({dataset[i]}, km, config).model;
  });
  return models;
}

inline LikelihoodMatrix likelihood_matrix(const std::vector<Sequence>& dataset,
                                          const std::vector<HmmModel>& models) {
  validate_dataset(dataset);
  require(models.size() == dataset.size(),
          "likelihood matrix: need exactly one model per sequence");
  const std::size_t n = dataset.size();
  LikelihoodMatrix l(n, n);
  parallel::for_index(n, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j)
      l(i, j) = log_likelihood(dataset[j], models[i]) / static_cast<double>(dataset[j].rows());
  });
  return l;
}

inline void validate_likelihood_matrix(const LikelihoodMatrix& l) {
  require(l.rows() == l.cols() && l.rows() >= 1, "likelihood matrix: must be square");
  require(l.allFinite(), "likelihood matrix: non-finite entries");
}

namespace detail {

/// Force a zero diagonal and, if any off-diagonal entry is negative, shift
/// all off-diagonal entries up by the common offset that makes the smallest
/// zero. Kernel-width selection downstream is relative to the distance
/// spread, so cluster structure survives the shift.
inline DistanceMatrix canonicalize_distance(DistanceMatrix d) {
  d.diagonal().setZero();
  const Eigen::Index n = d.rows();
  double min_off = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) min_off = std::min(min_off, d(i, j));
  if (n > 1 && min_off < 0.0) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j) d(i, j) -= min_off;
  }
  return d;
}

}  // namespace detail

/// Signed symmetrization s_ij = (l_ij + l_ji) / 2, before any distance
/// canonicalization.
inline Eigen::MatrixXd symmetrized_log_likelihood(const LikelihoodMatrix& l) {
  validate_likelihood_matrix(l);
  return 0.5 * (l + l.transpose());
}

/// SYM distance: negated symmetrized cross log-likelihood, canonicalized so
/// the diagonal is zero and entries are nonnegative.
inline DistanceMatrix sym_distance(const LikelihoodMatrix& l) {
  return detail::canonicalize_distance(-symmetrized_log_likelihood(l));
}

/// BP distance: d_ij = ((l_ij - l_ii)/l_ii + (l_ji - l_jj)/l_jj) / 2.
inline DistanceMatrix bp_distance(const LikelihoodMatrix& l) {
  validate_likelihood_matrix(l);
  const Eigen::Index n = l.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    if (l(i, i) == 0.0)
      throw NumericalError("bp distance: zero self-likelihood for sequence " +
                           std::to_string(i));
  DistanceMatrix d(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      d(i, j) = 0.5 * ((l(i, j) - l(i, i)) / l(i, i) + (l(j, i) - l(j, j)) / l(j, j));
  return detail::canonicalize_distance(std::move(d));
}

/// Yin-Yang distance: d_ij = |l_ii + l_jj - l_ij - l_ji|.
inline DistanceMatrix yy_distance(const LikelihoodMatrix& l) {
  validate_likelihood_matrix(l);
  const Eigen::Index n = l.rows();
  DistanceMatrix d(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      d(i, j) = std::abs(l(i, i) + l(j, j) - l(i, j) - l(j, i));
  d.diagonal().setZero();
  return d;
}

/// Symmetrized KL divergence between two strictly positive distributions.
inline double symmetrized_kl(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  require(p.size() == q.size() && p.size() >= 1, "symmetrized KL: size mismatch");
  require(p.minCoeff() > 0.0 && q.minCoeff() > 0.0,
          "symmetrized KL: distributions must have full support");
  double acc = 0.0;
  for (Eigen::Index x = 0; x < p.size(); ++x)
    acc += (p(x) - q(x)) * (std::log(p(x)) - std::log(q(x)));
  return 0.5 * acc;
}

/// KL distance over columns of the column-normalized likelihood matrix.
/// Columns become distributions by a max-shifted exponential normalization,
/// floored at 1e-12 and renormalized so every KL term is finite. An optional
/// subset of P <= N model rows (chosen uniformly at random) can stand in for
/// the full model space.
inline DistanceMatrix kl_distance(const LikelihoodMatrix& l, int subset_size = 0,
                                  std::uint64_t seed = 0) {
  validate_likelihood_matrix(l);
  const Eigen::Index n = l.rows();
  require(n >= 2, "kl distance: needs at least two sequences");
  require(subset_size <= n, "kl distance: subset size exceeds the number of models");

  std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
  std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  if (subset_size >= 1 && subset_size < n) {
    Rng rng(derive_seed(seed, "kl-subset"));
    for (Eigen::Index i = 0; i < subset_size; ++i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(i, n - 1));
      std::swap(rows[static_cast<std::size_t>(i)], rows[j]);
    }
    rows.resize(static_cast<std::size_t>(subset_size));
    std::sort(rows.begin(), rows.end());
  }
  const Eigen::Index p = static_cast<Eigen::Index>(rows.size());

  Eigen::MatrixXd f(p, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd col(p);
    for (Eigen::Index r = 0; r < p; ++r) col(r) = l(rows[static_cast<std::size_t>(r)], j);
    col.array() -= col.maxCoeff();
    Eigen::VectorXd dist = col.array().exp();
    dist /= dist.sum();
    dist = dist.cwiseMax(1e-12);
    dist /= dist.sum();
    f.col(j) = dist;
  }

  DistanceMatrix d = DistanceMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = symmetrized_kl(f.col(i), f.col(j));
  return d;
}

}  // namespace ssd

#endif  // SSD_BASELINES_HPP
