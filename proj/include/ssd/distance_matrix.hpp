#ifndef SSD_DISTANCE_MATRIX_HPP
#define SSD_DISTANCE_MATRIX_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "ssd/common.hpp"

namespace ssd {

/// N x N pairwise distances: symmetric, nonnegative, zero diagonal.
/// +infinity entries are permitted (disjoint supports without smoothing).
using DistanceMatrix = Eigen::MatrixXd;

inline void validate_distance_matrix(const DistanceMatrix& d,
                                     const std::string& what = "distance matrix") {
  require(d.rows() == d.cols() && d.rows() >= 1, what + ": must be square");
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    require(std::abs(d(i, i)) <= 1e-10, what + ": nonzero diagonal at " + std::to_string(i));
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      const double v = d(i, j);
      require(!std::isnan(v), what + ": NaN entry");
      require(v >= 0.0, what + ": negative entry at (" + std::to_string(i) + "," +
                            std::to_string(j) + ")");
      if (std::isfinite(v) && std::isfinite(d(j, i)))
        require(std::abs(v - d(j, i)) <= 1e-10, what + ": asymmetric at (" +
                                                    std::to_string(i) + "," +
                                                    std::to_string(j) + ")");
      else
        require(std::isinf(v) == std::isinf(d(j, i)), what + ": asymmetric infinities");
    }
  }
}

}  // namespace ssd

#endif  // SSD_DISTANCE_MATRIX_HPP
