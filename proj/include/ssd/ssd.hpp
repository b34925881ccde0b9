#ifndef SSD_SSD_HPP
#define SSD_SSD_HPP

// Umbrella header: state-space dynamics distances for sequence clustering.

#include "ssd/baselines.hpp"
#include "ssd/common.hpp"
#include "ssd/datasets.hpp"
#include "ssd/distance_matrix.hpp"
#include "ssd/eval.hpp"
#include "ssd/hmm.hpp"
#include "ssd/io.hpp"
#include "ssd/model_io.hpp"
#include "ssd/sequence.hpp"
#include "ssd/spectral.hpp"
#include "ssd/ssd_distance.hpp"

#endif  // SSD_SSD_HPP
