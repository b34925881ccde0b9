#ifndef SSD_MODEL_IO_HPP
#define SSD_MODEL_IO_HPP

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssd/common.hpp"
#include "ssd/hmm.hpp"

namespace ssd {

inline constexpr int kModelFormatVersion = 1;

/// Model as a versioned JSON document. Doubles round-trip exactly.
inline nlohmann::json model_to_json(const HmmModel& model) {
  validate_model(model);
  nlohmann::json j;
  j["format_version"] = kModelFormatVersion;
  j["type"] = "gaussian_hmm";
  j["num_states"] = model.num_states();
  j["dim"] = model.dim();
  j["initial"] = std::vector<double>(model.pi.data(), model.pi.data() + model.pi.size());
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < model.num_states(); ++i) {
    const Eigen::RowVectorXd row = model.transition.row(i);
    rows.push_back(std::vector<double>(row.data(), row.data() + row.size()));
  }
  j["transition"] = rows;
  nlohmann::json emissions = nlohmann::json::array();
  for (const auto& e : model.emissions) {
    emissions.push_back(
        {{"mean", std::vector<double>(e.mean.data(), e.mean.data() + e.mean.size())},
         {"variance",
          std::vector<double>(e.variance.data(), e.variance.data() + e.variance.size())}});
  }
  j["emissions"] = emissions;
  return j;
}

inline HmmModel model_from_json(const nlohmann::json& j) {
  if (!j.contains("format_version") || j["format_version"].get<int>() != kModelFormatVersion)
    throw IoError("model: missing or unsupported format_version");
  if (j.value("type", "") != std::string("gaussian_hmm"))
    throw IoError("model: unsupported type");
  const int k = j.at("num_states").get<int>();
  const int d = j.at("dim").get<int>();

  HmmModel model;
  const auto initial = j.at("initial").get<std::vector<double>>();
  if (static_cast<int>(initial.size()) != k) throw IoError("model: initial size mismatch");
  model.pi = Eigen::Map<const Eigen::VectorXd>(initial.data(), k);

  model.transition.resize(k, k);
  const auto& rows = j.at("transition");
  if (static_cast<int>(rows.size()) != k) throw IoError("model: transition row count mismatch");
  for (int i = 0; i < k; ++i) {
    const auto row = rows[static_cast<std::size_t>(i)].get<std::vector<double>>();
    if (static_cast<int>(row.size()) != k) throw IoError("model: transition column count mismatch");
    model.transition.row(i) = Eigen::Map<const Eigen::RowVectorXd>(row.data(), k);
  }

  const auto& emissions = j.at("emissions");
  if (static_cast<int>(emissions.size()) != k) throw IoError("model: emission count mismatch");
  for (const auto& je : emissions) {
    const auto mean = je.at("mean").get<std::vector<double>>();
    const auto variance = je.at("variance").get<std::vector<double>>();
    if (static_cast<int>(mean.size()) != d || static_cast<int>(variance.size()) != d)
      throw IoError("model: emission dimension mismatch");
    model.emissions.push_back({Eigen::Map<const Eigen::VectorXd>(mean.data(), d),
                               Eigen::Map<const Eigen::VectorXd>(variance.data(), d)});
  }
  validate_model(model);
  return model;
}

inline void save_model(const HmmModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << model_to_json(model).dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

inline HmmModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  nlohmann::json j;
  try {
    in >> j;
    return model_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("cannot parse model " + path + ": " + e.what());
  }
}

}  // namespace ssd

#endif  // SSD_MODEL_IO_HPP
