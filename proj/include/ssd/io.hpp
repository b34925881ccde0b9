#ifndef SSD_IO_HPP
#define SSD_IO_HPP

#include <Eigen/Dense>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ssd/common.hpp"
#include "ssd/sequence.hpp"
#include "ssd/spectral.hpp"

namespace ssd {
namespace detail {

/// Shortest decimal form that round-trips a double exactly.
inline std::string format_double(double x) {
  char buf[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

inline std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline double parse_double_field(const std::string& field, int line_no) {
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size())
    throw IoError("line " + std::to_string(line_no) + ": non-numeric field '" + field + "'");
  return value;
}

inline long long parse_int_field(const std::string& field, int line_no) {
  errno = 0;
  char* end = nullptr;
  const long long value = std::strtoll(field.c_str(), &end, 10);
  if (field.empty() || end != field.c_str() + field.size() || errno == ERANGE)
    throw IoError("line " + std::to_string(line_no) + ": non-integer field '" + field + "'");
  return value;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Sequence CSV. Header: seq_id,t,label,f0,...,f{d-1} with `label` optional;
// rows sorted by (seq_id, t); '.' decimal separator; written doubles
// round-trip exactly.
// ---------------------------------------------------------------------------

inline void save_sequences(const std::string& path, const LabeledDataset& data) {
  validate_dataset(data);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  const Eigen::Index d = dataset_dim(data);
  const bool labeled = data.labeled();
  out << "seq_id,t";
  if (labeled) out << ",label";
  for (Eigen::Index k = 0; k < d; ++k) out << ",f" << k;
  out << '\n';
  for (std::size_t i = 0; i < data.sequences.size(); ++i) {
    const Sequence& seq = data.sequences[i];
    for (Eigen::Index t = 0; t < seq.rows(); ++t) {
      out << i << ',' << t;
      if (labeled) out << ',' << data.labels[i];
      for (Eigen::Index k = 0; k < d; ++k) out << ',' << detail::format_double(seq(t, k));
      out << '\n';
    }
  }
  if (!out.flush()) throw IoError("write failed: " + path);
}

inline LabeledDataset load_sequences(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  const std::vector<std::string> header = detail::split_csv_line(line);
  if (header.size() < 3 || header[0] != "seq_id" || header[1] != "t")
    throw IoError(path + ": header must start with seq_id,t");
  const bool labeled = header[2] == "label";
  const std::size_t first_feature = labeled ? 3 : 2;
  const auto d = static_cast<Eigen::Index>(header.size() - first_feature);
  if (d < 1) throw IoError(path + ": no feature columns in header");
  for (Eigen::Index k = 0; k < d; ++k)
    if (header[first_feature + static_cast<std::size_t>(k)] != "f" + std::to_string(k))
      throw IoError(path + ": feature columns must be named f0..f" + std::to_string(d - 1));

  LabeledDataset data;
  std::vector<long long> raw_labels;
  std::vector<Eigen::RowVectorXd> rows;
  long long current_seq = -1, current_label = 0, prev_t = 0;
  bool any_label = false;

  auto flush_sequence = [&] {
    if (rows.empty()) return;
    Sequence seq(static_cast<Eigen::Index>(rows.size()), d);
    for (std::size_t r = 0; r < rows.size(); ++r) seq.row(static_cast<Eigen::Index>(r)) = rows[r];
    data.sequences.push_back(std::move(seq));
    if (labeled) raw_labels.push_back(current_label);
    rows.clear();
  };

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = detail::split_csv_line(line);
    if (fields.size() != header.size())
      throw IoError(path + ": line " + std::to_string(line_no) + ": expected " +
                    std::to_string(header.size()) + " fields, got " +
                    std::to_string(fields.size()));
    const long long seq_id = detail::parse_int_field(fields[0], line_no);
    const long long t = detail::parse_int_field(fields[1], line_no);
    if (seq_id != current_seq) {
      if (seq_id < current_seq)
        throw IoError(path + ": line " + std::to_string(line_no) +
                      ": rows must be sorted by seq_id");
      flush_sequence();
      current_seq = seq_id;
      prev_t = -1;
    }
    if (t == prev_t)
      throw IoError(path + ": line " + std::to_string(line_no) + ": duplicate (seq_id, t) = (" +
                    std::to_string(seq_id) + ", " + std::to_string(t) + ")");
    if (t < prev_t)
      throw IoError(path + ": line " + std::to_string(line_no) +
                    ": rows must be sorted by t within a sequence");
    prev_t = t;
    if (labeled) {
      const long long label = detail::parse_int_field(fields[2], line_no);
      if (label < 0)
        throw IoError(path + ": line " + std::to_string(line_no) + ": negative label");
      if (rows.empty())
        current_label = label;
      else if (label != current_label)
        throw IoError(path + ": line " + std::to_string(line_no) +
                      ": label changes within seq_id " + std::to_string(seq_id));
      any_label = true;
    }
    Eigen::RowVectorXd row(d);
    for (Eigen::Index k = 0; k < d; ++k)
      row(k) = detail::parse_double_field(fields[first_feature + static_cast<std::size_t>(k)],
                                          line_no);
    rows.push_back(std::move(row));
  }
  flush_sequence();
  if (data.sequences.empty()) throw IoError(path + ": no data rows");

  if (labeled && any_label) {
    // Remap raw labels to a dense [0, C) range by sorted distinct value.
    std::map<long long, int> dense;
    for (long long raw : raw_labels) dense.emplace(raw, 0);
    int next = 0;
    for (auto& [raw, id] : dense) id = next++;
    data.labels.reserve(raw_labels.size());
    for (long long raw : raw_labels) data.labels.push_back(dense.at(raw));
  }
  validate_dataset(data);
  return data;
}

// ---------------------------------------------------------------------------
// Matrix CSV: one row per line, comma-separated, exact round-trip precision.
// Infinities are written as inf/-inf.
// ---------------------------------------------------------------------------

inline void save_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << detail::format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out.flush()) throw IoError("write failed: " + path);
}

inline Eigen::MatrixXd load_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = detail::split_csv_line(line);
    std::vector<double> row;
    row.reserve(fields.size());
    for (const std::string& f : fields) row.push_back(detail::parse_double_field(f, line_no));
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError(path + ": line " + std::to_string(line_no) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(path + ": empty matrix");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

// ---------------------------------------------------------------------------
// Label / assignment CSV: header index,label.
// ---------------------------------------------------------------------------

inline void save_labels_csv(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << labels[i] << '\n';
  if (!out.flush()) throw IoError("write failed: " + path);
}

inline std::vector<int> load_labels_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line) || detail::split_csv_line(line) != std::vector<std::string>{"index", "label"})
    throw IoError(path + ": expected header index,label");
  std::vector<int> labels;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = detail::split_csv_line(line);
    if (fields.size() != 2)
      throw IoError(path + ": line " + std::to_string(line_no) + ": expected 2 fields");
    const long long index = detail::parse_int_field(fields[0], line_no);
    if (index != static_cast<long long>(labels.size()))
      throw IoError(path + ": line " + std::to_string(line_no) + ": indices must be 0,1,2,...");
    labels.push_back(static_cast<int>(detail::parse_int_field(fields[1], line_no)));
  }
  if (labels.empty()) throw IoError(path + ": no labels");
  return labels;
}

/// Rebuild a Segmentation from a piecewise-constant label sequence
/// 0,...,0,1,...,1,...,C-1.
inline Segmentation segmentation_from_labels(const std::vector<int>& labels) {
  require(!labels.empty(), "segmentation labels: empty");
  Segmentation seg;
  seg.n = static_cast<Eigen::Index>(labels.size());
  int prev = -1;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == prev) continue;
    require(labels[i] == prev + 1,
            "segmentation labels: must be consecutive runs 0,1,...,C-1");
    seg.starts.push_back(static_cast<Eigen::Index>(i));
    prev = labels[i];
  }
  validate_segmentation(seg);
  return seg;
}

}  // namespace ssd

#endif  // SSD_IO_HPP
