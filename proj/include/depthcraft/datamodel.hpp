#pragma once

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "depthcraft/error.hpp"
#include "depthcraft/random.hpp"

namespace depthcraft {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// An n x d sample, one observation per row. Entries are finite and the
/// shape is fixed once constructed.
class DataMatrix {
 public:
  DataMatrix() = default;

  explicit DataMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.cols() < 1 && values_.rows() > 0) {
      throw ParameterError("data matrix needs at least one column");
    }
    if (!values_.allFinite()) {
      for (Index i = 0; i < values_.rows(); ++i) {
        for (Index j = 0; j < values_.cols(); ++j) {
          if (!std::isfinite(values_(i, j))) {
            throw ParameterError("non-finite entry at row " + std::to_string(i + 1) +
                                 ", column " + std::to_string(j + 1));
          }
        }
      }
    }
  }

  Index rows() const { return values_.rows(); }
  Index cols() const { return values_.cols(); }
  bool empty() const { return values_.rows() == 0; }

  const Matrix& values() const { return values_; }
  Vector row(Index i) const { return values_.row(i).transpose(); }

  /// Copies the rows listed in `indices`, in that order.
  DataMatrix select(const std::vector<Index>& indices) const {
    Matrix out(static_cast<Index>(indices.size()), values_.cols());
    for (std::size_t k = 0; k < indices.size(); ++k) out.row(static_cast<Index>(k)) = values_.row(indices[k]);
    return DataMatrix(std::move(out));
  }

  Vector column_means() const { return values_.colwise().mean().transpose(); }

 private:
  Matrix values_;
};

/// A DataMatrix with dense class labels 1..q.
class LabeledSample {
 public:
  LabeledSample() = default;

  LabeledSample(DataMatrix data, std::vector<int> labels, std::vector<std::string> class_names = {})
      : data_(std::move(data)), labels_(std::move(labels)), class_names_(std::move(class_names)) {
    if (static_cast<Index>(labels_.size()) != data_.rows()) {
      throw ParameterError("label count " + std::to_string(labels_.size()) + " does not match row count " +
                           std::to_string(data_.rows()));
    }
    int q = 0;
    for (int label : labels_) {
      if (label < 1) throw ParameterError("class labels must be positive integers");
      q = std::max(q, label);
    }
    cardinalities_.assign(static_cast<std::size_t>(q), 0);
    for (int label : labels_) ++cardinalities_[static_cast<std::size_t>(label - 1)];
    for (int j = 0; j < q; ++j) {
      if (cardinalities_[static_cast<std::size_t>(j)] == 0) {
        throw ParameterError("class " + std::to_string(j + 1) + " has no observations");
      }
    }
    if (class_names_.empty()) {
      for (int j = 1; j <= q; ++j) class_names_.push_back(std::to_string(j));
    } else if (static_cast<int>(class_names_.size()) != q) {
      throw ParameterError("class name count does not match number of classes");
    }
  }

  const DataMatrix& data() const { return data_; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<Index>& cardinalities() const { return cardinalities_; }
  const std::vector<std::string>& class_names() const { return class_names_; }

  int num_classes() const { return static_cast<int>(cardinalities_.size()); }
  Index size() const { return data_.rows(); }
  Index dim() const { return data_.cols(); }

  /// Rows belonging to class `label` (1-based).
  std::vector<Index> class_indices(int label) const {
    std::vector<Index> out;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i] == label) out.push_back(static_cast<Index>(i));
    }
    return out;
  }

  DataMatrix class_data(int label) const { return data_.select(class_indices(label)); }

  /// Sub-sample keeping the original label numbering and names. Throws if a
  /// class would become empty.
  LabeledSample subset(const std::vector<Index>& indices) const {
    std::vector<int> labels;
    labels.reserve(indices.size());
    for (Index i : indices) labels.push_back(labels_[static_cast<std::size_t>(i)]);
    return LabeledSample(data_.select(indices), std::move(labels), class_names_);
  }

 private:
  DataMatrix data_;
  std::vector<int> labels_;
  std::vector<Index> cardinalities_;
  std::vector<std::string> class_names_;
};

// ---------------------------------------------------------------------------
// CSV

enum class LabelColumn { last, none };

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '"')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '"')) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

enum class NumberKind { finite, non_finite, text };

inline NumberKind classify_number(const std::string& cell, double& out) {
  if (cell.empty()) return NumberKind::text;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    if (ec == std::errc::result_out_of_range) return NumberKind::non_finite;
    return NumberKind::text;
  }
  return std::isfinite(out) ? NumberKind::finite : NumberKind::non_finite;
}

struct CsvTable {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  bool had_header = false;
};

inline CsvTable read_csv_table(std::istream& in, std::size_t feature_cols_hint_from_end) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    table.rows.push_back(split_csv_line(line));
    table.line_numbers.push_back(line_no);
  }
  if (table.rows.empty()) throw FormatError("CSV input contains no rows");
  // Header: every feature cell of the first row is non-numeric text.
  const auto& first = table.rows.front();
  std::size_t features = first.size() > feature_cols_hint_from_end ? first.size() - feature_cols_hint_from_end : 0;
  bool header = features > 0;
  for (std::size_t j = 0; j < features && header; ++j) {
    double v = 0;
    if (classify_number(first[j], v) != NumberKind::text) header = false;
  }
  if (header) {
    table.rows.erase(table.rows.begin());
    table.line_numbers.erase(table.line_numbers.begin());
    table.had_header = true;
  }
  if (table.rows.empty()) throw FormatError("CSV input has a header but no data rows");
  std::size_t width = table.rows.front().size();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (table.rows[i].size() != width) {
      throw FormatError("ragged CSV: line " + std::to_string(table.line_numbers[i]) + " has " +
                        std::to_string(table.rows[i].size()) + " cells, expected " + std::to_string(width));
    }
  }
  return table;
}

inline Matrix parse_numeric_block(const CsvTable& table, std::size_t cols) {
  Matrix values(static_cast<Index>(table.rows.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      double v = 0;
      NumberKind kind = classify_number(table.rows[i][j], v);
      if (kind != NumberKind::finite) {
        throw ParseError("cannot parse '" + table.rows[i][j] + "' as a finite number at line " +
                         std::to_string(table.line_numbers[i]) + ", column " + std::to_string(j + 1));
      }
      values(static_cast<Index>(i), static_cast<Index>(j)) = v;
    }
  }
  return values;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Reads a numeric CSV whose last column holds class labels. Labels are
/// remapped to 1..q in order of first occurrence; the original text is kept
/// as the class name.
inline LabeledSample read_labeled_csv(std::istream& in) {
  detail::CsvTable table = detail::read_csv_table(in, 1);
  std::size_t width = table.rows.front().size();
  if (width < 2) throw FormatError("labeled CSV needs at least one feature column and a label column");
  Matrix values = detail::parse_numeric_block(table, width - 1);
  std::map<std::string, int> remap;
  std::vector<std::string> names;
  std::vector<int> labels;
  labels.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const std::string& text = table.rows[i][width - 1];
    if (text.empty()) {
      throw ParseError("empty class label at line " + std::to_string(table.line_numbers[i]));
    }
    auto [it, inserted] = remap.emplace(text, static_cast<int>(names.size()) + 1);
    if (inserted) names.push_back(text);
    labels.push_back(it->second);
  }
  return LabeledSample(DataMatrix(std::move(values)), std::move(labels), std::move(names));
}

/// Reads a purely numeric CSV (no label column).
inline DataMatrix read_matrix_csv(std::istream& in) {
  detail::CsvTable table = detail::read_csv_table(in, 0);
  return DataMatrix(detail::parse_numeric_block(table, table.rows.front().size()));
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open file '" + path + "'");
  return in;
}

inline LabeledSample load_labeled_csv(const std::string& path) {
  auto in = open_input(path);
  return read_labeled_csv(in);
}

inline DataMatrix load_matrix_csv(const std::string& path) {
  auto in = open_input(path);
  return read_matrix_csv(in);
}

/// Writes rows at 17 significant digits followed by the original class name.
inline void write_labeled_csv(std::ostream& out, const LabeledSample& sample) {
  const Matrix& x = sample.data().values();
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) out << detail::format_double(x(i, j)) << ',';
    out << sample.class_names()[static_cast<std::size_t>(sample.labels()[static_cast<std::size_t>(i)] - 1)] << '\n';
  }
}

inline void write_matrix_csv(std::ostream& out, const Matrix& x) {
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      if (j > 0) out << ',';
      out << detail::format_double(x(i, j));
    }
    out << '\n';
  }
}

inline void save_labeled_csv(const std::string& path, const LabeledSample& sample) {
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot write file '" + path + "'");
  write_labeled_csv(out, sample);
}

// ---------------------------------------------------------------------------
// Synthetic two-class data

enum class Family { student_t, gaussian, cauchy };

/// Two elliptical classes sharing a scale matrix and differing in location.
struct GeneratorSpec {
  Family family = Family::gaussian;
  double df = std::numeric_limits<double>::infinity();
  Vector mu1 = Vector::Zero(2);
  Vector mu2 = Vector::Ones(2);
  Matrix sigma = (Matrix(2, 2) << 1.0, 1.0, 1.0, 4.0).finished();
  std::uint64_t seed = 0;

  /// Degrees of freedom actually used: infinity for gaussian, 1 for cauchy.
  double effective_df() const {
    switch (family) {
      case Family::gaussian: return std::numeric_limits<double>::infinity();
      case Family::cauchy: return 1.0;
      case Family::student_t: return df;
    }
    return df;
  }

  static GeneratorSpec with_df(double df, std::uint64_t seed = 0) {
    GeneratorSpec spec;
    spec.seed = seed;
    if (std::isinf(df)) {
      spec.family = Family::gaussian;
    } else if (df == 1.0) {
      spec.family = Family::cauchy;
      spec.df = 1.0;
    } else {
      spec.family = Family::student_t;
      spec.df = df;
    }
    return spec;
  }
};

/// Stateful sampler behind generate_two_class. The Gaussian stream and the
/// radial chi-square stream are separate, so changing df only rescales points.
class TwoClassGenerator {
 public:
  explicit TwoClassGenerator(const GeneratorSpec& spec)
      : spec_(spec), df_(spec.effective_df()), normal_rng_(spec.seed), radial_rng_(split_seed(spec.seed, 1)) {
    const Index d = spec.sigma.rows();
    if (spec.sigma.cols() != d || spec.mu1.size() != d || spec.mu2.size() != d) {
      throw ParameterError("generator: mu1, mu2 and sigma dimensions disagree");
    }
    if (!spec.sigma.isApprox(spec.sigma.transpose(), 1e-12)) {
      throw ParameterError("generator: sigma must be symmetric");
    }
    Eigen::LLT<Matrix> llt(spec.sigma);
    if (llt.info() != Eigen::Success) throw ParameterError("generator: sigma is not positive definite");
    chol_ = llt.matrixL();
    if (!(df_ > 0.0)) throw ParameterError("generator: degrees of freedom must be positive");
  }

  Index dim() const { return chol_.rows(); }

  Vector draw(int cls) {
    const Index d = chol_.rows();
    Vector z(d);
    for (Index j = 0; j < d; ++j) z(j) = normal_(normal_rng_);
    if (std::isfinite(df_)) {
      std::chi_squared_distribution<double> chi2(df_);
      double w = chi2(radial_rng_);
      z *= std::sqrt(df_ / std::max(w, std::numeric_limits<double>::min()));
    }
    const Vector& mu = cls == 1 ? spec_.mu1 : spec_.mu2;
    return mu + chol_ * z;
  }

 private:
  GeneratorSpec spec_;
  double df_;
  Matrix chol_;
  Rng normal_rng_;
  Rng radial_rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Class 1 rows first, then class 2; deterministic in spec.seed.
inline LabeledSample generate_two_class(const GeneratorSpec& spec, Index n_per_class) {
  if (n_per_class < 1) throw ParameterError("generator: n-per-class must be at least 1");
  TwoClassGenerator gen(spec);
  Matrix x(2 * n_per_class, gen.dim());
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(2 * n_per_class));
  for (int cls = 1; cls <= 2; ++cls) {
    for (Index i = 0; i < n_per_class; ++i) {
      x.row((cls - 1) * n_per_class + i) = gen.draw(cls).transpose();
      labels.push_back(cls);
    }
  }
  return LabeledSample(DataMatrix(std::move(x)), std::move(labels));
}

}  // namespace depthcraft
