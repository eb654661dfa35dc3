#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "depthcraft.hpp"

namespace dcli {

using namespace depthcraft;

// Options shared by every subcommand that evaluates a depth.
struct DepthFlags {
  std::string notion = "halfspace";
  bool exact = false;
  bool approx = false;
  int num_directions = 1000;
  std::string mah_estimate = "moment";
  double mah_par_mcd = 0.75;
  bool refine = false;
  double num_simplices = 1000;
  std::vector<double> bandwidth;
  bool no_pretransform = false;
  long halfspace_cap = 60;
  double simplex_cap = 1e7;

  void add(CLI::App* sub) {
    sub->add_option("--notion", notion, "depth notion")->capture_default_str();
    sub->add_flag("--exact", exact, "exact algorithm");
    sub->add_flag("--approx", approx, "approximate algorithm");
    sub->add_option("--num-directions", num_directions, "random directions (approximate halfspace, projection)")
        ->capture_default_str();
    sub->add_option("--mah-estimate", mah_estimate, "location/scatter estimate: moment, mcd or none")
        ->capture_default_str();
    sub->add_option("--mah-par-mcd", mah_par_mcd, "MCD subset fraction")->capture_default_str();
    sub->add_flag("--refine", refine, "polish projection directions by Nelder-Mead");
    sub->add_option("--num-simplices", num_simplices, "simplices for approximate simplicial depth (count or fraction)")
        ->capture_default_str();
    sub->add_option("--kernel-bandwidth", bandwidth, "kernel bandwidth, one value or one per class");
    sub->add_flag("--no-pretransform", no_pretransform, "potential depth without standardization");
    sub->add_option("--halfspace-cap", halfspace_cap, "largest n for exact halfspace depth in d >= 3")
        ->capture_default_str();
    sub->add_option("--simplex-cap", simplex_cap, "largest simplex count for exact simplicial depth")
        ->capture_default_str();
  }

  DepthSpec build(std::uint64_t seed) const {
    if (exact && approx) throw ParameterError("exact/approx: give at most one of --exact and --approx");
    DepthSpec s = DepthSpec::of(notion_from_string(notion));
    if (exact) s.exact = true;
    if (approx) s.exact = false;
    s.num_directions = num_directions;
    s.estimator = estimator_from_string(mah_estimate);
    s.mcd_fraction = mah_par_mcd;
    s.refine = refine;
    s.simplex_count = num_simplices;
    if (!bandwidth.empty()) s.bandwidth = bandwidth;
    s.pretransform = !no_pretransform;
    s.halfspace_cap = halfspace_cap;
    s.simplex_cap = simplex_cap;
    s.seed = seed;
    s.validate();
    return s;
  }
};

// Options of the depth-based classifier.
struct TrainFlags {
  DepthFlags depth;
  std::string separator = "alpha";
  std::string aggregation = "majority";
  int max_degree = 3;
  int folds = 10;
  long k_max = 0;
  int polynomial_starts = 10;
  std::vector<std::string> outsider_method{"lda"};
  bool use_convex = false;

  void add(CLI::App* sub) {
    depth.add(sub);
    sub->add_option("--separator", separator, "alpha, polynomial, knn, maxdepth or dknn")->capture_default_str();
    sub->add_option("--aggregation", aggregation, "majority or sequent (binary separators)")->capture_default_str();
    sub->add_option("--max-degree", max_degree, "largest polynomial degree")->capture_default_str();
    sub->add_option("--folds", folds, "cross-validation folds for degree selection")->capture_default_str();
    sub->add_option("--k-max", k_max, "largest k tried by knn and dknn (0: default)")->capture_default_str();
    sub->add_option("--polynomial-starts", polynomial_starts, "random restarts of the polynomial fit")
        ->capture_default_str();
    sub->add_option("--outsider-method", outsider_method, "outsider treatments (first is the default)")
        ->capture_default_str();
    sub->add_flag("--use-convex", use_convex, "outsiders are points outside every class hull");
  }

  TrainConfig build(std::uint64_t seed) const {
    TrainConfig c;
    c.depth = depth.build(seed);
    c.separator.kind = separator_from_string(separator);
    c.separator.max_degree = max_degree;
    c.separator.folds = folds;
    c.separator.k_max = k_max;
    c.separator.polynomial.max_degree = max_degree;
    c.separator.polynomial.starts = polynomial_starts;
    c.separator.polynomial.folds = folds;
    c.aggregation = aggregation_from_string(aggregation);
    c.outsiders.clear();
    for (const auto& m : outsider_method) c.outsiders.push_back(OutsiderPolicy::of(outsider_method_from_string(m)));
    if (c.outsiders.empty()) throw ParameterError("outsider-method: at least one treatment is required");
    c.use_convex = use_convex;
    c.seed = seed;
    return c;
  }
};

// Parses "name[:modifier...]", modifiers being estimators or exact/approx.
inline DepthSpec parse_depth_token(const std::string& token, const DepthFlags& base, std::uint64_t seed) {
  std::vector<std::string> parts;
  std::stringstream ss(token);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.empty() || parts.front().empty()) throw ParameterError("depths: empty depth name");
  DepthFlags f = base;
  f.notion = parts.front();
  f.exact = f.approx = false;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i] == "exact") {
      f.exact = true;
    } else if (parts[i] == "approx") {
      f.approx = true;
    } else {
      f.mah_estimate = parts[i];
    }
  }
  return f.build(seed);
}

inline double parse_df(const std::string& s) {
  if (s == "inf" || s == "Inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  try {
    std::size_t used = 0;
    v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw ParameterError("df: expected a positive number or 'inf', got '" + s + "'");
  }
  if (!(v > 0.0)) throw ParameterError("df: must be positive");
  return v;
}

// "-" is standard output; anything else is a file.
inline void write_to(const std::string& path, const std::function<void(std::ostream&)>& body) {
  if (path == "-") {
    body(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write file '" + path + "'");
  body(out);
}

inline std::string read_file(const std::string& path) {
  auto in = open_input(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string json_number(double v) { return std::isnan(v) ? std::string("null") : detail::format_double(v); }

}  // namespace dcli
