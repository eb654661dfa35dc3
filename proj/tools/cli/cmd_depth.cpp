#include <memory>

#include "commands.hpp"
#include "flags.hpp"

namespace dcli {

namespace {

struct DepthArgs {
  std::string in, query;
  std::uint64_t seed = 0;
  DepthFlags depth;
};

void run_depth(const DepthArgs& a) {
  DataMatrix data = load_matrix_csv(a.in);
  DataMatrix query = load_matrix_csv(a.query);
  if (query.cols() != data.cols()) {
    throw SizeError("query: has " + std::to_string(query.cols()) + " columns, data has " + std::to_string(data.cols()));
  }
  DepthEngine engine(data, a.depth.build(a.seed));
  DepthSpace ds = engine.depth_space(query);
  std::cout << "depth\n";
  for (Index i = 0; i < ds.rows(); ++i) std::cout << detail::format_double(ds.depths(i, 0)) << '\n';
}

struct DDSpaceArgs {
  std::string in, query;
  std::uint64_t seed = 0;
  DepthFlags depth;
};

void run_ddspace(const DDSpaceArgs& a) {
  LabeledSample sample = load_labeled_csv(a.in);
  DepthEngine engine(sample, a.depth.build(a.seed));
  DepthSpace ds;
  if (a.query.empty()) {
    ds = engine.depth_space(sample);
  } else {
    DataMatrix q = load_matrix_csv(a.query);
    if (q.cols() != sample.dim()) throw SizeError("query: column count differs from the training data");
    ds = engine.depth_space(q);
  }
  const auto& names = sample.class_names();
  for (std::size_t j = 0; j < names.size(); ++j) std::cout << (j ? "," : "") << "depth_" << names[j];
  if (!ds.labels.empty()) std::cout << ",label";
  std::cout << '\n';
  for (Index i = 0; i < ds.rows(); ++i) {
    for (Index j = 0; j < ds.depths.cols(); ++j) std::cout << (j ? "," : "") << detail::format_double(ds.depths(i, j));
    if (!ds.labels.empty()) std::cout << ',' << names[static_cast<std::size_t>(ds.labels[static_cast<std::size_t>(i)] - 1)];
    std::cout << '\n';
  }
  if (ds.jittered) std::cerr << "note: training points were jittered to break ties\n";
}

struct ContourArgs {
  std::string in, svg, grid_csv;
  Index frequency = 100;
  double levels = 10;
  std::uint64_t seed = 0;
  DepthFlags depth;
};

void write_lines_csv(std::ostream& out, const ContourResult& r) {
  out << "level,line,point,x,y\n";
  for (std::size_t l = 0; l < r.levels.size(); ++l) {
    for (std::size_t k = 0; k < r.lines[l].size(); ++k) {
      const auto& line = r.lines[l][k];
      for (std::size_t p = 0; p < line.size(); ++p) {
        out << detail::format_double(r.levels[l]) << ',' << k << ',' << p << ',' << detail::format_double(line[p][0]) << ','
            << detail::format_double(line[p][1]) << '\n';
      }
    }
  }
}

void run_contours(const ContourArgs& a) {
  ContourResult r = contour_grid(load_matrix_csv(a.in), a.depth.build(a.seed), a.frequency, a.levels);
  if (!a.grid_csv.empty()) write_to(a.grid_csv, [&](std::ostream& o) { write_grid_csv(o, r.grid); });
  if (a.svg == "-") {
    write_contours_svg(std::cout, r);
    return;
  }
  if (!a.svg.empty()) write_to(a.svg, [&](std::ostream& o) { write_contours_svg(o, r); });
  write_lines_csv(std::cout, r);
}

struct SurfaceArgs {
  std::string in, svg;
  Index xnum = 50, ynum = 50;
  double theta = 30, phi = 30;
  std::uint64_t seed = 0;
  DepthFlags depth;
};

void run_surface(const SurfaceArgs& a) {
  DataMatrix data = load_matrix_csv(a.in);
  Grid g = surface_grid(data, a.depth.build(a.seed), a.xnum, a.ynum);
  if (a.svg == "-") {
    write_surface_svg(std::cout, g, data.values(), a.theta, a.phi);
    return;
  }
  if (!a.svg.empty()) write_to(a.svg, [&](std::ostream& o) { write_surface_svg(o, g, data.values(), a.theta, a.phi); });
  write_grid_csv(std::cout, g);
}

}  // namespace

void add_depth_commands(CLI::App& app) {
  {
    auto a = std::make_shared<DepthArgs>();
    auto* sub = app.add_subcommand("depth", "depth of query points w.r.t. a data cloud");
    sub->add_option("--in", a->in, "data CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--query", a->query, "query CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", a->seed, "random seed")->capture_default_str();
    a->depth.add(sub);
    sub->callback([a] { run_depth(*a); });
  }
  {
    auto a = std::make_shared<DDSpaceArgs>();
    auto* sub = app.add_subcommand("ddspace", "depth space of a labeled sample");
    sub->add_option("--in", a->in, "labeled CSV (last column is the class)")->required()->check(CLI::ExistingFile);
    sub->add_option("--query", a->query, "map these points instead of the training sample")->check(CLI::ExistingFile);
    sub->add_option("--seed", a->seed, "random seed")->capture_default_str();
    a->depth.add(sub);
    sub->callback([a] { run_ddspace(*a); });
  }
  {
    auto a = std::make_shared<ContourArgs>();
    auto* sub = app.add_subcommand("contours", "depth contours of bivariate data");
    sub->add_option("--in", a->in, "data CSV with two columns")->required()->check(CLI::ExistingFile);
    sub->add_option("--frequency", a->frequency, "grid points per axis")->capture_default_str();
    sub->add_option("--levels", a->levels, "one depth in (0,1], or a number of levels")->capture_default_str();
    sub->add_option("--svg", a->svg, "write the plot here ('-' for stdout instead of the line CSV)");
    sub->add_option("--grid-csv", a->grid_csv, "write the depth grid here");
    sub->add_option("--seed", a->seed, "random seed")->capture_default_str();
    a->depth.add(sub);
    sub->callback([a] { run_contours(*a); });
  }
  {
    auto a = std::make_shared<SurfaceArgs>();
    auto* sub = app.add_subcommand("surface", "depth surface of bivariate data");
    sub->add_option("--in", a->in, "data CSV with two columns")->required()->check(CLI::ExistingFile);
    sub->add_option("--xnum", a->xnum, "grid points along x")->capture_default_str();
    sub->add_option("--ynum", a->ynum, "grid points along y")->capture_default_str();
    sub->add_option("--theta", a->theta, "azimuth in degrees")->capture_default_str();
    sub->add_option("--phi", a->phi, "elevation in degrees")->capture_default_str();
    sub->add_option("--svg", a->svg, "write the plot here ('-' for stdout instead of the grid CSV)");
    sub->add_option("--seed", a->seed, "random seed")->capture_default_str();
    a->depth.add(sub);
    sub->callback([a] { run_surface(*a); });
  }
}

}  // namespace dcli
