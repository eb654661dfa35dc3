#include <memory>

#include "commands.hpp"
#include "flags.hpp"

namespace dcli {

namespace {

struct MaxDepthArgs {
  std::string df = "inf";
  Index n = 100;
  int reps = 10;
  Index test_points = 1000;
  std::vector<std::string> depths{"mahalanobis:moment", "projection"};
  bool per_rep = false;
  std::uint64_t seed = 0;
  DepthFlags base;
};

void run_maxdepth(const MaxDepthArgs& a) {
  MaxDepthExperiment ex;
  ex.df = parse_df(a.df);
  ex.n = a.n;
  ex.reps = a.reps;
  ex.test_points = a.test_points;
  ex.seed = a.seed;
  for (const auto& t : a.depths) ex.depths.push_back(parse_depth_token(t, a.base, a.seed));
  auto rows = run_maxdepth_experiment(ex);
  if (a.per_rep) {
    write_maxdepth_csv(std::cout, rows);
    return;
  }
  std::cout << "depth,reps,mean,sd\n";
  for (const auto& r : rows) {
    std::cout << r.depth << ',' << r.errors.size() << ',' << detail::format_double(r.mean) << ',' << detail::format_double(r.sd)
              << '\n';
  }
}

struct TimeArgs {
  std::vector<Index> dims{2, 3, 4, 5};
  std::vector<Index> sizes{50, 100, 250, 500, 1000};
  std::vector<std::string> depths{"zonoid", "halfspace", "mahalanobis", "spatial", "projection"};
  Index points = 10;
  double budget = 10.0;
  std::uint64_t seed = 0;
  DepthFlags base;
};

void run_time(const TimeArgs& a) {
  set_thread_count(1);
  TimingConfig cfg;
  cfg.dims = a.dims;
  cfg.sizes = a.sizes;
  cfg.points_per_cell = a.points;
  cfg.budget_seconds = a.budget;
  cfg.seed = a.seed;
  for (const auto& t : a.depths) cfg.depths.push_back(parse_depth_token(t, a.base, a.seed));
  auto cells = time_depths(cfg);
  write_timing_csv(std::cout, cells);
  for (const auto& c : cells) {
    if (!c.note.empty()) std::cerr << c.depth << " d=" << c.dim << " n=" << c.n << ": " << c.note << '\n';
  }
}

struct GenerateArgs {
  std::string df = "inf";
  Index n = 100;
  bool functional = false;
  Index points = 51;
  double shift = FunctionalGeneratorSpec{}.shift;
  double noise_sd = FunctionalGeneratorSpec{}.noise_sd;
  std::uint64_t seed = 0;
};

void run_generate(const GenerateArgs& a) {
  if (a.n < 1) throw ParameterError("n: must be positive");
  if (a.functional) {
    FunctionalGeneratorSpec spec;
    spec.points = a.points;
    spec.shift = a.shift;
    spec.noise_sd = a.noise_sd;
    spec.seed = a.seed;
    std::cout << functional_to_json(generate_functional(spec, a.n)).dump(1) << '\n';
    return;
  }
  LabeledSample s = generate_two_class(GeneratorSpec::with_df(parse_df(a.df), a.seed), a.n);
  std::cout << "x1,x2,class\n";
  write_labeled_csv(std::cout, s);
}

}  // namespace

void add_bench_commands(CLI::App& app) {
  {
    auto a = std::make_shared<MaxDepthArgs>();
    auto* sub = app.add_subcommand("bench-maxdepth", "error of the max-depth rule on the elliptical generator");
    sub->add_option("--df", a->df, "degrees of freedom of the t generator ('inf' for Gaussian)")->capture_default_str();
    sub->add_option("--n", a->n, "training points per class")->capture_default_str();
    sub->add_option("--reps", a->reps, "repetitions")->capture_default_str();
    sub->add_option("--test-points", a->test_points, "test points per repetition")->capture_default_str();
    sub->add_option("--depths", a->depths, "depths as name[:estimator|exact|approx]")->capture_default_str();
    sub->add_flag("--per-rep", a->per_rep, "one row per repetition instead of a summary");
    sub->add_option("--seed", a->seed, "random seed")->capture_default_str();
    a->base.add(sub);
    sub->callback([a] { run_maxdepth(*a); });
  }
  {
    auto a = std::make_shared<TimeArgs>();
    auto* sub = app.add_subcommand("bench-time", "time per depth evaluation (single thread)");
    sub->add_option("--dims", a->dims, "dimensions")->capture_default_str();
    sub->add_option("--sizes", a->sizes, "sample sizes")->capture_default_str();
    sub->add_option("--depths", a->depths, "depths as name[:estimator|exact|approx]")->capture_default_str();
    sub->add_option("--points", a->points, "query points per cell")->capture_default_str();
    sub->add_option("--budget", a->budget, "seconds per point before a cell counts as incomplete")->capture_default_str();
    sub->add_option("--seed", a->seed, "random seed")->capture_default_str();
    a->base.add(sub);
    sub->callback([a] { run_time(*a); });
  }
  {
    auto a = std::make_shared<GenerateArgs>();
    auto* sub = app.add_subcommand("generate", "synthetic two-class data");
    sub->add_option("--df", a->df, "degrees of freedom ('inf' for Gaussian)")->capture_default_str();
    sub->add_option("--n", a->n, "points (or curves) per class")->capture_default_str();
    sub->add_flag("--functional", a->functional, "emit functional data as JSON");
    sub->add_option("--points", a->points, "grid points per curve")->capture_default_str();
    sub->add_option("--shift", a->shift, "phase shift of the second class of curves")->capture_default_str();
    sub->add_option("--noise-sd", a->noise_sd, "noise of the curves")->capture_default_str();
    sub->add_option("--seed", a->seed, "random seed")->capture_default_str();
    sub->callback([a] { run_generate(*a); });
  }
}

}  // namespace dcli
