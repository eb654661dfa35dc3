#include <memory>

#include "commands.hpp"
#include "flags.hpp"

namespace dcli {

namespace {

// Reads a labeled CSV whose feature columns are depths.
DepthSpace depth_space_csv(const std::string& path, std::vector<std::string>& names) {
  LabeledSample s = load_labeled_csv(path);
  for (Index i = 0; i < s.size(); ++i) {
    for (Index j = 0; j < s.dim(); ++j) {
      double v = s.data().values()(i, j);
      if (v < 0.0) throw FormatError("depth-space CSV: negative depth at row " + std::to_string(i + 1));
    }
  }
  names = s.class_names();
  DepthSpace ds;
  ds.depths = s.data().values();
  ds.cardinalities = s.cardinalities();
  ds.labels = s.labels();
  return ds;
}

nlohmann::json model_summary(const TrainedModel& m) {
  nlohmann::json j;
  j["classes"] = m.class_names;
  j["cardinalities"] = m.cardinalities;
  j["depth"] = m.ddplot_only() ? std::string("given") : depth_label(m.config.depth);
  j["separator"] = to_string(m.config.separator.kind);
  j["aggregation"] = to_string(m.aggregation());
  nlohmann::json seps = nlohmann::json::array();
  for (const auto& b : m.binaries) {
    nlohmann::json e{{"first", m.label(b.first)}, {"second", b.second < 0 ? std::string("rest") : m.label(b.second)}};
    if (b.kind == SeparatorKind::alpha) {
      e["degree"] = b.alpha.degree;
      e["features"] = b.alpha.feature_names();
    } else {
      e["degree"] = b.polynomial.degree;
    }
    seps.push_back(e);
  }
  j["binary_separators"] = seps;
  if (m.config.separator.kind == SeparatorKind::knn) j["k"] = m.knn.k;
  if (m.config.separator.kind == SeparatorKind::dknn) j["k"] = m.dknn.k;
  nlohmann::json treats = nlohmann::json::array();
  for (const auto& t : m.treatments) treats.push_back(t.policy.name);
  j["outsider_treatments"] = treats;
  return j;
}

struct TrainArgs {
  std::string in, model;
  bool ddplot = false;
  std::uint64_t seed = 0;
  TrainFlags flags;
};

void run_train(const TrainArgs& a) {
  TrainConfig cfg = a.flags.build(a.seed);
  TrainedModel m;
  if (a.ddplot) {
    std::vector<std::string> names;
    DepthSpace ds = depth_space_csv(a.in, names);
    ds.spec = cfg.depth;
    m = train_ddplot(ds, names, cfg);
  } else {
    m = train(load_labeled_csv(a.in), cfg);
  }
  if (a.model.empty() || a.model == "-") {
    std::cout << model_to_string(m);
    return;
  }
  save_model(m, a.model);
  std::cout << model_summary(m).dump(1) << '\n';
}

struct ClassifyArgs {
  std::string model, in, outsider_method;
  bool labeled = false;
  bool depths = false;
};

void run_classify(const ClassifyArgs& a) {
  TrainedModel m = load_model(a.model);
  DataMatrix x = a.labeled ? load_labeled_csv(a.in).data() : load_matrix_csv(a.in);
  Prediction p = (a.depths || m.ddplot_only()) ? classify_depths(m, x.values(), a.outsider_method)
                                               : classify(m, x, a.outsider_method);
  std::cout << "label,outsider\n";
  auto labels = labels_of(m, p);
  for (std::size_t i = 0; i < labels.size(); ++i) std::cout << labels[i] << ',' << (p.outsider[i] ? "true" : "false") << '\n';
  if (p.outsiders() > 0) std::cerr << p.outsiders() << " of " << labels.size() << " points are outsiders\n";
}

nlohmann::json report_json(const TestReport& r) {
  return {{"error", r.error()}, {"correct", r.correct}, {"incorrect", r.incorrect}, {"ignored", r.ignored}, {"outsiders", r.outsiders}};
}

struct CvArgs {
  std::string in, outsider_method;
  Index numchunks = 10;
  std::uint64_t seed = 0;
  TrainFlags flags;
};

void run_cv(const CvArgs& a) {
  LabeledSample s = load_labeled_csv(a.in);
  CvReport rep = cv_error(s, a.numchunks, a.flags.build(a.seed), a.outsider_method);
  nlohmann::json j = report_json(rep.total);
  j["numchunks"] = a.numchunks;
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : rep.folds) {
    nlohmann::json e = report_json(f.report);
    e["fold"] = f.fold;
    e["tested"] = f.tested;
    e["skipped"] = f.skipped;
    folds.push_back(e);
    if (!f.warning.empty()) std::cerr << "warning: " << f.warning << '\n';
  }
  j["folds"] = folds;
  std::cout << j.dump(1) << '\n';
}

struct PartitionArgs {
  std::string in, outsider_method;
  double size = 0.3;
  int times = 10;
  bool report_times = false;
  std::uint64_t seed = 0;
  TrainFlags flags;
};

void run_partition(const PartitionArgs& a) {
  LabeledSample s = load_labeled_csv(a.in);
  PartitionReport rep = partition_error(s, a.size, a.times, a.flags.build(a.seed), a.seed, a.outsider_method);
  nlohmann::json j{{"errors", rep.errors}, {"mean", rep.mean}, {"sd", rep.sd}};
  if (a.report_times) {
    j["times"] = rep.times;
    j["time_mean"] = rep.time_mean;
    j["time_sd"] = rep.time_sd;
  } else {
    std::cerr << "training time: mean " << rep.time_mean << " s, sd " << rep.time_sd << " s\n";
  }
  std::cout << j.dump(1) << '\n';
}

struct DDPlotArgs {
  std::string model, in, svg;
  bool no_separation = false;
  Index resolution = 200;
};

void run_ddplot(const DDPlotArgs& a) {
  TrainedModel m = load_model(a.model);
  DepthSpace ds;
  std::vector<std::string> names = m.class_names;
  if (m.ddplot_only()) {
    if (a.in.empty()) throw ParameterError("in: a depth-space CSV is required for models trained on a depth space");
    ds = depth_space_csv(a.in, names);
  } else if (a.in.empty()) {
    Index n = 0;
    for (Index c : m.cardinalities) n += c;
    Matrix x(n, m.engine->dim());
    std::vector<int> labels;
    for (int j = 0; j < m.num_classes(); ++j) {
      const Matrix& v = m.engine->class_data(j).values();
      x.middleRows(static_cast<Index>(labels.size()), v.rows()) = v;
      labels.insert(labels.end(), static_cast<std::size_t>(v.rows()), j + 1);
    }
    ds = m.engine->depth_space(LabeledSample(DataMatrix(std::move(x)), std::move(labels), m.class_names));
  } else {
    LabeledSample s = load_labeled_csv(a.in);
    ds = m.engine->depth_space(s.data());
    ds.labels = s.labels();
    names = s.class_names();
  }
  if (ds.classes() != m.num_classes()) throw SizeError("in: depth space has a different number of classes than the model");
  DDPlotOptions opt;
  opt.draw_separation = !a.no_separation;
  opt.resolution = a.resolution;
  if (a.svg == "-") {
    write_ddplot_svg(std::cout, ds, &m, opt);
    return;
  }
  if (!a.svg.empty()) write_to(a.svg, [&](std::ostream& o) { write_ddplot_svg(o, ds, &m, opt); });
  for (int j = 0; j < ds.classes(); ++j) std::cout << (j ? "," : "") << "depth_" << m.class_names[static_cast<std::size_t>(j)];
  if (!ds.labels.empty()) std::cout << ",label";
  std::cout << '\n';
  for (Index i = 0; i < ds.rows(); ++i) {
    for (Index j = 0; j < ds.depths.cols(); ++j) std::cout << (j ? "," : "") << detail::format_double(ds.depths(i, j));
    if (!ds.labels.empty()) std::cout << ',' << names[static_cast<std::size_t>(ds.labels[static_cast<std::size_t>(i)] - 1)];
    std::cout << '\n';
  }
}

}  // namespace

void add_classifier_commands(CLI::App& app) {
  {
    auto a = std::make_shared<TrainArgs>();
    auto* sub = app.add_subcommand("train", "train a depth-based classifier");
    sub->add_option("--in", a->in, "labeled CSV (last column is the class)")->required()->check(CLI::ExistingFile);
    sub->add_option("--model", a->model, "write the model JSON here (default: stdout)");
    sub->add_flag("--ddplot", a->ddplot, "the input columns are already depths");
    sub->add_option("--seed", a->seed, "random seed")->capture_default_str();
    a->flags.add(sub);
    sub->callback([a] { run_train(*a); });
  }
  {
    auto a = std::make_shared<ClassifyArgs>();
    auto* sub = app.add_subcommand("classify", "classify points with a saved model");
    sub->add_option("--model", a->model, "model JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--in", a->in, "points CSV")->required()->check(CLI::ExistingFile);
    sub->add_flag("--labeled", a->labeled, "the last input column is a label and is ignored");
    sub->add_flag("--depths", a->depths, "the input columns are already depths");
    sub->add_option("--outsider-method", a->outsider_method, "outsider treatment to use (default: the first trained)");
    sub->callback([a] { run_classify(*a); });
  }
  {
    auto a = std::make_shared<CvArgs>();
    auto* sub = app.add_subcommand("cv", "cross-validated error with stride folds");
    sub->add_option("--in", a->in, "labeled CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--numchunks", a->numchunks, "number of folds (n: leave-one-out)")->capture_default_str();
    sub->add_option("--test-outsider-method", a->outsider_method, "treatment used when testing (default: first)");
    sub->add_option("--seed", a->seed, "random seed")->capture_default_str();
    a->flags.add(sub);
    sub->callback([a] { run_cv(*a); });
  }
  {
    auto a = std::make_shared<PartitionArgs>();
    auto* sub = app.add_subcommand("partition", "error over repeated random train/test splits");
    sub->add_option("--in", a->in, "labeled CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--size", a->size, "test points per split (fraction if below 1)")->capture_default_str();
    sub->add_option("--times", a->times, "number of splits")->capture_default_str();
    sub->add_flag("--report-times", a->report_times, "include training times in the output");
    sub->add_option("--test-outsider-method", a->outsider_method, "treatment used when testing (default: first)");
    sub->add_option("--seed", a->seed, "random seed")->capture_default_str();
    a->flags.add(sub);
    sub->callback([a] { run_partition(*a); });
  }
  {
    auto a = std::make_shared<DDPlotArgs>();
    auto* sub = app.add_subcommand("ddplot", "DD-plot of a trained model");
    sub->add_option("--model", a->model, "model JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--in", a->in, "labeled CSV to plot (default: the training sample)")->check(CLI::ExistingFile);
    sub->add_option("--svg", a->svg, "write the plot here ('-' for stdout instead of the depth CSV)");
    sub->add_flag("--no-separation", a->no_separation, "do not draw the separating boundary");
    sub->add_option("--resolution", a->resolution, "grid resolution of the boundary")->capture_default_str();
    sub->callback([a] { run_ddplot(*a); });
  }
}

}  // namespace dcli
