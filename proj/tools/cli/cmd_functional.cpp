#include <memory>

#include "commands.hpp"
#include "flags.hpp"

namespace dcli {

namespace {

struct FTrainArgs {
  std::string in, model, svg;
  std::string adc_instance = "average";
  int num_fcn = -1;
  int num_der = -1;
  int max_num_intervals = 0;
  bool cv_complete = false;
  double keep_fraction = 0.3;
  int folds = 10;
  std::string classifier_type = "ddalpha";
  std::uint64_t seed = 0;
  TrainFlags flags;
};

void run_ftrain(const FTrainArgs& a) {
  FunctionalSample s = load_functional_json(a.in);
  FunctionalConfig cfg;
  cfg.instance = instance_from_string(a.adc_instance);
  if ((a.num_fcn >= 0) != (a.num_der >= 0)) throw ParameterError("num-fcn/num-der: give both or neither");
  if (a.num_fcn >= 0) cfg.candidates = {LSSpec{a.num_fcn, a.num_der, cfg.instance}};
  if (a.max_num_intervals < 0) throw ParameterError("max-num-intervals: must be non-negative");
  cfg.max_dimension = a.max_num_intervals;
  cfg.complete_cv = a.cv_complete;
  if (!(a.keep_fraction > 0.0 && a.keep_fraction <= 1.0)) throw ParameterError("keep-fraction: must lie in (0, 1]");
  cfg.keep_fraction = a.keep_fraction;
  if (a.folds < 2) throw ParameterError("cv-folds: must be at least 2");
  cfg.folds = a.folds;
  cfg.classifier = functional_classifier_from_string(a.classifier_type);
  cfg.multivariate = a.flags.build(a.seed);
  cfg.seed = a.seed;
  FunctionalModel m = train_functional(s, cfg);
  if (!a.svg.empty()) write_to(a.svg, [&](std::ostream& o) { write_functions_svg(o, s); });
  nlohmann::json j = functional_model_to_json(m);
  if (a.model.empty() || a.model == "-") {
    std::cout << j.dump(1) << '\n';
    return;
  }
  write_to(a.model, [&](std::ostream& o) { o << j.dump(1) << '\n'; });
  nlohmann::json summary{{"L", m.spec.L},
                         {"S", m.spec.S},
                         {"instance", to_string(m.spec.instance)},
                         {"classifier", to_string(m.classifier.kind)},
                         {"cv_error", j.at("cv_error")},
                         {"candidates", j.at("candidates")}};
  std::cout << summary.dump(1) << '\n';
}

struct FClassifyArgs {
  std::string model, in;
};

void run_fclassify(const FClassifyArgs& a) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(a.model));
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("model: not valid JSON: ") + e.what());
  }
  FunctionalModel m = functional_model_from_json(j);
  FunctionalSample s = load_functional_json(a.in);
  FunctionalPrediction p = classify_functional(m, s);
  std::cout << "label\n";
  for (int c : p.classes) std::cout << (c == kIgnored ? std::string("Ignored") : m.class_names.at(static_cast<std::size_t>(c))) << '\n';
  if (p.extended) std::cerr << "warning: some functions reach beyond the training interval and were extrapolated\n";
}

}  // namespace

void add_functional_commands(CLI::App& app) {
  {
    auto a = std::make_shared<FTrainArgs>();
    a->flags.depth.notion = "spatial";
    auto* sub = app.add_subcommand("ftrain", "train a classifier for functional data");
    sub->add_option("--in", a->in, "functional JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--model", a->model, "write the model JSON here (default: stdout)");
    sub->add_option("--adc-instance", a->adc_instance, "average or values")->capture_default_str();
    sub->add_option("--num-fcn", a->num_fcn, "location intervals L (with --num-der: no selection)");
    sub->add_option("--num-der", a->num_der, "slope intervals S");
    sub->add_option("--max-num-intervals", a->max_num_intervals, "largest L + S (0: from the curve length)")
        ->capture_default_str();
    sub->add_flag("--cv-complete", a->cv_complete, "cross-validate every candidate");
    sub->add_option("--keep-fraction", a->keep_fraction, "share of candidates kept by the VC bound")->capture_default_str();
    sub->add_option("--cv-folds", a->folds, "folds of the (L, S) cross-validation")->capture_default_str();
    sub->add_option("--classifier-type", a->classifier_type, "ddalpha, maxdepth, knn-affine, lda or qda")
        ->capture_default_str();
    sub->add_option("--plot-svg", a->svg, "also plot the training curves");
    sub->add_option("--seed", a->seed, "random seed")->capture_default_str();
    a->flags.add(sub);
    sub->callback([a] { run_ftrain(*a); });
  }
  {
    auto a = std::make_shared<FClassifyArgs>();
    auto* sub = app.add_subcommand("fclassify", "classify functions with a saved functional model");
    sub->add_option("--model", a->model, "functional model JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--in", a->in, "functional JSON")->required()->check(CLI::ExistingFile);
    sub->callback([a] { run_fclassify(*a); });
  }
}

}  // namespace dcli
