// Trains the DD-alpha classifier on t(5) data, reports the test error and
// writes the DD-plot next to the binary.
#include <fstream>
#include <iostream>

#include "depthcraft.hpp"

using namespace depthcraft;

int main() {
  LabeledSample learn = generate_two_class(GeneratorSpec::with_df(5.0, 1), 100);
  LabeledSample test = generate_two_class(GeneratorSpec::with_df(5.0, 2), 500);

  TrainConfig cfg;
  cfg.depth = DepthSpec::of(DepthNotion::zonoid);
  cfg.outsiders = {OutsiderPolicy::of(OutsiderMethod::lda), OutsiderPolicy::of(OutsiderMethod::rand_equal)};
  TrainedModel model = train(learn, cfg);

  for (const auto& t : model.treatments) {
    TestReport r = holdout_test(learn, test, cfg, t.policy.name);
    std::cout << t.policy.name << ": error " << r.error() << " (" << r.outsiders << " outsiders)\n";
  }
  for (const auto& b : model.binaries) {
    std::cout << "features:";
    for (const auto& f : b.alpha.feature_names()) std::cout << ' ' << f;
    std::cout << '\n';
  }

  std::ofstream svg("ddplot.svg");
  write_ddplot_svg(svg, model.engine->depth_space(learn), &model);
  std::cout << "wrote ddplot.svg\n";
}
