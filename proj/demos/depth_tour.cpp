// Depth of a few points w.r.t. a Gaussian sample under every notion.
#include <iomanip>
#include <iostream>

#include "depthcraft.hpp"

using namespace depthcraft;

int main() {
  LabeledSample s = generate_two_class(GeneratorSpec::with_df(std::numeric_limits<double>::infinity(), 11), 60);
  DataMatrix x = s.class_data(1);
  Matrix q(3, 2);
  q << 0.0, 0.0, 1.0, 1.5, 3.0, -3.0;
  DataMatrix query(q);

  std::cout << std::left << std::setw(20) << "notion";
  for (Index i = 0; i < q.rows(); ++i) std::cout << std::setw(12) << ("z" + std::to_string(i + 1));
  std::cout << '\n';
  for (const auto& [notion, name] : notion_names()) {
    DepthSpec spec = DepthSpec::of(notion);
    spec.seed = 5;
    DepthEngine engine(x, spec);
    DepthSpace ds = engine.depth_space(query);
    std::cout << std::setw(20) << name;
    for (Index i = 0; i < ds.rows(); ++i) std::cout << std::setw(12) << std::setprecision(5) << ds.depths(i, 0);
    std::cout << '\n';
  }
}
