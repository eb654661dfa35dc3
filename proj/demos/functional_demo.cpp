// Selects an (L, S) transform for two classes of shifted curves.
#include <iostream>

#include "depthcraft.hpp"

using namespace depthcraft;

int main() {
  FunctionalGeneratorSpec gen;
  gen.seed = 4;
  FunctionalSample learn = generate_functional(gen, 35);
  gen.seed = 5;
  FunctionalSample test = generate_functional(gen, 100);

  FunctionalConfig cfg;
  cfg.seed = 4;
  FunctionalModel m = train_functional(learn, cfg);
  std::cout << "chosen L=" << m.spec.L << " S=" << m.spec.S << ", cv error " << m.cv_error << '\n';

  auto pred = classify_functional(m, test);
  Index wrong = 0;
  for (std::size_t i = 0; i < pred.classes.size(); ++i) wrong += pred.classes[i] + 1 != test.labels()[i];
  std::cout << "test error " << static_cast<double>(wrong) / static_cast<double>(test.size()) << '\n';
}
