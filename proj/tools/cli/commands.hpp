#pragma once

#include <CLI11.hpp>

namespace dcli {

void add_depth_commands(CLI::App& app);       // depth, ddspace, contours, surface
void add_classifier_commands(CLI::App& app);  // train, classify, cv, partition, ddplot
void add_bench_commands(CLI::App& app);       // bench-maxdepth, bench-time, generate
void add_functional_commands(CLI::App& app);  // ftrain, fclassify

}  // namespace dcli
