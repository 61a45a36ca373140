#pragma once

#include <string>
#include <vector>

#include "gasadapt/network.hpp"

namespace gasadapt {

struct Fixture {
  std::string name;
  Network network;
  Scenario scenario;
  GasParameters gas;
};

/// Entry, two pipes, one compressor, three pipes, exit. Elevations rise and
/// fall along the chain; the exit lower bound forces compression.
Fixture chain_5();

/// Supply trunk with one compressor feeding a junction that splits into a
/// high-demand branch with an intermediate offtake and a low-demand branch
/// with a second compressor.
Fixture tree_12();

std::vector<std::string> fixture_names();
/// Throws InvalidArgumentError for unknown names.
Fixture make_fixture(const std::string& name);

}  // namespace gasadapt
