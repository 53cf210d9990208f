#pragma once

#include <functional>
#include <vector>

#include "CLI11.hpp"

namespace ppcm::cli {

// A registered subcommand and the action to run when it was selected.
struct Command {
  CLI::App* app = nullptr;
  std::function<void()> run;
};

Command add_simulate(CLI::App& root);
Command add_ppcm(CLI::App& root);
Command add_sensitivity(CLI::App& root);
Command add_compare(CLI::App& root);

}  // namespace ppcm::cli
