#include <iostream>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "json.hpp"
#include "ppcm/error.hpp"

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App root{"Population partly conditional mean estimation with BART, sensitivity priors and simulation studies"};
  root.set_version_flag("--version", PPCM_VERSION);
  root.require_subcommand(1);
  const std::vector<ppcm::cli::Command> commands{ppcm::cli::add_simulate(root), ppcm::cli::add_ppcm(root),
                                                  ppcm::cli::add_sensitivity(root), ppcm::cli::add_compare(root)};
  try {
    root.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = root.exit(e);
    return code == 0 ? 0 : kUsageError;
  }
  try {
    for (const auto& c : commands) {
      if (c.app->parsed()) c.run();
    }
  } catch (const ppcm::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: bad config value: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return 0;
}
