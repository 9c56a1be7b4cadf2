#pragma once

#include <functional>
#include <ostream>
#include <vector>

#include <CLI11.hpp>

namespace jitterkit::cli {

struct Io {
  std::ostream& out;
  std::ostream& err;
};

/// A registered subcommand and the action to run once it has been parsed.
struct Command {
  CLI::App* app = nullptr;
  std::function<int(Io&)> run;
};

std::vector<Command> add_commands(CLI::App& root);

}  // namespace jitterkit::cli
