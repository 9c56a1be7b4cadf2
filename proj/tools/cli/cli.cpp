#include "cli/cli.hpp"

#include <algorithm>

#include "cli/commands.hpp"
#include "jitterkit/error.hpp"

namespace jitterkit::cli {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Photon-pair timing analysis: detector jitter, correlation histograms, "
               "response-model fits and SPDC tuning curves.",
               "jitterkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", JITTERKIT_VERSION);
  auto commands = add_commands(app);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }

  const auto it = std::find_if(commands.begin(), commands.end(),
                               [](const Command& c) { return c.app->parsed(); });
  Io io{out, err};
  try {
    return it->run(io);
  } catch (const SolverError& e) {
    err << "error: " << e.what() << '\n';
    return kSolverError;
  } catch (const InsufficientDataError& e) {
    err << "error: " << e.what() << '\n';
    return kFitError;
  } catch (const FitError& e) {
    err << "error: " << e.what() << '\n';
    return kFitError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kReplayMismatch;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace jitterkit::cli
