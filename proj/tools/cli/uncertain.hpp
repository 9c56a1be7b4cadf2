#pragma once

#include <string>

namespace jitterkit::cli {

struct Uncertain {
  double value = 0.0;
  double error = 0.0;
};

/// "value" or "value,error". Throws ConfigError on anything else.
Uncertain parse_uncertain(const std::string& text, const std::string& flag);
std::string to_string(const Uncertain& u);

/// Shortest text that reads back to the same double.
std::string exact(double v);

}  // namespace jitterkit::cli
