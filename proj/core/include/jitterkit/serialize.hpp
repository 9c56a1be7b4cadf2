#pragma once

#include <nlohmann/json.hpp>

#include "jitterkit/fitting.hpp"
#include "jitterkit/models.hpp"
#include "jitterkit/simulator.hpp"

namespace jitterkit {

// Field names are documented in docs/file-formats.md.

nlohmann::json to_json(const ResponseModel& m);
ResponseModel model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SimConfig& c);
SimConfig sim_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SimTruth& t);
nlohmann::json to_json(const JitterValue& j);
nlohmann::json to_json(const FitResult& r);
nlohmann::json to_json(const CharacterizationReport& r);

}  // namespace jitterkit
