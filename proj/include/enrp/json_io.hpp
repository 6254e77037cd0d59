#pragma once

// JSON mappings for configuration types. Reading accepts partial objects:
// absent keys keep their defaults.

#include <json.hpp>

#include "enrp/nn.hpp"
#include "enrp/partition.hpp"
#include "enrp/search.hpp"
#include "enrp/signal.hpp"
#include "enrp/trainer.hpp"

namespace enrp {

void to_json(nlohmann::json& j, const SubNetworkConfig& c);
void from_json(const nlohmann::json& j, SubNetworkConfig& c);
void to_json(nlohmann::json& j, const AdamOptions& o);
void from_json(const nlohmann::json& j, AdamOptions& o);
void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);
void to_json(nlohmann::json& j, const GridSpec& g);
void from_json(const nlohmann::json& j, GridSpec& g);
void to_json(nlohmann::json& j, const SourceRange& s);
void from_json(const nlohmann::json& j, SourceRange& s);
void to_json(nlohmann::json& j, const SearchSpace& s);
void from_json(const nlohmann::json& j, SearchSpace& s);
void to_json(nlohmann::json& j, const SearchConfig& c);
void from_json(const nlohmann::json& j, SearchConfig& c);

}  // namespace enrp
