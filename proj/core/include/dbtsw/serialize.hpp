#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dbtsw/colortransfer.hpp"
#include "dbtsw/estimators.hpp"
#include "dbtsw/flows.hpp"
#include "dbtsw/projection.hpp"
#include "dbtsw/trees.hpp"

namespace dbtsw {

// JSON encodings. Doubles are written with round-trip precision, so
// decoding an encoded value gives back the same bits.

nlohmann::json to_json(const SeedSpec& s);
SeedSpec seed_from_json(const nlohmann::json& j, SeedSpec base = {});

/// {kind, roots, directions, attachments?}
nlohmann::json to_json(const TreeSystem& t);
TreeSystem tree_from_json(const nlohmann::json& j);

nlohmann::json to_json(const std::vector<TreeSystem>& trees);
std::vector<TreeSystem> trees_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ProjectedMeasure& p);

nlohmann::json to_json(const SplittingConfig& s);
nlohmann::json to_json(const TreeSamplerConfig& s);
nlohmann::json to_json(const EstimatorConfig& c);
nlohmann::json to_json(const DistanceReport& r);
nlohmann::json to_json(const FlowConfig& c);
nlohmann::json to_json(const FlowTrace& t);
nlohmann::json to_json(const TransferConfig& c);

// Decoders start from the given defaults and override only keys present in
// `j`; unknown keys raise ConfigError.
SplittingConfig splitting_from_json(const nlohmann::json& j, SplittingConfig base = {});
TreeSamplerConfig sampler_from_json(const nlohmann::json& j, TreeSamplerConfig base = {});
EstimatorConfig estimator_from_json(const nlohmann::json& j, EstimatorConfig base = {});
FlowConfig flow_from_json(const nlohmann::json& j, FlowConfig base = {});
TransferConfig transfer_from_json(const nlohmann::json& j, TransferConfig base = {});

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace dbtsw
