#pragma once

#include "wrinkle/cascade.hpp"
#include "wrinkle/field.hpp"
#include "wrinkle/fvk.hpp"
#include "wrinkle/repair.hpp"
#include "wrinkle/solver.hpp"

#include <json.hpp>

#include <string>

namespace wrinkle {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

json to_json(const CoefficientField& f);
CoefficientField coefficient_field_from_json(const json& j);

json to_json(const EnergySample& e);
json to_json(const MuTable& t);
json to_json(const MultiplierRecovery& r);
json to_json(const ElResidual& r);
json to_json(const SolveResult& r);
SolveResult solve_result_from_json(const json& j);

json to_json(const CheckReport& r);
json to_json(const RegularityReport& r);
json to_json(const EnergyBreakdown& e);
json to_json(const DeformationField& d);
DeformationField deformation_from_json(const json& j);
json to_json(const RepairBudget& b);

/// 64-bit FNV-1a over the canonical dump, hex-encoded; used for provenance.
std::string config_hash(const json& j);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace wrinkle
