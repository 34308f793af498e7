#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "lrloc/ensemble.hpp"

namespace lrloc {

inline constexpr int kRecordSchemaVersion = 1;
inline constexpr int kSummarySchemaVersion = 1;

std::string_view software_version();

nlohmann::json to_json(const LatticeSpec& spec);
LatticeSpec spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EnsembleJob& job);
nlohmann::json to_json(const ShellSamples& shells);
ShellSamples shells_from_json(const nlohmann::json& j);

/// One JSON-lines record: the RealizationRecord fields plus spec, grid,
/// software_version, rng_id, master_seed and schema_version.
nlohmann::json record_to_json(const RealizationRecord& record, const EnsembleJob& job);

/// Parses a record line. Throws DomainError if it belongs to a different job
/// (spec, grid, master seed or observables differ).
RealizationRecord record_from_json(const nlohmann::json& j, const EnsembleJob& job);

/// Summary plus job echo. Deterministic: no timestamps, no worker counts.
nlohmann::json summary_to_json(const EnsembleSummary& summary, const EnsembleJob& job);

/// Serialized text with a trailing newline, as written to disk.
std::string dump_stable(const nlohmann::json& j);

}  // namespace lrloc
