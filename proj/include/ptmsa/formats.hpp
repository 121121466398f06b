#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ptmsa/analysis.hpp"
#include "ptmsa/montecarlo.hpp"

namespace ptmsa {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// RFC 4180 field: quoted when it holds a comma, quote, CR or LF.
std::string csv_field(std::string_view text);
std::string csv_table(const std::vector<std::string>& columns, const std::vector<std::vector<std::string>>& rows);

/// `time_s` first, then every recorded column.
std::string waveform_csv(const TransientResult& result);
std::string sweep_csv(const SweepResult& sweep);
std::string study_csv(const StudyTable& table);
std::string mc_samples_csv(const std::vector<McSample>& samples);

Json dc_json(const Simulator& sim, const SystemState& state, const std::vector<PtmEvent>& events);
Json sense_json(TopologyKind kind, CellState cell, const SenseMetrics& metrics);
Json transitions_json(const TransitionVoltages& t, const FinFETParams& fet, double vdd);
Json window_json(const MirrorWindow& w, const FinFETParams& mirror, double i_lrs, double i_hrs);
Json mc_summary_json(TopologyKind kind, const McConfig& config, const McSummary& summary);

/// Writes to a sibling temporary file and renames it over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace ptmsa
