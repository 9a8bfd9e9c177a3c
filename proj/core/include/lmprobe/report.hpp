#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lmprobe/corpus.hpp"
#include "lmprobe/metrics.hpp"
#include "lmprobe/probe.hpp"
#include "lmprobe/qa.hpp"

namespace lmprobe {

inline constexpr const char* kToolVersion = "0.3.0";

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string scorer;  // Scorer::identity()
  std::uint64_t seed = 0;
  std::map<std::string, std::string> input_digests;  // name -> fnv1a hex
  std::string config_json = "{}";                     // configuration snapshot
};

// "7.39" for 0.073863.
std::string format_percent(double ratio);

// JSON with sorted keys; every statistic carries its raw value and a
// two-decimal percentage. Throws ContractError when the report has no
// relations.
std::string probe_report_json(const AggregateReport& report, const RunManifest& manifest,
                              const ProbeRun* run = nullptr);
std::string probe_report_csv(const AggregateReport& report);

// Writes <dir>/report.json and <dir>/report.csv. Throws IoError on write
// failure.
void emit_probe_report(const std::string& dir, const AggregateReport& report,
                       const RunManifest& manifest, const ProbeRun* run = nullptr);

// Reads the aggregate section of a report written by probe_report_json.
AggregateReport parse_probe_report(std::string_view json_text);

std::string opposite_report_json(const OppositeRun& run, const RunManifest& manifest);
std::string opposite_report_csv(const OppositeRun& run);

struct PlotData {
  std::map<std::string, std::vector<HistogramBucket>> histograms;
  std::map<std::string, Correlation> correlations;
  std::map<std::string, std::vector<std::pair<std::string, double>>> top_words;
  std::optional<std::size_t> pair_count;
};

// Empty heatmap cells are written as null; each histogram carries its total.
std::string plot_data_json(const PlotData& data, const RunManifest& manifest);

struct RcGroup {
  std::size_t count = 0;
  double em = 0.0;  // mean
  double f1 = 0.0;  // mean
};

struct RcSummary {
  RcGroup overall;
  std::map<std::string, RcGroup> by_type;
  std::vector<SimilarityBucket> similarity;
};

// Examples without a label are grouped under "unlabeled".
RcSummary summarize_rc(std::span<const ScoredExample> examples,
                       const std::map<std::string, std::vector<std::string>>& type_labels,
                       std::span<const double> similarity_edges);

std::string rc_report_json(const RcSummary& summary, const RunManifest& manifest);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace lmprobe
