#pragma once

#include "leafscan/analytics.hpp"
#include "leafscan/pipeline.hpp"
#include "leafscan/synth.hpp"

#include "json.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace leafscan {

using Json = nlohmann::ordered_json;

/// Every document shares this envelope: {"format": "leafscan", "kind": ..., "version": 1, ...}.
inline constexpr std::string_view kDocumentFormat = "leafscan";
inline constexpr int kDocumentVersion = 1;

Json make_document(std::string_view kind);

/// Parses text; errors name `source` and the 1-based line. Checks the
/// envelope when `kind` is non-empty.
Json parse_document(std::string_view text, std::string_view source, std::string_view kind = {});

/// Ratio rounded to 4 decimals, the precision used in documents.
double document_ratio(double ratio) noexcept;

Json to_json(const DamageReport &r);
Json to_json(const OtsuDiagnostics &d);
Json to_json(const ThresholdDecision &d);
Json to_json(const QuadraticBezier &c);
Json to_json(const CurveOutcome &c);
Json to_json(const AnalysisConfig &c);
Json to_json(const GroundTruth &g);
Json to_json(const SyntheticLeafSpec &s);
Json to_json(const CorrelationResult &r);

QuadraticBezier curve_from_json(const Json &j);
/// Merges the fields present in `patch` into `config`; `"threshold": null`
/// clears an override. Throws DocumentError / OutOfRange.
void merge_config(AnalysisConfig &config, const Json &patch);

/// {"report", "segmentation", "min_size", "curves"} for a finished analysis.
Json result_to_json(const AnalysisResult &r);

struct CurveRecord {
  std::string path;
  std::vector<QuadraticBezier> curves;
};

/// kind "curves": {"images": [{"path": ..., "curves": [[[x,y],[x,y],[x,y]], ...]}]}.
std::vector<CurveRecord> parse_curve_file(std::string_view text, std::string_view source);
Json curve_file_document(const std::vector<CurveRecord> &records);

/// kind "leaf_spec" (one concrete leaf) or "leaf_template" (random ranges).
SyntheticLeafSpec leaf_spec_from_json(const Json &j);
LeafTemplate leaf_template_from_json(const Json &j);

Json plot_data_document(const CorrelationReport &report);

/// kind "session": the CLI sidecar and the service share this layout.
/// `result` is null while the session cannot be analyzed (see `state`).
Json session_document(std::string_view id, std::uint64_t revision, std::string_view state,
                      std::string_view message, const AnalysisConfig &config,
                      std::span<const QuadraticBezier> curves, const AnalysisResult *result);

} // namespace leafscan
