#pragma once

// File-based pipeline stages. Each stage reads the previous stage's output
// from disk, validates it, and writes self-describing artifacts (schema name
// and version) into the output directory:
//
//   ingest / synth -> histories.jsonl
//   features       -> features.csv, correlation.json
//   cluster        -> clustering.json, validation.csv, dendrogram.csv, dendrogram.nwk
//   interpret      -> interpretation.json
//   report         -> report.json, report.md (+ *.svg)
//
// Outputs depend only on inputs and configuration, never on thread count.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "wikiprof/dump_ingest.hpp"
#include "wikiprof/feature_builder.hpp"

namespace wikiprof {

namespace files {
inline constexpr const char* kHistories = "histories.jsonl";
inline constexpr const char* kFeatures = "features.csv";
inline constexpr const char* kCorrelation = "correlation.json";
inline constexpr const char* kClustering = "clustering.json";
inline constexpr const char* kValidation = "validation.csv";
inline constexpr const char* kDendrogramCsv = "dendrogram.csv";
inline constexpr const char* kDendrogramNewick = "dendrogram.nwk";
inline constexpr const char* kInterpretation = "interpretation.json";
inline constexpr const char* kReportJson = "report.json";
inline constexpr const char* kReportMarkdown = "report.md";
}  // namespace files

struct PipelineConfig {
  std::filesystem::path input;
  Compression compression = Compression::Auto;
  std::optional<std::set<int>> namespaces;
  std::int64_t min_edits = 100;
  std::size_t k_min = 2;
  std::size_t k_max = 10;
  std::optional<std::size_t> fixed_k;
  std::filesystem::path output_dir = ".";
  std::optional<std::filesystem::path> bot_list;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  double alpha = 0.05;
  bool svg = false;

  // Throws std::invalid_argument on min_edits < 1 or k outside [2, 50].
  void validate() const;
};

// Feature table row as written to features.csv.
struct FeatureRow {
  std::string contributor;
  FeatureVector features;
  std::int64_t n_articles = 0;
  std::int64_t total_edits = 0;
};

inline constexpr const char* kFeatureSchemaLine = "# schema=wikiprof.features version=1";
inline constexpr const char* kFeatureHeader =
    "contributor,ratio,mean_gap,max_gap,num_cons,mean_month,sd,n_articles,total_edits";

std::string feature_table_csv(std::span<const FeatureRow> rows);
std::vector<FeatureRow> read_feature_table(std::istream& in);
std::vector<FeatureRow> read_feature_table(const std::filesystem::path& path);
std::vector<FeatureRow> build_feature_rows(std::span<const ContributorHistory> filtered);

struct IngestSummary {
  std::uint64_t revisions = 0;
  std::uint64_t events = 0;
  std::uint64_t skipped = 0;
  std::size_t contributors = 0;
  std::filesystem::path histories;
};

struct FeatureSummary {
  std::size_t contributors_in = 0;
  std::size_t retained = 0;
  std::filesystem::path features;
};

struct ClusterSummary {
  std::size_t contributors = 0;
  std::size_t k = 0;
  double avg_silhouette = 0.0;
  std::vector<std::size_t> sizes;
};

struct InterpretSummary {
  std::size_t k = 0;
  std::vector<std::string> labels;  // per cluster, empty when not assigned
  std::vector<double> explained;
};

IngestSummary ingest_stage(const PipelineConfig& config);
IngestSummary synth_stage(const PipelineConfig& config, const std::optional<std::filesystem::path>& spec);
FeatureSummary features_stage(const std::filesystem::path& histories, const PipelineConfig& config);
ClusterSummary cluster_stage(const std::filesystem::path& features, const PipelineConfig& config);
InterpretSummary interpret_stage(const std::filesystem::path& features,
                                 const std::filesystem::path& clustering,
                                 const PipelineConfig& config);
void report_stage(const std::filesystem::path& stage_dir, const PipelineConfig& config);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace wikiprof
