#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sentrend/cluster.hpp"
#include "sentrend/ingest.hpp"
#include "sentrend/kernel.hpp"
#include "sentrend/smooth.hpp"

namespace sentrend {

enum class ClusterOn { Coefficients, Features };

struct PipelineConfig {
  std::vector<std::filesystem::path> inputs;
  AggregationWindow window;
  Normalization normalization = Normalization::RelativeFrequency;
  std::int64_t min_tweets = 50;
  KernelKind kernel = KernelKind::Gaussian;
  CountryFitConfig fit;
  std::size_t clusters = 5;
  Linkage linkage = Linkage::Average;
  ClusterOn cluster_on = ClusterOn::Coefficients;
  std::filesystem::path out_dir = "out";
  // The pipeline draws no random numbers; kept so configs can assert it.
  bool random_free = true;

  void validate() const;
};

// key=value lines, '#' starts a comment. Keys match the long CLI flags
// without dashes (loss, huber-k, clusters, ...).
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

// Applies one setting; throws ContractViolation on an unknown key or a bad
// value.
void apply_setting(PipelineConfig& config, const std::string& key, const std::string& value);

// Settings applied in order; later maps override earlier ones.
PipelineConfig build_config(const std::vector<std::map<std::string, std::string>>& layers);

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct IngestSummary {
  std::size_t lines = 0;
  std::size_t parsed = 0;
  std::size_t malformed = 0;
  std::size_t duplicate_ids = 0;
  std::size_t unknown_location = 0;
  std::size_t retweets = 0;
  std::size_t filtered = 0;  // records surviving the location/retweet filter
  std::size_t out_of_window = 0;
  std::size_t neutral = 0;
  std::map<std::string, std::int64_t> country_totals;
  std::vector<std::string> warnings;

  // counted + out-of-window + neutral == filtered
  bool reconciles() const;
};

struct FitSummary {
  std::vector<std::string> fitted;    // countries with a coefficient row
  std::vector<std::string> below_threshold;
  std::map<std::string, std::string> failures;  // country -> error
  std::map<std::string, double> bandwidths;
};

struct ClusterSummary {
  ClusterAssignment assignment;
  Dendrogram dendrogram;
};

struct RunReport {
  IngestSummary ingest;
  FitSummary fit;
  ClusterSummary cluster;
  std::vector<StageTiming> timings;
};

// Each stage reads its inputs from / writes its outputs to config.out_dir:
//   ingest  -> series.csv
//   fit     -> coefficients.csv           (reads series.csv)
//   cluster -> distances.csv, dendrogram.json, clusters.csv,
//              dendrogram.svg, plots/freq_<country>.svg
IngestSummary run_ingest(const PipelineConfig& config);
FitSummary run_fit(const PipelineConfig& config);
ClusterSummary run_cluster(const PipelineConfig& config);

// All three stages, then report.json (deterministic) and timings.txt.
RunReport run_pipeline(const PipelineConfig& config);

// Rows of coefficients.csv.
struct CoefficientRow {
  std::string country;
  Vector coefficients;  // w_1..w_m, w0
  double bandwidth = 0.0;
  std::string loss;
};
void write_coefficients_csv(std::ostream& out, const std::vector<CoefficientRow>& rows);
std::vector<CoefficientRow> read_coefficients_csv(std::istream& in);

// Shortest text that reads back as the same double.
std::string format_real(double v);

}  // namespace sentrend
