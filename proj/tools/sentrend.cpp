// sentrend: weekly sentiment series -> kernel-expansion fits -> country clusters.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <string>

#include "sentrend/error.hpp"
#include "sentrend/pipeline.hpp"

namespace {

using Settings = std::map<std::string, std::string>;

// Every pipeline setting is a string-valued flag; only flags actually given
// land in `flags`, so they override the config file.
struct CommonFlags {
  std::string config_path;
  Settings flags;
  std::vector<std::string> inputs;
};

void add_common(CLI::App* cmd, CommonFlags& common) {
  cmd->add_option("--config", common.config_path, "key=value config file");
  cmd->add_option("--input", common.inputs, "labeled record files (JSON lines or CSV)");
  static const std::vector<std::pair<std::string, std::string>> kFlags = {
      {"out", "output directory"},
      {"start", "first day of week 1 (YYYY-MM-DD)"},
      {"weeks", "number of weeks (default 4)"},
      {"week-length", "days per week (default 7)"},
      {"normalize", "relfreq|minmax"},
      {"min-tweets", "minimum labeled tweets per country (default 50)"},
      {"lag", "autoregressive lag p (default 1)"},
      {"loss", "ls|huber|quantile|eps"},
      {"huber-k", "huber elbow k (default 1.345)"},
      {"quantile-q", "quantile level Q (default 0.5)"},
      {"epsilon", "eps-insensitive tube half-width (default 0.01)"},
      {"kernel", "linear|gaussian"},
      {"bandwidth", "auto or a positive real"},
      {"bandwidth-grid", "comma-separated bandwidths for auto selection"},
      {"c", "loss weight c (default 10)"},
      {"tol", "optimizer tolerance (default 1e-10)"},
      {"clusters", "number of clusters K (default 5)"},
      {"linkage", "average|single|complete"},
      {"cluster-on", "coefficients|features"},
  };
  for (const auto& [name, help] : kFlags) {
    cmd->add_option_function<std::string>(
        "--" + name, [&common, key = name](const std::string& v) { common.flags[key] = v; }, help);
  }
}

sentrend::PipelineConfig resolve(const CommonFlags& common) {
  std::vector<Settings> layers;
  if (!common.config_path.empty()) layers.push_back(sentrend::read_config_file(common.config_path));
  Settings flags = common.flags;
  if (!common.inputs.empty()) {
    std::string joined;
    for (const auto& p : common.inputs) joined += (joined.empty() ? "" : ",") + p;
    flags["input"] = joined;
  }
  layers.push_back(std::move(flags));
  return sentrend::build_config(layers);
}

void print_ingest(const sentrend::IngestSummary& s) {
  for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
  fmt::print("lines {}  parsed {}  malformed {}  duplicate ids {}\n", s.lines, s.parsed,
             s.malformed, s.duplicate_ids);
  fmt::print("unknown location {}  retweets {}  kept {}\n", s.unknown_location, s.retweets,
             s.filtered);
  fmt::print("out of window {}  neutral {}  countries {}  reconciles {}\n", s.out_of_window,
             s.neutral, s.country_totals.size(), s.reconciles() ? "yes" : "NO");
}

void print_fit(const sentrend::FitSummary& s) {
  fmt::print("fitted {} countries, {} below threshold, {} failed\n", s.fitted.size(),
             s.below_threshold.size(), s.failures.size());
  for (const auto& [country, err] : s.failures) std::cerr << "fit failed for " << country << ": " << err << '\n';
}

void print_cluster(const sentrend::ClusterSummary& s) {
  std::map<int, std::vector<std::string>> groups;
  for (std::size_t i = 0; i < s.assignment.labels.size(); ++i)
    groups[s.assignment.cluster[i]].push_back(s.assignment.labels[i]);
  for (const auto& [id, members] : groups) fmt::print("cluster {}: {}\n", id, fmt::join(members, " "));
}

int print_report(const std::string& out_dir) {
  std::ifstream in(std::filesystem::path(out_dir) / "report.json");
  if (!in) throw sentrend::IoError("no report.json in " + out_dir + "; run `sentrend run` first");
  const auto j = nlohmann::json::parse(in);
  const auto& ing = j["ingest"];
  fmt::print("records: {} lines, {} parsed, {} malformed, {} kept after filtering\n",
             ing["lines"].get<long>(), ing["parsed"].get<long>(), ing["malformed"].get<long>(),
             ing["filtered"].get<long>());
  fmt::print("{:<8} {:>8} {:>10} {:>8}\n", "country", "tweets", "bandwidth", "cluster");
  for (const auto& [country, total] : ing["country_totals"].items()) {
    const auto& bw = j["fit"]["bandwidths"];
    const auto& cl = j["clusters"];
    fmt::print("{:<8} {:>8} {:>10} {:>8}\n", country, total.get<long>(),
               bw.contains(country) ? fmt::format("{:.4g}", bw[country].get<double>()) : "-",
               cl.contains(country) ? std::to_string(cl[country].get<int>()) : "-");
  }
  for (const auto& [country, err] : j["fit"]["failures"].items())
    fmt::print("failed: {} ({})\n", country, err.get<std::string>());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weekly sentiment trends per country: fit and cluster"};
  app.require_subcommand(1);

  CommonFlags ingest_flags, fit_flags, cluster_flags, run_flags;
  auto* ingest = app.add_subcommand("ingest", "records -> series.csv");
  auto* fit = app.add_subcommand("fit", "series.csv -> coefficients.csv");
  auto* cluster = app.add_subcommand("cluster", "coefficients.csv -> clusters, dendrogram, plots");
  auto* run = app.add_subcommand("run", "ingest, fit and cluster");
  add_common(ingest, ingest_flags);
  add_common(fit, fit_flags);
  add_common(cluster, cluster_flags);
  add_common(run, run_flags);
  auto* report = app.add_subcommand("report", "summarize report.json from an output directory");
  std::string report_dir = "out";
  report->add_option("--out", report_dir, "output directory of a previous run");

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest->parsed()) {
      print_ingest(sentrend::run_ingest(resolve(ingest_flags)));
    } else if (fit->parsed()) {
      print_fit(sentrend::run_fit(resolve(fit_flags)));
    } else if (cluster->parsed()) {
      print_cluster(sentrend::run_cluster(resolve(cluster_flags)));
    } else if (run->parsed()) {
      const auto r = sentrend::run_pipeline(resolve(run_flags));
      print_ingest(r.ingest);
      print_fit(r.fit);
      print_cluster(r.cluster);
      for (const auto& t : r.timings) fmt::print("{:<8} {:.3f}s\n", t.stage, t.seconds);
    } else if (report->parsed()) {
      return print_report(report_dir);
    }
  } catch (const sentrend::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
