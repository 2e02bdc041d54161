#include "sentrend/pipeline.hpp"

#include <charconv>
#include <chrono>
#include <fmt/format.h>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "sentrend/error.hpp"
#include "svg.hpp"

namespace sentrend {

namespace fs = std::filesystem;

namespace {

std::string trim_copy(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

double parse_real(const std::string& key, const std::string& text) {
  const std::string t = trim_copy(text);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || p != t.data() + t.size() || t.empty())
    throw ContractViolation(fmt::format("{}: '{}' is not a number", key, text));
  return v;
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim_copy(text);
  std::int64_t v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || p != t.data() + t.size() || t.empty())
    throw ContractViolation(fmt::format("{}: '{}' is not an integer", key, text));
  return v;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim_copy(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("failed writing " + path.string());
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

void ensure_out_dir(const PipelineConfig& config) {
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + config.out_dir.string());
}

std::vector<CountrySeries> prepared_series(const PipelineConfig& config,
                                           std::vector<std::string>* below_threshold) {
  auto in = open_input(config.out_dir / "series.csv");
  std::vector<CountrySeries> all = read_series_csv(in);
  std::vector<CountrySeries> kept;
  for (auto& s : all) {
    if (s.total() < config.min_tweets) {
      if (below_threshold) below_threshold->push_back(s.country);
      continue;
    }
    kept.push_back(normalize(std::move(s), config.normalization));
  }
  return kept;
}

nlohmann::json config_json(const PipelineConfig& c) {
  nlohmann::json j;
  std::vector<std::string> inputs;
  for (const auto& p : c.inputs) inputs.push_back(p.generic_string());
  j["inputs"] = inputs;
  j["start"] = format_date(c.window.start);
  j["weeks"] = c.window.week_count;
  j["week_length"] = c.window.week_length_days;
  j["normalize"] = std::string(to_string(c.normalization));
  j["min_tweets"] = c.min_tweets;
  j["lag"] = c.fit.lag;
  j["loss"] = std::string(to_string(c.fit.loss.kind));
  j["huber_k"] = c.fit.loss.huber_k;
  j["quantile_q"] = c.fit.loss.quantile_q;
  j["epsilon"] = c.fit.loss.eps;
  j["kernel"] = std::string(to_string(c.kernel));
  j["bandwidth"] = c.fit.bandwidth ? nlohmann::json(*c.fit.bandwidth) : nlohmann::json("auto");
  j["c"] = c.fit.c;
  j["tol"] = c.fit.tol;
  j["clusters"] = c.clusters;
  j["linkage"] = std::string(to_string(c.linkage));
  j["cluster_on"] = c.cluster_on == ClusterOn::Coefficients ? "coefficients" : "features";
  return j;
}

}  // namespace

std::string format_real(double v) { return fmt::format("{}", v == 0.0 ? 0.0 : v); }

void PipelineConfig::validate() const {
  window.validate();
  fit.loss.validate();
  if (!(fit.c > 0.0)) throw ContractViolation("c must be positive");
  if (!(fit.tol > 0.0)) throw ContractViolation("tol must be positive");
  if (fit.lag < 1) throw ContractViolation("lag must be at least 1");
  if (2 * static_cast<std::size_t>(window.week_count) < fit.lag + 2)
    throw ContractViolation("lag is too large for the number of weekly features");
  if (fit.bandwidth && !(*fit.bandwidth > 0.0))
    throw ContractViolation("bandwidth must be positive");
  for (std::size_t i = 0; i < fit.grid.size(); ++i)
    if (!(fit.grid[i] > 0.0) || (i > 0 && !(fit.grid[i] > fit.grid[i - 1])))
      throw ContractViolation("bandwidth grid must be positive and strictly increasing");
  if (clusters < 1) throw ContractViolation("cluster count must be at least 1");
  if (min_tweets < 0) throw ContractViolation("min-tweets must be non-negative");
  if (!random_free) throw ContractViolation("random-free must be true: the pipeline is deterministic");
}

std::map<std::string, std::string> read_config_file(const fs::path& path) {
  auto in = open_input(path);
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim_copy(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ContractViolation(fmt::format("{}:{}: expected key=value", path.string(), line_no));
    out[trim_copy(body.substr(0, eq))] = trim_copy(body.substr(eq + 1));
  }
  return out;
}

void apply_setting(PipelineConfig& c, const std::string& key, const std::string& value) {
  if (key == "input") {
    c.inputs.clear();
    for (const auto& p : split_commas(value)) c.inputs.emplace_back(p);
  } else if (key == "start") {
    const auto d = parse_date(value);
    if (!d) throw ContractViolation("start: expected YYYY-MM-DD, got '" + value + "'");
    c.window.start = *d;
  } else if (key == "weeks") {
    c.window.week_count = static_cast<int>(parse_int(key, value));
  } else if (key == "week-length") {
    c.window.week_length_days = static_cast<int>(parse_int(key, value));
  } else if (key == "normalize") {
    c.normalization = parse_normalization(value);
  } else if (key == "min-tweets") {
    c.min_tweets = parse_int(key, value);
  } else if (key == "lag") {
    const auto lag = parse_int(key, value);
    if (lag < 1) throw ContractViolation("lag must be at least 1");
    c.fit.lag = static_cast<std::size_t>(lag);
  } else if (key == "loss") {
    c.fit.loss.kind = parse_loss_kind(value);
  } else if (key == "huber-k") {
    c.fit.loss.huber_k = parse_real(key, value);
  } else if (key == "quantile-q") {
    c.fit.loss.quantile_q = parse_real(key, value);
  } else if (key == "epsilon") {
    c.fit.loss.eps = parse_real(key, value);
  } else if (key == "kernel") {
    c.kernel = parse_kernel_kind(value);
    c.fit.kernel = c.kernel;
  } else if (key == "bandwidth") {
    if (trim_copy(value) == "auto") c.fit.bandwidth.reset();
    else c.fit.bandwidth = parse_real(key, value);
  } else if (key == "bandwidth-grid") {
    c.fit.grid.clear();
    for (const auto& v : split_commas(value)) c.fit.grid.push_back(parse_real(key, v));
  } else if (key == "c") {
    c.fit.c = parse_real(key, value);
  } else if (key == "tol") {
    c.fit.tol = parse_real(key, value);
  } else if (key == "clusters") {
    const auto k = parse_int(key, value);
    if (k < 1) throw ContractViolation("clusters must be at least 1");
    c.clusters = static_cast<std::size_t>(k);
  } else if (key == "linkage") {
    c.linkage = parse_linkage(value);
  } else if (key == "cluster-on") {
    if (value == "coefficients") c.cluster_on = ClusterOn::Coefficients;
    else if (value == "features") c.cluster_on = ClusterOn::Features;
    else throw ContractViolation("cluster-on must be coefficients or features");
  } else if (key == "out") {
    c.out_dir = value;
  } else if (key == "random-free") {
    c.random_free = value == "true" || value == "1";
  } else {
    throw ContractViolation("unknown setting '" + key + "'");
  }
}

PipelineConfig build_config(const std::vector<std::map<std::string, std::string>>& layers) {
  PipelineConfig config;
  for (const auto& layer : layers)
    for (const auto& [k, v] : layer) apply_setting(config, k, v);
  config.validate();
  return config;
}

bool IngestSummary::reconciles() const {
  std::int64_t counted = 0;
  for (const auto& [_, t] : country_totals) counted += t;
  return static_cast<std::size_t>(counted) + out_of_window + neutral == filtered;
}

IngestSummary run_ingest(const PipelineConfig& config) {
  config.validate();
  if (config.inputs.empty()) throw ContractViolation("no input files given");
  ensure_out_dir(config);

  IngestSummary summary;
  std::vector<TweetRecord> records;
  for (const auto& path : config.inputs) {
    ParseResult parsed = parse_records_file(path);
    summary.lines += parsed.lines;
    summary.malformed += parsed.malformed;
    summary.duplicate_ids += parsed.duplicate_ids;
    for (auto& w : parsed.warnings) summary.warnings.push_back(path.filename().string() + ": " + w);
    records.insert(records.end(), std::make_move_iterator(parsed.records.begin()),
                   std::make_move_iterator(parsed.records.end()));
  }
  if (config.inputs.size() > 1) summary.duplicate_ids += keep_last_by_id(records);
  summary.parsed = records.size();
  if (records.empty()) summary.warnings.push_back("input contains no records");

  const FilterOutcome filtered = filter_records_counted(records);
  summary.unknown_location = filtered.unknown_location;
  summary.retweets = filtered.retweets;
  summary.filtered = filtered.kept.size();

  const AggregationResult agg = aggregate_weekly(filtered.kept, config.window);
  summary.out_of_window = agg.out_of_window;
  summary.neutral = agg.neutral;
  for (const auto& s : agg.series) summary.country_totals[s.country] = s.total();

  std::ostringstream csv;
  write_series_csv(csv, agg.series);
  write_file(config.out_dir / "series.csv", csv.str());
  return summary;
}

void write_coefficients_csv(std::ostream& out, const std::vector<CoefficientRow>& rows) {
  const std::size_t m = rows.empty() ? 0 : rows.front().coefficients.size() - 1;
  out << "country";
  for (std::size_t j = 1; j <= m; ++j) out << ",w_" << j;
  out << ",w0,h,loss\n";
  for (const auto& r : rows) {
    if (r.coefficients.size() != m + 1)
      throw ContractViolation("coefficient rows differ in length");
    out << r.country;
    for (double v : r.coefficients) out << ',' << format_real(v);
    out << ',' << format_real(r.bandwidth) << ',' << r.loss << '\n';
  }
}

std::vector<CoefficientRow> read_coefficients_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("coefficients file is empty");
  const auto header = split_csv_line(trim_copy(line));
  if (header.size() < 4 || header.front() != "country" || header[header.size() - 3] != "w0" ||
      header[header.size() - 2] != "h" || header.back() != "loss")
    throw SchemaError("coefficients header must be country,w_1..w_m,w0,h,loss");
  const std::size_t width = header.size();
  std::vector<CoefficientRow> rows;
  while (std::getline(in, line)) {
    line = trim_copy(line);
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != width) throw SchemaError("coefficient row has the wrong number of fields");
    CoefficientRow r;
    r.country = f.front();
    for (std::size_t j = 1; j + 2 < width; ++j) r.coefficients.push_back(parse_real("coefficient", f[j]));
    r.bandwidth = parse_real("h", f[width - 2]);
    r.loss = f.back();
    rows.push_back(std::move(r));
  }
  return rows;
}

FitSummary run_fit(const PipelineConfig& config) {
  config.validate();
  ensure_out_dir(config);
  FitSummary summary;
  const auto series = prepared_series(config, &summary.below_threshold);

  // Fits are independent; rows come out in country order either way.
  std::vector<CoefficientRow> rows;
  for (const auto& s : series) {
    try {
      const CountryFit fit = fit_country(s, config.fit);
      CoefficientRow row;
      row.country = s.country;
      row.coefficients = fit.model.coefficient_vector();
      row.bandwidth = config.kernel == KernelKind::Gaussian ? fit.model.kernel.bandwidth : 0.0;
      row.loss = std::string(to_string(config.fit.loss.kind));
      summary.bandwidths[s.country] = row.bandwidth;
      summary.fitted.push_back(s.country);
      rows.push_back(std::move(row));
    } catch (const Error& e) {
      summary.failures[s.country] = e.what();
    }
  }

  std::ostringstream csv;
  if (rows.empty()) {
    // keep the header shape even without rows
    const std::size_t m = 2 * static_cast<std::size_t>(config.window.week_count) - config.fit.lag;
    csv << "country";
    for (std::size_t j = 1; j <= m; ++j) csv << ",w_" << j;
    csv << ",w0,h,loss\n";
  } else {
    write_coefficients_csv(csv, rows);
  }
  write_file(config.out_dir / "coefficients.csv", csv.str());
  return summary;
}

ClusterSummary run_cluster(const PipelineConfig& config) {
  config.validate();
  ensure_out_dir(config);

  std::map<std::string, Vector> vectors;
  if (config.cluster_on == ClusterOn::Coefficients) {
    auto in = open_input(config.out_dir / "coefficients.csv");
    for (auto& row : read_coefficients_csv(in)) vectors[row.country] = std::move(row.coefficients);
  } else {
    for (auto& s : prepared_series(config, nullptr)) vectors[s.country] = std::move(s.features);
  }
  if (vectors.empty()) throw ContractViolation("no countries available to cluster");
  if (config.clusters > vectors.size())
    throw ContractViolation(fmt::format("requested {} clusters but only {} countries are available",
                                        config.clusters, vectors.size()));

  const DistanceMatrix dist = pairwise_distances(vectors);
  ClusterSummary summary;
  if (dist.labels.size() >= 2) {
    summary.dendrogram = agglomerate(dist, config.linkage);
  } else {
    summary.dendrogram.leaf_labels = dist.labels;
  }
  summary.assignment = cut(summary.dendrogram, config.clusters);

  std::ostringstream dcsv;
  dcsv << "country";
  for (const auto& l : dist.labels) dcsv << ',' << l;
  dcsv << '\n';
  for (std::size_t i = 0; i < dist.labels.size(); ++i) {
    dcsv << dist.labels[i];
    for (std::size_t j = 0; j < dist.labels.size(); ++j) dcsv << ',' << format_real(dist.d(i, j));
    dcsv << '\n';
  }
  write_file(config.out_dir / "distances.csv", dcsv.str());

  nlohmann::json tree;
  tree["leaf_labels"] = summary.dendrogram.leaf_labels;
  tree["linkage"] = std::string(to_string(config.linkage));
  tree["merges"] = nlohmann::json::array();
  for (const auto& m : summary.dendrogram.merges)
    tree["merges"].push_back({{"a", m.a}, {"b", m.b}, {"distance", m.distance}, {"size", m.size}});
  write_file(config.out_dir / "dendrogram.json", tree.dump(2) + "\n");

  std::ostringstream ccsv;
  ccsv << "country,cluster\n";
  for (std::size_t i = 0; i < summary.assignment.labels.size(); ++i)
    ccsv << summary.assignment.labels[i] << ',' << summary.assignment.cluster[i] << '\n';
  write_file(config.out_dir / "clusters.csv", ccsv.str());

  write_file(config.out_dir / "dendrogram.svg", svg::dendrogram(summary.dendrogram, summary.assignment));
  if (fs::exists(config.out_dir / "series.csv")) {
    fs::create_directories(config.out_dir / "plots");
    auto in = open_input(config.out_dir / "series.csv");
    for (const auto& s : read_series_csv(in))
      if (vectors.count(s.country))
        write_file(config.out_dir / "plots" / ("freq_" + s.country + ".svg"), svg::frequency_chart(s));
  }
  return summary;
}

RunReport run_pipeline(const PipelineConfig& config) {
  RunReport report;
  auto timed = [&](const char* stage, auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    report.timings.push_back({stage, dt.count()});
  };
  timed("ingest", [&] { report.ingest = run_ingest(config); });
  timed("fit", [&] { report.fit = run_fit(config); });
  timed("cluster", [&] { report.cluster = run_cluster(config); });

  nlohmann::json j;
  j["config"] = config_json(config);
  const auto& in = report.ingest;
  j["ingest"] = {{"lines", in.lines},
                 {"parsed", in.parsed},
                 {"malformed", in.malformed},
                 {"duplicate_ids", in.duplicate_ids},
                 {"unknown_location", in.unknown_location},
                 {"retweets", in.retweets},
                 {"filtered", in.filtered},
                 {"out_of_window", in.out_of_window},
                 {"neutral", in.neutral},
                 {"country_totals", in.country_totals},
                 {"reconciles", in.reconciles()}};
  j["fit"] = {{"fitted", report.fit.fitted},
              {"below_threshold", report.fit.below_threshold},
              {"failures", report.fit.failures},
              {"bandwidths", report.fit.bandwidths}};
  j["clusters"] = report.cluster.assignment.as_map();
  write_file(config.out_dir / "report.json", j.dump(2) + "\n");

  std::string timings;
  for (const auto& t : report.timings) timings += fmt::format("{} {:.6f}\n", t.stage, t.seconds);
  write_file(config.out_dir / "timings.txt", timings);
  return report;
}

}  // namespace sentrend
