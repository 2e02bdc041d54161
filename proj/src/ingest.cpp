#include "sentrend/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>

#include "sentrend/error.hpp"

namespace sentrend {

using namespace std::chrono;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return true;
}

constexpr std::size_t kMaxWarnings = 20;

void warn(ParseResult& r, std::string msg) {
  if (r.warnings.size() < kMaxWarnings) r.warnings.push_back(std::move(msg));
}

}  // namespace

std::string_view to_string(Sentiment s) {
  switch (s) {
    case Sentiment::Positive: return "positive";
    case Sentiment::Negative: return "negative";
    case Sentiment::Neutral: return "neutral";
  }
  return "neutral";
}

std::optional<Sentiment> parse_sentiment(std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "positive") return Sentiment::Positive;
  if (t == "negative") return Sentiment::Negative;
  if (t == "neutral") return Sentiment::Neutral;
  return std::nullopt;
}

std::optional<sys_days> parse_date(std::string_view s) {
  s = trim(s);
  int y, m, d;
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!read_int(s, 0, 4, y) || !read_int(s, 5, 2, m) || !read_int(s, 8, 2, d)) return std::nullopt;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd};
}

std::string format_date(sys_days day) {
  const year_month_day ymd{day};
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

std::optional<Timestamp> parse_rfc3339(std::string_view s) {
  s = trim(s);
  if (s.size() < 20) return std::nullopt;
  const auto date = parse_date(s.substr(0, 10));
  if (!date) return std::nullopt;
  if (s[10] != 'T' && s[10] != 't' && s[10] != ' ') return std::nullopt;
  int hh, mm, ss;
  if (!read_int(s, 11, 2, hh) || s[13] != ':' || !read_int(s, 14, 2, mm) || s[16] != ':' ||
      !read_int(s, 17, 2, ss))
    return std::nullopt;
  if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;

  std::size_t pos = 19;
  milliseconds frac{0};
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    const std::size_t begin = pos;
    int scale = 100;
    int ms = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      ms += (s[pos] - '0') * scale;
      scale /= 10;
      ++pos;
    }
    if (pos == begin) return std::nullopt;
    frac = milliseconds{ms};
  }
  if (pos >= s.size()) return std::nullopt;

  minutes offset{0};
  if (s[pos] == 'Z' || s[pos] == 'z') {
    ++pos;
  } else if (s[pos] == '+' || s[pos] == '-') {
    const int sign = s[pos] == '-' ? -1 : 1;
    int oh, om;
    if (!read_int(s, pos + 1, 2, oh) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
        !read_int(s, pos + 4, 2, om))
      return std::nullopt;
    if (oh > 23 || om > 59) return std::nullopt;
    offset = minutes{sign * (oh * 60 + om)};
    pos += 6;
  } else {
    return std::nullopt;
  }
  if (pos != s.size()) return std::nullopt;

  const auto local = time_point_cast<milliseconds>(*date) + hours{hh} + minutes{mm} +
                     seconds{ss} + frac;
  return local - offset;
}

std::string format_rfc3339(Timestamp ts) {
  const auto day = floor<days>(ts);
  const hh_mm_ss<milliseconds> tod{ts - day};
  std::string out = fmt::format("{}T{:02d}:{:02d}:{:02d}", format_date(day), tod.hours().count(),
                                tod.minutes().count(), tod.seconds().count());
  if (tod.subseconds().count() != 0) out += fmt::format(".{:03d}", tod.subseconds().count());
  return out + "Z";
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

namespace {

// Field-level validation shared by both input formats. Returns an error
// message, or empty on success.
std::string fill_country(std::string_view raw, TweetRecord& rec) {
  const std::string_view v = trim(raw);
  if (v.empty() || lower(v) == "unknown") {
    rec.country = std::string(kUnknownCountry);
    return {};
  }
  if (v.size() != 2 || !std::isalpha(static_cast<unsigned char>(v[0])) ||
      !std::isalpha(static_cast<unsigned char>(v[1])))
    return fmt::format("country '{}' is not an ISO alpha-2 code", v);
  rec.country = {static_cast<char>(std::toupper(static_cast<unsigned char>(v[0]))),
                 static_cast<char>(std::toupper(static_cast<unsigned char>(v[1])))};
  return {};
}

std::string parse_json_line(std::string_view line, TweetRecord& rec) {
  const auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return "not a JSON object";
  for (const char* key : {"id", "timestamp", "country", "label", "is_retweet"})
    if (!j.contains(key)) return fmt::format("missing key '{}'", key);

  const auto& id = j["id"];
  if (id.is_string()) rec.id = id.get<std::string>();
  else if (id.is_number_integer()) rec.id = id.dump();
  else return "id must be a string or integer";

  if (!j["timestamp"].is_string()) return "timestamp must be a string";
  const auto ts = parse_rfc3339(j["timestamp"].get<std::string>());
  if (!ts) return "timestamp is not RFC 3339";
  rec.timestamp = *ts;

  const auto& country = j["country"];
  if (country.is_null()) rec.country = std::string(kUnknownCountry);
  else if (!country.is_string()) return "country must be a string";
  else if (auto err = fill_country(country.get<std::string>(), rec); !err.empty()) return err;

  if (!j["label"].is_string()) return "label must be a string";
  const auto label = parse_sentiment(j["label"].get<std::string>());
  if (!label) return "label must be positive, negative or neutral";
  rec.label = *label;

  if (!j["is_retweet"].is_boolean()) return "is_retweet must be a boolean";
  rec.is_retweet = j["is_retweet"].get<bool>();

  if (j.contains("text") && j["text"].is_string()) rec.text = j["text"].get<std::string>();
  return {};
}

struct CsvColumns {
  std::map<std::string, std::size_t> index;
  std::string missing;
};

CsvColumns read_header(std::string_view line) {
  CsvColumns cols;
  const auto names = split_csv_line(line);
  for (std::size_t i = 0; i < names.size(); ++i) cols.index[lower(trim(names[i]))] = i;
  for (const char* key : {"id", "timestamp", "country", "label", "is_retweet"})
    if (!cols.index.count(key)) {
      cols.missing = key;
      break;
    }
  return cols;
}

std::string parse_csv_line(std::string_view line, const CsvColumns& cols, TweetRecord& rec) {
  const auto f = split_csv_line(line);
  auto field = [&](const char* key) -> std::optional<std::string_view> {
    const auto it = cols.index.find(key);
    if (it == cols.index.end() || it->second >= f.size()) return std::nullopt;
    return std::string_view(f[it->second]);
  };
  for (const char* key : {"id", "timestamp", "country", "label", "is_retweet"})
    if (!field(key)) return fmt::format("missing field '{}'", key);

  rec.id = std::string(trim(*field("id")));
  if (rec.id.empty()) return "empty id";
  const auto ts = parse_rfc3339(*field("timestamp"));
  if (!ts) return "timestamp is not RFC 3339";
  rec.timestamp = *ts;
  if (auto err = fill_country(*field("country"), rec); !err.empty()) return err;
  const auto label = parse_sentiment(*field("label"));
  if (!label) return "label must be positive, negative or neutral";
  rec.label = *label;
  const std::string rt = lower(trim(*field("is_retweet")));
  if (rt == "true" || rt == "1") rec.is_retweet = true;
  else if (rt == "false" || rt == "0") rec.is_retweet = false;
  else return "is_retweet must be true/false";
  if (auto text = field("text")) rec.text = std::string(*text);
  return {};
}

}  // namespace

ParseResult parse_records(std::istream& in, InputFormat format) {
  ParseResult result;
  std::vector<TweetRecord> all;
  std::optional<CsvColumns> csv;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string_view body = trim(line);
    if (body.empty()) continue;

    if (format == InputFormat::Auto)
      format = body.front() == '{' ? InputFormat::JsonLines : InputFormat::Csv;
    if (format == InputFormat::Csv && !csv) {
      csv = read_header(body);
      if (!csv->missing.empty())
        throw SchemaError(fmt::format("CSV header lacks required column '{}'", csv->missing));
      continue;
    }

    ++result.lines;
    TweetRecord rec;
    const std::string err = format == InputFormat::JsonLines ? parse_json_line(body, rec)
                                                             : parse_csv_line(body, *csv, rec);
    if (!err.empty()) {
      ++result.malformed;
      warn(result, fmt::format("line {}: {}", line_no, err));
      continue;
    }
    all.push_back(std::move(rec));
  }
  if (in.bad()) throw IoError("failed while reading record stream");

  if (result.lines > 0 && 2 * result.malformed > result.lines)
    throw SchemaError(fmt::format("{} of {} lines are malformed; wrong input file?",
                                  result.malformed, result.lines));

  result.duplicate_ids = keep_last_by_id(all);
  if (result.duplicate_ids > 0)
    warn(result, fmt::format("{} duplicate ids: kept the last occurrence of each",
                             result.duplicate_ids));
  result.records = std::move(all);
  return result;
}

std::size_t keep_last_by_id(std::vector<TweetRecord>& records) {
  std::unordered_set<std::string> seen;
  std::vector<TweetRecord> kept;
  std::size_t dropped = 0;
  for (auto it = records.rbegin(); it != records.rend(); ++it) {
    if (!seen.insert(it->id).second) {
      ++dropped;
      continue;
    }
    kept.push_back(std::move(*it));
  }
  std::reverse(kept.begin(), kept.end());
  records = std::move(kept);
  return dropped;
}

ParseResult parse_records_file(const std::filesystem::path& path, InputFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_records(in, format);
}

FilterOutcome filter_records_counted(const std::vector<TweetRecord>& records) {
  FilterOutcome out;
  for (const auto& r : records) {
    if (r.country == kUnknownCountry) {
      ++out.unknown_location;
    } else if (r.is_retweet) {
      ++out.retweets;
    } else {
      out.kept.push_back(r);
    }
  }
  return out;
}

std::vector<TweetRecord> filter_records(const std::vector<TweetRecord>& records) {
  return filter_records_counted(records).kept;
}

void AggregationWindow::validate() const {
  if (week_count < 1) throw ContractViolation("week count must be positive");
  if (week_length_days < 1) throw ContractViolation("week length must be positive");
}

std::int64_t CountrySeries::total() const {
  std::int64_t t = 0;
  for (auto v : pos_counts) t += v;
  for (auto v : neg_counts) t += v;
  return t;
}

AggregationResult aggregate_weekly(const std::vector<TweetRecord>& records,
                                   const AggregationWindow& window) {
  window.validate();
  AggregationResult out;
  std::map<std::string, CountrySeries> by_country;
  const auto start = time_point_cast<milliseconds>(window.start);
  const milliseconds week_len = days{window.week_length_days};

  for (const auto& r : records) {
    auto& s = by_country[r.country];
    if (s.country.empty()) {
      s.country = r.country;
      s.pos_counts.assign(window.week_count, 0);
      s.neg_counts.assign(window.week_count, 0);
    }
    if (r.timestamp < start) {
      ++out.out_of_window;
      continue;
    }
    const auto week = (r.timestamp - start) / week_len;
    if (week >= window.week_count) {
      ++out.out_of_window;
      continue;
    }
    switch (r.label) {
      case Sentiment::Positive: ++s.pos_counts[week]; break;
      case Sentiment::Negative: ++s.neg_counts[week]; break;
      case Sentiment::Neutral: ++out.neutral; break;
    }
  }
  for (auto& [_, s] : by_country) out.series.push_back(std::move(s));
  return out;
}

std::string_view to_string(Normalization mode) {
  return mode == Normalization::MinMax ? "minmax" : "relfreq";
}

Normalization parse_normalization(std::string_view text) {
  if (text == "relfreq" || text == "relative_frequency") return Normalization::RelativeFrequency;
  if (text == "minmax") return Normalization::MinMax;
  throw ContractViolation("unknown normalization '" + std::string(text) + "'");
}

CountrySeries normalize(CountrySeries series, Normalization mode) {
  const std::size_t weeks = series.pos_counts.size();
  if (series.neg_counts.size() != weeks)
    throw ContractViolation("positive and negative counts differ in length");
  series.features.assign(2 * weeks, 0.0);

  if (mode == Normalization::RelativeFrequency) {
    const std::int64_t total = series.total();
    if (total == 0) return series;
    const double denom = static_cast<double>(total);
    for (std::size_t w = 0; w < weeks; ++w) {
      series.features[w] = static_cast<double>(series.pos_counts[w]) / denom;
      series.features[weeks + w] = static_cast<double>(series.neg_counts[w]) / denom;
    }
    return series;
  }

  auto scale = [&](const std::vector<std::int64_t>& counts, std::size_t offset) {
    if (counts.empty()) return;
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    if (*hi == *lo) return;
    const double range = static_cast<double>(*hi - *lo);
    for (std::size_t w = 0; w < counts.size(); ++w)
      series.features[offset + w] = static_cast<double>(counts[w] - *lo) / range;
  };
  scale(series.pos_counts, 0);
  scale(series.neg_counts, weeks);
  return series;
}

std::vector<CountrySeries> min_tweet_filter(std::vector<CountrySeries> series,
                                            std::int64_t threshold) {
  std::erase_if(series, [&](const CountrySeries& s) { return s.total() < threshold; });
  return series;
}

void write_series_csv(std::ostream& out, const std::vector<CountrySeries>& series) {
  out << "country,week,pos,neg\n";
  for (const auto& s : series)
    for (std::size_t w = 0; w < s.pos_counts.size(); ++w)
      out << s.country << ',' << (w + 1) << ',' << s.pos_counts[w] << ',' << s.neg_counts[w]
          << '\n';
}

std::vector<CountrySeries> read_series_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return {};
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (trim(line) != "country,week,pos,neg")
    throw SchemaError("series file must start with header country,week,pos,neg");

  std::map<std::string, std::map<long, std::pair<std::int64_t, std::int64_t>>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 4) throw SchemaError(fmt::format("series line {}: expected 4 fields", line_no));
    long week = 0;
    std::int64_t pos = 0, neg = 0;
    auto num = [&](const std::string& s, auto& v) {
      const auto t = trim(s);
      const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      return ec == std::errc{} && p == t.data() + t.size();
    };
    if (!num(f[1], week) || !num(f[2], pos) || !num(f[3], neg) || week < 1 || pos < 0 || neg < 0)
      throw SchemaError(fmt::format("series line {}: bad numeric field", line_no));
    auto& slot = rows[std::string(trim(f[0]))][week];
    slot.first += pos;
    slot.second += neg;
  }

  std::vector<CountrySeries> out;
  for (const auto& [country, weeks] : rows) {
    CountrySeries s;
    s.country = country;
    const long n = weeks.rbegin()->first;
    s.pos_counts.assign(n, 0);
    s.neg_counts.assign(n, 0);
    for (const auto& [w, pn] : weeks) {
      s.pos_counts[w - 1] = pn.first;
      s.neg_counts[w - 1] = pn.second;
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace sentrend
