#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sentrend/matrix.hpp"

namespace sentrend {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

inline constexpr std::string_view kUnknownCountry = "UNKNOWN";

enum class Sentiment { Positive, Negative, Neutral };

std::string_view to_string(Sentiment s);
std::optional<Sentiment> parse_sentiment(std::string_view text);

// Parses an RFC 3339 date-time ("2022-03-01T12:00:00Z",
// "2022-03-01T14:30:00.250+02:00"). Returns nullopt on anything else.
std::optional<Timestamp> parse_rfc3339(std::string_view text);
std::string format_rfc3339(Timestamp ts);

// Parses "YYYY-MM-DD".
std::optional<std::chrono::sys_days> parse_date(std::string_view text);
std::string format_date(std::chrono::sys_days day);

struct TweetRecord {
  std::string id;
  Timestamp timestamp;
  std::string country;  // ISO 3166-1 alpha-2, or kUnknownCountry
  Sentiment label = Sentiment::Neutral;
  bool is_retweet = false;
  std::optional<std::string> text;
};

enum class InputFormat { Auto, JsonLines, Csv };

struct ParseResult {
  std::vector<TweetRecord> records;
  std::size_t lines = 0;  // non-blank data lines (CSV header excluded)
  std::size_t malformed = 0;
  std::size_t duplicate_ids = 0;
  std::vector<std::string> warnings;
};

// One record per line, either JSON objects or CSV with a header row naming
// id,timestamp,country,label,is_retweet[,text]. Malformed lines are counted
// and skipped; more than half malformed raises SchemaError. Repeated ids keep
// the last occurrence.
ParseResult parse_records(std::istream& in, InputFormat format = InputFormat::Auto);
ParseResult parse_records_file(const std::filesystem::path& path,
                               InputFormat format = InputFormat::Auto);

// Removes earlier records whose id reappears later; the survivor keeps its
// own position. Returns the number removed.
std::size_t keep_last_by_id(std::vector<TweetRecord>& records);

struct FilterOutcome {
  std::vector<TweetRecord> kept;
  std::size_t unknown_location = 0;
  std::size_t retweets = 0;
};

// Drops records without a country and retweets; order preserved.
FilterOutcome filter_records_counted(const std::vector<TweetRecord>& records);
std::vector<TweetRecord> filter_records(const std::vector<TweetRecord>& records);

struct AggregationWindow {
  std::chrono::sys_days start{std::chrono::year{2022} / 3 / 1};
  int week_count = 4;
  int week_length_days = 7;

  void validate() const;
  std::chrono::sys_days end() const {
    return start + std::chrono::days{week_count * week_length_days};
  }
};

struct CountrySeries {
  std::string country;
  std::vector<std::int64_t> pos_counts;
  std::vector<std::int64_t> neg_counts;
  // positive frequencies for each week, then negative frequencies
  Vector features;

  std::int64_t total() const;
};

struct AggregationResult {
  std::vector<CountrySeries> series;  // sorted by country code
  std::size_t out_of_window = 0;
  std::size_t neutral = 0;
};

// Week w (0-based) covers [start + w*len, start + (w+1)*len). Records outside
// the window are counted as out-of-window; neutral records in the window are
// counted but never enter pos/neg counts.
AggregationResult aggregate_weekly(const std::vector<TweetRecord>& records,
                                   const AggregationWindow& window);

enum class Normalization { RelativeFrequency, MinMax };

std::string_view to_string(Normalization mode);
Normalization parse_normalization(std::string_view text);  // "relfreq" | "minmax"

CountrySeries normalize(CountrySeries series, Normalization mode);

// Keeps countries with at least `threshold` positive + negative records.
std::vector<CountrySeries> min_tweet_filter(std::vector<CountrySeries> series,
                                            std::int64_t threshold);

// country,week,pos,neg with 1-based weeks.
void write_series_csv(std::ostream& out, const std::vector<CountrySeries>& series);
std::vector<CountrySeries> read_series_csv(std::istream& in);

// Splits one CSV line, honouring double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace sentrend
