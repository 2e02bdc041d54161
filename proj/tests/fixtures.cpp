#include "fixtures.hpp"

#include <cmath>
#include <fmt/format.h>

namespace fixtures {

std::string record_line(const std::string& id, const std::string& timestamp,
                        const std::string& country, const std::string& label, bool retweet) {
  return fmt::format(
      R"({{"id":"{}","timestamp":"{}","country":"{}","label":"{}","is_retweet":{}}})", id,
      timestamp, country, label, retweet ? "true" : "false") +
         "\n";
}

namespace {

// day offset (0-based) from 2022-03-01 to an RFC 3339 string
std::string march_timestamp(int day, int hour, int minute) {
  // March has 31 days; April follows.
  const int month = day < 31 ? 3 : 4;
  const int dom = day < 31 ? day + 1 : day - 30;
  return fmt::format("2022-{:02d}-{:02d}T{:02d}:{:02d}:00Z", month, dom, hour, minute);
}

}  // namespace

SyntheticCorpus make_study_corpus(int low_volume_countries) {
  SyntheticCorpus out;
  std::size_t serial = 0;
  auto emit = [&](const std::string& country, const std::string& label, int day, bool retweet) {
    ++serial;
    out.jsonl += record_line(fmt::format("t{:07d}", serial),
                             march_timestamp(day, static_cast<int>(serial % 24),
                                             static_cast<int>(serial % 60)),
                             country, label, retweet);
  };

  for (std::size_t i = 0; i < kStudyCountries.size(); ++i) {
    const std::string& country = kStudyCountries[i];
    const int group = static_cast<int>(i % 3);
    out.planted_group[country] = group;
    const int volume = 600 + static_cast<int>((i * 37) % 1001);
    for (int f = 0; f < 8; ++f) {
      const int jitter = static_cast<int>((i + 3 * f) % 3) - 1;  // -1, 0, +1
      const int count = static_cast<int>(std::lround(kPlantedPatterns[group][f] * volume)) + jitter;
      const int week = f % 4;
      const char* label = f < 4 ? "positive" : "negative";
      for (int k = 0; k < count; ++k) emit(country, label, week * 7 + k % 7, false);
    }
    // records that must not reach the counts
    for (int k = 0; k < 5; ++k) emit(country, "positive", k, true);
    for (int k = 0; k < 7; ++k) emit(country, "neutral", k * 3, false);
    for (int k = 0; k < 3; ++k) emit(country, "negative", 28 + k, false);
  }
  for (int k = 0; k < 40; ++k) emit("UNKNOWN", k % 2 ? "positive" : "negative", k % 28, false);

  static const std::vector<std::string> kSmall = {"NZ", "KE", "NG", "NO", "GR", "IL"};
  for (int c = 0; c < low_volume_countries && c < static_cast<int>(kSmall.size()); ++c)
    for (int k = 0; k < 10 + 5 * c; ++k)
      emit(kSmall[c], k % 3 ? "negative" : "positive", k % 28, false);

  out.records = serial;
  return out;
}

std::string twelve_tweet_fixture() {
  std::string s;
  int n = 0;
  auto add = [&](const char* country, const char* label, int day) {
    ++n;
    s += record_line(fmt::format("f{:02d}", n), march_timestamp(day, 12, 0), country, label, false);
  };
  add("US", "positive", 0);
  add("US", "positive", 3);
  add("US", "negative", 6);
  add("US", "positive", 7);
  add("US", "negative", 16);
  add("US", "positive", 27);
  add("GB", "negative", 1);
  add("GB", "negative", 2);
  add("GB", "positive", 8);
  add("GB", "negative", 13);
  add("GB", "negative", 22);
  add("GB", "negative", 21);
  return s;
}

}  // namespace fixtures
