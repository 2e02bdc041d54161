#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "sentrend/error.hpp"
#include "sentrend/ingest.hpp"

using namespace sentrend;
using namespace std::chrono;
using fixtures::record_line;

namespace {

ParseResult parse(const std::string& text, InputFormat fmt = InputFormat::Auto) {
  std::istringstream in(text);
  return parse_records(in, fmt);
}

TweetRecord rec(const std::string& id, const std::string& ts, const std::string& country,
                Sentiment label, bool retweet = false) {
  return {id, *parse_rfc3339(ts), country, label, retweet, std::nullopt};
}

CountrySeries counts(const std::string& cc, std::vector<std::int64_t> pos, std::vector<std::int64_t> neg) {
  CountrySeries s;
  s.country = cc;
  s.pos_counts = std::move(pos);
  s.neg_counts = std::move(neg);
  return s;
}

}  // namespace

TEST_CASE("RFC 3339 timestamps") {
  const auto t = parse_rfc3339("2022-03-01T12:00:00Z");
  REQUIRE(t);
  CHECK(format_rfc3339(*t) == "2022-03-01T12:00:00Z");
  const auto offset = parse_rfc3339("2022-03-01T14:30:00.250+02:00");
  REQUIRE(offset);
  CHECK(*offset - *t == milliseconds(30 * 60 * 1000 + 250));
  CHECK(parse_rfc3339(format_rfc3339(*offset)) == offset);
  CHECK(parse_rfc3339("2022-03-01T12:00:00z") == t);
  CHECK(parse_rfc3339("2022-02-28T23:00:00-13:00") == parse_rfc3339("2022-03-01T12:00:00Z"));
  for (const char* bad : {"", "2022-03-01", "2022-13-01T00:00:00Z", "2022-02-30T00:00:00Z",
                          "2022-03-01T24:00:00Z", "2022-03-01T12:00:00",
                          "2022-03-01T12:00:00+0200", "2022-03-01T12:00:00Zjunk"})
    CHECK_FALSE(parse_rfc3339(bad));
  CHECK(parse_rfc3339("2024-02-29T00:00:00Z"));
  // the date/time separator may be a space
  CHECK(parse_rfc3339("2022-03-01 12:00:00Z") == t);
  CHECK(parse_date("2022-03-01") == sys_days{year{2022} / 3 / 1});
  CHECK_FALSE(parse_date("2022-3-1"));
  CHECK(format_date(sys_days{year{2022} / 3 / 1}) == "2022-03-01");
}

TEST_CASE("parse_records") {
  SUBCASE("one line") {
    const auto r = parse(record_line("1", "2022-03-02T08:00:00Z", "US", "positive", false));
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0].id == "1");
    CHECK(r.records[0].country == "US");
    CHECK(r.records[0].label == Sentiment::Positive);
    CHECK_FALSE(r.records[0].is_retweet);
    CHECK(r.malformed == 0);
  }
  SUBCASE("empty stream") {
    const auto r = parse("");
    CHECK(r.records.empty());
    CHECK(r.malformed == 0);
    CHECK(r.lines == 0);
  }
  SUBCASE("three valid lines and one missing its label") {
    std::string text;
    for (int i = 0; i < 3; ++i) text += record_line(std::to_string(i), "2022-03-02T08:00:00Z", "GB", "negative", false);
    text += R"({"id":"x","timestamp":"2022-03-02T08:00:00Z","country":"GB","is_retweet":false})" "\n";
    const auto r = parse(text);
    CHECK(r.records.size() == 3);
    CHECK(r.malformed == 1);
    CHECK(r.lines == 4);
    CHECK(r.warnings.size() == 1);
  }
  SUBCASE("mostly malformed input is a schema error") {
    std::string text = record_line("1", "2022-03-02T08:00:00Z", "US", "positive", false);
    text += "{\"id\": 2}\n{\"id\": 3}\n";
    CHECK_THROWS_AS(parse(text), SchemaError);
    // exactly half is tolerated
    CHECK(parse(record_line("1", "2022-03-02T08:00:00Z", "US", "positive", false) + "{}\n").malformed == 1);
  }
  SUBCASE("country normalization") {
    std::string text;
    text += R"({"id":"a","timestamp":"2022-03-02T08:00:00Z","country":null,"label":"neutral","is_retweet":false})" "\n";
    text += record_line("b", "2022-03-02T08:00:00Z", "", "neutral", false);
    text += record_line("c", "2022-03-02T08:00:00Z", "unknown", "neutral", false);
    text += record_line("d", "2022-03-02T08:00:00Z", "de", "neutral", false);
    text += record_line("e", "2022-03-02T08:00:00Z", "DEU", "neutral", false);
    const auto r = parse(text);
    REQUIRE(r.records.size() == 4);
    CHECK(r.records[0].country == kUnknownCountry);
    CHECK(r.records[1].country == kUnknownCountry);
    CHECK(r.records[2].country == kUnknownCountry);
    CHECK(r.records[3].country == "DE");
    CHECK(r.malformed == 1);
  }
  SUBCASE("duplicate ids keep the last occurrence") {
    std::string text;
    text += record_line("1", "2022-03-02T08:00:00Z", "US", "positive", false);
    text += record_line("2", "2022-03-02T08:00:00Z", "US", "positive", false);
    text += record_line("1", "2022-03-03T08:00:00Z", "FR", "negative", false);
    const auto r = parse(text);
    REQUIRE(r.records.size() == 2);
    CHECK(r.duplicate_ids == 1);
    CHECK(r.records[0].id == "2");
    CHECK(r.records[1].country == "FR");
  }
  SUBCASE("optional text and integer ids") {
    const auto r = parse(R"({"id":7,"timestamp":"2022-03-02T08:00:00Z","country":"US","label":"positive","is_retweet":true,"text":"hi"})");
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0].id == "7");
    CHECK(r.records[0].text == "hi");
    CHECK(r.records[0].is_retweet);
  }
  SUBCASE("CSV with header") {
    const std::string text =
        "id,timestamp,country,label,is_retweet,text\n"
        "1,2022-03-02T08:00:00Z,US,positive,false,\"hello, \"\"world\"\"\"\n"
        "2,2022-03-02T09:00:00Z,,negative,true,\n"
        "3,not-a-time,US,negative,false,\n";
    const auto r = parse(text);
    REQUIRE(r.records.size() == 2);
    CHECK(r.records[0].text == "hello, \"world\"");
    CHECK(r.records[1].country == kUnknownCountry);
    CHECK(r.records[1].is_retweet);
    CHECK(r.malformed == 1);
    CHECK_THROWS_AS(parse("id,timestamp,label\n1,2,3\n"), SchemaError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(parse_records_file("/nonexistent/records.jsonl"), IoError);
  }
}

TEST_CASE("split_csv_line") {
  CHECK(split_csv_line("a,b,,c") == std::vector<std::string>{"a", "b", "", "c"});
  CHECK(split_csv_line("\"x,y\",z") == std::vector<std::string>{"x,y", "z"});
  CHECK(split_csv_line("") == std::vector<std::string>{""});
}

TEST_CASE("filter_records") {
  const auto us = rec("1", "2022-03-02T00:00:00Z", "US", Sentiment::Positive);
  const auto unknown = rec("2", "2022-03-02T00:00:00Z", std::string(kUnknownCountry), Sentiment::Positive);
  const auto rt = rec("3", "2022-03-02T00:00:00Z", "US", Sentiment::Negative, true);

  const auto out = filter_records_counted({us, unknown, rt});
  REQUIRE(out.kept.size() == 1);
  CHECK(out.kept[0].id == "1");
  CHECK(out.unknown_location == 1);
  CHECK(out.retweets == 1);

  const std::vector<TweetRecord> valid{us, rec("4", "2022-03-05T00:00:00Z", "GB", Sentiment::Neutral)};
  const auto same = filter_records(valid);
  REQUIRE(same.size() == 2);
  CHECK(same[0].id == "1");
  CHECK(same[1].id == "4");
  CHECK(filter_records({rt, rt}).empty());
  // idempotent
  CHECK(filter_records(filter_records({us, unknown, rt})).size() == 1);
}

TEST_CASE("aggregate_weekly") {
  const AggregationWindow w;
  SUBCASE("calendar example") {
    const auto r = aggregate_weekly({rec("1", "2022-03-01T00:00:00Z", "US", Sentiment::Positive),
                                     rec("2", "2022-03-08T00:00:00Z", "US", Sentiment::Negative),
                                     rec("3", "2022-03-31T00:00:00Z", "US", Sentiment::Positive)},
                                    w);
    REQUIRE(r.series.size() == 1);
    CHECK(r.series[0].pos_counts == std::vector<std::int64_t>{1, 0, 0, 0});
    CHECK(r.series[0].neg_counts == std::vector<std::int64_t>{0, 1, 0, 0});
    CHECK(r.out_of_window == 1);
  }
  SUBCASE("window edges") {
    const auto r = aggregate_weekly({rec("1", "2022-03-07T23:59:59.999Z", "US", Sentiment::Positive),
                                     rec("2", "2022-03-28T23:59:59.999Z", "US", Sentiment::Positive),
                                     rec("3", "2022-03-29T00:00:00Z", "US", Sentiment::Positive),
                                     rec("4", "2022-02-28T23:59:59Z", "US", Sentiment::Positive)},
                                    w);
    CHECK(r.series[0].pos_counts == std::vector<std::int64_t>{1, 0, 0, 1});
    CHECK(r.out_of_window == 2);
  }
  SUBCASE("empty") {
    const auto r = aggregate_weekly({}, w);
    CHECK(r.series.empty());
    CHECK(r.out_of_window == 0);
  }
  SUBCASE("neutral only") {
    const auto r = aggregate_weekly({rec("1", "2022-03-02T00:00:00Z", "US", Sentiment::Neutral)}, w);
    REQUIRE(r.series.size() == 1);
    CHECK(r.series[0].pos_counts == std::vector<std::int64_t>{0, 0, 0, 0});
    CHECK(r.series[0].neg_counts == std::vector<std::int64_t>{0, 0, 0, 0});
    CHECK(r.neutral == 1);
  }
  SUBCASE("custom window") {
    AggregationWindow w2;
    w2.start = sys_days{year{2022} / 4 / 1};
    w2.week_count = 2;
    w2.week_length_days = 3;
    const auto r = aggregate_weekly({rec("1", "2022-04-04T00:00:00Z", "FR", Sentiment::Negative)}, w2);
    CHECK(r.series[0].neg_counts == std::vector<std::int64_t>{0, 1});
    w2.week_count = 0;
    CHECK_THROWS_AS(w2.validate(), ContractViolation);
  }
  SUBCASE("counts are conserved and independent of record order") {
    auto parsed = parse(fixtures::make_study_corpus(3).jsonl);
    auto kept = filter_records(parsed.records);
    const auto base = aggregate_weekly(kept, w);
    std::int64_t total = 0;
    for (const auto& s : base.series) total += s.total();
    // every kept record is counted exactly once somewhere
    CHECK(total + static_cast<std::int64_t>(base.neutral + base.out_of_window) ==
          static_cast<std::int64_t>(kept.size()));
    CHECK(base.out_of_window > 0);

    std::mt19937_64 rng(6);
    std::shuffle(kept.begin(), kept.end(), rng);
    const auto shuffled = aggregate_weekly(kept, w);
    REQUIRE(shuffled.series.size() == base.series.size());
    for (std::size_t i = 0; i < base.series.size(); ++i) {
      CHECK(shuffled.series[i].country == base.series[i].country);
      CHECK(shuffled.series[i].pos_counts == base.series[i].pos_counts);
      CHECK(shuffled.series[i].neg_counts == base.series[i].neg_counts);
    }
    CHECK(shuffled.out_of_window == base.out_of_window);
  }
}

TEST_CASE("normalize") {
  SUBCASE("relative frequency") {
    const auto s = normalize(counts("US", {10, 20, 30, 40}, {0, 0, 0, 0}), Normalization::RelativeFrequency);
    CHECK(s.features == Vector{0.1, 0.2, 0.3, 0.4, 0, 0, 0, 0});
    const auto even = normalize(counts("US", {1, 1, 1, 1}, {1, 1, 1, 1}), Normalization::RelativeFrequency);
    CHECK(even.features == Vector(8, 0.125));
    const auto zero = normalize(counts("US", {0, 0, 0, 0}, {0, 0, 0, 0}), Normalization::RelativeFrequency);
    CHECK(zero.features == Vector(8, 0.0));
  }
  SUBCASE("min-max") {
    const auto s = normalize(counts("US", {1, 2, 3, 5}, {7, 7, 7, 7}), Normalization::MinMax);
    CHECK(s.features == Vector{0, 0.25, 0.5, 1, 0, 0, 0, 0});
  }
  SUBCASE("features are bounded and relative frequencies sum to one") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> d(0, 50);
    for (int trial = 0; trial < 100; ++trial) {
      CountrySeries s = counts("XX", {d(rng), d(rng), d(rng), d(rng)}, {d(rng), d(rng), d(rng), d(rng)});
      for (auto mode : {Normalization::RelativeFrequency, Normalization::MinMax}) {
        const auto n = normalize(s, mode);
        REQUIRE(n.features.size() == 8);
        for (double v : n.features) {
          CHECK(v >= 0.0);
          CHECK(v <= 1.0);
        }
        if (mode == Normalization::RelativeFrequency && s.total() > 0) {
          double sum = 0.0;
          for (double v : n.features) sum += v;
          CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
      }
    }
  }
  CHECK(parse_normalization("minmax") == Normalization::MinMax);
  CHECK(to_string(Normalization::RelativeFrequency) == "relfreq");
  CHECK_THROWS_AS(parse_normalization("zscore"), ContractViolation);
}

TEST_CASE("min_tweet_filter") {
  std::vector<CountrySeries> s{counts("US", {25, 25, 25, 0}, {25, 0, 0, 0}), counts("XX", {1, 1, 1, 0}, {0, 0, 0, 0})};
  const auto kept = min_tweet_filter(s, 10);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].country == "US");
  CHECK(min_tweet_filter(s, 0).size() == 2);
  CHECK(min_tweet_filter(s, 100).size() == 1);
  CHECK(min_tweet_filter(s, 101).empty());

  const auto corpus = fixtures::make_study_corpus(6);
  const auto agg = aggregate_weekly(filter_records(parse(corpus.jsonl).records), AggregationWindow{});
  CHECK(agg.series.size() == 40);
  const auto survivors = min_tweet_filter(agg.series, 50);
  REQUIRE(survivors.size() == 34);
  std::vector<std::string> names;
  for (const auto& c : survivors) names.push_back(c.country);
  auto expected = fixtures::kStudyCountries;
  std::sort(expected.begin(), expected.end());
  CHECK(names == expected);
}

TEST_CASE("series CSV round trip") {
  std::vector<CountrySeries> s{counts("DE", {1, 2, 3, 4}, {5, 6, 7, 8}), counts("US", {0, 0, 9, 0}, {1, 0, 0, 0})};
  std::stringstream buf;
  write_series_csv(buf, s);
  CHECK(buf.str().rfind("country,week,pos,neg\nDE,1,1,5\n", 0) == 0);
  const auto back = read_series_csv(buf);
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].country == s[i].country);
    CHECK(back[i].pos_counts == s[i].pos_counts);
    CHECK(back[i].neg_counts == s[i].neg_counts);
  }
  std::istringstream bad("country,week,pos,neg\nDE,1,x,5\n");
  CHECK_THROWS_AS(read_series_csv(bad), SchemaError);
}
