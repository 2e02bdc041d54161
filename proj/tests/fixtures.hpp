#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fixtures {

// The 34 countries of the published clustering figure, as ISO alpha-2 codes.
inline const std::vector<std::string> kStudyCountries = {
    "US", "DE", "TR", "CA", "IE", "IN", "FR", "AU", "UA", "ES", "GB", "IT",
    "NL", "JP", "AT", "AE", "AR", "DK", "BE", "BR", "CZ", "PL", "ID", "EE",
    "CH", "FI", "CN", "ZA", "PT", "PH", "MX", "RU", "SG", "SE"};

// Weekly relative frequencies (4 positive, then 4 negative) for three
// planted sentiment dynamics. Each pattern sums to 1.
inline const std::array<std::array<double, 8>, 3> kPlantedPatterns = {{
    {0.05, 0.08, 0.11, 0.14, 0.20, 0.17, 0.14, 0.11},  // positive share rising
    {0.14, 0.11, 0.08, 0.05, 0.11, 0.14, 0.17, 0.20},  // negative share rising
    {0.09, 0.09, 0.09, 0.09, 0.16, 0.16, 0.16, 0.16},  // flat
}};

struct SyntheticCorpus {
  std::string jsonl;
  std::map<std::string, int> planted_group;  // country -> 0..2
  std::size_t records = 0;
};

// Labeled records for the 34 study countries, country i in group i % 3, with
// volumes between 600 and 1600 labeled tweets and +-1 count jitter. Adds
// records the filters must drop (no location, retweets), neutral records and
// records after the four-week window starting 2022-03-01, plus
// `low_volume_countries` extra countries with fewer than 50 labeled tweets.
SyntheticCorpus make_study_corpus(int low_volume_countries = 0);

// Twelve labeled tweets in two countries, week counts known:
//   US pos [2,1,0,1] neg [1,0,1,0]; GB pos [0,1,0,0] neg [2,1,0,2].
std::string twelve_tweet_fixture();

std::string record_line(const std::string& id, const std::string& timestamp,
                        const std::string& country, const std::string& label, bool retweet);

}  // namespace fixtures
