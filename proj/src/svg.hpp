#pragma once

#include <string>

#include "sentrend/cluster.hpp"
#include "sentrend/ingest.hpp"

namespace sentrend::svg {

// Grouped weekly bars (positive, negative) for one country. Each bar carries
// data-kind/data-week/data-count attributes so tests can compare structure.
std::string frequency_chart(const CountrySeries& series);

// Dendrogram with leaves on the x axis and merge distance on the y axis,
// leaves colored by their flat cluster.
std::string dendrogram(const Dendrogram& tree, const ClusterAssignment& assignment);

}  // namespace sentrend::svg
