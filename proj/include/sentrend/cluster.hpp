#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sentrend/matrix.hpp"

namespace sentrend {

struct DistanceMatrix {
  std::vector<std::string> labels;  // sorted
  Matrix d;
};

// Euclidean distances between the vectors; labels come out in
// lexicographic order.
DistanceMatrix pairwise_distances(const std::map<std::string, Vector>& vectors);

enum class Linkage { Average, Single, Complete };

std::string_view to_string(Linkage linkage);
Linkage parse_linkage(std::string_view text);

// One agglomeration step. Leaves are ids 0..n-1; the cluster created by
// merge m gets id n + m.
struct Merge {
  std::size_t a;
  std::size_t b;
  double distance;
  std::size_t size;  // leaves in the merged cluster
};

struct Dendrogram {
  std::vector<std::string> leaf_labels;
  std::vector<Merge> merges;  // exactly n - 1
};

// Greedy agglomeration: at each step merge the two clusters with the
// smallest linkage value. Average linkage is the mean of all leaf-to-leaf
// distances across the pair. Ties go to the pair whose smallest member
// labels are lexicographically smallest. Merge distances are not assumed
// monotone.
Dendrogram agglomerate(const DistanceMatrix& dist, Linkage linkage);

struct ClusterAssignment {
  std::size_t k = 0;
  std::vector<std::string> labels;
  std::vector<int> cluster;  // 1..k, parallel to labels

  std::map<std::string, int> as_map() const;
};

// Undoes the last k - 1 merges. Cluster ids are given in order of each
// cluster's smallest member label.
ClusterAssignment cut(const Dendrogram& dendrogram, std::size_t k);

// Chance-corrected agreement between two labelings of the same items.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace sentrend
