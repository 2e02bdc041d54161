#include "sentrend/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sentrend/error.hpp"

namespace sentrend {

DistanceMatrix pairwise_distances(const std::map<std::string, Vector>& vectors) {
  DistanceMatrix out;
  std::vector<const Vector*> rows;
  for (const auto& [label, v] : vectors) {
    if (!rows.empty() && v.size() != rows.front()->size())
      throw ContractViolation("vector for '" + label + "' has a different length");
    if (v.empty()) throw ContractViolation("vectors must be nonempty");
    out.labels.push_back(label);
    rows.push_back(&v);
  }
  const std::size_t n = rows.size();
  out.d = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double sq = 0.0;
      for (std::size_t k = 0; k < rows[i]->size(); ++k) {
        const double diff = (*rows[i])[k] - (*rows[j])[k];
        sq += diff * diff;
      }
      out.d(i, j) = out.d(j, i) = std::sqrt(sq);
    }
  return out;
}

std::string_view to_string(Linkage linkage) {
  switch (linkage) {
    case Linkage::Average: return "average";
    case Linkage::Single: return "single";
    case Linkage::Complete: return "complete";
  }
  return "average";
}

Linkage parse_linkage(std::string_view text) {
  if (text == "average") return Linkage::Average;
  if (text == "single") return Linkage::Single;
  if (text == "complete") return Linkage::Complete;
  throw ContractViolation("unknown linkage '" + std::string(text) + "'");
}

Dendrogram agglomerate(const DistanceMatrix& dist, Linkage linkage) {
  const std::size_t n = dist.labels.size();
  if (n < 2) throw ContractViolation("agglomeration needs at least two items");

  Dendrogram out;
  out.leaf_labels = dist.labels;

  struct Cluster {
    std::size_t id;
    std::vector<std::size_t> members;
    std::size_t min_leaf;  // labels are sorted, so this is the smallest label
  };
  std::vector<Cluster> active;
  for (std::size_t i = 0; i < n; ++i) active.push_back({i, {i}, i});

  // Linkage between active clusters, kept as the raw aggregate (sum for
  // average linkage) and refreshed by Lance-Williams style updates.
  Matrix link(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) link(i, j) = dist.d(i, j);

  auto value = [&](std::size_t i, std::size_t j) {
    if (linkage != Linkage::Average) return link(i, j);
    return link(i, j) / static_cast<double>(active[i].members.size() * active[j].members.size());
  };

  while (active.size() > 1) {
    std::size_t bi = 0, bj = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < active.size(); ++i)
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        const double v = value(i, j);
        auto key = [&](std::size_t x, std::size_t y) {
          const auto lo = std::min(active[x].min_leaf, active[y].min_leaf);
          const auto hi = std::max(active[x].min_leaf, active[y].min_leaf);
          return std::pair{lo, hi};
        };
        if (v < best || (v == best && key(i, j) < key(bi, bj))) {
          best = v;
          bi = i;
          bj = j;
        }
      }

    Cluster& a = active[bi];
    Cluster& b = active[bj];
    const std::size_t new_id = n + out.merges.size();
    // smaller-min-label cluster listed first
    if (a.min_leaf < b.min_leaf) out.merges.push_back({a.id, b.id, best, 0});
    else out.merges.push_back({b.id, a.id, best, 0});
    out.merges.back().size = a.members.size() + b.members.size();

    for (std::size_t k = 0; k < active.size(); ++k) {
      if (k == bi || k == bj) continue;
      double merged = 0.0;
      switch (linkage) {
        case Linkage::Average: merged = link(bi, k) + link(bj, k); break;
        case Linkage::Single: merged = std::min(link(bi, k), link(bj, k)); break;
        case Linkage::Complete: merged = std::max(link(bi, k), link(bj, k)); break;
      }
      link(bi, k) = link(k, bi) = merged;
    }
    a.members.insert(a.members.end(), b.members.begin(), b.members.end());
    a.min_leaf = std::min(a.min_leaf, b.min_leaf);
    a.id = new_id;

    // drop bj: swap the last active cluster into its slot, row and column
    const std::size_t last = active.size() - 1;
    if (bj != last) {
      active[bj] = std::move(active[last]);
      for (std::size_t k = 0; k < active.size(); ++k) {
        link(bj, k) = link(last, k);
        link(k, bj) = link(k, last);
      }
      link(bj, bj) = 0.0;
    }
    active.pop_back();
  }
  return out;
}

std::map<std::string, int> ClusterAssignment::as_map() const {
  std::map<std::string, int> m;
  for (std::size_t i = 0; i < labels.size(); ++i) m[labels[i]] = cluster[i];
  return m;
}

ClusterAssignment cut(const Dendrogram& dendrogram, std::size_t k) {
  const std::size_t n = dendrogram.leaf_labels.size();
  if (k < 1 || k > n)
    throw ContractViolation("cluster count " + std::to_string(k) + " outside 1.." +
                            std::to_string(n));

  // union-find over leaves and internal nodes
  std::vector<std::size_t> parent(n + dendrogram.merges.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t m = 0; m + (k - 1) < dendrogram.merges.size(); ++m) {
    const auto& mg = dendrogram.merges[m];
    parent[find(mg.a)] = n + m;
    parent[find(mg.b)] = n + m;
  }

  ClusterAssignment out;
  out.k = k;
  out.labels = dendrogram.leaf_labels;
  out.cluster.assign(n, 0);
  // Leaves are in sorted label order, so the first time a root is seen its
  // smallest member is being visited.
  std::map<std::size_t, int> ids;
  for (std::size_t i = 0; i < n; ++i) {
    const auto root = find(i);
    auto [it, inserted] = ids.try_emplace(root, static_cast<int>(ids.size()) + 1);
    out.cluster[i] = it->second;
  }
  return out;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw ContractViolation("labelings differ in length");
  const std::size_t n = a.size();
  if (n < 2) return 1.0;
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < n; ++i) {
    joint[{a[i], b[i]}] += 1;
    rows[a[i]] += 1;
    cols[b[i]] += 1;
  }
  auto pairs = [](double x) { return x * (x - 1) / 2; };
  double index = 0, sum_rows = 0, sum_cols = 0;
  for (const auto& [_, v] : joint) index += pairs(v);
  for (const auto& [_, v] : rows) sum_rows += pairs(v);
  for (const auto& [_, v] : cols) sum_cols += pairs(v);
  const double expected = sum_rows * sum_cols / pairs(static_cast<double>(n));
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace sentrend
