// SPDX-License-Identifier: Apache-2.0
//
// Near-duplicate graphs over interface embeddings: component analysis,
// greedy deduplication and train/validation/test leakage auditing.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppiref/idist.hpp"

namespace ppiref {

struct GraphEdge {
  std::uint32_t a = 0;
  std::uint32_t b = 0;  // a < b
  double distance = 0.0;

  bool operator==(const GraphEdge&) const = default;
};

/// Undirected graph on interface ids; no self loops, edges sorted by (a, b).
class NearDuplicateGraph {
 public:
  NearDuplicateGraph() = default;
  /// Validates edges (in range, no self loops) and normalizes a < b.
  NearDuplicateGraph(std::vector<std::string> nodes, std::vector<GraphEdge> edges);

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  std::size_t size() const { return nodes_.size(); }

  /// Neighbor lists sorted ascending.
  const std::vector<std::vector<std::uint32_t>>& adjacency() const { return adjacency_; }
  std::optional<std::uint32_t> index_of(const std::string& id) const;

 private:
  std::vector<std::string> nodes_;
  std::vector<GraphEdge> edges_;
  std::vector<std::vector<std::uint32_t>> adjacency_;
  std::map<std::string, std::uint32_t> index_;
};

NearDuplicateGraph build_graph(std::span<const InterfaceEmbedding> embeddings, const IDistConfig& config,
                               NeighborMode mode = NeighborMode::Auto, unsigned workers = 1);

struct ComponentSummary {
  /// Node indices per component; members ascending, components ordered by
  /// size (largest first) then by smallest member.
  std::vector<std::vector<std::uint32_t>> components;
  std::vector<std::uint32_t> component_of;  // per node
  std::size_t largest = 0;
  double largest_fraction = 0.0;

  std::size_t count() const { return components.size(); }
};

ComponentSummary connected_components(const NearDuplicateGraph& graph);

enum class DedupOrder { Lexicographic, MaxDegreeFirst };

/// Node visiting order: lexicographic by id, or by descending degree with
/// ties broken lexicographically.
std::vector<std::uint32_t> dedup_order(const NearDuplicateGraph& graph, DedupOrder order);

/// Greedy maximal independent set: visit nodes in `order`, keep a node that
/// has not been removed and remove its neighbors. `order` must be a
/// permutation of the node indices. Returns retained ids sorted.
std::vector<std::string> greedy_dedup(const NearDuplicateGraph& graph, std::span<const std::uint32_t> order);
std::vector<std::string> greedy_dedup(const NearDuplicateGraph& graph, DedupOrder order = DedupOrder::Lexicographic);

/// Pairs of retained embeddings closer than `threshold`, checked directly
/// on the vectors rather than through a graph. Empty for a valid dedup.
std::vector<std::pair<std::string, std::string>> find_retained_duplicates(
    std::span<const InterfaceEmbedding> embeddings, const std::vector<std::string>& retained, double threshold);

/// Interface id -> fold label.
using SplitAssignment = std::map<std::string, std::string>;

/// Folds whose label starts with "test" are audited; every other fold is a
/// reference (training or validation) fold.
bool is_test_fold(const std::string& label);

struct LeakageWitness {
  std::string test_id;
  std::string reference_id;  // closest neighbor in a reference fold
  std::string reference_fold;
  double distance = 0.0;
};

struct LeakageReport {
  struct Fold {
    std::string label;
    std::size_t size = 0;
    std::size_t leaking = 0;
    double ratio = 0.0;
  };
  std::vector<Fold> test_folds;  // by label
  std::size_t test_size = 0;
  std::size_t leaking = 0;
  double ratio = 0.0;  // over all test folds
  std::vector<LeakageWitness> witnesses;  // one per leaking test item, by id
};

/// Error(UnassignedNode) when a graph node has no fold.
LeakageReport audit_split(const NearDuplicateGraph& graph, const SplitAssignment& split);

struct FoldFraction {
  std::string label;
  double fraction = 0.0;
};

struct SafeSplit {
  SplitAssignment assignment;
  /// Folds with a positive fraction that received no node.
  std::vector<std::string> empty_folds;
};

/// Assigns whole connected components to folds, largest first, each to the
/// fold furthest below its target size. With `labels` (e.g. ddG values per
/// id) a balance term keeps fold label means close to the global mean.
/// Fractions must be non-negative and sum to 1.
SafeSplit component_safe_split(const NearDuplicateGraph& graph, std::span<const FoldFraction> folds,
                               const std::map<std::string, double>* labels = nullptr,
                               double label_weight = 1.0);

}  // namespace ppiref
