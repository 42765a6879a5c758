// SPDX-License-Identifier: Apache-2.0
#include "ppiref/dedup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "ppiref/log.hpp"

namespace ppiref {

NearDuplicateGraph::NearDuplicateGraph(std::vector<std::string> nodes, std::vector<GraphEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  const auto n = static_cast<std::uint32_t>(nodes_.size());
  for (std::uint32_t k = 0; k < n; ++k)
    if (!index_.emplace(nodes_[k], k).second) fail(ErrorCode::InvalidArgument, "duplicate node id " + nodes_[k]);
  for (GraphEdge& e : edges_) {
    if (e.a >= n || e.b >= n) fail(ErrorCode::InvalidArgument, "edge references a missing node");
    if (e.a == e.b) fail(ErrorCode::InvalidArgument, "self loop on " + nodes_[e.a]);
    if (e.a > e.b) std::swap(e.a, e.b);
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const GraphEdge& x, const GraphEdge& y) { return x.a != y.a ? x.a < y.a : x.b < y.b; });
  edges_.erase(std::unique(edges_.begin(), edges_.end(),
                           [](const GraphEdge& x, const GraphEdge& y) { return x.a == y.a && x.b == y.b; }),
               edges_.end());
  adjacency_.assign(n, {});
  for (const GraphEdge& e : edges_) {
    adjacency_[e.a].push_back(e.b);
    adjacency_[e.b].push_back(e.a);
  }
  for (auto& list : adjacency_) std::sort(list.begin(), list.end());
}

std::optional<std::uint32_t> NearDuplicateGraph::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NearDuplicateGraph build_graph(std::span<const InterfaceEmbedding> embeddings, const IDistConfig& config,
                               NeighborMode mode, unsigned workers) {
  config.validate();
  std::vector<std::string> nodes;
  nodes.reserve(embeddings.size());
  for (const auto& e : embeddings) nodes.push_back(e.id);
  std::vector<GraphEdge> edges;
  for (const NeighborPair& p : pairwise_distances(embeddings, config.threshold, mode, workers))
    edges.push_back({p.i, p.j, p.distance});
  return NearDuplicateGraph(std::move(nodes), std::move(edges));
}

ComponentSummary connected_components(const NearDuplicateGraph& graph) {
  const std::size_t n = graph.size();
  ComponentSummary out;
  constexpr auto unseen = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> label(n, unseen);
  std::vector<std::vector<std::uint32_t>> comps;
  for (std::uint32_t s = 0; s < n; ++s) {
    if (label[s] != unseen) continue;
    const auto c = static_cast<std::uint32_t>(comps.size());
    comps.emplace_back();
    std::queue<std::uint32_t> frontier;
    frontier.push(s);
    label[s] = c;
    while (!frontier.empty()) {
      const std::uint32_t u = frontier.front();
      frontier.pop();
      comps[c].push_back(u);
      for (std::uint32_t v : graph.adjacency()[u])
        if (label[v] == unseen) {
          label[v] = c;
          frontier.push(v);
        }
    }
    std::sort(comps[c].begin(), comps[c].end());
  }
  // Components are discovered in order of their smallest member, so a
  // stable sort by size keeps that as the tie-break.
  std::stable_sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
  out.component_of.assign(n, 0);
  for (std::uint32_t c = 0; c < comps.size(); ++c)
    for (std::uint32_t v : comps[c]) out.component_of[v] = c;
  out.components = std::move(comps);
  out.largest = out.components.empty() ? 0 : out.components.front().size();
  out.largest_fraction = n == 0 ? 0.0 : static_cast<double>(out.largest) / static_cast<double>(n);
  return out;
}

std::vector<std::uint32_t> dedup_order(const NearDuplicateGraph& graph, DedupOrder order) {
  std::vector<std::uint32_t> idx(graph.size());
  std::iota(idx.begin(), idx.end(), std::uint32_t{0});
  const auto& nodes = graph.nodes();
  const auto& adj = graph.adjacency();
  if (order == DedupOrder::Lexicographic) {
    std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) { return nodes[a] < nodes[b]; });
  } else {
    std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (adj[a].size() != adj[b].size()) return adj[a].size() > adj[b].size();
      return nodes[a] < nodes[b];
    });
  }
  return idx;
}

std::vector<std::string> greedy_dedup(const NearDuplicateGraph& graph, std::span<const std::uint32_t> order) {
  const std::size_t n = graph.size();
  if (order.size() != n) fail(ErrorCode::InvalidArgument, "dedup order must list every node once");
  std::vector<char> seen(n, 0);
  for (std::uint32_t v : order) {
    if (v >= n || seen[v]) fail(ErrorCode::InvalidArgument, "dedup order is not a permutation of the nodes");
    seen[v] = 1;
  }
  std::vector<char> removed(n, 0);
  std::vector<std::string> retained;
  for (std::uint32_t v : order) {
    if (removed[v]) continue;
    retained.push_back(graph.nodes()[v]);
    for (std::uint32_t u : graph.adjacency()[v]) removed[u] = 1;
  }
  std::sort(retained.begin(), retained.end());
  return retained;
}

std::vector<std::string> greedy_dedup(const NearDuplicateGraph& graph, DedupOrder order) {
  const auto idx = dedup_order(graph, order);
  return greedy_dedup(graph, idx);
}

std::vector<std::pair<std::string, std::string>> find_retained_duplicates(
    std::span<const InterfaceEmbedding> embeddings, const std::vector<std::string>& retained, double threshold) {
  std::vector<const InterfaceEmbedding*> kept;
  for (const auto& e : embeddings)
    if (std::binary_search(retained.begin(), retained.end(), e.id)) kept.push_back(&e);
  std::vector<std::pair<std::string, std::string>> bad;
  for (std::size_t i = 0; i < kept.size(); ++i)
    for (std::size_t j = i + 1; j < kept.size(); ++j)
      if (idist(*kept[i], *kept[j]) < threshold) bad.emplace_back(kept[i]->id, kept[j]->id);
  return bad;
}

bool is_test_fold(const std::string& label) { return label.rfind("test", 0) == 0; }

LeakageReport audit_split(const NearDuplicateGraph& graph, const SplitAssignment& split) {
  const std::size_t n = graph.size();
  std::vector<const std::string*> fold(n, nullptr);
  for (std::size_t v = 0; v < n; ++v) {
    auto it = split.find(graph.nodes()[v]);
    if (it == split.end()) fail(ErrorCode::UnassignedNode, "node " + graph.nodes()[v] + " has no fold");
    fold[v] = &it->second;
  }

  std::vector<std::optional<LeakageWitness>> witness(n);
  auto consider = [&](std::uint32_t test, std::uint32_t ref, double d) {
    if (!is_test_fold(*fold[test]) || is_test_fold(*fold[ref])) return;
    auto& w = witness[test];
    const std::string& ref_id = graph.nodes()[ref];
    if (!w || d < w->distance || (d == w->distance && ref_id < w->reference_id))
      w = LeakageWitness{graph.nodes()[test], ref_id, *fold[ref], d};
  };
  for (const GraphEdge& e : graph.edges()) {
    consider(e.a, e.b, e.distance);
    consider(e.b, e.a, e.distance);
  }

  LeakageReport report;
  std::map<std::string, LeakageReport::Fold> folds;
  for (std::size_t v = 0; v < n; ++v) {
    if (!is_test_fold(*fold[v])) continue;
    auto& f = folds[*fold[v]];
    f.label = *fold[v];
    ++f.size;
    ++report.test_size;
    if (witness[v]) {
      ++f.leaking;
      ++report.leaking;
      report.witnesses.push_back(*witness[v]);
    }
  }
  for (auto& [label, f] : folds) {
    f.ratio = static_cast<double>(f.leaking) / static_cast<double>(f.size);
    report.test_folds.push_back(f);
  }
  report.ratio = report.test_size == 0 ? 0.0 : static_cast<double>(report.leaking) / static_cast<double>(report.test_size);
  std::sort(report.witnesses.begin(), report.witnesses.end(),
            [](const LeakageWitness& a, const LeakageWitness& b) { return a.test_id < b.test_id; });
  return report;
}

SafeSplit component_safe_split(const NearDuplicateGraph& graph, std::span<const FoldFraction> folds,
                               const std::map<std::string, double>* labels, double label_weight) {
  if (folds.empty()) fail(ErrorCode::InvalidArgument, "no folds given");
  double total = 0.0;
  for (const auto& f : folds) {
    if (!(f.fraction >= 0.0)) fail(ErrorCode::InvalidArgument, "fold fraction must be non-negative");
    total += f.fraction;
  }
  if (std::abs(total - 1.0) > 1e-9) fail(ErrorCode::InvalidArgument, "fold fractions must sum to 1");

  const double n = static_cast<double>(graph.size());
  const ComponentSummary cs = connected_components(graph);
  const auto& nodes = graph.nodes();

  struct Comp {
    const std::vector<std::uint32_t>* members;
    std::string first_id;
    double label_sum = 0.0;
    double label_count = 0.0;
  };
  std::vector<Comp> comps;
  double mu = 0.0, var = 0.0, labeled = 0.0;
  for (const auto& members : cs.components) {
    Comp c{&members, nodes[members.front()]};
    for (std::uint32_t v : members) {
      c.first_id = std::min(c.first_id, nodes[v]);
      if (labels) {
        auto it = labels->find(nodes[v]);
        if (it != labels->end()) {
          c.label_sum += it->second;
          c.label_count += 1.0;
          mu += it->second;
          var += it->second * it->second;
          labeled += 1.0;
        }
      }
    }
    comps.push_back(std::move(c));
  }
  std::stable_sort(comps.begin(), comps.end(), [](const Comp& a, const Comp& b) {
    if (a.members->size() != b.members->size()) return a.members->size() > b.members->size();
    return a.first_id < b.first_id;
  });
  const bool balance = labels != nullptr && labeled > 0.0 && label_weight > 0.0;
  if (balance) {
    mu /= labeled;
    var = std::max(var / labeled - mu * mu, 1e-12);
  }

  const std::size_t k = folds.size();
  std::vector<double> count(k, 0.0), lsum(k, 0.0), lcount(k, 0.0);
  auto objective = [&]() {
    double j = 0.0;
    for (std::size_t f = 0; f < k; ++f) {
      const double dev = (count[f] - folds[f].fraction * n) / n;
      j += dev * dev;
      if (balance && lcount[f] > 0.0) {
        const double m = lsum[f] / lcount[f] - mu;
        j += label_weight * (count[f] / n) * m * m / var;
      }
    }
    return j;
  };

  SafeSplit out;
  for (const Comp& c : comps) {
    const double s = static_cast<double>(c.members->size());
    std::size_t best = 0;
    double best_j = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < k; ++f) {
      count[f] += s;
      lsum[f] += c.label_sum;
      lcount[f] += c.label_count;
      const double j = objective();
      count[f] -= s;
      lsum[f] -= c.label_sum;
      lcount[f] -= c.label_count;
      if (j < best_j) {
        best_j = j;
        best = f;
      }
    }
    count[best] += s;
    lsum[best] += c.label_sum;
    lcount[best] += c.label_count;
    for (std::uint32_t v : *c.members) out.assignment[nodes[v]] = folds[best].label;
  }
  for (std::size_t f = 0; f < k; ++f) {
    if (folds[f].fraction > 0.0 && count[f] == 0.0) {
      out.empty_folds.push_back(folds[f].label);
      log_warning("fold '" + folds[f].label + "' received no nodes despite a positive fraction");
    }
  }
  return out;
}

}  // namespace ppiref
