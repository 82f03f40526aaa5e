#ifndef COALGAME_THEORY_HPP
#define COALGAME_THEORY_HPP

// Regime predicates for the closed-form stability results, computational
// verification of those results against the brute-force engine, and the
// blocking graph whose cycles expose restless coalition dynamics.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "coalgame/core_model.hpp"
#include "coalgame/enumeration.hpp"
#include "coalgame/equilibrium.hpp"
#include "coalgame/stability.hpp"

namespace coalgame {

/// Which closed-form regimes an instance falls in. Link ranks are 1-based
/// here to match the usual mu_1 >= mu_2 >= ... naming.
struct RegimeReport {
  /// mu_1(2) < mu_N together with link-wise monotonicity at every congestion.
  bool severe = false;
  /// mu_N < mu_1/2 < mu_bar - mu_N: the grand coalition is never stable.
  bool gc_unstable_band = false;
  /// Smallest k in [2, N] with mu_1/2 > mu_k.
  std::optional<std::size_t> major_link_k;
  /// Largest k in [1, N-1] with mu_k/2 > mu_N.
  std::optional<std::size_t> weak_tail_k;
  /// mu_1/2 < mu_bar - mu_N and mu_{N-1}/2 > mu_N.
  bool limited_resources = false;
  /// Mean of the top N solo rewards.
  double mu_bar = 0.0;
  /// mu_1 < 6 mu_{N-1}.
  bool bully_ne = false;
};

inline RegimeReport classify_regime(const RewardModel& model, std::size_t n,
                                    double eps = kDefaultEpsilon) {
  RegimeReport r;
  const auto mu = model.solo_rewards();
  // every predicate speaks about the top N links
  if (n < 2 || mu.size() < n || model.max_congestion() < 2) return r;

  const auto m = [&](std::size_t rank) { return mu[rank - 1]; };
  const double half_top = model.reward(0, 2);
  const double mu_n = m(n);
  for (std::size_t i = 1; i <= n; ++i) r.mu_bar += m(i);
  r.mu_bar /= static_cast<double>(n);

  r.severe = half_top < mu_n - eps && model.linkwise_monotone();

  // the remaining predicates belong to the equi-divisible setting
  const double top_half = m(1) / 2.0;
  r.gc_unstable_band = mu_n < top_half - eps && top_half < r.mu_bar - mu_n - eps;
  for (std::size_t k = 2; k <= n; ++k)
    if (top_half > m(k) + eps) {
      r.major_link_k = k;
      break;
    }
  for (std::size_t k = n - 1; k >= 1; --k)
    if (m(k) / 2.0 > mu_n + eps) {
      r.weak_tail_k = k;
      break;
    }
  r.limited_resources =
      top_half < r.mu_bar - mu_n - eps && m(n - 1) / 2.0 > mu_n + eps;
  r.bully_ne = m(1) < 6.0 * m(n - 1) - eps;
  return r;
}

enum class VerdictStatus { confirmed, not_applicable, counterexample_found };

inline const char* to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::confirmed: return "confirmed";
    case VerdictStatus::not_applicable: return "not_applicable";
    case VerdictStatus::counterexample_found: return "counterexample_found";
  }
  return "?";
}

struct Verdict {
  VerdictStatus status = VerdictStatus::not_applicable;
  std::size_t checks = 0;
  std::vector<std::string> notes;
  std::vector<std::string> counterexamples;

  void fail(std::string what) {
    counterexamples.push_back(std::move(what));
    status = VerdictStatus::counterexample_found;
  }
  void finish() {
    if (status != VerdictStatus::counterexample_found)
      status = checks > 0 ? VerdictStatus::confirmed : VerdictStatus::not_applicable;
  }
};

/// Canonical profiles of p in which the top n links are each used exactly once.
inline std::set<StrategyProfile> permutation_class(const Partition& p) {
  const std::size_t n = p.player_count();
  std::vector<LinkIndex> links(n);
  for (std::size_t i = 0; i < n; ++i) links[i] = i;
  std::set<StrategyProfile> out;
  do {
    out.insert(canonical(p, StrategyProfile{links}));
  } while (std::next_permutation(links.begin(), links.end()));
  return out;
}

/// Under severe congestion: the equilibria of every partition are exactly the
/// permutations of the top N links, and every pair is stable at beta = 0.
inline Verdict verify_theorem3(const RewardModel& model, const StabilityAnalysis& analysis,
                               double eps = kDefaultEpsilon) {
  Verdict v;
  const std::size_t n = analysis.cache.players;
  if (!classify_regime(model, n, eps).severe) {
    v.notes.push_back("instance is not severely congested");
    return v;
  }
  for (const auto& pe : analysis.cache.partitions) {
    ++v.checks;
    std::set<StrategyProfile> found;
    for (const auto& ne : pe.equilibria) found.insert(ne.profile);
    if (found != permutation_class(pe.partition))
      v.fail(pe.partition.label() + ": equilibrium set differs from the permutation class");

    const auto& ps = analysis.at(pe.partition);
    for (const auto& pair : ps.pairs)
      if (!pair.stable_at(0.0))
        v.fail(pe.partition.label() + " " + profile_label(pe.partition, pair.profile) +
               ": pair not stable at beta=0");
    if (!ps.stable_at(0.0)) v.fail(pe.partition.label() + ": not stable at beta=0");
  }
  v.finish();
  return v;
}

inline Verdict verify_theorem3(const RewardModel& model, std::size_t n,
                               double eps = kDefaultEpsilon) {
  return verify_theorem3(model, analyze_stability(model, n, eps), eps);
}

namespace detail {

/// Does the grand-coalition merger block this pair at beta = 0?
inline bool merger_blocks(const Partition& p, const NashEquilibrium& ne,
                          const PessimalTable& table, double eps) {
  QVector all{std::vector<std::size_t>(p.sizes().begin(), p.sizes().end())};
  return blocks(p, fair_payoff_at(p, ne, 0.0), all, 0.0, table, eps);
}

}  // namespace detail

/// Equi-divisible results: the grand coalition is never stable inside the
/// mu_N < mu_1/2 < mu_bar - mu_N band, and a dominant top link (or a weak
/// tail link) lets the grand coalition block every partition with many
/// coalitions at beta = 0.
inline Verdict verify_theorem4(const RewardModel& model, const StabilityAnalysis& analysis,
                               double eps = kDefaultEpsilon) {
  Verdict v;
  if (model.mode() != CongestionMode::equi_divisible) {
    v.notes.push_back("requires equi-divisible congestion");
    return v;
  }
  const std::size_t n = analysis.cache.players;
  const auto regime = classify_regime(model, n, eps);
  const Partition gc = Partition::grand(n);

  if (regime.gc_unstable_band) {
    ++v.checks;
    if (!analysis.at(gc).never_stable())
      v.fail("grand coalition has a nonempty stability set inside the unstable band");
  }

  const auto check_blocked_by_gc = [&](std::size_t min_coalitions, const char* clause) {
    for (const auto& pe : analysis.cache.partitions) {
      if (pe.partition.coalition_count() < min_coalitions || !pe.has_pure_ne()) continue;
      ++v.checks;
      for (const auto& ne : pe.equilibria)
        if (!detail::merger_blocks(pe.partition, ne, analysis.table, eps))
          v.fail(std::string(clause) + ": " + pe.partition.label() + " " +
                 profile_label(pe.partition, ne.profile) +
                 " not blocked by the grand coalition at beta=0");
      if (analysis.at(pe.partition).stable_at(0.0))
        v.fail(std::string(clause) + ": " + pe.partition.label() + " stable at beta=0");
    }
  };
  if (regime.major_link_k) check_blocked_by_gc(*regime.major_link_k, "major link");
  if (regime.weak_tail_k) check_blocked_by_gc(n - *regime.weak_tail_k + 1, "weak tail");

  if (v.checks == 0) v.notes.push_back("no hypothesis holds; nothing to check");
  v.finish();
  return v;
}

inline Verdict verify_theorem4(const RewardModel& model, std::size_t n,
                               double eps = kDefaultEpsilon) {
  return verify_theorem4(model, analyze_stability(model, n, eps), eps);
}

/// The "bully" equilibrium of the (N-1, 1) partition, in which the lone
/// player shares the top link with the big coalition.
struct BullyCheck {
  bool applicable = false;
  /// mu_1 < 6 mu_{N-1}, the sufficient condition.
  bool hypothesis = false;
  bool is_ne = false;
  Partition partition;
  StrategyProfile witness;
};

inline BullyCheck bully_ne_check(const RewardModel& model, std::size_t n,
                                 double eps = kDefaultEpsilon) {
  BullyCheck out;
  if (model.mode() != CongestionMode::equi_divisible || n < 2 ||
      model.link_count() < n - 1)
    return out;
  out.applicable = true;
  out.partition = Partition({n - 1, 1});
  for (std::size_t i = 0; i + 1 < n; ++i) out.witness.links.push_back(i);
  out.witness.links.push_back(0);
  const auto mu = model.solo_rewards();
  out.hypothesis = mu[0] < 6.0 * mu[n - 2] - eps;
  out.is_ne = is_nash(model, out.partition, out.witness, eps);
  return out;
}

/// Directed graph over (partition, equilibrium) pairs: an edge means a
/// coalition blocks the source pair at the given beta, leading to a pair of
/// the successor partition. The deviators form the new coalition and each
/// coalition they leave keeps its remaining members together.
struct BlockingGraph {
  struct Node {
    Partition partition;
    StrategyProfile profile;
    std::string label() const {
      return partition.label() + profile_label(partition, profile);
    }
  };
  struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    QVector q;
  };

  double beta = 0.0;
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::vector<std::vector<std::size_t>> successors;

  std::optional<std::size_t> find(const Partition& p, const StrategyProfile& prof) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].partition == p && nodes[i].profile == prof) return i;
    return std::nullopt;
  }
  bool has_edge(std::size_t from, std::size_t to) const {
    const auto& s = successors[from];
    return std::find(s.begin(), s.end(), to) != s.end();
  }
};

/// Partition reached when the coalition described by q breaks away.
inline Partition successor_partition(const Partition& p, const QVector& q) {
  std::vector<std::size_t> sizes{q.coalition_size()};
  for (std::size_t i = 0; i < p.coalition_count(); ++i)
    if (p.size(i) > q.q[i]) sizes.push_back(p.size(i) - q.q[i]);
  return Partition(std::move(sizes));
}

inline BlockingGraph blocking_graph(const StabilityAnalysis& analysis, double beta,
                                    double eps = kDefaultEpsilon) {
  BlockingGraph g;
  g.beta = beta;
  std::vector<std::size_t> first_node;  // per cache partition
  for (const auto& pe : analysis.cache.partitions) {
    first_node.push_back(g.nodes.size());
    for (const auto& ne : pe.equilibria) g.nodes.push_back({pe.partition, ne.profile});
  }
  g.successors.resize(g.nodes.size());

  const auto& parts = analysis.cache.partitions;
  const auto index_of = [&](const Partition& p) {
    for (std::size_t i = 0; i < parts.size(); ++i)
      if (parts[i].partition == p) return i;
    throw std::out_of_range("successor partition missing from cache");
  };

  for (std::size_t pi = 0; pi < parts.size(); ++pi) {
    const auto& pe = parts[pi];
    for (std::size_t e = 0; e < pe.equilibria.size(); ++e) {
      const std::size_t from = first_node[pi] + e;
      const auto psi = fair_payoff_at(pe.partition, pe.equilibria[e], beta);
      for (const auto& q : enumerate_blocking_qvectors(pe.partition)) {
        if (!blocks(pe.partition, psi, q, beta, analysis.table, eps)) continue;
        const std::size_t si = index_of(successor_partition(pe.partition, q));
        for (std::size_t t = 0; t < parts[si].equilibria.size(); ++t) {
          const std::size_t to = first_node[si] + t;
          if (g.has_edge(from, to)) continue;
          g.edges.push_back({from, to, q});
          g.successors[from].push_back(to);
        }
      }
    }
  }
  return g;
}

inline BlockingGraph blocking_graph(const RewardModel& model, std::size_t n, double beta,
                                    double eps = kDefaultEpsilon) {
  return blocking_graph(analyze_stability(model, n, eps), beta, eps);
}

/// Strongly connected components (Tarjan), each as a sorted node list.
inline std::vector<std::vector<std::size_t>> strongly_connected_components(
    const std::vector<std::vector<std::size_t>>& succ) {
  const std::size_t n = succ.size();
  std::vector<std::size_t> index(n, SIZE_MAX), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> out;
  std::size_t counter = 0;

  // iterative to keep deep graphs off the call stack
  struct Frame {
    std::size_t v;
    std::size_t next;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != SIZE_MAX) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& f = frames.back();
      if (f.next < succ[f.v].size()) {
        const std::size_t w = succ[f.v][f.next++];
        if (index[w] == SIZE_MAX) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const std::size_t v = f.v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
      if (low[v] == index[v]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// One shortest cycle per cyclic strongly connected component, starting at
/// the component's smallest node. Self-loops count as cycles of length one.
inline std::vector<std::vector<std::size_t>> detect_cycles(const BlockingGraph& g) {
  std::vector<std::vector<std::size_t>> cycles;
  for (const auto& comp : strongly_connected_components(g.successors)) {
    const std::size_t start = comp.front();
    if (comp.size() == 1 && !g.has_edge(start, start)) continue;
    if (g.has_edge(start, start)) {
      cycles.push_back({start});
      continue;
    }
    const std::set<std::size_t> members(comp.begin(), comp.end());
    std::vector<std::size_t> parent(g.nodes.size(), SIZE_MAX);
    std::queue<std::size_t> frontier;
    frontier.push(start);
    std::optional<std::size_t> closing;
    while (!frontier.empty() && !closing) {
      const std::size_t v = frontier.front();
      frontier.pop();
      for (std::size_t w : g.successors[v]) {
        if (!members.count(w)) continue;
        if (w == start) {
          closing = v;
          break;
        }
        if (parent[w] == SIZE_MAX) {
          parent[w] = v;
          frontier.push(w);
        }
      }
    }
    std::vector<std::size_t> cycle;
    for (std::size_t v = *closing; v != start; v = parent[v]) cycle.push_back(v);
    cycle.push_back(start);
    std::reverse(cycle.begin(), cycle.end());
    cycles.push_back(std::move(cycle));
  }
  return cycles;
}

}  // namespace coalgame

#endif  // COALGAME_THEORY_HPP
