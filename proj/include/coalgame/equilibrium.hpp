#ifndef COALGAME_EQUILIBRIUM_HPP
#define COALGAME_EQUILIBRIUM_HPP

// Best responses and pure Nash equilibria of the congestion game played
// among the coalitions of a partition.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "coalgame/core_model.hpp"
#include "coalgame/enumeration.hpp"

namespace coalgame {

/// Pure equilibrium of a partition's game, with each coalition's zero-cost
/// worth. Communication cost only shifts utilities by a constant, so the set
/// of equilibria is the same at every beta.
struct NashEquilibrium {
  StrategyProfile profile;
  std::vector<double> worth0;

  friend bool operator==(const NashEquilibrium& a, const NashEquilibrium& b) {
    return a.profile == b.profile;
  }
};

struct BestResponse {
  double value = 0.0;
  /// Every multiset attaining `value` within tolerance, in lexicographic order.
  std::vector<std::vector<LinkIndex>> strategies;
};

namespace detail {

inline double reward_against(const RewardModel& model,
                             std::span<const LinkIndex> own,
                             const CongestionVector& opponents) {
  CongestionVector total = opponents;
  for (LinkIndex a : own) ++total[a];
  return group_reward(model, own, total);
}

inline double best_value(const RewardModel& model,
                         std::span<const std::vector<LinkIndex>> choices,
                         const CongestionVector& opponents) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& c : choices)
    best = std::max(best, reward_against(model, c, opponents));
  return best;
}

}  // namespace detail

/// Best response of a coalition of `size` players to the opponents'
/// congestion, searched over all multisets of links.
inline BestResponse best_response(const RewardModel& model, std::size_t size,
                                  const CongestionVector& opponent_congestion,
                                  double eps = kDefaultEpsilon) {
  if (opponent_congestion.size() != model.link_count())
    throw std::invalid_argument("congestion vector has wrong length");
  const auto choices = enumerate_coalition_strategies(size, model.link_count());
  std::vector<double> values;
  values.reserve(choices.size());
  for (const auto& c : choices)
    values.push_back(detail::reward_against(model, c, opponent_congestion));

  BestResponse br;
  br.value = *std::max_element(values.begin(), values.end());
  for (std::size_t i = 0; i < choices.size(); ++i)
    if (values[i] >= br.value - eps) br.strategies.push_back(choices[i]);
  return br;
}

/// Weak Nash test: no coalition gains more than eps by swapping its multiset.
inline bool is_nash(const RewardModel& model, const Partition& p,
                    const StrategyProfile& profile, double eps = kDefaultEpsilon) {
  validate_profile(model, p, profile);
  const auto total = congestion_vector(model, profile);
  for (std::size_t i = 0; i < p.coalition_count(); ++i) {
    const auto own = profile.coalition(p, i);
    CongestionVector opp = total;
    for (LinkIndex a : own) --opp[a];
    const double current = group_reward(model, own, total);
    if (best_response(model, p.size(i), opp, eps).value > current + eps)
      return false;
  }
  return true;
}

/// Raised when the grand coalition's optimization has several maximizers.
class NonUniqueOptimizer : public std::runtime_error {
 public:
  NonUniqueOptimizer(std::vector<StrategyProfile> optimizers, double worth0)
      : std::runtime_error("grand coalition optimizer is not unique (" +
                           std::to_string(optimizers.size()) + " maximizers)"),
        optimizers_(std::move(optimizers)),
        worth0_(worth0) {}

  const std::vector<StrategyProfile>& optimizers() const { return optimizers_; }
  double worth0() const { return worth0_; }

 private:
  std::vector<StrategyProfile> optimizers_;
  double worth0_;
};

struct GcSolution {
  StrategyProfile profile;
  double worth0 = 0.0;
};

/// All maximizers of the total reward over multisets of n links, with the
/// optimal value.
inline std::pair<std::vector<StrategyProfile>, double> gc_optimizers(
    const RewardModel& model, std::size_t n, double eps = kDefaultEpsilon) {
  const auto choices = enumerate_coalition_strategies(n, model.link_count());
  std::vector<double> values;
  values.reserve(choices.size());
  for (const auto& c : choices) {
    const auto total = congestion_vector(c, model.link_count());
    values.push_back(group_reward(model, c, total));
  }
  const double best = *std::max_element(values.begin(), values.end());
  std::vector<StrategyProfile> argmax;
  for (std::size_t i = 0; i < choices.size(); ++i)
    if (values[i] >= best - eps) argmax.push_back(StrategyProfile{choices[i]});
  return {std::move(argmax), best};
}

/// Unique optimizer of the grand coalition; throws NonUniqueOptimizer on ties.
inline GcSolution gc_optimizer(const RewardModel& model, std::size_t n,
                               double eps = kDefaultEpsilon) {
  auto [argmax, best] = gc_optimizers(model, n, eps);
  if (argmax.size() != 1) throw NonUniqueOptimizer(std::move(argmax), best);
  return GcSolution{std::move(argmax.front()), best};
}

/// Every canonical pure equilibrium of the partition's game, sorted by
/// profile. May be empty: the coalitions act as weighted players and a pure
/// equilibrium is not guaranteed.
inline std::vector<NashEquilibrium> enumerate_pure_ne(const RewardModel& model,
                                                      const Partition& p,
                                                      double eps = kDefaultEpsilon) {
  std::vector<NashEquilibrium> out;
  if (p.is_grand()) {
    // no game: the single coalition optimizes
    auto [argmax, best] = gc_optimizers(model, p.player_count(), eps);
    for (auto& prof : argmax) {
      auto w = zero_cost_worths(model, p, prof);
      out.push_back(NashEquilibrium{std::move(prof), std::move(w)});
    }
    return out;
  }

  const JointProfiles profiles(p, model.link_count());
  for (const auto& prof : profiles) {
    const auto total = congestion_vector(model, prof);
    bool stable = true;
    for (std::size_t i = 0; i < p.coalition_count() && stable; ++i) {
      const auto own = prof.coalition(p, i);
      CongestionVector opp = total;
      for (LinkIndex a : own) --opp[a];
      const double current = group_reward(model, own, total);
      stable = detail::best_value(model, profiles.choices(i), opp) <= current + eps;
    }
    if (stable) out.push_back(NashEquilibrium{prof, zero_cost_worths(model, p, prof)});
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.profile < b.profile; });
  return out;
}

/// Equilibria of one partition.
struct PartitionEquilibria {
  Partition partition;
  std::vector<NashEquilibrium> equilibria;

  bool has_pure_ne() const { return !equilibria.empty(); }
};

/// Equilibria of every partition of n players, in enumerate_partitions order.
/// Shared read-only by the stability and dynamics layers.
struct EquilibriumCache {
  std::size_t players = 0;
  std::vector<PartitionEquilibria> partitions;

  const PartitionEquilibria& at(const Partition& p) const {
    for (const auto& pe : partitions)
      if (pe.partition == p) return pe;
    throw std::out_of_range("partition " + p.label() + " not in cache");
  }
};

inline EquilibriumCache build_equilibrium_cache(const RewardModel& model,
                                                std::size_t n,
                                                double eps = kDefaultEpsilon) {
  if (n > model.max_congestion())
    throw std::invalid_argument("reward table does not cover " +
                                std::to_string(n) + " players");
  EquilibriumCache cache;
  cache.players = n;
  for (auto& p : enumerate_partitions(n)) {
    auto ne = enumerate_pure_ne(model, p, eps);
    cache.partitions.push_back(PartitionEquilibria{std::move(p), std::move(ne)});
  }
  return cache;
}

}  // namespace coalgame

#endif  // COALGAME_EQUILIBRIUM_HPP
