#ifndef COALGAME_STABILITY_HPP
#define COALGAME_STABILITY_HPP

// Stability of partitions under pessimal anticipation as a function of the
// per-link communication cost beta.
//
// A candidate blocking coalition with composition q compares the fair share
// its members currently receive against the worst worth it can guarantee on
// its own. Both sides are affine in beta, so each candidate contributes the
// constraint  Gamma + D * beta >= 0  with
//
//   D     = sum_i q_i / l_i - 1
//   Gamma = sum_i (q_i / l_i) * worth0_i - pessimal0(|C|)
//
// and a pair (partition, equilibrium) is stable exactly on the intersection
// of these half-lines.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "coalgame/core_model.hpp"
#include "coalgame/enumeration.hpp"
#include "coalgame/equilibrium.hpp"

namespace coalgame {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Worst zero-cost worth a coalition of a given size can be left with, over
/// every arrangement of the outsiders and every pure equilibrium.
struct PessimalEntry {
  std::size_t size = 0;
  /// +inf when no partition containing this size has a pure equilibrium.
  double value0 = kInfinity;
  std::optional<Partition> witness_partition;
  std::optional<StrategyProfile> witness_profile;
  std::size_t witness_coalition = 0;

  bool found() const { return witness_partition.has_value(); }
};

struct PessimalTable {
  std::vector<PessimalEntry> entries;  // entries[k - 1]

  double zero_cost(std::size_t k) const { return entries.at(k - 1).value0; }
  double at(std::size_t k, double beta) const {
    return zero_cost(k) - static_cast<double>(k - 1) * beta;
  }
};

inline PessimalTable build_pessimal_table(const EquilibriumCache& cache) {
  PessimalTable table;
  for (std::size_t k = 1; k <= cache.players; ++k) {
    PessimalEntry e;
    e.size = k;
    table.entries.push_back(e);
  }

  for (const auto& pe : cache.partitions) {
    const Partition& p = pe.partition;
    for (const auto& ne : pe.equilibria) {
      for (std::size_t i = 0; i < p.coalition_count(); ++i) {
        auto& entry = table.entries[p.size(i) - 1];
        if (ne.worth0[i] < entry.value0) {
          entry.value0 = ne.worth0[i];
          entry.witness_partition = p;
          entry.witness_profile = ne.profile;
          entry.witness_coalition = i;
        }
      }
    }
  }
  return table;
}

inline PessimalTable build_pessimal_table(const RewardModel& model, std::size_t n,
                                          double eps = kDefaultEpsilon) {
  return build_pessimal_table(build_equilibrium_cache(model, n, eps));
}

/// Gamma/D statistics of one candidate blocking coalition against one pair.
struct BlockingStats {
  QVector q;
  std::size_t coalition_size = 0;
  /// Sign of D computed exactly in integers: -1, 0 or +1.
  int d_sign = 0;
  double d = 0.0;
  double gamma = 0.0;
  /// -Gamma / D, only when D != 0.
  std::optional<double> beta_bar;
};

namespace detail {

/// Sign of sum_i q_i / l_i - 1, exact.
inline int d_sign(const Partition& p, const QVector& q) {
  std::size_t lcm = 1;
  for (std::size_t l : p.sizes()) lcm = std::lcm(lcm, l);
  std::size_t num = 0;
  for (std::size_t i = 0; i < q.q.size(); ++i) num += q.q[i] * (lcm / p.size(i));
  return num > lcm ? 1 : (num < lcm ? -1 : 0);
}

}  // namespace detail

inline BlockingStats blocking_stats(const Partition& p, const NashEquilibrium& ne,
                                    const QVector& q, const PessimalTable& table) {
  BlockingStats s;
  s.q = q;
  s.coalition_size = q.coalition_size();
  s.d_sign = detail::d_sign(p, q);
  double share = 0.0;
  double weighted_worth = 0.0;
  for (std::size_t i = 0; i < q.q.size(); ++i) {
    const double frac = static_cast<double>(q.q[i]) / static_cast<double>(p.size(i));
    share += frac;
    weighted_worth += frac * ne.worth0[i];
  }
  s.d = s.d_sign == 0 ? 0.0 : share - 1.0;
  s.gamma = weighted_worth - table.zero_cost(s.coalition_size);
  if (s.d_sign != 0) s.beta_bar = -s.gamma / s.d;
  return s;
}

/// The four sign classes of (D, Gamma). D = 0 goes to minus_minus when
/// Gamma < 0 and to plus_plus otherwise.
enum class BlockingClass { minus_minus, plus_minus, plus_plus, minus_plus };

inline const char* to_string(BlockingClass c) {
  switch (c) {
    case BlockingClass::minus_minus: return "--";
    case BlockingClass::plus_minus: return "+-";
    case BlockingClass::plus_plus: return "++";
    case BlockingClass::minus_plus: return "-+";
  }
  return "?";
}

/// Gamma counts as negative only below -eps. An infinite pessimal worth
/// blocks at every beta regardless of D.
inline BlockingClass classify(const BlockingStats& s, double eps = kDefaultEpsilon) {
  if (std::isinf(s.gamma) && s.gamma < 0) return BlockingClass::minus_minus;
  const bool gamma_neg = s.gamma < -eps;
  if (gamma_neg) return s.d_sign <= 0 ? BlockingClass::minus_minus : BlockingClass::plus_minus;
  return s.d_sign >= 0 ? BlockingClass::plus_plus : BlockingClass::minus_plus;
}

/// Closed interval of beta; hi may be +inf.
struct StabilityInterval {
  double lo = 0.0;
  double hi = kInfinity;

  bool contains(double beta, double tol = kDefaultEpsilon) const {
    return beta >= lo - tol && beta <= hi + tol;
  }
  bool bounded() const { return !std::isinf(hi); }

  friend bool operator==(const StabilityInterval&, const StabilityInterval&) = default;
};

/// Stability verdict for one (partition, equilibrium) pair.
struct PairStability {
  StrategyProfile profile;
  std::vector<double> worth0;
  std::vector<BlockingStats> stats;
  std::vector<BlockingClass> classes;
  bool minus_minus_nonempty = false;
  /// max of beta_bar over the +- class, 0 when empty.
  double beta_d = 0.0;
  /// min of beta_bar over the -+ class, +inf when empty.
  double beta_u = kInfinity;
  /// Set iff the pair is stable for some beta.
  std::optional<StabilityInterval> interval;

  bool stable_at(double beta, double tol = kDefaultEpsilon) const {
    return interval && interval->contains(beta, tol);
  }
};

inline PairStability classify_pair(const Partition& p, const NashEquilibrium& ne,
                                   const PessimalTable& table,
                                   double eps = kDefaultEpsilon) {
  PairStability out;
  out.profile = ne.profile;
  out.worth0 = ne.worth0;
  for (const auto& q : enumerate_blocking_qvectors(p)) {
    auto s = blocking_stats(p, ne, q, table);
    const auto c = classify(s, eps);
    switch (c) {
      case BlockingClass::minus_minus:
        out.minus_minus_nonempty = true;
        break;
      case BlockingClass::plus_minus:
        out.beta_d = std::max(out.beta_d, *s.beta_bar);
        break;
      case BlockingClass::minus_plus:
        // Gamma may sit in [-eps, 0): clamp the threshold at zero
        out.beta_u = std::min(out.beta_u, std::max(0.0, *s.beta_bar));
        break;
      case BlockingClass::plus_plus:
        break;
    }
    out.stats.push_back(std::move(s));
    out.classes.push_back(c);
  }
  if (!out.minus_minus_nonempty && out.beta_d <= out.beta_u + eps)
    out.interval = StabilityInterval{out.beta_d, std::max(out.beta_d, out.beta_u)};
  return out;
}

enum class PartitionStatus { ok, no_pure_ne };

inline const char* to_string(PartitionStatus s) {
  return s == PartitionStatus::ok ? "ok" : "no_pure_ne";
}

/// Union of closed intervals, merged and sorted.
inline std::vector<StabilityInterval> merge_intervals(std::vector<StabilityInterval> v,
                                                      double tol = kDefaultEpsilon) {
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
  });
  std::vector<StabilityInterval> out;
  for (const auto& iv : v) {
    if (!out.empty() && iv.lo <= out.back().hi + tol)
      out.back().hi = std::max(out.back().hi, iv.hi);
    else
      out.push_back(iv);
  }
  return out;
}

struct PartitionStability {
  Partition partition;
  PartitionStatus status = PartitionStatus::ok;
  std::vector<PairStability> pairs;
  /// Betas for which some pair is stable.
  std::vector<StabilityInterval> stable_set;
  /// Largest upper threshold among stable pairs (the max-over-equilibria
  /// statistic); equals the supremum of stable_set.
  std::optional<double> max_pair_beta_u;
  /// True when stable_set is not a single interval.
  bool union_has_gaps = false;

  bool stable_at(double beta, double tol = kDefaultEpsilon) const {
    return std::any_of(stable_set.begin(), stable_set.end(),
                       [&](const auto& iv) { return iv.contains(beta, tol); });
  }
  bool never_stable() const { return stable_set.empty(); }
};

inline PartitionStability partition_stability_set(const PartitionEquilibria& pe,
                                                  const PessimalTable& table,
                                                  double eps = kDefaultEpsilon) {
  PartitionStability out;
  out.partition = pe.partition;
  if (!pe.has_pure_ne()) {
    out.status = PartitionStatus::no_pure_ne;
    return out;
  }
  std::vector<StabilityInterval> pieces;
  for (const auto& ne : pe.equilibria) {
    auto pair = classify_pair(pe.partition, ne, table, eps);
    if (pair.interval) {
      pieces.push_back(*pair.interval);
      out.max_pair_beta_u = std::max(out.max_pair_beta_u.value_or(0.0), pair.interval->hi);
    }
    out.pairs.push_back(std::move(pair));
  }
  out.stable_set = merge_intervals(std::move(pieces), eps);
  out.union_has_gaps = out.stable_set.size() > 1;
  return out;
}

/// Result of checking one pair directly against the blocking definition.
struct OracleVerdict {
  bool stable = true;
  std::optional<QVector> blocker;
};

/// Fair payoff vector of a pair at cost beta.
inline PayoffVector fair_payoff_at(const Partition& p, const NashEquilibrium& ne,
                                   double beta) {
  std::vector<double> worths(p.coalition_count());
  for (std::size_t i = 0; i < p.coalition_count(); ++i)
    worths[i] = WorthRecord{i, p.size(i), ne.worth0[i]}.at(beta);
  return fair_payoff(p, worths);
}

/// True when the members picked by q are paid strictly (beyond eps) less
/// than their pessimal worth at beta.
inline bool blocks(const Partition& p, const PayoffVector& psi, const QVector& q,
                   double beta, const PessimalTable& table,
                   double eps = kDefaultEpsilon) {
  double current = 0.0;
  std::size_t members = 0;
  for (std::size_t i = 0; i < p.coalition_count(); ++i) {
    for (std::size_t j = 0; j < q.q[i]; ++j) current += psi.payoffs[p.start(i) + j];
    members += q.q[i];
  }
  return current < table.at(members, beta) - eps;
}

/// Checks every candidate coalition against the blocking definition using
/// fair payoffs at cost beta. Shares no arithmetic with blocking_stats.
inline OracleVerdict direct_blocking_oracle(const Partition& p,
                                            const NashEquilibrium& ne, double beta,
                                            const PessimalTable& table,
                                            double eps = kDefaultEpsilon) {
  const auto psi = fair_payoff_at(p, ne, beta);
  for (const auto& q : enumerate_blocking_qvectors(p))
    if (blocks(p, psi, q, beta, table, eps)) return OracleVerdict{false, q};
  return OracleVerdict{};
}

/// Everything the stability layer derives for one instance.
struct StabilityAnalysis {
  EquilibriumCache cache;
  PessimalTable table;
  std::vector<PartitionStability> partitions;

  const PartitionStability& at(const Partition& p) const {
    for (const auto& ps : partitions)
      if (ps.partition == p) return ps;
    throw std::out_of_range("partition " + p.label() + " not analyzed");
  }
};

inline StabilityAnalysis analyze_stability(EquilibriumCache cache,
                                           double eps = kDefaultEpsilon) {
  StabilityAnalysis out;
  out.table = build_pessimal_table(cache);
  for (const auto& pe : cache.partitions)
    out.partitions.push_back(partition_stability_set(pe, out.table, eps));
  out.cache = std::move(cache);
  return out;
}

inline StabilityAnalysis analyze_stability(const RewardModel& model, std::size_t n,
                                           double eps = kDefaultEpsilon) {
  return analyze_stability(build_equilibrium_cache(model, n, eps), eps);
}

}  // namespace coalgame

#endif  // COALGAME_STABILITY_HPP
