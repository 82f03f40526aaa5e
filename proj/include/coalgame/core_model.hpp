#ifndef COALGAME_CORE_MODEL_HPP
#define COALGAME_CORE_MODEL_HPP

// Congestion-game primitives: link rewards, partitions of identical players,
// strategy profiles, congestion counts and coalition worths.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace coalgame {

/// Index of a link, 0-based. Link 0 is the one with the largest solo reward.
using LinkIndex = std::size_t;

/// Default tolerance for every strict comparison between computed payoffs.
inline constexpr double kDefaultEpsilon = 1e-9;

enum class CongestionMode { equi_divisible, tabular };

inline const char* to_string(CongestionMode mode) {
  return mode == CongestionMode::equi_divisible ? "equi-divisible" : "tabular";
}

/// Per-player reward of each link as a function of how many players share it.
///
/// In equi-divisible mode only the solo rewards are stored and sharing a link
/// among k players yields mu/k each. In tabular mode the full table
/// mu_a(1..max_congestion) is stored.
///
/// Links must be sorted by nonincreasing solo reward and every reward must be
/// strictly positive; construction throws std::invalid_argument otherwise.
class RewardModel {
 public:
  static RewardModel equi_divisible(std::vector<double> solo_rewards,
                                    std::size_t max_congestion) {
    RewardModel m;
    m.mode_ = CongestionMode::equi_divisible;
    m.max_congestion_ = max_congestion;
    m.solo_ = std::move(solo_rewards);
    m.validate();
    return m;
  }

  /// table[a][k-1] = mu_a(k); every row must have the same length.
  static RewardModel tabular(std::vector<std::vector<double>> table) {
    RewardModel m;
    m.mode_ = CongestionMode::tabular;
    m.max_congestion_ = table.empty() ? 0 : table.front().size();
    for (const auto& row : table) {
      if (row.size() != m.max_congestion_)
        throw std::invalid_argument("reward table rows must have equal length");
      if (row.empty())
        throw std::invalid_argument("reward table rows must be nonempty");
    }
    m.solo_.reserve(table.size());
    for (const auto& row : table) m.solo_.push_back(row.front());
    m.table_ = std::move(table);
    m.validate();
    return m;
  }

  CongestionMode mode() const { return mode_; }
  std::size_t link_count() const { return solo_.size(); }
  std::size_t max_congestion() const { return max_congestion_; }

  /// mu_a(1) for every link, in link order.
  std::span<const double> solo_rewards() const { return solo_; }
  double solo(LinkIndex link) const { return reward(link, 1); }

  /// mu_link(k). Throws std::domain_error when link or k is out of range.
  double reward(LinkIndex link, std::size_t k) const {
    if (link >= solo_.size())
      throw std::domain_error("link index " + std::to_string(link) +
                              " out of range");
    if (k < 1 || k > max_congestion_)
      throw std::domain_error("congestion count " + std::to_string(k) +
                              " out of range [1, " +
                              std::to_string(max_congestion_) + "]");
    return unchecked_reward(link, k);
  }

  double unchecked_reward(LinkIndex link, std::size_t k) const {
    if (mode_ == CongestionMode::equi_divisible)
      return solo_[link] / static_cast<double>(k);
    return table_[link][k - 1];
  }

  /// Link-wise monotonicity: mu_l(k) >= mu_{l+1}(k) for all k and l.
  bool linkwise_monotone() const {
    if (mode_ == CongestionMode::equi_divisible) return true;
    for (std::size_t a = 0; a + 1 < table_.size(); ++a)
      for (std::size_t k = 0; k < max_congestion_; ++k)
        if (table_[a][k] < table_[a + 1][k]) return false;
    return true;
  }

  /// Full table view, materialized for both modes.
  std::vector<std::vector<double>> table() const {
    std::vector<std::vector<double>> out(link_count());
    for (LinkIndex a = 0; a < link_count(); ++a)
      for (std::size_t k = 1; k <= max_congestion_; ++k)
        out[a].push_back(unchecked_reward(a, k));
    return out;
  }

 private:
  RewardModel() = default;

  void validate() const {
    if (solo_.empty()) throw std::invalid_argument("at least one link required");
    if (max_congestion_ < 1)
      throw std::invalid_argument("max congestion must be at least 1");
    for (std::size_t a = 0; a < solo_.size(); ++a) {
      if (!(solo_[a] > 0.0))
        throw std::invalid_argument("link " + std::to_string(a + 1) +
                                    " has nonpositive reward");
      if (a + 1 < solo_.size() && solo_[a] < solo_[a + 1])
        throw std::invalid_argument(
            "links must be sorted by nonincreasing solo reward");
    }
    for (const auto& row : table_)
      for (double v : row)
        if (!(v > 0.0))
          throw std::invalid_argument("reward table entries must be positive");
  }

  CongestionMode mode_ = CongestionMode::equi_divisible;
  std::size_t max_congestion_ = 0;
  std::vector<double> solo_;
  std::vector<std::vector<double>> table_;
};

/// Arrangement of N identical players into coalitions, stored canonically as
/// a nonincreasing vector of coalition sizes. Coalition i owns the players
/// [start(i), start(i) + size(i)).
class Partition {
 public:
  Partition() = default;

  /// Sizes are sorted into canonical order; zero sizes are rejected.
  explicit Partition(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.empty()) throw std::invalid_argument("partition has no coalitions");
    for (std::size_t s : sizes_)
      if (s == 0) throw std::invalid_argument("coalition sizes must be positive");
    std::sort(sizes_.begin(), sizes_.end(), std::greater<>());
    starts_.resize(sizes_.size());
    std::exclusive_scan(sizes_.begin(), sizes_.end(), starts_.begin(),
                        std::size_t{0});
  }

  static Partition grand(std::size_t n) { return Partition({n}); }
  static Partition all_alone(std::size_t n) {
    return Partition(std::vector<std::size_t>(n, 1));
  }

  std::span<const std::size_t> sizes() const { return sizes_; }
  std::size_t size(std::size_t i) const { return sizes_[i]; }
  std::size_t start(std::size_t i) const { return starts_[i]; }
  std::size_t coalition_count() const { return sizes_.size(); }
  std::size_t player_count() const { return starts_.back() + sizes_.back(); }

  bool is_grand() const { return sizes_.size() == 1; }
  bool is_all_alone() const { return sizes_.front() == 1; }

  bool contains_size(std::size_t k) const {
    return std::find(sizes_.begin(), sizes_.end(), k) != sizes_.end();
  }

  /// "[4,1]" style label.
  std::string label() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < sizes_.size(); ++i) os << (i ? "," : "") << sizes_[i];
    os << ']';
    return os.str();
  }

  friend bool operator==(const Partition& a, const Partition& b) {
    return a.sizes_ == b.sizes_;
  }
  friend auto operator<=>(const Partition& a, const Partition& b) {
    return a.sizes_ <=> b.sizes_;
  }

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> starts_;
};

/// Link choice of every player, laid out coalition by coalition following a
/// Partition. The canonical form sorts each coalition's block, since the
/// order inside a coalition carries no meaning.
struct StrategyProfile {
  std::vector<LinkIndex> links;

  std::span<const LinkIndex> coalition(const Partition& p, std::size_t i) const {
    return std::span<const LinkIndex>(links).subspan(p.start(i), p.size(i));
  }

  friend bool operator==(const StrategyProfile&, const StrategyProfile&) = default;
  friend auto operator<=>(const StrategyProfile&, const StrategyProfile&) = default;
};

inline StrategyProfile canonical(const Partition& p, StrategyProfile profile) {
  if (profile.links.size() != p.player_count())
    throw std::invalid_argument("profile length does not match partition");
  for (std::size_t i = 0; i < p.coalition_count(); ++i) {
    auto first = profile.links.begin() + static_cast<std::ptrdiff_t>(p.start(i));
    std::sort(first, first + static_cast<std::ptrdiff_t>(p.size(i)));
  }
  return profile;
}

inline void validate_profile(const RewardModel& model, const Partition& p,
                             const StrategyProfile& profile) {
  if (profile.links.size() != p.player_count())
    throw std::invalid_argument("profile length does not match partition");
  for (LinkIndex a : profile.links)
    if (a >= model.link_count())
      throw std::invalid_argument("profile uses a link outside the model");
}

/// gamma_a: number of players on each link.
using CongestionVector = std::vector<std::size_t>;

inline CongestionVector congestion_vector(std::span<const LinkIndex> links,
                                          std::size_t link_count) {
  CongestionVector counts(link_count, 0);
  for (LinkIndex a : links) ++counts.at(a);
  return counts;
}

inline CongestionVector congestion_vector(const RewardModel& model,
                                          const StrategyProfile& profile) {
  return congestion_vector(profile.links, model.link_count());
}

/// Total reward collected by a group whose own choices are `own` when the
/// whole population induces congestion `total`: sum over distinct links of
/// own_count * mu_a(total_count).
inline double group_reward(const RewardModel& model,
                           std::span<const LinkIndex> own,
                           const CongestionVector& total) {
  const auto own_counts = congestion_vector(own, model.link_count());
  double sum = 0.0;
  for (LinkIndex a = 0; a < own_counts.size(); ++a)
    if (own_counts[a] > 0)
      sum += static_cast<double>(own_counts[a]) * model.reward(a, total[a]);
  return sum;
}

/// Worth of coalition i with zero communication cost.
inline double zero_cost_worth(const RewardModel& model, const Partition& p,
                              const StrategyProfile& profile, std::size_t i) {
  const auto total = congestion_vector(model, profile);
  return group_reward(model, profile.coalition(p, i), total);
}

/// Utility of coalition i at communication cost beta per link to a member.
inline double coalition_utility(const RewardModel& model, const Partition& p,
                                const StrategyProfile& profile, std::size_t i,
                                double beta) {
  if (beta < 0.0) throw std::invalid_argument("beta must be nonnegative");
  if (i >= p.coalition_count())
    throw std::out_of_range("coalition index out of range");
  return zero_cost_worth(model, p, profile, i) -
         static_cast<double>(p.size(i) - 1) * beta;
}

/// Zero-cost worth of every coalition under a profile.
inline std::vector<double> zero_cost_worths(const RewardModel& model,
                                            const Partition& p,
                                            const StrategyProfile& profile) {
  const auto total = congestion_vector(model, profile);
  std::vector<double> out(p.coalition_count());
  for (std::size_t i = 0; i < p.coalition_count(); ++i)
    out[i] = group_reward(model, profile.coalition(p, i), total);
  return out;
}

struct WorthRecord {
  std::size_t coalition_index = 0;
  std::size_t size = 0;
  double zero_cost_worth = 0.0;

  double at(double beta) const {
    return zero_cost_worth - static_cast<double>(size - 1) * beta;
  }
};

/// Equal split of each coalition's worth among its members.
struct PayoffVector {
  std::vector<double> payoffs;
  /// False when some worth is negative, so no nonnegative consistent split
  /// exists.
  bool feasible = true;
};

inline PayoffVector fair_payoff(const Partition& p, std::span<const double> worths) {
  if (worths.size() != p.coalition_count())
    throw std::invalid_argument("one worth per coalition required");
  PayoffVector out;
  out.payoffs.reserve(p.player_count());
  for (std::size_t i = 0; i < p.coalition_count(); ++i) {
    if (worths[i] < 0.0) out.feasible = false;
    const double share = worths[i] / static_cast<double>(p.size(i));
    out.payoffs.insert(out.payoffs.end(), p.size(i), share);
  }
  return out;
}

/// "((a1,a2),(a1))" style label, links printed 1-based.
inline std::string profile_label(const Partition& p, const StrategyProfile& profile) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < p.coalition_count(); ++i) {
    os << (i ? "," : "") << '(';
    auto block = profile.coalition(p, i);
    for (std::size_t j = 0; j < block.size(); ++j)
      os << (j ? "," : "") << 'a' << block[j] + 1;
    os << ')';
  }
  os << ')';
  return os.str();
}

}  // namespace coalgame

#endif  // COALGAME_CORE_MODEL_HPP
