#ifndef COALGAME_ENUMERATION_HPP
#define COALGAME_ENUMERATION_HPP

// Combinatorial universes: integer partitions, coalition multisets, joint
// profiles and candidate blocking coalitions, all up to player symmetry.

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <span>
#include <stdexcept>
#include <vector>

#include "coalgame/core_model.hpp"

namespace coalgame {

/// Integer partitions of n in canonical (nonincreasing) form, ordered from
/// the grand coalition down to all singletons.
inline std::vector<Partition> enumerate_partitions(std::size_t n) {
  if (n < 1) throw std::invalid_argument("player count must be at least 1");
  std::vector<Partition> out;
  std::vector<std::size_t> parts{n};
  while (true) {
    out.emplace_back(parts);
    // rightmost part larger than 1
    std::size_t rem = 0;
    while (!parts.empty() && parts.back() == 1) {
      ++rem;
      parts.pop_back();
    }
    if (parts.empty()) break;
    const std::size_t k = --parts.back();
    ++rem;
    while (rem > k) {
      parts.push_back(k);
      rem -= k;
    }
    if (rem > 0) parts.push_back(rem);
  }
  return out;
}

/// Binomial coefficient, exact for the small arguments used here.
inline std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// All multisets of `size` links out of `link_count`, each as a sorted vector;
/// there are C(link_count + size - 1, size) of them, in lexicographic order.
inline std::vector<std::vector<LinkIndex>> enumerate_coalition_strategies(
    std::size_t size, std::size_t link_count) {
  if (size < 1 || link_count < 1)
    throw std::invalid_argument("coalition size and link count must be positive");
  std::vector<std::vector<LinkIndex>> out;
  out.reserve(binomial(link_count + size - 1, size));
  std::vector<LinkIndex> cur(size, 0);
  while (true) {
    out.push_back(cur);
    std::size_t i = size;
    while (i > 0 && cur[i - 1] == link_count - 1) --i;
    if (i == 0) break;
    const LinkIndex v = cur[i - 1] + 1;
    for (std::size_t j = i - 1; j < size; ++j) cur[j] = v;
  }
  return out;
}

/// Composition of a candidate blocking coalition: q[i] members taken from
/// coalition i of the current partition.
struct QVector {
  std::vector<std::size_t> q;

  std::size_t coalition_size() const {
    std::size_t s = 0;
    for (std::size_t v : q) s += v;
    return s;
  }

  friend bool operator==(const QVector&, const QVector&) = default;
  friend auto operator<=>(const QVector&, const QVector&) = default;
};

/// True when q describes exactly one existing coalition of p.
inline bool is_existing_coalition(const Partition& p, const QVector& q) {
  std::size_t nonzero = 0;
  bool full = false;
  for (std::size_t i = 0; i < q.q.size(); ++i) {
    if (q.q[i] == 0) continue;
    ++nonzero;
    full = q.q[i] == p.size(i);
  }
  return nonzero == 1 && full;
}

/// Every nonempty q with 0 <= q_i <= l_i that is not itself a coalition of p.
inline std::vector<QVector> enumerate_blocking_qvectors(const Partition& p) {
  const std::size_t n = p.coalition_count();
  std::vector<QVector> out;
  QVector cur{std::vector<std::size_t>(n, 0)};
  while (true) {
    // odometer, last coordinate fastest
    std::size_t i = n;
    while (i > 0 && cur.q[i - 1] == p.size(i - 1)) {
      cur.q[i - 1] = 0;
      --i;
    }
    if (i == 0) break;
    ++cur.q[i - 1];
    if (!is_existing_coalition(p, cur)) out.push_back(cur);
  }
  return out;
}

/// Lazy range over all canonical joint profiles of a partition: the
/// Cartesian product of each coalition's multisets.
class JointProfiles {
 public:
  JointProfiles(const Partition& p, std::size_t link_count) : partition_(p) {
    choices_.reserve(p.coalition_count());
    for (std::size_t i = 0; i < p.coalition_count(); ++i)
      choices_.push_back(enumerate_coalition_strategies(p.size(i), link_count));
  }

  std::size_t count() const {
    std::size_t c = 1;
    for (const auto& ch : choices_) c *= ch.size();
    return c;
  }

  std::span<const std::vector<LinkIndex>> choices(std::size_t coalition) const {
    return choices_[coalition];
  }

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = StrategyProfile;
    using difference_type = std::ptrdiff_t;
    using pointer = const StrategyProfile*;
    using reference = const StrategyProfile&;

    iterator() = default;
    explicit iterator(const JointProfiles* owner)
        : owner_(owner), index_(owner->choices_.size(), 0) {
      rebuild();
    }

    reference operator*() const { return current_; }
    pointer operator->() const { return &current_; }

    iterator& operator++() {
      std::size_t i = index_.size();
      while (i > 0) {
        --i;
        if (++index_[i] < owner_->choices_[i].size()) {
          rebuild();
          return *this;
        }
        index_[i] = 0;
      }
      owner_ = nullptr;
      return *this;
    }
    void operator++(int) { ++*this; }

    friend bool operator==(const iterator& a, const iterator& b) {
      return a.owner_ == b.owner_ && (a.owner_ == nullptr || a.index_ == b.index_);
    }

   private:
    void rebuild() {
      current_.links.clear();
      for (std::size_t i = 0; i < index_.size(); ++i) {
        const auto& block = owner_->choices_[i][index_[i]];
        current_.links.insert(current_.links.end(), block.begin(), block.end());
      }
    }

    const JointProfiles* owner_ = nullptr;
    std::vector<std::size_t> index_;
    StrategyProfile current_;
  };

  iterator begin() const { return iterator(this); }
  iterator end() const { return iterator(); }

  const Partition& partition() const { return partition_; }

 private:
  Partition partition_;
  std::vector<std::vector<std::vector<LinkIndex>>> choices_;
};

inline JointProfiles enumerate_joint_profiles(const Partition& p,
                                              std::size_t link_count) {
  return JointProfiles(p, link_count);
}

}  // namespace coalgame

#endif  // COALGAME_ENUMERATION_HPP
