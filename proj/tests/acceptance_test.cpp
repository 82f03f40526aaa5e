// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "coalgame/coalgame.hpp"

using namespace coalgame;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

RewardModel equi(std::vector<double> mu, std::size_t n) {
  return RewardModel::equi_divisible(std::move(mu), n);
}

bool near(double a, double b, double tol) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::fabs(a - b) <= tol;
}

bool single_interval(const PartitionStability& ps, double lo, double hi, double tol) {
  return ps.stable_set.size() == 1 && near(ps.stable_set[0].lo, lo, tol) &&
         near(ps.stable_set[0].hi, hi, tol);
}

Outcome two_player_oracle() {
  Outcome o;
  const auto a = analyze_stability(equi({1.0, 0.4}, 2), 2);
  const auto& gc = a.at(Partition::grand(2));
  const auto& alc = a.at(Partition::all_alone(2));
  o.require(single_interval(gc, 0.0, 0.4, 1e-9), "GC interval");
  o.require(single_interval(alc, 0.4, kInfinity, 1e-9), "ALC interval");
  if (!o.pass) return o;
  const auto& g = gc.pairs.at(0).stats.at(0);
  const auto& s = alc.pairs.at(0).stats.at(0);
  o.require(near(g.gamma, 0.2, 1e-9) && near(g.d, -0.5, 1e-9), "GC statistics");
  o.require(near(s.gamma, -0.4, 1e-9) && near(s.d, 1.0, 1e-9), "ALC statistics");
  return o;
}

Outcome severe_congestion() {
  Outcome o;
  const auto m = equi({0.55, 0.52, 0.5, 0.45, 0.3}, 5);
  const auto a = analyze_stability(m, 5);
  o.require(classify_regime(m, 5).severe, "instance not classified severe");
  o.require(a.partitions.size() == 7, "expected 7 partitions");
  for (const auto& ps : a.partitions) {
    o.require(ps.stable_at(0.0), ps.partition.label() + " not stable at beta=0");
    std::set<StrategyProfile> ne;
    for (const auto& e : a.cache.at(ps.partition).equilibria) ne.insert(e.profile);
    o.require(ne == permutation_class(ps.partition),
              ps.partition.label() + " equilibria differ from permutation class");
  }
  o.require(verify_theorem3(m, a).status == VerdictStatus::confirmed, "verdict");
  return o;
}

Outcome limited_resources() {
  Outcome o;
  const auto m = equi({0.6, 0.52, 0.5, 0.45, 0.1}, 5);
  const auto a = analyze_stability(m, 5);
  o.require(classify_regime(m, 5).limited_resources, "regime not detected");
  for (const auto& ps : a.partitions)
    o.require(!ps.stable_at(0.0), ps.partition.label() + " stable at beta=0");
  o.require(a.at(Partition::grand(5)).never_stable(), "GC set not empty");
  bool onset = false;
  for (const auto& ps : a.partitions)
    if (!ps.partition.is_grand())
      for (const auto& iv : ps.stable_set) onset = onset || iv.hi > 0.0;
  o.require(onset, "no non-GC partition becomes stable for beta > 0");
  return o;
}

Outcome major_link() {
  Outcome o;
  const auto m = equi({1.1, 0.52, 0.5, 0.45, 0.3}, 5);
  const auto a = analyze_stability(m, 5);
  for (const auto& ps : a.partitions) {
    if (ps.partition.is_grand()) continue;
    o.require(!ps.stable_at(0.0), ps.partition.label() + " stable at beta=0");
    for (const auto& pair : ps.pairs) {
      const auto& ne = a.cache.at(ps.partition).equilibria;
      const auto it = std::find_if(ne.begin(), ne.end(),
                                   [&](const auto& e) { return e.profile == pair.profile; });
      o.require(!direct_blocking_oracle(ps.partition, *it, 0.0, a.table).stable,
                ps.partition.label() + " not blocked at beta=0");
    }
  }
  const auto& gc = a.at(Partition::grand(5));
  o.require(gc.stable_set.size() == 1 && near(gc.stable_set[0].lo, 0.0, 1e-12) &&
                gc.stable_set[0].bounded(),
            "GC set is not [0, finite]");
  return o;
}

std::vector<std::pair<RewardModel, std::size_t>> random_instances() {
  std::mt19937_64 rng(20261018);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<std::pair<RewardModel, std::size_t>> out;
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = 1 + rng() % 4, m = 1 + rng() % 4;
    std::vector<double> mu(m);
    for (auto& v : mu) v = u(rng);
    std::sort(mu.begin(), mu.end(), std::greater<>());
    out.emplace_back(equi(mu, n), n);
  }
  return out;
}

Outcome oracle_agreement() {
  Outcome o;
  std::size_t disagreements = 0, evaluations = 0;
  for (const auto& [m, n] : random_instances()) {
    const auto a = analyze_stability(m, n);
    for (const auto& ps : a.partitions) {
      const auto& ne = a.cache.at(ps.partition).equilibria;
      for (std::size_t e = 0; e < ps.pairs.size(); ++e)
        for (int b = 0; b <= 100; ++b) {
          const double beta = b / 100.0;
          ++evaluations;
          if (ps.pairs[e].stable_at(beta) !=
              direct_blocking_oracle(ps.partition, ne[e], beta, a.table).stable)
            ++disagreements;
        }
    }
  }
  o.require(disagreements == 0, std::to_string(disagreements) + " disagreements");
  o.detail = o.pass ? std::to_string(evaluations) + " evaluations" : o.detail;
  return o;
}

Outcome structural_corollaries() {
  Outcome o;
  auto instances = random_instances();
  instances.emplace_back(equi({1.0, 0.4}, 2), 2);
  instances.emplace_back(equi({0.55, 0.52, 0.5, 0.45, 0.3}, 5), 5);
  instances.emplace_back(equi({0.6, 0.52, 0.5, 0.45, 0.1}, 5), 5);
  instances.emplace_back(equi({1.1, 0.52, 0.5, 0.45, 0.3}, 5), 5);
  for (const auto& [m, n] : instances)
    for (const auto& ps : analyze_stability(m, n).partitions) {
      if (ps.never_stable()) continue;
      if (ps.partition.is_grand())
        o.require(near(ps.stable_set.front().lo, 0.0, 1e-12), "GC set does not start at 0");
      else if (ps.partition.is_all_alone())
        o.require(ps.stable_set.size() == 1 && !ps.stable_set.back().bounded(),
                  "ALC set is not an upward ray");
      else
        o.require(ps.stable_set.back().bounded(), ps.partition.label() + " unbounded");
    }
  return o;
}

Outcome cycle_detection() {
  Outcome o;
  const auto m = equi({0.6, 0.52, 0.5, 0.45, 0.1}, 5);
  const Partition p1({4, 1});
  const StrategyProfile bully{{0, 1, 2, 3, 0}};
  o.require(is_nash(m, p1, bully), "bully witness is not an equilibrium");
  const auto g = blocking_graph(m, 5, 0.0);
  const auto gc = g.find(Partition::grand(5), StrategyProfile{{0, 1, 2, 3, 4}});
  const auto b = g.find(p1, bully);
  o.require(gc && b, "nodes missing");
  if (!o.pass) return o;
  o.require(g.has_edge(*gc, *b) && g.has_edge(*b, *gc), "GC <-> P1 edges missing");
  bool reported = false;
  for (const auto& c : detect_cycles(g)) {
    const std::set<std::size_t> nodes(c.begin(), c.end());
    reported = reported || (c.size() == 2 && nodes.count(*gc) && nodes.count(*b));
  }
  o.require(reported, "cycle not reported");
  return o;
}

Outcome beta_invariance() {
  Outcome o;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng() % 3, links = 1 + rng() % 4;
    std::vector<double> mu(links);
    for (auto& v : mu) v = u(rng);
    std::sort(mu.begin(), mu.end(), std::greater<>());
    const auto m = equi(mu, n);
    for (const auto& p : enumerate_partitions(n)) {
      std::set<StrategyProfile> sets[3];
      const double betas[3] = {0.0, 0.5, 5.0};
      for (int k = 0; k < 3; ++k)
        for (const auto& prof : JointProfiles(p, links)) {
          bool ne = true;
          for (std::size_t i = 0; i < p.coalition_count() && ne; ++i) {
            const double mine = coalition_utility(m, p, prof, i, betas[k]);
            for (const auto& dev : enumerate_coalition_strategies(p.size(i), links)) {
              StrategyProfile alt = prof;
              std::copy(dev.begin(), dev.end(),
                        alt.links.begin() + static_cast<std::ptrdiff_t>(p.start(i)));
              if (coalition_utility(m, p, alt, i, betas[k]) > mine + kDefaultEpsilon) {
                ne = false;
                break;
              }
            }
          }
          if (ne) sets[k].insert(prof);
        }
      o.require(sets[0] == sets[1] && sets[0] == sets[2], p.label() + " NE set moves with beta");
      for (const auto& prof : JointProfiles(p, links))
        for (std::size_t i = 0; i < p.coalition_count(); ++i) {
          const double w0 = zero_cost_worth(m, p, prof, i);
          for (double beta : {0.0, 0.5, 5.0})
            o.require(std::fabs(coalition_utility(m, p, prof, i, beta) -
                                (w0 - static_cast<double>(p.size(i) - 1) * beta)) <= 1e-12,
                      "worth not affine in beta");
        }
    }
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budget_ms;
  };
  const std::vector<Criterion> criteria{
      {"two-player oracle equivalence", two_player_oracle, 1000.0},
      {"severe congestion: all partitions stable at beta=0", severe_congestion, 60000.0},
      {"limited resources: nothing stable at beta=0", limited_resources, 0.0},
      {"major link: only the grand coalition stable at beta=0", major_link, 0.0},
      {"interval classification agrees with direct blocking check", oracle_agreement, 0.0},
      {"structural corollaries", structural_corollaries, 0.0},
      {"blocking cycle through the bully equilibrium", cycle_detection, 0.0},
      {"beta invariance and linearity", beta_invariance, 0.0},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (criteria[i].budget_ms > 0 && ms > criteria[i].budget_ms)
      o.require(false, "over time budget");
    std::printf("%s criterion %zu: %s (%.1f ms)%s%s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].name, ms, o.detail.empty() ? "" : " - ", o.detail.c_str());
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
