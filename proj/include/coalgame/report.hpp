#ifndef COALGAME_REPORT_HPP
#define COALGAME_REPORT_HPP

// Instance files, the end-to-end analysis pipeline and its JSON/CSV output.
//
// Instance file (JSON, schema_version 1):
//
//   {
//     "schema_version": 1,
//     "players": 5,
//     "mode": "equi-divisible",          // or "tabular"
//     "links": [0.6, 0.52, 0.5, 0.45, 0.1],
//     "beta": {"start": 0, "stop": 1, "step": 0.01},   // or "symbolic"
//     "sweep": {"mu1": [0.55, 0.7, 1.1]},              // optional
//     "epsilon": 1e-9,
//     "theory_checks": true,
//     "cycle_detection": true,
//     "cycle_betas": [0.0],
//     "candidate_detail": false
//   }
//
// In tabular mode every link is an object {"table": [mu(1), ..., mu(N)]}.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "coalgame/core_model.hpp"
#include "coalgame/equilibrium.hpp"
#include "coalgame/stability.hpp"
#include "coalgame/theory.hpp"
#include "json.hpp"

namespace coalgame {

inline constexpr int kSchemaVersion = 1;

/// Malformed or invalid instance file.
class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BetaGrid {
  double start = 0.0;
  double stop = 1.0;
  double step = 0.01;

  /// start, start + step, ... up to stop inclusive (within half a step).
  std::vector<double> values() const {
    std::vector<double> out;
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 0.5));
    for (std::size_t i = 0; i <= count; ++i)
      out.push_back(start + static_cast<double>(i) * step);
    return out;
  }
};

struct LinkSpec {
  double mu = 0.0;
  /// Full mu(1..N) row, tabular mode only.
  std::vector<double> table;
};

struct InstanceConfig {
  int schema_version = kSchemaVersion;
  std::size_t players = 0;
  CongestionMode mode = CongestionMode::equi_divisible;
  std::vector<LinkSpec> links;
  /// Absent means symbolic: intervals only, no grid evaluation.
  std::optional<BetaGrid> beta_grid;
  std::vector<double> mu1_sweep;
  double epsilon = kDefaultEpsilon;
  bool theory_checks = true;
  bool cycle_detection = false;
  std::vector<double> cycle_betas{0.0};
  bool candidate_detail = false;
  /// Load-time warnings (e.g. links re-sorted).
  std::vector<std::string> warnings;

  RewardModel model() const {
    if (mode == CongestionMode::equi_divisible) {
      std::vector<double> mu;
      for (const auto& l : links) mu.push_back(l.mu);
      return RewardModel::equi_divisible(std::move(mu), players);
    }
    std::vector<std::vector<double>> table;
    for (const auto& l : links) table.push_back(l.table);
    return RewardModel::tabular(std::move(table));
  }
};

namespace detail {

inline bool sort_links(std::vector<LinkSpec>& links) {
  const auto by_solo = [](const LinkSpec& a, const LinkSpec& b) { return a.mu > b.mu; };
  if (std::is_sorted(links.begin(), links.end(), by_solo)) return false;
  std::stable_sort(links.begin(), links.end(), by_solo);
  return true;
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace detail

/// Parses and validates instance text. `origin` prefixes error messages.
inline InstanceConfig parse_instance(const std::string& text,
                                     const std::string& origin = "<instance>") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InstanceError(origin + ": " + e.what());
  }

  InstanceConfig c;
  try {
    if (!j.is_object()) throw InstanceError(origin + ": top level must be an object");
    c.schema_version = detail::get_or(j, "schema_version", 0);
    if (c.schema_version != kSchemaVersion)
      throw InstanceError(origin + ": unsupported schema_version " +
                          std::to_string(c.schema_version));
    c.players = j.at("players").get<std::size_t>();
    if (c.players < 1) throw InstanceError(origin + ": players must be at least 1");

    const auto mode = detail::get_or<std::string>(j, "mode", "equi-divisible");
    if (mode == "equi-divisible")
      c.mode = CongestionMode::equi_divisible;
    else if (mode == "tabular")
      c.mode = CongestionMode::tabular;
    else
      throw InstanceError(origin + ": unknown mode '" + mode + "'");

    const auto& links = j.at("links");
    if (!links.is_array() || links.empty())
      throw InstanceError(origin + ": links must be a nonempty array");
    for (std::size_t a = 0; a < links.size(); ++a) {
      const auto& lj = links[a];
      LinkSpec spec;
      if (lj.is_number()) {
        spec.mu = lj.get<double>();
      } else {
        if (lj.contains("table")) spec.table = lj.at("table").get<std::vector<double>>();
        spec.mu = lj.contains("mu") ? lj.at("mu").get<double>()
                                    : (spec.table.empty() ? 0.0 : spec.table.front());
      }
      const std::string where = origin + ": link " + std::to_string(a + 1);
      if (c.mode == CongestionMode::tabular) {
        if (spec.table.size() != c.players)
          throw InstanceError(where + ": tabular links need " +
                              std::to_string(c.players) + " table entries");
        if (spec.mu != spec.table.front())
          throw InstanceError(where + ": mu disagrees with table[0]");
        for (double v : spec.table)
          if (!(v > 0.0)) throw InstanceError(where + ": rewards must be positive");
      }
      if (!(spec.mu > 0.0)) throw InstanceError(where + ": rewards must be positive");
      c.links.push_back(std::move(spec));
    }
    if (detail::sort_links(c.links))
      c.warnings.push_back("links were not sorted by solo reward; re-sorted");

    if (j.contains("beta")) {
      const auto& b = j.at("beta");
      if (b.is_string()) {
        if (b.get<std::string>() != "symbolic")
          throw InstanceError(origin + ": beta must be \"symbolic\" or a grid");
      } else {
        BetaGrid g{b.at("start").get<double>(), b.at("stop").get<double>(),
                   b.at("step").get<double>()};
        if (g.start < 0 || g.stop < g.start || !(g.step > 0))
          throw InstanceError(origin + ": invalid beta grid");
        c.beta_grid = g;
      }
    }
    if (j.contains("sweep"))
      c.mu1_sweep = j.at("sweep").at("mu1").get<std::vector<double>>();
    for (double v : c.mu1_sweep)
      if (!(v > 0.0)) throw InstanceError(origin + ": sweep values must be positive");
    if (!c.mu1_sweep.empty() && c.mode == CongestionMode::tabular)
      throw InstanceError(origin + ": mu1 sweeps need equi-divisible mode");

    c.epsilon = detail::get_or(j, "epsilon", kDefaultEpsilon);
    if (!(c.epsilon > 0.0)) throw InstanceError(origin + ": epsilon must be positive");
    c.theory_checks = detail::get_or(j, "theory_checks", true);
    c.cycle_detection = detail::get_or(j, "cycle_detection", false);
    c.cycle_betas = detail::get_or(j, "cycle_betas", std::vector<double>{0.0});
    c.candidate_detail = detail::get_or(j, "candidate_detail", false);
  } catch (const nlohmann::json::exception& e) {
    throw InstanceError(origin + ": " + e.what());
  }

  if (c.links.size() < c.players)
    c.warnings.push_back("fewer links than players; the unique grand-coalition "
                         "optimizer is not guaranteed");
  // surfaces reward-model violations with the file name attached
  try {
    (void)c.model();
  } catch (const std::invalid_argument& e) {
    throw InstanceError(origin + ": " + e.what());
  }
  return c;
}

inline InstanceConfig load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InstanceError(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str(), path);
}

/// Serializes a config back to instance text; parse_instance inverts it.
inline std::string emit_instance(const InstanceConfig& c) {
  nlohmann::ordered_json j;
  j["schema_version"] = c.schema_version;
  j["players"] = c.players;
  j["mode"] = to_string(c.mode);
  auto links = nlohmann::ordered_json::array();
  for (const auto& l : c.links) {
    if (c.mode == CongestionMode::equi_divisible)
      links.push_back(l.mu);
    else
      links.push_back({{"table", l.table}});
  }
  j["links"] = links;
  if (c.beta_grid)
    j["beta"] = {{"start", c.beta_grid->start}, {"stop", c.beta_grid->stop},
                 {"step", c.beta_grid->step}};
  else
    j["beta"] = "symbolic";
  if (!c.mu1_sweep.empty()) j["sweep"] = {{"mu1", c.mu1_sweep}};
  j["epsilon"] = c.epsilon;
  j["theory_checks"] = c.theory_checks;
  j["cycle_detection"] = c.cycle_detection;
  j["cycle_betas"] = c.cycle_betas;
  j["candidate_detail"] = c.candidate_detail;
  return j.dump(2) + "\n";
}

struct CycleReport {
  double beta = 0.0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::vector<std::vector<std::string>> cycles;
};

/// Interval classification against the direct oracle on the beta grid.
struct GridCheck {
  std::size_t evaluations = 0;
  std::size_t disagreements = 0;
};

/// Full analysis of one reward vector.
struct InstanceReport {
  explicit InstanceReport(RewardModel m) : model(std::move(m)) {}

  std::optional<double> sweep_mu1;
  RewardModel model;
  std::size_t players = 0;
  RegimeReport regime;
  StabilityAnalysis analysis;
  std::size_t gc_optimizer_count = 0;
  std::optional<GcSolution> gc;
  std::optional<Verdict> theorem3;
  std::optional<Verdict> theorem4;
  std::optional<BullyCheck> bully;
  std::vector<CycleReport> cycles;
  std::optional<GridCheck> grid_check;
  std::vector<std::string> warnings;
  bool degenerate = false;

  double mu1() const { return model.solo_rewards()[0]; }
  double mu1_half_minus_mubar() const { return mu1() / 2.0 - regime.mu_bar; }
};

struct StabilityReport {
  InstanceConfig config;
  std::vector<InstanceReport> instances;

  bool degenerate() const {
    return std::any_of(instances.begin(), instances.end(),
                       [](const auto& i) { return i.degenerate; });
  }
};

struct AnalysisOptions {
  bool sweep = true;
  bool theory = true;
  bool cycles = true;
};

inline InstanceReport analyze_instance(const InstanceConfig& c, const RewardModel& model,
                                       const AnalysisOptions& opt) {
  const double eps = c.epsilon;
  InstanceReport r(model);
  r.players = c.players;
  r.regime = classify_regime(model, c.players, eps);
  r.analysis = analyze_stability(model, c.players, eps);

  auto [optimizers, best] = gc_optimizers(model, c.players, eps);
  r.gc_optimizer_count = optimizers.size();
  if (optimizers.size() == 1) {
    r.gc = GcSolution{optimizers.front(), best};
  } else {
    r.degenerate = true;
    r.warnings.push_back("grand coalition optimizer is not unique (" +
                         std::to_string(optimizers.size()) + " maximizers)");
  }
  for (const auto& ps : r.analysis.partitions) {
    if (ps.status == PartitionStatus::no_pure_ne) {
      r.degenerate = true;
      r.warnings.push_back("partition " + ps.partition.label() +
                           " has no pure equilibrium; excluded from stability claims");
    }
    if (ps.union_has_gaps)
      r.warnings.push_back("stability set of " + ps.partition.label() +
                           " is not a single interval; the max-over-equilibria "
                           "threshold overstates it");
  }
  for (const auto& e : r.analysis.table.entries)
    if (!e.found())
      r.warnings.push_back("no partition with a coalition of size " +
                           std::to_string(e.size) +
                           " has a pure equilibrium; pessimal worth is +inf");

  if (c.beta_grid) {
    GridCheck gcheck;
    for (double beta : c.beta_grid->values())
      for (const auto& ps : r.analysis.partitions) {
        const auto& pe = r.analysis.cache.at(ps.partition);
        for (std::size_t e = 0; e < ps.pairs.size(); ++e) {
          ++gcheck.evaluations;
          const bool by_interval = ps.pairs[e].stable_at(beta);
          const bool by_oracle =
              direct_blocking_oracle(ps.partition, pe.equilibria[e], beta,
                                     r.analysis.table, eps)
                  .stable;
          if (by_interval != by_oracle) ++gcheck.disagreements;
        }
      }
    if (gcheck.disagreements > 0)
      r.warnings.push_back(std::to_string(gcheck.disagreements) +
                           " grid points where interval and direct check disagree");
    r.grid_check = gcheck;
  }

  if (opt.theory && c.theory_checks) {
    r.theorem3 = verify_theorem3(model, r.analysis, eps);
    r.theorem4 = verify_theorem4(model, r.analysis, eps);
    r.bully = bully_ne_check(model, c.players, eps);
  }
  if (opt.cycles && c.cycle_detection) {
    for (double beta : c.cycle_betas) {
      const auto g = blocking_graph(r.analysis, beta, eps);
      CycleReport cr{beta, g.nodes.size(), g.edges.size(), {}};
      for (const auto& cyc : detect_cycles(g)) {
        std::vector<std::string> labels;
        for (std::size_t v : cyc) labels.push_back(g.nodes[v].label());
        cr.cycles.push_back(std::move(labels));
      }
      r.cycles.push_back(std::move(cr));
    }
  }
  return r;
}

/// Runs the whole pipeline, once per sweep point when a mu1 sweep is given.
inline StabilityReport run_analysis(const InstanceConfig& c,
                                    const AnalysisOptions& opt = {}) {
  StabilityReport report{c, {}};
  if (!opt.sweep || c.mu1_sweep.empty()) {
    report.instances.push_back(analyze_instance(c, c.model(), opt));
    return report;
  }
  for (double mu1 : c.mu1_sweep) {
    InstanceConfig point = c;
    point.links.front().mu = mu1;
    const bool resorted = detail::sort_links(point.links);
    auto r = analyze_instance(point, point.model(), opt);
    r.sweep_mu1 = mu1;
    if (resorted)
      r.warnings.insert(r.warnings.begin(),
                        "mu1 below the second link; links re-sorted");
    report.instances.push_back(std::move(r));
  }
  return report;
}

namespace detail {

using ojson = nlohmann::ordered_json;

/// 9 significant digits; infinities as "inf"/"-inf".
inline ojson num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  double rounded = std::strtod(buf, nullptr);
  if (rounded == 0.0) rounded = 0.0;  // drop negative zero
  return rounded;
}

inline ojson nums(const std::vector<double>& xs) {
  auto a = ojson::array();
  for (double x : xs) a.push_back(num(x));
  return a;
}

inline ojson profile_json(const Partition& p, const StrategyProfile& prof) {
  auto a = ojson::array();
  for (std::size_t i = 0; i < p.coalition_count(); ++i) {
    auto block = ojson::array();
    for (LinkIndex l : prof.coalition(p, i)) block.push_back(l + 1);
    a.push_back(block);
  }
  return a;
}

inline ojson sizes_json(const Partition& p) {
  return ojson(std::vector<std::size_t>(p.sizes().begin(), p.sizes().end()));
}

inline ojson interval_json(const StabilityInterval& iv) {
  return ojson::array({num(iv.lo), num(iv.hi)});
}

inline ojson verdict_json(const Verdict& v) {
  return {{"status", to_string(v.status)},
          {"checks", v.checks},
          {"notes", v.notes},
          {"counterexamples", v.counterexamples}};
}

inline ojson optional_size(const std::optional<std::size_t>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

inline ojson instance_json(const InstanceReport& r, const InstanceConfig& c) {
  ojson j;
  if (r.sweep_mu1) j["mu1"] = num(*r.sweep_mu1);
  const auto solo = r.model.solo_rewards();
  j["links"] = nums(std::vector<double>(solo.begin(), solo.end()));
  if (r.model.mode() == CongestionMode::tabular) {
    auto t = ojson::array();
    for (const auto& row : r.model.table()) t.push_back(nums(row));
    j["reward_table"] = t;
  }
  j["mu1_half_minus_mubar"] = num(r.mu1_half_minus_mubar());
  j["regime"] = {{"severe", r.regime.severe},
                 {"gc_unstable_band", r.regime.gc_unstable_band},
                 {"major_link_k", optional_size(r.regime.major_link_k)},
                 {"weak_tail_k", optional_size(r.regime.weak_tail_k)},
                 {"limited_resources", r.regime.limited_resources},
                 {"mu_bar", num(r.regime.mu_bar)},
                 {"bully_ne", r.regime.bully_ne}};

  const Partition gc_partition = Partition::grand(r.players);
  ojson gc;
  gc["unique"] = r.gc.has_value();
  gc["optimizers"] = r.gc_optimizer_count;
  if (r.gc) {
    gc["profile"] = profile_json(gc_partition, r.gc->profile);
    gc["worth0"] = num(r.gc->worth0);
  }
  j["grand_coalition"] = gc;

  auto pess = ojson::array();
  for (const auto& e : r.analysis.table.entries) {
    ojson pj;
    pj["size"] = e.size;
    pj["value0"] = num(e.value0);
    if (e.found()) {
      pj["witness_partition"] = sizes_json(*e.witness_partition);
      pj["witness_profile"] = profile_json(*e.witness_partition, *e.witness_profile);
      pj["witness_coalition"] = e.witness_coalition + 1;
    }
    pess.push_back(pj);
  }
  j["pessimal"] = pess;

  std::vector<double> grid;
  if (c.beta_grid) grid = c.beta_grid->values();

  auto parts = ojson::array();
  for (const auto& ps : r.analysis.partitions) {
    ojson pj;
    pj["sizes"] = sizes_json(ps.partition);
    pj["label"] = ps.partition.label();
    pj["status"] = to_string(ps.status);
    auto set = ojson::array();
    for (const auto& iv : ps.stable_set) set.push_back(interval_json(iv));
    pj["stability_set"] = set;
    pj["max_pair_beta_u"] = ps.max_pair_beta_u ? num(*ps.max_pair_beta_u) : ojson(nullptr);
    pj["union_has_gaps"] = ps.union_has_gaps;
    if (c.beta_grid) {
      auto stable = ojson::array();
      for (double beta : grid)
        if (ps.stable_at(beta)) stable.push_back(num(beta));
      pj["stable_grid_betas"] = stable;
    }
    auto eqs = ojson::array();
    for (const auto& pair : ps.pairs) {
      ojson ej;
      ej["profile"] = profile_json(ps.partition, pair.profile);
      ej["worth0"] = nums(pair.worth0);
      ej["minus_minus_nonempty"] = pair.minus_minus_nonempty;
      ej["beta_d"] = num(pair.beta_d);
      ej["beta_u"] = num(pair.beta_u);
      ej["interval"] = pair.interval ? interval_json(*pair.interval) : ojson(nullptr);
      if (c.candidate_detail) {
        auto cands = ojson::array();
        for (std::size_t k = 0; k < pair.stats.size(); ++k) {
          const auto& s = pair.stats[k];
          cands.push_back({{"q", s.q.q},
                           {"D", num(s.d)},
                           {"Gamma", num(s.gamma)},
                           {"beta_bar", s.beta_bar ? num(*s.beta_bar) : ojson(nullptr)},
                           {"class", to_string(pair.classes[k])}});
        }
        ej["candidates"] = cands;
      }
      eqs.push_back(ej);
    }
    pj["equilibria"] = eqs;
    parts.push_back(pj);
  }
  j["partitions"] = parts;

  if (r.grid_check)
    j["grid_check"] = {{"evaluations", r.grid_check->evaluations},
                       {"disagreements", r.grid_check->disagreements}};

  if (r.theorem3 || r.theorem4 || r.bully) {
    ojson th;
    if (r.theorem3) th["severe_congestion"] = verdict_json(*r.theorem3);
    if (r.theorem4) th["equi_divisible"] = verdict_json(*r.theorem4);
    if (r.bully) {
      ojson b;
      b["applicable"] = r.bully->applicable;
      b["hypothesis"] = r.bully->hypothesis;
      b["is_ne"] = r.bully->is_ne;
      if (r.bully->applicable) {
        b["partition"] = sizes_json(r.bully->partition);
        b["witness"] = profile_json(r.bully->partition, r.bully->witness);
      }
      th["bully_ne"] = b;
    }
    j["verdicts"] = th;
  }

  if (!r.cycles.empty()) {
    auto cy = ojson::array();
    for (const auto& cr : r.cycles)
      cy.push_back({{"beta", num(cr.beta)},
                    {"nodes", cr.nodes},
                    {"edges", cr.edges},
                    {"cycles", cr.cycles}});
    j["cycles"] = cy;
  }
  j["warnings"] = r.warnings;
  j["degenerate"] = r.degenerate;
  return j;
}

}  // namespace detail

/// Deterministic JSON rendering of a report.
inline nlohmann::ordered_json to_json(const StabilityReport& report) {
  using detail::num;
  const auto& c = report.config;
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["players"] = c.players;
  j["mode"] = to_string(c.mode);
  j["epsilon"] = num(c.epsilon);
  if (c.beta_grid)
    j["beta"] = {{"start", num(c.beta_grid->start)},
                 {"stop", num(c.beta_grid->stop)},
                 {"step", num(c.beta_grid->step)}};
  else
    j["beta"] = "symbolic";
  j["warnings"] = c.warnings;
  auto inst = nlohmann::ordered_json::array();
  for (const auto& r : report.instances) inst.push_back(detail::instance_json(r, c));
  j["instances"] = inst;
  j["degenerate"] = report.degenerate();
  return j;
}

inline std::string emit_report(const StabilityReport& report) {
  return to_json(report).dump(2) + "\n";
}

/// Bar-chart data: one row per (instance, partition, stable interval).
/// Partitions never stable produce no row.
inline std::string emit_figure_data(const StabilityReport& report) {
  std::ostringstream os;
  os << "mu1,mu1_half_minus_mubar,partition,interval_lo,interval_hi\n";
  const auto field = [](double x) { return detail::num(x).dump(); };
  for (const auto& r : report.instances)
    for (const auto& ps : r.analysis.partitions)
      for (const auto& iv : ps.stable_set) {
        const std::string hi = iv.bounded() ? field(iv.hi) : "inf";
        os << field(r.mu1()) << ',' << field(r.mu1_half_minus_mubar()) << ",\""
           << ps.partition.label() << "\"," << field(iv.lo) << ',' << hi << '\n';
      }
  return os.str();
}

}  // namespace coalgame

#endif  // COALGAME_REPORT_HPP
