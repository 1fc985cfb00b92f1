// Batch experiment runner for the hyperplane dodging game: plays the
// strategies against seeded opponents, emits exact traces and verification
// reports, and answers analysis queries (cylinder tables, constant ledgers,
// subsystem dimension reports, parameter sweeps) as JSON/CSV.
//
// Everything is machine-readable first; exit codes are 0 ok,
// 1 verification failed, 2 invalid spec, 3 precision exhausted.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <future>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "absgame/adversaries.hpp"
#include "absgame/conformal.hpp"
#include "absgame/dynamics.hpp"
#include "absgame/errors.hpp"
#include "absgame/game.hpp"
#include "absgame/geometry.hpp"
#include "absgame/scalar.hpp"
#include "absgame/strategies.hpp"
#include "absgame/targets.hpp"

namespace {

using absgame::AliceCallback;
using absgame::BobCallback;
using absgame::ConstantsA;
using absgame::ConstantsB;
using absgame::Cube;
using absgame::CylinderNode;
using absgame::Error;
using absgame::ExitCode;
using absgame::GameConfig;
using absgame::GameResult;
using absgame::GameView;
using absgame::IFS1D;
using absgame::Interval;
using absgame::MapSequence;
using absgame::Mode;
using absgame::PiecewiseMap;
using absgame::Scalar;
using absgame::Slab;
using absgame::SpecError;
using absgame::StrategyAReport;
using absgame::StrategyBReport;
using absgame::Subsystem;
using absgame::TargetFamily;
using nlohmann::ordered_json;

Mode default_mode() {
  if (const char* env = std::getenv("ABSGAME_PRECISION"); env != nullptr && *env) {
    return Mode::parse(env);
  }
  return Mode::rational();
}

ordered_json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ordered_json::parse(buf.str());
}

// --map / --ifs arguments accept inline JSON (first character '{') or a
// path to a JSON file.
ordered_json json_argument(const std::string& arg) {
  const std::size_t first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && arg[first] == '{') {
    return ordered_json::parse(arg);
  }
  return load_json_file(arg);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw SpecError("cannot write '" + path + "'");
  out << text;
}

Scalar scalar_field(const ordered_json& j, const char* key, const Mode& mode) {
  if (!j.contains(key)) {
    throw SpecError(std::string("missing field '") + key + "'");
  }
  return Scalar::parse(j.at(key).get<std::string>(), mode);
}

std::vector<Scalar> scalar_list(const ordered_json& arr, const Mode& mode) {
  std::vector<Scalar> out;
  for (const auto& v : arr) {
    out.push_back(Scalar::parse(v.get<std::string>(), mode));
  }
  return out;
}

// Exact rational value of a decimal or p/q literal, independent of the
// working mode (the constant derivations live in mpq).
mpq_class exact_rational(const std::string& text) {
  return Scalar::parse(text, Mode::rational()).point_mpq();
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw SpecError("empty list '" + text + "'");
  return out;
}

std::string join_word(const std::vector<long>& word) {
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(word[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spec builders.
// ---------------------------------------------------------------------------

PiecewiseMap build_map(const ordered_json& m, const Mode& mode) {
  const std::string kind = m.at("kind").get<std::string>();
  if (kind == "beta") return PiecewiseMap::beta(scalar_field(m, "beta", mode));
  if (kind == "times") return PiecewiseMap::times(m.at("m").get<long>(), mode);
  if (kind == "gauss") return PiecewiseMap::gauss(mode);
  if (kind == "luroth") return PiecewiseMap::luroth(mode);
  if (kind == "piecewise_affine") {
    return PiecewiseMap::piecewise_affine(scalar_list(m.at("breakpoints"), mode),
                                          scalar_list(m.at("slopes"), mode));
  }
  throw SpecError("unknown map kind '" + kind + "'");
}

MapSequence build_sequence(const ordered_json& m, const Mode& mode) {
  const std::string kind = m.at("kind").get<std::string>();
  if (kind == "qcantor") {
    const std::vector<long> q = m.at("q").get<std::vector<long>>();
    if (m.contains("period") && m.at("period").get<std::size_t>() != q.size()) {
      throw SpecError("qcantor period must equal the length of q");
    }
    return MapSequence::cyclic_times(q, mode);
  }
  if (kind == "sequence") {
    std::vector<PiecewiseMap> items;
    for (const auto& item : m.at("items")) items.push_back(build_map(item, mode));
    std::vector<std::size_t> order;
    if (m.contains("schedule")) {
      order = m.at("schedule").get<std::vector<std::size_t>>();
    } else {
      for (std::size_t i = 0; i < items.size(); ++i) order.push_back(i);
    }
    return MapSequence(std::move(items), std::move(order));
  }
  return MapSequence::constant(build_map(m, mode));
}

TargetFamily build_target(const ordered_json& t, const Mode& mode) {
  const std::string kind = t.at("kind").get<std::string>();
  if (kind == "constant") return TargetFamily::constant(scalar_list(t.at("values"), mode));
  if (kind == "identity") {
    return TargetFamily::identity(t.value("dimension", std::size_t{1}), mode);
  }
  if (kind == "affine") {
    return TargetFamily::affine(scalar_list(t.at("slopes"), mode),
                                scalar_list(t.at("offsets"), mode));
  }
  if (kind == "points" || kind == "point_sequence") {
    std::vector<std::vector<Scalar>> points;
    if (t.contains("file")) {
      std::ifstream in(t.at("file").get<std::string>());
      if (!in) throw SpecError("cannot open points file");
      std::string line;
      while (std::getline(in, line)) {
        std::vector<Scalar> row;
        std::stringstream ss(line);
        std::string tok;
        while (ss >> tok) row.push_back(Scalar::parse(tok, mode));
        if (!row.empty()) points.push_back(std::move(row));
      }
    } else {
      for (const auto& row : t.at("points")) points.push_back(scalar_list(row, mode));
    }
    return TargetFamily::point_sequence(std::move(points));
  }
  throw SpecError("unknown target kind '" + kind + "'");
}

BobCallback build_bob(const ordered_json& b, const Scalar& gamma, const Mode& mode,
                      const MapSequence& seq, const TargetFamily& target,
                      std::uint64_t fallback_seed) {
  const std::string kind = b.at("kind").get<std::string>();
  const Scalar lambda = scalar_field(b, "lambda", mode);
  const std::uint64_t seed = b.value("seed", fallback_seed);
  if (kind == "random") return random_bob(gamma, lambda, seed);
  if (kind == "greedy") {
    return greedy_bob(gamma, lambda, seed, seq, target,
                      b.value("horizon", 10ul), b.value("candidates", std::size_t{24}));
  }
  throw SpecError("unknown bob policy '" + kind + "'");
}

// ---------------------------------------------------------------------------
// run: play a strategy per an experiment spec, emit trace + verification.
// ---------------------------------------------------------------------------

bool is_prefix(const std::vector<long>& a, const std::vector<long>& b) {
  return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

// Samples the final cube for a point whose orbit avoids branch boundaries
// and reports the minimal orbit-target distance over 1..horizon. The
// strategies' claim concerns the limit point of an infinite play; for a
// finite trace every interior point of the final cube is a candidate, so a
// boundary hit just moves the probe.
ordered_json min_distance_report(const MapSequence& seq, const TargetFamily& target,
                                 const Cube& final_cube, unsigned long horizon,
                                 const std::optional<Scalar>& delta, bool& passed) {
  const Mode& mode = seq.mode();
  std::vector<Scalar> probes;
  probes.push_back(final_cube.center[0]);
  for (long k = 1; k <= 8; ++k) {
    const Scalar step =
        final_cube.radius * Scalar::from_mpq(mpq_class(k, 997), mode);
    probes.push_back(final_cube.center[0] + step);
    probes.push_back(final_cube.center[0] - step);
  }
  for (const Scalar& x : probes) {
    Scalar d;
    try {
      d = absgame::min_orbit_distance(seq, target, x, horizon);
    } catch (const absgame::BoundaryOrbitError&) {
      continue;
    }
    passed = definitely(Scalar::gt(d, Scalar::zero(mode)));
    ordered_json out{{"point", x.str()},
                     {"horizon", horizon},
                     {"value", d.str()},
                     {"value_double", d.to_double()},
                     {"passed", passed}};
    if (delta) {
      out["delta"] = delta->str();
      out["ge_delta"] = definitely(Scalar::ge(d, *delta));
    }
    return out;
  }
  passed = false;
  return ordered_json{{"error", "every probe point hit a branch boundary"},
                      {"passed", false}};
}

struct RunOutput {
  ordered_json trace;
  ordered_json verify;
  bool passed = false;
};

RunOutput execute_spec(const ordered_json& spec) {
  const Mode mode = spec.contains("mode")
                        ? Mode::parse(spec.at("mode").get<std::string>())
                        : default_mode();
  const Scalar gamma = scalar_field(spec, "gamma", mode);
  const mpq_class gamma_q = exact_rational(spec.at("gamma").get<std::string>());
  MapSequence seq = build_sequence(spec.at("map"), mode);
  TargetFamily target = build_target(spec.at("target"), mode);
  if (target.dimension() != 1) {
    throw SpecError("the dodging strategies are one-dimensional; give a dimension-1 target");
  }

  GameConfig config;
  config.gamma = gamma;
  config.dimension = 1;
  config.mode = mode;
  config.max_rounds = spec.value("max_rounds", 0ul);
  if (config.max_rounds == 0) throw SpecError("spec needs max_rounds >= 1");
  config.seed = spec.value("seed", std::uint64_t{0});

  Cube initial{{Scalar::from_mpq(mpq_class(1, 2), mode)},
               Scalar::from_mpq(mpq_class(1, 2), mode)};
  if (spec.contains("initial")) {
    const ordered_json& init = spec.at("initial");
    std::vector<Scalar> center = scalar_list(init.at("center"), mode);
    if (center.size() != 1) throw SpecError("initial cube must be one-dimensional");
    initial = Cube{std::move(center), scalar_field(init, "radius", mode)};
  }

  const ordered_json& strat = spec.at("strategy");
  const std::string side = strat.at("kind").get<std::string>();
  const std::string how = strat.value("constants", "certified");
  const unsigned long cap = strat.value("cap", 512ul);

  ordered_json constants_json;
  AliceCallback alice;
  auto rep_a = std::shared_ptr<StrategyAReport>();
  auto rep_b = std::shared_ptr<StrategyBReport>();
  unsigned long depth = 0;
  unsigned long s1 = 0;
  bool certified = false;
  if (side == "A") {
    const ConstantsA cst =
        how == "empirical"
            ? empirical_constants_a(seq, target.lipschitz(), gamma_q,
                                    strat.at("depth").get<unsigned long>(),
                                    strat.at("s").get<unsigned long>())
            : derive_constants_a(seq, target.lipschitz(), gamma_q, cap);
    depth = cst.depth;
    s1 = cst.s1;
    certified = cst.certified;
    constants_json = ordered_json{{"side", "A"},
                                  {"gamma", cst.gamma.get_str()},
                                  {"epsilon", epsilon_of_gamma(gamma).str()},
                                  {"depth", cst.depth},
                                  {"s1", cst.s1},
                                  {"s2", cst.s2},
                                  {"s", cst.s},
                                  {"sup_derivative", cst.sup_derivative.str()},
                                  {"min_cylinder", cst.min_cyl.str()},
                                  {"wait_bound", cst.wait_bound.str()},
                                  {"certified", cst.certified}};
    rep_a = std::make_shared<StrategyAReport>();
    alice = strategy_a_alice(seq, target, cst, rep_a);
  } else if (side == "B") {
    const ConstantsB cst =
        how == "empirical"
            ? empirical_constants_b(seq, target.lipschitz(), gamma_q,
                                    strat.at("depth").get<unsigned long>(),
                                    strat.at("s").get<unsigned long>())
            : derive_constants_b(seq, target.lipschitz(), gamma_q, cap);
    depth = cst.depth;
    s1 = cst.s1;
    certified = cst.certified;
    constants_json = ordered_json{{"side", "B"},
                                  {"gamma", cst.gamma.get_str()},
                                  {"epsilon", epsilon_of_gamma(gamma).str()},
                                  {"depth", cst.depth},
                                  {"s1", cst.s1},
                                  {"s2", cst.s2},
                                  {"s", cst.s},
                                  {"delta_factor", cst.delta_factor.str()},
                                  {"certified", cst.certified}};
    rep_b = std::make_shared<StrategyBReport>();
    alice = strategy_b_alice(seq, target, cst, rep_b);
  } else {
    throw SpecError("strategy kind must be \"A\" or \"B\"");
  }

  // A stage cap turns the open-ended strategy into a finite experiment:
  // Alice retires (status "alice_stopped") once that many stages are done.
  if (const auto stage_cap = spec.value("stage_cap", std::size_t{0}); stage_cap > 0) {
    AliceCallback inner = std::move(alice);
    alice = [inner, rep_a, rep_b, stage_cap](const GameView& view) -> std::optional<Slab> {
      const std::size_t done = rep_a ? rep_a->stages.size() : rep_b->stages.size();
      if (done >= stage_cap) return std::nullopt;
      return inner(view);
    };
  }

  BobCallback bob = build_bob(spec.at("bob"), gamma, mode, seq, target, config.seed);

  GameResult result = run_game(config, initial, alice, bob);
  result.diagnostics["strategy"] = side;
  result.diagnostics["certified"] = certified;
  result.diagnostics["constants"] = constants_json;
  result.diagnostics["report"] = rep_a ? rep_a->to_json() : rep_b->to_json();

  RunOutput out;
  out.trace = trace_json(config, initial, result);

  // Verification: the structural lemmas on the recorded stages, then the
  // measured orbit-target distance at a probe point of the final cube.
  ordered_json checks = ordered_json::object();
  bool structural = true;
  if (rep_a) {
    bool gaps = true;
    unsigned long max_gap = 0;
    for (std::size_t i = 1; i < rep_a->stages.size(); ++i) {
      const unsigned long prev = rep_a->stages[i - 1].m_k;
      const unsigned long cur = rep_a->stages[i].m_k;
      if (cur < prev || cur - prev > depth) gaps = false;
      if (cur >= prev) max_gap = std::max(max_gap, cur - prev);
    }
    checks["stage_gap"] = ordered_json{{"passed", gaps},
                                       {"stages", rep_a->stages.size()},
                                       {"max_gap", max_gap},
                                       {"depth", depth}};
    bool effort = true;
    unsigned long max_plan = 0;
    unsigned long max_intervals = 0;
    for (const auto& st : rep_a->stages) {
      if (st.plan_rounds > s1 || st.intervals > depth + 1) effort = false;
      max_plan = std::max(max_plan, st.plan_rounds);
      max_intervals = std::max(max_intervals, st.intervals);
    }
    checks["blockade"] = ordered_json{{"passed", effort},
                                      {"max_plan_rounds", max_plan},
                                      {"round_budget", s1},
                                      {"max_intervals", max_intervals},
                                      {"interval_budget", depth + 1}};
    structural = gaps && effort;
  } else {
    bool budget = true;
    unsigned long max_words = 0;
    for (const auto& st : rep_b->stages) {
      if (st.words.size() > 2 * depth) budget = false;
      max_words = std::max<unsigned long>(max_words, st.words.size());
      // Nested words of one stage share a length class: prefixes must be
      // shorter by less than the window width.
      for (std::size_t i = 0; i < st.words.size() && budget; ++i) {
        for (std::size_t j = 0; j < st.words.size(); ++j) {
          if (i == j || !is_prefix(st.words[i], st.words[j])) continue;
          if (st.words[j].size() - st.words[i].size() >= depth) budget = false;
        }
      }
    }
    checks["word_budget"] = ordered_json{{"passed", budget},
                                         {"stages", rep_b->stages.size()},
                                         {"max_words", max_words},
                                         {"word_cap", 2 * depth}};
    bool effort = true;
    unsigned long max_plan = 0;
    for (const auto& st : rep_b->stages) {
      if (st.plan_rounds > s1) effort = false;
      max_plan = std::max(max_plan, st.plan_rounds);
    }
    checks["blockade"] = ordered_json{{"passed", effort},
                                      {"max_plan_rounds", max_plan},
                                      {"round_budget", s1}};
    structural = budget && effort;
  }

  const unsigned long horizon = spec.value("horizon", 32ul);
  const std::optional<Scalar> delta = rep_a ? rep_a->delta : rep_b->delta;
  bool distance_ok = false;
  checks["min_distance"] =
      min_distance_report(seq, target, result.final_cube, horizon, delta, distance_ok);

  ordered_json verify;
  verify["status"] = result.status;
  verify["rounds"] = result.rounds.size();
  verify["gamma"] = gamma.str();
  verify["mode"] = mode.str();
  verify["strategy"] = side;
  verify["certified"] = certified;
  verify["constants"] = constants_json;
  verify["report"] = rep_a ? rep_a->to_json() : rep_b->to_json();
  verify["checks"] = checks;
  out.passed = structural && distance_ok;
  verify["passed"] = out.passed;
  out.verify = std::move(verify);
  return out;
}

int cmd_run(const std::string& spec_path, std::string trace_path,
            std::string verify_path) {
  const ordered_json spec = load_json_file(spec_path);
  if (trace_path.empty()) trace_path = spec.value("trace_out", std::string("trace.json"));
  if (verify_path.empty()) verify_path = spec.value("verify_out", std::string("verify.json"));
  const RunOutput out = execute_spec(spec);
  write_text_file(trace_path, out.trace.dump(1) + "\n");
  write_text_file(verify_path, out.verify.dump(1) + "\n");
  std::cout << ordered_json{{"trace", trace_path},
                            {"verify", verify_path},
                            {"status", out.verify.at("status")},
                            {"rounds", out.verify.at("rounds")},
                            {"passed", out.passed}}
                   .dump(1)
            << "\n";
  return out.passed ? 0 : static_cast<int>(ExitCode::verification_failed);
}

// ---------------------------------------------------------------------------
// verify / replay: re-run a recorded trace through the engine.
// ---------------------------------------------------------------------------

int cmd_verify(const std::string& trace_path) {
  const ordered_json trace = load_json_file(trace_path);
  const ordered_json again = absgame::replay_trace(trace);
  const bool identical = trace.dump() == again.dump();
  std::cout << ordered_json{{"identical", identical},
                            {"rounds", trace.at("rounds").size()},
                            {"status", trace.at("status")}}
                   .dump(1)
            << "\n";
  return identical ? 0 : static_cast<int>(ExitCode::verification_failed);
}

int cmd_replay(const std::string& trace_path, const std::string& out_path) {
  const ordered_json again = absgame::replay_trace(load_json_file(trace_path));
  const std::string text = again.dump(1) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// analyze subcommands.
// ---------------------------------------------------------------------------

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
  }
}

int cmd_cylinders(const std::string& map_arg, unsigned long depth,
                  const std::string& mode_str, const std::string& min_len,
                  const std::string& out_path) {
  const Mode mode = mode_str.empty() ? default_mode() : Mode::parse(mode_str);
  const MapSequence seq = build_sequence(json_argument(map_arg), mode);
  std::optional<Scalar> floor;
  if (!min_len.empty()) floor = Scalar::parse(min_len, mode);
  for (const PiecewiseMap& item : seq.items()) {
    if (!item.finite_alphabet() && !floor) {
      throw SpecError("a cylinder table over an infinite alphabet needs --min-length");
    }
  }

  std::vector<CylinderNode> level{cylinder_root(mode)};
  for (unsigned long d = 0; d < depth; ++d) {
    std::vector<CylinderNode> next;
    for (const CylinderNode& node : level) {
      for (const long sym : cylinder_children_symbols(seq, node, floor)) {
        CylinderNode child = cylinder_child(seq, node, sym);
        if (!definitely(Scalar::lt(child.hull.hi, child.hull.lo))) {
          next.push_back(std::move(child));
        }
      }
    }
    level = std::move(next);
  }

  std::ostringstream csv;
  csv << std::setprecision(17);
  csv << "word,lo,hi,length,length_double\n";
  for (const CylinderNode& node : level) {
    const Scalar len = node.hull.hi - node.hull.lo;
    csv << join_word(node.word) << ',' << node.hull.lo.str() << ','
        << node.hull.hi.str() << ',' << len.str() << ',' << len.to_double() << "\n";
  }
  emit(out_path, csv.str());
  return 0;
}

int cmd_constants(const std::string& map_arg, const std::string& gamma_str,
                  const std::string& side, const std::string& c1_str,
                  unsigned long cap, bool empirical, unsigned long emp_depth,
                  unsigned long emp_s, const std::string& mode_str) {
  const Mode mode = mode_str.empty() ? default_mode() : Mode::parse(mode_str);
  const MapSequence seq = build_sequence(json_argument(map_arg), mode);
  const mpq_class gamma_q = exact_rational(gamma_str);
  const Scalar gamma = Scalar::from_mpq(gamma_q, mode);
  const Scalar c1 = Scalar::parse(c1_str, mode);

  ordered_json out;
  if (side == "A") {
    const ConstantsA cst = empirical
                               ? empirical_constants_a(seq, c1, gamma_q, emp_depth, emp_s)
                               : derive_constants_a(seq, c1, gamma_q, cap);
    out = ordered_json{{"side", "A"},
                       {"gamma", cst.gamma.get_str()},
                       {"epsilon", epsilon_of_gamma(gamma).str()},
                       {"depth", cst.depth},
                       {"s1", cst.s1},
                       {"s2", cst.s2},
                       {"s", cst.s},
                       {"sup_derivative", cst.sup_derivative.str()},
                       {"min_cylinder", cst.min_cyl.str()},
                       {"wait_bound", cst.wait_bound.str()},
                       {"certified", cst.certified}};
  } else if (side == "B") {
    const ConstantsB cst = empirical
                               ? empirical_constants_b(seq, c1, gamma_q, emp_depth, emp_s)
                               : derive_constants_b(seq, c1, gamma_q, cap);
    out = ordered_json{{"side", "B"},
                       {"gamma", cst.gamma.get_str()},
                       {"epsilon", epsilon_of_gamma(gamma).str()},
                       {"depth", cst.depth},
                       {"s1", cst.s1},
                       {"s2", cst.s2},
                       {"s", cst.s},
                       {"delta_factor", cst.delta_factor.str()},
                       {"certified", cst.certified}};
  } else {
    throw SpecError("--side must be A or B");
  }
  std::cout << out.dump(1) << "\n";
  return 0;
}

int cmd_subsystem(const std::string& ifs_arg, const std::string& scale_str,
                  unsigned long samples, std::uint64_t seed,
                  const std::string& words_csv, const std::string& mode_str) {
  const Mode mode = mode_str.empty() ? default_mode() : Mode::parse(mode_str);
  const IFS1D ifs = IFS1D::from_json(nlohmann::json::parse(json_argument(ifs_arg).dump()), mode);
  const Scalar r = Scalar::parse(scale_str, mode);
  const Subsystem sub = maximal_disjoint(ifs, r);
  const absgame::DimensionBound dim = subsystem_dimension(ifs, sub);

  ordered_json out;
  out["hull"] = ordered_json{{"lo", ifs.hull().lo.str()}, {"hi", ifs.hull().hi.str()}};
  out["diameter"] = ifs.diameter().str();
  out["min_ratio"] = ifs.min_ratio().str();
  out["strongly_separated"] = ifs.strongly_separated();
  out["scale"] = r.str();
  out["cut_words"] = sub.cut_words.size();
  out["kept_words"] = sub.words.size();
  out["separation"] = sub.separation.str();
  out["dimension_lower"] = dim.lower;
  if (dim.similarity) {
    out["similarity_dimension"] = *dim.similarity;
  } else {
    out["similarity_dimension"] = nullptr;
  }
  if (samples > 0) {
    const absgame::MassCheckResult mc = mass_distribution_check(ifs, sub, samples, seed);
    out["mass_check"] = ordered_json{{"samples", mc.samples},
                                     {"passed", mc.passed},
                                     {"max_ratio", mc.max_ratio}};
  }
  std::cout << out.dump(1) << "\n";

  if (!words_csv.empty()) {
    std::ostringstream csv;
    csv << std::setprecision(17);
    csv << "word,lo,hi,diameter\n";
    for (const std::vector<long>& w : sub.words) {
      const Interval h = ifs.piece_hull(w);
      csv << join_word(w) << ',' << h.lo.str() << ',' << h.hi.str() << ','
          << ifs.piece_diameter(w).str() << "\n";
    }
    write_text_file(words_csv, csv.str());
  }
  return 0;
}

int cmd_sweep(const std::string& spec_path, const std::string& gammas_str,
              const std::string& lambdas_str, const std::string& seeds_str,
              unsigned long jobs, const std::string& out_path) {
  const ordered_json base = load_json_file(spec_path);
  if (!base.contains("bob")) throw SpecError("sweep base spec needs a bob policy");
  const std::vector<std::string> gammas = split_list(gammas_str);
  const std::vector<std::string> lambdas = split_list(lambdas_str);
  std::vector<std::uint64_t> seeds;
  for (const std::string& s : split_list(seeds_str)) seeds.push_back(std::stoull(s));

  struct Cell {
    std::string gamma, lambda;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const auto& g : gammas) {
    for (const auto& l : lambdas) {
      for (const auto s : seeds) cells.push_back(Cell{g, l, s});
    }
  }

  const auto worker = [&base](const Cell& cell) -> ordered_json {
    ordered_json spec = base;
    spec["gamma"] = cell.gamma;
    spec["bob"]["lambda"] = cell.lambda;
    spec["bob"]["seed"] = cell.seed;
    spec["seed"] = cell.seed;
    const RunOutput out = execute_spec(spec);
    const ordered_json& md = out.verify.at("checks").at("min_distance");
    return ordered_json{{"gamma", cell.gamma},
                        {"lambda", cell.lambda},
                        {"seed", cell.seed},
                        {"status", out.verify.at("status")},
                        {"rounds", out.verify.at("rounds")},
                        {"stages", out.verify.at("report").at("stages").size()},
                        {"min_distance", md.value("value", std::string())},
                        {"min_distance_double", md.value("value_double", 0.0)},
                        {"passed", out.passed}};
  };

  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());

  // One shared-nothing worker per cell, merged in cell order so the CSV is
  // deterministic regardless of scheduling.
  std::vector<ordered_json> rows(cells.size());
  for (std::size_t start = 0; start < cells.size(); start += jobs) {
    const std::size_t stop = std::min(cells.size(), start + jobs);
    std::vector<std::future<ordered_json>> batch;
    for (std::size_t i = start; i < stop; ++i) {
      batch.push_back(std::async(std::launch::async, worker, cells[i]));
    }
    for (std::size_t i = start; i < stop; ++i) rows[i] = batch[i - start].get();
  }

  std::ostringstream csv;
  csv << std::setprecision(17);
  csv << "gamma,lambda,seed,status,rounds,stages,min_distance,min_distance_double,passed\n";
  bool all_passed = true;
  for (const ordered_json& row : rows) {
    all_passed = all_passed && row.at("passed").get<bool>();
    csv << row.at("gamma").get<std::string>() << ','
        << row.at("lambda").get<std::string>() << ',' << row.at("seed").get<std::uint64_t>()
        << ',' << row.at("status").get<std::string>() << ','
        << row.at("rounds").get<std::size_t>() << ','
        << row.at("stages").get<std::size_t>() << ','
        << row.at("min_distance").get<std::string>() << ','
        << row.at("min_distance_double").get<double>() << ','
        << (row.at("passed").get<bool>() ? "true" : "false") << "\n";
  }
  emit(out_path, csv.str());
  return all_passed ? 0 : static_cast<int>(ExitCode::verification_failed);
}

const char* exit_name(ExitCode code) {
  switch (code) {
    case ExitCode::verification_failed:
      return "verification_failed";
    case ExitCode::invalid_spec:
      return "invalid_spec";
    case ExitCode::precision_exhausted:
      return "precision_exhausted";
    default:
      return "ok";
  }
}

int emit_error(ExitCode code, const std::string& message) {
  std::cout << ordered_json{{"error", ordered_json{{"type", exit_name(code)},
                                                   {"message", message}}}}
                   .dump(1)
            << "\n";
  return static_cast<int>(code);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "absgame: exact hyperplane-game runner and analyzer.\n"
      "The environment variable ABSGAME_PRECISION (\"rational\" or "
      "\"bigfloat:<bits>\") sets the default numeric mode."};
  app.require_subcommand(1);
  std::function<int()> action;

  auto* run = app.add_subcommand(
      "run", "Play a dodging strategy per an experiment spec; write trace + verification");
  std::string run_spec, run_trace, run_verify;
  run->add_option("spec", run_spec, "experiment spec JSON file")->required();
  run->add_option("--trace", run_trace, "trace output path (default from spec, else trace.json)");
  run->add_option("--verify", run_verify,
                  "verification report path (default from spec, else verify.json)");
  run->callback([&] { action = [&] { return cmd_run(run_spec, run_trace, run_verify); }; });

  auto* verify = app.add_subcommand(
      "verify", "Re-run a recorded trace through the legality engine and compare");
  std::string verify_trace;
  verify->add_option("trace", verify_trace, "trace JSON file")->required();
  verify->callback([&] { action = [&] { return cmd_verify(verify_trace); }; });

  auto* replay = app.add_subcommand("replay", "Replay a trace and emit the regenerated JSON");
  std::string replay_trace_path, replay_out;
  replay->add_option("trace", replay_trace_path, "trace JSON file")->required();
  replay->add_option("-o,--out", replay_out, "output path (default stdout)");
  replay->callback([&] { action = [&] { return cmd_replay(replay_trace_path, replay_out); }; });

  auto* analyze = app.add_subcommand("analyze", "Emit analysis tables and ledgers");
  analyze->require_subcommand(1);

  auto* cyl = analyze->add_subcommand("cylinders", "Depth table of cylinder intervals (CSV)");
  std::string cyl_map, cyl_mode, cyl_min, cyl_out;
  unsigned long cyl_depth = 0;
  cyl->add_option("--map", cyl_map, "map spec: inline JSON or a file path")->required();
  cyl->add_option("--depth", cyl_depth, "cylinder depth")->required();
  cyl->add_option("--mode", cyl_mode, "numeric mode override");
  cyl->add_option("--min-length", cyl_min,
                  "drop cylinders shorter than this (required for gauss/luroth)");
  cyl->add_option("-o,--out", cyl_out, "output path (default stdout)");
  cyl->footer("CSV columns: word (symbols joined by '.'), lo, hi, length (exact), length_double.");
  cyl->callback([&] {
    action = [&] { return cmd_cylinders(cyl_map, cyl_depth, cyl_mode, cyl_min, cyl_out); };
  });

  auto* cst = analyze->add_subcommand("constants", "Strategy constant ledger (JSON)");
  std::string cst_map, cst_gamma, cst_side, cst_c1 = "0", cst_mode;
  unsigned long cst_cap = 512, cst_depth = 0, cst_s = 0;
  bool cst_empirical = false;
  cst->add_option("--map", cst_map, "map spec: inline JSON or a file path")->required();
  cst->add_option("--gamma", cst_gamma, "game parameter in (0,1/3)")->required();
  cst->add_option("--side", cst_side, "A (bounded derivative) or B (distortion only)")
      ->required();
  cst->add_option("--c1", cst_c1, "target Lipschitz constant (default 0)");
  cst->add_option("--cap", cst_cap, "largest window width tried (default 512)");
  auto* emp_flag = cst->add_flag("--empirical", cst_empirical,
                                 "skip the derivation; take --depth/--s as given");
  cst->add_option("--depth", cst_depth, "empirical window width N")->needs(emp_flag);
  cst->add_option("--s", cst_s, "empirical stage modulus s")->needs(emp_flag);
  cst->callback([&] {
    action = [&] {
      return cmd_constants(cst_map, cst_gamma, cst_side, cst_c1, cst_cap, cst_empirical,
                           cst_depth, cst_s, cst_mode);
    };
  });
  cst->add_option("--mode", cst_mode, "numeric mode override");

  auto* sub = analyze->add_subcommand("subsystem", "Self-conformal subsystem report (JSON)");
  std::string sub_ifs, sub_scale, sub_words, sub_mode;
  unsigned long sub_samples = 0;
  std::uint64_t sub_seed = 0;
  sub->add_option("--ifs", sub_ifs, "IFS spec: inline JSON or a file path")->required();
  sub->add_option("--scale", sub_scale, "cut scale r in (0, diameter)")->required();
  sub->add_option("--samples", sub_samples, "mass-distribution sample count (0 = skip)");
  sub->add_option("--seed", sub_seed, "sampler seed");
  sub->add_option("--words-csv", sub_words, "also write kept words as CSV here");
  sub->add_option("--mode", sub_mode, "numeric mode override");
  sub->footer("words CSV columns: word, lo, hi, diameter (exact strings).");
  sub->callback([&] {
    action = [&] {
      return cmd_subsystem(sub_ifs, sub_scale, sub_samples, sub_seed, sub_words, sub_mode);
    };
  });

  auto* sweep = analyze->add_subcommand("sweep", "gamma x policy grid of strategy runs (CSV)");
  std::string sweep_spec, sweep_gammas, sweep_lambdas, sweep_seeds, sweep_out;
  unsigned long sweep_jobs = 0;
  sweep->add_option("--spec", sweep_spec, "base experiment spec JSON file")->required();
  sweep->add_option("--gammas", sweep_gammas, "comma list of gamma values")->required();
  sweep->add_option("--lambdas", sweep_lambdas, "comma list of bob radius factors")->required();
  sweep->add_option("--seeds", sweep_seeds, "comma list of seeds")->required();
  sweep->add_option("--jobs", sweep_jobs, "parallel workers (default: hardware)");
  sweep->add_option("-o,--out", sweep_out, "output path (default stdout)");
  sweep->footer(
      "CSV columns: gamma, lambda, seed, status, rounds, stages, min_distance (exact), "
      "min_distance_double, passed.");
  sweep->callback([&] {
    action = [&] {
      return cmd_sweep(sweep_spec, sweep_gammas, sweep_lambdas, sweep_seeds, sweep_jobs,
                       sweep_out);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::invalid_spec);
  }

  try {
    return action();
  } catch (const Error& e) {
    return emit_error(e.code(), e.what());
  } catch (const nlohmann::json::exception& e) {
    return emit_error(ExitCode::invalid_spec, e.what());
  } catch (const std::exception& e) {
    return emit_error(ExitCode::invalid_spec, e.what());
  }
}
