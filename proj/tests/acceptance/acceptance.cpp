// Acceptance gate: one pass/fail line per shipped guarantee, covering the
// bundled solver and demo maze end to end.  Exits nonzero if any line fails.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <bdi/asl.hpp>
#include <bdi/maze.hpp>
#include <bdi/plan_table.hpp>
#include <bdi/runtime.hpp>
#include <bdi/trace.hpp>

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const std::set<std::string> k_decision_actions = {
    "turn_left", "turn_right", "forward", "rotate_180", "stop"};

struct agent_run {
  bdi::run_result result;
  std::vector<std::string> decisions;  // movement/stop actions in order
  std::size_t traversals = 0;          // follow_segment count
  std::vector<std::uint16_t> node_visits;
  double sim_clock_ms = 0.0;
  bool at_goal = false;
  bool accounting_exact = false;  // trace sim totals == environment clock
};

agent_run run_agent(const bdi::plan_table& table,
                    const bdi::maze::maze_graph& graph,
                    const bdi::maze::env_config& env_cfg,
                    const bdi::runtime_config& cfg = {}) {
  bdi::maze::simulation sim(graph, env_cfg);
  bdi::maze::table_environment env(table, sim);
  bdi::runtime_state state = bdi::init(table, cfg);

  agent_run out;
  out.result =
      bdi::run(state, env, [&] { return sim.robot().stopped && sim.at_goal(); });
  double sim_total = 0.0;
  for (const auto& t : out.result.traces) {
    sim_total += t.belief_update.sim_ms + t.plan_selection.sim_ms +
                 t.intention_execution.sim_ms;
    if (t.executed && t.executed->op == bdi::asl::body_opcode::action) {
      if (k_decision_actions.count(t.executed->atom))
        out.decisions.push_back(t.executed->atom);
      if (t.executed->atom == "follow_segment") ++out.traversals;
    }
  }
  out.node_visits = sim.node_visits();
  out.sim_clock_ms = sim.robot().sim_clock_ms;
  out.at_goal = sim.at_goal();
  out.accounting_exact = (sim_total == out.sim_clock_ms);
  return out;
}

std::vector<bdi::cycle_trace> without_wall(std::vector<bdi::cycle_trace> traces) {
  for (auto& t : traces) {
    t.belief_update.wall_ns = 0;
    t.plan_selection.wall_ns = 0;
    t.intention_execution.wall_ns = 0;
  }
  return traces;
}

// Results some checks compute that later checks report on.
struct shared_results {
  bool generated_accounting_exact = false;
  bool demo_accounting_exact = false;
  std::string minimal_pools;
};

}  // namespace

int main() {
  const std::string assets = ASSETS_DIR;
  const std::string listing_path = assets + "/listing1.asl";
  const std::string demo_maze_path = assets + "/paper_maze.maze";

  shared_results shared;
  // Each check returns "" on pass, otherwise the failure reason.
  std::vector<std::pair<std::string, std::function<std::string()>>> criteria;

  criteria.emplace_back(
      "solver compiles (1 goal, 8 plans, 15 atoms) and survives the binary "
      "round trip in under a second",
      [&]() -> std::string {
        auto start = clock_type::now();
        bdi::asl::agent_program program =
            bdi::asl::parse_program(slurp(listing_path));
        if (program.initial_goals.size() != 1) return "expected 1 initial goal";
        if (program.plans.size() != 8) return "expected 8 plans";
        bdi::plan_table table = bdi::compile(program);
        if (table.atoms.size() != 15)
          return "expected 15 atoms, got " + std::to_string(table.atoms.size());
        std::vector<std::uint8_t> encoded = bdi::encode(table);
        bdi::plan_table decoded = bdi::decode(encoded);
        if (bdi::dump(decoded) != bdi::dump(table))
          return "dump changed after decode";
        if (bdi::encode(decoded) != encoded) return "re-encode changed bytes";
        double elapsed = seconds_since(start);
        if (elapsed >= 1.0)
          return "took " + std::to_string(elapsed) + "s (budget 1s)";
        return "";
      });

  criteria.emplace_back(
      "intersection decisions follow the fixed priority in every situation",
      [&]() -> std::string {
        bdi::plan_table table =
            bdi::compile(bdi::asl::parse_program(slurp(listing_path)));
        auto atom = [&](const std::string& name) {
          auto id = table.find_atom(name);
          if (!id) throw std::runtime_error("missing atom " + name);
          return *id;
        };
        const bdi::atom_id goal_found = atom("goal_found");
        const bdi::atom_id path_left = atom("path_left");
        const bdi::atom_id path_straight = atom("path_straight");
        const bdi::atom_id path_right = atom("path_right");
        const bdi::atom_id make_decision = atom("make_decision");

        // All 16 situations: the chosen action must follow the priority
        // goal > left > straight > right > turn around (plan source order).
        for (unsigned mask = 0; mask < 16; ++mask) {
          bdi::belief_base beliefs;
          beliefs.capacity = 16;
          if (mask & 1) beliefs.atoms.push_back(goal_found);
          if (mask & 2) beliefs.atoms.push_back(path_left);
          if (mask & 4) beliefs.atoms.push_back(path_straight);
          if (mask & 8) beliefs.atoms.push_back(path_right);
          std::sort(beliefs.atoms.begin(), beliefs.atoms.end());

          std::string expected = (mask & 1)   ? "stop"
                                 : (mask & 2) ? "turn_left"
                                 : (mask & 4) ? "forward"
                                 : (mask & 8) ? "turn_right"
                                              : "rotate_180";
          bdi::event ev{bdi::asl::trigger_kind::achieve_add, make_decision, {}};
          auto plan = bdi::select_plan(ev, table, beliefs);
          if (!plan) return "no plan for situation " + std::to_string(mask);
          const auto& body = table.plans[*plan].body;
          if (body.size() != 1 || body[0].op != bdi::asl::body_opcode::action)
            return "unexpected body for situation " + std::to_string(mask);
          if (table.atom_name(body[0].atom) != expected)
            return "situation " + std::to_string(mask) + ": chose " +
                   table.atom_name(body[0].atom) + ", expected " + expected;
        }
        return "";
      });

  criteria.emplace_back(
      "agent matches the reference walker on 300 generated mazes in under 30s",
      [&]() -> std::string {
        auto start = clock_type::now();
        bdi::plan_table table =
            bdi::compile(bdi::asl::parse_program(slurp(listing_path)));
        bdi::maze::env_config env_cfg;
        bool accounting = true;
        int runs = 0;
        for (int size = 3; size <= 8; ++size) {
          for (std::uint64_t seed = 1; seed <= 50; ++seed) {
            bdi::maze::maze_graph graph =
                bdi::maze::generate_maze(size, size, seed);
            bdi::maze::oracle_result oracle =
                bdi::maze::wall_follow_oracle(graph, env_cfg);
            agent_run agent = run_agent(table, graph, env_cfg);
            std::string where = std::to_string(size) + "x" +
                                std::to_string(size) + " seed " +
                                std::to_string(seed);
            if (agent.result.outcome != bdi::run_outcome::goal_reached)
              return where + ": goal not reached";
            if (!agent.at_goal) return where + ": stopped off goal";
            if (agent.decisions != oracle.decisions)
              return where + ": decision sequence diverged";
            if (agent.node_visits != oracle.node_visits)
              return where + ": visit sequence diverged";
            if (agent.traversals != oracle.traversals)
              return where + ": traversal count diverged";
            if (agent.traversals > 2 * graph.segments.size())
              return where + ": exceeded 2x segment traversal bound";
            if (agent.sim_clock_ms != oracle.total_sim_ms)
              return where + ": simulated time diverged";
            accounting = accounting && agent.accounting_exact;
            ++runs;
          }
        }
        shared.generated_accounting_exact = accounting;
        double elapsed = seconds_since(start);
        if (elapsed >= 30.0)
          return "took " + std::to_string(elapsed) + "s (budget 30s)";
        std::fprintf(stderr, "    (%d runs in %.2fs)\n", runs, elapsed);
        return "";
      });

  criteria.emplace_back(
      "demo maze: goal reached, acting dominates simulated time, deliberation "
      "stays under 0.5 ms wall per phase",
      [&]() -> std::string {
        bdi::plan_table table =
            bdi::compile(bdi::asl::parse_program(slurp(listing_path)));
        bdi::maze::loaded_maze m = bdi::maze::load_maze(slurp(demo_maze_path));
        agent_run agent = run_agent(table, m.graph, m.config);
        if (agent.result.outcome != bdi::run_outcome::goal_reached)
          return "goal not reached";
        shared.demo_accounting_exact = agent.accounting_exact;
        bdi::run_summary summary =
            bdi::summarize(agent.result.traces, agent.result.outcome);
        if (!summary.intention_share) return "no simulated time at all";
        if (*summary.intention_share < 0.95)
          return "intention execution carried only " +
                 std::to_string(*summary.intention_share * 100.0) +
                 "% of simulated time";
        if (summary.belief_update.wall_avg_ns >= 500000.0)
          return "belief update wall average too high";
        if (summary.plan_selection.wall_avg_ns >= 500000.0)
          return "plan selection wall average too high";
        return "";
      });

  criteria.emplace_back(
      "runs are deterministic and identical from source or binary programs",
      [&]() -> std::string {
        bdi::plan_table table =
            bdi::compile(bdi::asl::parse_program(slurp(listing_path)));
        bdi::maze::loaded_maze m = bdi::maze::load_maze(slurp(demo_maze_path));
        agent_run first = run_agent(table, m.graph, m.config);
        agent_run second = run_agent(table, m.graph, m.config);
        if (without_wall(first.result.traces) !=
            without_wall(second.result.traces))
          return "repeated runs diverged";
        bdi::plan_table reloaded = bdi::decode(bdi::encode(table));
        agent_run third = run_agent(reloaded, m.graph, m.config);
        if (without_wall(first.result.traces) !=
            without_wall(third.result.traces))
          return "binary-round-tripped program ran differently";
        return "";
      });

  criteria.emplace_back(
      "undersized pools fail loudly; a minimal sufficient configuration exists",
      [&]() -> std::string {
        bdi::plan_table table =
            bdi::compile(bdi::asl::parse_program(slurp(listing_path)));
        bdi::maze::loaded_maze m = bdi::maze::load_maze(slurp(demo_maze_path));

        bdi::runtime_config tiny;
        tiny.event_capacity = 1;
        try {
          run_agent(table, m.graph, m.config, tiny);
          return "event capacity 1 silently succeeded";
        } catch (const bdi::capacity_error& e) {
          if (e.pool != "event")
            return "overflow named pool '" + e.pool + "', expected 'event'";
          if (e.cycle < 1) return "overflow reported before any cycle ran";
        }

        // Sweep each pool down to its smallest sufficient size with the
        // others at defaults, then confirm the combined minimum still works.
        auto succeeds = [&](const bdi::runtime_config& cfg) {
          try {
            return run_agent(table, m.graph, m.config, cfg).result.outcome ==
                   bdi::run_outcome::goal_reached;
          } catch (const bdi::capacity_error&) {
            return false;
          }
        };
        auto minimize = [&](std::uint32_t bdi::runtime_config::* field,
                            std::uint32_t limit) -> std::optional<std::uint32_t> {
          for (std::uint32_t v = 1; v <= limit; ++v) {
            bdi::runtime_config cfg;
            cfg.*field = v;
            if (succeeds(cfg)) return v;
          }
          return std::nullopt;
        };
        auto beliefs = minimize(&bdi::runtime_config::belief_capacity, 32);
        auto events = minimize(&bdi::runtime_config::event_capacity, 32);
        auto intentions = minimize(&bdi::runtime_config::intention_capacity, 8);
        auto frames = minimize(&bdi::runtime_config::frame_depth, 8);
        if (!beliefs || !events || !intentions || !frames)
          return "no sufficient size found for some pool";

        bdi::runtime_config minimal;
        minimal.belief_capacity = *beliefs;
        minimal.event_capacity = *events;
        minimal.intention_capacity = *intentions;
        minimal.frame_depth = *frames;
        if (!succeeds(minimal)) return "combined minimal configuration failed";

        shared.minimal_pools = "beliefs=" + std::to_string(*beliefs) +
                               " events=" + std::to_string(*events) +
                               " intentions=" + std::to_string(*intentions) +
                               " frames=" + std::to_string(*frames);
        std::fprintf(stderr, "    (minimal pools: %s)\n",
                     shared.minimal_pools.c_str());
        return "";
      });

  criteria.emplace_back(
      "decoder survives 10000 corrupted or random inputs with clean errors",
      [&]() -> std::string {
        bdi::plan_table table =
            bdi::compile(bdi::asl::parse_program(slurp(listing_path)));
        const std::vector<std::uint8_t> valid = bdi::encode(table);
        std::mt19937_64 rng(20260822);
        int decoded_ok = 0;
        for (int i = 0; i < 10000; ++i) {
          std::vector<std::uint8_t> bytes;
          if (i % 2 == 0) {  // fully random buffer
            bytes.resize(rng() % 320);
            for (auto& b : bytes) b = static_cast<std::uint8_t>(rng() & 0xff);
          } else {  // valid encoding with a few corrupted bytes
            bytes = valid;
            std::size_t flips = 1 + rng() % 4;
            for (std::size_t f = 0; f < flips; ++f)
              bytes[rng() % bytes.size()] = rng() & 0xff;
          }
          try {
            bdi::plan_table t = bdi::decode(bytes);
            ++decoded_ok;
            std::vector<std::uint8_t> re = bdi::encode(t);
            bdi::plan_table t2 = bdi::decode(re);
            if (bdi::encode(t2) != re)
              return "input " + std::to_string(i) + ": re-encode not stable";
            if (bdi::dump(t2) != bdi::dump(t))
              return "input " + std::to_string(i) + ": dump not stable";
          } catch (const bdi::codec_error&) {
            // structured rejection is the expected outcome
          }
        }
        std::fprintf(stderr, "    (%d of 10000 inputs decoded cleanly)\n",
                     decoded_ok);
        return "";
      });

  criteria.emplace_back(
      "per-cycle simulated durations sum exactly to the environment clock",
      [&]() -> std::string {
        if (!shared.generated_accounting_exact)
          return "mismatch in a generated-maze run";
        if (!shared.demo_accounting_exact) return "mismatch in the demo run";
        return "";
      });

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string reason;
    try {
      reason = criteria[i].second();
    } catch (const std::exception& e) {
      reason = std::string("exception: ") + e.what();
    }
    if (reason.empty()) {
      std::printf("PASS  %zu. %s\n", i + 1, criteria[i].first.c_str());
    } else {
      std::printf("FAIL  %zu. %s -- %s\n", i + 1, criteria[i].first.c_str(),
                  reason.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
  if (failures) std::printf("%d of %zu checks failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
