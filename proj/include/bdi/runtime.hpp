#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <bdi/plan_table.hpp>
#include <bdi/trace.hpp>

// Deterministic bounded-memory reasoning loop over a compiled plan table.
// Each cycle runs three phases: belief update (percepts overwrite the belief
// base, differences become events), plan selection (the event queue drains
// FIFO, adopted plans become intentions), intention execution (the newest
// ready intention runs exactly one body formula).
namespace bdi {

struct runtime_config {
  std::uint32_t belief_capacity = 32;
  std::uint32_t event_capacity = 32;
  std::uint32_t intention_capacity = 8;
  std::uint32_t frame_depth = 8;
  std::uint64_t max_cycles = 100000;
};

struct event {
  asl::trigger_kind kind = asl::trigger_kind::achieve_add;
  atom_id atom = 0;
  // Set when a suspended intention posted this subgoal with '!': the adopted
  // plan becomes a frame on that intention instead of a new intention.
  std::optional<std::uint64_t> parent_intention;
  bool operator==(const event&) const = default;
};

struct frame {
  std::uint16_t plan_index = 0;
  std::uint16_t pc = 0;
  bool operator==(const frame&) const = default;
};

enum class intention_state : std::uint8_t { ready, suspended };

struct intention {
  std::uint64_t id = 0;  // creation ordinal; execution picks the highest ready
  std::vector<frame> frames;
  intention_state state = intention_state::ready;
};

struct belief_base {
  std::vector<atom_id> atoms;  // sorted ascending, no duplicates
  std::uint32_t capacity = 0;

  bool contains(atom_id a) const;
  std::size_t size() const { return atoms.size(); }
};

// What the reasoner needs from the world: current percepts and synchronous
// action execution returning the action's simulated duration in ms.
class environment {
 public:
  virtual ~environment() = default;
  virtual void collect_percepts(std::vector<atom_id>& out) = 0;
  virtual double perform_action(atom_id action) = 0;
};

struct runtime_state {
  plan_table table;
  runtime_config config;
  belief_base beliefs;
  std::deque<event> events;  // FIFO
  std::vector<intention> intentions;
  std::uint64_t cycle = 0;
  std::uint64_t next_intention_id = 1;

  // Event-conservation counters: enqueued == selected + dropped_warned +
  // dropped_silent + still queued.
  std::uint64_t events_enqueued = 0;
  std::uint64_t events_selected = 0;
  std::uint64_t events_dropped_warned = 0;
  std::uint64_t events_dropped_silent = 0;
};

// Seeds the state: deduplicated initial beliefs, one achieve event per
// distinct initial goal (in first-occurrence order), no intentions, cycle 0.
runtime_state init(plan_table table, const runtime_config& config);

// Makes the belief base equal to `percepts` and appends one event per
// difference: deletions first, then additions, each in ascending atom order.
// Returns the generated events in queue order.
std::vector<event> belief_update(runtime_state& state,
                                 std::span<const atom_id> percepts);

// True when every positive context literal is believed and no negated one is.
bool applicable(const compiled_plan& plan, const belief_base& beliefs);

// Lowest-index plan whose trigger matches the event and whose context holds.
std::optional<std::uint16_t> select_plan(const event& ev, const plan_table& table,
                                         const belief_base& beliefs);

// One full three-phase cycle; increments state.cycle and returns its trace.
cycle_trace reasoning_cycle(runtime_state& state, environment& env);

struct run_result {
  run_outcome outcome = run_outcome::deadlock;
  std::uint64_t cycles = 0;
  std::vector<cycle_trace> traces;
};

// Cycles until `stop` holds (goal_reached), the state quiesces with no events
// and no intentions (deadlock), or max_cycles is hit (cycle_limit).
run_result run(runtime_state& state, environment& env,
               const std::function<bool()>& stop);

}  // namespace bdi
