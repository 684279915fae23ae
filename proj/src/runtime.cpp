#include <bdi/runtime.hpp>

#include <algorithm>
#include <chrono>
#include <string>

namespace bdi {

namespace {

using steady_clock = std::chrono::steady_clock;

std::int64_t ns_between(steady_clock::time_point a, steady_clock::time_point b) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(b - a).count();
}

// All enqueues funnel through here so the fixed queue bound holds everywhere.
void enqueue(runtime_state& state, const event& ev, std::uint64_t cycle_no) {
  if (state.events.size() >= state.config.event_capacity)
    throw capacity_error("event queue overflow (capacity " +
                             std::to_string(state.config.event_capacity) + ")",
                         "event", cycle_no);
  state.events.push_back(ev);
  ++state.events_enqueued;
}

intention* find_intention(runtime_state& state, std::uint64_t id) {
  for (auto& it : state.intentions)
    if (it.id == id) return &it;
  return nullptr;
}

void erase_intention(runtime_state& state, std::uint64_t id) {
  std::erase_if(state.intentions,
                [id](const intention& it) { return it.id == id; });
}

bool any_relevant_plan(const event& ev, const plan_table& table) {
  return std::any_of(table.plans.begin(), table.plans.end(),
                     [&](const compiled_plan& p) {
                       return p.trigger_kind == ev.kind &&
                              p.trigger_atom == ev.atom;
                     });
}

void add_belief_atom(runtime_state& state, atom_id atom, std::uint64_t cycle_no) {
  auto& atoms = state.beliefs.atoms;
  auto pos = std::lower_bound(atoms.begin(), atoms.end(), atom);
  if (pos != atoms.end() && *pos == atom) return;  // no change, no event
  if (atoms.size() >= state.beliefs.capacity)
    throw capacity_error("belief base overflow (capacity " +
                             std::to_string(state.beliefs.capacity) + ")",
                         "belief", cycle_no);
  atoms.insert(pos, atom);
  enqueue(state, {asl::trigger_kind::belief_add, atom, std::nullopt}, cycle_no);
}

void del_belief_atom(runtime_state& state, atom_id atom, std::uint64_t cycle_no) {
  auto& atoms = state.beliefs.atoms;
  auto pos = std::lower_bound(atoms.begin(), atoms.end(), atom);
  if (pos == atoms.end() || *pos != atom) return;  // no change, no event
  atoms.erase(pos);
  enqueue(state, {asl::trigger_kind::belief_del, atom, std::nullopt}, cycle_no);
}

}  // namespace

bool belief_base::contains(atom_id a) const {
  return std::binary_search(atoms.begin(), atoms.end(), a);
}

runtime_state init(plan_table table, const runtime_config& config) {
  runtime_state state;
  state.config = config;
  state.beliefs.capacity = config.belief_capacity;

  std::vector<atom_id> beliefs = table.initial_beliefs;
  std::sort(beliefs.begin(), beliefs.end());
  beliefs.erase(std::unique(beliefs.begin(), beliefs.end()), beliefs.end());
  if (beliefs.size() > config.belief_capacity)
    throw capacity_error("initial beliefs overflow the belief base (capacity " +
                             std::to_string(config.belief_capacity) + ")",
                         "belief", 0);
  state.beliefs.atoms = std::move(beliefs);

  std::vector<atom_id> seen;
  for (atom_id goal : table.initial_goals) {
    if (std::find(seen.begin(), seen.end(), goal) != seen.end()) continue;
    seen.push_back(goal);
    enqueue(state, {asl::trigger_kind::achieve_add, goal, std::nullopt}, 0);
  }

  state.table = std::move(table);
  return state;
}

std::vector<event> belief_update(runtime_state& state,
                                 std::span<const atom_id> percepts) {
  const std::uint64_t cycle_no = state.cycle + 1;

  std::vector<atom_id> next(percepts.begin(), percepts.end());
  std::sort(next.begin(), next.end());
  next.erase(std::unique(next.begin(), next.end()), next.end());
  if (next.size() > state.beliefs.capacity)
    throw capacity_error("percepts overflow the belief base (capacity " +
                             std::to_string(state.beliefs.capacity) + ")",
                         "belief", cycle_no);

  std::vector<atom_id> removed, added;
  std::set_difference(state.beliefs.atoms.begin(), state.beliefs.atoms.end(),
                      next.begin(), next.end(), std::back_inserter(removed));
  std::set_difference(next.begin(), next.end(), state.beliefs.atoms.begin(),
                      state.beliefs.atoms.end(), std::back_inserter(added));

  std::vector<event> generated;
  generated.reserve(removed.size() + added.size());
  for (atom_id a : removed)
    generated.push_back({asl::trigger_kind::belief_del, a, std::nullopt});
  for (atom_id a : added)
    generated.push_back({asl::trigger_kind::belief_add, a, std::nullopt});
  for (const event& ev : generated) enqueue(state, ev, cycle_no);

  state.beliefs.atoms = std::move(next);
  return generated;
}

bool applicable(const compiled_plan& plan, const belief_base& beliefs) {
  for (const compiled_literal& lit : plan.context)
    if (beliefs.contains(lit.atom) == lit.negated) return false;
  return true;
}

std::optional<std::uint16_t> select_plan(const event& ev, const plan_table& table,
                                         const belief_base& beliefs) {
  for (std::size_t i = 0; i < table.plans.size(); ++i) {
    const compiled_plan& p = table.plans[i];
    if (p.trigger_kind == ev.kind && p.trigger_atom == ev.atom &&
        applicable(p, beliefs))
      return static_cast<std::uint16_t>(i);
  }
  return std::nullopt;
}

cycle_trace reasoning_cycle(runtime_state& state, environment& env) {
  const std::uint64_t cycle_no = state.cycle + 1;
  cycle_trace trace;
  trace.cycle = state.cycle;

  // Phase 1: belief update.
  auto t0 = steady_clock::now();
  std::vector<atom_id> percepts;
  env.collect_percepts(percepts);
  belief_update(state, percepts);
  auto t1 = steady_clock::now();
  trace.belief_update.wall_ns = ns_between(t0, t1);

  // Phase 2: plan selection.  The whole queue drains; each event either
  // adopts a plan or is dropped.
  while (!state.events.empty()) {
    event ev = state.events.front();
    state.events.pop_front();
    ++trace.events_drained;

    std::optional<std::uint16_t> chosen = select_plan(ev, state.table, state.beliefs);
    if (chosen) {
      if (ev.parent_intention) {
        intention* parent = find_intention(state, *ev.parent_intention);
        if (!parent) {  // parent vanished; nothing left to resume
          ++state.events_dropped_silent;
          continue;
        }
        if (parent->frames.size() >= state.config.frame_depth)
          throw capacity_error("frame stack overflow on intention " +
                                   std::to_string(parent->id) + " (depth " +
                                   std::to_string(state.config.frame_depth) + ")",
                               "frame", cycle_no);
        parent->frames.push_back({*chosen, 0});
        parent->state = intention_state::ready;
      } else {
        if (state.intentions.size() >= state.config.intention_capacity)
          throw capacity_error("intention pool overflow (capacity " +
                                   std::to_string(state.config.intention_capacity) +
                                   ")",
                               "intention", cycle_no);
        if (state.config.frame_depth < 1)
          throw capacity_error("frame stack overflow on new intention (depth " +
                                   std::to_string(state.config.frame_depth) + ")",
                               "frame", cycle_no);
        intention fresh;
        fresh.id = state.next_intention_id++;
        fresh.frames.push_back({*chosen, 0});
        state.intentions.push_back(std::move(fresh));
      }
      ++state.events_selected;
      trace.selected_plan = *chosen;
      continue;
    }

    const std::string& name = state.table.atom_name(ev.atom);
    if (ev.kind == asl::trigger_kind::achieve_add) {
      ++state.events_dropped_warned;
      if (ev.parent_intention) {
        trace.warnings.push_back("no applicable plan for subgoal '" + name +
                                 "'; dropping intention " +
                                 std::to_string(*ev.parent_intention));
        erase_intention(state, *ev.parent_intention);
      } else {
        trace.warnings.push_back("no applicable plan for goal '" + name + "'");
      }
    } else if (any_relevant_plan(ev, state.table)) {
      ++state.events_dropped_warned;
      char sign = ev.kind == asl::trigger_kind::belief_del ? '-' : '+';
      trace.warnings.push_back(std::string("belief event '") + sign + name +
                               "' matched no applicable plan");
    } else {
      ++state.events_dropped_silent;
    }
  }
  auto t2 = steady_clock::now();
  trace.plan_selection.wall_ns = ns_between(t1, t2);

  // Phase 3: intention execution — the newest ready intention runs exactly
  // one body formula.
  intention* current = nullptr;
  for (auto& it : state.intentions)
    if (it.state == intention_state::ready && (!current || it.id > current->id))
      current = &it;
  if (current) {
    frame& top = current->frames.back();
    const compiled_plan& plan = state.table.plans[top.plan_index];
    const compiled_formula& formula = plan.body[top.pc];
    trace.executed = executed_formula{formula.op, state.table.atom_name(formula.atom)};
    ++top.pc;
    switch (formula.op) {
      case asl::body_opcode::action:
        trace.intention_execution.sim_ms += env.perform_action(formula.atom);
        break;
      case asl::body_opcode::achieve:
        enqueue(state, {asl::trigger_kind::achieve_add, formula.atom, current->id},
                cycle_no);
        current->state = intention_state::suspended;
        break;
      case asl::body_opcode::achieve_new:
        enqueue(state, {asl::trigger_kind::achieve_add, formula.atom, std::nullopt},
                cycle_no);
        break;
      case asl::body_opcode::add_belief:
        add_belief_atom(state, formula.atom, cycle_no);
        break;
      case asl::body_opcode::del_belief:
        del_belief_atom(state, formula.atom, cycle_no);
        break;
    }
    // Unwind finished frames.  A suspended intention keeps its exhausted
    // frame: the pending subplan frame still has to return into it.
    if (current->state == intention_state::ready) {
      while (!current->frames.empty()) {
        const frame& f = current->frames.back();
        if (f.pc < state.table.plans[f.plan_index].body.size()) break;
        current->frames.pop_back();
      }
      if (current->frames.empty()) erase_intention(state, current->id);
    }
  }
  auto t3 = steady_clock::now();
  trace.intention_execution.wall_ns = ns_between(t2, t3);

  state.cycle = cycle_no;
  return trace;
}

run_result run(runtime_state& state, environment& env,
               const std::function<bool()>& stop) {
  run_result result;
  for (;;) {
    result.traces.push_back(reasoning_cycle(state, env));
    if (stop()) {
      result.outcome = run_outcome::goal_reached;
      break;
    }
    if (state.events.empty() && state.intentions.empty()) {
      result.outcome = run_outcome::deadlock;
      break;
    }
    if (state.cycle >= state.config.max_cycles) {
      result.outcome = run_outcome::cycle_limit;
      break;
    }
  }
  result.cycles = state.cycle;
  return result;
}

}  // namespace bdi
