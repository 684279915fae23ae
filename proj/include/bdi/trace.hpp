#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <bdi/asl.hpp>

// Per-cycle instrumentation records, aggregation, serialization (JSONL/CSV)
// and timeline rendering (SVG/ASCII).  Wall-clock fields are measured in
// nanoseconds and are the only nondeterministic data in a trace; simulated
// durations are deterministic and carry the correctness load.
namespace bdi {

enum class run_outcome { goal_reached, deadlock, cycle_limit };
std::string_view to_string(run_outcome outcome);

struct phase_timing {
  std::int64_t wall_ns = 0;
  double sim_ms = 0.0;
  bool operator==(const phase_timing&) const = default;
};

struct executed_formula {
  asl::body_opcode op = asl::body_opcode::action;
  std::string atom;
  bool operator==(const executed_formula&) const = default;
};

struct cycle_trace {
  std::uint64_t cycle = 0;  // 0-based, contiguous
  phase_timing belief_update;
  phase_timing plan_selection;
  phase_timing intention_execution;  // the only phase with nonzero sim_ms
  std::uint32_t events_drained = 0;
  std::optional<std::uint16_t> selected_plan;  // last plan adopted this cycle
  std::optional<executed_formula> executed;
  std::vector<std::string> warnings;
  bool operator==(const cycle_trace&) const = default;
};

struct phase_stats {
  double wall_avg_ns = 0.0;
  std::int64_t wall_max_ns = 0;
  double sim_avg_ms = 0.0;
  double sim_max_ms = 0.0;
};

struct run_summary {
  std::uint64_t total_cycles = 0;
  phase_stats belief_update;
  phase_stats plan_selection;
  phase_stats intention_execution;
  double total_sim_ms = 0.0;
  // intention-execution share of total simulated time; absent when no
  // simulated time elapsed at all.
  std::optional<double> intention_share;
  std::optional<run_outcome> outcome;
};

// Aggregates a non-empty trace sequence; throws std::invalid_argument on an
// empty one.  The outcome is not derivable from traces, so the caller passes
// it through.
run_summary summarize(std::span<const cycle_trace> traces,
                      std::optional<run_outcome> outcome = {});

enum class trace_format { jsonl, csv };

// JSONL: one object per cycle, snake_case keys.  CSV: RFC-4180, header row
// first.  Both reproduce every numeric field exactly on re-parse.
std::string export_traces(std::span<const cycle_trace> traces, trace_format format);
std::vector<cycle_trace> import_jsonl(std::string_view text);

enum class timeline_style { svg, ascii };

// Three-track activity timeline (belief update / plan selection / intention
// execution) over simulated time; phases that ran but consumed no simulated
// time get a minimum visible pulse.  Byte-deterministic for a given trace.
std::string render_timeline(std::span<const cycle_trace> traces, timeline_style style);

std::string format_summary(const run_summary& summary);

}  // namespace bdi
