#include <bdi/trace.hpp>

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace bdi {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string_view opcode_name(asl::body_opcode op) {
  switch (op) {
    case asl::body_opcode::action: return "action";
    case asl::body_opcode::achieve: return "achieve";
    case asl::body_opcode::achieve_new: return "achieve_new";
    case asl::body_opcode::add_belief: return "add_belief";
    case asl::body_opcode::del_belief: return "del_belief";
  }
  return "action";
}

asl::body_opcode opcode_from_name(const std::string& name, std::size_t line_no) {
  if (name == "action") return asl::body_opcode::action;
  if (name == "achieve") return asl::body_opcode::achieve;
  if (name == "achieve_new") return asl::body_opcode::achieve_new;
  if (name == "add_belief") return asl::body_opcode::add_belief;
  if (name == "del_belief") return asl::body_opcode::del_belief;
  throw std::runtime_error("trace line " + std::to_string(line_no) +
                           ": unknown opcode '" + name + "'");
}

ordered_json phase_to_json(const phase_timing& p) {
  return ordered_json{{"wall_ns", p.wall_ns}, {"sim_ms", p.sim_ms}};
}

phase_timing phase_from_json(const ordered_json& j) {
  phase_timing p;
  p.wall_ns = j.at("wall_ns").get<std::int64_t>();
  p.sim_ms = j.at("sim_ms").get<double>();
  return p;
}

// Shortest decimal that parses back to the same double (what the JSON codec
// uses), so CSV and JSONL agree and re-parse exactly.
std::string number(double d) { return ordered_json(d).dump(); }

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

double cycle_sim_ms(const cycle_trace& t) {
  return t.belief_update.sim_ms + t.plan_selection.sim_ms +
         t.intention_execution.sim_ms;
}

bool phase_ran(const phase_timing& p) { return p.wall_ns > 0 || p.sim_ms > 0.0; }

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

constexpr const char* k_track_names[3] = {"belief update", "plan selection",
                                          "intention execution"};

const phase_timing& phase_of(const cycle_trace& t, int i) {
  return i == 0 ? t.belief_update : i == 1 ? t.plan_selection : t.intention_execution;
}

std::string render_svg(std::span<const cycle_trace> traces) {
  const double left = 150.0, inner = 800.0, right = 30.0;
  const double width = left + inner + right, height = 170.0;
  double total = 0.0;
  for (const auto& t : traces) total += cycle_sim_ms(t);
  auto x_of = [&](double t_ms) {
    return total > 0.0 ? left + t_ms / total * inner : left;
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<style>text{font-family:monospace;font-size:12px;fill:#333}"
         ".pulse.p0{fill:#4c78a8}.pulse.p1{fill:#f58518}.pulse.p2{fill:#54a24b}"
         ".tick{stroke:#ddd;stroke-width:1}.axis{stroke:#333;stroke-width:1}"
         "</style>\n";
  for (int i = 0; i < 3; ++i)
    out << "<text x=\"8\" y=\"" << (40 + 40 * i) << "\">" << k_track_names[i]
        << "</text>\n";

  double t_ms = 0.0;
  for (const auto& t : traces) {
    out << "<line class=\"tick\" x1=\"" << fmt("%.2f", x_of(t_ms)) << "\" y1=\"16\" x2=\""
        << fmt("%.2f", x_of(t_ms)) << "\" y2=\"140\"/>\n";
    double offset = t_ms;
    for (int i = 0; i < 3; ++i) {
      const phase_timing& p = phase_of(t, i);
      if (phase_ran(p)) {
        double w = total > 0.0 ? std::max(p.sim_ms / total * inner, 2.0) : 2.0;
        out << "<rect class=\"pulse p" << i << "\" x=\"" << fmt("%.2f", x_of(offset))
            << "\" y=\"" << (24 + 40 * i) << "\" width=\"" << fmt("%.2f", w)
            << "\" height=\"24\"/>\n";
      }
      offset += p.sim_ms;
    }
    t_ms += cycle_sim_ms(t);
  }

  out << "<line class=\"axis\" x1=\"" << left << "\" y1=\"140\" x2=\""
      << (left + inner) << "\" y2=\"140\"/>\n";
  out << "<text x=\"" << left << "\" y=\"156\">0 ms</text>\n";
  out << "<text x=\"" << (left + inner) << "\" y=\"156\" text-anchor=\"end\">"
      << fmt("%.3f", total) << " ms</text>\n";
  out << "</svg>\n";
  return out.str();
}

std::string render_ascii(std::span<const cycle_trace> traces) {
  double total = 0.0;
  for (const auto& t : traces) total += cycle_sim_ms(t);

  std::ostringstream out;
  out << "timeline: " << traces.size() << " cycles, " << fmt("%.3f", total)
      << " ms simulated\n";
  for (int i = 0; i < 3; ++i) {
    std::string label = k_track_names[i];
    label.resize(20, ' ');
    out << label << "| ";
    for (const auto& t : traces) out << (phase_ran(phase_of(t, i)) ? '#' : '.');
    out << "\n";
  }
  return out.str();
}

}  // namespace

std::string_view to_string(run_outcome outcome) {
  switch (outcome) {
    case run_outcome::goal_reached: return "goal_reached";
    case run_outcome::deadlock: return "deadlock";
    case run_outcome::cycle_limit: return "cycle_limit";
  }
  return "deadlock";
}

run_summary summarize(std::span<const cycle_trace> traces,
                      std::optional<run_outcome> outcome) {
  if (traces.empty())
    throw std::invalid_argument("cannot summarize an empty trace");

  run_summary s;
  s.total_cycles = traces.size();
  s.outcome = outcome;
  phase_stats* stats[3] = {&s.belief_update, &s.plan_selection,
                           &s.intention_execution};
  for (int i = 0; i < 3; ++i) {
    std::int64_t wall_sum = 0;
    double sim_sum = 0.0;
    for (const auto& t : traces) {
      const phase_timing& p = phase_of(t, i);
      wall_sum += p.wall_ns;
      sim_sum += p.sim_ms;
      stats[i]->wall_max_ns = std::max(stats[i]->wall_max_ns, p.wall_ns);
      stats[i]->sim_max_ms = std::max(stats[i]->sim_max_ms, p.sim_ms);
    }
    stats[i]->wall_avg_ns = static_cast<double>(wall_sum) / traces.size();
    stats[i]->sim_avg_ms = sim_sum / traces.size();
    s.total_sim_ms += sim_sum;
  }
  if (s.total_sim_ms > 0.0) {
    double ie_sum = s.intention_execution.sim_avg_ms * traces.size();
    s.intention_share = ie_sum / s.total_sim_ms;
  }
  return s;
}

std::string export_traces(std::span<const cycle_trace> traces,
                          trace_format format) {
  std::string out;
  if (format == trace_format::jsonl) {
    for (const auto& t : traces) {
      ordered_json j;
      j["cycle"] = t.cycle;
      j["belief_update"] = phase_to_json(t.belief_update);
      j["plan_selection"] = phase_to_json(t.plan_selection);
      j["intention_execution"] = phase_to_json(t.intention_execution);
      j["events_drained"] = t.events_drained;
      if (t.selected_plan) j["selected_plan"] = *t.selected_plan;
      else j["selected_plan"] = nullptr;
      if (t.executed)
        j["executed"] = ordered_json{{"op", opcode_name(t.executed->op)},
                                     {"atom", t.executed->atom}};
      else j["executed"] = nullptr;
      j["warnings"] = t.warnings;
      out += j.dump();
      out += '\n';
    }
    return out;
  }

  out =
      "cycle,belief_update_wall_ns,belief_update_sim_ms,"
      "plan_selection_wall_ns,plan_selection_sim_ms,"
      "intention_execution_wall_ns,intention_execution_sim_ms,"
      "events_drained,selected_plan,executed_op,executed_atom,warnings\r\n";
  for (const auto& t : traces) {
    std::string joined;
    for (const auto& w : t.warnings) {
      if (!joined.empty()) joined += "; ";
      joined += w;
    }
    out += std::to_string(t.cycle);
    for (int i = 0; i < 3; ++i) {
      const phase_timing& p = phase_of(t, i);
      out += ',' + std::to_string(p.wall_ns) + ',' + number(p.sim_ms);
    }
    out += ',' + std::to_string(t.events_drained);
    out += ',';
    if (t.selected_plan) out += std::to_string(*t.selected_plan);
    out += ',';
    if (t.executed) out += csv_quote(std::string(opcode_name(t.executed->op)));
    out += ',';
    if (t.executed) out += csv_quote(t.executed->atom);
    out += ',' + csv_quote(joined);
    out += "\r\n";
  }
  return out;
}

std::vector<cycle_trace> import_jsonl(std::string_view text) {
  std::vector<cycle_trace> traces;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (line.empty() || line == "\r") continue;

    try {
      ordered_json j = ordered_json::parse(line);
      cycle_trace t;
      t.cycle = j.at("cycle").get<std::uint64_t>();
      t.belief_update = phase_from_json(j.at("belief_update"));
      t.plan_selection = phase_from_json(j.at("plan_selection"));
      t.intention_execution = phase_from_json(j.at("intention_execution"));
      t.events_drained = j.at("events_drained").get<std::uint32_t>();
      if (!j.at("selected_plan").is_null())
        t.selected_plan = j.at("selected_plan").get<std::uint16_t>();
      if (!j.at("executed").is_null()) {
        const ordered_json& e = j.at("executed");
        t.executed = executed_formula{
            opcode_from_name(e.at("op").get<std::string>(), line_no),
            e.at("atom").get<std::string>()};
      }
      t.warnings = j.at("warnings").get<std::vector<std::string>>();
      traces.push_back(std::move(t));
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("trace line " + std::to_string(line_no) + ": " +
                               e.what());
    }
  }
  return traces;
}

std::string render_timeline(std::span<const cycle_trace> traces,
                            timeline_style style) {
  return style == timeline_style::svg ? render_svg(traces) : render_ascii(traces);
}

std::string format_summary(const run_summary& summary) {
  std::ostringstream out;
  out << "cycles:            " << summary.total_cycles << "\n";
  out << "outcome:           "
      << (summary.outcome ? to_string(*summary.outcome) : "n/a") << "\n";
  out << "total simulated:   " << fmt("%.3f", summary.total_sim_ms) << " ms\n";
  out << "intention share:   "
      << (summary.intention_share ? fmt("%.1f", *summary.intention_share * 100.0) + "%"
                                  : std::string("n/a"))
      << "\n";
  out << "phase                 wall avg (ns)  wall max (ns)   sim avg (ms)   sim max (ms)\n";
  const phase_stats* stats[3] = {&summary.belief_update, &summary.plan_selection,
                                 &summary.intention_execution};
  for (int i = 0; i < 3; ++i) {
    char row[160];
    std::snprintf(row, sizeof row, "%-20s %14.1f %14lld %14.3f %14.3f\n",
                  k_track_names[i], stats[i]->wall_avg_ns,
                  static_cast<long long>(stats[i]->wall_max_ns),
                  stats[i]->sim_avg_ms, stats[i]->sim_max_ms);
    out << row;
  }
  return out.str();
}

}  // namespace bdi
