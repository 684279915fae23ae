// bdimaze: compile agent programs, run them on simulated line mazes, and
// inspect the results.
//
// Exit codes: 0 success (a run reached the goal / the command succeeded),
// 1 usage error, 2 parse/validation/format error, 3 runtime error
// (capacity overflow, cycle limit, environment fault, deadlock).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
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

// Failure to reach a file at all is a usage problem (exit 1), distinct from
// a file whose *content* is malformed (exit 2).
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::set<std::string> k_known_actions = {
    "follow_segment", "check_situation", "stop",      "turn_left",
    "turn_right",     "forward",         "rotate_180"};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw io_error("failed while reading '" + path + "'");
  return buf.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw io_error("failed while writing '" + path + "'");
}

bool has_suffix(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Prints validation findings to stderr; returns false when there are errors.
bool report_validation(const bdi::asl::agent_program& program) {
  bdi::asl::validation_report report = bdi::asl::validate(program, k_known_actions);
  for (const auto& w : report.warnings)
    std::cerr << "warning: " << w.message << "\n";
  for (const auto& e : report.errors)
    std::cerr << "error: " << e.message << "\n";
  return report.ok();
}

// Loads either source (.asl) or a compiled table (.bdip), dispatching on the
// extension and falling back to content sniffing.
std::optional<bdi::plan_table> load_program(const std::string& path) {
  std::string bytes = read_file(path);
  bool binary = has_suffix(path, ".bdip") ||
                (!has_suffix(path, ".asl") && bytes.rfind("BDIP", 0) == 0);
  if (binary) {
    std::vector<std::uint8_t> raw(bytes.begin(), bytes.end());
    return bdi::decode(raw);
  }
  bdi::asl::agent_program program = bdi::asl::parse_program(bytes);
  if (!report_validation(program)) return std::nullopt;
  return bdi::compile(program);
}

struct compile_options {
  std::string input;
  std::string output;
  bool dump = false;
};

int cmd_compile(const compile_options& opt) {
  std::string out_path = opt.output;
  if (out_path.empty()) {
    out_path = opt.input;
    if (has_suffix(out_path, ".asl"))
      out_path.resize(out_path.size() - 4);
    out_path += ".bdip";
  }
  bdi::asl::agent_program program = bdi::asl::parse_program(read_file(opt.input));
  if (!report_validation(program)) return 2;
  bdi::plan_table table = bdi::compile(program);
  std::vector<std::uint8_t> encoded = bdi::encode(table);
  write_file(out_path, std::string_view(
                           reinterpret_cast<const char*>(encoded.data()),
                           encoded.size()));
  if (opt.dump) std::cout << bdi::dump(table);
  std::cerr << "wrote " << out_path << " (" << encoded.size() << " bytes, "
            << table.atoms.size() << " atoms, " << table.plans.size()
            << " plans)\n";
  return 0;
}

struct run_options {
  std::string program;
  std::string maze;
  std::uint64_t max_cycles = 100000;
  std::string trace_path;
  bool summary = true;
  bool no_wallclock = false;
};

int cmd_run(const run_options& opt) {
  std::optional<bdi::plan_table> table = load_program(opt.program);
  if (!table) return 2;
  bdi::maze::loaded_maze m = bdi::maze::load_maze(read_file(opt.maze));

  bdi::maze::simulation sim(m.graph, m.config);
  bdi::maze::table_environment env(*table, sim);
  bdi::runtime_config config;
  config.max_cycles = opt.max_cycles;
  bdi::runtime_state state = bdi::init(*table, config);

  bdi::run_result result;
  try {
    result = bdi::run(state, env,
                      [&] { return sim.robot().stopped && sim.at_goal(); });
  } catch (const bdi::capacity_error& e) {
    std::cerr << "capacity error in cycle " << e.cycle << " (pool '" << e.pool
              << "'): " << e.what() << "\n";
    return 3;
  } catch (const bdi::maze::env_fault& e) {
    std::cerr << "environment fault in cycle " << state.cycle + 1 << ": "
              << e.what() << "\n";
    return 3;
  }

  if (opt.no_wallclock) {
    for (auto& t : result.traces) {
      t.belief_update.wall_ns = 0;
      t.plan_selection.wall_ns = 0;
      t.intention_execution.wall_ns = 0;
    }
  }
  if (!opt.trace_path.empty())
    write_file(opt.trace_path,
               bdi::export_traces(result.traces, bdi::trace_format::jsonl));
  if (opt.summary && !result.traces.empty())
    std::cout << bdi::format_summary(
        bdi::summarize(result.traces, result.outcome));

  if (result.outcome != bdi::run_outcome::goal_reached) {
    std::cerr << "run ended: " << bdi::to_string(result.outcome) << " after cycle "
              << result.cycles << "\n";
    return 3;
  }
  return 0;
}

struct gen_options {
  int width = 0;
  int height = 0;
  std::uint64_t seed = 1;
  std::string output;
};

int cmd_gen(const gen_options& opt) {
  bdi::maze::maze_graph graph = bdi::maze::generate_maze(opt.width, opt.height,
                                                         opt.seed);
  std::string text = bdi::maze::render_maze_file(graph);
  if (opt.output.empty())
    std::cout << text;
  else
    write_file(opt.output, text);
  return 0;
}

struct oracle_options {
  std::string maze;
};

int cmd_oracle(const oracle_options& opt) {
  bdi::maze::loaded_maze m = bdi::maze::load_maze(read_file(opt.maze));
  bdi::maze::oracle_result result = bdi::maze::wall_follow_oracle(m.graph, m.config);

  std::cout << "decisions: [";
  for (std::size_t i = 0; i < result.decisions.size(); ++i)
    std::cout << (i ? ", " : "") << result.decisions[i];
  std::cout << "]\n";
  std::cout << "node visits: [";
  for (std::size_t i = 0; i < result.node_visits.size(); ++i)
    std::cout << (i ? ", " : "") << result.node_visits[i];
  std::cout << "]\n";
  std::cout << "traversals: " << result.traversals << "\n";
  char total[64];
  std::snprintf(total, sizeof total, "%.3f", result.total_sim_ms);
  std::cout << "total simulated: " << total << " ms\n";
  return 0;
}

struct plot_options {
  std::string trace;
  std::string style = "svg";
  std::string output;
};

int cmd_plot(const plot_options& opt) {
  std::vector<bdi::cycle_trace> traces = bdi::import_jsonl(read_file(opt.trace));
  if (traces.empty()) {
    std::cerr << "trace file '" << opt.trace << "' contains no cycles\n";
    return 2;
  }
  std::string rendered = bdi::render_timeline(
      traces, opt.style == "ascii" ? bdi::timeline_style::ascii
                                   : bdi::timeline_style::svg);
  if (opt.output.empty())
    std::cout << rendered;
  else
    write_file(opt.output, rendered);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"line-maze BDI agent toolchain"};
  app.require_subcommand(1);

  compile_options copt;
  CLI::App* compile = app.add_subcommand(
      "compile", "Compile an agent program to a binary plan table");
  compile->add_option("input", copt.input, "agent source file (.asl)")->required();
  compile->add_option("--out", copt.output, "output path (default: input with .bdip)");
  compile->add_flag("--dump", copt.dump, "print the compiled table as source");

  run_options ropt;
  CLI::App* run = app.add_subcommand("run", "Run an agent program on a maze");
  run->add_option("program", ropt.program, "agent program (.asl or .bdip)")
      ->required();
  run->add_option("--maze", ropt.maze, "maze file")->required();
  run->add_option("--max-cycles", ropt.max_cycles, "reasoning cycle budget");
  run->add_option("--trace", ropt.trace_path, "write a JSONL cycle trace here");
  run->add_flag("--summary,!--no-summary", ropt.summary,
                "print the run summary (default on)");
  run->add_flag("--no-wallclock", ropt.no_wallclock,
                "zero wall-clock fields in the trace for byte-stable output");

  gen_options gopt;
  CLI::App* gen = app.add_subcommand("gen", "Generate a random tree maze");
  gen->add_option("--width", gopt.width, "nodes per row (>= 2)")->required();
  gen->add_option("--height", gopt.height, "nodes per column (>= 2)")->required();
  gen->add_option("--seed", gopt.seed, "generator seed (default 1)");
  gen->add_option("--out", gopt.output, "output path (default: stdout)");

  oracle_options oopt;
  CLI::App* oracle = app.add_subcommand(
      "oracle", "Walk a maze with the left-hand reference walker");
  oracle->add_option("--maze", oopt.maze, "maze file")->required();

  plot_options popt;
  CLI::App* plot = app.add_subcommand("plot", "Render a trace as a timeline");
  plot->add_option("--trace", popt.trace, "JSONL trace file")->required();
  plot->add_option("--style", popt.style, "svg or ascii (default svg)")
      ->check(CLI::IsMember({"svg", "ascii"}));
  plot->add_option("--out", popt.output, "output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(compile)) return cmd_compile(copt);
    if (app.got_subcommand(run)) return cmd_run(ropt);
    if (app.got_subcommand(gen)) return cmd_gen(gopt);
    if (app.got_subcommand(oracle)) return cmd_oracle(oopt);
    if (app.got_subcommand(plot)) return cmd_plot(popt);
  } catch (const bdi::asl::parse_error& e) {
    std::cerr << "parse error at " << e.line << ":" << e.col << ": " << e.what()
              << "\n";
    return 2;
  } catch (const bdi::maze::maze_format_error& e) {
    std::cerr << "maze error at " << e.line << ":" << e.col << ": " << e.what()
              << "\n";
    return 2;
  } catch (const bdi::codec_error& e) {
    std::cerr << "codec error at byte " << e.offset << ": " << e.what() << "\n";
    return 2;
  } catch (const bdi::capacity_error& e) {
    std::cerr << "capacity error in cycle " << e.cycle << " (pool '" << e.pool
              << "'): " << e.what() << "\n";
    return 3;
  } catch (const bdi::maze::oracle_limit_error& e) {
    std::cerr << "oracle error: " << e.what() << "\n";
    return 3;
  } catch (const bdi::maze::env_fault& e) {
    std::cerr << "environment fault: " << e.what() << "\n";
    return 3;
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
