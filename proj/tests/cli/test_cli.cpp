// End-to-end tests for the bdimaze command-line tool: each case spawns the
// real binary and checks exit codes, stream routing, and file outputs.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace {

std::string temp_dir() {
  static std::string dir = [] {
    char tmpl[] = "/tmp/bdimaze_cli_XXXXXX";
    char* made = mkdtemp(tmpl);
    REQUIRE(made != nullptr);
    return std::string(made);
  }();
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << content;
}

struct cli_result {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the tool with the given argument string inside the shared temp dir.
cli_result run_cli(const std::string& args) {
  const std::string dir = temp_dir();
  const std::string out_path = dir + "/last_stdout.txt";
  const std::string err_path = dir + "/last_stderr.txt";
  std::string cmd = "cd '" + dir + "' && '" + BDIMAZE_PATH + "' " + args +
                    " > '" + out_path + "' 2> '" + err_path + "'";
  int status = std::system(cmd.c_str());
  cli_result result;
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  result.exit_code = WEXITSTATUS(status);
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  return result;
}

const std::string k_listing = std::string(ASSETS_DIR) + "/listing1.asl";
const std::string k_demo_maze = std::string(ASSETS_DIR) + "/paper_maze.maze";

constexpr const char* k_single_segment_maze = "heading E\nmap\nS--E\n";

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("").exit_code == 1);
  CHECK(run_cli("frobnicate").exit_code == 1);
  CHECK(run_cli("run").exit_code == 1);            // missing required args
  CHECK(run_cli("gen --width 4").exit_code == 1);  // missing --height
  cli_result missing = run_cli("compile does_not_exist.asl");
  CHECK(missing.exit_code == 1);
  CHECK(missing.err.find("does_not_exist.asl") != std::string::npos);
}

TEST_CASE("compile writes a loadable binary and an optional dump") {
  spit(temp_dir() + "/prog.asl", slurp(k_listing));
  cli_result compiled = run_cli("compile prog.asl --dump");
  CHECK(compiled.exit_code == 0);
  CHECK(compiled.out.find("% 15 atoms, 8 plans") != std::string::npos);
  CHECK(compiled.out.find("+!make_decision : path_left <- turn_left.") !=
        std::string::npos);
  CHECK(compiled.err.find("prog.bdip") != std::string::npos);

  std::string binary = slurp(temp_dir() + "/prog.bdip");
  REQUIRE(binary.size() > 4);
  CHECK(binary.compare(0, 4, "BDIP") == 0);

  // The default output path replaces .asl with .bdip next to the input.
  cli_result renamed = run_cli("compile prog.asl --out other.bdip");
  CHECK(renamed.exit_code == 0);
  CHECK(slurp(temp_dir() + "/other.bdip") == binary);
}

TEST_CASE("compile rejects malformed and invalid programs") {
  spit(temp_dir() + "/broken.asl", "+!g <- .\n");
  cli_result broken = run_cli("compile broken.asl");
  CHECK(broken.exit_code == 2);
  CHECK(broken.err.find("parse error at 1:8") != std::string::npos);

  spit(temp_dir() + "/typo.asl", "!g.\n+!g <- frobnicate.\n");
  cli_result typo = run_cli("compile typo.asl");
  CHECK(typo.exit_code == 2);
  CHECK(typo.err.find("frobnicate") != std::string::npos);
}

TEST_CASE("run solves a one-segment maze and reports the summary") {
  spit(temp_dir() + "/seg.maze", k_single_segment_maze);
  cli_result r = run_cli("run '" + k_listing + "' --maze seg.maze");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("goal_reached") != std::string::npos);
  CHECK(r.out.find("950.000") != std::string::npos);  // total simulated ms
  CHECK(r.out.find("6") != std::string::npos);        // cycle count
  cli_result quiet =
      run_cli("run '" + k_listing + "' --maze seg.maze --no-summary");
  CHECK(quiet.exit_code == 0);
  CHECK(quiet.out.empty());
}

TEST_CASE("run exits nonzero when the goal is not reached") {
  spit(temp_dir() + "/seg.maze", k_single_segment_maze);
  spit(temp_dir() + "/dead.asl", "!g.\n");
  cli_result dead = run_cli("run dead.asl --maze seg.maze --no-summary");
  CHECK(dead.exit_code == 3);
  CHECK(dead.err.find("deadlock") != std::string::npos);

  cli_result limited = run_cli("run '" + k_listing +
                               "' --maze seg.maze --max-cycles 3 --no-summary");
  CHECK(limited.exit_code == 3);
  CHECK(limited.err.find("cycle_limit") != std::string::npos);
  CHECK(limited.err.find("3") != std::string::npos);
}

TEST_CASE("run rejects malformed inputs with a format error") {
  spit(temp_dir() + "/bad.maze", "heading E\nmap\nS-?E\n");
  cli_result bad_maze =
      run_cli("run '" + k_listing + "' --maze bad.maze --no-summary");
  CHECK(bad_maze.exit_code == 2);
  CHECK(bad_maze.err.find("maze error at 3:3") != std::string::npos);

  spit(temp_dir() + "/trunc.bdip", std::string("BDIP\x01", 5));
  spit(temp_dir() + "/seg.maze", k_single_segment_maze);
  cli_result trunc = run_cli("run trunc.bdip --maze seg.maze --no-summary");
  CHECK(trunc.exit_code == 2);
  CHECK(trunc.err.find("codec error") != std::string::npos);
}

TEST_CASE("source and compiled programs produce identical runs") {
  cli_result compiled =
      run_cli("compile '" + k_listing + "' --out roundtrip.bdip");
  REQUIRE(compiled.exit_code == 0);
  cli_result from_source =
      run_cli("run '" + k_listing + "' --maze '" + k_demo_maze +
              "' --trace src.jsonl --no-wallclock");
  cli_result from_binary =
      run_cli("run roundtrip.bdip --maze '" + k_demo_maze +
              "' --trace bin.jsonl --no-wallclock");
  REQUIRE(from_source.exit_code == 0);
  REQUIRE(from_binary.exit_code == 0);
  CHECK(from_source.out == from_binary.out);
  CHECK(slurp(temp_dir() + "/src.jsonl") == slurp(temp_dir() + "/bin.jsonl"));
  CHECK(slurp(temp_dir() + "/src.jsonl").find("\"wall_ns\":0") !=
        std::string::npos);
}

TEST_CASE("repeated runs with wall clock suppressed are byte-identical") {
  spit(temp_dir() + "/seg.maze", k_single_segment_maze);
  cli_result first = run_cli("run '" + k_listing +
                             "' --maze seg.maze --trace t1.jsonl --no-wallclock");
  cli_result second = run_cli("run '" + k_listing +
                              "' --maze seg.maze --trace t2.jsonl --no-wallclock");
  REQUIRE(first.exit_code == 0);
  REQUIRE(second.exit_code == 0);
  CHECK(first.out == second.out);
  CHECK(slurp(temp_dir() + "/t1.jsonl") == slurp(temp_dir() + "/t2.jsonl"));
}

TEST_CASE("gen is seed-deterministic and emits loadable mazes") {
  cli_result a = run_cli("gen --width 5 --height 4 --seed 11 --out a.maze");
  cli_result b = run_cli("gen --width 5 --height 4 --seed 11 --out b.maze");
  cli_result c = run_cli("gen --width 5 --height 4 --seed 12 --out c.maze");
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  REQUIRE(c.exit_code == 0);
  CHECK(slurp(temp_dir() + "/a.maze") == slurp(temp_dir() + "/b.maze"));
  CHECK(slurp(temp_dir() + "/a.maze") != slurp(temp_dir() + "/c.maze"));

  cli_result to_stdout = run_cli("gen --width 5 --height 4 --seed 11");
  CHECK(to_stdout.out == slurp(temp_dir() + "/a.maze"));

  cli_result walked = run_cli("oracle --maze a.maze");
  CHECK(walked.exit_code == 0);
  CHECK(walked.out.find("decisions: [") != std::string::npos);

  cli_result bad = run_cli("gen --width 1 --height 3");
  CHECK(bad.exit_code == 1);
  CHECK(bad.err.find("at least 2x2") != std::string::npos);
}

TEST_CASE("oracle reports the reference walk") {
  spit(temp_dir() + "/seg.maze", k_single_segment_maze);
  cli_result r = run_cli("oracle --maze seg.maze");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("decisions: [stop]") != std::string::npos);
  CHECK(r.out.find("node visits: [1]") != std::string::npos);
  CHECK(r.out.find("traversals: 1") != std::string::npos);
  CHECK(r.out.find("total simulated: 950.000 ms") != std::string::npos);
}

TEST_CASE("plot renders both timeline styles from a recorded trace") {
  spit(temp_dir() + "/seg.maze", k_single_segment_maze);
  cli_result traced = run_cli("run '" + k_listing +
                              "' --maze seg.maze --trace plot.jsonl --no-summary");
  REQUIRE(traced.exit_code == 0);

  cli_result svg = run_cli("plot --trace plot.jsonl --out out.svg");
  CHECK(svg.exit_code == 0);
  std::string svg_text = slurp(temp_dir() + "/out.svg");
  CHECK(svg_text.compare(0, 4, "<svg") == 0);
  CHECK(svg_text.find("intention execution") != std::string::npos);

  cli_result ascii = run_cli("plot --trace plot.jsonl --style ascii");
  CHECK(ascii.exit_code == 0);
  CHECK(ascii.out.find("timeline: 6 cycles") != std::string::npos);

  spit(temp_dir() + "/empty.jsonl", "\n");
  cli_result empty = run_cli("plot --trace empty.jsonl");
  CHECK(empty.exit_code == 2);
  CHECK(empty.err.find("no cycles") != std::string::npos);

  spit(temp_dir() + "/garbage.jsonl", "not json\n");
  cli_result garbage = run_cli("plot --trace garbage.jsonl");
  CHECK(garbage.exit_code == 2);

  cli_result bad_style = run_cli("plot --trace plot.jsonl --style tufte");
  CHECK(bad_style.exit_code == 1);
}
