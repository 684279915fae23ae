#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <bdi/runtime.hpp>

// Line-maze world: a graph of intersections joined by straight line
// segments, a simulated differential robot driving on it, a deterministic
// maze generator, and an independent wall-following reference walker.
namespace bdi::maze {

enum class direction : std::uint8_t { north = 0, east = 1, south = 2, west = 3 };

direction left_of(direction d);
direction right_of(direction d);
direction reverse_of(direction d);
char to_char(direction d);
std::optional<direction> direction_from_char(char c);

struct maze_node {
  int row = 0;  // text-grid cell of the node character
  int col = 0;
  std::array<std::optional<std::uint16_t>, 4> exits;  // per direction -> segment

  bool operator==(const maze_node&) const = default;
};

struct maze_segment {
  std::uint16_t node_a = 0;
  std::uint16_t node_b = 0;
  direction dir_a_to_b = direction::north;
  double length_mm = 0.0;
  bool operator==(const maze_segment&) const = default;
};

struct maze_graph {
  std::vector<maze_node> nodes;
  std::vector<maze_segment> segments;
  std::uint16_t start_node = 0;
  std::uint16_t goal_node = 0;
  direction start_heading = direction::north;
  bool operator==(const maze_graph&) const = default;
};

struct env_config {
  double speed_mm_s = 100.0;
  double turn_ms = 500.0;
  double probe_ms = 50.0;
  double nudge_mm = 10.0;
  bool operator==(const env_config&) const = default;
};

struct maze_format_error : std::runtime_error {
  maze_format_error(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg), line(line_), col(col_) {}
  int line;  // 1-based position in the maze file
  int col;
};

struct loaded_maze {
  maze_graph graph;
  env_config config;
  double unit_mm = 50.0;
};

// Parses the maze text format: '#' comments and `key value` headers up to a
// line reading `map`, then the character grid ('+' node, 'S' start, 'E' goal,
// '-'/'|' segment cells, ' '/'.' empty).  Throws maze_format_error.
loaded_maze load_maze(std::string_view text);

// Randomized-DFS spanning tree over a width x height node grid; fully
// deterministic per seed.  Start is the first leaf the carve reaches, goal
// the leaf at maximal tree distance from it; every segment is one cell
// (50 mm).  Requires width, height >= 2.
maze_graph generate_maze(int width, int height, std::uint64_t seed);

// Renders a graph whose nodes carry grid coordinates back to maze-file text
// (header plus grid).  load_maze(render_maze_file(g)) reproduces g's shape.
std::string render_maze_file(const maze_graph& graph, double unit_mm = 50.0);

// Environment contract violation (bad action name, missing exit, probe off a
// node, ...).  Aborts the run that caused it.
struct env_fault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct robot_state {
  bool at_node = false;
  std::uint16_t node = 0;        // valid when at_node
  std::uint16_t segment = 0;     // valid when !at_node
  double segment_pos_mm = 0.0;   // distance from the segment's node_a end
  direction heading = direction::north;
  bool probed = false;           // an intersection probe is current
  bool stopped = false;
  double sim_clock_ms = 0.0;     // accumulated simulated time
};

// The world the agent acts in.  The robot starts nudge_mm onto the segment
// leaving the start node in the start heading, as if just placed on the line.
class simulation {
 public:
  simulation(maze_graph graph, env_config config);

  // Percept names for the robot's current situation: "at_intersection" on any
  // node; after a probe additionally "goal_found" and "path_left" /
  // "path_straight" / "path_right" for the exits relative to the heading,
  // excluding the reverse direction.  Mid-segment (or stopped): empty.
  std::vector<std::string> percepts() const;

  // Executes one named action synchronously and returns its simulated
  // duration in ms (also added to the robot's clock).  Throws env_fault on
  // contract violations.
  double perform(std::string_view action);

  const robot_state& robot() const { return robot_; }
  const maze_graph& graph() const { return graph_; }
  const env_config& config() const { return config_; }
  const std::vector<std::uint16_t>& node_visits() const { return visits_; }
  bool at_goal() const { return robot_.at_node && robot_.node == graph_.goal_node; }

 private:
  void depart(std::uint16_t node, std::uint16_t segment);

  maze_graph graph_;
  env_config config_;
  robot_state robot_;
  std::vector<std::uint16_t> visits_;  // nodes arrived at by follow_segment
};

struct oracle_result {
  std::vector<std::string> decisions;       // movement/stop choices at nodes
  std::vector<std::uint16_t> node_visits;   // arrival order
  std::size_t traversals = 0;               // follow_segment count
  double total_sim_ms = 0.0;
};

struct oracle_limit_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Independent reference walker: drive to the next node, probe, then take the
// first available of left / straight / right, else turn around; stop on the
// goal.  Uses the same simulation physics, no reasoning loop.  Throws
// oracle_limit_error after 4 * |segments| traversals (unreachable on trees).
oracle_result wall_follow_oracle(const maze_graph& graph, const env_config& config);

// Binds a simulation to a plan table for the reasoning runtime: percepts the
// table has no atom for are invisible to the agent; action atoms map back to
// their names.
class table_environment final : public environment {
 public:
  table_environment(const plan_table& table, simulation& sim);

  void collect_percepts(std::vector<atom_id>& out) override;
  double perform_action(atom_id action) override;

 private:
  simulation& sim_;
  const plan_table& table_;
  std::unordered_map<std::string, atom_id> percept_ids_;
};

}  // namespace bdi::maze
