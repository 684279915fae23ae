#include <bdi/maze.hpp>

#include <algorithm>
#include <cstdlib>
#include <map>
#include <queue>
#include <random>
#include <sstream>

namespace bdi::maze {

direction left_of(direction d) {
  return static_cast<direction>((static_cast<int>(d) + 3) % 4);
}
direction right_of(direction d) {
  return static_cast<direction>((static_cast<int>(d) + 1) % 4);
}
direction reverse_of(direction d) {
  return static_cast<direction>((static_cast<int>(d) + 2) % 4);
}

char to_char(direction d) { return "NESW"[static_cast<int>(d)]; }

std::optional<direction> direction_from_char(char c) {
  switch (c) {
    case 'N': return direction::north;
    case 'E': return direction::east;
    case 'S': return direction::south;
    case 'W': return direction::west;
    default: return std::nullopt;
  }
}

namespace {

[[noreturn]] void fail(const std::string& msg, int line, int col) {
  throw maze_format_error(msg, line, col);
}

bool is_node_char(char c) { return c == '+' || c == 'S' || c == 'E'; }

std::string rtrim(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.pop_back();
  return s;
}

double parse_positive_real(const std::string& value, const std::string& key,
                           int line) {
  const char* begin = value.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !(v > 0.0))
    fail("header key '" + key + "' needs a positive number, got '" + value + "'",
         line, 1);
  return v;
}

long parse_positive_int(const std::string& value, const std::string& key,
                        int line) {
  const char* begin = value.c_str();
  char* end = nullptr;
  long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0' || v <= 0)
    fail("header key '" + key + "' needs a positive integer, got '" + value + "'",
         line, 1);
  return v;
}

}  // namespace

loaded_maze load_maze(std::string_view text) {
  std::vector<std::string> lines;
  {
    std::string cur;
    for (char c : text) {
      if (c == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) lines.push_back(cur);
  }

  loaded_maze result;
  std::optional<direction> heading;
  int heading_line = 0;
  int nudge_line = 0;
  int map_line = 0;  // 1-based line of the `map` marker
  std::size_t grid_begin = 0;

  for (std::size_t i = 0; i < lines.size(); ++i) {
    int line_no = static_cast<int>(i) + 1;
    std::string line = rtrim(lines[i]);
    if (line.empty() || line[0] == '#') continue;
    if (line == "map") {
      map_line = line_no;
      grid_begin = i + 1;
      break;
    }
    std::size_t sp = line.find(' ');
    if (sp == std::string::npos)
      fail("expected 'key value' header line or 'map', got '" + line + "'",
           line_no, 1);
    std::string key = line.substr(0, sp);
    std::string value = line.substr(sp + 1);
    while (!value.empty() && value.front() == ' ') value.erase(value.begin());
    if (key == "unit_mm") {
      result.unit_mm = static_cast<double>(parse_positive_int(value, key, line_no));
    } else if (key == "speed_mm_s") {
      result.config.speed_mm_s = parse_positive_real(value, key, line_no);
    } else if (key == "turn_ms") {
      result.config.turn_ms = parse_positive_real(value, key, line_no);
    } else if (key == "probe_ms") {
      result.config.probe_ms = parse_positive_real(value, key, line_no);
    } else if (key == "nudge_mm") {
      result.config.nudge_mm = parse_positive_real(value, key, line_no);
      nudge_line = line_no;
    } else if (key == "heading") {
      if (value.size() != 1 || !direction_from_char(value[0]))
        fail("header key 'heading' needs one of N, E, S, W, got '" + value + "'",
             line_no, 1);
      heading = direction_from_char(value[0]);
      heading_line = line_no;
    } else {
      fail("unknown header key '" + key + "'", line_no, 1);
    }
  }
  if (map_line == 0)
    fail("missing 'map' line", static_cast<int>(lines.size()) + 1, 1);
  if (!heading) fail("missing required header 'heading'", map_line, 1);

  // Normalize the grid: strip '\r', pad rows to a rectangle, '.' = empty.
  std::vector<std::string> grid(lines.begin() + grid_begin, lines.end());
  std::size_t width = 0;
  for (auto& row : grid) {
    while (!row.empty() && row.back() == '\r') row.pop_back();
    for (char& c : row)
      if (c == '.') c = ' ';
    width = std::max(width, row.size());
  }
  for (auto& row : grid) row.resize(width, ' ');
  int H = static_cast<int>(grid.size());
  int W = static_cast<int>(width);
  auto file_line = [&](int r) { return map_line + 1 + r; };

  // Pass 1: classify characters, find nodes and the unique S and E.
  maze_graph& g = result.graph;
  std::map<std::pair<int, int>, std::uint16_t> node_at;
  std::optional<std::uint16_t> start, goal;
  std::pair<int, int> goal_pos{0, 0};
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      char ch = grid[r][c];
      if (ch == ' ' || ch == '-' || ch == '|') continue;
      if (!is_node_char(ch))
        fail(std::string("unexpected map character '") + ch + "'", file_line(r),
             c + 1);
      if (g.nodes.size() >= 0xFFFF) fail("too many intersections", file_line(r), c + 1);
      auto id = static_cast<std::uint16_t>(g.nodes.size());
      if (ch == 'S') {
        if (start) fail("more than one start node 'S'", file_line(r), c + 1);
        start = id;
      } else if (ch == 'E') {
        if (goal) fail("more than one goal node 'E'", file_line(r), c + 1);
        goal = id;
        goal_pos = {r, c};
      }
      node_at[{r, c}] = id;
      g.nodes.push_back({r, c, {}});
    }
  }

  // Pass 2: segment runs, in row-major order of their first cell.
  auto add_segment = [&](std::uint16_t a, std::uint16_t b, direction dir,
                         double length) {
    auto id = static_cast<std::uint16_t>(g.segments.size());
    g.segments.push_back({a, b, dir, length});
    g.nodes[a].exits[static_cast<int>(dir)] = id;
    g.nodes[b].exits[static_cast<int>(reverse_of(dir))] = id;
  };
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      char ch = grid[r][c];
      if (ch == '-' && (c == 0 || grid[r][c - 1] != '-')) {
        int e = c;
        while (e + 1 < W && grid[r][e + 1] == '-') ++e;
        bool left_ok = c > 0 && is_node_char(grid[r][c - 1]);
        bool right_ok = e + 1 < W && is_node_char(grid[r][e + 1]);
        if (!left_ok || !right_ok)
          fail("'-' run is not terminated by intersections on both ends",
               file_line(r), c + 1);
        add_segment(node_at[{r, c - 1}], node_at[{r, e + 1}], direction::east,
                    (e - c + 1) * result.unit_mm);
      } else if (ch == '|' && (r == 0 || grid[r - 1][c] != '|')) {
        int e = r;
        while (e + 1 < H && grid[e + 1][c] == '|') ++e;
        bool top_ok = r > 0 && is_node_char(grid[r - 1][c]);
        bool bottom_ok = e + 1 < H && is_node_char(grid[e + 1][c]);
        if (!top_ok || !bottom_ok)
          fail("'|' run is not terminated by intersections on both ends",
               file_line(r), c + 1);
        add_segment(node_at[{r - 1, c}], node_at[{e + 1, c}], direction::south,
                    (e - r + 1) * result.unit_mm);
      }
    }
  }
  if (g.segments.size() > 0xFFFF) fail("too many segments", map_line, 1);

  if (!start) fail("no start node 'S' in map", map_line, 1);
  if (!goal) fail("no goal node 'E' in map", map_line, 1);
  g.start_node = *start;
  g.goal_node = *goal;
  g.start_heading = *heading;

  if (!g.nodes[g.start_node].exits[static_cast<int>(*heading)])
    fail(std::string("start node has no exit in heading '") + to_char(*heading) +
             "'",
         heading_line, 1);

  // Reachability of E from S over the segment graph.
  {
    std::vector<char> seen(g.nodes.size(), 0);
    std::queue<std::uint16_t> frontier;
    frontier.push(g.start_node);
    seen[g.start_node] = 1;
    while (!frontier.empty()) {
      std::uint16_t n = frontier.front();
      frontier.pop();
      for (const auto& exit : g.nodes[n].exits) {
        if (!exit) continue;
        const maze_segment& s = g.segments[*exit];
        std::uint16_t other = (s.node_a == n) ? s.node_b : s.node_a;
        if (!seen[other]) {
          seen[other] = 1;
          frontier.push(other);
        }
      }
    }
    if (!seen[g.goal_node])
      fail("goal 'E' is unreachable from start 'S'", file_line(goal_pos.first),
           goal_pos.second + 1);
  }

  double min_len = g.segments.empty() ? 0.0 : g.segments[0].length_mm;
  for (const auto& s : g.segments) min_len = std::min(min_len, s.length_mm);
  if (!(result.config.nudge_mm < min_len))
    fail("nudge_mm (" + std::to_string(result.config.nudge_mm) +
             ") must be smaller than the shortest segment (" +
             std::to_string(min_len) + " mm)",
         nudge_line ? nudge_line : map_line, 1);

  return result;
}

maze_graph generate_maze(int width, int height, std::uint64_t seed) {
  if (width < 2 || height < 2)
    throw std::invalid_argument("maze dimensions must be at least 2x2");

  std::mt19937_64 rng(seed);
  const int n = width * height;
  auto cell_id = [&](int r, int c) { return r * width + c; };

  struct carve_edge {
    int row, col;  // grid cell of the connector character
    int a, b;      // node ids, a above/left of b
    bool horizontal;
  };
  std::vector<carve_edge> edges;
  std::vector<char> visited(n, 0);
  std::vector<int> stack;
  int first_leaf = -1;

  visited[0] = 1;
  stack.push_back(0);
  while (!stack.empty()) {
    int cur = stack.back();
    int r = cur / width, c = cur % width;
    // Candidate moves in N, E, S, W order; the rng picks among them.
    struct move { int id; carve_edge edge; };
    std::vector<move> moves;
    if (r > 0 && !visited[cell_id(r - 1, c)])
      moves.push_back({cell_id(r - 1, c),
                       {2 * r - 1, 2 * c, cell_id(r - 1, c), cur, false}});
    if (c + 1 < width && !visited[cell_id(r, c + 1)])
      moves.push_back({cell_id(r, c + 1),
                       {2 * r, 2 * c + 1, cur, cell_id(r, c + 1), true}});
    if (r + 1 < height && !visited[cell_id(r + 1, c)])
      moves.push_back({cell_id(r + 1, c),
                       {2 * r + 1, 2 * c, cur, cell_id(r + 1, c), false}});
    if (c > 0 && !visited[cell_id(r, c - 1)])
      moves.push_back({cell_id(r, c - 1),
                       {2 * r, 2 * c - 1, cell_id(r, c - 1), cur, true}});
    if (moves.empty()) {
      if (first_leaf < 0) first_leaf = cur;
      stack.pop_back();
      continue;
    }
    const move& m = moves[rng() % moves.size()];
    visited[m.id] = 1;
    edges.push_back(m.edge);
    stack.push_back(m.id);
  }

  // Canonical segment order: row-major position of the connector cell, the
  // same order load_maze discovers runs in.
  std::sort(edges.begin(), edges.end(), [](const carve_edge& x, const carve_edge& y) {
    return std::pair(x.row, x.col) < std::pair(y.row, y.col);
  });

  maze_graph g;
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) g.nodes.push_back({2 * r, 2 * c, {}});
  for (const auto& e : edges) {
    auto id = static_cast<std::uint16_t>(g.segments.size());
    direction dir = e.horizontal ? direction::east : direction::south;
    g.segments.push_back({static_cast<std::uint16_t>(e.a),
                          static_cast<std::uint16_t>(e.b), dir, 50.0});
    g.nodes[e.a].exits[static_cast<int>(dir)] = id;
    g.nodes[e.b].exits[static_cast<int>(reverse_of(dir))] = id;
  }

  g.start_node = static_cast<std::uint16_t>(first_leaf);

  // Goal: the leaf farthest from the start along the tree (smallest id wins ties).
  {
    std::vector<int> dist(n, -1);
    std::queue<int> frontier;
    frontier.push(first_leaf);
    dist[first_leaf] = 0;
    while (!frontier.empty()) {
      int u = frontier.front();
      frontier.pop();
      for (const auto& exit : g.nodes[u].exits) {
        if (!exit) continue;
        const maze_segment& s = g.segments[*exit];
        int v = (s.node_a == u) ? s.node_b : s.node_a;
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          frontier.push(v);
        }
      }
    }
    int best = first_leaf;
    for (int v = 0; v < n; ++v)
      if (dist[v] > dist[best]) best = v;
    g.goal_node = static_cast<std::uint16_t>(best);
  }

  for (int d = 0; d < 4; ++d) {
    if (g.nodes[g.start_node].exits[d]) {
      g.start_heading = static_cast<direction>(d);
      break;
    }
  }
  return g;
}

std::string render_maze_file(const maze_graph& graph, double unit_mm) {
  int max_row = 0, max_col = 0;
  for (const auto& n : graph.nodes) {
    max_row = std::max(max_row, n.row);
    max_col = std::max(max_col, n.col);
  }
  std::vector<std::string> grid(max_row + 1, std::string(max_col + 1, ' '));
  for (const auto& s : graph.segments) {
    const maze_node& a = graph.nodes[s.node_a];
    const maze_node& b = graph.nodes[s.node_b];
    if (a.row == b.row) {
      for (int c = std::min(a.col, b.col) + 1; c < std::max(a.col, b.col); ++c)
        grid[a.row][c] = '-';
    } else {
      for (int r = std::min(a.row, b.row) + 1; r < std::max(a.row, b.row); ++r)
        grid[r][a.col] = '|';
    }
  }
  for (const auto& n : graph.nodes) grid[n.row][n.col] = '+';
  grid[graph.nodes[graph.start_node].row][graph.nodes[graph.start_node].col] = 'S';
  grid[graph.nodes[graph.goal_node].row][graph.nodes[graph.goal_node].col] = 'E';

  std::ostringstream out;
  out << "unit_mm " << static_cast<long long>(unit_mm) << "\n";
  out << "heading " << to_char(graph.start_heading) << "\n";
  out << "map\n";
  for (auto& row : grid) out << rtrim(row) << "\n";
  return out.str();
}

simulation::simulation(maze_graph graph, env_config config)
    : graph_(std::move(graph)), config_(config) {
  if (graph_.nodes.empty() || graph_.segments.empty())
    throw env_fault("maze has no segments to drive on");
  if (!(config_.speed_mm_s > 0) || !(config_.turn_ms > 0) ||
      !(config_.probe_ms > 0) || !(config_.nudge_mm > 0))
    throw env_fault("environment timings must be positive");
  double min_len = graph_.segments[0].length_mm;
  for (const auto& s : graph_.segments) min_len = std::min(min_len, s.length_mm);
  if (!(config_.nudge_mm < min_len))
    throw env_fault("nudge_mm must be smaller than the shortest segment");

  const maze_node& start = graph_.nodes[graph_.start_node];
  auto seg = start.exits[static_cast<int>(graph_.start_heading)];
  if (!seg) throw env_fault("start node has no exit in the start heading");
  robot_.heading = graph_.start_heading;
  depart(graph_.start_node, *seg);
}

void simulation::depart(std::uint16_t node, std::uint16_t segment) {
  const maze_segment& s = graph_.segments[segment];
  robot_.at_node = false;
  robot_.node = 0;
  robot_.segment = segment;
  robot_.segment_pos_mm =
      (s.node_a == node) ? config_.nudge_mm : s.length_mm - config_.nudge_mm;
  robot_.probed = false;
}

std::vector<std::string> simulation::percepts() const {
  std::vector<std::string> out;
  if (robot_.stopped || !robot_.at_node) return out;
  out.emplace_back("at_intersection");
  if (!robot_.probed) return out;
  const maze_node& n = graph_.nodes[robot_.node];
  if (robot_.node == graph_.goal_node) out.emplace_back("goal_found");
  if (n.exits[static_cast<int>(left_of(robot_.heading))])
    out.emplace_back("path_left");
  if (n.exits[static_cast<int>(robot_.heading)]) out.emplace_back("path_straight");
  if (n.exits[static_cast<int>(right_of(robot_.heading))])
    out.emplace_back("path_right");
  return out;
}

double simulation::perform(std::string_view action) {
  auto arrive = [this](std::uint16_t node) {
    robot_.at_node = true;
    robot_.node = node;
    robot_.probed = false;
    visits_.push_back(node);
  };
  auto heading_exit = [this](const char* what) -> std::uint16_t {
    const maze_node& n = graph_.nodes[robot_.node];
    auto seg = n.exits[static_cast<int>(robot_.heading)];
    if (!seg)
      throw env_fault(std::string(what) + ": no exit in heading '" +
                      to_char(robot_.heading) + "' at this intersection");
    return *seg;
  };
  auto require_at_node = [this](const char* what) {
    if (!robot_.at_node)
      throw env_fault(std::string(what) + " requires the robot to be at an intersection");
  };

  double duration = 0.0;
  if (action == "follow_segment") {
    if (robot_.at_node) {
      // Equivalent to forward-then-follow: ride the whole segment ahead.
      std::uint16_t seg_id = heading_exit("follow_segment");
      const maze_segment& s = graph_.segments[seg_id];
      duration = s.length_mm * 1000.0 / config_.speed_mm_s;
      arrive(s.node_a == robot_.node ? s.node_b : s.node_a);
    } else {
      const maze_segment& s = graph_.segments[robot_.segment];
      bool toward_b = robot_.heading == s.dir_a_to_b;
      if (!toward_b && robot_.heading != reverse_of(s.dir_a_to_b))
        throw env_fault("robot heading is not aligned with its segment");
      double remaining =
          toward_b ? s.length_mm - robot_.segment_pos_mm : robot_.segment_pos_mm;
      duration = remaining * 1000.0 / config_.speed_mm_s;
      arrive(toward_b ? s.node_b : s.node_a);
    }
  } else if (action == "check_situation") {
    require_at_node("check_situation");
    robot_.probed = true;
    duration = config_.probe_ms;
  } else if (action == "turn_left" || action == "turn_right" ||
             action == "rotate_180") {
    require_at_node(std::string(action).c_str());
    direction target = action == "turn_left"    ? left_of(robot_.heading)
                       : action == "turn_right" ? right_of(robot_.heading)
                                                : reverse_of(robot_.heading);
    std::uint16_t node = robot_.node;
    direction prev = robot_.heading;
    robot_.heading = target;
    std::uint16_t seg_id;
    try {
      seg_id = heading_exit(std::string(action).c_str());
    } catch (...) {
      robot_.heading = prev;
      throw;
    }
    depart(node, seg_id);
    duration = (action == "rotate_180") ? 2.0 * config_.turn_ms : config_.turn_ms;
  } else if (action == "forward") {
    require_at_node("forward");
    std::uint16_t seg_id = heading_exit("forward");
    depart(robot_.node, seg_id);
    duration = config_.nudge_mm * 1000.0 / config_.speed_mm_s;
  } else if (action == "stop") {
    robot_.stopped = true;
  } else {
    throw env_fault("unknown action '" + std::string(action) + "'");
  }
  robot_.sim_clock_ms += duration;
  return duration;
}

oracle_result wall_follow_oracle(const maze_graph& graph, const env_config& config) {
  simulation sim(graph, config);
  oracle_result result;
  const std::size_t limit = 4 * graph.segments.size();
  for (;;) {
    sim.perform("follow_segment");
    if (++result.traversals > limit)
      throw oracle_limit_error(
          "wall follower exceeded " + std::to_string(limit) +
          " traversals; the maze loops in a way the left-hand rule cannot escape");
    sim.perform("check_situation");
    const robot_state& r = sim.robot();
    const maze_node& n = graph.nodes[r.node];
    std::string decision;
    if (r.node == graph.goal_node)
      decision = "stop";
    else if (n.exits[static_cast<int>(left_of(r.heading))])
      decision = "turn_left";
    else if (n.exits[static_cast<int>(r.heading)])
      decision = "forward";
    else if (n.exits[static_cast<int>(right_of(r.heading))])
      decision = "turn_right";
    else
      decision = "rotate_180";
    result.decisions.push_back(decision);
    sim.perform(decision);
    if (decision == "stop") break;
  }
  result.node_visits = sim.node_visits();
  result.total_sim_ms = sim.robot().sim_clock_ms;
  return result;
}

table_environment::table_environment(const plan_table& table, simulation& sim)
    : sim_(sim), table_(table) {
  static const char* const k_percepts[] = {"at_intersection", "goal_found",
                                           "path_left", "path_straight",
                                           "path_right"};
  for (const char* name : k_percepts) {
    if (auto id = table.find_atom(name)) percept_ids_.emplace(name, *id);
  }
}

void table_environment::collect_percepts(std::vector<atom_id>& out) {
  out.clear();
  for (const auto& name : sim_.percepts()) {
    auto it = percept_ids_.find(name);
    if (it != percept_ids_.end()) out.push_back(it->second);
  }
}

double table_environment::perform_action(atom_id action) {
  return sim_.perform(table_.atom_name(action));
}

}  // namespace bdi::maze
