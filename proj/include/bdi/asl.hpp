#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Frontend for the propositional agent language: AST, parser, validator and
// canonical printer.  Programs are flat lists of initial beliefs, initial
// goals and plans; atoms are plain lowercase identifiers (no terms, no
// variables).
namespace bdi::asl {

// Numeric values are shared with the binary plan-table wire format and must
// not be reordered.
enum class trigger_kind : std::uint8_t {
  achieve_add = 0,  // +!g
  belief_add = 1,   // +b
  belief_del = 2,   // -b
};

enum class body_opcode : std::uint8_t {
  action = 0,       // a        (external action)
  achieve = 1,      // !g       (subgoal, suspends the posting intention)
  achieve_new = 2,  // !!g      (detached goal, posting intention continues)
  add_belief = 3,   // +b
  del_belief = 4,   // -b
};

struct literal {
  std::string atom;
  bool negated = false;
  bool operator==(const literal&) const = default;
};

struct trigger_event {
  trigger_kind kind = trigger_kind::achieve_add;
  std::string atom;
  bool operator==(const trigger_event&) const = default;
};

struct body_formula {
  body_opcode op = body_opcode::action;
  std::string atom;
  bool operator==(const body_formula&) const = default;
};

struct plan {
  trigger_event trigger;
  std::vector<literal> context;  // conjunction; empty means always applicable
  std::vector<body_formula> body;  // never empty in parsed programs
  std::size_t source_index = 0;    // 0-based position among the plans
  bool operator==(const plan& other) const {
    return trigger == other.trigger && context == other.context && body == other.body;
  }
};

struct agent_program {
  std::vector<std::string> initial_beliefs;
  std::vector<std::string> initial_goals;
  std::vector<plan> plans;
  bool operator==(const agent_program&) const = default;
};

// Thrown on any lexical or syntactic error; line and column are 1-based and
// point at the offending token.
struct parse_error : std::runtime_error {
  parse_error(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg), line(line_), col(col_) {}
  int line;
  int col;
};

// Parses program text (LF or CRLF, '%' comments).  Throws parse_error.
agent_program parse_program(std::string_view source);

// Canonical text form: beliefs, then goals, then plans, one per line.
// parse_program(pretty_print(p)) reproduces p.
std::string pretty_print(const agent_program& program);

struct validation_issue {
  std::string message;
  bool operator==(const validation_issue&) const = default;
};

struct validation_report {
  std::vector<validation_issue> errors;
  std::vector<validation_issue> warnings;
  bool ok() const { return errors.empty(); }
};

// Static checks against a fixed action repertoire:
//  - error for each body action atom not in known_actions;
//  - warning for each plan shadowed by an earlier plan with the same trigger
//    and a context subset (the later plan can never be selected);
//  - warning for each achieved goal that no plan handles.
validation_report validate(const agent_program& program,
                           const std::set<std::string>& known_actions);

}  // namespace bdi::asl
