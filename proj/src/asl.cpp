#include <bdi/asl.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace bdi::asl {

namespace {

enum class token_kind {
  atom,         // lowercase identifier
  plus_bang,    // +!
  plus,         // +
  minus,        // -
  bang_bang,    // !!
  bang,         // !
  colon,        // :
  ampersand,    // &
  arrow,        // <-
  semicolon,    // ;
  dot,          // .
  end,          // end of input
};

const char* token_name(token_kind k) {
  switch (k) {
    case token_kind::atom: return "atom";
    case token_kind::plus_bang: return "'+!'";
    case token_kind::plus: return "'+'";
    case token_kind::minus: return "'-'";
    case token_kind::bang_bang: return "'!!'";
    case token_kind::bang: return "'!'";
    case token_kind::colon: return "':'";
    case token_kind::ampersand: return "'&'";
    case token_kind::arrow: return "'<-'";
    case token_kind::semicolon: return "';'";
    case token_kind::dot: return "'.'";
    case token_kind::end: return "end of input";
  }
  return "?";
}

struct token {
  token_kind kind;
  std::string text;  // set for atoms
  int line;
  int col;
};

bool is_atom_start(char c) { return c >= 'a' && c <= 'z'; }
bool is_atom_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class lexer {
 public:
  explicit lexer(std::string_view src) : src_(src) {}

  token next() {
    skip_blank();
    int line = line_, col = col_;
    if (pos_ >= src_.size()) return {token_kind::end, "", line, col};
    char c = src_[pos_];
    if (is_atom_start(c)) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && is_atom_char(src_[pos_])) advance();
      return {token_kind::atom, std::string(src_.substr(start, pos_ - start)),
              line, col};
    }
    switch (c) {
      case '+':
        advance();
        if (peek() == '!') {
          advance();
          return {token_kind::plus_bang, "", line, col};
        }
        return {token_kind::plus, "", line, col};
      case '-': advance(); return {token_kind::minus, "", line, col};
      case '!':
        advance();
        if (peek() == '!') {
          advance();
          return {token_kind::bang_bang, "", line, col};
        }
        return {token_kind::bang, "", line, col};
      case ':': advance(); return {token_kind::colon, "", line, col};
      case '&': advance(); return {token_kind::ampersand, "", line, col};
      case ';': advance(); return {token_kind::semicolon, "", line, col};
      case '.': advance(); return {token_kind::dot, "", line, col};
      case '<':
        advance();
        if (peek() == '-') {
          advance();
          return {token_kind::arrow, "", line, col};
        }
        throw parse_error("unexpected character '<' (did you mean '<-'?)", line, col);
      default:
        throw parse_error(std::string("unexpected character '") + c +
                              "' (atoms start with a lowercase letter)",
                          line, col);
    }
  }

 private:
  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_blank() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class parser {
 public:
  explicit parser(std::string_view src) : lex_(src) { cur_ = lex_.next(); }

  agent_program parse() {
    agent_program program;
    while (cur_.kind != token_kind::end) {
      switch (cur_.kind) {
        case token_kind::atom: {  // initial belief
          program.initial_beliefs.push_back(cur_.text);
          consume();
          expect(token_kind::dot);
          break;
        }
        case token_kind::bang: {  // initial goal
          consume();
          program.initial_goals.push_back(expect_atom());
          expect(token_kind::dot);
          break;
        }
        case token_kind::plus_bang:
        case token_kind::plus:
        case token_kind::minus: {
          plan pl = parse_plan();
          pl.source_index = program.plans.size();
          program.plans.push_back(std::move(pl));
          break;
        }
        default:
          fail("expected a belief, '!' goal, or plan trigger ('+!', '+', '-')");
      }
    }
    return program;
  }

 private:
  plan parse_plan() {
    plan pl;
    switch (cur_.kind) {
      case token_kind::plus_bang: pl.trigger.kind = trigger_kind::achieve_add; break;
      case token_kind::plus: pl.trigger.kind = trigger_kind::belief_add; break;
      default: pl.trigger.kind = trigger_kind::belief_del; break;
    }
    consume();
    pl.trigger.atom = expect_atom();
    if (cur_.kind == token_kind::colon) {
      consume();
      pl.context.push_back(parse_literal());
      while (cur_.kind == token_kind::ampersand) {
        consume();
        pl.context.push_back(parse_literal());
      }
      if (cur_.kind != token_kind::arrow) fail("expected '&' or '<-'");
    }
    expect(token_kind::arrow);
    pl.body.push_back(parse_formula());
    while (cur_.kind == token_kind::semicolon) {
      consume();
      pl.body.push_back(parse_formula());
    }
    if (cur_.kind != token_kind::dot) fail("expected ';' or '.'");
    consume();
    return pl;
  }

  literal parse_literal() {
    if (cur_.kind != token_kind::atom)
      fail("expected a context literal (atom or 'not' atom)");
    if (cur_.text == "not") {
      consume();
      return {expect_atom(), true};
    }
    literal lit{cur_.text, false};
    consume();
    return lit;
  }

  body_formula parse_formula() {
    switch (cur_.kind) {
      case token_kind::atom: {
        body_formula f{body_opcode::action, cur_.text};
        consume();
        return f;
      }
      case token_kind::bang: consume(); return {body_opcode::achieve, expect_atom()};
      case token_kind::bang_bang:
        consume();
        return {body_opcode::achieve_new, expect_atom()};
      case token_kind::plus: consume(); return {body_opcode::add_belief, expect_atom()};
      case token_kind::minus:
        consume();
        return {body_opcode::del_belief, expect_atom()};
      default:
        fail("expected a body formula (action, '!', '!!', '+', or '-')");
    }
  }

  std::string expect_atom() {
    if (cur_.kind != token_kind::atom) fail("expected atom");
    std::string text = cur_.text;
    consume();
    return text;
  }

  void expect(token_kind kind) {
    if (cur_.kind != kind)
      fail(std::string("expected ") + token_name(kind));
    consume();
  }

  void consume() { cur_ = lex_.next(); }

  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream msg;
    msg << what << ", got " << token_name(cur_.kind);
    if (cur_.kind == token_kind::atom) msg << " '" << cur_.text << "'";
    throw parse_error(msg.str(), cur_.line, cur_.col);
  }

  lexer lex_;
  token cur_{token_kind::end, "", 1, 1};
};

void print_literal(std::ostream& out, const literal& lit) {
  if (lit.negated) out << "not ";
  out << lit.atom;
}

void print_formula(std::ostream& out, const body_formula& f) {
  switch (f.op) {
    case body_opcode::action: break;
    case body_opcode::achieve: out << '!'; break;
    case body_opcode::achieve_new: out << "!!"; break;
    case body_opcode::add_belief: out << '+'; break;
    case body_opcode::del_belief: out << '-'; break;
  }
  out << f.atom;
}

}  // namespace

agent_program parse_program(std::string_view source) {
  return parser(source).parse();
}

std::string pretty_print(const agent_program& program) {
  std::ostringstream out;
  for (const auto& b : program.initial_beliefs) out << b << ".\n";
  for (const auto& g : program.initial_goals) out << '!' << g << ".\n";
  for (const auto& pl : program.plans) {
    switch (pl.trigger.kind) {
      case trigger_kind::achieve_add: out << "+!"; break;
      case trigger_kind::belief_add: out << '+'; break;
      case trigger_kind::belief_del: out << '-'; break;
    }
    out << pl.trigger.atom;
    for (std::size_t i = 0; i < pl.context.size(); ++i) {
      out << (i == 0 ? " : " : " & ");
      print_literal(out, pl.context[i]);
    }
    out << " <- ";
    for (std::size_t i = 0; i < pl.body.size(); ++i) {
      if (i > 0) out << "; ";
      print_formula(out, pl.body[i]);
    }
    out << ".\n";
  }
  return out.str();
}

validation_report validate(const agent_program& program,
                           const std::set<std::string>& known_actions) {
  validation_report report;

  std::set<std::string> achieved_goals;   // goals posted anywhere (!g, !!g, initial)
  std::set<std::string> handled_goals;    // goals some plan handles
  for (const auto& g : program.initial_goals) achieved_goals.insert(g);
  for (const auto& pl : program.plans) {
    if (pl.trigger.kind == trigger_kind::achieve_add)
      handled_goals.insert(pl.trigger.atom);
    for (const auto& f : pl.body) {
      switch (f.op) {
        case body_opcode::action:
          if (!known_actions.count(f.atom)) {
            report.errors.push_back(
                {"plan " + std::to_string(pl.source_index) + ": unknown action '" +
                 f.atom + "'"});
          }
          break;
        case body_opcode::achieve:
        case body_opcode::achieve_new:
          achieved_goals.insert(f.atom);
          break;
        default:
          break;
      }
    }
  }

  // A later plan is dead when an earlier plan with the same trigger has a
  // context subset of the later context: whenever the later one is applicable,
  // the earlier one is too, and selection always prefers the earlier plan.
  auto context_set = [](const plan& pl) {
    std::set<std::pair<bool, std::string>> s;
    for (const auto& lit : pl.context) s.insert({lit.negated, lit.atom});
    return s;
  };
  for (std::size_t later = 0; later < program.plans.size(); ++later) {
    const plan& lp = program.plans[later];
    auto later_ctx = context_set(lp);
    for (std::size_t earlier = 0; earlier < later; ++earlier) {
      const plan& ep = program.plans[earlier];
      if (ep.trigger != lp.trigger) continue;
      auto earlier_ctx = context_set(ep);
      if (std::includes(later_ctx.begin(), later_ctx.end(), earlier_ctx.begin(),
                        earlier_ctx.end())) {
        report.warnings.push_back(
            {"plan " + std::to_string(later) + " is unreachable: plan " +
             std::to_string(earlier) +
             " has the same trigger and a subset context"});
        break;
      }
    }
  }

  for (const auto& g : achieved_goals) {
    if (!handled_goals.count(g)) {
      report.warnings.push_back({"goal '" + g + "' is achieved but no plan handles it"});
    }
  }
  return report;
}

}  // namespace bdi::asl
