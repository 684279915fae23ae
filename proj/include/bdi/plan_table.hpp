#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <bdi/asl.hpp>

// Compiled agent representation: atoms interned to dense 16-bit ids, plans
// flattened into fixed tables, plus the bit-exact binary codec (.bdip).
namespace bdi {

using atom_id = std::uint16_t;

struct compiled_literal {
  atom_id atom = 0;
  bool negated = false;
  bool operator==(const compiled_literal&) const = default;
};

struct compiled_formula {
  asl::body_opcode op = asl::body_opcode::action;
  atom_id atom = 0;
  bool operator==(const compiled_formula&) const = default;
};

struct compiled_plan {
  asl::trigger_kind trigger_kind = asl::trigger_kind::achieve_add;
  atom_id trigger_atom = 0;
  std::vector<compiled_literal> context;
  std::vector<compiled_formula> body;
  bool operator==(const compiled_plan&) const = default;
};

struct plan_table {
  std::vector<std::string> atoms;  // id -> name, unique, first-occurrence order
  std::vector<compiled_plan> plans;          // source order
  std::vector<atom_id> initial_beliefs;      // duplicates preserved
  std::vector<atom_id> initial_goals;        // duplicates preserved

  const std::string& atom_name(atom_id id) const { return atoms.at(id); }
  std::optional<atom_id> find_atom(std::string_view name) const;
  bool operator==(const plan_table&) const = default;
};

// Raised when a program exceeds a fixed-size pool.  `pool` names the
// exhausted resource; `cycle` is 0 outside the reasoning loop.
struct capacity_error : std::runtime_error {
  capacity_error(const std::string& msg, std::string pool_, std::uint64_t cycle_)
      : std::runtime_error(msg), pool(std::move(pool_)), cycle(cycle_) {}
  std::string pool;
  std::uint64_t cycle;
};

// Raised by decode (and encode, for unencodable tables); `offset` is the
// byte position the problem was detected at.
struct codec_error : std::runtime_error {
  codec_error(const std::string& msg, std::size_t offset_)
      : std::runtime_error(msg), offset(offset_) {}
  std::size_t offset;
};

// Interns atoms in first-occurrence order (initial beliefs, initial goals,
// then plans: trigger, context, body) and flattens the program.  Throws
// capacity_error when more than 65535 atoms, initial beliefs or goals are
// needed, or a context/body exceeds 255 entries.
plan_table compile(const asl::agent_program& program);

// Exact inverse of compile on its image.
asl::agent_program decompile(const plan_table& table);

std::vector<std::uint8_t> encode(const plan_table& table);
plan_table decode(std::span<const std::uint8_t> bytes);

// Human-readable disassembly: a '%' header line followed by the canonical
// program text, so the dump re-parses to an equivalent program.
std::string dump(const plan_table& table);

}  // namespace bdi
