#include <bdi/plan_table.hpp>

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace bdi {

namespace {

constexpr std::uint8_t k_magic[4] = {'B', 'D', 'I', 'P'};
constexpr std::uint8_t k_version = 0x01;
constexpr std::size_t k_max_count = 0xFFFF;
constexpr std::size_t k_max_seq = 0xFF;

class interner {
 public:
  atom_id intern(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    if (atoms_.size() >= k_max_count)
      throw capacity_error("atom table overflow: more than 65535 distinct atoms",
                           "atom", 0);
    atom_id id = static_cast<atom_id>(atoms_.size());
    index_.emplace(name, id);
    atoms_.push_back(name);
    return id;
  }

  std::vector<std::string> take() { return std::move(atoms_); }

 private:
  std::vector<std::string> atoms_;
  std::unordered_map<std::string, atom_id> index_;
};

class byte_reader {
 public:
  explicit byte_reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }
  bool exhausted() const { return pos_ == bytes_.size(); }

  std::uint8_t u8(const char* what) {
    need(1, what);
    return bytes_[pos_++];
  }

  std::uint16_t u16(const char* what) {
    need(2, what);
    std::uint16_t lo = bytes_[pos_];
    std::uint16_t hi = bytes_[pos_ + 1];
    pos_ += 2;
    return static_cast<std::uint16_t>(lo | (hi << 8));
  }

  std::string str(std::size_t len, const char* what) {
    need(len, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), len);
    pos_ += len;
    return s;
  }

 private:
  void need(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw codec_error(std::string("truncated input while reading ") + what, pos_);
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

atom_id checked_atom(std::uint16_t id, std::size_t atom_count, std::size_t offset,
                     const char* what) {
  if (id >= atom_count) {
    std::ostringstream msg;
    msg << what << " atom id " << id << " out of range (table has " << atom_count
        << " atoms)";
    throw codec_error(msg.str(), offset);
  }
  return id;
}

}  // namespace

std::optional<atom_id> plan_table::find_atom(std::string_view name) const {
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i] == name) return static_cast<atom_id>(i);
  }
  return std::nullopt;
}

plan_table compile(const asl::agent_program& program) {
  plan_table table;
  interner atoms;

  if (program.initial_beliefs.size() > k_max_count)
    throw capacity_error("more than 65535 initial beliefs", "initial belief", 0);
  if (program.initial_goals.size() > k_max_count)
    throw capacity_error("more than 65535 initial goals", "initial goal", 0);
  if (program.plans.size() > k_max_count)
    throw capacity_error("more than 65535 plans", "plan", 0);

  for (const auto& b : program.initial_beliefs)
    table.initial_beliefs.push_back(atoms.intern(b));
  for (const auto& g : program.initial_goals)
    table.initial_goals.push_back(atoms.intern(g));

  for (const auto& pl : program.plans) {
    compiled_plan cp;
    cp.trigger_kind = pl.trigger.kind;
    cp.trigger_atom = atoms.intern(pl.trigger.atom);
    if (pl.context.size() > k_max_seq)
      throw capacity_error("plan " + std::to_string(pl.source_index) +
                               ": more than 255 context literals",
                           "context", 0);
    if (pl.body.size() > k_max_seq)
      throw capacity_error("plan " + std::to_string(pl.source_index) +
                               ": more than 255 body formulas",
                           "body", 0);
    for (const auto& lit : pl.context)
      cp.context.push_back({atoms.intern(lit.atom), lit.negated});
    for (const auto& f : pl.body) cp.body.push_back({f.op, atoms.intern(f.atom)});
    table.plans.push_back(std::move(cp));
  }

  table.atoms = atoms.take();
  if (table.atoms.size() > k_max_count)
    throw capacity_error("atom table overflow: more than 65535 distinct atoms",
                         "atom", 0);
  return table;
}

asl::agent_program decompile(const plan_table& table) {
  asl::agent_program program;
  for (atom_id b : table.initial_beliefs)
    program.initial_beliefs.push_back(table.atom_name(b));
  for (atom_id g : table.initial_goals)
    program.initial_goals.push_back(table.atom_name(g));
  for (std::size_t i = 0; i < table.plans.size(); ++i) {
    const compiled_plan& cp = table.plans[i];
    asl::plan pl;
    pl.trigger.kind = cp.trigger_kind;
    pl.trigger.atom = table.atom_name(cp.trigger_atom);
    for (const auto& lit : cp.context)
      pl.context.push_back({table.atom_name(lit.atom), lit.negated});
    for (const auto& f : cp.body) pl.body.push_back({f.op, table.atom_name(f.atom)});
    pl.source_index = i;
    program.plans.push_back(std::move(pl));
  }
  return program;
}

std::vector<std::uint8_t> encode(const plan_table& table) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), std::begin(k_magic), std::end(k_magic));
  out.push_back(k_version);
  put_u16(out, static_cast<std::uint16_t>(table.atoms.size()));
  put_u16(out, static_cast<std::uint16_t>(table.plans.size()));
  put_u16(out, static_cast<std::uint16_t>(table.initial_beliefs.size()));
  put_u16(out, static_cast<std::uint16_t>(table.initial_goals.size()));

  for (const auto& name : table.atoms) {
    if (name.size() > k_max_seq)
      throw codec_error("atom name '" + name.substr(0, 16) +
                            "...' exceeds 255 bytes",
                        out.size());
    out.push_back(static_cast<std::uint8_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
  }

  for (const auto& pl : table.plans) {
    out.push_back(static_cast<std::uint8_t>(pl.trigger_kind));
    put_u16(out, pl.trigger_atom);
    out.push_back(static_cast<std::uint8_t>(pl.context.size()));
    for (const auto& lit : pl.context) {
      out.push_back(lit.negated ? 0x01 : 0x00);
      put_u16(out, lit.atom);
    }
    out.push_back(static_cast<std::uint8_t>(pl.body.size()));
    for (const auto& f : pl.body) {
      out.push_back(static_cast<std::uint8_t>(f.op));
      put_u16(out, f.atom);
    }
  }

  for (atom_id b : table.initial_beliefs) put_u16(out, b);
  for (atom_id g : table.initial_goals) put_u16(out, g);
  return out;
}

plan_table decode(std::span<const std::uint8_t> bytes) {
  byte_reader in(bytes);

  if (bytes.size() < 4 || !std::equal(std::begin(k_magic), std::end(k_magic),
                                      bytes.begin())) {
    throw codec_error("bad magic: expected \"BDIP\"", 0);
  }
  in.str(4, "magic");

  std::size_t version_offset = in.offset();
  std::uint8_t version = in.u8("version");
  if (version != k_version) {
    std::ostringstream msg;
    msg << "unknown format version " << int(version) << " (expected "
        << int(k_version) << ")";
    throw codec_error(msg.str(), version_offset);
  }

  std::uint16_t atom_count = in.u16("atom count");
  std::uint16_t plan_count = in.u16("plan count");
  std::uint16_t belief_count = in.u16("initial belief count");
  std::uint16_t goal_count = in.u16("initial goal count");

  plan_table table;
  table.atoms.reserve(atom_count);
  for (std::uint16_t i = 0; i < atom_count; ++i) {
    std::uint8_t len = in.u8("atom length");
    table.atoms.push_back(in.str(len, "atom name"));
  }

  table.plans.reserve(plan_count);
  for (std::uint16_t i = 0; i < plan_count; ++i) {
    compiled_plan pl;
    std::size_t at = in.offset();
    std::uint8_t kind = in.u8("trigger kind");
    if (kind > 2) throw codec_error("invalid trigger kind " + std::to_string(kind), at);
    pl.trigger_kind = static_cast<asl::trigger_kind>(kind);
    at = in.offset();
    pl.trigger_atom = checked_atom(in.u16("trigger atom"), atom_count, at, "trigger");

    std::uint8_t ctx_count = in.u8("context count");
    for (std::uint8_t c = 0; c < ctx_count; ++c) {
      at = in.offset();
      std::uint8_t negated = in.u8("negation flag");
      if (negated > 1)
        throw codec_error("invalid negation flag " + std::to_string(negated), at);
      at = in.offset();
      atom_id atom = checked_atom(in.u16("context atom"), atom_count, at, "context");
      pl.context.push_back({atom, negated == 1});
    }

    std::uint8_t body_count = in.u8("body count");
    for (std::uint8_t b = 0; b < body_count; ++b) {
      at = in.offset();
      std::uint8_t op = in.u8("body opcode");
      if (op > 4) throw codec_error("invalid body opcode " + std::to_string(op), at);
      at = in.offset();
      atom_id atom = checked_atom(in.u16("body atom"), atom_count, at, "body");
      pl.body.push_back({static_cast<asl::body_opcode>(op), atom});
    }
    table.plans.push_back(std::move(pl));
  }

  for (std::uint16_t i = 0; i < belief_count; ++i) {
    std::size_t at = in.offset();
    table.initial_beliefs.push_back(
        checked_atom(in.u16("initial belief"), atom_count, at, "initial belief"));
  }
  for (std::uint16_t i = 0; i < goal_count; ++i) {
    std::size_t at = in.offset();
    table.initial_goals.push_back(
        checked_atom(in.u16("initial goal"), atom_count, at, "initial goal"));
  }

  if (!in.exhausted())
    throw codec_error("trailing bytes after table", in.offset());
  return table;
}

std::string dump(const plan_table& table) {
  std::ostringstream out;
  out << "% " << table.atoms.size() << " atoms, " << table.plans.size()
      << " plans\n";
  out << asl::pretty_print(decompile(table));
  return out.str();
}

}  // namespace bdi
