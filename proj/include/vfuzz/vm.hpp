#pragma once

// A deterministic toy bytecode VM used as the fuzz target.
//
// Programs are lists of functions; each function is a list of basic blocks
// ending in a terminator. The first function is the entry point and the
// first block of a function is its entry block. The input is a byte string
// read positionally. Execution records every block entered (including the
// caller's block again when a call returns) and ends in a clean exit, a
// crash, or a resource-limit stop.

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "vfuzz/acfg.hpp"
#include "vfuzz/error.hpp"
#include "vfuzz/json_util.hpp"
#include "vfuzz/rng.hpp"
#include "vfuzz/scoring.hpp"

namespace vfuzz {

using Bytes = std::vector<std::uint8_t>;

enum class CrashKind : std::uint8_t { OobWrite, OobRead, DoubleFree, DivZero, Assert };

inline constexpr std::array<std::string_view, 5> kCrashKindNames{"OOB_WRITE", "OOB_READ", "DOUBLE_FREE", "DIV_ZERO",
                                                                 "ASSERT"};

inline std::string_view to_string(CrashKind k) { return kCrashKindNames[static_cast<std::size_t>(k)]; }

inline std::optional<CrashKind> crash_kind_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kCrashKindNames.size(); ++i)
    if (kCrashKindNames[i] == s) return static_cast<CrashKind>(i);
  return std::nullopt;
}

inline constexpr int kHeapSlots = 8;
inline constexpr std::size_t kMaxCallDepth = 64;

struct ByteCheck {
  std::size_t pos = 0;
  std::uint8_t value = 0;
  bool operator==(const ByteCheck&) const = default;
};

namespace insn {
struct Nop {
  bool operator==(const Nop&) const = default;
};
struct Call {
  std::string callee;
  bool operator==(const Call&) const = default;
};
// Compares input[pos] with value; sets no state.
struct CmpByte {
  std::size_t pos = 0;
  std::uint8_t value = 0;
  bool operator==(const CmpByte&) const = default;
};
struct Alloc {
  int reg = 0;
  std::uint32_t size = 0;
  bool operator==(const Alloc&) const = default;
};
struct Calloc {
  int reg = 0;
  std::uint32_t size = 0;
  bool operator==(const Calloc&) const = default;
};
struct Free {
  int reg = 0;
  bool operator==(const Free&) const = default;
};
// buffer[reg][input[pos]]
struct Load {
  int reg = 0;
  std::size_t pos = 0;
  bool operator==(const Load&) const = default;
};
struct Store {
  int reg = 0;
  std::size_t pos = 0;
  bool operator==(const Store&) const = default;
};
enum class ArithOp : std::uint8_t { Add, Div };
// acc = acc + input[pos]  |  acc = acc / input[pos]
struct Arith {
  ArithOp op = ArithOp::Add;
  std::size_t pos = 0;
  bool operator==(const Arith&) const = default;
};
// Crashes with `kind` and `bug_id` when every guard byte matches.
struct BugIf {
  CrashKind kind = CrashKind::Assert;
  int bug_id = 0;
  std::vector<ByteCheck> guard;
  bool operator==(const BugIf&) const = default;
};
}  // namespace insn

using Instruction = std::variant<insn::Nop, insn::Call, insn::CmpByte, insn::Alloc, insn::Calloc, insn::Free,
                                 insn::Load, insn::Store, insn::Arith, insn::BugIf>;

namespace term {
struct Jump {
  BlockId target = 0;
  bool operator==(const Jump&) const = default;
};
// input[pos] == value ? taken : fallthrough
struct Branch {
  std::size_t pos = 0;
  std::uint8_t value = 0;
  BlockId taken = 0;
  BlockId fallthrough = 0;
  bool operator==(const Branch&) const = default;
};
struct Return {
  bool operator==(const Return&) const = default;
};
struct Halt {
  bool operator==(const Halt&) const = default;
};
}  // namespace term

using Terminator = std::variant<term::Jump, term::Branch, term::Return, term::Halt>;

struct Block {
  BlockId id = 0;
  std::vector<Instruction> body;
  Terminator terminator = term::Halt{};
  bool operator==(const Block&) const = default;
};

struct Function {
  std::string name;
  std::vector<Block> blocks;
  bool operator==(const Function&) const = default;
};

struct Program {
  std::string name = "program";
  std::vector<Function> functions;
  bool operator==(const Program&) const = default;
};

// Operand kinds contributed by one instruction, for attribute extraction.
inline std::vector<OperandKind> operand_kinds(const Instruction& ins) {
  using K = OperandKind;
  return std::visit(
      [](const auto& i) -> std::vector<OperandKind> {
        using T = std::decay_t<decltype(i)>;
        if constexpr (std::is_same_v<T, insn::Nop>) return {K::Void};
        else if constexpr (std::is_same_v<T, insn::Call>) return {K::ImmediateNear};
        else if constexpr (std::is_same_v<T, insn::CmpByte>) return {K::DirectMemory, K::Immediate};
        else if constexpr (std::is_same_v<T, insn::Alloc> || std::is_same_v<T, insn::Calloc>)
          return {K::Register, K::Immediate};
        else if constexpr (std::is_same_v<T, insn::Free>) return {K::Register};
        else if constexpr (std::is_same_v<T, insn::Load>) return {K::Register, K::BaseIndex};
        else if constexpr (std::is_same_v<T, insn::Store>) return {K::Displacement, K::Register};
        else if constexpr (std::is_same_v<T, insn::Arith>) return {K::Register, K::DirectMemory};
        else {
          std::vector<OperandKind> out;
          for (std::size_t g = 0; g < i.guard.size(); ++g) {
            out.push_back(K::DirectMemory);
            out.push_back(K::Immediate);
          }
          return out;
        }
      },
      ins);
}

inline std::vector<BlockId> successors(const Terminator& t) {
  if (auto* j = std::get_if<term::Jump>(&t)) return {j->target};
  if (auto* b = std::get_if<term::Branch>(&t)) {
    if (b->taken == b->fallthrough) return {b->taken};
    return {b->taken, b->fallthrough};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Validation

// Throws InvalidArgument on the first broken invariant.
inline void check_program(const Program& p) {
  if (p.functions.empty()) throw InvalidArgument("program has no functions");
  std::set<std::string> names;
  for (const auto& f : p.functions)
    if (!names.insert(f.name).second) throw InvalidArgument("duplicate function '" + f.name + "'");
  for (const auto& f : p.functions) {
    if (f.blocks.empty()) throw InvalidArgument("function '" + f.name + "' has no blocks");
    std::set<BlockId> ids;
    for (const auto& b : f.blocks)
      if (!ids.insert(b.id).second)
        throw InvalidArgument("duplicate block " + std::to_string(b.id) + " in '" + f.name + "'");
    for (const auto& b : f.blocks) {
      for (BlockId s : successors(b.terminator))
        if (!ids.count(s))
          throw InvalidArgument("undefined label " + std::to_string(s) + " in '" + f.name + "'");
      for (const auto& ins : b.body) {
        if (auto* c = std::get_if<insn::Call>(&ins); c && !names.count(c->callee))
          throw InvalidArgument("call to undefined function '" + c->callee + "'");
        const int reg = std::visit(
            [](const auto& i) {
              if constexpr (requires { i.reg; }) return i.reg;
              else return 0;
            },
            ins);
        if (reg < 0 || reg >= kHeapSlots) throw InvalidArgument("register r" + std::to_string(reg) + " out of range");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Text format

namespace detail {

struct Cursor {
  std::string_view line;
  std::size_t line_no = 0;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg, std::size_t col) const {
    throw ParseError(msg, std::to_string(line_no) + ":" + std::to_string(col + 1));
  }

  void skip_ws() {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
  }
  bool at_end() {
    skip_ws();
    return pos >= line.size();
  }
  // Whitespace-delimited token; returns its column through `col`.
  std::string_view token(std::size_t& col) {
    skip_ws();
    col = pos;
    const std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' && line[pos] != '\r') ++pos;
    return line.substr(start, pos - start);
  }
  std::string_view require(const char* what) {
    std::size_t col;
    auto t = token(col);
    if (t.empty()) fail(std::string("expected ") + what, col);
    return t;
  }
  long long integer(const char* what, long long lo, long long hi) {
    std::size_t col;
    auto t = token(col);
    return parse_int(t, what, lo, hi, col);
  }
  long long parse_int(std::string_view t, const char* what, long long lo, long long hi, std::size_t col) const {
    if (t.empty()) fail(std::string("expected ") + what, col);
    long long v = 0;
    if (t.size() == 3 && t.front() == '\'' && t.back() == '\'') {
      v = static_cast<unsigned char>(t[1]);
    } else {
      int base = 10;
      std::string_view digits = t;
      bool neg = false;
      if (!digits.empty() && digits.front() == '-') {
        neg = true;
        digits.remove_prefix(1);
      }
      if (digits.size() > 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X')) {
        base = 16;
        digits.remove_prefix(2);
      }
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v, base);
      if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty())
        fail(std::string("invalid ") + what + " '" + std::string(t) + "'", col);
      if (neg) v = -v;
    }
    if (v < lo || v > hi)
      fail(std::string(what) + " " + std::to_string(v) + " out of range [" + std::to_string(lo) + ", " +
               std::to_string(hi) + "]",
           col);
    return v;
  }
  int reg() {
    std::size_t col;
    auto t = token(col);
    if (t.size() < 2 || t[0] != 'r') fail("expected register r0..r7", col);
    return static_cast<int>(parse_int(t.substr(1), "register", 0, kHeapSlots - 1, col + 1));
  }
  void end() {
    std::size_t col;
    auto t = token(col);
    if (!t.empty()) fail("unexpected '" + std::string(t) + "'", col);
  }
};

inline constexpr long long kMaxPos = 1 << 20;

}  // namespace detail

// Parses the line-oriented program text:
//
//   program NAME            (optional, before the first fn)
//   fn NAME
//   block N:
//     nop | call NAME | cmp POS VAL | alloc rR SIZE | calloc rR SIZE | free rR
//     load rR POS | store rR POS | arith add|div POS | bug KIND ID POS=VAL...
//     jmp N | jif POS VAL N M | ret | halt      (exactly one, last)
//
// `#` starts a comment. Byte values accept decimal, 0xHH or 'c'.
inline Program assemble(std::string_view text) {
  Program prog;
  bool named = false;
  Function* fn = nullptr;
  Block* blk = nullptr;
  bool terminated = true;
  std::size_t fn_line = 0;
  struct LabelUse {
    std::size_t fn;
    BlockId label;
    std::size_t line, col;
  };
  struct CallUse {
    std::string callee;
    std::size_t line, col;
  };
  std::vector<LabelUse> labels;
  std::vector<CallUse> calls;
  std::vector<std::set<BlockId>> defined;

  auto close_block = [&](std::size_t line_no) {
    if (blk && !terminated)
      throw ParseError("block " + std::to_string(blk->id) + " has no terminator", std::to_string(line_no) + ":1");
  };

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    detail::Cursor c{raw, line_no, 0};
    if (c.at_end()) {
      if (end == text.size()) break;
      continue;
    }
    std::size_t col;
    const std::string_view kw = c.token(col);

    if (kw == "program") {
      if (named || !prog.functions.empty()) c.fail("'program' must appear once, before any function", col);
      prog.name = std::string(c.require("program name"));
      c.end();
      named = true;
      continue;
    }
    if (kw == "fn") {
      close_block(line_no);
      if (fn && fn->blocks.empty())
        throw ParseError("function '" + fn->name + "' has no blocks", std::to_string(fn_line) + ":1");
      std::size_t ncol;
      std::string name(c.token(ncol));
      if (name.empty()) c.fail("expected function name", ncol);
      for (const auto& f : prog.functions)
        if (f.name == name) c.fail("duplicate function '" + name + "'", ncol);
      c.end();
      prog.functions.push_back(Function{name, {}});
      defined.emplace_back();
      fn = &prog.functions.back();
      blk = nullptr;
      terminated = true;
      fn_line = line_no;
      continue;
    }
    if (kw == "block") {
      if (!fn) c.fail("block outside of a function", col);
      close_block(line_no);
      std::size_t lcol;
      std::string_view label = c.token(lcol);
      if (label.empty() || label.back() != ':') c.fail("expected 'block N:'", lcol);
      const BlockId id = c.parse_int(label.substr(0, label.size() - 1), "block id", -(1LL << 40), 1LL << 40, lcol);
      if (!defined.back().insert(id).second) c.fail("duplicate block " + std::to_string(id), lcol);
      c.end();
      fn->blocks.push_back(Block{id, {}, term::Halt{}});
      blk = &fn->blocks.back();
      terminated = false;
      continue;
    }
    if (!blk) c.fail("instruction outside of a block", col);
    if (terminated) c.fail("instruction after terminator in block " + std::to_string(blk->id), col);

    auto label_at = [&](const char* what) {
      std::size_t lc;
      auto t = c.token(lc);
      const BlockId id = c.parse_int(t, what, -(1LL << 40), 1LL << 40, lc);
      labels.push_back({prog.functions.size() - 1, id, line_no, lc});
      return id;
    };
    auto byte = [&](const char* what) { return static_cast<std::uint8_t>(c.integer(what, 0, 255)); };
    auto position = [&] { return static_cast<std::size_t>(c.integer("position", 0, detail::kMaxPos)); };

    if (kw == "jmp") {
      blk->terminator = term::Jump{label_at("label")};
      terminated = true;
    } else if (kw == "jif") {
      term::Branch b;
      b.pos = position();
      b.value = byte("byte value");
      b.taken = label_at("label");
      b.fallthrough = label_at("label");
      blk->terminator = b;
      terminated = true;
    } else if (kw == "ret") {
      blk->terminator = term::Return{};
      terminated = true;
    } else if (kw == "halt") {
      blk->terminator = term::Halt{};
      terminated = true;
    } else if (kw == "nop") {
      blk->body.push_back(insn::Nop{});
    } else if (kw == "call") {
      std::size_t ccol;
      std::string callee(c.token(ccol));
      if (callee.empty()) c.fail("expected function name", ccol);
      calls.push_back({callee, line_no, ccol});
      blk->body.push_back(insn::Call{callee});
    } else if (kw == "cmp") {
      insn::CmpByte i;
      i.pos = position();
      i.value = byte("byte value");
      blk->body.push_back(i);
    } else if (kw == "alloc" || kw == "calloc") {
      const int r = c.reg();
      const auto size = static_cast<std::uint32_t>(c.integer("size", 0, 1 << 16));
      if (kw == "alloc") blk->body.push_back(insn::Alloc{r, size});
      else blk->body.push_back(insn::Calloc{r, size});
    } else if (kw == "free") {
      blk->body.push_back(insn::Free{c.reg()});
    } else if (kw == "load" || kw == "store") {
      const int r = c.reg();
      const std::size_t pos = position();
      if (kw == "load") blk->body.push_back(insn::Load{r, pos});
      else blk->body.push_back(insn::Store{r, pos});
    } else if (kw == "arith") {
      std::size_t ocol;
      auto op = c.token(ocol);
      insn::Arith a;
      if (op == "add") a.op = insn::ArithOp::Add;
      else if (op == "div") a.op = insn::ArithOp::Div;
      else c.fail("expected 'add' or 'div'", ocol);
      a.pos = position();
      blk->body.push_back(a);
    } else if (kw == "bug") {
      insn::BugIf b;
      std::size_t kcol;
      auto kind = crash_kind_from_string(c.token(kcol));
      if (!kind) c.fail("unknown crash kind", kcol);
      b.kind = *kind;
      b.bug_id = static_cast<int>(c.integer("bug id", 0, 1 << 30));
      while (!c.at_end()) {
        std::size_t gcol;
        auto g = c.token(gcol);
        auto eq = g.find('=');
        if (eq == std::string_view::npos) c.fail("expected POS=VAL", gcol);
        ByteCheck chk;
        chk.pos = static_cast<std::size_t>(c.parse_int(g.substr(0, eq), "position", 0, detail::kMaxPos, gcol));
        chk.value = static_cast<std::uint8_t>(c.parse_int(g.substr(eq + 1), "byte value", 0, 255, gcol + eq + 1));
        b.guard.push_back(chk);
      }
      if (b.guard.empty()) c.fail("bug needs at least one guard byte", col);
      blk->body.push_back(std::move(b));
    } else {
      c.fail("unknown instruction '" + std::string(kw) + "'", col);
    }
    c.end();
    if (end == text.size()) break;
  }
  close_block(line_no);
  if (prog.functions.empty()) throw ParseError("program has no functions", std::to_string(line_no) + ":1");
  if (fn && fn->blocks.empty())
    throw ParseError("function '" + fn->name + "' has no blocks", std::to_string(fn_line) + ":1");

  for (const auto& u : labels) {
    if (!defined[u.fn].count(u.label))
      throw ParseError("undefined label " + std::to_string(u.label), std::to_string(u.line) + ":" + std::to_string(u.col + 1));
  }
  for (const auto& u : calls) {
    bool found = std::any_of(prog.functions.begin(), prog.functions.end(),
                             [&](const Function& f) { return f.name == u.callee; });
    if (!found)
      throw ParseError("call to undefined function '" + u.callee + "'",
                       std::to_string(u.line) + ":" + std::to_string(u.col + 1));
  }
  return prog;
}

inline std::string disassemble(const Program& p) {
  std::ostringstream out;
  out << "program " << p.name << "\n";
  for (const auto& f : p.functions) {
    out << "\nfn " << f.name << "\n";
    for (const auto& b : f.blocks) {
      out << "block " << b.id << ":\n";
      for (const auto& ins : b.body) {
        out << "  ";
        std::visit(
            [&](const auto& i) {
              using T = std::decay_t<decltype(i)>;
              if constexpr (std::is_same_v<T, insn::Nop>) out << "nop";
              else if constexpr (std::is_same_v<T, insn::Call>) out << "call " << i.callee;
              else if constexpr (std::is_same_v<T, insn::CmpByte>) out << "cmp " << i.pos << ' ' << int(i.value);
              else if constexpr (std::is_same_v<T, insn::Alloc>) out << "alloc r" << i.reg << ' ' << i.size;
              else if constexpr (std::is_same_v<T, insn::Calloc>) out << "calloc r" << i.reg << ' ' << i.size;
              else if constexpr (std::is_same_v<T, insn::Free>) out << "free r" << i.reg;
              else if constexpr (std::is_same_v<T, insn::Load>) out << "load r" << i.reg << ' ' << i.pos;
              else if constexpr (std::is_same_v<T, insn::Store>) out << "store r" << i.reg << ' ' << i.pos;
              else if constexpr (std::is_same_v<T, insn::Arith>)
                out << "arith " << (i.op == insn::ArithOp::Add ? "add" : "div") << ' ' << i.pos;
              else {
                out << "bug " << to_string(i.kind) << ' ' << i.bug_id;
                for (const auto& g : i.guard) out << ' ' << g.pos << '=' << int(g.value);
              }
            },
            ins);
        out << "\n";
      }
      out << "  ";
      std::visit(
          [&](const auto& t) {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, term::Jump>) out << "jmp " << t.target;
            else if constexpr (std::is_same_v<T, term::Branch>)
              out << "jif " << t.pos << ' ' << int(t.value) << ' ' << t.taken << ' ' << t.fallthrough;
            else if constexpr (std::is_same_v<T, term::Return>) out << "ret";
            else out << "halt";
          },
          b.terminator);
      out << "\n";
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Execution

struct BlockLoc {
  std::uint32_t function = 0;  // index into the program's function list
  BlockId block = 0;
  auto operator<=>(const BlockLoc&) const = default;
  bool operator==(const BlockLoc&) const = default;
};

enum class Outcome : std::uint8_t { Exit, Crash, LimitStop };

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Exit: return "EXIT";
    case Outcome::Crash: return "CRASH";
    case Outcome::LimitStop: return "LIMIT_STOP";
  }
  return "?";
}

struct CrashInfo {
  CrashKind kind = CrashKind::Assert;
  BlockLoc site;
  std::optional<int> bug_id;
  bool operator==(const CrashInfo&) const = default;
};

struct ExecutionResult {
  std::vector<BlockLoc> path;
  Outcome outcome = Outcome::Exit;
  std::optional<CrashInfo> crash;  // set iff outcome == Crash
  std::size_t steps = 0;           // blocks entered == path.size()
  bool operator==(const ExecutionResult&) const = default;
};

// A program with resolved call targets and block indices, ready to run.
class Vm {
 public:
  explicit Vm(Program program) : program_(std::move(program)) {
    check_program(program_);
    std::unordered_map<std::string, std::uint32_t> fn_index;
    for (std::uint32_t i = 0; i < program_.functions.size(); ++i) fn_index.emplace(program_.functions[i].name, i);
    funcs_.resize(program_.functions.size());
    for (std::size_t f = 0; f < program_.functions.size(); ++f) {
      const auto& fn = program_.functions[f];
      std::unordered_map<BlockId, std::uint32_t> bidx;
      for (std::uint32_t b = 0; b < fn.blocks.size(); ++b) bidx.emplace(fn.blocks[b].id, b);
      auto& cf = funcs_[f];
      for (const auto& blk : fn.blocks) {
        CompiledBlock cb;
        cb.id = blk.id;
        for (const auto& ins : blk.body) {
          std::uint32_t callee = 0;
          if (auto* c = std::get_if<insn::Call>(&ins)) callee = fn_index.at(c->callee);
          cb.callees.push_back(callee);
        }
        if (auto* j = std::get_if<term::Jump>(&blk.terminator)) cb.next_a = bidx.at(j->target);
        if (auto* br = std::get_if<term::Branch>(&blk.terminator)) {
          cb.next_a = bidx.at(br->taken);
          cb.next_b = bidx.at(br->fallthrough);
        }
        cf.blocks.push_back(std::move(cb));
      }
    }
  }

  const Program& program() const noexcept { return program_; }

  ExecutionResult execute(std::span<const std::uint8_t> input, std::size_t step_limit) const {
    if (step_limit == 0) throw InvalidArgument("step_limit must be positive");
    ExecutionResult r;
    struct Frame {
      std::uint32_t fn, block;
      std::size_t next_insn;
    };
    struct Buffer {
      bool live = false;
      std::uint32_t size = 0;
    };
    std::array<Buffer, kHeapSlots> heap{};
    std::vector<Frame> stack;
    std::uint64_t acc = 0;

    auto byte_at = [&](std::size_t pos) -> int { return pos < input.size() ? input[pos] : -1; };
    auto value_at = [&](std::size_t pos) -> std::uint32_t { return pos < input.size() ? input[pos] : 0; };
    auto loc = [&](std::uint32_t f, std::uint32_t b) { return BlockLoc{f, funcs_[f].blocks[b].id}; };
    auto enter = [&](std::uint32_t f, std::uint32_t b) {
      if (r.steps == step_limit) {
        r.outcome = Outcome::LimitStop;
        return false;
      }
      r.path.push_back(loc(f, b));
      ++r.steps;
      return true;
    };
    auto crash = [&](CrashKind k, std::uint32_t f, std::uint32_t b, std::optional<int> id) {
      r.outcome = Outcome::Crash;
      r.crash = CrashInfo{k, loc(f, b), id};
    };

    std::uint32_t fn = 0, blk = 0;
    std::size_t ip = 0;
    if (!enter(fn, blk)) return r;
    stack.push_back({fn, blk, 0});

    for (;;) {
      const Block& src = program_.functions[fn].blocks[blk];
      const CompiledBlock& cb = funcs_[fn].blocks[blk];
      bool transferred = false;
      for (; ip < src.body.size(); ++ip) {
        const Instruction& ins = src.body[ip];
        switch (ins.index()) {
          case 1: {  // Call
            if (stack.size() >= kMaxCallDepth) {
              r.outcome = Outcome::LimitStop;
              return r;
            }
            stack.back() = {fn, blk, ip + 1};
            fn = cb.callees[ip];
            blk = 0;
            ip = 0;
            if (!enter(fn, blk)) return r;
            stack.push_back({fn, blk, 0});
            transferred = true;
            break;
          }
          case 3:
          case 4: {  // Alloc, Calloc
            const int reg = ins.index() == 3 ? std::get<insn::Alloc>(ins).reg : std::get<insn::Calloc>(ins).reg;
            const auto size = ins.index() == 3 ? std::get<insn::Alloc>(ins).size : std::get<insn::Calloc>(ins).size;
            heap[static_cast<std::size_t>(reg)] = {true, size};
            break;
          }
          case 5: {  // Free
            auto& buf = heap[static_cast<std::size_t>(std::get<insn::Free>(ins).reg)];
            if (!buf.live) {
              crash(CrashKind::DoubleFree, fn, blk, std::nullopt);
              return r;
            }
            buf.live = false;
            break;
          }
          case 6: {  // Load
            const auto& l = std::get<insn::Load>(ins);
            const auto& buf = heap[static_cast<std::size_t>(l.reg)];
            if (!buf.live || value_at(l.pos) >= buf.size) {
              crash(CrashKind::OobRead, fn, blk, std::nullopt);
              return r;
            }
            acc += value_at(l.pos);
            break;
          }
          case 7: {  // Store
            const auto& s = std::get<insn::Store>(ins);
            const auto& buf = heap[static_cast<std::size_t>(s.reg)];
            if (!buf.live || value_at(s.pos) >= buf.size) {
              crash(CrashKind::OobWrite, fn, blk, std::nullopt);
              return r;
            }
            break;
          }
          case 8: {  // Arith
            const auto& a = std::get<insn::Arith>(ins);
            const std::uint32_t v = value_at(a.pos);
            if (a.op == insn::ArithOp::Add) {
              acc += v;
            } else {
              if (v == 0) {
                crash(CrashKind::DivZero, fn, blk, std::nullopt);
                return r;
              }
              acc /= v;
            }
            break;
          }
          case 9: {  // BugIf
            const auto& b = std::get<insn::BugIf>(ins);
            const bool fires = std::all_of(b.guard.begin(), b.guard.end(),
                                           [&](const ByteCheck& g) { return byte_at(g.pos) == g.value; });
            if (fires) {
              crash(b.kind, fn, blk, b.bug_id);
              return r;
            }
            break;
          }
          default:  // Nop, CmpByte
            break;
        }
        if (transferred) break;
      }
      if (transferred) continue;

      const Terminator& t = src.terminator;
      if (std::holds_alternative<term::Halt>(t)) {
        r.outcome = Outcome::Exit;
        return r;
      }
      if (std::holds_alternative<term::Return>(t)) {
        stack.pop_back();
        if (stack.empty()) {
          r.outcome = Outcome::Exit;
          return r;
        }
        const Frame back = stack.back();
        fn = back.fn;
        blk = back.block;
        ip = back.next_insn;
        if (!enter(fn, blk)) return r;
        continue;
      }
      if (const auto* br = std::get_if<term::Branch>(&t)) {
        blk = byte_at(br->pos) == br->value ? cb.next_a : cb.next_b;
      } else {
        blk = cb.next_a;
      }
      ip = 0;
      if (!enter(fn, blk)) return r;
      stack.back() = {fn, blk, 0};
    }
  }

  std::vector<BlockLoc> block_locations() const {
    std::vector<BlockLoc> out;
    for (std::uint32_t f = 0; f < program_.functions.size(); ++f)
      for (const auto& b : program_.functions[f].blocks) out.push_back({f, b.id});
    return out;
  }

 private:
  struct CompiledBlock {
    BlockId id = 0;
    std::vector<std::uint32_t> callees;  // per body instruction; meaningful for Call only
    std::uint32_t next_a = 0, next_b = 0;
  };
  struct CompiledFunction {
    std::vector<CompiledBlock> blocks;
  };

  Program program_;
  std::vector<CompiledFunction> funcs_;
};

inline ExecutionResult execute(const Program& p, std::span<const std::uint8_t> input, std::size_t step_limit) {
  return Vm(p).execute(input, step_limit);
}

// ---------------------------------------------------------------------------
// ACFG extraction

// One ACFG per function over the default attribute layout. Calls count as
// instruction attributes, not inter-function edges; terminators contribute
// edges only.
inline ProgramAcfg extract_acfg(const Program& p) {
  check_program(p);
  ProgramAcfg out;
  out.program_name = p.name;
  out.schema_dim = slots::kDefaultDimension;
  for (const auto& f : p.functions) {
    Acfg g;
    g.function_name = f.name;
    g.entry = f.blocks.front().id;
    std::set<Edge> seen;
    for (const auto& b : f.blocks) {
      BasicBlockNode node;
      node.id = b.id;
      node.attrs.assign(slots::kDefaultDimension, 0.0);
      for (const auto& ins : b.body) {
        if (std::holds_alternative<insn::Call>(ins)) node.attrs[slots::kCall] += 1;
        if (std::holds_alternative<insn::Alloc>(ins)) node.attrs[slots::kMalloc] += 1;
        if (std::holds_alternative<insn::Calloc>(ins)) node.attrs[slots::kCalloc] += 1;
        if (std::holds_alternative<insn::Free>(ins)) node.attrs[slots::kFree] += 1;
        for (OperandKind k : operand_kinds(ins)) node.attrs[slots::operand(k)] += 1;
      }
      g.blocks.push_back(std::move(node));
      for (BlockId s : successors(b.terminator))
        if (seen.emplace(b.id, s).second) g.edges.emplace_back(b.id, s);
    }
    out.functions.push_back(std::move(g));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Target adapter

// What the fuzzing engine needs from a target.
class TargetAdapter {
 public:
  virtual ~TargetAdapter() = default;
  virtual ExecutionResult execute(std::span<const std::uint8_t> input) const = 0;
  virtual const std::vector<std::string>& function_names() const = 0;
  virtual std::vector<BlockLoc> block_universe() const = 0;
  virtual ProgramAcfg acfg() const = 0;

  BlockRef to_ref(const BlockLoc& b) const { return {function_names().at(b.function), b.block}; }
};

class VmTarget final : public TargetAdapter {
 public:
  static constexpr std::size_t kDefaultStepLimit = 100000;

  explicit VmTarget(Program p, std::size_t step_limit = kDefaultStepLimit) : vm_(std::move(p)), step_limit_(step_limit) {
    if (step_limit_ == 0) throw InvalidArgument("step_limit must be positive");
    for (const auto& f : vm_.program().functions) names_.push_back(f.name);
  }

  ExecutionResult execute(std::span<const std::uint8_t> input) const override { return vm_.execute(input, step_limit_); }
  const std::vector<std::string>& function_names() const override { return names_; }
  std::vector<BlockLoc> block_universe() const override { return vm_.block_locations(); }
  ProgramAcfg acfg() const override { return extract_acfg(vm_.program()); }
  const Program& program() const noexcept { return vm_.program(); }

 private:
  Vm vm_;
  std::size_t step_limit_;
  std::vector<std::string> names_;
};

// ---------------------------------------------------------------------------
// Target generation

struct PlannedBug {
  CrashKind kind = CrashKind::Assert;
  std::size_t guard_bytes = 1;
  std::size_t function = 0;  // index among helper functions
  bool at_entry = false;     // plant in the entry block instead of a diamond arm
};

// Layout: `main` calls helpers f0..f{k-1} in order, each call behind a
// one-byte gate when `gate_calls` is set. Each helper is a chain of
// diamonds branching on fresh input positions. Bugs sit in a diamond arm of
// their (vulnerable) helper, behind their own fresh guard positions.
struct TargetPlan {
  std::string name = "target";
  std::size_t helpers = 5;
  std::size_t min_diamonds = 1;
  std::size_t max_diamonds = 3;
  std::set<std::size_t> vulnerable;
  std::vector<PlannedBug> bugs;
  bool gate_calls = true;
};

struct GroundTruthBug {
  int id = 0;
  std::string function;
  CrashKind kind = CrashKind::Assert;
  std::vector<ByteCheck> guard;
  Bytes trigger;
};

struct GeneratedTarget {
  Program program;
  std::vector<GroundTruthBug> bugs;
};

inline std::string helper_name(std::size_t i) { return "f" + std::to_string(i); }

inline GeneratedTarget gen_target(const TargetPlan& plan, std::uint64_t seed) {
  if (plan.helpers == 0) throw InvalidArgument("plan needs at least one helper function");
  if (plan.min_diamonds < 1 || plan.min_diamonds > plan.max_diamonds) throw InvalidArgument("diamond range is empty");
  for (std::size_t v : plan.vulnerable)
    if (v >= plan.helpers) throw InvalidArgument("vulnerable function index " + std::to_string(v) + " out of range");
  for (const auto& b : plan.bugs) {
    if (b.function >= plan.helpers || !plan.vulnerable.count(b.function))
      throw InvalidArgument("bug planted in function " + std::to_string(b.function) + " which is not vulnerable");
    if (b.guard_bytes < 1 || b.guard_bytes > 64) throw InvalidArgument("guard depth must be in [1, 64]");
  }

  Rng rng = make_rng(seed, 0);
  std::size_t next_pos = 0;
  auto fresh = [&] { return next_pos++; };
  auto value = [&] { return static_cast<std::uint8_t>(uniform_int(rng, 1, 255)); };

  GeneratedTarget out;
  out.program.name = plan.name;

  // main
  Function main_fn{"main", {}};
  std::vector<ByteCheck> gates(plan.helpers);
  for (std::size_t i = 0; i < plan.helpers; ++i) {
    const auto gate_id = static_cast<BlockId>(2 * i);
    const auto call_id = gate_id + 1;
    const auto next_id = gate_id + 2;
    if (plan.gate_calls) {
      gates[i] = {fresh(), value()};
      main_fn.blocks.push_back({gate_id, {insn::CmpByte{gates[i].pos, gates[i].value}},
                                term::Branch{gates[i].pos, gates[i].value, call_id, next_id}});
    } else {
      main_fn.blocks.push_back({gate_id, {insn::Nop{}}, term::Jump{call_id}});
    }
    main_fn.blocks.push_back({call_id, {insn::Call{helper_name(i)}}, term::Jump{next_id}});
  }
  main_fn.blocks.push_back({static_cast<BlockId>(2 * plan.helpers), {}, term::Halt{}});
  out.program.functions.push_back(std::move(main_fn));

  // helpers
  struct Arm {
    std::size_t fn;
    BlockId block;
    ByteCheck header;
    bool taken;
  };
  std::vector<std::vector<Arm>> arms(plan.helpers);
  std::vector<std::size_t> body_positions;
  for (std::size_t i = 0; i < plan.helpers; ++i) {
    const bool vulnerable = plan.vulnerable.count(i) != 0;
    const int reg = static_cast<int>(i % kHeapSlots);
    const bool allocates = vulnerable || bernoulli(rng, 0.3);
    Function f{helper_name(i), {}};
    const auto diamonds = uniform_int<std::size_t>(rng, plan.min_diamonds, plan.max_diamonds);

    auto filler = [&](std::vector<Instruction>& body) {
      const int n = uniform_int(rng, 0, 3);
      for (int k = 0; k < n; ++k) {
        const std::size_t pos = body_positions.empty() ? 0 : body_positions[uniform_int<std::size_t>(rng, 0, body_positions.size() - 1)];
        switch (uniform_int(rng, 0, allocates ? 4 : 2)) {
          case 0: body.push_back(insn::Nop{}); break;
          case 1: body.push_back(insn::CmpByte{pos, value()}); break;
          case 2: body.push_back(insn::Arith{insn::ArithOp::Add, pos}); break;
          case 3: body.push_back(insn::Load{reg, pos}); break;
          default: body.push_back(insn::Store{reg, pos}); break;
        }
      }
    };

    Block entry{0, {}, term::Jump{1}};
    if (allocates) {
      if (vulnerable || bernoulli(rng, 0.5)) entry.body.push_back(insn::Alloc{reg, 256});
      else entry.body.push_back(insn::Calloc{reg, 256});
    }
    filler(entry.body);
    f.blocks.push_back(std::move(entry));
    BlockId id = 1;
    for (std::size_t d = 0; d < diamonds; ++d) {
      const ByteCheck hdr{fresh(), value()};
      body_positions.push_back(hdr.pos);
      const BlockId h = id, l = id + 1, r = id + 2, join = id + 3;
      Block header{h, {}, term::Branch{hdr.pos, hdr.value, l, r}};
      filler(header.body);
      Block left{l, {}, term::Jump{join}}, right{r, {}, term::Jump{join}};
      filler(left.body);
      filler(right.body);
      if (vulnerable && bernoulli(rng, 0.5)) left.body.push_back(insn::Calloc{(reg + 1) % kHeapSlots, 16});
      f.blocks.push_back(std::move(header));
      f.blocks.push_back(std::move(left));
      f.blocks.push_back(std::move(right));
      arms[i].push_back({i, l, hdr, true});
      arms[i].push_back({i, r, hdr, false});
      id += 3;
    }
    Block exit{id, {}, term::Return{}};
    if (allocates) exit.body.push_back(insn::Free{reg});
    f.blocks.push_back(std::move(exit));
    out.program.functions.push_back(std::move(f));
  }

  // bugs
  int bug_id = 1;
  for (const auto& pb : plan.bugs) {
    const auto& candidates = arms[pb.function];
    const Arm arm = pb.at_entry ? Arm{pb.function, 0, {}, false}
                                : candidates[uniform_int<std::size_t>(rng, 0, candidates.size() - 1)];
    GroundTruthBug gt;
    gt.id = bug_id++;
    gt.function = helper_name(pb.function);
    gt.kind = pb.kind;
    for (std::size_t g = 0; g < pb.guard_bytes; ++g) gt.guard.push_back({fresh(), value()});
    auto& fn = out.program.functions[pb.function + 1];
    auto blk = std::find_if(fn.blocks.begin(), fn.blocks.end(), [&](const Block& b) { return b.id == arm.block; });
    blk->body.insert(blk->body.begin(), insn::BugIf{pb.kind, gt.id, gt.guard});

    std::vector<ByteCheck> want = gt.guard;
    if (plan.gate_calls) want.push_back(gates[pb.function]);
    if (arm.taken) want.push_back(arm.header);  // the other arm needs input[pos] != value; filler 0 does that
    gt.trigger.clear();
    for (const auto& w : want) {
      if (gt.trigger.size() <= w.pos) gt.trigger.resize(w.pos + 1, 0);
      gt.trigger[w.pos] = w.value;
    }
    if (!pb.at_entry && !arm.taken && gt.trigger.size() <= arm.header.pos) gt.trigger.resize(arm.header.pos + 1, 0);
    out.bugs.push_back(std::move(gt));
  }
  // Every trigger covers all allocated positions so positions past the
  // guards read as present zero bytes.
  for (auto& gt : out.bugs) gt.trigger.resize(std::max(gt.trigger.size(), next_pos), 0);

  check_program(out.program);
  Vm vm(out.program);
  for (const auto& gt : out.bugs) {
    auto r = vm.execute(gt.trigger, VmTarget::kDefaultStepLimit);
    if (r.outcome != Outcome::Crash || !r.crash->bug_id || *r.crash->bug_id != gt.id)
      throw InvalidArgument("planted bug " + std::to_string(gt.id) + " is not reachable");
  }
  return out;
}

inline std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 15]);
  }
  return s;
}

inline Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2) throw ParseError("odd-length hex string");
  Bytes out;
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    unsigned v = 0;
    auto [p, ec] = std::from_chars(hex.data() + i, hex.data() + i + 2, v, 16);
    if (ec != std::errc() || p != hex.data() + i + 2) throw ParseError("invalid hex digit", "offset " + std::to_string(i));
    out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

inline json_util::json ground_truth_to_json(const std::vector<GroundTruthBug>& bugs) {
  json_util::json arr = json_util::json::array();
  for (const auto& b : bugs) {
    json_util::json guard = json_util::json::array();
    for (const auto& g : b.guard) guard.push_back({g.pos, g.value});
    arr.push_back({{"id", b.id},
                   {"function", b.function},
                   {"kind", std::string(to_string(b.kind))},
                   {"guard", std::move(guard)},
                   {"trigger_input_hex", to_hex(b.trigger)}});
  }
  return {{"bugs", std::move(arr)}};
}

inline std::vector<GroundTruthBug> ground_truth_from_json(const json_util::json& j) {
  using namespace json_util;
  check_keys(j, {"bugs"}, {"manifest"}, "");
  std::vector<GroundTruthBug> out;
  const auto& arr = get_array(j["bugs"], "/bugs");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string w = "/bugs/" + std::to_string(i);
    check_keys(arr[i], {"id", "function", "trigger_input_hex"}, {"kind", "guard"}, w);
    GroundTruthBug b;
    b.id = static_cast<int>(get_int(arr[i]["id"], w + "/id"));
    b.function = get_string(arr[i]["function"], w + "/function");
    try {
      b.trigger = from_hex(get_string(arr[i]["trigger_input_hex"], w + "/trigger_input_hex"));
    } catch (const ParseError& e) {
      throw SchemaError(e.what(), w + "/trigger_input_hex");
    }
    if (arr[i].contains("kind")) {
      auto k = crash_kind_from_string(get_string(arr[i]["kind"], w + "/kind"));
      if (!k) throw SchemaError("unknown crash kind", w + "/kind");
      b.kind = *k;
    }
    if (arr[i].contains("guard")) {
      for (const auto& g : get_array(arr[i]["guard"], w + "/guard")) {
        if (!g.is_array() || g.size() != 2) throw SchemaError("guard entry must be [pos, value]", w + "/guard");
        b.guard.push_back({static_cast<std::size_t>(get_int(g[0], w + "/guard")),
                           static_cast<std::uint8_t>(get_int(g[1], w + "/guard"))});
      }
    }
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace vfuzz
