#pragma once

// Generators and independent oracles shared by the test binaries.

#include <cmath>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "vfuzz/vfuzz.hpp"

namespace vfuzz::testing {

// Valid graph with `blocks` nodes, random edges (self-loops allowed) and
// small integer attributes.
inline Acfg random_acfg(Rng& rng, std::size_t blocks, std::size_t dim, const std::string& name = "f",
                        double density = 0.3, int max_attr = 5) {
  Acfg g;
  g.function_name = name;
  std::set<BlockId> ids;
  while (ids.size() < blocks) ids.insert(uniform_int<BlockId>(rng, -50, 500));
  std::vector<BlockId> idv(ids.begin(), ids.end());
  std::shuffle(idv.begin(), idv.end(), rng);
  for (BlockId id : idv) {
    BasicBlockNode b;
    b.id = id;
    for (std::size_t k = 0; k < dim; ++k) b.attrs.push_back(uniform_int(rng, 0, max_attr));
    g.blocks.push_back(std::move(b));
  }
  g.entry = idv[uniform_int<std::size_t>(rng, 0, idv.size() - 1)];
  std::set<Edge> edges;
  for (BlockId u : idv)
    for (BlockId v : idv)
      if (bernoulli(rng, density)) edges.emplace(u, v);
  g.edges.assign(edges.begin(), edges.end());
  std::shuffle(g.edges.begin(), g.edges.end(), rng);
  return g;
}

inline ProgramAcfg random_program_acfg(Rng& rng, std::size_t dim) {
  ProgramAcfg p;
  p.program_name = "prog" + std::to_string(uniform_int(rng, 0, 999));
  p.schema_dim = dim;
  const int fns = uniform_int(rng, 0, 4);
  for (int i = 0; i < fns; ++i) {
    auto g = random_acfg(rng, uniform_int<std::size_t>(rng, 1, 6), dim, "fn" + std::to_string(i));
    // fractional attribute values exercise the decimal writer
    for (auto& b : g.blocks)
      for (auto& x : b.attrs)
        if (bernoulli(rng, 0.1)) x = uniform_real(rng, 0.0, 1e6);
    p.functions.push_back(std::move(g));
  }
  return p;
}

// Random well-formed program covering every instruction and terminator.
inline Program random_program(Rng& rng) {
  Program p;
  p.name = "p" + std::to_string(uniform_int(rng, 0, 9999));
  const int nf = uniform_int(rng, 1, 4);
  std::vector<std::string> names;
  for (int f = 0; f < nf; ++f) names.push_back(f == 0 ? "main" : "g" + std::to_string(f));
  for (int f = 0; f < nf; ++f) {
    Function fn{names[static_cast<std::size_t>(f)], {}};
    const int nb = uniform_int(rng, 1, 5);
    std::vector<BlockId> ids;
    std::set<BlockId> used;
    while (static_cast<int>(ids.size()) < nb) {
      BlockId id = uniform_int<BlockId>(rng, -5, 40);
      if (used.insert(id).second) ids.push_back(id);
    }
    for (BlockId id : ids) {
      Block b;
      b.id = id;
      const int ni = uniform_int(rng, 0, 5);
      for (int i = 0; i < ni; ++i) {
        const auto pos = uniform_int<std::size_t>(rng, 0, 64);
        const auto val = static_cast<std::uint8_t>(uniform_int(rng, 0, 255));
        const int reg = uniform_int(rng, 0, kHeapSlots - 1);
        switch (uniform_int(rng, 0, 9)) {
          case 0: b.body.push_back(insn::Nop{}); break;
          case 1: b.body.push_back(insn::Call{names[uniform_int<std::size_t>(rng, 0, names.size() - 1)]}); break;
          case 2: b.body.push_back(insn::CmpByte{pos, val}); break;
          case 3: b.body.push_back(insn::Alloc{reg, static_cast<std::uint32_t>(uniform_int(rng, 0, 300))}); break;
          case 4: b.body.push_back(insn::Calloc{reg, static_cast<std::uint32_t>(uniform_int(rng, 0, 300))}); break;
          case 5: b.body.push_back(insn::Free{reg}); break;
          case 6: b.body.push_back(insn::Load{reg, pos}); break;
          case 7: b.body.push_back(insn::Store{reg, pos}); break;
          case 8:
            b.body.push_back(insn::Arith{bernoulli(rng, 0.5) ? insn::ArithOp::Add : insn::ArithOp::Div, pos});
            break;
          default: {
            insn::BugIf bug;
            bug.kind = static_cast<CrashKind>(uniform_int(rng, 0, 4));
            bug.bug_id = uniform_int(rng, 0, 100);
            const int g = uniform_int(rng, 1, 3);
            for (int k = 0; k < g; ++k)
              bug.guard.push_back({uniform_int<std::size_t>(rng, 0, 64), static_cast<std::uint8_t>(uniform_int(rng, 0, 255))});
            b.body.push_back(std::move(bug));
          }
        }
      }
      auto pick = [&] { return ids[uniform_int<std::size_t>(rng, 0, ids.size() - 1)]; };
      switch (uniform_int(rng, 0, 3)) {
        case 0: b.terminator = term::Jump{pick()}; break;
        case 1:
          b.terminator = term::Branch{uniform_int<std::size_t>(rng, 0, 64), static_cast<std::uint8_t>(uniform_int(rng, 0, 255)),
                                      pick(), pick()};
          break;
        case 2: b.terminator = term::Return{}; break;
        default: b.terminator = term::Halt{}; break;
      }
      fn.blocks.push_back(std::move(b));
    }
    p.functions.push_back(std::move(fn));
  }
  return p;
}

// Central finite differences of the loss w.r.t. every parameter entry,
// visiting matrices in for_each order. Uses only forward() and loss().
inline std::vector<double> finite_difference_gradient(const Acfg& g, ModelParams m, const Hyperparams& h, int label,
                                                      double step = 1e-5) {
  std::vector<double> out;
  auto eval = [&](const ModelParams& mp) { return loss(forward(g, mp, h).Q, label); };
  std::vector<MatrixXd*> mats;
  m.for_each([&](MatrixXd& x) { mats.push_back(&x); });
  for (MatrixXd* x : mats) {
    for (Eigen::Index j = 0; j < x->cols(); ++j) {
      for (Eigen::Index i = 0; i < x->rows(); ++i) {
        const double orig = (*x)(i, j);
        (*x)(i, j) = orig + step;
        const double up = eval(m);
        (*x)(i, j) = orig - step;
        const double down = eval(m);
        (*x)(i, j) = orig;
        out.push_back((up - down) / (2 * step));
      }
    }
  }
  return out;
}

inline std::vector<double> flatten(const ModelParams& m) {
  std::vector<double> out;
  m.for_each([&](const MatrixXd& x) {
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      for (Eigen::Index i = 0; i < x.rows(); ++i) out.push_back(x(i, j));
  });
  return out;
}

// Relative error below 1e-4, or absolute error below 1e-8 near zero.
inline bool gradient_entry_matches(double analytic, double numeric) {
  const double diff = std::abs(analytic - numeric);
  if (diff <= 1e-8) return true;
  return diff / std::max(std::abs(analytic), std::abs(numeric)) < 1e-4;
}

// Worked example graph: b1 -> b2 -> b4, b1 -> b3 -> b6 -> b8 (plus b2 -> b5, b3 -> b7).
inline const std::vector<std::pair<BlockId, double>>& worked_example_scores() {
  static const std::vector<std::pair<BlockId, double>> s{{1, 2}, {2, 5}, {3, 1}, {4, 8}, {6, 1}, {8, 2}};
  return s;
}

}  // namespace vfuzz::testing
