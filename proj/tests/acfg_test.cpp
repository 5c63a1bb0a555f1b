#include <gtest/gtest.h>

#include "support.hpp"

namespace vfuzz {
namespace {

Acfg single_block() {
  Acfg g;
  g.function_name = "f";
  g.entry = 0;
  g.blocks.push_back({0, std::vector<double>(slots::kDefaultDimension, 0.0)});
  return g;
}

Acfg with_edges(std::vector<BlockId> ids, std::vector<Edge> edges) {
  Acfg g;
  g.function_name = "f";
  g.entry = ids.front();
  for (BlockId id : ids) g.blocks.push_back({id, std::vector<double>(4, 1.0)});
  g.edges = std::move(edges);
  return g;
}

TEST(AttributeSchema, DefaultLayout) {
  const auto& s = AttributeSchema::standard();
  ASSERT_EQ(s.dimension(), 255u);
  EXPECT_EQ(s.names()[slots::kCall], "insn.call");
  EXPECT_EQ(s.index_of("operand.void"), 244u);
  EXPECT_EQ(s.index_of("operand.near"), 251u);
  EXPECT_EQ(s.index_of("string.malloc"), slots::kMalloc);
  EXPECT_EQ(s.index_of("string.calloc"), 253u);
  EXPECT_EQ(s.index_of("string.free"), 254u);
  std::size_t insn = 0;
  for (const auto& n : s.names()) insn += n.rfind("insn.", 0) == 0;
  EXPECT_EQ(insn, 244u);
}

TEST(AttributeSchema, RejectsDuplicateNames) {
  EXPECT_THROW(AttributeSchema({"a", "b", "a"}), InvalidArgument);
}

TEST(Validate, MinimalGraphIsOk) {
  auto r = validate(single_block());
  EXPECT_TRUE(r.ok());
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Validate, MissingEdgeTarget) {
  auto g = single_block();
  g.edges.push_back({0, 7});
  auto r = validate(g);
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(r.has("edge target missing"));
  EXPECT_NE(r.violations.front().element.find("[0,7]"), std::string::npos);
}

TEST(Validate, AttributeWidthMismatch) {
  auto g = single_block();
  g.blocks[0].attrs.resize(254);
  EXPECT_TRUE(validate(g).has("attribute width mismatch"));
}

TEST(Validate, ReportsEachBrokenInvariant) {
  Acfg g = with_edges({1, 2}, {{1, 2}, {1, 2}, {9, 1}});
  g.blocks.push_back({2, std::vector<double>(4, 0.0)});
  g.blocks[0].attrs[0] = -1;
  g.blocks[1].attrs[1] = std::nan("");
  g.entry = 42;
  auto r = validate(g, 4);
  EXPECT_TRUE(r.has("duplicate edge"));
  EXPECT_TRUE(r.has("edge source missing"));
  EXPECT_TRUE(r.has("duplicate block id"));
  EXPECT_TRUE(r.has("negative attribute"));
  EXPECT_TRUE(r.has("non-finite attribute"));
  EXPECT_TRUE(r.has("entry missing"));
}

TEST(Validate, UnreachableBlocksOnlyWarn) {
  auto g = with_edges({0, 1, 2}, {{0, 1}});
  auto r = validate(g, 4);
  EXPECT_TRUE(r.ok());
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.warnings[0].element, "block 2");
}

TEST(Validate, SelfLoopAllowed) { EXPECT_TRUE(validate(with_edges({0}, {{0, 0}}), 4).ok()); }

TEST(Validate, TotalOverRandomInput) {
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    Acfg g;
    const int n = uniform_int(rng, 0, 5);
    for (int k = 0; k < n; ++k) {
      std::vector<double> attrs(static_cast<std::size_t>(uniform_int(rng, 0, 5)));
      for (auto& x : attrs) x = uniform_real(rng, -2, 2);
      g.blocks.push_back({uniform_int<BlockId>(rng, 0, 3), attrs});
    }
    for (int k = 0; k < uniform_int(rng, 0, 5); ++k)
      g.edges.emplace_back(uniform_int<BlockId>(rng, 0, 4), uniform_int<BlockId>(rng, 0, 4));
    g.entry = uniform_int<BlockId>(rng, 0, 4);
    EXPECT_NO_THROW(validate(g, 3));
  }
}

TEST(Predecessors, WorkedExampleEdges) {
  auto g = with_edges({1, 2, 3, 4}, {{1, 2}, {1, 3}, {2, 4}});
  EXPECT_EQ(predecessors(g, 4), (std::set<BlockId>{2}));
  EXPECT_TRUE(predecessors(g, 1).empty());
}

TEST(Predecessors, Diamond) {
  auto g = with_edges({1, 2, 3, 4}, {{1, 2}, {1, 3}, {2, 4}, {3, 4}});
  EXPECT_EQ(predecessors(g, 4), (std::set<BlockId>{2, 3}));
}

TEST(Predecessors, UnknownBlock) {
  EXPECT_THROW(predecessors(single_block(), 3), InvalidArgument);
}

TEST(Predecessors, ConsistentWithEdges) {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    auto g = testing::random_acfg(rng, uniform_int<std::size_t>(rng, 1, 8), 2);
    std::set<Edge> edges(g.edges.begin(), g.edges.end());
    for (const auto& v : g.blocks) {
      auto preds = predecessors(g, v.id);
      for (const auto& u : g.blocks) EXPECT_EQ(preds.count(u.id) == 1, edges.count({u.id, v.id}) == 1);
    }
  }
}

TEST(Serialize, RoundTripProperty) {
  Rng rng(2024);
  for (int i = 0; i < 200; ++i) {
    auto p = testing::random_program_acfg(rng, uniform_int<std::size_t>(rng, 1, 12));
    EXPECT_EQ(parse_program_acfg(serialize(p)), p);
  }
}

TEST(Serialize, EmptyFunctionList) {
  auto p = parse_program_acfg(R"({"program":"x","schema_dim":255,"functions":[]})");
  EXPECT_EQ(p.program_name, "x");
  EXPECT_TRUE(p.functions.empty());
}

TEST(Serialize, TruncatedDocumentHasPosition) {
  ProgramAcfg p;
  p.program_name = "t";
  p.functions.push_back(single_block());
  const std::string text = serialize(p);
  try {
    parse_program_acfg(text.substr(0, text.size() / 2));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(e.where().find("byte"), std::string::npos);
  }
}

TEST(Serialize, RejectsUnknownFields) {
  EXPECT_THROW(parse_program_acfg(R"({"program":"x","schema_dim":2,"functions":[],"extra":1})"), SchemaError);
  EXPECT_THROW(
      parse_program_acfg(
          R"({"program":"x","schema_dim":1,"functions":[{"name":"f","entry":0,"blocks":[{"id":0,"attrs":[1],"w":2}],"edges":[]}]})"),
      SchemaError);
}

TEST(Serialize, RejectsWidthMismatchWithPointer) {
  try {
    parse_program_acfg(
        R"({"program":"x","schema_dim":2,"functions":[{"name":"f","entry":0,"blocks":[{"id":0,"attrs":[1]}],"edges":[]}]})");
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.where(), "/functions/0/blocks/0/attrs");
    EXPECT_NE(std::string(e.what()).find("attribute width mismatch"), std::string::npos);
  }
}

TEST(Serialize, RejectsInvalidGraphs) {
  EXPECT_THROW(
      parse_program_acfg(
          R"({"program":"x","schema_dim":1,"functions":[{"name":"f","entry":0,"blocks":[{"id":0,"attrs":[1]}],"edges":[[0,3]]}]})"),
      SchemaError);
  EXPECT_THROW(
      parse_program_acfg(
          R"({"program":"x","schema_dim":1,"functions":[{"name":"f","entry":0,"blocks":[{"id":0,"attrs":[1]}],"edges":[]},{"name":"f","entry":0,"blocks":[{"id":0,"attrs":[1]}],"edges":[]}]})"),
      SchemaError);
}

TEST(Serialize, RefusesInvalidInput) {
  ProgramAcfg p;
  auto g = single_block();
  g.edges.push_back({0, 5});
  p.functions.push_back(g);
  EXPECT_THROW(serialize(p), InvalidArgument);
}

}  // namespace
}  // namespace vfuzz
