#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include "support.hpp"

namespace vfuzz {
namespace {

using testing::finite_difference_gradient;
using testing::flatten;
using testing::gradient_entry_matches;
using testing::random_acfg;

Hyperparams tiny(std::size_t a, std::size_t d, std::size_t n, std::size_t T, std::uint64_t seed = 1) {
  Hyperparams h;
  h.a = a;
  h.d = d;
  h.n = n;
  h.T = T;
  h.seed = seed;
  return h;
}

Acfg two_block_chain(std::vector<double> x0, std::vector<double> x1) {
  Acfg g;
  g.function_name = "f";
  g.entry = 0;
  g.blocks = {{0, std::move(x0)}, {1, std::move(x1)}};
  g.edges = {{0, 1}};
  return g;
}

MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

// Scalar re-implementation of the embedding network using plain vectors and
// loops over explicit edge lists.
double scalar_oracle_p(const Acfg& g, const ModelParams& m, const Hyperparams& h) {
  using Vec = std::vector<double>;
  const std::size_t d = h.d, V = g.blocks.size();
  auto matvec = [&](const MatrixXd& A, const Vec& x) {
    Vec y(static_cast<std::size_t>(A.rows()), 0.0);
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      for (Eigen::Index j = 0; j < A.cols(); ++j) y[static_cast<std::size_t>(i)] += A(i, j) * x[static_cast<std::size_t>(j)];
    return y;
  };
  std::vector<Vec> mu(V, Vec(d, 0.0));
  for (std::size_t t = 0; t < h.T; ++t) {
    std::vector<Vec> next(V);
    for (std::size_t v = 0; v < V; ++v) {
      Vec s(d, 0.0);
      for (const auto& [from, to] : g.edges) {
        if (to != g.blocks[v].id) continue;
        for (std::size_t u = 0; u < V; ++u)
          if (g.blocks[u].id == from)
            for (std::size_t k = 0; k < d; ++k) s[k] += mu[u][k];
      }
      Vec layer = matvec(m.P[h.n - 1], s);
      for (std::size_t i = h.n - 1; i-- > 0;) {
        for (auto& x : layer) x = std::max(0.0, x);
        layer = matvec(m.P[i], layer);
      }
      Vec wx = matvec(m.W1, g.blocks[v].attrs);
      next[v].resize(d);
      for (std::size_t k = 0; k < d; ++k) next[v][k] = std::tanh(wx[k] + layer[k]);
    }
    mu = next;
  }
  Vec total(d, 0.0);
  for (const auto& x : mu)
    for (std::size_t k = 0; k < d; ++k) total[k] += x[k];
  Vec z = matvec(m.W3, matvec(m.W2, total));
  return std::exp(z[0]) / (std::exp(z[0]) + std::exp(z[1]));
}

TEST(InitParams, ShapesAndDeterminism) {
  auto h = tiny(8, 4, 2, 1, 42);
  auto m = init_params(h);
  EXPECT_EQ(m.W1.rows(), 4);
  EXPECT_EQ(m.W1.cols(), 8);
  ASSERT_EQ(m.P.size(), 2u);
  for (const auto& p : m.P) {
    EXPECT_EQ(p.rows(), 4);
    EXPECT_EQ(p.cols(), 4);
  }
  EXPECT_EQ(m.W2.rows(), 4);
  EXPECT_EQ(m.W3.rows(), 2);
  EXPECT_EQ(m.W3.cols(), 4);
  EXPECT_EQ(init_params(h), m);
  h.seed = 43;
  EXPECT_FALSE(init_params(h) == m);
  for (double x : flatten(m)) {
    EXPECT_LE(std::abs(x), 0.5);  // 1/sqrt(4)
  }
}

TEST(InitParams, RejectsBadHyperparams) {
  auto h = tiny(8, 0, 2, 1);
  EXPECT_THROW(init_params(h), InvalidArgument);
  h = tiny(8, 4, 2, 1);
  h.learning_rate = 0;
  EXPECT_THROW(init_params(h), InvalidArgument);
}

TEST(Forward, ZeroParamsGiveOneHalf) {
  Rng rng(1);
  auto h = tiny(5, 3, 2, 3);
  auto m = init_params(h, /*zero=*/true);
  for (int i = 0; i < 20; ++i) {
    auto pred = forward(random_acfg(rng, uniform_int<std::size_t>(rng, 1, 6), 5), m, h);
    EXPECT_EQ(pred.Z, Vector2d(0, 0));
    EXPECT_DOUBLE_EQ(pred.p, 0.5);
    EXPECT_DOUBLE_EQ(pred.Q[1], 0.5);
  }
}

TEST(Forward, ZeroInputSingleBlockStaysAtFixedPoint) {
  auto h = tiny(3, 2, 2, 3);
  auto m = init_params(h);
  m.W3.setRandom();
  Acfg g;
  g.function_name = "f";
  g.blocks = {{0, {0.0, 0.0, 0.0}}};
  auto pred = forward(g, m, h);
  EXPECT_DOUBLE_EQ(pred.p, 0.5);
}

// a=2, d=2, n=1, T=1, blocks b0 -> b1; every number written out by hand.
TEST(Forward, HandComputedTinyInstance) {
  auto h = tiny(2, 2, 1, 1);
  ModelParams m;
  m.W1 = mat({{0.1, -0.2}, {0.3, 0.05}});
  m.P = {mat({{0.5, -0.4}, {0.2, 0.7}})};
  m.W2 = mat({{1.0, 0.5}, {-0.3, 0.8}});
  m.W3 = mat({{0.6, -0.1}, {-0.2, 0.9}});
  auto g = two_block_chain({1.0, 2.0}, {3.0, 0.0});

  // T=1: both neighbor sums are mu(0) = 0, so sigma contributes P1 * 0 = 0.
  const double mu0a = std::tanh(0.1 * 1.0 - 0.2 * 2.0), mu0b = std::tanh(0.3 * 1.0 + 0.05 * 2.0);
  const double mu1a = std::tanh(0.1 * 3.0 - 0.2 * 0.0), mu1b = std::tanh(0.3 * 3.0 + 0.05 * 0.0);
  const double sa = mu0a + mu1a, sb = mu0b + mu1b;
  const double ga = 1.0 * sa + 0.5 * sb, gb = -0.3 * sa + 0.8 * sb;
  const double z0 = 0.6 * ga - 0.1 * gb, z1 = -0.2 * ga + 0.9 * gb;
  const double expected = std::exp(z0) / (std::exp(z0) + std::exp(z1));

  auto pred = forward(g, m, h);
  EXPECT_NEAR(pred.p, expected, 1e-9);
  EXPECT_NEAR(pred.Z[0], z0, 1e-12);
  EXPECT_NEAR(pred.Z[1], z1, 1e-12);
  EXPECT_NEAR(pred.mu_g[0], ga, 1e-12);
}

// Same instance with T=2 so the sigma network and the b0 -> b1 message
// actually matter.
TEST(Forward, HandComputedTwoIterations) {
  auto h = tiny(2, 2, 1, 2);
  ModelParams m;
  m.W1 = mat({{0.1, -0.2}, {0.3, 0.05}});
  m.P = {mat({{0.5, -0.4}, {0.2, 0.7}})};
  m.W2 = mat({{1.0, 0.5}, {-0.3, 0.8}});
  m.W3 = mat({{0.6, -0.1}, {-0.2, 0.9}});
  auto g = two_block_chain({1.0, 2.0}, {3.0, 0.0});

  const double a0 = -0.3, b0 = 0.4;  // W1 x_b0
  const double a1 = 0.3, b1 = 0.9;   // W1 x_b1
  const double m0a = std::tanh(a0), m0b = std::tanh(b0), m1a = std::tanh(a1), m1b = std::tanh(b1);
  // iteration 2: b0 has no predecessors; b1 receives mu_b0
  const double n0a = std::tanh(a0), n0b = std::tanh(b0);
  const double s1a = 0.5 * m0a - 0.4 * m0b, s1b = 0.2 * m0a + 0.7 * m0b;
  const double n1a = std::tanh(a1 + s1a), n1b = std::tanh(b1 + s1b);
  (void)m1a;
  (void)m1b;
  const double sa = n0a + n1a, sb = n0b + n1b;
  const double ga = 1.0 * sa + 0.5 * sb, gb = -0.3 * sa + 0.8 * sb;
  const double z0 = 0.6 * ga - 0.1 * gb, z1 = -0.2 * ga + 0.9 * gb;
  const double expected = 1.0 / (1.0 + std::exp(z1 - z0));
  EXPECT_NEAR(forward(g, m, h).p, expected, 1e-9);
}

TEST(Forward, MatchesScalarOracleOnRandomInstances) {
  Rng rng(77);
  for (int i = 0; i < 30; ++i) {
    auto h = tiny(4, 3, uniform_int<std::size_t>(rng, 1, 3), uniform_int<std::size_t>(rng, 1, 4), 100 + i);
    auto m = init_params(h);
    auto g = random_acfg(rng, uniform_int<std::size_t>(rng, 1, 7), 4);
    EXPECT_NEAR(forward(g, m, h).p, scalar_oracle_p(g, m, h), 1e-12);
  }
}

TEST(Forward, ShapeErrors) {
  auto h = tiny(4, 3, 2, 2);
  auto m = init_params(h);
  Rng rng(2);
  EXPECT_THROW(forward(random_acfg(rng, 3, 5), m, h), ShapeError);
  auto h2 = h;
  h2.d = 4;
  EXPECT_THROW(forward(random_acfg(rng, 3, 4), m, h2), ShapeError);
}

TEST(Forward, SoftmaxSumsToOne) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    auto h = tiny(4, 3, 2, 2, static_cast<std::uint64_t>(i));
    auto m = init_params(h);
    for (auto* x : {&m.W3}) *x *= uniform_real(rng, 0.1, 50.0);
    auto pred = forward(random_acfg(rng, uniform_int<std::size_t>(rng, 1, 6), 4, "f", 0.3, 20), m, h);
    EXPECT_NEAR(pred.Q.sum(), 1.0, 1e-9);
    EXPECT_GE(pred.Q.minCoeff(), 0.0);
    EXPECT_LE(pred.Q.maxCoeff(), 1.0);
    EXPECT_EQ(pred.p, pred.Q[0]);
  }
}

TEST(Forward, PermutationInvariant) {
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    auto h = tiny(4, 3, 2, 3, static_cast<std::uint64_t>(i));
    auto m = init_params(h);
    auto g = random_acfg(rng, uniform_int<std::size_t>(rng, 1, 8), 4);
    std::map<BlockId, BlockId> relabel;
    std::vector<BlockId> fresh;
    for (std::size_t k = 0; k < g.blocks.size(); ++k) fresh.push_back(static_cast<BlockId>(1000 + k));
    std::shuffle(fresh.begin(), fresh.end(), rng);
    for (std::size_t k = 0; k < g.blocks.size(); ++k) relabel[g.blocks[k].id] = fresh[k];
    Acfg r = g;
    for (auto& b : r.blocks) b.id = relabel[b.id];
    for (auto& e : r.edges) e = {relabel[e.first], relabel[e.second]};
    r.entry = relabel[g.entry];
    std::shuffle(r.blocks.begin(), r.blocks.end(), rng);
    std::shuffle(r.edges.begin(), r.edges.end(), rng);
    EXPECT_NEAR(forward(g, m, h).p, forward(r, m, h).p, 1e-12);
  }
}

TEST(Loss, Values) {
  EXPECT_NEAR(loss(Vector2d(0.5, 0.5), 0), std::log(2.0), 1e-12);
  EXPECT_NEAR(loss(Vector2d(0.5, 0.5), 1), 0.693147, 1e-6);
  EXPECT_NEAR(loss(Vector2d(1.0, 0.0), 0), 0.0, 1e-12);
  EXPECT_NEAR(loss(Vector2d(1.0, 0.0), 1), -std::log(1e-12), 1e-9);
  EXPECT_NEAR(loss(Vector2d(0.9, 0.1), 1), 2.302585, 1e-6);
  EXPECT_THROW(loss(Vector2d(0.5, 0.5), 2), InvalidArgument);
}

TEST(Backward, MatchesFiniteDifferences) {
  Rng rng(99);
  for (int inst = 0; inst < 20; ++inst) {
    auto h = tiny(4, 3, 2, 2, 500 + static_cast<std::uint64_t>(inst));
    auto m = init_params(h);
    auto g = random_acfg(rng, uniform_int<std::size_t>(rng, 1, 6), 4);
    const int label = uniform_int(rng, 0, 1);
    auto analytic = flatten(backward(g, m, h, label));
    auto numeric = finite_difference_gradient(g, m, h, label);
    ASSERT_EQ(analytic.size(), numeric.size());
    for (std::size_t k = 0; k < analytic.size(); ++k)
      EXPECT_TRUE(gradient_entry_matches(analytic[k], numeric[k]))
          << "instance " << inst << " entry " << k << ": " << analytic[k] << " vs " << numeric[k];
  }
}

TEST(Backward, DeeperSigmaAndMoreIterations) {
  Rng rng(98);
  for (int inst = 0; inst < 5; ++inst) {
    auto h = tiny(3, 4, 4, 4, 900 + static_cast<std::uint64_t>(inst));
    auto m = init_params(h);
    for (auto& p : m.P) p *= 2.0;
    auto g = random_acfg(rng, uniform_int<std::size_t>(rng, 2, 6), 3, "f", 0.5);
    const int label = inst % 2;
    auto analytic = flatten(backward(g, m, h, label));
    auto numeric = finite_difference_gradient(g, m, h, label);
    for (std::size_t k = 0; k < analytic.size(); ++k)
      EXPECT_TRUE(gradient_entry_matches(analytic[k], numeric[k])) << analytic[k] << " vs " << numeric[k];
  }
}

TEST(Backward, VanishesAtConfidentCorrectPrediction) {
  auto h = tiny(3, 2, 1, 2);
  auto m = init_params(h, true);
  m.W1.setConstant(1.0);
  m.W2.setIdentity();
  m.W3.row(0).setConstant(50.0);
  m.W3.row(1).setConstant(-50.0);
  Acfg g = two_block_chain({1, 1, 1}, {1, 1, 1});
  ASSERT_GT(forward(g, m, h).p, 1 - 1e-12);
  EXPECT_LT(std::sqrt(backward(g, m, h, kVulnerable).squared_norm()), 1e-6);
  // label 1 sits in the clamped region: the loss is flat there
  EXPECT_LT(std::sqrt(backward(g, m, h, kSecure).squared_norm()), 1e-6);
}

// On a directed 3-cycle of identical blocks every block plays the same role,
// so the loss reacts identically to each block's attributes.
TEST(Backward, SymmetricGraphGivesEqualPerBlockContributions) {
  auto h = tiny(3, 3, 2, 3, 12);
  auto m = init_params(h);
  Acfg g;
  g.function_name = "cycle";
  g.blocks = {{0, {1, 2, 0}}, {1, {1, 2, 0}}, {2, {1, 2, 0}}};
  g.edges = {{0, 1}, {1, 2}, {2, 0}};
  const int label = 0;
  auto per_block = [&](std::size_t v) {
    std::vector<double> out;
    for (std::size_t k = 0; k < h.a; ++k) {
      Acfg up = g, down = g;
      up.blocks[v].attrs[k] += 1e-5;
      down.blocks[v].attrs[k] -= 1e-5;
      out.push_back((loss(forward(up, m, h).Q, label) - loss(forward(down, m, h).Q, label)) / 2e-5);
    }
    return out;
  };
  auto c0 = per_block(0), c1 = per_block(1), c2 = per_block(2);
  for (std::size_t k = 0; k < h.a; ++k) {
    EXPECT_NEAR(c0[k], c1[k], 1e-9);
    EXPECT_NEAR(c0[k], c2[k], 1e-9);
  }
  // The analytic W1 gradient is the sum of three identical rank-one terms
  // dPre_v x^T, so every column is proportional to x.
  auto grad = backward(g, m, h, label);
  for (Eigen::Index r = 0; r < grad.W1.rows(); ++r) {
    EXPECT_NEAR(grad.W1(r, 1), 2.0 * grad.W1(r, 0), 1e-12);
    EXPECT_NEAR(grad.W1(r, 2), 0.0, 1e-15);
  }
}

Corpus small_corpus(double signal, std::size_t per_class, std::uint64_t seed) {
  SynthSpec spec;
  spec.per_class = per_class;
  spec.signal_strength = signal;
  spec.seed = seed;
  spec.max_blocks = 6;
  return generate(spec);
}

Hyperparams small_model(std::size_t epochs, double lr = 0.01) {
  auto h = Hyperparams::desk();
  h.d = 6;
  h.epochs = epochs;
  h.learning_rate = lr;
  h.seed = 5;
  return h;
}

TEST(Train, OneSampleOneEpochIsOneSgdStep) {
  auto corpus = small_corpus(1, 1, 1);
  corpus.resize(1);
  auto h = small_model(1, 0.05);
  auto init = init_params(h);
  auto grad = backward(corpus[0].graph, init, h, corpus[0].label);
  auto result = train(corpus, h);
  auto expected = init;
  expected.descend(grad, h.learning_rate);
  auto got = flatten(result.params), want = flatten(expected);
  for (std::size_t k = 0; k < got.size(); ++k) EXPECT_NEAR(got[k], want[k], 1e-15);
  ASSERT_EQ(result.loss_trace.size(), 1u);
  EXPECT_NEAR(result.loss_trace[0], loss(forward(corpus[0].graph, init, h).Q, corpus[0].label), 1e-15);
}

TEST(Train, DeterministicAndResumable) {
  auto corpus = small_corpus(1, 20, 2);
  auto h = small_model(4);
  auto a = train(corpus, h);
  auto b = train(corpus, h);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.loss_trace, b.loss_trace);

  auto first = small_model(2);
  auto half = train(corpus, first);
  auto resumed = train(corpus, h, half.params, 2);
  EXPECT_EQ(resumed.params, a.params);
  EXPECT_EQ(resumed.loss_trace, std::vector<double>(a.loss_trace.begin() + 2, a.loss_trace.end()));
}

TEST(Train, ZeroEpochsReturnsInitialization) {
  auto corpus = small_corpus(1, 3, 2);
  auto h = small_model(0);
  auto r = train(corpus, h);
  EXPECT_EQ(r.params, init_params(h));
  EXPECT_TRUE(r.loss_trace.empty());
}

TEST(Train, LearnsSeparableCorpus) {
  auto corpus = small_corpus(1, 100, 3);
  auto r = train(corpus, small_model(15));
  EXPECT_LT(r.loss_trace.back(), r.loss_trace.front());
  auto eval = evaluate(corpus, r.params, small_model(15), {100});
  EXPECT_GE(eval.accuracy_at_k.at(100), 0.9);
}

TEST(Train, StandardizationIsStoredWithParams) {
  auto corpus = small_corpus(1, 20, 3);
  auto h = small_model(2);
  h.standardize = true;
  auto r = train(corpus, h);
  ASSERT_TRUE(r.params.standardizer.has_value());
  EXPECT_EQ(r.params.standardizer->mean.size(), static_cast<Eigen::Index>(h.a));
  EXPECT_TRUE(r.params.all_finite());
}

TEST(Train, EmptyCorpus) { EXPECT_THROW(train({}, small_model(1)), InvalidArgument); }

TEST(Evaluate, DefinitionExamples) {
  auto r = evaluate_scores({0.9, 0.8, 0.2, 0.1}, {0, 1, 0, 1}, {}, {2});
  EXPECT_DOUBLE_EQ(r.accuracy_at_k.at(2), 0.5);
  EXPECT_DOUBLE_EQ(r.recall, 0.5);
  EXPECT_EQ(r.vulnerable_count, 2u);

  auto all = evaluate_scores({0.3, 0.1, 0.7}, {0, 0, 0}, {}, {1, 2, 3});
  for (auto& [k, acc] : all.accuracy_at_k) EXPECT_DOUBLE_EQ(acc, 1.0);

  Rng rng(8);
  std::vector<double> p;
  std::vector<int> labels;
  for (int i = 0; i < 50; ++i) {
    p.push_back(uniform_real(rng, 0, 1));
    labels.push_back(i % 2);
  }
  EXPECT_DOUBLE_EQ(evaluate_scores(p, labels, {}, {50}).accuracy_at_k.at(50), 0.5);
}

TEST(Evaluate, TiesKeepInputOrder) {
  auto r = evaluate_scores({0.5, 0.5, 0.5}, {1, 0, 0}, {}, {1, 2});
  EXPECT_DOUBLE_EQ(r.accuracy_at_k.at(1), 0.0);
  EXPECT_DOUBLE_EQ(r.accuracy_at_k.at(2), 0.5);
}

TEST(Evaluate, KOutOfRange) {
  EXPECT_THROW(evaluate_scores({0.5}, {0}, {}, {2}), InvalidArgument);
  EXPECT_THROW(evaluate_scores({0.5}, {0}, {}, {0}), InvalidArgument);
  auto h = small_model(1);
  EXPECT_THROW(evaluate({}, init_params(h), h, {1}), InvalidArgument);
}

TEST(Evaluate, MeanLoss) {
  auto corpus = small_corpus(0, 5, 1);
  auto h = small_model(1);
  auto zero = init_params(h, true);
  auto r = evaluate(corpus, zero, h, {1});
  EXPECT_NEAR(r.mean_loss, std::log(2.0), 1e-12);
}

class CheckpointTest : public ::testing::Test {
 protected:
  std::string path_ = (std::filesystem::temp_directory_path() / "vfuzz_ckpt_test.json").string();
  void TearDown() override { std::remove(path_.c_str()); }
};

TEST_F(CheckpointTest, RoundTripIsBitExact) {
  auto h = tiny(6, 5, 3, 2, 77);
  auto m = init_params(h);
  m.W2 *= 1.0 / 3.0;
  save_checkpoint(m, h, path_);
  auto c = load_checkpoint(path_);
  EXPECT_EQ(c.params, m);
  EXPECT_EQ(c.hyper.a, 6u);
  EXPECT_EQ(c.hyper.d, 5u);
  EXPECT_EQ(c.hyper.n, 3u);
  EXPECT_EQ(c.hyper.T, 2u);
  Rng rng(1);
  auto g = random_acfg(rng, 4, 6);
  EXPECT_EQ(forward(g, c.params, c.hyper).p, forward(g, m, h).p);
}

TEST_F(CheckpointTest, StandardizerRoundTrip) {
  auto h = tiny(3, 2, 1, 1);
  auto m = init_params(h);
  m.standardizer = Standardizer{VectorXd::Constant(3, 0.25), VectorXd::Constant(3, 1.0 / 7.0)};
  save_checkpoint(m, h, path_);
  EXPECT_EQ(load_checkpoint(path_).params, m);
}

TEST_F(CheckpointTest, ShapeMismatchAgainstConfig) {
  auto h = tiny(4, 256, 1, 1);
  save_checkpoint(init_params(h), h, path_);
  auto want = h;
  want.d = 128;
  EXPECT_THROW(require_compatible(load_checkpoint(path_).hyper, want), ShapeError);
  EXPECT_NO_THROW(require_compatible(load_checkpoint(path_).hyper, h));
}

TEST_F(CheckpointTest, CorruptedFileHasPosition) {
  auto h = tiny(2, 2, 1, 1);
  save_checkpoint(init_params(h), h, path_);
  auto text = json_util::read_file(path_);
  text[text.size() / 2] = '#';
  json_util::write_file(path_, text);
  try {
    load_checkpoint(path_);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(e.where().find("byte"), std::string::npos);
  }
}

TEST_F(CheckpointTest, VersionAndShapeValidation) {
  auto h = tiny(2, 2, 1, 1);
  auto j = checkpoint_to_json(init_params(h), h);
  j["version"] = 2;
  EXPECT_THROW(checkpoint_from_json(j), SchemaError);
  j = checkpoint_to_json(init_params(h), h);
  j["hyper"]["d"] = 3;
  EXPECT_THROW(checkpoint_from_json(j), ShapeError);
  j = checkpoint_to_json(init_params(h), h);
  j["W1"][0].push_back(1.0);
  EXPECT_THROW(checkpoint_from_json(j), ShapeError);
  EXPECT_THROW(load_checkpoint("/nonexistent/dir/ckpt.json"), IoError);
}

}  // namespace
}  // namespace vfuzz
