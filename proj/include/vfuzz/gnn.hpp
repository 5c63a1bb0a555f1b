#pragma once

// Graph embedding network over ACFGs.
//
//   mu_v(0) = 0
//   mu_v(t) = tanh(W1 x_v + sigma(sum_{u in pred(v)} mu_u(t-1)))     t = 1..T
//   sigma(s) = P1 relu(P2 relu(... relu(Pn s)))
//   mu_g = W2 sum_v mu_v(T),  Z = W3 mu_g,  Q = softmax(Z),  p = Q[0]
//
// Q[0] is the probability that the function is vulnerable (label 0).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "vfuzz/acfg.hpp"
#include "vfuzz/error.hpp"
#include "vfuzz/json_util.hpp"
#include "vfuzz/rng.hpp"
#include "vfuzz/synth.hpp"

namespace vfuzz {

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

struct Hyperparams {
  std::size_t a = slots::kDefaultDimension;  // attributes per block
  std::size_t d = 256;                       // embedding size
  std::size_t n = 5;                         // sigma-network depth
  std::size_t T = 3;                         // embedding iterations
  double learning_rate = 1e-4;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  bool standardize = false;  // per-slot train-set standardization of x_v

  // Small configuration used by tests and quick experiments.
  static Hyperparams desk() {
    Hyperparams h;
    h.d = 16;
    h.n = 2;
    h.T = 3;
    return h;
  }

  void check() const {
    if (a < 1 || d < 1 || n < 1 || T < 1) throw InvalidArgument("a, d, n and T must all be >= 1");
    if (!(learning_rate > 0)) throw InvalidArgument("learning_rate must be positive");
  }
};

// Optional affine map applied to raw attribute vectors before W1.
struct Standardizer {
  VectorXd mean;
  VectorXd scale;  // 1 / stddev, or 1 where the slot is constant

  bool operator==(const Standardizer& o) const { return mean == o.mean && scale == o.scale; }
};

struct ModelParams {
  MatrixXd W1;             // d x a
  std::vector<MatrixXd> P;  // P[0] = P_1 ... P[n-1] = P_n, each d x d
  MatrixXd W2;             // d x d
  MatrixXd W3;             // 2 x d
  std::optional<Standardizer> standardizer;

  static ModelParams zeros(std::size_t a, std::size_t d, std::size_t n) {
    ModelParams m;
    const auto ia = static_cast<Eigen::Index>(a);
    const auto id = static_cast<Eigen::Index>(d);
    m.W1 = MatrixXd::Zero(id, ia);
    m.P.assign(n, MatrixXd::Zero(id, id));
    m.W2 = MatrixXd::Zero(id, id);
    m.W3 = MatrixXd::Zero(2, id);
    return m;
  }

  bool operator==(const ModelParams& o) const {
    if (P.size() != o.P.size()) return false;
    for (std::size_t i = 0; i < P.size(); ++i)
      if (P[i] != o.P[i]) return false;
    return W1 == o.W1 && W2 == o.W2 && W3 == o.W3 && standardizer == o.standardizer;
  }

  // Calls f on each learnable matrix in a fixed order: W1, P_1..P_n, W2, W3.
  template <typename F>
  void for_each(F&& f) {
    f(W1);
    for (auto& p : P) f(p);
    f(W2);
    f(W3);
  }
  template <typename F>
  void for_each(F&& f) const {
    f(W1);
    for (const auto& p : P) f(p);
    f(W2);
    f(W3);
  }

  double squared_norm() const {
    double s = 0;
    for_each([&](const MatrixXd& m) { s += m.squaredNorm(); });
    return s;
  }

  bool all_finite() const {
    bool ok = true;
    for_each([&](const MatrixXd& m) { ok = ok && m.allFinite(); });
    return ok;
  }

  // this -= step * grad
  void descend(const ModelParams& grad, double step) {
    W1 -= step * grad.W1;
    for (std::size_t i = 0; i < P.size(); ++i) P[i] -= step * grad.P[i];
    W2 -= step * grad.W2;
    W3 -= step * grad.W3;
  }
};

using Gradient = ModelParams;

struct Prediction {
  VectorXd mu_g;
  Vector2d Z;
  Vector2d Q;
  double p = 0.5;
};

inline void check_shapes(const ModelParams& m, const Hyperparams& h) {
  const auto a = static_cast<Eigen::Index>(h.a);
  const auto d = static_cast<Eigen::Index>(h.d);
  auto expect = [](const MatrixXd& x, Eigen::Index r, Eigen::Index c, const char* name) {
    if (x.rows() != r || x.cols() != c) {
      throw ShapeError(std::string(name) + " is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                       ", expected " + std::to_string(r) + "x" + std::to_string(c));
    }
  };
  expect(m.W1, d, a, "W1");
  if (m.P.size() != h.n)
    throw ShapeError("sigma network has " + std::to_string(m.P.size()) + " layers, expected " + std::to_string(h.n));
  for (const auto& p : m.P) expect(p, d, d, "P_i");
  expect(m.W2, d, d, "W2");
  expect(m.W3, 2, d, "W3");
  if (m.standardizer && (m.standardizer->mean.size() != a || m.standardizer->scale.size() != a))
    throw ShapeError("standardizer width does not match a");
}

// Entries uniform on [-1/sqrt(d), 1/sqrt(d)], drawn in for_each order.
inline ModelParams init_params(const Hyperparams& h, bool zero = false) {
  h.check();
  ModelParams m = ModelParams::zeros(h.a, h.d, h.n);
  if (zero) return m;
  Rng rng = make_rng(h.seed, 0);
  const double bound = 1.0 / std::sqrt(static_cast<double>(h.d));
  std::uniform_real_distribution<double> dist(-bound, bound);
  m.for_each([&](MatrixXd& x) {
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = dist(rng);
  });
  return m;
}

inline Vector2d softmax(const Vector2d& z) {
  const double m = z.maxCoeff();
  Vector2d e((z.array() - m).exp());
  return e / e.sum();
}

inline constexpr double kProbabilityClamp = 1e-12;

// Cross-entropy against label l (0 = vulnerable, 1 = secure).
inline double loss(const Vector2d& Q, int label) {
  if (label != kVulnerable && label != kSecure) throw InvalidArgument("label must be 0 or 1");
  return -std::log(std::max(Q[label], kProbabilityClamp));
}

// A graph prepared for repeated forward passes: attribute matrix plus
// predecessor lists by block position.
struct GraphInput {
  MatrixXd X;  // a x |V|
  std::vector<std::vector<std::size_t>> preds;

  static GraphInput from(const Acfg& g, const Hyperparams& h, const std::optional<Standardizer>& stdz = {}) {
    GraphInput in;
    const auto V = static_cast<Eigen::Index>(g.blocks.size());
    in.X.resize(static_cast<Eigen::Index>(h.a), V);
    for (Eigen::Index v = 0; v < V; ++v) {
      const auto& attrs = g.blocks[static_cast<std::size_t>(v)].attrs;
      if (attrs.size() != h.a) {
        throw ShapeError("block " + std::to_string(g.blocks[static_cast<std::size_t>(v)].id) + " of " +
                         g.function_name + " has " + std::to_string(attrs.size()) + " attributes, model expects " +
                         std::to_string(h.a));
      }
      for (std::size_t k = 0; k < attrs.size(); ++k) in.X(static_cast<Eigen::Index>(k), v) = attrs[k];
    }
    if (stdz) in.X = ((in.X.colwise() - stdz->mean).array().colwise() * stdz->scale.array()).matrix();
    in.preds = predecessor_indices(g);
    return in;
  }
};

namespace detail {

struct ForwardTrace {
  MatrixXd W1X;                                // d x V
  std::vector<MatrixXd> M;                     // M[t] = embeddings after t iterations
  std::vector<MatrixXd> S;                     // S[t] = neighbor sums fed to iteration t (t >= 1)
  std::vector<std::vector<MatrixXd>> H;        // H[t][i] = pre-activation of layer P_{i+1}
  VectorXd msum;
  Prediction pred;
};

inline MatrixXd neighbor_sum(const MatrixXd& M, const std::vector<std::vector<std::size_t>>& preds) {
  MatrixXd S = MatrixXd::Zero(M.rows(), M.cols());
  for (std::size_t v = 0; v < preds.size(); ++v)
    for (std::size_t u : preds[v]) S.col(static_cast<Eigen::Index>(v)) += M.col(static_cast<Eigen::Index>(u));
  return S;
}

inline ForwardTrace run_forward(const GraphInput& in, const ModelParams& m, const Hyperparams& h) {
  ForwardTrace tr;
  const Eigen::Index V = in.X.cols();
  const Eigen::Index d = static_cast<Eigen::Index>(h.d);
  const std::size_t n = h.n;
  tr.W1X = m.W1 * in.X;
  tr.M.assign(h.T + 1, MatrixXd::Zero(d, V));
  tr.S.assign(h.T + 1, MatrixXd());
  tr.H.assign(h.T + 1, {});
  for (std::size_t t = 1; t <= h.T; ++t) {
    tr.S[t] = neighbor_sum(tr.M[t - 1], in.preds);
    auto& H = tr.H[t];
    H.assign(n, MatrixXd());
    H[n - 1] = m.P[n - 1] * tr.S[t];
    for (std::size_t i = n - 1; i-- > 0;) H[i] = m.P[i] * H[i + 1].cwiseMax(0.0);
    tr.M[t] = (tr.W1X + H[0]).array().tanh().matrix();
  }
  tr.msum = tr.M[h.T].rowwise().sum();
  tr.pred.mu_g = m.W2 * tr.msum;
  tr.pred.Z = m.W3 * tr.pred.mu_g;
  tr.pred.Q = softmax(tr.pred.Z);
  tr.pred.p = tr.pred.Q[0];
  return tr;
}

inline double backprop(const GraphInput& in, const ModelParams& m, const Hyperparams& h, int label,
                       Gradient& g) {
  const ForwardTrace tr = run_forward(in, m, h);
  const double L = loss(tr.pred.Q, label);
  g = ModelParams::zeros(h.a, h.d, h.n);
  if (tr.pred.Q[label] < kProbabilityClamp) return L;  // clamped region: loss is locally constant

  Vector2d dZ = tr.pred.Q;
  dZ[label] -= 1.0;
  g.W3 = dZ * tr.pred.mu_g.transpose();
  const VectorXd dmu_g = m.W3.transpose() * dZ;
  g.W2 = dmu_g * tr.msum.transpose();
  const VectorXd dmsum = m.W2.transpose() * dmu_g;

  const std::size_t n = h.n;
  MatrixXd dM = dmsum.replicate(1, in.X.cols());
  for (std::size_t t = h.T; t >= 1; --t) {
    const MatrixXd dPre = (dM.array() * (1.0 - tr.M[t].array().square())).matrix();
    g.W1.noalias() += dPre * in.X.transpose();
    const auto& H = tr.H[t];
    MatrixXd dH = dPre;  // gradient w.r.t. H[0]
    for (std::size_t i = 0; i < n; ++i) {
      if (i + 1 < n) {
        const MatrixXd act = H[i + 1].cwiseMax(0.0);
        g.P[i].noalias() += dH * act.transpose();
        MatrixXd dAct = m.P[i].transpose() * dH;
        dH = (dAct.array() * (H[i + 1].array() > 0.0).cast<double>()).matrix();
      } else {
        g.P[i].noalias() += dH * tr.S[t].transpose();
        dH = m.P[i].transpose() * dH;  // now gradient w.r.t. S[t]
      }
    }
    if (t == 1) break;
    dM = MatrixXd::Zero(dH.rows(), dH.cols());
    for (std::size_t v = 0; v < in.preds.size(); ++v)
      for (std::size_t u : in.preds[v]) dM.col(static_cast<Eigen::Index>(u)) += dH.col(static_cast<Eigen::Index>(v));
  }
  return L;
}

}  // namespace detail

inline Prediction forward(const GraphInput& in, const ModelParams& m, const Hyperparams& h) {
  return detail::run_forward(in, m, h).pred;
}

inline Prediction forward(const Acfg& g, const ModelParams& m, const Hyperparams& h) {
  check_shapes(m, h);
  return forward(GraphInput::from(g, h, m.standardizer), m, h);
}

// Gradient of the cross-entropy loss w.r.t. every parameter matrix.
inline Gradient backward(const Acfg& g, const ModelParams& m, const Hyperparams& h, int label) {
  check_shapes(m, h);
  if (label != kVulnerable && label != kSecure) throw InvalidArgument("label must be 0 or 1");
  Gradient grad;
  detail::backprop(GraphInput::from(g, h, m.standardizer), m, h, label, grad);
  return grad;
}

inline Standardizer fit_standardizer(const Corpus& corpus, std::size_t a) {
  const auto ia = static_cast<Eigen::Index>(a);
  VectorXd sum = VectorXd::Zero(ia), sq = VectorXd::Zero(ia);
  double count = 0;
  for (const auto& item : corpus) {
    for (const auto& b : item.graph.blocks) {
      if (b.attrs.size() != a) throw ShapeError("attribute width does not match a");
      for (std::size_t k = 0; k < a; ++k) {
        sum[static_cast<Eigen::Index>(k)] += b.attrs[k];
        sq[static_cast<Eigen::Index>(k)] += b.attrs[k] * b.attrs[k];
      }
      count += 1;
    }
  }
  Standardizer s;
  s.mean = count > 0 ? VectorXd(sum / count) : VectorXd::Zero(ia);
  s.scale = VectorXd::Ones(ia);
  if (count > 0) {
    for (Eigen::Index k = 0; k < ia; ++k) {
      const double var = sq[k] / count - s.mean[k] * s.mean[k];
      if (var > 1e-12) s.scale[k] = 1.0 / std::sqrt(var);
    }
  }
  return s;
}

struct TrainResult {
  ModelParams params;
  std::vector<double> loss_trace;  // mean per-sample loss of each epoch
};

// Single-sample SGD. The visiting order of epoch e is a shuffle seeded by
// (seed, e), so a run resumed at `start_epoch` from the parameters of an
// interrupted run reproduces the uninterrupted one.
inline TrainResult train(const Corpus& corpus, const Hyperparams& h,
                         std::optional<ModelParams> initial = std::nullopt, std::size_t start_epoch = 0) {
  h.check();
  if (corpus.empty()) throw InvalidArgument("empty training corpus");
  TrainResult out;
  out.params = initial ? std::move(*initial) : init_params(h);
  if (h.standardize && !out.params.standardizer) out.params.standardizer = fit_standardizer(corpus, h.a);
  check_shapes(out.params, h);

  std::vector<GraphInput> inputs;
  inputs.reserve(corpus.size());
  for (const auto& item : corpus) inputs.push_back(GraphInput::from(item.graph, h, out.params.standardizer));

  std::vector<std::size_t> order(corpus.size());
  Gradient grad;
  for (std::size_t epoch = start_epoch; epoch < h.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = make_rng(h.seed, 1'000'000 + epoch);
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0;
    for (std::size_t i : order) {
      total += detail::backprop(inputs[i], out.params, h, corpus[i].label, grad);
      out.params.descend(grad, h.learning_rate);
    }
    out.loss_trace.push_back(total / static_cast<double>(corpus.size()));
  }
  return out;
}

struct EvalReport {
  std::map<std::size_t, double> accuracy_at_k;
  double recall = 0;
  double mean_loss = 0;
  std::size_t vulnerable_count = 0;
};

// Ranks samples by descending p (ties keep input order). accuracy@K is the
// share of vulnerable samples in the top K; recall is accuracy@K at
// K = number of vulnerable samples (0 when there are none).
inline EvalReport evaluate_scores(const std::vector<double>& p, const std::vector<int>& labels,
                                  const std::vector<double>& losses, const std::vector<std::size_t>& ks) {
  if (p.empty()) throw InvalidArgument("empty test corpus");
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return p[x] > p[y]; });
  std::vector<std::size_t> hits(p.size() + 1, 0);  // hits[k] = vulnerable among the top k
  for (std::size_t i = 0; i < order.size(); ++i) hits[i + 1] = hits[i] + (labels[order[i]] == kVulnerable ? 1 : 0);

  EvalReport r;
  for (std::size_t k : ks) {
    if (k < 1 || k > p.size())
      throw InvalidArgument("K=" + std::to_string(k) + " outside [1, " + std::to_string(p.size()) + "]");
    r.accuracy_at_k[k] = static_cast<double>(hits[k]) / static_cast<double>(k);
  }
  r.vulnerable_count = hits[p.size()];
  r.recall = r.vulnerable_count == 0 ? 0.0
                                     : static_cast<double>(hits[r.vulnerable_count]) /
                                           static_cast<double>(r.vulnerable_count);
  r.mean_loss = losses.empty() ? 0.0 : std::accumulate(losses.begin(), losses.end(), 0.0) / static_cast<double>(losses.size());
  return r;
}

inline EvalReport evaluate(const Corpus& test, const ModelParams& m, const Hyperparams& h,
                           const std::vector<std::size_t>& ks) {
  if (test.empty()) throw InvalidArgument("empty test corpus");
  check_shapes(m, h);
  std::vector<double> p;
  std::vector<int> labels;
  std::vector<double> losses;
  for (const auto& item : test) {
    auto pred = forward(GraphInput::from(item.graph, h, m.standardizer), m, h);
    p.push_back(pred.p);
    labels.push_back(item.label);
    losses.push_back(loss(pred.Q, item.label));
  }
  return evaluate_scores(p, labels, losses, ks);
}

// ---------------------------------------------------------------------------
// Checkpoints

inline constexpr int kCheckpointVersion = 1;

namespace detail {

inline json_util::json matrix_to_json(const MatrixXd& m) {
  json_util::json rows = json_util::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline MatrixXd matrix_from_json(const json_util::json& j, const std::string& where) {
  const auto& rows = json_util::get_array(j, where);
  if (rows.empty()) throw ShapeError("matrix has no rows", where);
  const std::size_t cols = json_util::get_array(rows[0], where + "/0").size();
  MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string rw = where + "/" + std::to_string(i);
    const auto& row = json_util::get_array(rows[i], rw);
    if (row.size() != cols) throw ShapeError("ragged matrix row", rw);
    for (std::size_t k = 0; k < cols; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          json_util::get_number(row[k], rw + "/" + std::to_string(k));
  }
  return m;
}

inline json_util::json vector_to_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline VectorXd vector_from_json(const json_util::json& j, const std::string& where) {
  const auto& a = json_util::get_array(j, where);
  VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = json_util::get_number(a[i], where + "/" + std::to_string(i));
  return v;
}

}  // namespace detail

// nlohmann/json writes the shortest decimal that round-trips, so values
// reload bit-identically.
inline json_util::json checkpoint_to_json(const ModelParams& m, const Hyperparams& h,
                                          const json_util::json& manifest = nullptr) {
  check_shapes(m, h);
  json_util::json j{{"version", kCheckpointVersion},
                    {"hyper", {{"a", h.a}, {"d", h.d}, {"n", h.n}, {"T", h.T}}},
                    {"W1", detail::matrix_to_json(m.W1)},
                    {"W2", detail::matrix_to_json(m.W2)},
                    {"W3", detail::matrix_to_json(m.W3)}};
  json_util::json P = json_util::json::array();
  for (const auto& p : m.P) P.push_back(detail::matrix_to_json(p));
  j["P"] = std::move(P);
  if (m.standardizer)
    j["standardize"] = {{"mean", detail::vector_to_json(m.standardizer->mean)},
                        {"scale", detail::vector_to_json(m.standardizer->scale)}};
  if (!manifest.is_null()) j["manifest"] = manifest;
  return j;
}

struct Checkpoint {
  ModelParams params;
  Hyperparams hyper;  // a, d, n, T from the file; other fields defaulted
};

inline Checkpoint checkpoint_from_json(const json_util::json& j) {
  using namespace json_util;
  check_keys(j, {"version", "hyper", "W1", "P", "W2", "W3"}, {"standardize", "manifest"}, "");
  if (get_int(j["version"], "/version") != kCheckpointVersion)
    throw SchemaError("unsupported checkpoint version " + j["version"].dump(), "/version");
  Checkpoint c;
  const auto& hj = j["hyper"];
  check_keys(hj, {"a", "d", "n", "T"}, {}, "/hyper");
  auto dim = [&](const char* k) {
    const long long v = get_int(hj[k], std::string("/hyper/") + k);
    if (v < 1) throw SchemaError("must be >= 1", std::string("/hyper/") + k);
    return static_cast<std::size_t>(v);
  };
  c.hyper.a = dim("a");
  c.hyper.d = dim("d");
  c.hyper.n = dim("n");
  c.hyper.T = dim("T");
  c.params.W1 = detail::matrix_from_json(j["W1"], "/W1");
  const auto& P = get_array(j["P"], "/P");
  for (std::size_t i = 0; i < P.size(); ++i)
    c.params.P.push_back(detail::matrix_from_json(P[i], "/P/" + std::to_string(i)));
  c.params.W2 = detail::matrix_from_json(j["W2"], "/W2");
  c.params.W3 = detail::matrix_from_json(j["W3"], "/W3");
  if (j.contains("standardize")) {
    const auto& s = j["standardize"];
    check_keys(s, {"mean", "scale"}, {}, "/standardize");
    c.params.standardizer =
        Standardizer{detail::vector_from_json(s["mean"], "/standardize/mean"),
                     detail::vector_from_json(s["scale"], "/standardize/scale")};
    c.hyper.standardize = true;
  }
  check_shapes(c.params, c.hyper);
  return c;
}

inline void save_checkpoint(const ModelParams& m, const Hyperparams& h, const std::string& path,
                            const json_util::json& manifest = nullptr) {
  json_util::write_file(path, checkpoint_to_json(m, h, manifest).dump() + "\n");
}

inline Checkpoint load_checkpoint(const std::string& path) {
  return checkpoint_from_json(json_util::parse(json_util::read_file(path), path));
}

// Throws ShapeError when a loaded checkpoint cannot serve `config`.
inline void require_compatible(const Hyperparams& loaded, const Hyperparams& config) {
  auto cmp = [](std::size_t got, std::size_t want, const char* name) {
    if (got != want)
      throw ShapeError(std::string("checkpoint ") + name + "=" + std::to_string(got) + " but configuration expects " +
                       std::to_string(want));
  };
  cmp(loaded.a, config.a, "a");
  cmp(loaded.d, config.d, "d");
  cmp(loaded.n, config.n, "n");
  cmp(loaded.T, config.T, "T");
}

}  // namespace vfuzz
