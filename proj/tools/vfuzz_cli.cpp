// vfuzz: data generation, training, prediction, fuzzing and comparison.
//
// Exit codes: 0 success, 2 usage error, 3 data/schema error, 4 runtime abort.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "vfuzz/vfuzz.hpp"

namespace fs = std::filesystem;
using vfuzz::json_util::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitRuntime = 4;

// Every option of the subcommand with its effective value.
json manifest(const CLI::App& sub, json seeds) {
  json flags = json::object();
  for (const CLI::Option* o : sub.get_options()) {
    const std::string name = o->get_single_name();
    if (name == "help") continue;
    if (o->count() > 0) {
      const auto& res = o->results();
      if (o->get_expected_min() == 0) flags[name] = true;
      else if (res.size() == 1) flags[name] = res[0];
      else flags[name] = res;
    } else if (o->get_expected_min() == 0) {
      flags[name] = false;
    } else {
      const std::string def = o->get_default_str();
      flags[name] = def.empty() ? json(nullptr) : json(def);
    }
  }
  return {{"tool", "vfuzz"},
          {"version", vfuzz::kVersion},
          {"subcommand", sub.get_name()},
          {"flags", std::move(flags)},
          {"seeds", std::move(seeds)}};
}

void write_json(const std::string& path, const json& j) { vfuzz::json_util::write_file(path, j.dump(2) + "\n"); }

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

std::vector<vfuzz::Bytes> read_seed_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) throw vfuzz::IoError("not a directory", dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw vfuzz::SchemaError("seed directory is empty", dir);
  std::vector<vfuzz::Bytes> out;
  for (const auto& f : files) {
    const std::string s = vfuzz::json_util::read_file(f.string());
    out.emplace_back(s.begin(), s.end());
  }
  return out;
}

vfuzz::Program read_program(const std::string& path) {
  try {
    return vfuzz::assemble(vfuzz::json_util::read_file(path));
  } catch (const vfuzz::ParseError& e) {
    throw vfuzz::ParseError(e.what(), path);
  }
}

// ---------------------------------------------------------------------------

struct GenDataOpts {
  std::string out_train, out_test, manifest_path;
  std::size_t count = 1000;
  double signal = 1.0;
  std::uint64_t seed = 0;
  double train_frac = 0.9;
  std::size_t min_blocks = 3, max_blocks = 12;
};

int cmd_gen_data(const CLI::App& sub, const GenDataOpts& o) {
  if (o.count == 0) throw vfuzz::InvalidArgument("empty corpus requested");
  vfuzz::SynthSpec spec;
  spec.per_class = o.count;
  spec.signal_strength = o.signal;
  spec.seed = o.seed;
  spec.min_blocks = o.min_blocks;
  spec.max_blocks = o.max_blocks;
  auto corpus = vfuzz::generate(spec);
  auto [train, test] = vfuzz::split(corpus, o.train_frac, o.seed);
  ensure_parent(o.out_train);
  ensure_parent(o.out_test);
  vfuzz::json_util::write_file(o.out_train, vfuzz::corpus_to_ndjson(train));
  vfuzz::json_util::write_file(o.out_test, vfuzz::corpus_to_ndjson(test));
  const std::string mpath = o.manifest_path.empty() ? o.out_train + ".manifest.json" : o.manifest_path;
  json m = manifest(sub, {{"generate", o.seed}, {"split", o.seed}});
  m["spec"] = {{"per_class", spec.per_class},
               {"min_blocks", spec.min_blocks},
               {"max_blocks", spec.max_blocks},
               {"min_density", spec.min_density},
               {"max_density", spec.max_density},
               {"signal_strength", spec.signal_strength},
               {"seed", spec.seed}};
  m["train_size"] = train.size();
  m["test_size"] = test.size();
  write_json(mpath, m);
  std::cout << "wrote " << train.size() << " training and " << test.size() << " test graphs\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct TrainOpts {
  std::string corpus, test, out, metrics, init;
  std::size_t attr_dim = vfuzz::slots::kDefaultDimension;
  std::size_t dim = 256, depth = 5, iters = 3, epochs = 10, start_epoch = 0;
  double lr = 1e-4;
  std::uint64_t seed = 0;
  bool zero_init = false, standardize = false;
  std::vector<std::size_t> ks;
};

vfuzz::Corpus read_corpus(const std::string& path, std::size_t dim) {
  return vfuzz::corpus_from_ndjson(vfuzz::json_util::read_file(path), dim, path);
}

int cmd_train(const CLI::App& sub, const TrainOpts& o) {
  vfuzz::Hyperparams h;
  h.a = o.attr_dim;
  h.d = o.dim;
  h.n = o.depth;
  h.T = o.iters;
  h.learning_rate = o.lr;
  h.epochs = o.epochs;
  h.seed = o.seed;
  h.standardize = o.standardize;
  h.check();
  const auto corpus = read_corpus(o.corpus, o.attr_dim);

  std::optional<vfuzz::ModelParams> initial;
  if (!o.init.empty()) {
    auto c = vfuzz::load_checkpoint(o.init);
    vfuzz::require_compatible(c.hyper, h);
    initial = std::move(c.params);
  } else if (o.zero_init) {
    initial = vfuzz::init_params(h, true);
  } else if (o.start_epoch != 0) {
    throw vfuzz::InvalidArgument("--start-epoch needs --init");
  }
  auto result = vfuzz::train(corpus, h, std::move(initial), o.start_epoch);

  const json m = manifest(sub, {{"init", o.seed}, {"shuffle", o.seed}});
  ensure_parent(o.out);
  vfuzz::save_checkpoint(result.params, h, o.out, m);

  json metrics{{"loss_trace", result.loss_trace}, {"train_size", corpus.size()}, {"manifest", m}};
  if (!o.test.empty()) {
    const auto test = read_corpus(o.test, o.attr_dim);
    std::vector<std::size_t> ks = o.ks;
    if (ks.empty()) {
      for (std::size_t k : {10u, 50u, 100u, 200u})
        if (k < test.size()) ks.push_back(k);
      ks.push_back(test.size());
    }
    auto r = vfuzz::evaluate(test, result.params, h, ks);
    json acc = json::object();
    for (const auto& [k, v] : r.accuracy_at_k) acc[std::to_string(k)] = v;
    metrics["eval"] = {{"test_size", test.size()},
                       {"accuracy_at_k", acc},
                       {"recall", r.recall},
                       {"mean_loss", r.mean_loss},
                       {"vulnerable_count", r.vulnerable_count}};
    std::cout << "recall " << r.recall << "\n";
    for (const auto& [k, v] : r.accuracy_at_k) std::cout << "accuracy@" << k << " " << v << "\n";
  }
  const std::string mpath = o.metrics.empty() ? o.out + ".metrics.json" : o.metrics;
  write_json(mpath, metrics);
  if (!result.loss_trace.empty()) std::cout << "final epoch loss " << result.loss_trace.back() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct PredictOpts {
  std::string target, acfg, checkpoint, oracle, out;
  double kappa = vfuzz::kDefaultKappa, omega = vfuzz::kDefaultOmega;
  double oracle_high = 0.9, oracle_low = 0.05;
};

// A ground-truth file marks its bug functions with `oracle_high` and every
// other function with `oracle_low`; a {"predictions": {fn: p}} file is used
// as given.
std::map<std::string, double> oracle_predictions(const std::string& path, const vfuzz::ProgramAcfg& acfg,
                                                 double high, double low) {
  const json j = vfuzz::json_util::parse(vfuzz::json_util::read_file(path), path);
  std::map<std::string, double> out;
  if (j.is_object() && j.contains("predictions")) {
    vfuzz::json_util::check_keys(j, {"predictions"}, {"manifest"}, "");
    for (const auto& [fn, p] : j["predictions"].items())
      out[fn] = vfuzz::json_util::get_number(p, "/predictions/" + fn);
    return out;
  }
  std::set<std::string> vulnerable;
  for (const auto& b : vfuzz::ground_truth_from_json(j)) vulnerable.insert(b.function);
  for (const auto& f : acfg.functions) out[f.function_name] = vulnerable.count(f.function_name) ? high : low;
  return out;
}

int cmd_predict(const CLI::App& sub, const PredictOpts& o) {
  vfuzz::ProgramAcfg acfg;
  if (!o.target.empty()) {
    acfg = vfuzz::extract_acfg(read_program(o.target));
  } else {
    acfg = vfuzz::parse_program_acfg(vfuzz::json_util::read_file(o.acfg));
  }
  std::map<std::string, double> preds;
  if (!o.oracle.empty()) {
    preds = oracle_predictions(o.oracle, acfg, o.oracle_high, o.oracle_low);
  } else {
    auto c = vfuzz::load_checkpoint(o.checkpoint);
    if (c.hyper.a != acfg.schema_dim)
      throw vfuzz::ShapeError("checkpoint expects " + std::to_string(c.hyper.a) + " attributes, ACFG has " +
                              std::to_string(acfg.schema_dim));
    for (const auto& f : acfg.functions) preds[f.function_name] = vfuzz::forward(f, c.params, c.hyper).p;
  }
  auto svs = vfuzz::assign_svs(preds, vfuzz::blocks_by_function(acfg), o.kappa, o.omega);
  ensure_parent(o.out);
  write_json(o.out, vfuzz::svs_to_json(svs, manifest(sub, json::object())));
  std::cout << std::setprecision(17);
  for (const auto& f : acfg.functions) std::cout << f.function_name << "\t" << preds.at(f.function_name) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct FuzzOpts {
  std::string target, seeds_dir, svs, out;
  bool coverage = false, text_mode = false, dedup = false;
  vfuzz::CampaignConfig cfg;
  double max_seconds = 0;
};

int cmd_fuzz(const CLI::App& sub, FuzzOpts o) {
  auto& cfg = o.cfg;
  cfg.mode = o.coverage ? vfuzz::FitnessMode::CoverageCount : vfuzz::FitnessMode::SvsSum;
  cfg.cwj_text_mode = o.text_mode;
  cfg.fitness_dedup_blocks = o.dedup;
  if (o.max_seconds > 0) cfg.max_seconds = o.max_seconds;
  if (!o.coverage && o.svs.empty()) throw vfuzz::InvalidArgument("svs_sum mode requires --svs (or pass --coverage-mode)");
  cfg.check();

  vfuzz::VmTarget target(read_program(o.target), cfg.step_limit);
  std::optional<vfuzz::SvsMap> svs;
  if (!o.svs.empty()) svs = vfuzz::svs_from_json(vfuzz::json_util::parse(vfuzz::json_util::read_file(o.svs), o.svs));
  const auto seeds = read_seed_dir(o.seeds_dir);

  auto report = vfuzz::run_campaign(target, svs ? &*svs : nullptr, seeds, cfg);

  fs::create_directories(o.out);
  const json m = manifest(sub, {{"campaign", cfg.seed}});
  write_json((fs::path(o.out) / "report.json").string(), vfuzz::report_to_json(report, cfg, m));
  vfuzz::json_util::write_file((fs::path(o.out) / "timeseries.csv").string(), vfuzz::report_to_csv(report));

  std::cout << "executions " << report.executions << ", unique crashes " << report.catalog.size()
            << ", covered blocks " << report.covered.size() << "\n";
  if (report.aborted) {
    std::cerr << "campaign aborted: " << report.abort_reason << "\n";
    return kExitRuntime;
  }
  if (report.catalog.empty()) std::cout << "no crashes found\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct ReportOpts {
  std::string in, out;
};

std::string describe_report(const json& r, const std::string& source) {
  std::ostringstream s;
  const auto t = vfuzz::trial_from_report(r, source);
  s << "# Campaign report: " << source << "\n\n";
  s << "- seed: " << t.seed << "\n";
  s << "- fitness mode: " << r["config"].value("fitness_mode", "?") << "\n";
  s << "- executions: " << t.executions << "\n";
  s << "- first crash at execution: "
    << (t.first_crash_execution ? std::to_string(*t.first_crash_execution) : std::string("none")) << "\n";
  s << "- unique crashes: " << t.unique_crashes << "\n";
  s << "- covered blocks: " << t.covered_blocks << "\n";
  if (r.value("aborted", false)) s << "- aborted: " << r.value("abort_reason", "") << "\n";
  if (t.unique_crashes > 0) {
    s << "\n| key | execution | generation | input (hex) |\n|---|---|---|---|\n";
    for (const auto& c : r["crashes"])
      s << "| " << c["key"].get<std::string>() << " | " << c["execution"] << " | " << c["generation"] << " | "
        << c["input_hex"].get<std::string>() << " |\n";
  }
  return s.str();
}

int cmd_report(const CLI::App& sub, const ReportOpts& o) {
  fs::path in = o.in;
  if (fs::is_directory(in)) in /= "report.json";
  const json r = vfuzz::json_util::parse(vfuzz::json_util::read_file(in.string()), in.string());
  std::string text = describe_report(r, in.string());
  text += "\n<!-- manifest: " + manifest(sub, json::object()).dump() + " -->\n";
  if (o.out.empty()) {
    std::cout << text;
  } else {
    ensure_parent(o.out);
    vfuzz::json_util::write_file(o.out, text);
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct CompareOpts {
  std::string a, b, out;
};

// Trial reports of one mode: every report.json below `dir`, or else the
// *.json files directly inside it, in path order.
std::vector<vfuzz::TrialMetrics> read_trials(const std::string& dir) {
  if (!fs::is_directory(dir)) throw vfuzz::IoError("not a directory", dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() == "report.json") files.push_back(e.path());
  if (files.empty())
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<vfuzz::TrialMetrics> out;
  for (const auto& f : files)
    out.push_back(vfuzz::trial_from_report(vfuzz::json_util::parse(vfuzz::json_util::read_file(f.string()), f.string()),
                                           f.string()));
  return out;
}

int cmd_compare(const CLI::App& sub, const CompareOpts& o) {
  const auto a = read_trials(o.a), b = read_trials(o.b);
  std::vector<std::uint64_t> seeds;
  for (const auto& t : a) seeds.push_back(t.seed);
  const auto summary = vfuzz::compare(a, b);
  json j = vfuzz::to_json(summary);
  j["manifest"] = manifest(sub, {{"trials", seeds}});
  ensure_parent(o.out);
  write_json(o.out, j);
  std::cout << "median executions to first crash: a " << summary.a.first_crash_median << ", b "
            << summary.b.first_crash_median << " (winner " << summary.winner_first_crash << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct GenTargetOpts {
  std::string out, ground_truth, name = "target";
  std::size_t helpers = 5, min_diamonds = 1, max_diamonds = 3;
  std::vector<std::size_t> vulnerable;
  std::vector<std::string> bugs;
  bool no_gate = false;
  std::uint64_t seed = 0;
};

// KIND:GUARD_BYTES:FUNCTION[:entry], e.g. ASSERT:1:2
vfuzz::PlannedBug parse_bug(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  const bool entry = parts.size() == 4 && parts[3] == "entry";
  if (parts.size() != 3 && !entry)
    throw vfuzz::InvalidArgument("--bug expects KIND:GUARD_BYTES:FUNCTION[:entry], got '" + s + "'");
  auto kind = vfuzz::crash_kind_from_string(parts[0]);
  if (!kind) throw vfuzz::InvalidArgument("unknown crash kind '" + parts[0] + "'");
  try {
    return {*kind, std::stoul(parts[1]), std::stoul(parts[2]), entry};
  } catch (const std::logic_error&) {
    throw vfuzz::InvalidArgument("--bug expects numeric guard bytes and function index, got '" + s + "'");
  }
}

int cmd_gen_target(const CLI::App& sub, const GenTargetOpts& o) {
  vfuzz::TargetPlan plan;
  plan.name = o.name;
  plan.helpers = o.helpers;
  plan.min_diamonds = o.min_diamonds;
  plan.max_diamonds = o.max_diamonds;
  plan.vulnerable = {o.vulnerable.begin(), o.vulnerable.end()};
  plan.gate_calls = !o.no_gate;
  for (const auto& b : o.bugs) plan.bugs.push_back(parse_bug(b));
  auto t = vfuzz::gen_target(plan, o.seed);
  const json m = manifest(sub, {{"target", o.seed}});
  ensure_parent(o.out);
  vfuzz::json_util::write_file(o.out, "# manifest: " + m.dump() + "\n" + vfuzz::disassemble(t.program));
  if (!o.ground_truth.empty()) {
    json gt = vfuzz::ground_truth_to_json(t.bugs);
    gt["manifest"] = m;
    ensure_parent(o.ground_truth);
    write_json(o.ground_truth, gt);
  }
  std::cout << "wrote " << t.program.functions.size() << " functions, " << t.bugs.size() << " planted bugs\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vulnerability-oriented evolutionary fuzzing toolkit"};
  app.set_version_flag("--version", std::string(vfuzz::kVersion));
  app.require_subcommand(1);

  GenDataOpts gd;
  auto* gen_data = app.add_subcommand("gen-data", "generate a labeled synthetic ACFG corpus");
  gen_data->add_option("--out-train", gd.out_train, "training corpus (NDJSON)")->required();
  gen_data->add_option("--out-test", gd.out_test, "test corpus (NDJSON)")->required();
  gen_data->add_option("--count", gd.count, "graphs per class")->capture_default_str();
  gen_data->add_option("--signal", gd.signal, "signal strength")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  gen_data->add_option("--seed", gd.seed, "rng seed")->capture_default_str();
  gen_data->add_option("--train-frac", gd.train_frac, "training fraction")
      ->check(CLI::Range(0.0, 1.0).description("in (0, 1)"))
      ->capture_default_str();
  gen_data->add_option("--min-blocks", gd.min_blocks)->capture_default_str();
  gen_data->add_option("--max-blocks", gd.max_blocks)->capture_default_str();
  gen_data->add_option("--manifest", gd.manifest_path, "manifest path (default: <out-train>.manifest.json)");

  TrainOpts tr;
  auto* train = app.add_subcommand("train", "train the graph embedding predictor");
  train->add_option("--corpus", tr.corpus, "training corpus")->required();
  train->add_option("--test", tr.test, "held-out corpus to evaluate");
  train->add_option("--dim", tr.dim, "embedding size d")->capture_default_str();
  train->add_option("--depth", tr.depth, "sigma layers n")->capture_default_str();
  train->add_option("--iters", tr.iters, "propagation iterations T")->capture_default_str();
  train->add_option("--lr", tr.lr, "learning rate")->capture_default_str();
  train->add_option("--epochs", tr.epochs, "total epochs")->capture_default_str();
  train->add_option("--seed", tr.seed, "rng seed")->capture_default_str();
  train->add_option("--out", tr.out, "checkpoint path")->required();
  train->add_option("--metrics", tr.metrics, "metrics path (default: <out>.metrics.json)");
  train->add_option("--attr-dim", tr.attr_dim, "attributes per block")->capture_default_str();
  train->add_option("--ks", tr.ks, "K values for accuracy@K");
  train->add_option("--init", tr.init, "resume from this checkpoint");
  train->add_option("--start-epoch", tr.start_epoch, "first epoch to run when resuming")->capture_default_str();
  train->add_flag("--zero-init", tr.zero_init, "start from all-zero parameters");
  train->add_flag("--standardize", tr.standardize, "center attributes by the training mean");

  PredictOpts pr;
  auto* predict = app.add_subcommand("predict", "predict per-function p and write the SVS dump");
  auto* p_target = predict->add_option("--target", pr.target, "program text");
  auto* p_acfg = predict->add_option("--acfg", pr.acfg, "ACFG document");
  p_target->excludes(p_acfg);
  auto* p_ckpt = predict->add_option("--checkpoint", pr.checkpoint, "trained checkpoint");
  auto* p_oracle = predict->add_option("--oracle-svs", pr.oracle, "ground-truth or predictions file used instead of a model");
  p_ckpt->excludes(p_oracle);
  predict->add_option("--oracle-high", pr.oracle_high, "p for ground-truth bug functions")->capture_default_str();
  predict->add_option("--oracle-low", pr.oracle_low, "p for other functions")->capture_default_str();
  predict->add_option("--kappa", pr.kappa)->capture_default_str();
  predict->add_option("--omega", pr.omega)->capture_default_str();
  predict->add_option("--out", pr.out, "SVS dump path")->required();

  FuzzOpts fz;
  auto* fuzz = app.add_subcommand("fuzz", "run a fuzzing campaign");
  fuzz->add_option("--target", fz.target, "program text")->required();
  fuzz->add_option("--seeds-dir", fz.seeds_dir, "directory of initial inputs")->required();
  auto* f_svs = fuzz->add_option("--svs", fz.svs, "SVS dump (svs_sum fitness)");
  auto* f_cov = fuzz->add_flag("--coverage-mode", fz.coverage, "new-block count fitness");
  f_svs->excludes(f_cov);
  fuzz->add_option("--pop", fz.cfg.population, "inputs per generation")->capture_default_str();
  fuzz->add_option("--topk", fz.cfg.top_k, "non-crash seeds kept per generation")->capture_default_str();
  fuzz->add_option("--pool-capacity", fz.cfg.pool_capacity)->capture_default_str();
  fuzz->add_option("--ini-cw", fz.cfg.ini_cw)->capture_default_str();
  fuzz->add_option("--min-cw", fz.cfg.min_cw)->capture_default_str();
  fuzz->add_option("--max-cw", fz.cfg.max_cw)->capture_default_str();
  fuzz->add_flag("--cwj-text-mode", fz.text_mode, "swap crash window growth and shrink");
  fuzz->add_flag("--dedup-blocks", fz.dedup, "count each block once per input in fitness");
  fuzz->add_option("--budget-execs", fz.cfg.max_executions)->capture_default_str();
  fuzz->add_option("--max-seconds", fz.max_seconds, "wall-clock budget (0: none)");
  fuzz->add_option("--step-limit", fz.cfg.step_limit, "blocks per execution")->capture_default_str();
  fuzz->add_option("--seed", fz.cfg.seed)->capture_default_str();
  fuzz->add_option("--jobs", fz.cfg.jobs, "parallel executions per generation")->capture_default_str();
  fuzz->add_option("--out", fz.out, "output directory")->required();

  ReportOpts rp;
  auto* report = app.add_subcommand("report", "summarize a campaign report");
  report->add_option("--in", rp.in, "report.json or its directory")->required();
  report->add_option("--out", rp.out, "write the summary here instead of stdout");

  CompareOpts cp;
  auto* cmp = app.add_subcommand("compare", "paired comparison of two sets of campaign reports");
  cmp->add_option("--a", cp.a, "reports of mode A")->required();
  cmp->add_option("--b", cp.b, "reports of mode B")->required();
  cmp->add_option("--out", cp.out, "summary path")->required();

  GenTargetOpts gt;
  auto* gen_target = app.add_subcommand("gen-target", "generate a toy target with planted bugs");
  gen_target->add_option("--out", gt.out, "program text path")->required();
  gen_target->add_option("--ground-truth", gt.ground_truth, "ground-truth JSON path");
  gen_target->add_option("--name", gt.name)->capture_default_str();
  gen_target->add_option("--helpers", gt.helpers)->capture_default_str();
  gen_target->add_option("--min-diamonds", gt.min_diamonds)->capture_default_str();
  gen_target->add_option("--max-diamonds", gt.max_diamonds)->capture_default_str();
  gen_target->add_option("--vulnerable", gt.vulnerable, "indices of vulnerable helpers")->delimiter(',');
  gen_target->add_option("--bug", gt.bugs, "KIND:GUARD_BYTES:FUNCTION[:entry] (repeatable)");
  gen_target->add_flag("--no-gate", gt.no_gate, "call every helper unconditionally");
  gen_target->add_option("--seed", gt.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen_data) return cmd_gen_data(*gen_data, gd);
    if (*train) return cmd_train(*train, tr);
    if (*predict) {
      if (pr.target.empty() && pr.acfg.empty()) throw vfuzz::InvalidArgument("predict needs --target or --acfg");
      if (pr.checkpoint.empty() && pr.oracle.empty())
        throw vfuzz::InvalidArgument("predict needs --checkpoint or --oracle-svs");
      return cmd_predict(*predict, pr);
    }
    if (*fuzz) return cmd_fuzz(*fuzz, fz);
    if (*report) return cmd_report(*report, rp);
    if (*cmp) return cmd_compare(*cmp, cp);
    if (*gen_target) return cmd_gen_target(*gen_target, gt);
  } catch (const vfuzz::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const vfuzz::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
