#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "marginforge/cglq.hpp"
#include "marginforge/dataset.hpp"
#include "marginforge/error.hpp"
#include "marginforge/local_sampling.hpp"
#include "marginforge/metrics.hpp"
#include "marginforge/model_io.hpp"
#include "marginforge/parallel.hpp"
#include "marginforge/random.hpp"
#include "marginforge/solver.hpp"
#include "marginforge/tuning.hpp"

namespace marginforge::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Values given on the command line. Unset options leave config-file values
// (or defaults) in place.
struct Flags {
  std::optional<std::string> config, train, test, kernel, formulation, out,
      model, deltas, eps_list, sizes;
  std::optional<double> cost, gamma, delta, beta_start, beta_step, beta_max,
      eps_stop, validation_fraction, sample_fraction, kkt_tol;
  std::optional<int> degree;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads, bags, knn, reps, max_rounds, folds,
      cache_mb;
  bool sweep_on_test = false;
  bool scale = false;
};

json defaults_for(const std::string& command) {
  return {
      {"seed", 1},
      {"delta", 0.05},
      {"bags", 10},
      {"beta_start", 0.1},
      {"beta_step", 0.1},
      {"beta_max", 2.0},
      {"knn", 5},
      {"eps_stop", 0.001},
      {"max_rounds", 20},
      {"reps", command == "indecision" ? 100 : 10},
      {"validation_fraction", 0.1},
      {"sweep_on_test", false},
      {"scale", false},
      {"sample_fraction", 0.01},
      {"folds", 10},
      {"kkt_tol", 1e-3},
      {"cache_mb", 256},
      {"deltas", {0.01, 0.05, 0.1}},
      {"eps_list", {0.1, 0.01, 0.001}},
      {"sizes", {5000, 10000, 20000}},
  };
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("malformed list entry '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty list '" + s + "'");
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  try {
    json j;
    in >> j;
    if (!j.is_object()) throw ConfigError("config '" + path + "' is not a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
}

struct Settings {
  json values;      // resolved configuration (deterministic part)
  std::size_t threads = 1;
  std::string out_dir = ".";

  template <typename T>
  T get(const char* key) const {
    try {
      return values.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
  }
  bool has(const char* key) const { return values.contains(key); }
};

Settings resolve(const std::string& command, const Flags& f) {
  json v = defaults_for(command);
  std::optional<std::size_t> config_threads;
  std::string out_dir = ".";
  if (f.config) {
    json file = read_json_file(*f.config);
    if (file.contains("threads")) {
      config_threads = file["threads"].get<std::size_t>();
      file.erase("threads");
    }
    if (file.contains("out")) {
      out_dir = file["out"].get<std::string>();
      file.erase("out");
    }
    for (auto& [key, value] : file.items()) v[key] = value;
  }
  auto set = [&](const char* key, const auto& opt) {
    if (opt) v[key] = *opt;
  };
  set("train", f.train);
  set("test", f.test);
  set("model", f.model);
  set("seed", f.seed);
  set("delta", f.delta);
  set("bags", f.bags);
  set("beta_start", f.beta_start);
  set("beta_step", f.beta_step);
  set("beta_max", f.beta_max);
  set("knn", f.knn);
  set("eps_stop", f.eps_stop);
  set("max_rounds", f.max_rounds);
  set("reps", f.reps);
  set("validation_fraction", f.validation_fraction);
  set("sample_fraction", f.sample_fraction);
  set("folds", f.folds);
  set("kkt_tol", f.kkt_tol);
  set("cache_mb", f.cache_mb);
  if (f.sweep_on_test) v["sweep_on_test"] = true;
  if (f.scale) v["scale"] = true;
  if (f.deltas) v["deltas"] = parse_list(*f.deltas);
  if (f.eps_list) v["eps_list"] = parse_list(*f.eps_list);
  if (f.sizes) v["sizes"] = parse_list(*f.sizes);

  // Kernel flags build a single-kernel list on top of the config's first
  // kernel (or the config-level kernel keys).
  const bool kernel_flags = f.kernel || f.cost || f.gamma || f.degree || f.formulation;
  if (kernel_flags || !v.contains("kernels")) {
    json k = v.contains("kernels") && v["kernels"].is_array() && !v["kernels"].empty()
                 ? v["kernels"][0]
                 : json::object();
    for (const char* key : {"kernel", "cost", "gamma", "degree", "formulation"})
      if (v.contains(key) && !k.contains(key)) k[key] = v[key];
    if (f.kernel) k["kernel"] = *f.kernel;
    if (f.cost) k["cost"] = *f.cost;
    if (f.gamma) k["gamma"] = *f.gamma;
    if (f.degree) k["degree"] = *f.degree;
    if (f.formulation) k["formulation"] = *f.formulation;
    v["kernels"] = json::array({kernel_to_json(kernel_from_json(k))});
  } else {
    json list = json::array();
    for (const json& k : v["kernels"]) list.push_back(kernel_to_json(kernel_from_json(k)));
    v["kernels"] = list;
  }
  for (const char* key : {"kernel", "cost", "gamma", "degree", "formulation"})
    v.erase(key);

  Settings s;
  s.values = std::move(v);
  s.out_dir = f.out.value_or(out_dir);
  if (f.threads) {
    s.threads = *f.threads;
  } else if (std::getenv("MARGINFORGE_THREADS")) {
    s.threads = default_threads();
  } else if (config_threads) {
    s.threads = *config_threads;
  } else {
    s.threads = default_threads();
  }
  s.threads = std::max<std::size_t>(s.threads, 1);
  return s;
}

std::vector<KernelSpec> kernels_of(const Settings& s) {
  std::vector<KernelSpec> out;
  for (const json& k : s.values.at("kernels")) out.push_back(kernel_from_json(k));
  return out;
}

SolverConfig solver_of(const Settings& s) {
  SolverConfig c;
  c.kkt_tol = s.get<double>("kkt_tol");
  c.cache_mb = s.get<std::size_t>("cache_mb");
  c.seed = s.get<std::uint64_t>("seed");
  c.validate();
  return c;
}

struct Data {
  Dataset train;
  Dataset test;
  bool has_test = false;
};

Data load_data(const Settings& s, bool need_test) {
  if (!s.has("train")) throw ConfigError("missing --train");
  if (need_test && !s.has("test")) throw ConfigError("missing --test");
  Data d;
  d.train = load_libsvm(s.get<std::string>("train"));
  if (d.train.empty()) throw ConfigError("training set is empty");
  if (s.has("test")) {
    d.test = load_libsvm(s.get<std::string>("test"));
    d.has_test = true;
    if (need_test && d.test.empty()) throw ConfigError("test set is empty");
  }
  if (s.get<bool>("scale")) {
    const auto scaler = MinMaxScaler::fit(d.train);
    d.train = scaler.transform(d.train);
    if (d.has_test) d.test = scaler.transform(d.test);
  }
  return d;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

json provenance(const std::string& command, const Settings& s, const Data& d) {
  json p = {{"tool", "marginforge"},
            {"version", MARGINFORGE_VERSION},
            {"command", command},
            {"seed", s.get<std::uint64_t>("seed")},
            {"config_hash", hex64(fnv1a(s.values.dump()))},
            {"config", s.values},
            {"train_fingerprint", hex64(d.train.fingerprint())}};
  if (d.has_test) p["test_fingerprint"] = hex64(d.test.fingerprint());
  return p;
}

fs::path prepare_out(const Settings& s) {
  fs::path dir(s.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + s.out_dir + "'");
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
}

void write_report(const fs::path& dir, const json& report) {
  write_text(dir / "report.json", report.dump(2) + "\n");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string fmt_ratio(const std::optional<double>& v) { return v ? fmt(*v) : "n/a"; }

json ratio_json(const std::optional<double>& v) {
  return v ? json(*v) : json("n/a");
}

// One CSV row per metric, one column per kernel.
std::string metric_table(const std::vector<KernelSpec>& kernels,
                         const std::vector<std::pair<std::string, std::vector<std::string>>>& rows) {
  std::string csv = "metric";
  for (const auto& k : kernels) csv += "," + std::string(to_string(k.family));
  csv += "\n";
  for (const auto& [label, cells] : rows) {
    csv += label;
    for (const auto& c : cells) csv += "," + c;
    csv += "\n";
  }
  return csv;
}

struct FitSplit {
  Dataset fit;
  Dataset validation;
};

FitSplit carve_validation(const Settings& s, const Data& d) {
  if (s.get<bool>("sweep_on_test")) return {d.train, d.test};
  const auto parts = split(d.train, s.get<double>("validation_fraction"),
                           derive_seed(s.get<std::uint64_t>("seed"),
                                       {static_cast<std::uint64_t>(StreamTag::Validation)}));
  return {parts.train, parts.test};
}

struct FullBaseline {
  SvmModel model;
  double error = 0.0;
  double seconds = 0.0;
};

FullBaseline full_solve(const Dataset& train, const Dataset& test,
                        const KernelSpec& spec, const SolverConfig& solver) {
  Stopwatch clock;
  FullBaseline b;
  b.model = solve(train, spec, solver).model;
  b.seconds = clock.seconds();
  b.error = error_rate(b.model, test);
  return b;
}

json full_json(const FullBaseline& b) {
  const auto [pos, neg] = b.model.sv_class_split();
  return {{"sv_count", b.model.num_sv()},
          {"sv_pos", pos},
          {"sv_neg", neg},
          {"error_rate", b.error},
          {"unconverged", b.model.unconverged}};
}

json mean_json(const AggregateReport& a) {
  return {{"sv_initial", a.mean.sv_initial},
          {"sv_final", a.mean.sv_final},
          {"sv_real", a.mean.sv_real},
          {"pct_full_sv", a.mean.pct_full_sv},
          {"error_rate", a.mean.error_rate},
          {"error_sd", a.error_sd},
          {"sd_undefined", a.sd_undefined},
          {"error_min", a.error_min},
          {"error_max", a.error_max},
          {"error_ratio", ratio_json(a.mean.error_ratio)},
          {"beta_final", a.mean.beta_final},
          {"rounds", a.mean.rounds}};
}

json runs_json(const AggregateReport& a) {
  json runs = json::array();
  for (const RunMetrics& r : a.runs)
    runs.push_back({{"sv_initial", r.sv_initial},
                    {"sv_final", r.sv_final},
                    {"sv_real", r.sv_real},
                    {"pct_full_sv", r.pct_full_sv},
                    {"error_rate", r.error_rate},
                    {"error_ratio", ratio_json(r.error_ratio)},
                    {"beta_final", r.beta_final},
                    {"rounds", r.rounds}});
  return runs;
}

json timing_json(const AggregateReport& a, double full_seconds) {
  json times = json::array();
  for (const RunMetrics& r : a.runs) times.push_back(r.time_s);
  return {{"full_time_s", full_seconds},
          {"mean_time_s", a.mean.time_s},
          {"mean_pct_full_time", a.mean.pct_full_time},
          {"run_time_s", times}};
}

// Parallelism goes to replications when there are several, else inside a run.
std::pair<std::size_t, std::size_t> split_threads(std::size_t threads, std::size_t reps) {
  return reps > 1 ? std::pair{threads, std::size_t{1}} : std::pair{std::size_t{1}, threads};
}

BetaSchedule schedule_of(const Settings& s) {
  BetaSchedule b{s.get<double>("beta_start"), s.get<double>("beta_step"),
                 s.get<double>("beta_max")};
  b.validate();
  return b;
}

LocalSamplingConfig local_config_of(const Settings& s, const KernelSpec& spec,
                                    double delta, std::uint64_t seed,
                                    std::size_t threads) {
  LocalSamplingConfig c;
  c.delta = delta;
  c.bags = s.get<std::size_t>("bags");
  c.beta = s.get<double>("beta_start");
  c.seed = seed;
  c.kernel = spec;
  c.solver = solver_of(s);
  c.threads = threads;
  c.validate();
  return c;
}

// --- commands ---------------------------------------------------------------

int cmd_train_full(const Settings& s, std::ostream& out) {
  const Data d = load_data(s, true);
  const auto kernels = kernels_of(s);
  const auto solver = solver_of(s);
  const fs::path dir = prepare_out(s);

  json results = json::array(), timings = json::array();
  std::string csv = "kernel,cost,gamma,degree,sv_count,sv_pos,sv_neg,error_rate,time_s\n";
  for (std::size_t k = 0; k < kernels.size(); ++k) {
    const KernelSpec& spec = kernels[k];
    const FullBaseline b = full_solve(d.train, d.test, spec, solver);
    json row = full_json(b);
    row["kernel"] = kernel_to_json(spec);
    results.push_back(row);
    timings.push_back({{"kernel", std::string(to_string(spec.family))}, {"time_s", b.seconds}});
    const auto [pos, neg] = b.model.sv_class_split();
    csv += std::string(to_string(spec.family)) + "," + fmt(spec.cost) + "," +
           (spec.family == KernelFamily::Linear ? "--" : fmt(spec.gamma)) + "," +
           (spec.family == KernelFamily::Polynomial ? std::to_string(spec.degree) : "--") +
           "," + std::to_string(b.model.num_sv()) + "," + std::to_string(pos) + "," +
           std::to_string(neg) + "," + fmt(b.error) + "," + fmt(b.seconds) + "\n";
    save_model((dir / (k == 0 ? std::string("model.json")
                              : "model_" + std::to_string(k) + ".json")).string(),
               b.model);
    out << to_string(spec.family) << ": " << b.model.num_sv() << " SVs (" << pos
        << " || " << neg << "), error " << fmt(b.error) << ", " << fmt(b.seconds)
        << " s\n";
  }
  write_report(dir, {{"provenance", provenance("train-full", s, d)},
                     {"results", results},
                     {"volatile", {{"threads", s.threads}, {"timings", timings}}}});
  write_text(dir / "table.csv", csv);
  return kExitOk;
}

using RunFn = std::function<RunMetrics(std::size_t, std::uint64_t, std::size_t)>;

// Shared driver of train-local and train-cglq.
// `traces` is filled per replication by the run closure (may stay empty).
int subsample_command(const std::string& name, const Settings& s, std::ostream& out,
                      std::vector<json>& traces,
                      const std::function<RunFn(const FitSplit&, const Dataset&,
                                                const KernelSpec&, const FullBaseline&)>& make_run) {
  const Data d = load_data(s, true);
  const auto kernels = kernels_of(s);
  const auto solver = solver_of(s);
  const std::size_t reps = s.get<std::size_t>("reps");
  if (reps == 0) throw ConfigError("reps must be >= 1");
  const FitSplit fs_ = carve_validation(s, d);
  const fs::path dir = prepare_out(s);
  const auto [outer, inner] = split_threads(s.threads, reps);

  json results = json::array(), timings = json::array();
  std::vector<AggregateReport> aggs;
  std::optional<SvmModel> first_model;
  for (const KernelSpec& spec : kernels) {
    const FullBaseline full = full_solve(fs_.fit, d.test, spec, solver);
    const RunFn run = make_run(fs_, d.test, spec, full);
    const AggregateReport agg = run_replications(
        [&](std::size_t rep, std::uint64_t seed) { return run(rep, seed, inner); },
        reps, s.get<std::uint64_t>("seed"), outer);
    json runs = runs_json(agg);
    for (std::size_t i = 0; i < traces.size() && i < runs.size(); ++i)
      runs[i]["trace"] = traces[i];
    results.push_back({{"kernel", kernel_to_json(spec)},
                       {"full", full_json(full)},
                       {"mean", mean_json(agg)},
                       {"runs", runs}});
    json t = timing_json(agg, full.seconds);
    t["kernel"] = std::string(to_string(spec.family));
    timings.push_back(t);
    out << to_string(spec.family) << ": mean error " << fmt(agg.mean.error_rate)
        << " (sd " << fmt(agg.error_sd) << "), full error " << fmt(full.error)
        << ", ratio " << fmt_ratio(agg.mean.error_ratio) << ", time "
        << fmt(agg.mean.pct_full_time) << "% of full\n";
    aggs.push_back(agg);
  }

  const bool local = name == "train-local";
  std::vector<std::pair<std::string, std::vector<std::string>>> rows;
  auto add = [&](const std::string& label, auto cell) {
    std::vector<std::string> cells;
    for (const auto& a : aggs) cells.push_back(cell(a));
    rows.emplace_back(label, std::move(cells));
  };
  if (local) add("beta", [](const AggregateReport& a) { return fmt(a.mean.beta_final); });
  else add("rounds", [](const AggregateReport& a) { return fmt(a.mean.rounds); });
  add("SV initial", [](const AggregateReport& a) { return fmt(a.mean.sv_initial); });
  add("SV final", [](const AggregateReport& a) { return fmt(a.mean.sv_final); });
  add("SV real", [](const AggregateReport& a) { return fmt(a.mean.sv_real); });
  add("% full SV", [](const AggregateReport& a) { return fmt(a.mean.pct_full_sv); });
  add("Error rate", [](const AggregateReport& a) { return fmt(a.mean.error_rate); });
  add("Sd. dev.", [](const AggregateReport& a) { return fmt(a.error_sd); });
  add("Error ratio", [](const AggregateReport& a) { return fmt_ratio(a.mean.error_ratio); });
  add("Time (s)", [](const AggregateReport& a) { return fmt(a.mean.time_s); });
  add("% full time", [](const AggregateReport& a) { return fmt(a.mean.pct_full_time); });

  write_report(dir, {{"provenance", provenance(name, s, d)},
                     {"results", results},
                     {"volatile", {{"threads", s.threads}, {"timings", timings}}}});
  write_text(dir / "table.csv", metric_table(kernels, rows));
  return kExitOk;
}

int cmd_train_local(const Settings& s, std::ostream& out) {
  const BetaSchedule schedule = schedule_of(s);
  const double delta = s.get<double>("delta");
  std::vector<json> traces;
  return subsample_command(
      "train-local", s, out, traces,
      [&](const FitSplit& data, const Dataset& test, const KernelSpec& spec,
          const FullBaseline& full) -> RunFn {
        traces.assign(s.get<std::size_t>("reps"), json());
        return [&, spec](std::size_t rep, std::uint64_t seed, std::size_t threads) {
          const auto cfg = local_config_of(s, spec, delta, seed, threads);
          const BetaSweepResult sweep = beta_sweep(data.fit, data.validation, cfg, schedule);
          traces[rep] = trace_to_json(sweep.best.trace);
          traces[rep]["validation_errors"] = sweep.errors;
          traces[rep]["capped"] = sweep.capped;
          RunMetrics m;
          m.sv_initial = sweep.best.sv_initial;
          m.sv_final = sweep.best.model.num_sv();
          const SvOverlap o = sv_overlap(sweep.best.model, full.model);
          m.sv_real = o.sv_real;
          m.pct_full_sv = o.pct_full_sv;
          m.error_rate = error_rate(sweep.best.model, test);
          m.error_ratio = error_ratio(m.error_rate, full.error);
          m.time_s = sweep.total_seconds;
          m.pct_full_time = full.seconds > 0 ? m.time_s / full.seconds * 100.0 : 0.0;
          m.beta_final = sweep.beta_final;
          return m;
        };
      });
}

int cmd_train_cglq(const Settings& s, std::ostream& out) {
  std::vector<json> traces;
  return subsample_command(
      "train-cglq", s, out, traces,
      [&](const FitSplit& data, const Dataset& test, const KernelSpec& spec,
          const FullBaseline& full) -> RunFn {
        traces.assign(s.get<std::size_t>("reps"), json());
        return [&, spec](std::size_t rep, std::uint64_t seed, std::size_t) {
          CglqConfig cfg;
          cfg.delta = s.get<double>("delta");
          cfg.neighbors = s.get<std::size_t>("knn");
          cfg.eps_stop = s.get<double>("eps_stop");
          cfg.max_rounds = s.get<std::size_t>("max_rounds");
          cfg.seed = seed;
          cfg.kernel = spec;
          cfg.solver = solver_of(s);
          const CglqResult r = cglq(data.fit, cfg, data.validation);
          json rounds = json::array();
          for (const CglqRound& round : r.rounds)
            rounds.push_back({{"training_size", round.training_size},
                              {"num_sv", round.num_sv},
                              {"validation_error", round.validation_error}});
          traces[rep] = {{"best_round", r.best_round}, {"rounds", rounds},
                         {"warnings", r.warnings}};
          RunMetrics m;
          m.sv_initial = r.sv_initial;
          m.sv_final = r.model.num_sv();
          const SvOverlap o = sv_overlap(r.model, full.model);
          m.sv_real = o.sv_real;
          m.pct_full_sv = o.pct_full_sv;
          m.error_rate = error_rate(r.model, test);
          m.error_ratio = error_ratio(m.error_rate, full.error);
          m.time_s = r.total_seconds;
          m.pct_full_time = full.seconds > 0 ? m.time_s / full.seconds * 100.0 : 0.0;
          m.rounds = r.enrichment_rounds();
          return m;
        };
      });
}

ParamGrid grid_of(const Settings& s) {
  ParamGrid g;
  if (s.has("grid")) {
    const json& j = s.values.at("grid");
    if (j.contains("costs")) g.costs = j["costs"].get<std::vector<double>>();
    if (j.contains("gammas")) g.gammas = j["gammas"].get<std::vector<double>>();
    if (j.contains("degrees")) g.degrees = j["degrees"].get<std::vector<int>>();
  }
  return g;
}

int cmd_tune(const Settings& s, const Flags& f, std::ostream& out) {
  const Data d = load_data(s, false);
  const fs::path dir = prepare_out(s);
  std::vector<KernelFamily> families;
  Formulation formulation = kernels_of(s).front().formulation;
  if (f.kernel) families.push_back(parse_kernel_family(*f.kernel));
  else families = {KernelFamily::Linear, KernelFamily::Polynomial, KernelFamily::Rbf};

  const ParamGrid grid = grid_of(s);
  json params = json::object(), report_rows = json::array();
  std::string csv = "kernel,cost,gamma,degree,cv_error,folds_used\n";
  for (KernelFamily family : families) {
    const CvResult r = grid_search_cv(d.train, s.get<double>("sample_fraction"), grid,
                                      family, formulation, s.get<std::size_t>("folds"),
                                      s.get<std::uint64_t>("seed"), solver_of(s), s.threads);
    json best = kernel_to_json(r.best);
    best["cv_error"] = r.best_error;
    params[std::string(to_string(family))] = best;
    json cands = json::array();
    for (const CvCandidate& c : r.candidates) {
      cands.push_back({{"kernel", kernel_to_json(c.spec)},
                       {"cv_error", c.disqualified ? json("n/a") : json(c.mean_error)},
                       {"folds_used", c.folds_used}});
      csv += std::string(to_string(family)) + "," + fmt(c.spec.cost) + "," +
             (family == KernelFamily::Linear ? "--" : fmt(c.spec.gamma)) + "," +
             (family == KernelFamily::Polynomial ? std::to_string(c.spec.degree) : "--") +
             "," + (c.disqualified ? "n/a" : fmt(c.mean_error)) + "," +
             std::to_string(c.folds_used) + "\n";
    }
    report_rows.push_back({{"family", std::string(to_string(family))},
                           {"sample_size", r.sample_size},
                           {"best", best},
                           {"candidates", cands},
                           {"warnings", r.warnings}});
    out << to_string(family) << ": " << kernel_to_json(r.best).dump()
        << " cv error " << fmt(r.best_error) << "\n";
  }
  write_text(dir / "params.json", params.dump(2) + "\n");
  write_report(dir, {{"provenance", provenance("tune", s, d)},
                     {"results", report_rows},
                     {"volatile", {{"threads", s.threads}}}});
  write_text(dir / "table.csv", csv);
  return kExitOk;
}

int cmd_sweep_delta(const Settings& s, std::ostream& out) {
  const auto deltas = s.get<std::vector<double>>("deltas");
  for (double delta : deltas)
    if (!(delta > 0.0 && delta < 1.0))
      throw ConfigError("every delta must lie in (0, 1), got " + fmt(delta));
  const Data d = load_data(s, true);
  const KernelSpec spec = kernels_of(s).front();
  const std::size_t reps = s.get<std::size_t>("reps");
  if (reps == 0) throw ConfigError("reps must be >= 1");
  const BetaSchedule schedule = schedule_of(s);
  const FitSplit data = carve_validation(s, d);
  const fs::path dir = prepare_out(s);
  const auto [outer, inner] = split_threads(s.threads, reps);

  std::string csv = "delta,mean_error,min_error,max_error\n";
  json rows = json::array(), times = json::array();
  for (double delta : deltas) {
    const AggregateReport agg = run_replications(
        [&](std::size_t, std::uint64_t seed) {
          const auto cfg = local_config_of(s, spec, delta, seed, inner);
          const BetaSweepResult sweep = beta_sweep(data.fit, data.validation, cfg, schedule);
          RunMetrics m;
          m.error_rate = error_rate(sweep.best.model, d.test);
          m.beta_final = sweep.beta_final;
          m.time_s = sweep.total_seconds;
          return m;
        },
        reps, s.get<std::uint64_t>("seed"), outer);
    csv += fmt(delta) + "," + fmt(agg.mean.error_rate) + "," + fmt(agg.error_min) + "," +
           fmt(agg.error_max) + "\n";
    rows.push_back({{"delta", delta},
                    {"mean_error", agg.mean.error_rate},
                    {"min_error", agg.error_min},
                    {"max_error", agg.error_max},
                    {"error_sd", agg.error_sd}});
    times.push_back({{"delta", delta}, {"mean_time_s", agg.mean.time_s}});
    out << "delta " << fmt(delta) << ": mean error " << fmt(agg.mean.error_rate) << "\n";
  }
  write_report(dir, {{"provenance", provenance("sweep-delta", s, d)},
                     {"results", rows},
                     {"volatile", {{"threads", s.threads}, {"timings", times}}}});
  write_text(dir / "table.csv", csv);
  return kExitOk;
}

int cmd_indecision(const Settings& s, std::ostream& out) {
  const auto eps_list = s.get<std::vector<double>>("eps_list");
  for (double e : eps_list)
    if (e < 0.0) throw ConfigError("eps values must be >= 0");
  std::vector<std::size_t> sizes;
  for (double n : s.get<std::vector<double>>("sizes")) {
    if (!(n >= 2.0) || n != std::floor(n))
      throw ConfigError("sample sizes must be integers >= 2");
    sizes.push_back(static_cast<std::size_t>(n));
  }
  const Data d = load_data(s, false);
  for (std::size_t n : sizes)
    if (n > d.train.size())
      throw ConfigError("sample size " + std::to_string(n) + " exceeds the " +
                        std::to_string(d.train.size()) + " training rows");
  const KernelSpec spec = kernels_of(s).front();
  const SolverConfig solver = solver_of(s);
  const std::size_t reps = s.get<std::size_t>("reps");
  if (reps == 0) throw ConfigError("reps must be >= 1");
  const fs::path dir = prepare_out(s);
  const std::uint64_t seed = s.get<std::uint64_t>("seed");

  // fractions[size][rep][eps]
  std::vector<std::vector<std::vector<double>>> fractions(
      sizes.size(), std::vector<std::vector<double>>(reps));
  parallel_for(sizes.size() * reps, s.threads, [&](std::size_t task) {
    const std::size_t si = task / reps, rep = task % reps;
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(StreamTag::Replication),
                               sizes[si], rep}));
    auto rows = rng.permutation(d.train.size());
    rows.resize(sizes[si]);
    std::sort(rows.begin(), rows.end());
    const Dataset sample = d.train.subset(rows);
    const SvmModel model = solve(sample, spec, solver).model;
    for (double e : eps_list)
      fractions[si][rep].push_back(indecision_probability(model, sample, e));
  });

  std::string csv = "eps";
  for (std::size_t n : sizes) csv += ",n=" + std::to_string(n);
  csv += "\n";
  json table = json::array();
  for (std::size_t ei = 0; ei < eps_list.size(); ++ei) {
    csv += fmt(eps_list[ei]);
    json row = {{"eps", eps_list[ei]}, {"by_size", json::array()}};
    for (std::size_t si = 0; si < sizes.size(); ++si) {
      double sum = 0.0;
      for (std::size_t rep = 0; rep < reps; ++rep) sum += fractions[si][rep][ei];
      const double mean = sum / static_cast<double>(reps);
      csv += "," + fmt(mean);
      row["by_size"].push_back({{"n", sizes[si]}, {"mean_fraction", mean}});
    }
    csv += "\n";
    table.push_back(row);
  }
  write_report(dir, {{"provenance", provenance("indecision", s, d)},
                     {"results", table},
                     {"volatile", {{"threads", s.threads}}}});
  write_text(dir / "table.csv", csv);
  out << csv;
  return kExitOk;
}

int cmd_predict(const Settings& s, std::ostream& out) {
  if (!s.has("model")) throw ConfigError("missing --model");
  if (!s.has("test")) throw ConfigError("missing --test");
  const SvmModel model = load_model(s.get<std::string>("model"));
  const Dataset test = load_libsvm(s.get<std::string>("test"));
  if (test.empty()) throw ConfigError("test set is empty");
  const fs::path dir = prepare_out(s);
  std::string preds;
  for (const SparseVector& x : test.samples()) {
    const double v = decision_value(model, x);
    preds += (classify_value(v) > 0 ? "+1 " : "-1 ");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    preds += buf;
  }
  write_text(dir / "predictions.txt", preds);
  const double err = error_rate(model, test);
  write_report(dir, {{"provenance",
                      {{"tool", "marginforge"},
                       {"version", MARGINFORGE_VERSION},
                       {"command", "predict"},
                       {"config_hash", hex64(fnv1a(s.values.dump()))},
                       {"test_fingerprint", hex64(test.fingerprint())}}},
                     {"results", {{"error_rate", err}, {"count", test.size()}}},
                     {"volatile", json::object()}});
  out << "error rate " << fmt(err) << " on " << test.size() << " rows\n";
  return kExitOk;
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config file; flags override its keys");
  sub->add_option("--train", f.train, "Training set (LibSVM format)");
  sub->add_option("--test", f.test, "Test set (LibSVM format)");
  sub->add_option("--kernel", f.kernel, "linear | poly | rbf");
  sub->add_option("--cost", f.cost, "Cost C");
  sub->add_option("--gamma", f.gamma, "Kernel gamma");
  sub->add_option("--degree", f.degree, "Polynomial degree");
  sub->add_option("--formulation", f.formulation, "l1 | l2");
  sub->add_option("--seed", f.seed, "RNG seed");
  sub->add_option("--out", f.out, "Output directory");
  sub->add_option("--threads", f.threads, "Worker threads");
  sub->add_option("--kkt-tol", f.kkt_tol, "SMO stopping tolerance");
  sub->add_option("--cache-mb", f.cache_mb, "Kernel row cache size (MB)");
  sub->add_flag("--scale", f.scale, "Min-max scale features (fit on train)");
}

void add_method(CLI::App* sub, Flags& f) {
  sub->add_option("--delta", f.delta, "Subsample fraction delta");
  sub->add_option("--bags", f.bags, "Number of disjoint subsamples L");
  sub->add_option("--beta-start", f.beta_start, "First beta of the sweep");
  sub->add_option("--beta-step", f.beta_step, "Beta increment");
  sub->add_option("--beta-max", f.beta_max, "Largest beta tried");
  sub->add_option("--knn", f.knn, "CGLQ neighbor count K");
  sub->add_option("--eps-stop", f.eps_stop, "CGLQ improvement threshold");
  sub->add_option("--max-rounds", f.max_rounds, "CGLQ round limit");
  sub->add_option("--reps", f.reps, "Replications");
  sub->add_option("--validation-fraction", f.validation_fraction,
                  "Share of training data held out for the beta sweep / CGLQ stop");
  sub->add_flag("--sweep-on-test", f.sweep_on_test,
                "Drive the beta sweep and CGLQ stop with the test set");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"marginforge: local sampling SVM benchmark harness"};
  app.require_subcommand(1);
  Flags f;
  std::map<std::string, CLI::App*> subs;
  for (const char* name : {"train-full", "train-local", "train-cglq", "tune",
                           "sweep-delta", "indecision", "predict"}) {
    CLI::App* sub = app.add_subcommand(name);
    add_common(sub, f);
    subs[name] = sub;
  }
  for (const char* name : {"train-local", "train-cglq", "sweep-delta", "indecision"})
    add_method(subs[name], f);
  subs["train-full"]->description("Solve on the full training set");
  subs["train-local"]->description("Local sampling SVM with a beta sweep, replicated");
  subs["train-cglq"]->description("Subsample + nearest-neighbor enrichment baseline");
  subs["tune"]->description("Grid search with stratified k-fold CV on a small sample");
  subs["tune"]->add_option("--sample-fraction", f.sample_fraction, "Share of data used for CV");
  subs["tune"]->add_option("--folds", f.folds, "Number of CV folds");
  subs["sweep-delta"]->description("Test error versus delta");
  subs["sweep-delta"]->add_option("--deltas", f.deltas, "Comma-separated deltas");
  subs["indecision"]->description("Empirical indecision probability vs eps and n");
  subs["indecision"]->add_option("--eps", f.eps_list, "Comma-separated eps values");
  subs["indecision"]->add_option("--sizes", f.sizes, "Comma-separated sample sizes");
  subs["predict"]->description("Score a test set with a saved model");
  subs["predict"]->add_option("--model", f.model, "model.json from train-full");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  std::string command;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) command = name;

  try {
    const Settings s = resolve(command, f);
    if (command == "train-full") return cmd_train_full(s, out);
    if (command == "train-local") return cmd_train_local(s, out);
    if (command == "train-cglq") return cmd_train_cglq(s, out);
    if (command == "tune") return cmd_tune(s, f, out);
    if (command == "sweep-delta") return cmd_sweep_delta(s, out);
    if (command == "indecision") return cmd_indecision(s, out);
    if (command == "predict") return cmd_predict(s, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  err << "error: unknown command\n";
  return kExitConfig;
}

}  // namespace marginforge::cli
