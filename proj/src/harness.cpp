#include "sgpnet/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sgpnet/errors.hpp"

namespace sgpnet {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::set<std::string> kAlgorithms{"SGP", "GP", "SPOO", "LCOR", "LPR", "ORACLE"};

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

CostFn parse_cost(const json& j, const std::string& where) {
  check_keys(j, {"kind", "param"}, where);
  const std::string kind = j.at("kind").get<std::string>();
  const double p = j.at("param").get<double>();
  if (kind == "linear") return CostFn::linear(p);
  if (kind == "queue") return CostFn::queue(p);
  throw ConfigError("cost kind must be linear or queue in " + where);
}

ScenarioSpec parse_inline(const json& j) {
  check_keys(j, {"name", "nodes", "types", "links", "edges", "cpus", "weights", "data_size", "result_size", "tasks"},
             "inline scenario");
  ScenarioSpec sc;
  sc.name = j.value("name", std::string("inline"));
  const int n = j.at("nodes").get<int>();
  const int types = j.value("types", 1);
  if (n <= 0 || types <= 0) throw ConfigError("inline scenario needs positive nodes and types");
  NetworkSpec spec(n, types);
  auto node = [&](const json& v) {
    const int i = v.get<int>();
    if (i < 0 || i >= n) throw ConfigError("node id " + std::to_string(i) + " out of range");
    return i;
  };
  if (j.contains("links"))
    for (const auto& l : j.at("links")) {
      check_keys(l, {"from", "to", "kind", "param"}, "link");
      spec.add_link(node(l.at("from")), node(l.at("to")), parse_cost(json{{"kind", l.at("kind")}, {"param", l.at("param")}}, "link"));
    }
  if (j.contains("edges"))
    for (const auto& l : j.at("edges")) {
      check_keys(l, {"from", "to", "kind", "param"}, "edge");
      spec.add_edge(node(l.at("from")), node(l.at("to")), parse_cost(json{{"kind", l.at("kind")}, {"param", l.at("param")}}, "edge"));
    }
  const auto& cpus = j.at("cpus");
  if (static_cast<int>(cpus.size()) != n) throw ConfigError("cpus must list one entry per node");
  for (int i = 0; i < n; ++i)
    if (!cpus[i].is_null()) spec.comp_cost[i] = parse_cost(cpus[i], "cpu");
  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    if (static_cast<int>(w.size()) != n) throw ConfigError("weights must list one row per node");
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(w[i].size()) != types) throw ConfigError("weight row has the wrong length");
      for (int m = 0; m < types; ++m) spec.comp_weight[i][m] = w[i][m].get<double>();
    }
  }
  spec.finalize();
  TaskSet t;
  t.data_size = j.value("data_size", std::vector<double>(types, 1.0));
  t.result_size = j.value("result_size", std::vector<double>(types, 1.0));
  if (static_cast<int>(t.data_size.size()) != types || static_cast<int>(t.result_size.size()) != types)
    throw ConfigError("data_size and result_size need one entry per type");
  for (const auto& tj : j.at("tasks")) {
    check_keys(tj, {"dest", "type", "rates"}, "task");
    t.tasks.push_back({node(tj.at("dest")), tj.value("type", 0)});
    auto r = tj.at("rates").get<std::vector<double>>();
    if (static_cast<int>(r.size()) != n) throw ConfigError("task rates must list one entry per node");
    t.rate.push_back(r);
  }
  const auto rep = validate(spec, t);
  if (!rep.ok) throw ConfigError("inline scenario '" + sc.name + "': " + rep.violations.front());
  sc.spec = std::move(spec);
  sc.tasks = std::move(t);
  return sc;
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string safe_name(std::string s) {
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') c = '_';
  return s;
}

std::string timestamp_line() {
  const std::time_t now = std::time(nullptr);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return std::string("# generated ") + buf + "\n";
}

struct TraceRow {
  std::string scenario;
  std::uint64_t seed;
  std::string algorithm;
  TraceRecord rec;
};

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  check_keys(j,
             {"scenarios", "algorithms", "seeds", "rate_scales", "result_ratios", "events", "output_dir", "tol",
              "max_iters", "gp_beta", "schedule", "curvature", "lpr_saturation", "deterministic"},
             "config");
  ExperimentConfig cfg;
  try {
    for (const auto& s : j.at("scenarios")) {
      if (s.is_string())
        cfg.scenarios.push_back({s.get<std::string>(), std::nullopt, std::nullopt});
      else
        cfg.scenarios.push_back(parse_inline(s));
    }
    cfg.algorithms = j.at("algorithms").get<std::vector<std::string>>();
    cfg.seeds = j.value("seeds", std::vector<std::uint64_t>{1});
    if (j.contains("rate_scales")) cfg.rate_scales = j.at("rate_scales").get<std::vector<double>>();
    if (j.contains("result_ratios")) cfg.result_ratios = j.at("result_ratios").get<std::vector<double>>();
    if (j.contains("events"))
      for (const auto& e : j.at("events")) {
        check_keys(e, {"iter", "node"}, "event");
        cfg.events.push_back({e.at("iter").get<int>(), e.at("node").get<int>()});
      }
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.tol = j.value("tol", cfg.tol);
    cfg.max_iters = j.value("max_iters", cfg.max_iters);
    if (j.contains("gp_beta")) {
      const auto& b = j.at("gp_beta");
      cfg.gp_betas = b.is_array() ? b.get<std::vector<double>>() : std::vector<double>{b.get<double>()};
    }
    const std::string sched = j.value("schedule", std::string("synchronous"));
    if (sched == "synchronous")
      cfg.schedule = Schedule::Synchronous;
    else if (sched == "round_robin")
      cfg.schedule = Schedule::RoundRobinAsync;
    else if (sched == "random")
      cfg.schedule = Schedule::RandomAsync;
    else
      throw ConfigError("schedule must be synchronous, round_robin or random");
    const std::string curv = j.value("curvature", std::string("local"));
    if (curv == "local")
      cfg.curvature = Curvature_mode::Local;
    else if (curv == "initial_cost")
      cfg.curvature = Curvature_mode::InitialCost;
    else if (curv == "current_cost")
      cfg.curvature = Curvature_mode::CurrentCost;
    else
      throw ConfigError("curvature must be local, initial_cost or current_cost");
    cfg.lpr_saturation = j.value("lpr_saturation", cfg.lpr_saturation);
    cfg.deterministic = j.value("deterministic", false);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.algorithms.empty()) throw ConfigError("at least one algorithm is required");
  for (const auto& a : cfg.algorithms)
    if (!kAlgorithms.count(a)) throw ConfigError("unknown algorithm '" + a + "'");
  if (cfg.seeds.empty()) throw ConfigError("at least one seed is required");
  if (cfg.scenarios.empty()) throw ConfigError("at least one scenario is required");
  for (const auto& sc : cfg.scenarios)
    if (!sc.spec) {
      try {
        find_preset(sc.name);
      } catch (const ParamError&) {
        throw ConfigError("unknown scenario preset '" + sc.name + "'");
      }
    }
  if (cfg.rate_scales.empty()) throw ConfigError("rate_scales must not be empty");
  for (double c : cfg.rate_scales)
    if (!(c > 0.0)) throw ConfigError("rate scales must be positive");
  for (double a : cfg.result_ratios)
    if (!(a > 0.0)) throw ConfigError("result ratios must be positive");
  if (cfg.gp_betas.empty()) throw ConfigError("gp_beta must not be empty");
  for (double b : cfg.gp_betas)
    if (!(b > 0.0)) throw ConfigError("gp_beta must be positive");
  if (!(cfg.tol > 0.0)) throw ConfigError("tol must be positive");
  if (cfg.max_iters < 1) throw ConfigError("max_iters must be at least 1");
  if (!(cfg.lpr_saturation > 0.0 && cfg.lpr_saturation <= 1.0)) throw ConfigError("lpr_saturation must be in (0, 1]");
  for (const auto& e : cfg.events)
    if (e.iter < 1) throw ConfigError("event iterations start at 1");
}

Metrics compute_metrics(const FlowState& flow, const TaskSet& tasks) {
  double data_hops = 0.0, result_hops = 0.0, injected = 0.0, computed = 0.0;
  for (int k = 0; k < tasks.size(); ++k) {
    for (double x : flow.f_minus[k]) data_hops += x;
    for (double x : flow.f_plus[k]) result_hops += x;
    for (double r : tasks.rate[k]) injected += r;
    for (double g : flow.g[k]) computed += g;
  }
  if (injected <= 0.0 || computed <= 0.0) throw ZeroDenominator("no injected or computed traffic");
  return {data_hops / injected, result_hops / computed};
}

void write_strategy(const std::string& path, const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "# node task data[cpu,nbrs...] | result[nbrs...]\n";
  for (int i = 0; i < spec.n; ++i)
    for (int k = 0; k < tasks.size(); ++k) {
      out << i << ' ' << k;
      for (double x : s.data[k][i]) out << ' ' << fmt(x);
      out << " |";
      for (double x : s.result[k][i]) out << ' ' << fmt(x);
      out << '\n';
    }
}

Strategy read_strategy(const std::string& path, const NetworkSpec& spec, const TaskSet& tasks) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  Strategy s = Strategy::zeros(spec, tasks);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int i, k;
    ls >> i >> k;
    if (i < 0 || i >= spec.n || k < 0 || k >= tasks.size()) throw Error("strategy file does not match the instance");
    for (double& x : s.data[k][i]) ls >> x;
    std::string bar;
    ls >> bar;
    for (double& x : s.result[k][i]) ls >> x;
    if (!ls) throw Error("truncated strategy row for node " + std::to_string(i));
  }
  return s;
}

PreparedInstance prepare_instance(const ScenarioSpec& sc, std::uint64_t seed, double rate_scale,
                                  std::optional<double> result_ratio) {
  PreparedInstance p;
  if (sc.spec) {
    p.spec = *sc.spec;
    p.tasks = *sc.tasks;
  } else {
    auto inst = sample_instance(find_preset(sc.name), seed);
    p.spec = std::move(inst.spec);
    p.tasks = std::move(inst.tasks);
    if (rate_scale == 1.0 && !result_ratio) p.init = std::move(inst.init);
  }
  for (auto& row : p.tasks.rate)
    for (double& r : row) r *= rate_scale;
  if (result_ratio)
    for (std::size_t m = 0; m < p.tasks.result_size.size(); ++m)
      p.tasks.result_size[m] = *result_ratio * p.tasks.data_size[m];
  return p;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
  validate_config(cfg);
  fs::create_directories(fs::path(cfg.output_dir) / "strategies");
  ExperimentResult result;
  std::vector<TraceRow> traces;
  bool any_max_iters = false, any_infeasible = false, any_error = false;

  std::vector<std::optional<double>> ratios;
  if (cfg.result_ratios.empty())
    ratios.push_back(std::nullopt);
  else
    for (double a : cfg.result_ratios) ratios.push_back(a);
  const bool label_scale = cfg.rate_scales.size() > 1 || cfg.rate_scales[0] != 1.0;

  for (const auto& sc : cfg.scenarios)
    for (double scale : cfg.rate_scales)
      for (const auto& ratio : ratios) {
        std::string label = sc.name;
        if (label_scale) label += "/scale=" + fmt(scale);
        if (ratio) label += "/a=" + fmt(*ratio);
        for (std::uint64_t seed : cfg.seeds) {
          std::optional<PreparedInstance> inst;
          std::string inst_error;
          bool inst_infeasible = false;
          try {
            inst = prepare_instance(sc, seed, scale, ratio);
          } catch (const InitError& e) {
            inst_error = e.what();
            inst_infeasible = true;
          } catch (const Error& e) {
            inst_error = e.what();
          }
          std::optional<Strategy> init;
          if (inst) {
            try {
              init = inst->init ? *inst->init : default_init(inst->spec, inst->tasks);
            } catch (const InitError& e) {
              inst_error = e.what();
              inst_infeasible = true;
            }
          }

          RunConfig rc;
          rc.max_iters = cfg.max_iters;
          rc.tol = cfg.tol;
          rc.schedule = cfg.schedule;
          rc.seed = seed;
          rc.curvature = cfg.curvature;

          std::vector<std::pair<std::string, double>> jobs;  // algorithm label, beta
          for (const auto& a : cfg.algorithms) {
            if (a != "GP") {
              jobs.push_back({a, 0.0});
              continue;
            }
            for (double b : cfg.gp_betas)
              jobs.push_back({cfg.gp_betas.size() == 1 ? std::string("GP") : "GP(beta=" + fmt(b) + ")", b});
          }

          for (const auto& [alg, beta] : jobs) {
            RunRow row;
            row.scenario = label;
            row.seed = seed;
            row.algorithm = alg;
            if (log) *log << label << " seed " << seed << ' ' << alg << " ... " << std::flush;
            if (!init) {
              row.status = inst_infeasible ? "infeasible: " + inst_error : "error: " + inst_error;
              (inst_infeasible ? any_infeasible : any_error) = true;
              if (log) *log << row.status << '\n';
              result.rows.push_back(row);
              continue;
            }
            const auto start = std::chrono::steady_clock::now();
            try {
              NetworkSpec final_spec = inst->spec;
              TaskSet final_tasks = inst->tasks;
              std::optional<Strategy> final_s;
              FlowState flow;
              std::vector<TraceRecord> trace;
              if (alg == "SGP") {
                RunConfig c = rc;
                c.events = cfg.events;
                RunResult r = run(inst->spec, inst->tasks, *init, c);
                final_spec = r.spec;
                final_tasks = r.tasks;
                final_s = r.strategy;
                flow = r.flow;
                trace = r.trace;
                row.iters = r.iterations;
                row.converged = r.converged;
              } else {
                BaselineResult b;
                RunConfig c = rc;
                if (alg.rfind("GP", 0) == 0) {
                  c.gp_beta = beta;
                  c.events = cfg.events;
                  RunConfig gc = c;
                  gc.method = Method::GP;
                  RunResult r = run(inst->spec, inst->tasks, *init, gc);
                  final_spec = r.spec;
                  final_tasks = r.tasks;
                  b.strategy = r.strategy;
                  b.flow = r.flow;
                  b.trace = r.trace;
                  b.iterations = r.iterations;
                  b.converged = r.converged;
                } else if (alg == "SPOO") {
                  b = run_spoo(inst->spec, inst->tasks, c);
                } else if (alg == "LCOR") {
                  b = run_lcor(inst->spec, inst->tasks, c);
                } else if (alg == "LPR") {
                  b = run_lpr(inst->spec, inst->tasks, cfg.lpr_saturation);
                } else {
                  b = convex_oracle(inst->spec, inst->tasks, 1e-6);
                }
                final_s = b.strategy;
                flow = b.flow;
                trace = b.trace;
                row.iters = b.iterations;
                row.converged = b.converged;
              }
              row.T_final = flow.T;
              if (!std::isfinite(flow.T)) {
                row.status = "infeasible: infinite cost";
                row.converged = false;
                any_infeasible = true;
              } else if (!row.converged) {
                row.status = "max_iters";
                any_max_iters = true;
              }
              try {
                const Metrics mt = compute_metrics(flow, final_tasks);
                row.L_data = mt.L_data;
                row.L_result = mt.L_result;
              } catch (const ZeroDenominator&) {
                row.L_data = row.L_result = std::nan("");
              }
              if (final_s) {
                row.strategy_file = "strategies/" + safe_name(label + "_" + std::to_string(seed) + "_" + alg) + ".txt";
                write_strategy((fs::path(cfg.output_dir) / row.strategy_file).string(), final_spec, final_tasks,
                               *final_s);
              }
              for (const auto& t : trace) traces.push_back({label, seed, alg, t});
            } catch (const InfeasibleError& e) {
              row.status = std::string("infeasible: ") + e.what();
              any_infeasible = true;
            } catch (const InfeasibleAfterEvent& e) {
              row.status = std::string("infeasible: ") + e.what();
              any_infeasible = true;
            } catch (const InitError& e) {
              row.status = std::string("infeasible: ") + e.what();
              any_infeasible = true;
            } catch (const Error& e) {
              row.status = std::string("error: ") + e.what();
              any_error = true;
            }
            row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            if (log) *log << row.status << " T=" << fmt(row.T_final) << " iters=" << row.iters << '\n';
            result.rows.push_back(row);
          }
        }
      }

  const std::string stamp = cfg.deterministic ? "" : timestamp_line();
  const fs::path dir(cfg.output_dir);
  {
    std::ofstream out(dir / "trace.csv");
    out << stamp << "scenario,seed,algorithm,iter,T,residual,event\n";
    for (const auto& t : traces)
      out << t.scenario << ',' << t.seed << ',' << t.algorithm << ',' << t.rec.iter << ',' << fmt(t.rec.T) << ','
          << fmt(t.rec.residual) << ',' << (t.rec.event ? 1 : 0) << '\n';
  }
  {
    std::ofstream out(dir / "summary.csv");
    out << stamp << "scenario,seed,algorithm,T_final,iters,converged,L_data,L_result,wall_ms\n";
    for (const auto& r : result.rows)
      out << r.scenario << ',' << r.seed << ',' << r.algorithm << ',' << fmt(r.T_final) << ',' << r.iters << ','
          << (r.converged ? 1 : 0) << ',' << fmt(r.L_data) << ',' << fmt(r.L_result) << ','
          << (cfg.deterministic ? std::string("0") : fmt(r.wall_ms)) << '\n';
  }
  {
    // Each (scenario, seed) group is divided by its worst finite cost.
    std::map<std::pair<std::string, std::uint64_t>, double> worst;
    for (const auto& r : result.rows)
      if (std::isfinite(r.T_final)) {
        double& w = worst[{r.scenario, r.seed}];
        w = std::max(w, r.T_final);
      }
    std::ofstream out(dir / "normalized.csv");
    out << stamp << "scenario,seed,algorithm,T_normalized\n";
    for (const auto& r : result.rows) {
      const auto it = worst.find({r.scenario, r.seed});
      const double norm = std::isfinite(r.T_final) && it != worst.end() && it->second > 0.0 ? r.T_final / it->second
                                                                                            : std::nan("");
      out << r.scenario << ',' << r.seed << ',' << r.algorithm << ',' << fmt(norm) << '\n';
    }
  }
  {
    std::ofstream out(dir / "status.csv");
    out << stamp << "scenario,seed,algorithm,status,strategy_file\n";
    for (const auto& r : result.rows) {
      std::string status = r.status;
      std::replace(status.begin(), status.end(), ',', ';');
      out << r.scenario << ',' << r.seed << ',' << r.algorithm << ',' << status << ',' << r.strategy_file << '\n';
    }
  }

  if (any_infeasible)
    result.exit_code = 4;
  else if (any_error)
    result.exit_code = 1;
  else if (any_max_iters)
    result.exit_code = 2;
  return result;
}

}  // namespace sgpnet
