#include "pnd/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "pnd/cqnd.hpp"
#include "pnd/instgen.hpp"
#include "pnd/maxflow.hpp"
#include "pnd/omega.hpp"
#include "pnd/separation.hpp"
#include "pnd/sim.hpp"

namespace pnd::cli {

namespace {

struct Options {
  std::string instance;
  std::string out;
  double epsilon = -1.0;
  double omega = -1.0;
  std::string omega_model = "normal";
  std::string cuts = "none";
  std::string sep;
  long samples = 10000;
  std::uint64_t seed = 1;
  double time_limit = 1800.0;
  long node_limit = 10000000;
  int threads = 1;
  bool no_time = false;

  // generate
  std::string regime = "independent";
  int nodes = 10;
  double beta = 0.5;
  std::string grid;
  std::string cities;

  // separate / simulate
  std::string x;
  std::string design;
  std::string dump_mincuts;
  std::string epsilons = "0.5,0.3,0.2,0.025,0.01,0.001";
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_doubles(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw UsageError("not a number: '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

double resolve_omega(const Options& o) {
  if (o.epsilon >= 0) return omega_from_epsilon(parse_omega_model(o.omega_model), o.epsilon);
  if (o.omega >= 0) return o.omega;
  return 0.0;
}

SolveConfig solve_config(const Options& o) {
  SolveConfig c;
  c.omega = resolve_omega(o);
  c.cuts = CutFamilies::parse(o.cuts);
  if (!o.sep.empty()) c.separation = parse_sep_strategy(o.sep);
  c.time_limit = o.time_limit;
  c.node_limit = o.node_limit;
  c.seed = o.seed;
  c.validate();
  return c;
}

// stdout, or append to a file with the header only when it is new
class CsvSink {
 public:
  CsvSink(const std::string& path, const std::string& header) {
    if (path.empty()) {
      std::cout << header << '\n';
      return;
    }
    bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    file_.open(path, std::ios::app);
    if (!file_) throw std::runtime_error("cannot open " + path + " for writing");
    if (fresh) file_ << header << '\n';
  }
  void row(const std::string& line) {
    (file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout) << line << '\n';
  }

 private:
  std::ofstream file_;
};

std::string arc_list(const std::vector<int>& arcs) {
  std::string s;
  for (int a : arcs) s += (s.empty() ? "" : " ") + std::to_string(a);
  return s;
}

int exit_for(const std::string& status) { return status == "optimal" ? 0 : 1; }

int cmd_generate(const Options& o) {
  auto write = [&](const NetworkInstance& inst, const std::string& path) {
    if (path.empty()) std::cout << instance_to_json(inst).dump(2) << '\n';
    else save_instance(inst, path);
  };
  if (!o.grid.empty()) {
    if (o.out.empty()) throw UsageError("--grid needs --out <directory>");
    std::filesystem::create_directories(o.out);
    for (const GenSpec& g : named_grid(o.grid)) {
      NetworkInstance inst = generate(g);
      write(inst, (std::filesystem::path(o.out) / (inst.id() + ".json")).string());
    }
    return 0;
  }
  GenSpec g;
  g.nodes = o.nodes;
  g.beta = o.beta;
  g.omega = o.omega >= 0 ? o.omega : resolve_omega(o);
  g.regime = parse_regime(o.regime);
  g.seed = o.seed;
  if (!o.cities.empty()) {
    std::ifstream in(o.cities);
    if (!in) throw std::runtime_error("cannot open " + o.cities);
    write(generate_from_cities(nlohmann::json::parse(in), g), o.out);
  } else {
    write(generate(g), o.out);
  }
  return 0;
}

int cmd_check(const Options& o) {
  NetworkInstance inst = load_instance(o.instance);
  inst.validate();
  std::vector<double> mu(inst.mu().data(), inst.mu().data() + inst.arc_count());
  MaxFlowResult mf = max_flow_min_cut(inst, mu);
  std::cout << "valid, " << inst.node_count() << " nodes, " << inst.arc_count() << " arcs, demand "
            << inst.demand() << ", mean max flow " << mf.value << '\n';
  if (mf.value < inst.demand()) {
    std::cout << "mean max flow below demand\n";
    return 1;
  }
  return 0;
}

int cmd_solve(const Options& o) {
  NetworkInstance inst = load_instance(o.instance);
  SolveConfig c = solve_config(o);
  SolveOutcome out = solve_cqnd(inst, c);
  CsvSink sink(o.out, csv_header(!o.no_time) + ",arcs");
  sink.row(csv_row(inst, c, out, !o.no_time) + "," + arc_list(out.design.arcs()));
  return exit_for(out.stats.status);
}

int cmd_separate(const Options& o) {
  NetworkInstance inst = load_instance(o.instance);
  std::vector<double> x(inst.arc_count(), 1.0);
  if (!o.x.empty()) {
    x = parse_doubles(o.x);
    if (static_cast<int>(x.size()) != inst.arc_count())
      throw UsageError("--x needs " + std::to_string(inst.arc_count()) + " values");
  }
  SeparationProblem p = SeparationProblem::make(inst, x, resolve_omega(o));
  SepStrategy s = o.sep.empty() ? SepStrategy::bqc : parse_sep_strategy(o.sep);
  SepOptions opt;
  opt.time_limit = o.time_limit;
  opt.node_limit = o.node_limit;
  SeparationResult r = separate(p, s, opt);
  std::string header = "strategy,status,theta,violation,nodes";
  if (!o.no_time) header += ",time";
  header += ",cut";
  CsvSink sink(o.out, header);
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%s,%.6f,%.6f,%ld", std::string(to_string(s)).c_str(),
                std::string(to_string(r.status)).c_str(), r.theta, r.violation, r.nodes);
  std::string line = buf;
  if (!o.no_time) {
    std::snprintf(buf, sizeof buf, ",%.3f", r.seconds);
    line += buf;
  }
  sink.row(line + "," + (r.cut ? arc_list(r.cut->arc_ids) : ""));
  return r.status == SeparationResult::Status::limit ? 1 : 0;
}

std::vector<char> design_from(const NetworkInstance& inst, const Options& o, std::string& label) {
  std::vector<char> x(inst.arc_count(), 0);
  if (!o.design.empty()) {
    for (double v : parse_doubles(o.design)) {
      int a = static_cast<int>(v);
      if (a != v || a < 0 || a >= inst.arc_count()) throw UsageError("--design: bad arc index");
      x[a] = 1;
    }
    label = "design";
    return x;
  }
  SolveOutcome out = solve_cqnd(inst, solve_config(o));
  if (out.stats.status != "optimal" && out.design.x.empty())
    throw std::runtime_error("no design to simulate (" + out.stats.status + ")");
  label = "omega=" + std::to_string(resolve_omega(o));
  return out.design.x;
}

int cmd_simulate(const Options& o) {
  NetworkInstance inst = load_instance(o.instance);
  std::string label;
  std::vector<char> x = design_from(inst, o, label);
  SimOptions s;
  s.samples = o.samples;
  s.seed = o.seed;
  s.workers = o.threads;
  s.keep_values = !o.dump_mincuts.empty();
  SimReport r = simulate(inst, x, s);
  CsvSink sink(o.out, sim_csv_header());
  sink.row(sim_csv_row(label, r));
  if (!o.dump_mincuts.empty()) {
    std::ofstream dump(o.dump_mincuts);
    if (!dump) throw std::runtime_error("cannot open " + o.dump_mincuts);
    char buf[64];
    for (double v : r.values) {
      std::snprintf(buf, sizeof buf, "%.6f\n", v);
      dump << buf;
    }
  }
  return 0;
}

int cmd_tradeoff(const Options& o) {
  NetworkInstance inst = load_instance(o.instance);
  SolveConfig base = solve_config(o);
  SimOptions s;
  s.samples = o.samples;
  s.seed = o.seed;
  s.workers = o.threads;
  auto rows = tradeoff_curve(inst, parse_doubles(o.epsilons), parse_omega_model(o.omega_model), base, s);
  CsvSink sink(o.out, tradeoff_csv_header());
  int code = 0;
  for (const TradeoffRow& r : rows) {
    sink.row(tradeoff_csv_row(r));
    code = std::max(code, exit_for(r.status));
  }
  return code;
}

int cmd_bench(const Options& o) {
  if (o.grid.empty()) throw UsageError("bench needs --grid");
  std::vector<GenSpec> specs = named_grid(o.grid);
  SolveConfig base = solve_config(o);
  std::vector<std::string> rows(specs.size());
  std::vector<int> codes(specs.size(), 0);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k; (k = next++) < specs.size();) {
      NetworkInstance inst = generate(specs[k]);
      SolveConfig c = base;
      c.omega = specs[k].omega;
      SolveOutcome out = solve_cqnd(inst, c);
      rows[k] = csv_row(inst, c, out, !o.no_time);
      codes[k] = exit_for(out.stats.status);
    }
  };
  const int workers = std::max(1, std::min<int>(o.threads, static_cast<int>(specs.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  CsvSink sink(o.out, csv_header(!o.no_time));
  for (const auto& r : rows) sink.row(r);
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Network design with probabilistic arc capacities"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  Options o;

  auto instance_opt = [&](CLI::App* sub) {
    sub->add_option("--instance", o.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  };
  auto omega_opts = [&](CLI::App* sub) {
    auto* e = sub->add_option("--epsilon", o.epsilon, "Violation probability in (0, 0.5]");
    auto* w = sub->add_option("--omega", o.omega, "Safety factor")->check(CLI::NonNegativeNumber);
    e->excludes(w);
    w->excludes(e);
    sub->add_option("--omega-model", o.omega_model, "normal, two-moment or symmetric-bounded")
        ->check(CLI::IsMember({"normal", "two-moment", "symmetric-bounded"}));
  };
  auto solve_opts = [&](CLI::App* sub) {
    sub->add_option("--cuts", o.cuts, "Comma list of oa, pack, xpack, polymatroid, cover, aggregate");
    sub->add_option("--sep", o.sep, "Separation: enum, bqc, qcqp, mc, nw");
    sub->add_option("--time-limit", o.time_limit, "Seconds")->check(CLI::PositiveNumber);
    sub->add_option("--node-limit", o.node_limit, "Branch-and-bound nodes")->check(CLI::PositiveNumber);
  };
  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", o.out, "Output path (CSV rows are appended)");
    sub->add_flag("--no-time", o.no_time, "Omit timing columns");
  };

  auto* gen = app.add_subcommand("generate", "Write a random instance or a named grid");
  gen->add_option("--regime", o.regime, "independent, correlated or general")
      ->check(CLI::IsMember({"independent", "correlated", "general"}));
  gen->add_option("--nodes", o.nodes, "Node count")->check(CLI::Range(3, 64));
  gen->add_option("--beta", o.beta, "Demand fraction")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--grid", o.grid, "Named grid (paper-*, small-*) written to --out directory");
  gen->add_option("--cities", o.cities, "City list JSON")->check(CLI::ExistingFile);
  omega_opts(gen);
  common(gen);

  auto* check = app.add_subcommand("check", "Validate an instance");
  instance_opt(check);

  auto* solve = app.add_subcommand("solve", "Solve one instance");
  instance_opt(solve);
  omega_opts(solve);
  solve_opts(solve);
  common(solve);

  auto* sep = app.add_subcommand("separate", "Most violated cut for a design point");
  instance_opt(sep);
  omega_opts(sep);
  sep->add_option("--x", o.x, "Comma list of arc values (default all ones)");
  sep->add_option("--sep,--strategy", o.sep, "Separation: enum, bqc, qcqp, mc, nw");
  sep->add_option("--time-limit", o.time_limit, "Seconds")->check(CLI::PositiveNumber);
  sep->add_option("--node-limit", o.node_limit, "Nodes")->check(CLI::PositiveNumber);
  common(sep);

  auto* sim = app.add_subcommand("simulate", "Monte-Carlo service level of a design");
  instance_opt(sim);
  omega_opts(sim);
  solve_opts(sim);
  sim->add_option("--design", o.design, "Comma list of arc indices (default: solve first)");
  sim->add_option("--samples", o.samples, "Samples")->check(CLI::PositiveNumber);
  sim->add_option("--dump-mincuts", o.dump_mincuts, "Write one sampled min cut per line");
  common(sim);

  auto* trade = app.add_subcommand("tradeoff", "Cost and simulated service level per epsilon");
  instance_opt(trade);
  trade->add_option("--epsilons", o.epsilons, "Comma list");
  trade->add_option("--omega-model", o.omega_model, "normal, two-moment or symmetric-bounded")
      ->check(CLI::IsMember({"normal", "two-moment", "symmetric-bounded"}));
  solve_opts(trade);
  trade->add_option("--samples", o.samples, "Samples per design")->check(CLI::PositiveNumber);
  common(trade);

  auto* bench = app.add_subcommand("bench", "Solve every instance of a named grid");
  bench->add_option("--grid", o.grid, "paper-independent, paper-correlated, paper-general, small-*")
      ->required();
  solve_opts(bench);
  bench->add_option("--strategy", o.sep, "Separation: enum, bqc, qcqp, mc, nw");
  common(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* cmd = app.get_subcommands().front();
  std::cerr << "# " << cmd->get_name() << '\n';
  std::istringstream cfg(cmd->config_to_str(true, false));
  for (std::string line; std::getline(cfg, line);)
    if (!line.empty()) std::cerr << "# " << line << '\n';
  if (o.epsilon >= 0) {
    try {
      std::cerr << "# resolved omega=" << resolve_omega(o) << '\n';
    } catch (const std::exception&) {
    }
  }

  try {
    if (cmd == gen) return cmd_generate(o);
    if (cmd == check) return cmd_check(o);
    if (cmd == solve) return cmd_solve(o);
    if (cmd == sep) return cmd_separate(o);
    if (cmd == sim) return cmd_simulate(o);
    if (cmd == trade) return cmd_tradeoff(o);
    if (cmd == bench) return cmd_bench(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace pnd::cli
