#include "sfcsim/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sfcsim/exact.hpp"
#include "sfcsim/sim.hpp"

namespace sfcsim {
namespace {

// Bare relative output paths land in $SFCSIM_OUT_DIR when it is set;
// "-" always means stdout.
std::string out_path(const std::string& p) {
  if (p == "-" || p.empty()) return p;
  if (p.front() == '/') return p;
  const char* dir = std::getenv("SFCSIM_OUT_DIR");
  if (!dir || !*dir) return p;
  return std::string(dir) + "/" + p;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const std::string& path, const std::string& text) {
  if (path == "-" || path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path(path));
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

// "5", "0,1,2" or "10..100:10" (step defaults to 1).
std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  const auto range = text.find("..");
  if (range != std::string::npos) {
    const auto colon = text.find(':', range + 2);
    const int lo = std::stoi(text.substr(0, range));
    const int hi = std::stoi(text.substr(range + 2, colon - range - 2));
    const int step = colon == std::string::npos ? 1 : std::stoi(text.substr(colon + 1));
    if (step <= 0 || hi < lo) throw CLI::ValidationError("bad range: " + text);
    for (int v = lo; v <= hi; v += step) out.push_back(v);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  if (out.empty()) throw CLI::ValidationError("empty list: " + text);
  return out;
}

std::string normalize_kind(std::string kind) {
  for (char& c : kind)
    if (c == '-') c = '_';
  return kind;
}

TopologySpec spec_from_flags(const std::string& kind, int k, int n) {
  TopologySpec spec;
  spec.kind = normalize_kind(kind);
  if (spec.kind == "fat_tree") {
    spec.a = k;
  } else if (spec.kind == "bcube") {
    spec.a = n;
    spec.b = k;  // levels
  } else if (spec.kind == "vl2") {
    spec.a = n;
    spec.b = k;
  } else {
    throw CLI::ValidationError("unknown topology kind: " + kind);
  }
  return spec;
}

TopologySpec spec_from_json(const nlohmann::json& j) {
  return spec_from_flags(j.at("kind").get<std::string>(),
                         j.value("k", 0), j.value("n", 0));
}

Weights parse_weights(const std::string& text) {
  Weights w;
  if (text.empty()) return w;
  std::stringstream ss(text);
  std::string item;
  std::vector<double> v;
  while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  if (v.size() != 3) throw CLI::ValidationError("--weights needs three comma-separated values");
  w.server = v[0];
  w.link = v[1];
  w.bandwidth = v[2];
  w.validate();
  return w;
}

struct RunStats {
  RunSummary summary;
  std::string csv;
};

RunStats run_files(const std::string& topo_file, const std::string& trace_file, int m, int d,
                   const std::string& placer_name, const Weights& w, int idle_off) {
  const NetworkGraph g = graph_from_json(slurp(topo_file));
  const Trace trace = trace_from_json(slurp(trace_file));
  for (const ServiceRequest& s : trace.services) validate_service(s, &g);
  const PathTable paths = k_shortest_paths(g, d);
  const PlacerFn placer = placer_name == "exact" ? exact_placer() : greedy_placer();
  RunStats rs;
  rs.summary = run_on(g, paths, trace, m, placer, w, idle_off);
  std::ostringstream csv;
  run_csv(csv, rs.summary);
  rs.csv = csv.str();
  return rs;
}

int cmd_topo(const std::string& kind, int k, int n, const std::string& out) {
  const NetworkGraph g = build_topology(spec_from_flags(kind, k, n));
  spill(out, graph_to_json(g) + "\n");
  std::cerr << g.servers.size() << " servers, " << g.link_count() << " directed links\n";
  return 0;
}

int cmd_trace(const std::string& topo_file, const TraceConfig& cfg, const std::string& out) {
  const NetworkGraph g = graph_from_json(slurp(topo_file));
  const Trace t = generate_trace(cfg, g.core_switches);
  spill(out, trace_to_json(t) + "\n");
  std::cerr << t.services.size() << " services over " << t.horizon_slots << " slots\n";
  return 0;
}

int cmd_run(const std::string& topo_file, const std::string& trace_file, int m, int d,
            const std::string& placer, const std::string& weights, int idle_off,
            const std::string& out) {
  const RunStats rs =
      run_files(topo_file, trace_file, m, d, placer, parse_weights(weights), idle_off);
  spill(out, rs.csv);
  std::cerr << "placed " << rs.summary.placed_total << ", expired unplaced "
            << rs.summary.expired_unplaced << ", mean u " << rs.summary.mean_u << ", peak u "
            << rs.summary.peak_u << ", wakes " << rs.summary.wakes << "\n";
  return rs.summary.expired_unplaced > 0 ? 2 : 0;
}

int cmd_sweep(const std::string& kind, int k, int n, const std::string& k_obj,
              const std::string& m_list, int reps, int jobs, std::uint64_t seed, double hours,
              int d, const std::string& placer, const std::string& weights,
              const std::string& out) {
  ExperimentConfig base;
  base.topology = spec_from_flags(kind, k, n);
  base.trace.seed = seed;
  base.trace.horizon_hours = hours;
  base.d = d;
  base.placer = placer;
  base.weights = parse_weights(weights);
  const auto rows = sweep(base, parse_int_list(k_obj), parse_int_list(m_list), reps, jobs);
  std::ostringstream csv;
  sweep_csv(csv, rows);
  spill(out, csv.str());
  std::cerr << rows.size() << " sweep rows\n";
  return 0;
}

int cmd_exact(const std::string& instance_file, double budget_s, std::uint64_t max_nodes,
              bool no_prune, bool brute, const std::string& out) {
  const nlohmann::json j = nlohmann::json::parse(slurp(instance_file));
  const NetworkGraph g = build_topology(spec_from_json(j.at("topology")));
  const int d = j.value("d", 8);
  Weights w;
  if (j.contains("weights")) {
    w.server = j["weights"].value("server", 1.0 / 3.0);
    w.link = j["weights"].value("link", 1.0 / 3.0);
    w.bandwidth = j["weights"].value("bandwidth", 1.0 / 3.0);
    w.validate();
  }
  std::vector<ServiceRequest> services;
  for (const auto& sj : j.at("services")) services.push_back(service_from_json(sj.dump()));
  for (const ServiceRequest& s : services) validate_service(s, &g);
  std::vector<const ServiceRequest*> batch;
  for (const ServiceRequest& s : services) batch.push_back(&s);

  const PathTable paths = k_shortest_paths(g, d);
  NetworkState state(g);
  ExactResult r;
  if (brute) {
    r = brute_force_place(batch, state, paths, w);
  } else {
    ExactConfig cfg;
    cfg.time_budget_s = budget_s;
    cfg.max_nodes = max_nodes;
    cfg.prune = !no_prune;
    r = exact_place(batch, state, paths, w, cfg);
  }
  nlohmann::json res;
  res["optimal"] = r.optimal;
  res["infeasible"] = r.infeasible;
  res["nodes_explored"] = r.nodes_explored;
  if (!r.placements.empty() || (r.optimal && !r.infeasible)) res["u_total"] = r.u_total;
  res["placements"] = nlohmann::json::array();
  for (const auto& [id, pl] : r.placements)
    res["placements"].push_back(nlohmann::json::parse(placement_to_json(pl)));
  spill(out, res.dump(1) + "\n");
  return r.placements.size() == batch.size() && !batch.empty() ? 0 : 2;
}

int cmd_compare(const std::string& topo_file, const std::string& trace_file, int m_a, int m_b,
                const std::string& k_obj, int reps, std::uint64_t seed, double hours, int d,
                const std::string& placer, const std::string& weights, int idle_off) {
  const NetworkGraph g = graph_from_json(slurp(topo_file));
  const PathTable paths = k_shortest_paths(g, d);
  const Weights w = parse_weights(weights);
  const PlacerFn fn = placer == "exact" ? exact_placer() : greedy_placer();

  std::vector<Trace> traces;
  if (!trace_file.empty()) {
    traces.push_back(trace_from_json(slurp(trace_file)));
  } else {
    TraceConfig tc;
    tc.k_obj = parse_int_list(k_obj).at(0);
    tc.horizon_hours = hours;
    for (int r = 0; r < reps; ++r) {
      tc.seed = seed + static_cast<std::uint64_t>(r);
      traces.push_back(generate_trace(tc, g.core_switches));
    }
  }
  double mean_a = 0.0, mean_b = 0.0;
  int better = 0;
  for (const Trace& t : traces) {
    const double a = run_on(g, paths, t, m_a, fn, w, idle_off).mean_u;
    const double b = run_on(g, paths, t, m_b, fn, w, idle_off).mean_u;
    mean_a += a;
    mean_b += b;
    if (b < a) ++better;
  }
  mean_a /= static_cast<double>(traces.size());
  mean_b /= static_cast<double>(traces.size());
  std::cout.precision(17);
  std::cout << "pairs " << traces.size() << "\n";
  std::cout << "mean_u M=" << m_a << " " << mean_a << "\n";
  std::cout << "mean_u M=" << m_b << " " << mean_b << "\n";
  std::cout << "improvement " << (mean_a > 0 ? (mean_a - mean_b) / mean_a * 100.0 : 0.0) << "%\n";
  std::cout << "pairs_improved " << better << "/" << traces.size() << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"service chain placement simulator"};
  app.require_subcommand(1);

  // topo
  auto* topo = app.add_subcommand("topo", "emit a topology as JSON");
  std::string t_kind = "fat-tree", t_out = "-";
  int t_k = 4, t_n = 2;
  topo->add_option("--kind", t_kind, "fat-tree | bcube | vl2");
  topo->add_option("--k", t_k, "fat-tree arity / bcube levels / vl2 aggregation count");
  topo->add_option("--n", t_n, "bcube fan-out / vl2 servers per rack");
  topo->add_option("--out", t_out, "output file ('-' = stdout)");

  // trace
  auto* trace = app.add_subcommand("trace", "emit a synthetic arrival trace as JSON");
  std::string tr_topo, tr_out = "-";
  TraceConfig tr_cfg;
  trace->add_option("--topology", tr_topo, "topology JSON file")->required();
  trace->add_option("--k-obj", tr_cfg.k_obj, "tracked objects");
  trace->add_option("--hours", tr_cfg.horizon_hours, "horizon length");
  trace->add_option("--seed", tr_cfg.seed, "RNG seed");
  trace->add_option("--period-lo", tr_cfg.period_min_lo, "min orbital period, minutes");
  trace->add_option("--period-hi", tr_cfg.period_min_hi, "max orbital period, minutes");
  trace->add_option("--duration-lo", tr_cfg.duration_slots_lo, "min service duration, slots");
  trace->add_option("--duration-hi", tr_cfg.duration_slots_hi, "max service duration, slots");
  trace->add_option("--out", tr_out, "output file ('-' = stdout)");

  // run
  auto* run = app.add_subcommand("run", "simulate one trace, emit per-slot CSV");
  std::string r_topo, r_trace, r_placer = "greedy", r_weights, r_out = "-";
  int r_m = 0, r_d = 8, r_idle = 1;
  run->add_option("--topology", r_topo, "topology JSON file")->required();
  run->add_option("--trace", r_trace, "trace JSON file")->required();
  run->add_option("--m", r_m, "lookahead slots beyond the commit slot");
  run->add_option("--d", r_d, "ranked paths per site pair");
  run->add_option("--placer", r_placer, "greedy | exact");
  run->add_option("--weights", r_weights, "server,link,bandwidth (sum 1)");
  run->add_option("--idle-off", r_idle, "idle slots before power-off");
  run->add_option("--out", r_out, "CSV file ('-' = stdout)");

  // sweep
  auto* sw = app.add_subcommand("sweep", "cross K_obj x M, emit aggregate CSV");
  std::string s_kind = "fat-tree", s_kobj = "10..100:10", s_m = "0,1,2", s_placer = "greedy";
  std::string s_weights, s_out = "-";
  int s_k = 4, s_n = 2, s_reps = 3, s_jobs = 1, s_d = 8;
  std::uint64_t s_seed = 0;
  double s_hours = 24.0;
  sw->add_option("--kind", s_kind, "fat-tree | bcube | vl2");
  sw->add_option("--k", s_k, "fat-tree arity / bcube levels / vl2 aggregation count");
  sw->add_option("--n", s_n, "bcube fan-out / vl2 servers per rack");
  sw->add_option("--k-obj", s_kobj, "list or range, e.g. 10..100:10");
  sw->add_option("--m", s_m, "lookahead depths, e.g. 0,1,2");
  sw->add_option("--reps", s_reps, "repetitions (paired seeds)");
  sw->add_option("--jobs", s_jobs, "worker threads");
  sw->add_option("--seed", s_seed, "base seed; rep r uses seed+r");
  sw->add_option("--hours", s_hours, "horizon length");
  sw->add_option("--d", s_d, "ranked paths per site pair");
  sw->add_option("--placer", s_placer, "greedy | exact");
  sw->add_option("--weights", s_weights, "server,link,bandwidth (sum 1)");
  sw->add_option("--out", s_out, "CSV file ('-' = stdout)");

  // exact
  auto* ex = app.add_subcommand("exact", "solve one instance to optimality");
  std::string e_inst, e_out = "-";
  double e_budget = 60.0;
  std::uint64_t e_nodes = 50'000'000;
  bool e_noprune = false, e_brute = false;
  ex->add_option("--instance", e_inst, "instance JSON file")->required();
  ex->add_option("--budget-s", e_budget, "time budget, seconds");
  ex->add_option("--max-nodes", e_nodes, "search node budget");
  ex->add_flag("--no-prune", e_noprune, "disable objective bounding");
  ex->add_flag("--brute", e_brute, "independent full enumeration");
  ex->add_option("--out", e_out, "result JSON file ('-' = stdout)");

  // compare
  auto* cp = app.add_subcommand("compare", "paired runs at two lookahead depths");
  std::string c_topo, c_trace, c_kobj = "100", c_placer = "greedy", c_weights;
  int c_ma = 0, c_mb = 1, c_reps = 30, c_d = 8, c_idle = 1;
  std::uint64_t c_seed = 0;
  double c_hours = 24.0;
  cp->add_option("--topology", c_topo, "topology JSON file")->required();
  cp->add_option("--trace", c_trace, "trace JSON file (else traces are generated)");
  cp->add_option("--m-a", c_ma, "baseline lookahead");
  cp->add_option("--m-b", c_mb, "candidate lookahead");
  cp->add_option("--k-obj", c_kobj, "tracked objects for generated traces");
  cp->add_option("--reps", c_reps, "generated trace pairs");
  cp->add_option("--seed", c_seed, "base seed; rep r uses seed+r");
  cp->add_option("--hours", c_hours, "horizon length");
  cp->add_option("--d", c_d, "ranked paths per site pair");
  cp->add_option("--placer", c_placer, "greedy | exact");
  cp->add_option("--weights", c_weights, "server,link,bandwidth (sum 1)");
  cp->add_option("--idle-off", c_idle, "idle slots before power-off");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Collapse CLI11's error-code zoo onto the documented contract: anything
    // that is not a clean --help/--version exit is a usage error.
    return app.exit(e) == 0 ? 0 : 1;
  }
  try {
    if (topo->parsed()) return cmd_topo(t_kind, t_k, t_n, t_out);
    if (trace->parsed()) return cmd_trace(tr_topo, tr_cfg, tr_out);
    if (run->parsed())
      return cmd_run(r_topo, r_trace, r_m, r_d, r_placer, r_weights, r_idle, r_out);
    if (sw->parsed())
      return cmd_sweep(s_kind, s_k, s_n, s_kobj, s_m, s_reps, s_jobs, s_seed, s_hours, s_d,
                       s_placer, s_weights, s_out);
    if (ex->parsed()) return cmd_exact(e_inst, e_budget, e_nodes, e_noprune, e_brute, e_out);
    if (cp->parsed())
      return cmd_compare(c_topo, c_trace, c_ma, c_mb, c_kobj, c_reps, c_seed, c_hours, c_d,
                         c_placer, c_weights, c_idle);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace sfcsim
