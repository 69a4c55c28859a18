#include "moran/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "moran/engine.hpp"
#include "moran/estimator.hpp"
#include "moran/exact.hpp"
#include "moran/families.hpp"
#include "moran/potential.hpp"
#include "moran/report.hpp"

namespace moran {

namespace {

struct Options {
  std::string graph_path;
  std::string family;
  std::string out_path;
  std::string format = "csv";
  std::string trace_path;
  std::string start = "uniform";
  std::string mode = "active";
  std::string threshold;
  std::string r = "2";
  std::string eps = "1/10";
  std::string p;
  std::string sizes;
  long k = 0, a = 0, n = 0;
  long runs = 10000;
  long samples = 50;
  std::uint64_t max_steps = 0;
  std::uint64_t subset_mask = 0;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool min_only = false;
};

Graph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConsistencyError("cannot open graph file: " + path);
  return load_graph(in);
}

// --start accepts "uniform", a vertex id, or a group name looked up in the
// sidecar file <graph>.groups.
std::optional<MutantSet> resolve_start(const Options& opt, const Graph& g) {
  if (opt.start == "uniform") return std::nullopt;
  bool numeric = !opt.start.empty() &&
                 opt.start.find_first_not_of("0123456789") == std::string::npos;
  if (numeric) {
    auto v = static_cast<Vertex>(std::stoul(opt.start));
    if (v < 1 || v > g.n()) throw ConsistencyError("start vertex out of range");
    return MutantSet::single(v);
  }
  std::ifstream side(opt.graph_path + ".groups");
  if (!side)
    throw ConsistencyError("start group '" + opt.start + "' needs sidecar " + opt.graph_path +
                           ".groups");
  std::stringstream buf;
  buf << side.rdbuf();
  auto groups = parse_groups(buf.str());
  auto it = groups.find(opt.start);
  if (it == groups.end()) throw ConsistencyError("no group named '" + opt.start + "' in sidecar");
  return MutantSet(it->second);
}

FamilyParams family_params(const Options& opt) {
  FamilyParams fp;
  if (opt.n > 0) fp.n = opt.n;
  if (opt.k > 0) fp.k = opt.k;
  if (opt.a > 0) fp.a = opt.a;
  if (!opt.p.empty()) fp.p = parse_rational(opt.p);
  return fp;
}

int cmd_gen(const Options& opt, std::ostream& out) {
  auto lg = generate(family_from_name(opt.family), family_params(opt), opt.seed);
  std::string text = save_graph_string(lg.graph);
  if (opt.out_path.empty()) {
    out << text;
  } else {
    std::ofstream f(opt.out_path);
    if (!f) throw ConsistencyError("cannot write " + opt.out_path);
    f << text;
    std::ofstream side(opt.out_path + ".groups");
    side << format_groups(lg);
  }
  return 0;
}

int cmd_info(const Options& opt, std::ostream& out) {
  Graph g = load_graph_file(opt.graph_path);
  auto report = validate(g);
  ReportRecord rec{
      {"n", static_cast<long long>(g.n())},
      {"m", static_cast<long long>(g.m())},
      {"delta", static_cast<long long>(g.max_degree())},
      {"directed", g.directed()},
      {"avg_degree", average_degree(g)},
      {"connected", report.connected},
  };
  if (report.has_strong) rec.emplace_back("strongly_connected", report.strongly_connected);
  std::string violations;
  for (const auto& v : report.invariant_violations) {
    if (!violations.empty()) violations += "; ";
    violations += v;
  }
  rec.emplace_back("violations", violations);
  out << emit_report({rec}, ReportFormat::json);
  return 0;
}

int cmd_simulate(const Options& opt, std::ostream& out) {
  Graph g = load_graph_file(opt.graph_path);
  Rational r = parse_rational(opt.r);
  SimContext ctx(g);
  RunSpec spec;
  if (opt.mode == "naive")
    spec.mode = RunMode::to_absorption_naive;
  else if (opt.mode == "active")
    spec.mode = RunMode::to_absorption_active;
  else if (opt.mode == "threshold")
    spec.mode = RunMode::to_threshold;
  else if (opt.mode == "capped")
    spec.mode = RunMode::capped;
  else
    throw CLI::ValidationError("--mode", "expected naive|active|threshold|capped");
  if (spec.mode == RunMode::to_threshold) {
    if (opt.threshold.empty()) throw CLI::ValidationError("--threshold", "required in threshold mode");
    spec.threshold = parse_rational(opt.threshold);
  }
  spec.max_steps = opt.max_steps;
  auto start = resolve_start(opt, g);
  if (start) {
    if (start->count() == 1)
      spec.start = *start->begin();
    else
      spec.start_set = start;
  }

  std::ofstream trace_file;
  if (!opt.trace_path.empty()) {
    trace_file.open(opt.trace_path);
    if (!trace_file) throw ConsistencyError("cannot write " + opt.trace_path);
    trace_file << "step,spawner,target,n_mut,phi_num_scaled\n";
    spec.trace = [&trace_file](std::uint64_t step, Vertex spawner, Vertex target,
                               std::uint32_t n_mut, const BigInt& phi) {
      trace_file << step << "," << spawner << "," << target << "," << n_mut << ","
                 << phi.get_str() << "\n";
    };
  }

  RunOutcome res = run(ctx, r, spec, opt.seed);
  ReportRecord rec{
      {"result", run_result_name(res.result)},
      {"active_steps", res.active_steps},
  };
  if (res.naive_steps) rec.emplace_back("naive_steps", *res.naive_steps);
  rec.emplace_back("final_phi_num_scaled", res.final_phi_scaled.get_str());
  rec.emplace_back("lcm_d", ctx.lcm().value.get_str());
  rec.emplace_back("seed", res.seed);
  out << emit_report({rec}, ReportFormat::json);
  return 0;
}

int cmd_estimate(const Options& opt, std::ostream& out) {
  Graph g = load_graph_file(opt.graph_path);
  Rational r = parse_rational(opt.r);
  Rational eps = parse_rational(opt.eps);
  if (r <= 1) throw CLI::ValidationError("--r", "the estimator needs r > 1");
  if (eps <= 0 || eps >= 1) throw CLI::ValidationError("--eps", "need eps in (0,1)");
  Estimate est = estimate_fixation(g, r, eps, opt.seed, opt.jobs);
  ReportRecord rec{
      {"value", est.value},
      {"n_runs", static_cast<long long>(est.params.N)},
      {"p_threshold_num", est.params.P.get_num().get_str()},
      {"p_threshold_den", est.params.P.get_den().get_str()},
      {"total_active_steps", est.total_active_steps},
      {"capped", est.capped},
      {"seed", est.seed},
  };
  out << emit_report({rec}, ReportFormat::json);
  return est.failed ? 3 : 0;
}

int cmd_exact(const Options& opt, std::ostream& out) {
  Graph g = load_graph_file(opt.graph_path);
  Rational r = parse_rational(opt.r);
  auto start = resolve_start(opt, g);
  double fixation, time;
  if (start) {
    fixation = fixation_probability_exact(g, r, *start);
    double res1 = last_exact_diagnostics().residual;
    time = absorption_time_exact(g, r, *start);
    ReportRecord rec{{"fixation", fixation},
                     {"absorption_time", time},
                     {"n_states", static_cast<std::uint64_t>(last_exact_diagnostics().n_states)},
                     {"residual", std::max(res1, last_exact_diagnostics().residual)}};
    out << emit_report({rec}, ReportFormat::json);
    return 0;
  }
  fixation = fixation_probability_exact(g, r);
  double res1 = last_exact_diagnostics().residual;
  time = absorption_time_exact(g, r);
  ReportRecord rec{{"fixation", fixation},
                   {"absorption_time", time},
                   {"n_states", static_cast<std::uint64_t>(last_exact_diagnostics().n_states)},
                   {"residual", std::max(res1, last_exact_diagnostics().residual)}};
  out << emit_report({rec}, ReportFormat::json);
  return 0;
}

ReportRecord drift_record(const Graph& g, const ProcessConstants& consts, std::uint64_t mask) {
  MutantSet s = MutantSet::from_mask(mask, g.n());
  Rational d = boundary_drift(g, s);
  auto barrier = is_barrier(g, consts, s);
  return {{"subset_bitmask", mask},
          {"drift_num", d.get_num().get_str()},
          {"drift_den", d.get_den().get_str()},
          {"is_barrier", barrier.is_barrier}};
}

int cmd_drift(const Options& opt, std::ostream& out) {
  Graph g = load_graph_file(opt.graph_path);
  Rational r = parse_rational(opt.r);
  if (r <= 1) throw CLI::ValidationError("--r", "barrier predicate needs r > 1");
  ProcessConstants consts(r);
  std::vector<ReportRecord> records;
  if (opt.min_only) {
    auto [s, d] = min_drift_subset(g);
    auto barrier = is_barrier(g, consts, s);
    records.push_back({{"subset_bitmask", s.to_mask(g.n())},
                       {"drift_num", d.get_num().get_str()},
                       {"drift_den", d.get_den().get_str()},
                       {"is_barrier", barrier.is_barrier}});
  } else {
    if (g.n() > 16) throw CLI::ValidationError("--graph", "drift enumeration caps at n = 16");
    std::uint64_t full = (std::uint64_t{1} << g.n()) - 1;
    for (std::uint64_t mask = 1; mask < full; ++mask)
      records.push_back(drift_record(g, consts, mask));
  }
  out << emit_report(records, report_format_from_name(opt.format),
                     {"subset_bitmask", "drift_num", "drift_den", "is_barrier"});
  return 0;
}

int cmd_barrier(const Options& opt, std::ostream& out) {
  Graph g = load_graph_file(opt.graph_path);
  Rational r = parse_rational(opt.r);
  if (r <= 1) throw CLI::ValidationError("--r", "barrier predicate needs r > 1");
  if (opt.subset_mask == 0) throw CLI::ValidationError("--subset", "need a non-empty subset mask");
  ProcessConstants consts(r);
  out << emit_report({drift_record(g, consts, opt.subset_mask)},
                     report_format_from_name(opt.format));
  return 0;
}

int cmd_bench_absorption(const Options& opt, std::ostream& out) {
  if (opt.sizes.empty()) throw CLI::ValidationError("--sizes", "need a comma-separated list");
  Family fam = family_from_name(opt.family.empty() ? "double_star" : opt.family);
  Rational r = parse_rational(opt.r);
  std::vector<long> sizes;
  std::stringstream ss(opt.sizes);
  std::string item;
  while (std::getline(ss, item, ',')) sizes.push_back(std::stol(item));

  std::vector<ReportRecord> records;
  std::vector<double> log_n, log_mean;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    FamilyParams fp;
    if (fam == Family::double_star || fam == Family::star)
      fp.k = sizes[i];
    else
      fp.n = sizes[i];
    auto lg = generate(fam, fp, opt.seed);
    auto res = mean_absorption_time(lg.graph, r, opt.runs,
                                    SplitMix64::mix(opt.seed + 1000 + i), opt.jobs);
    records.push_back({{"size", static_cast<long long>(sizes[i])},
                       {"n", static_cast<long long>(lg.graph.n())},
                       {"mean_steps", res.mean},
                       {"stderr", res.stderr_},
                       {"runs", static_cast<long long>(res.runs)}});
    log_n.push_back(std::log(static_cast<double>(lg.graph.n())));
    log_mean.push_back(std::log(res.mean));
  }
  ReportFormat format = report_format_from_name(opt.format);
  out << emit_report(records, format);
  // least-squares slope of log(mean) against log(n)
  if (sizes.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
      mx += log_n[i];
      my += log_mean[i];
    }
    mx /= static_cast<double>(log_n.size());
    my /= static_cast<double>(log_n.size());
    double num = 0, den = 0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
      num += (log_n[i] - mx) * (log_mean[i] - my);
      den += (log_n[i] - mx) * (log_n[i] - mx);
    }
    double slope = num / den;
    if (format == ReportFormat::json) {
      out << emit_report({{{"loglog_slope", slope}}}, format);
    } else {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", slope);
      out << "# loglog_slope " << buf << "\n";
    }
  }
  return 0;
}

int cmd_suppressor_audit(const Options& opt, std::ostream& out) {
  Rational r = parse_rational(opt.r);
  if (r <= 1) throw CLI::ValidationError("--r", "suppressor audit needs r > 1");
  double rd = to_double(r);
  bool all_ok = true;
  std::vector<ReportRecord> records;

  // sigma supermartingale: sampled states with 0 < sigma(S) < k must not
  // drift upward in expectation
  {
    long a = opt.a > 0 ? opt.a : static_cast<long>(std::ceil(3.5 * rd * rd));
    long k = opt.k > 0 ? opt.k : 28;
    FamilyParams fp;
    fp.a = a;
    fp.k = k;
    auto lg = generate(Family::undir_suppressor, fp);
    SigmaWeights weights(lg, r);
    SplitMix64 rng(SplitMix64::mix(opt.seed ^ 0x51674d41));
    const auto& v0 = lg.group("V0");
    const auto& v1 = lg.group("V1");
    const auto& v2 = lg.group("V2");
    long violations = 0;
    long tested = 0;
    for (long s = 0; s < opt.samples; ++s) {
      std::vector<Vertex> members;
      long want0 = static_cast<long>(rng.next_below(std::min<std::uint64_t>(v0.size(), 10) + 1));
      long want1 = static_cast<long>(rng.next_below(std::min<std::uint64_t>(v1.size(), 20) + 1));
      long want2 = static_cast<long>(rng.next_below(std::min<std::uint64_t>(v2.size(), 4) + 1));
      for (long i = 0; i < want0; ++i) members.push_back(v0[rng.next_below(v0.size())]);
      for (long i = 0; i < want1; ++i) members.push_back(v1[rng.next_below(v1.size())]);
      for (long i = 0; i < want2; ++i) members.push_back(v2[rng.next_below(v2.size())]);
      MutantSet state(std::move(members));
      if (state.empty()) continue;
      Rational sigma = sigma_potential(weights, state);
      if (sigma <= 0 || sigma >= Rational(k)) continue;
      ++tested;
      auto change = one_step_expected_change(lg.graph, r, state, PotentialKind::sigma, nullptr,
                                             &weights);
      if (change.exact > 0) ++violations;
    }
    bool ok = violations == 0 && tested > 0;
    all_ok = all_ok && ok;
    records.push_back({{"check", std::string("sigma_supermartingale")},
                       {"ok", ok},
                       {"states_tested", static_cast<long long>(tested)},
                       {"violations", static_cast<long long>(violations)}});
  }

  // directed suppression: fixation frequency from the deepest group X_k
  // stays below the 2^{-k+5} a r bound (plus sampling slack)
  {
    long a = opt.a > 0 ? opt.a : static_cast<long>(std::ceil(4 * rd));
    long k = opt.k > 0 ? opt.k : 15;
    FamilyParams fp;
    fp.a = a;
    fp.k = k;
    auto lg = generate(Family::dir_suppressor, fp);
    MutantSet start(lg.group("X" + std::to_string(k)));
    auto mc = monte_carlo_fixation(lg.graph, r, opt.runs, SplitMix64::mix(opt.seed ^ 0xd1f5),
                                   opt.jobs, start);
    double bound = std::pow(2.0, static_cast<double>(-k + 5)) * static_cast<double>(a) * rd;
    double sigma3 = 3.0 * std::sqrt(std::max(bound * (1 - bound), 1e-12) /
                                    static_cast<double>(opt.runs));
    bool ok = mc.value <= bound + sigma3;
    all_ok = all_ok && ok;
    records.push_back({{"check", std::string("dir_suppressor_fixation")},
                       {"ok", ok},
                       {"frequency", mc.value},
                       {"bound", bound + sigma3},
                       {"runs", static_cast<long long>(mc.runs)}});
  }

  out << emit_report(records, ReportFormat::json);
  return all_ok ? 0 : 2;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::istream&, std::ostream& out,
                std::ostream& err) {
  Options opt;
  CLI::App app{"Moran process simulation and fixation-probability toolkit"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", opt.seed, "base seed for all randomness");
    sub->add_option("--jobs", opt.jobs, "worker threads");
    sub->add_option("--format", opt.format, "csv|json");
  };

  auto* gen = app.add_subcommand("gen", "emit a graph family instance");
  gen->add_option("--family", opt.family, "family name")->required();
  gen->add_option("--k", opt.k, "family parameter k");
  gen->add_option("--a", opt.a, "family parameter a");
  gen->add_option("--n", opt.n, "family parameter n");
  gen->add_option("--p", opt.p, "edge probability (rational)");
  gen->add_option("--out", opt.out_path, "write graph here plus <out>.groups sidecar");
  add_common(gen);

  auto* info = app.add_subcommand("info", "validate a graph and print its stats");
  info->add_option("--graph", opt.graph_path)->required();
  add_common(info);

  auto* simulate = app.add_subcommand("simulate", "run one seeded process");
  simulate->add_option("--graph", opt.graph_path)->required();
  simulate->add_option("--r", opt.r, "fitness (rational)");
  simulate->add_option("--mode", opt.mode, "naive|active|threshold|capped");
  simulate->add_option("--threshold", opt.threshold, "potential threshold (rational)");
  simulate->add_option("--max-steps", opt.max_steps, "active step cap");
  simulate->add_option("--start", opt.start, "uniform|VERTEX|GROUPNAME");
  simulate->add_option("--trace", opt.trace_path, "write per-active-step CSV here");
  add_common(simulate);

  auto* estimate = app.add_subcommand("estimate", "early-terminating fixation estimator");
  estimate->add_option("--graph", opt.graph_path)->required();
  estimate->add_option("--r", opt.r, "fitness (rational, > 1)");
  estimate->add_option("--eps", opt.eps, "relative error target (rational in (0,1))");
  add_common(estimate);

  auto* exact = app.add_subcommand("exact", "exact fixation probability and absorption time");
  exact->add_option("--graph", opt.graph_path)->required();
  exact->add_option("--r", opt.r, "fitness (rational)");
  exact->add_option("--start", opt.start, "uniform|VERTEX|GROUPNAME");
  add_common(exact);

  auto* drift = app.add_subcommand("drift", "per-subset drift / barrier table");
  drift->add_option("--graph", opt.graph_path)->required();
  drift->add_option("--r", opt.r, "fitness (rational, > 1)");
  drift->add_flag("--min-only", opt.min_only, "only the minimum-drift subset");
  add_common(drift);

  auto* barrier = app.add_subcommand("barrier", "barrier predicate for one subset");
  barrier->add_option("--graph", opt.graph_path)->required();
  barrier->add_option("--r", opt.r, "fitness (rational, > 1)");
  barrier->add_option("--subset", opt.subset_mask, "subset bitmask (bit v-1 = vertex v)");
  add_common(barrier);

  auto* bench = app.add_subcommand("bench-absorption", "absorption-time scaling benchmark");
  bench->add_option("--family", opt.family, "family name (default double_star)");
  bench->add_option("--sizes", opt.sizes, "comma-separated size list")->required();
  bench->add_option("--r", opt.r, "fitness (rational)");
  bench->add_option("--runs", opt.runs, "runs per size");
  add_common(bench);

  auto* audit = app.add_subcommand("suppressor-audit", "check the suppressor guarantees");
  audit->add_option("--r", opt.r, "fitness (rational, > 1)");
  audit->add_option("--a", opt.a, "override parameter a");
  audit->add_option("--k", opt.k, "override parameter k");
  audit->add_option("--samples", opt.samples, "sigma states to sample");
  audit->add_option("--runs", opt.runs, "monte carlo runs for the directed check");
  add_common(audit);

  std::vector<std::string> argv_vec{"moran"};
  argv_vec.insert(argv_vec.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(argv_vec.size());
  for (const auto& s : argv_vec) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) return cmd_gen(opt, out);
    if (info->parsed()) return cmd_info(opt, out);
    if (simulate->parsed()) return cmd_simulate(opt, out);
    if (estimate->parsed()) return cmd_estimate(opt, out);
    if (exact->parsed()) return cmd_exact(opt, out);
    if (drift->parsed()) return cmd_drift(opt, out);
    if (barrier->parsed()) return cmd_barrier(opt, out);
    if (bench->parsed()) return cmd_bench_absorption(opt, out);
    if (audit->parsed()) return cmd_suppressor_audit(opt, out);
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConsistencyError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace moran
