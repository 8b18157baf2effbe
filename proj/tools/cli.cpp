#include "cli.hpp"

#include "spc/assign_lp.hpp"
#include "spc/constraints.hpp"
#include "spc/framework.hpp"
#include "spc/harness.hpp"
#include "spc/instance.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace spc::cli {

using nlohmann::json;

namespace {

struct InstanceArgs {
  std::string dataset;
  std::string matrix;
  std::vector<std::string> columns;
  int sample_n = 0;
  std::uint64_t seed = 0;

  void add(CLI::App* app, bool required) {
    auto* group = app->add_option_group("instance");
    group->add_option("--dataset", dataset, "CSV table with a header row");
    group->add_option("--matrix", matrix, "explicit distance matrix");
    if (required) group->require_option(1);
    else group->require_option(0, 1);
    app->add_option("--columns", columns, "dataset columns (default: all)")->delimiter(',');
    app->add_option("--sample-n", sample_n, "rows to sample from the dataset")->check(CLI::PositiveNumber);
    app->add_option("--sample-seed", seed, "row sampling seed");
  }

  bool present() const { return !dataset.empty() || !matrix.empty(); }

  json describe() const {
    if (!matrix.empty()) return json{{"matrix", matrix}};
    json d{{"dataset", dataset}, {"columns", columns}, {"seed", seed}};
    if (sample_n > 0) d["sample_n"] = sample_n;
    return d;
  }

  MetricInstance load() const {
    if (!matrix.empty()) return load_distance_matrix(matrix);
    return load_dataset(dataset, columns, sample_n > 0 ? std::optional<int>(sample_n) : std::nullopt, seed);
  }
};

MetricInstance load_described(const json& d) {
  if (d.contains("matrix")) return load_distance_matrix(d["matrix"].get<std::string>());
  if (!d.contains("dataset")) throw InputError("the solution does not record its instance; pass --dataset or --matrix");
  std::optional<int> n;
  if (d.contains("sample_n")) n = d["sample_n"].get<int>();
  return load_dataset(d["dataset"].get<std::string>(), d.value("columns", std::vector<std::string>{}), n,
                      d.value("seed", std::uint64_t{0}));
}

std::vector<double> read_numbers(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  for (char& c : text)
    if (c == ',' || c == ';') c = ' ';
  std::istringstream is(text);
  std::vector<double> v;
  std::string tok;
  while (is >> tok) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InputError("'" + path + "': '" + tok + "' is not a number");
    }
  }
  return v;
}

LpStrategy parse_strategy(const std::string& s) {
  if (s == "auto") return LpStrategy::kAuto;
  if (s == "explicit") return LpStrategy::kExplicit;
  if (s == "cutting") return LpStrategy::kCuttingPlane;
  throw InputError("unknown LP strategy '" + s + "'");
}

void print_guarantee(std::ostream& out, const AssignmentDistribution& dist) {
  const auto& g = dist.guarantee();
  out << "algorithm: " << g.algorithm << "\nopen set:";
  for (LocationId i : dist.open_set()) out << ' ' << i;
  out << "\nbaseline value: " << g.baseline_value;
  if (g.objective.is_radius()) out << "\nradius guess: " << g.guess << "\nradius limit: " << g.radius_limit;
  out << "\nachieved: " << g.achieved << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Clustering with stochastic pairwise constraints"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "solve an instance and write the assignment distribution");
  InstanceArgs solve_inst;
  std::string objective_name, location_name = "unrestricted", weights_path, constraints_path, out_path, dump_lp,
                              strategy = "auto";
  int k = 0;
  double budget = 0.0;
  bool centroid = false, ml_fast = false;
  std::uint64_t master_seed = 0;
  solve->add_option("--objective", objective_name, "center|supplier|median|means")->required();
  solve->add_option("--location", location_name, "unrestricted|k|knapsack");
  solve->add_option("--k", k, "number of open locations");
  solve->add_option("--weights", weights_path, "location weights, one number per location");
  solve->add_option("--budget", budget, "knapsack budget");
  solve_inst.add(solve, true);
  solve->add_option("--constraints", constraints_path, "constraint family (JSON)");
  solve->add_flag("--centroid", centroid, "require every open center to serve itself");
  solve->add_flag("--ml-fast", ml_fast, "use the must-link greedy (must-link families only)");
  solve->add_option("--seed", master_seed, "master seed for rounding draws");
  solve->add_option("--out", out_path, "solution file")->required();
  solve->add_option("--dump-lp", dump_lp, "write the final assignment LP in MPS format");
  solve->add_option("--lp-strategy", strategy, "auto|explicit|cutting");

  // gen-constraints
  auto* gen = app.add_subcommand("gen-constraints", "generate a fairness constraint family");
  InstanceArgs gen_inst;
  std::string metric, groups_path, gen_out;
  int gen_k = 0, gen_m = 0;
  gen->add_option("--metric", metric, "f1|f2|f3|community")->required();
  gen->add_option("--k", gen_k, "k for f1/f3");
  gen->add_option("--m", gen_m, "neighbours for f2");
  gen->add_option("--groups", groups_path, "community file: {\"groups\": [{\"members\": [...], \"psi\": p}]}");
  gen_inst.add(gen, false);
  gen->add_option("--out", gen_out, "constraint file")->required();

  // gen-gadget
  auto* gadget_cmd = app.add_subcommand("gen-gadget", "build the k-cut reduction instance");
  std::string graph_path, terminals_arg, gadget_objective, out_instance, out_constraints;
  int gamma = 0;
  gadget_cmd->add_option("--graph", graph_path, "edge list")->required();
  gadget_cmd->add_option("--terminals", terminals_arg, "comma-separated terminal node names")->required();
  gadget_cmd->add_option("--gamma", gamma, "cut budget")->required();
  gadget_cmd->add_option("--objective", gadget_objective, "center|supplier|median|means")->required();
  gadget_cmd->add_option("--out-instance", out_instance, "distance matrix output")->required();
  gadget_cmd->add_option("--out-constraints", out_constraints, "constraint output")->required();

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Monte Carlo evaluation of a solution");
  InstanceArgs eval_inst;
  std::string solution_path, eval_constraints, eval_out;
  int trials = 5000, threads = 0;
  double epsilon = 0.0;
  eval->add_option("--solution", solution_path, "solution file")->required();
  eval->add_option("--constraints", eval_constraints, "constraint family")->required();
  eval->add_option("--trials", trials, "number of draws")->check(CLI::PositiveNumber);
  eval->add_option("--epsilon", epsilon, "violation slack")->check(CLI::NonNegativeNumber);
  eval->add_option("--threads", threads, "worker threads (0: all cores)");
  eval_inst.add(eval, false);
  eval->add_option("--out", eval_out, "report file")->required();

  // experiment
  auto* exp = app.add_subcommand("experiment", "run an experiment grid");
  std::string config_path, out_dir;
  exp->add_option("--config", config_path, "experiment config (JSON)")->required();
  exp->add_option("--out-dir", out_dir, "report directory")->required();

  // gen-dataset
  auto* data = app.add_subcommand("gen-dataset", "write a synthetic Gaussian-blob dataset");
  int rows = 200, dims = 4, clusters = 6;
  std::uint64_t data_seed = 0;
  std::string data_out;
  data->add_option("--rows", rows)->check(CLI::PositiveNumber);
  data->add_option("--dims", dims)->check(CLI::PositiveNumber);
  data->add_option("--clusters", clusters)->check(CLI::PositiveNumber);
  data->add_option("--seed", data_seed);
  data->add_option("--out", data_out)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*solve) {
      const MetricInstance inst = solve_inst.load();
      const Objective objective = Objective::parse(objective_name);
      LocationConstraint location;
      if (location_name == "k") {
        location = LocationConstraint::cardinality(k);
      } else if (location_name == "knapsack") {
        if (weights_path.empty()) throw InputError("--location knapsack needs --weights");
        location = LocationConstraint::knapsack(read_numbers(weights_path), budget);
      } else if (location_name != "unrestricted") {
        throw InputError("--location must be unrestricted, k or knapsack");
      }
      const ConstraintFamily family = constraints_path.empty() ? ConstraintFamily{} : read_family(constraints_path);
      family.validate(inst.num_points());
      SolveOptions opts;
      opts.lp.strategy = parse_strategy(strategy);

      const bool ml_route = objective.is_radius() && location.kind != LocationKind::kUnrestricted &&
                            family.is_ml() && (ml_fast || !family.empty());
      if (ml_fast && !ml_route)
        throw InputError("--ml-fast needs a must-link family, a center/supplier objective and k or knapsack locations");
      std::optional<AssignmentDistribution> dist;
      if (ml_route) {
        const auto sol = solve_ml(inst, objective, location, extract_cliques(family, inst.num_points()));
        dist = ml_distribution(inst, objective, location, sol, family, master_seed);
      } else if (centroid && objective.kind == ObjectiveKind::kCenter && location.kind == LocationKind::kCardinality) {
        dist = solve_kcenter_spc_cc(inst, location.k, family, master_seed, opts);
      } else {
        opts.reassign_centroid = centroid;
        dist = solve_spc(inst, objective, location, family, master_seed, opts);
      }
      write_solution(*dist, out_path, solve_inst.describe());
      if (!dump_lp.empty()) {
        const auto& g = dist->guarantee();
        const LpMode mode = objective.is_radius() ? LpMode::radius(g.radius_limit) : LpMode::cost(objective.exponent());
        const AssignmentLp lp = build_lp(inst, dist->open_set(), family, mode, g.centroid);
        std::ofstream mps(dump_lp);
        if (!mps) throw InputError("cannot write '" + dump_lp + "'");
        lp.write_mps(mps);
      }
      print_guarantee(out, *dist);
      return 0;
    }

    if (*gen) {
      ConstraintFamily family;
      if (metric == "community") {
        if (groups_path.empty()) throw InputError("--metric community needs --groups");
        std::ifstream in(groups_path);
        if (!in) throw InputError("cannot open '" + groups_path + "'");
        json doc;
        try {
          doc = json::parse(in);
        } catch (const json::parse_error& e) {
          throw InputError(std::string("groups file is not valid JSON: ") + e.what());
        }
        std::vector<std::vector<PointId>> groups;
        std::vector<double> psis;
        try {
          for (const auto& g : doc.at("groups")) {
            groups.push_back(g.at("members").get<std::vector<PointId>>());
            psis.push_back(g.at("psi").get<double>());
          }
        } catch (const json::exception& e) {
          throw InputError(std::string("groups file: ") + e.what());
        }
        family = gen_community(groups, psis);
        if (gen_inst.present()) family.validate(gen_inst.load().num_points());
      } else {
        if (!gen_inst.present()) throw InputError("--metric " + metric + " needs --dataset or --matrix");
        const MetricInstance inst = gen_inst.load();
        if (metric == "f1" || metric == "f3") {
          if (gen_k < 1) throw InputError("--metric " + metric + " needs --k");
          family = metric == "f1" ? gen_f1(inst, gen_k) : gen_f3(inst, gen_k);
        } else if (metric == "f2") {
          if (gen_m < 1) throw InputError("--metric f2 needs --m");
          family = gen_f2(inst, gen_m);
        } else {
          throw InputError("--metric must be f1, f2, f3 or community");
        }
      }
      write_family(family, gen_out);
      out << "groups: " << family.size() << '\n';
      return 0;
    }

    if (*gadget_cmd) {
      const Graph graph = read_edge_list(graph_path);
      std::vector<int> terminals;
      std::stringstream ss(terminals_arg);
      for (std::string name; std::getline(ss, name, ',');) {
        const int u = graph.node_index(name);
        if (u < 0) throw InputError("terminal '" + name + "' is not a graph node");
        terminals.push_back(u);
      }
      auto [gadget, family] = generate_kcut_gadget(graph, terminals, gamma, Objective::parse(gadget_objective));
      write_distance_matrix(gadget.instance, out_instance);
      write_family(family, out_constraints);
      out << "terminals: " << gadget.k << "\ntarget value: " << gadget.target_value << '\n';
      return 0;
    }

    if (*eval) {
      const LoadedSolution sol = read_solution(solution_path);
      const MetricInstance inst = eval_inst.present() ? eval_inst.load() : load_described(sol.instance);
      const ConstraintFamily family = read_family(eval_constraints);
      EvaluateOptions eo;
      eo.trials = trials;
      eo.epsilon = epsilon;
      eo.threads = threads;
      const EvaluationReport rep = evaluate(inst, sol.distribution, family, eo);
      json doc = rep.to_json();
      doc["guarantee"] = guarantee_to_json(sol.distribution.guarantee());
      std::ofstream o(eval_out);
      if (!o) throw InputError("cannot write '" + eval_out + "'");
      o << doc.dump(1) << '\n';
      out << "violation percent: " << rep.violation_percent << "\nobjective: " << rep.objective_value << '\n';
      return 0;
    }

    if (*exp) {
      const auto rows_out = run_experiment(ExperimentConfig::load(config_path), out_dir);
      for (const auto& r : rows_out)
        out << r.algorithm << " k=" << r.k << " violation%=" << r.violation_percent << " objective=" << r.objective_value
            << " cost-of-fairness=" << r.cost_of_fairness << '\n';
      return 0;
    }

    if (*data) {
      write_synthetic_dataset(data_out, rows, dims, clusters, data_seed);
      return 0;
    }
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return 1;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "input error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace spc::cli
