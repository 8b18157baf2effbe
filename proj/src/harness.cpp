#include "spc/harness.hpp"

#include "spc/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <thread>

namespace spc {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int thread_count(int requested, int trials) {
  int t = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp(t, 1, std::max(1, trials));
}

}  // namespace

json EvaluationReport::to_json() const {
  json groups_doc = json::array();
  for (const auto& g : groups)
    groups_doc.push_back({{"size", g.size},
                          {"psi", g.psi},
                          {"budget", g.budget},
                          {"spc_bound", g.spc_bound},
                          {"expected_separations", g.expected_separations},
                          {"standard_error", g.standard_error},
                          {"violated", g.violated}});
  json pairs_doc = json::array();
  for (std::size_t e = 0; e < pairs.size(); ++e)
    pairs_doc.push_back({pairs[e].first, pairs[e].second, pair_frequency[e]});
  json doc{{"trials", trials},
           {"epsilon", epsilon},
           {"seed", seed},
           {"objective", objective},
           {"objective_value", objective_value},
           {"violated", violated},
           {"violation_percent", violation_percent},
           {"groups", std::move(groups_doc)},
           {"pair_frequency", std::move(pairs_doc)},
           {"timing_seconds", timing_seconds}};
  doc["cost_of_fairness"] = cost_of_fairness ? json(*cost_of_fairness) : json();
  return doc;
}

EvaluationReport evaluate_draws(const MetricInstance& inst, const Objective& objective, const ConstraintFamily& family,
                                const DrawFn& draw, const EvaluateOptions& options, std::uint64_t seed) {
  if (options.trials < 1) throw InputError("trials must be at least 1");
  if (!(options.epsilon >= 0.0)) throw InputError("epsilon must be nonnegative");
  family.validate(inst.num_points());
  const auto t0 = Clock::now();

  EvaluationReport rep;
  rep.trials = options.trials;
  rep.epsilon = options.epsilon;
  rep.seed = seed;
  rep.objective = objective.name();
  rep.pairs = family.distinct_pairs();
  const std::size_t np = rep.pairs.size();
  const std::size_t ng = family.size();
  std::vector<std::vector<int>> members(ng);
  for (std::size_t q = 0; q < ng; ++q)
    for (const auto& p : family.groups()[q].pairs)
      members[q].push_back(
          static_cast<int>(std::lower_bound(rep.pairs.begin(), rep.pairs.end(), p) - rep.pairs.begin()));

  struct Partial {
    std::vector<std::int64_t> pair_count;
    std::vector<std::int64_t> group_sum, group_sumsq;
  };
  const int threads = thread_count(options.threads, options.trials);
  std::vector<Partial> partial(threads);
  std::vector<double> trial_value(options.trials);
  const int p = objective.exponent();
  auto worker = [&](int w) {
    Partial& part = partial[w];
    part.pair_count.assign(np, 0);
    part.group_sum.assign(ng, 0);
    part.group_sumsq.assign(ng, 0);
    std::vector<char> sep(np);
    const int begin = static_cast<int>(static_cast<std::int64_t>(options.trials) * w / threads);
    const int end = static_cast<int>(static_cast<std::int64_t>(options.trials) * (w + 1) / threads);
    for (int t = begin; t < end; ++t) {
      const auto phi = draw(static_cast<std::uint64_t>(t));
      for (std::size_t e = 0; e < np; ++e) {
        sep[e] = phi[rep.pairs[e].first] != phi[rep.pairs[e].second];
        part.pair_count[e] += sep[e];
      }
      for (std::size_t q = 0; q < ng; ++q) {
        std::int64_t c = 0;
        for (int e : members[q]) c += sep[e];
        part.group_sum[q] += c;
        part.group_sumsq[q] += c * c;
      }
      double v = 0.0;
      for (PointId j = 0; j < inst.num_points(); ++j) {
        const double d = inst.distance(phi[j], j);
        v = objective.is_radius() ? std::max(v, d) : v + (p == 2 ? d * d : d);
      }
      trial_value[t] = v;
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker, w);
    for (auto& th : pool) th.join();
  }

  std::vector<std::int64_t> pair_count(np, 0), gsum(ng, 0), gsumsq(ng, 0);
  for (const auto& part : partial) {
    for (std::size_t e = 0; e < np; ++e) pair_count[e] += part.pair_count[e];
    for (std::size_t q = 0; q < ng; ++q) gsum[q] += part.group_sum[q], gsumsq[q] += part.group_sumsq[q];
  }
  const double T = options.trials;
  rep.pair_frequency.resize(np);
  for (std::size_t e = 0; e < np; ++e) rep.pair_frequency[e] = static_cast<double>(pair_count[e]) / T;
  for (std::size_t q = 0; q < ng; ++q) {
    const auto& g = family.groups()[q];
    GroupReport gr;
    gr.size = g.pairs.size();
    gr.psi = g.psi;
    gr.budget = g.budget();
    gr.spc_bound = 2.0 * g.budget();
    gr.expected_separations = static_cast<double>(gsum[q]) / T;
    const double var = std::max(0.0, static_cast<double>(gsumsq[q]) / T - gr.expected_separations * gr.expected_separations);
    gr.standard_error = options.trials > 1 ? std::sqrt(var * T / (T - 1.0) / T) : 0.0;
    gr.violated = gr.expected_separations > (g.psi + options.epsilon) * static_cast<double>(gr.size) + 1e-12;
    rep.violated += gr.violated;
    rep.groups.push_back(gr);
  }
  rep.violation_percent = ng == 0 ? 0.0 : 100.0 * rep.violated / static_cast<double>(ng);
  double total = 0.0;
  for (double v : trial_value) total += v;
  const double mean = total / T;
  rep.objective_value = objective.is_radius() ? mean : (p == 2 ? std::sqrt(mean) : mean);
  rep.timing_seconds["evaluation"] = seconds_since(t0);
  return rep;
}

EvaluationReport evaluate(const MetricInstance& inst, const AssignmentDistribution& dist,
                          const ConstraintFamily& family, const EvaluateOptions& options) {
  if (dist.num_points() != inst.num_points()) throw InputError("distribution and instance disagree on the point count");
  return evaluate_draws(
      inst, dist.guarantee().objective, family, [&](std::uint64_t t) { return draw_assignment(dist, t, &inst); },
      options, dist.master_seed());
}

DrawFn independent_sampling_baseline(std::vector<LocationId> open_set, MatrixXd x, std::uint64_t seed) {
  if (static_cast<Eigen::Index>(open_set.size()) != x.rows()) throw InputError("marginals do not match the open set");
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    if (std::abs(x.col(j).sum() - 1.0) > kFeasibilityTolerance)
      throw InputError("marginal column " + std::to_string(j) + " does not sum to 1");
  return [open = std::move(open_set), x = std::move(x), seed](std::uint64_t t) {
    CounterRng rng(seed, t);
    std::vector<LocationId> phi(static_cast<std::size_t>(x.cols()));
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      double u = rng.uniform();
      Eigen::Index pick = x.rows() - 1;
      for (Eigen::Index s = 0; s < x.rows(); ++s) {
        u -= x(s, j);
        if (u < 0.0 && x(s, j) > 0.0) {
          pick = s;
          break;
        }
      }
      while (x(pick, j) <= 0.0 && pick > 0) --pick;
      phi[static_cast<std::size_t>(j)] = open[static_cast<std::size_t>(pick)];
    }
    return phi;
  };
}

double cost_of_fairness(double fair_cost, double baseline_cost) {
  if (!(baseline_cost > 0.0)) throw InputError("cost of fairness needs a positive baseline cost");
  return fair_cost / baseline_cost;
}

// Experiment config ----------------------------------------------------------

namespace {

const std::vector<std::string> kAlgorithms{"alg1-means", "alg2-center", "baseline-if"};

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw InputError("config." + field + ": " + what);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& doc, const std::string& base_dir) {
  if (!doc.is_object()) throw InputError("config: expected a JSON object");
  static const std::vector<std::string> known{"dataset", "columns", "n",      "k",      "metric", "m",
                                              "algorithms", "trials", "epsilon", "seed", "threads"};
  for (const auto& [key, value] : doc.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) field_error(key, "unknown field");
  ExperimentConfig c;
  c.raw = doc;
  if (!doc.contains("dataset") || !doc["dataset"].is_string()) field_error("dataset", "expected a file path string");
  c.dataset = doc["dataset"].get<std::string>();
  if (!base_dir.empty() && std::filesystem::path(c.dataset).is_relative())
    c.dataset = (std::filesystem::path(base_dir) / c.dataset).string();
  if (doc.contains("columns")) {
    if (!doc["columns"].is_array()) field_error("columns", "expected an array of column names");
    for (const auto& v : doc["columns"]) {
      if (!v.is_string()) field_error("columns", "expected an array of column names");
      c.columns.push_back(v.get<std::string>());
    }
  }
  if (doc.contains("n")) {
    if (!doc["n"].is_number_integer() || doc["n"].get<int>() < 1) field_error("n", "expected a positive integer");
    c.n = doc["n"].get<int>();
  }
  if (!doc.contains("k")) field_error("k", "required");
  const auto& k = doc["k"];
  if (k.is_number_integer()) {
    c.ks.push_back(k.get<int>());
  } else if (k.is_array() && !k.empty()) {
    for (const auto& v : k) {
      if (!v.is_number_integer()) field_error("k", "expected positive integers");
      c.ks.push_back(v.get<int>());
    }
  } else {
    field_error("k", "expected a positive integer or a non-empty array of them");
  }
  for (int v : c.ks)
    if (v < 1) field_error("k", "expected positive integers");
  if (!doc.contains("metric") || !doc["metric"].is_string()) field_error("metric", "expected one of f1, f2, f3");
  c.metric = doc["metric"].get<std::string>();
  if (c.metric != "f1" && c.metric != "f2" && c.metric != "f3") field_error("metric", "expected one of f1, f2, f3");
  if (doc.contains("m")) {
    if (!doc["m"].is_number_integer() || doc["m"].get<int>() < 1) field_error("m", "expected a positive integer");
    c.m = doc["m"].get<int>();
  }
  if (!doc.contains("algorithms")) field_error("algorithms", "required");
  const auto& algs = doc["algorithms"];
  auto add_alg = [&](const json& v) {
    if (!v.is_string() || std::find(kAlgorithms.begin(), kAlgorithms.end(), v.get<std::string>()) == kAlgorithms.end())
      field_error("algorithms", "expected alg1-means, alg2-center or baseline-if");
    c.algorithms.push_back(v.get<std::string>());
  };
  if (algs.is_array() && !algs.empty()) {
    for (const auto& v : algs) add_alg(v);
  } else {
    add_alg(algs);
  }
  if (doc.contains("trials")) {
    if (!doc["trials"].is_number_integer() || doc["trials"].get<int>() < 1)
      field_error("trials", "expected a positive integer");
    c.trials = doc["trials"].get<int>();
  }
  if (doc.contains("epsilon")) {
    if (!doc["epsilon"].is_number() || doc["epsilon"].get<double>() < 0.0)
      field_error("epsilon", "expected a nonnegative number");
    c.epsilon = doc["epsilon"].get<double>();
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<std::int64_t>() >= 0))
      field_error("seed", "expected a nonnegative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("threads")) {
    if (!doc["threads"].is_number_integer() || doc["threads"].get<int>() < 0)
      field_error("threads", "expected a nonnegative integer");
    c.threads = doc["threads"].get<int>();
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(doc, std::filesystem::path(path).parent_path().string());
}

// Experiment run -------------------------------------------------------------

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config, const std::string& out_dir) {
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  const MetricInstance inst = load_dataset(config.dataset, config.columns, config.n, config.seed);
  std::vector<ExperimentRow> rows;

  for (int k : config.ks) {
    if (k > inst.num_points()) throw InputError("config.k: " + std::to_string(k) + " exceeds the sample size");
    auto t0 = Clock::now();
    ConstraintFamily family;
    if (config.metric == "f1")
      family = gen_f1(inst, k);
    else if (config.metric == "f2")
      family = gen_f2(inst, config.m);
    else
      family = gen_f3(inst, k);
    const double gen_seconds = seconds_since(t0);

    std::optional<AssignmentDistribution> means_dist;
    SolveTrace means_trace;
    double means_baseline = 0.0;
    auto means = [&]() -> const AssignmentDistribution& {
      if (!means_dist) {
        means_dist = solve_spc(inst, Objective::means(), LocationConstraint::cardinality(k), family, config.seed, {},
                               &means_trace);
        means_baseline = means_dist->guarantee().baseline_value;
      }
      return *means_dist;
    };

    for (const auto& alg : config.algorithms) {
      ExperimentRow row;
      row.algorithm = alg;
      row.k = k;
      row.metric = config.metric;
      row.n = inst.num_points();
      row.seed = config.seed;
      row.trials = config.trials;
      row.groups = static_cast<int>(family.size());
      EvaluateOptions eo;
      eo.trials = config.trials;
      eo.threads = config.threads;
      SolveTrace trace;
      json guarantee;
      if (alg == "alg2-center") {
        eo.epsilon = config.epsilon.value_or(0.0);
        const auto dist = solve_kcenter_spc_cc(inst, k, family, config.seed, {}, &trace);
        row.report = evaluate(inst, dist, family, eo);
        row.baseline_cost = threshold_baseline_radius(inst, k);
        guarantee = guarantee_to_json(dist.guarantee());
      } else {
        eo.epsilon = config.epsilon.value_or(0.05);
        const auto& dist = means();
        trace = means_trace;
        row.baseline_cost = means_baseline;
        guarantee = guarantee_to_json(dist.guarantee());
        if (alg == "alg1-means") {
          row.report = evaluate(inst, dist, family, eo);
        } else {
          const DrawFn draw =
              independent_sampling_baseline(dist.open_set(), dist.fractional().x, mix64(config.seed ^ 0x1f));
          row.report = evaluate_draws(inst, Objective::means(), family, draw, eo, config.seed);
        }
      }
      row.epsilon = eo.epsilon;
      row.violation_percent = row.report.violation_percent;
      row.objective_value = row.report.objective_value;
      row.cost_of_fairness = row.baseline_cost > 0.0 ? cost_of_fairness(row.objective_value, row.baseline_cost) : 0.0;
      row.report.cost_of_fairness = row.cost_of_fairness;
      auto& timing = row.report.timing_seconds;
      timing["constraints"] = gen_seconds;
      timing["baseline"] = trace.baseline_seconds;
      timing["lp_build"] = trace.lp_build_seconds;
      timing["lp_solve"] = trace.lp_solve_seconds;

      if (!out_dir.empty()) {
        json doc{{"config", config.raw},
                 {"algorithm", alg},
                 {"k", k},
                 {"metric", config.metric},
                 {"n", row.n},
                 {"seed", config.seed},
                 {"groups", row.groups},
                 {"baseline_cost", row.baseline_cost},
                 {"guarantee", guarantee},
                 {"lp", {{"solves", trace.lp_solves}, {"pivots", trace.pivots}, {"cuts", trace.cuts}}},
                 {"evaluation", row.report.to_json()}};
        std::ofstream out(std::filesystem::path(out_dir) / ("report_" + alg + "_k" + std::to_string(k) + ".json"));
        out << doc.dump(1) << '\n';
      }
      rows.push_back(std::move(row));
    }
  }

  if (!out_dir.empty()) {
    std::ofstream csv(std::filesystem::path(out_dir) / "comparison.csv");
    csv << "algorithm,k,metric,n,seed,trials,epsilon,groups,violation_percent,objective,baseline_cost,cost_of_fairness\n";
    csv.precision(10);
    for (const auto& r : rows)
      csv << r.algorithm << ',' << r.k << ',' << r.metric << ',' << r.n << ',' << r.seed << ',' << r.trials << ','
          << r.epsilon << ',' << r.groups << ',' << r.violation_percent << ',' << r.objective_value << ','
          << r.baseline_cost << ',' << r.cost_of_fairness << '\n';
  }
  return rows;
}

void write_synthetic_dataset(const std::string& path, int rows, int dims, int clusters, std::uint64_t seed) {
  if (rows < 1 || dims < 1 || clusters < 1) throw InputError("synthetic dataset needs positive rows, dims and clusters");
  CounterRng rng(seed, 0);
  auto normal = [&] {
    const double u1 = rng.uniform_open_closed();
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  };
  MatrixXd centers(clusters, dims);
  std::vector<double> spread(clusters);
  for (int c = 0; c < clusters; ++c) {
    for (int d = 0; d < dims; ++d) centers(c, d) = 10.0 * rng.uniform() - 5.0;
    spread[c] = 0.5 + rng.uniform();
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  for (int d = 0; d < dims; ++d) out << (d ? "," : "") << 'f' << d;
  out << '\n';
  out.precision(17);
  for (int r = 0; r < rows; ++r) {
    const int c = static_cast<int>(rng.below(static_cast<std::uint64_t>(clusters)));
    for (int d = 0; d < dims; ++d) out << (d ? "," : "") << centers(c, d) + spread[c] * normal();
    out << '\n';
  }
}

}  // namespace spc
