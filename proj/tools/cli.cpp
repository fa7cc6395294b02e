#include "cli.hpp"

#include "fairround/apportionment.hpp"
#include "fairround/couples.hpp"
#include "fairround/envyfree.hpp"
#include "fairround/errors.hpp"
#include "fairround/fairness.hpp"
#include "fairround/io.hpp"
#include "fairround/oracle.hpp"
#include "fairround/rounding.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace fairround::cli {

namespace fs = std::filesystem;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Infeasible:
    case ErrorKind::NoneFound: return kInfeasible;
    case ErrorKind::BudgetViolated: return kBudget;
    case ErrorKind::ScaleExceeded: return kScale;
    default: return kInputError;
  }
}

struct Outcome {
  Json json;
  int code = kOk;
};

using Handler = std::function<Outcome(const fs::path&)>;

std::vector<long> spread(std::vector<long> alpha, std::size_t dims) {
  if (alpha.size() == 1 && dims > 1) alpha.assign(dims, alpha.front());
  if (dims == 0 && alpha.size() == 1) alpha.clear();
  return alpha;
}

Json rationals(const std::vector<Rational>& values) {
  Json out = Json::array();
  for (const auto& v : values) out.push_back(rational_to_json(v));
  return out;
}

Json envy_report_json(const Instance& inst, const EnvyReport& report) {
  Json pairs = Json::array();
  for (const auto& p : report.pairs) {
    const auto& dim = inst.dimension(p.dimension);
    pairs.push_back({{"dimension", dim.name},
                     {"group", dim.groups[p.group].name},
                     {"other", dim.groups[p.other].name},
                     {"own", rational_to_json(p.own)},
                     {"scaled", rational_to_json(p.scaled)},
                     {"envy", rational_to_json(p.envy)},
                     {"limit", rational_to_json(p.limit)},
                     {"pass", p.pass}});
  }
  return {{"pairs", pairs},
          {"excess", rationals(report.excess)},
          {"violations", report.violations},
          {"ok", report.ok()}};
}

int code_for(const std::vector<std::string>& violations) { return violations.empty() ? kOk : kBudget; }

// Runs `handler` on one file, or on every matching file of a directory with
// up to `jobs` threads. Returns the worst exit code.
int dispatch(const fs::path& input, const std::optional<fs::path>& output, int jobs,
             const std::vector<std::string>& extensions, const Handler& handler, std::ostream& out,
             std::ostream& err) {
  std::mutex err_lock;
  auto guarded = [&](const fs::path& file) -> Outcome {
    try {
      return handler(file);
    } catch (const Error& e) {
      std::lock_guard lock(err_lock);
      err << file.string() << ": " << to_string(e.kind()) << ": " << e.what() << "\n";
      return {Json(), exit_code(e.kind())};
    }
  };

  if (!fs::is_directory(input)) {
    if (!fs::exists(input)) {
      err << "no such file: " << input.string() << "\n";
      return kInputError;
    }
    auto result = guarded(input);
    if (!result.json.is_null()) {
      try {
        if (output) {
          write_json(*output, result.json);
        } else {
          out << result.json.dump(2) << "\n";
        }
      } catch (const Error& e) {
        err << e.what() << "\n";
        return kInputError;
      }
    }
    return result.code;
  }

  if (!output) {
    err << "a directory input needs -o <directory>\n";
    return kInputError;
  }
  fs::create_directories(*output);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(input)) {
    const auto ext = entry.path().extension().string();
    if (entry.is_regular_file() && std::find(extensions.begin(), extensions.end(), ext) != extensions.end()) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::atomic<std::size_t> next{0};
  std::atomic<int> worst{kOk};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      auto result = guarded(files[i]);
      if (!result.json.is_null()) {
        try {
          write_json(*output / (files[i].stem().string() + ".out.json"), result.json);
        } catch (const Error& e) {
          std::lock_guard lock(err_lock);
          err << e.what() << "\n";
          result.code = std::max(result.code, static_cast<int>(kInputError));
        }
      }
      int seen = worst.load();
      while (result.code > seen && !worst.compare_exchange_weak(seen, result.code)) {
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::max(1, jobs); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return worst.load();
}

Outcome solve_assignment(const fs::path& file, const std::vector<long>& alpha_in, long delta,
                         const std::string& objective_name) {
  const auto doc = read_document(file);
  const auto& u = require_utilities(doc, "solve assignment");
  FairObjective objective = objective_name == "proportional" ? FairObjective::proportional()
                                                              : FairObjective::utilitarian();
  const auto alpha = spread(alpha_in, doc.instance.num_dimensions());
  auto r = approx_fair_allocation(doc.instance, u, objective, alpha, delta);
  const Instance inst = as_assignment(doc.instance);
  Json j;
  j["pipeline"] = "assignment";
  j["parameters"] = {{"alpha", alpha}, {"delta", delta}, {"objective", objective_name}};
  j["fractional"] = allocation_to_json(inst, r.vertex);
  j["allocation"] = allocation_to_json(inst, r.rounded);
  j["budget"] = budget_to_json(r.budget);
  j["certificate"] = certificate_to_json(inst, r.certificate);
  j["trace"] = trace_to_json(r.certificate.trace);
  j["groupUtilitiesBefore"] = rationals(r.utilities_before);
  j["groupUtilitiesAfter"] = rationals(r.utilities_after);
  j["excess"] = rationals(r.excess);
  j["totalExcess"] = rational_to_json(r.total_excess);
  j["deltaPlus"] = r.delta_plus;
  j["violations"] = r.violations;
  return {j, code_for(r.violations)};
}

Outcome solve_envyfree(const fs::path& file, const std::vector<long>& alpha_in, long delta) {
  const auto doc = read_document(file);
  HomogeneousInstance h(doc.instance, require_utilities(doc, "solve envyfree"));
  const auto alpha = spread(alpha_in, doc.instance.num_dimensions());
  auto greedy = greedy_fractional_ef(h);
  for (std::size_t a = 0; a < doc.instance.num_agents(); ++a) {
    if (greedy.allocation.agent_total(a) != 1) {
      fail(ErrorKind::Infeasible, "capacity runs out before agent '" + doc.instance.agent(a).id +
                                      "' is fully served");
    }
  }
  auto r = ef_round(h, greedy.allocation, alpha, delta);
  Json j;
  j["pipeline"] = "envyfree";
  j["parameters"] = {{"alpha", alpha}, {"delta", delta}};
  j["fractional"] = allocation_to_json(h.instance(), greedy.allocation);
  j["allocation"] = allocation_to_json(h.instance(), r.rounded);
  j["certificate"] = envy_report_json(h.instance(), r.report);
  j["trace"] = trace_to_json(r.trace);
  j["violations"] = r.report.violations;
  return {j, code_for(r.report.violations)};
}

Outcome solve_couples(const fs::path& file, const std::vector<long>& alpha_in, long delta) {
  const auto doc = read_document(file);
  const auto ci = couples_instance(doc);
  const auto alpha = spread(alpha_in, doc.instance.num_dimensions());
  auto r = fair_stable_allocation(ci, require_utilities(doc, "solve couples"),
                                  FairObjective::utilitarian(), alpha, delta);
  const Instance& inst = ci.instance();
  Json blocks = Json::array();
  for (const auto& w : r.blocks.witnesses) {
    blocks.push_back({{"agent", inst.agent(w.agent).id},
                      {"bundle", bundle_to_json(inst, w.bundle)},
                      {"condition", w.condition}});
  }
  Json j;
  j["pipeline"] = "couples";
  j["parameters"] = {{"alpha", alpha}, {"delta", delta}};
  j["fractional"] = allocation_to_json(inst, r.vertex);
  j["allocation"] = allocation_to_json(inst, r.rounded);
  j["budget"] = budget_to_json(r.budget);
  j["certificate"] = certificate_to_json(inst, r.certificate);
  j["trace"] = trace_to_json(r.certificate.trace);
  j["blocking"] = blocks;
  j["excess"] = rationals(r.excess);
  j["totalExcess"] = rational_to_json(r.total_excess);
  j["violations"] = r.violations;
  return {j, code_for(r.violations)};
}

Outcome apportion(const fs::path& file, const std::string& method_name, const std::vector<long>& alpha_in,
                  std::optional<long> house) {
  MAInstance ma;
  if (file.extension() == ".csv") {
    if (!house) fail(ErrorKind::Schema, "CSV vote tables need --house");
    std::ifstream in(file);
    std::stringstream buffer;
    buffer << in.rdbuf();
    ma = ma_from_csv(buffer.str(), *house);
  } else {
    auto doc = read_document(file);
    if (!doc.apportionment) fail(ErrorKind::Schema, "instance has no 'apportionment' block");
    ma = *doc.apportionment;
    if (house) ma.house = *house;
  }
  const auto method = SignpostMethod::parse(method_name);
  const auto alpha = spread(alpha_in, ma.dimensions.size());
  auto r = approx_apportionment(ma, method, alpha);

  Json seats = Json::array();
  for (std::size_t e = 0; e < ma.votes.size(); ++e) {
    Json tuple = Json::array();
    for (std::size_t l = 0; l < ma.dimensions.size(); ++l) tuple.push_back(ma.dimensions[l].groups[ma.votes[e].tuple[l]]);
    seats.push_back({{"tuple", tuple},
                     {"votes", ma.votes[e].votes},
                     {"fractional", rational_to_json(r.fractional.seats[e])},
                     {"seats", r.seats[e]}});
  }
  Json groups = Json::array();
  for (std::size_t l = 0; l < ma.dimensions.size(); ++l) {
    for (std::size_t i = 0; i < ma.num_groups(l); ++i) {
      groups.push_back({{"dimension", ma.dimensions[l].name},
                        {"group", ma.dimensions[l].groups[i]},
                        {"lower", ma.dimensions[l].lower[i]},
                        {"upper", ma.dimensions[l].upper[i]},
                        {"seats", r.group_seats[l][i]},
                        {"excess", r.group_excess[l][i]}});
    }
  }
  Json j;
  j["pipeline"] = "apportion";
  j["parameters"] = {{"method", method.name()}, {"alpha", alpha}};
  j["seats"] = seats;
  j["groups"] = groups;
  j["house"] = ma.house;
  j["total"] = r.total;
  j["totalDeviation"] = r.total_deviation;
  j["Delta"] = r.delta;
  j["trace"] = trace_to_json(r.certificate.trace);
  j["violations"] = r.violations;
  return {j, code_for(r.violations)};
}

Json read_allocation_json(const fs::path& path) {
  auto j = read_json(path);
  if (j.is_object() && j.contains("allocation")) return j["allocation"];
  return j;
}

Outcome round_cmd(const fs::path& file, const fs::path& allocation_file, const std::vector<long>& alpha_in,
                  std::optional<long> delta, std::optional<long> total, std::optional<int> psi) {
  const auto doc = read_document(file);
  const auto& u = require_utilities(doc, "round");
  const auto x = allocation_from_json(doc.instance, read_allocation_json(allocation_file));
  const auto problems = allocation_violations(doc.instance, x);
  if (!problems.empty()) fail(ErrorKind::InputNotAllocation, problems.front());

  DeviationBudget budget;
  budget.group = spread(alpha_in, doc.instance.num_dimensions());
  budget.resource = delta;
  budget.agent_rows = psi ? *psi != 0 : agent_rows_forced(doc.instance, x);
  budget.max_demand = std::max(1, doc.instance.max_demand());
  budget.total = total;
  if (!total && check_condition(budget) >= 0 && (budget.agent_rows || check_condition(budget) > 0)) {
    budget.total = min_total_tolerance(budget);
  }
  auto r = iterative_round(doc.instance, x, u, budget);
  Json j;
  j["pipeline"] = "round";
  j["fractional"] = allocation_to_json(doc.instance, x);
  j["allocation"] = allocation_to_json(doc.instance, r.rounded);
  j["budget"] = budget_to_json(budget);
  j["certificate"] = certificate_to_json(doc.instance, r.certificate);
  j["trace"] = trace_to_json(r.certificate.trace);
  j["violations"] = r.certificate.violations;
  return {j, code_for(r.certificate.violations)};
}

DeviationTriple achieved_triple(const Instance& inst, const UtilityModel& u, const Allocation& x,
                                const Allocation& y) {
  DeviationTriple t{0, 0, 0};
  auto abs_value = [](const Rational& v) { return v < 0 ? Rational(-v) : v; };
  for (std::size_t l = 0; l < inst.num_dimensions(); ++l) {
    for (std::size_t i = 0; i < inst.num_groups(l); ++i) {
      const auto best = group_max_utility(inst, u, l, i);
      if (best == 0) continue;
      t.group = std::max(t.group, abs_value(group_utility(inst, u, y, l, i) - group_utility(inst, u, x, l, i)) / best);
    }
  }
  for (std::size_t r = 0; r < inst.num_resources(); ++r) {
    t.resource = std::max(t.resource, abs_value(y.resource_load(r) - x.resource_load(r)));
  }
  t.total = abs_value(y.weighted_total(inst) - x.weighted_total(inst));
  return t;
}

Outcome check_cmd(const fs::path& file, const fs::path& solution_file, bool oracle) {
  const auto doc = read_document(file);
  const auto solution = read_json(solution_file);
  const std::string pipeline = solution.value("pipeline", "round");
  Instance inst = doc.instance;
  if (pipeline == "assignment") inst = as_assignment(doc.instance);
  if (pipeline == "couples") inst = couples_instance(doc).instance();
  if (pipeline == "apportion") fail(ErrorKind::Schema, "apportionment results carry no rounding certificate");

  const auto& u = require_utilities(doc, "check");
  const auto x = allocation_from_json(inst, solution.at("fractional"));
  const auto y = allocation_from_json(inst, solution.at("allocation"));
  Json j;
  j["pipeline"] = pipeline;
  bool ok = false;
  if (pipeline == "envyfree") {
    HomogeneousInstance h(inst, u);
    const auto& params = solution.at("parameters");
    std::vector<long> alpha = params.at("alpha").get<std::vector<long>>();
    auto report = check_ef_deviation(h, y, alpha, params.at("delta").get<long>());
    j["certificate"] = envy_report_json(inst, report);
    ok = report.ok();
  } else {
    const auto budget = budget_from_json(solution.at("budget"));
    auto cert = verify_approximation(inst, x, y, u, budget);
    j["certificate"] = certificate_to_json(inst, cert);
    ok = cert.ok();
  }
  if (solution.contains("certificate")) {
    const bool same = solution["certificate"].dump() == j["certificate"].dump();
    j["reproduces"] = same;
    ok = ok && same;
  }
  if (oracle) {
    const auto achieved = achieved_triple(inst, u, x, y);
    auto frontier = best_deviation(inst, x, u);
    Json list = Json::array();
    bool consistent = false;
    for (const auto& t : frontier) {
      list.push_back({{"group", rational_to_json(t.group)},
                      {"resource", rational_to_json(t.resource)},
                      {"total", rational_to_json(t.total)}});
      consistent = consistent || (t.group <= achieved.group && t.resource <= achieved.resource &&
                                  t.total <= achieved.total);
    }
    j["oracle"] = {{"achieved",
                    {{"group", rational_to_json(achieved.group)},
                     {"resource", rational_to_json(achieved.resource)},
                     {"total", rational_to_json(achieved.total)}}},
                   {"frontier", list},
                   {"consistent", consistent}};
    ok = ok && consistent;
  }
  j["ok"] = ok;
  return {j, ok ? kOk : kBudget};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Near-feasible fair allocation by iterative LP rounding", "fairround"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "fairround 0.1.0");

  std::string input;
  std::optional<std::string> output;
  int jobs = 1;
  std::vector<long> alpha;
  long delta = 0;
  int exit = kOk;

  auto add_io = [&](CLI::App* cmd, const char* what) {
    cmd->add_option("input", input, what)->required();
    cmd->add_option("-o,--output", output, "Write JSON here instead of standard output");
    cmd->add_option("--jobs", jobs, "Worker threads for directory inputs")->check(CLI::PositiveNumber);
  };

  // solve
  auto* solve = app.add_subcommand("solve", "Run a fairness pipeline");
  solve->require_subcommand(1);
  std::string objective = "utilitarian";
  auto* assignment = solve->add_subcommand("assignment", "Group-fair assignment");
  add_io(assignment, "Instance file or directory");
  assignment->add_option("--alpha", alpha, "Group tolerance per dimension (one value is broadcast)")
      ->required()->delimiter(',');
  assignment->add_option("--delta", delta, "Per-resource tolerance")->required();
  assignment->add_option("--objective", objective, "Concave objective")
      ->check(CLI::IsMember({"utilitarian", "proportional"}));
  auto* envy = solve->add_subcommand("envyfree", "Envy-free allocation for group-homogeneous instances");
  add_io(envy, "Instance file or directory");
  envy->add_option("--alpha", alpha, "Envy tolerance per dimension")->required()->delimiter(',');
  envy->add_option("--delta", delta, "Per-resource tolerance")->required();
  auto* couples = solve->add_subcommand("couples", "Stable matching with couples");
  add_io(couples, "Instance file or directory");
  couples->add_option("--alpha", alpha, "Group tolerance per dimension")->delimiter(',');
  couples->add_option("--delta", delta, "Per-resource tolerance")->required();

  // apportion
  auto* app_cmd = app.add_subcommand("apportion", "Multidimensional apportionment");
  add_io(app_cmd, "Instance JSON, CSV vote table, or a directory of them");
  std::string method = "webster";
  std::optional<long> house;
  app_cmd->add_option("--method", method, "Divisor method")
      ->check(CLI::IsMember({"adams", "webster", "jefferson"}));
  app_cmd->add_option("--alpha", alpha, "Seat tolerance per dimension")->required()->delimiter(',');
  app_cmd->add_option("--house", house, "House size (required for CSV input)");

  // round
  auto* round = app.add_subcommand("round", "Round a fractional allocation");
  add_io(round, "Instance file");
  std::string allocation_file;
  std::optional<long> round_delta, round_total;
  std::optional<int> psi;
  round->add_option("--allocation", allocation_file, "Fractional allocation JSON")->required();
  round->add_option("--alpha", alpha, "Group tolerance per dimension")->required()->delimiter(',');
  round->add_option("--delta", round_delta, "Per-resource tolerance (omit for none)");
  round->add_option("--Delta", round_total, "Total tolerance (default: smallest admissible)");
  round->add_option("--psi", psi, "Keep agent rows (0 or 1; default: forced value)");

  // check
  auto* check = app.add_subcommand("check", "Re-verify a solution file");
  add_io(check, "Instance file");
  std::string solution_file;
  bool use_oracle = false;
  check->add_option("--solution", solution_file, "Solution JSON from solve or round")->required();
  check->add_flag("--oracle", use_oracle, "Also compare with the exhaustive rounding frontier");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate instances");
  gen->require_subcommand(1);
  auto* lower = gen->add_subcommand("lowerbound", "Lower-bound instances");
  std::string kind;
  int n = 0;
  lower->add_option("--kind", kind, "capacity or utility-cycle")
      ->required()->check(CLI::IsMember({"capacity", "utility-cycle"}));
  lower->add_option("-n", n, "Instance size")->required();
  lower->add_option("-o,--output", output, "Write JSON here instead of standard output");

  // budget
  auto* budget = app.add_subcommand("budget", "Evaluate the rounding condition");
  std::optional<long> budget_delta, budget_total;
  int omega = 1;
  int budget_psi = 0;
  bool assignment_form = false;
  std::optional<std::string> budget_instance;
  budget->add_option("--alpha", alpha, "Group tolerances")->delimiter(',');
  budget->add_option("--delta", budget_delta, "Per-resource tolerance (omit for none)");
  budget->add_option("--Delta", budget_total, "Total tolerance to test");
  budget->add_option("--omega", omega, "Largest demand")->check(CLI::PositiveNumber);
  budget->add_option("--psi", budget_psi, "Agent rows (0 or 1)")->check(CLI::Range(0, 1));
  budget->add_flag("--assignment", assignment_form, "Use the assignment-pipeline condition");
  budget->add_option("--instance", budget_instance, "Instance for the capacity-excess bound");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  const auto in = fs::path(input);
  const auto dest = output ? std::optional<fs::path>(*output) : std::nullopt;
  const std::vector<std::string> json_ext = {".json"};

  try {
    if (assignment->parsed()) {
      exit = dispatch(in, dest, jobs, json_ext,
                      [&](const fs::path& f) { return solve_assignment(f, alpha, delta, objective); }, out, err);
    } else if (envy->parsed()) {
      exit = dispatch(in, dest, jobs, json_ext, [&](const fs::path& f) { return solve_envyfree(f, alpha, delta); },
                      out, err);
    } else if (couples->parsed()) {
      exit = dispatch(in, dest, jobs, json_ext, [&](const fs::path& f) { return solve_couples(f, alpha, delta); },
                      out, err);
    } else if (app_cmd->parsed()) {
      exit = dispatch(in, dest, jobs, {".json", ".csv"},
                      [&](const fs::path& f) { return apportion(f, method, alpha, house); }, out, err);
    } else if (round->parsed()) {
      exit = dispatch(in, dest, 1, json_ext,
                      [&](const fs::path& f) {
                        return round_cmd(f, allocation_file, alpha, round_delta, round_total, psi);
                      },
                      out, err);
    } else if (check->parsed()) {
      exit = dispatch(in, dest, 1, json_ext,
                      [&](const fs::path& f) { return check_cmd(f, solution_file, use_oracle); }, out, err);
    } else if (lower->parsed()) {
      auto g = gen_lower_bound_instance(kind == "capacity" ? LowerBoundKind::Capacity : LowerBoundKind::UtilityCycle, n);
      const Json j = to_json(Document{g.instance, g.utilities, std::nullopt, std::nullopt});
      if (output) {
        write_json(*output, j);
      } else {
        out << j.dump(2) << "\n";
      }
    } else if (budget->parsed()) {
      Json j;
      Rational slack;
      if (assignment_form) {
        if (!budget_delta) fail(ErrorKind::Schema, "--assignment needs --delta");
        slack = assignment_condition_slack(alpha, *budget_delta, omega);
        j["condition"] = "sum 1/(alpha+1) + omega/(delta+2) <= 1/2";
        j["value"] = rational_to_json(Rational(1, 2) - slack);
        if (budget_instance) {
          const auto doc = read_document(*budget_instance);
          j["deltaPlus"] = delta_plus_bound(as_assignment(doc.instance), *budget_delta);
        }
      } else {
        DeviationBudget b{alpha, budget_delta, budget_total, budget_psi != 0, omega};
        slack = check_condition(b);
        j["condition"] = "psi/2 + sum 1/(alpha+1) + omega/(delta+1) <= 1";
        j["value"] = rational_to_json(condition_value(b));
        if (slack >= 0 && (b.agent_rows || slack > 0)) {
          j["minDelta"] = min_total_tolerance(b);
        } else {
          j["minDelta"] = nullptr;
        }
        if (budget_total) j["DeltaAdmissible"] = total_tolerance_admissible(b);
      }
      j["slack"] = rational_to_json(slack);
      j["pass"] = slack >= 0;
      out << j.dump(2) << "\n";
      exit = slack >= 0 ? kOk : kBudget;
    }
  } catch (const Error& e) {
    err << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code(e.kind());
  }
  return exit;
}

}  // namespace fairround::cli
