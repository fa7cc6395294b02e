#include "fairround/io.hpp"

#include "fairround/errors.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace fairround {

namespace {

[[noreturn]] void schema(const std::string& message) { fail(ErrorKind::Schema, message); }

const Json& field(const Json& obj, const char* key) {
  if (!obj.is_object()) schema(std::string("expected an object holding '") + key + "'");
  auto it = obj.find(key);
  if (it == obj.end()) schema(std::string("missing field '") + key + "'");
  return *it;
}

std::string text(const Json& j, const char* what) {
  if (!j.is_string()) schema(std::string(what) + " must be a string");
  return j.get<std::string>();
}

long integer(const Json& j, const char* what) {
  if (j.is_number_float()) schema(std::string(what) + " must be an integer, not a float");
  if (!j.is_number_integer()) schema(std::string(what) + " must be an integer");
  return j.get<long>();
}

long integer_or(const Json& obj, const char* key, long fallback) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : integer(*it, key);
}

bool boolean_or(const Json& obj, const char* key, bool fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) schema(std::string(key) + " must be true or false");
  return it->get<bool>();
}

const Json& array(const Json& j, const char* what) {
  if (!j.is_array()) schema(std::string(what) + " must be an array");
  return j;
}

std::size_t agent_lookup(const Instance& inst, const Json& j) {
  auto id = text(j, "agent id");
  auto a = inst.find_agent(id);
  if (!a) schema("unknown agent '" + id + "'");
  return *a;
}

std::size_t resource_lookup(const Instance& inst, const std::string& id) {
  auto r = inst.find_resource(id);
  if (!r) schema("unknown resource '" + id + "'");
  return *r;
}

std::optional<long> optional_integer(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return integer(*it, key);
}

Json optional_to_json(const std::optional<long>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Rational rational_from_json(const Json& j) {
  if (j.is_number_float()) schema("floating-point numbers are not accepted; write \"p/q\"");
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  schema("expected a rational as an integer or a \"p/q\" string");
}

Json rational_to_json(const Rational& value) { return to_string(value); }

Json bundle_to_json(const Instance& instance, const Bundle& bundle) {
  Json out = Json::array();
  for (std::size_t r = 0; r < bundle.num_resources(); ++r) {
    if (bundle[r] > 0) out.push_back(instance.resource(r).id + ":" + std::to_string(bundle[r]));
  }
  return out;
}

Bundle bundle_from_json(const Instance& instance, const Json& j) {
  std::vector<int> counts(instance.num_resources(), 0);
  for (const auto& item : array(j, "bundle")) {
    const auto label = text(item, "bundle entry");
    const auto colon = label.rfind(':');
    int count = 1;
    std::string id = label;
    if (colon != std::string::npos) {
      id = label.substr(0, colon);
      const auto digits = label.substr(colon + 1);
      if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) {
        schema("bad multiplicity in bundle entry '" + label + "'");
      }
      count = std::stoi(digits);
    }
    counts[resource_lookup(instance, id)] += count;
  }
  return Bundle(std::move(counts));
}

Document parse_document(const Json& json) {
  if (!json.is_object()) schema("instance file must hold a JSON object");
  Document doc;

  std::vector<ResourceSpec> resources;
  if (json.contains("resources")) {
    for (const auto& r : array(json["resources"], "resources")) {
      resources.push_back({text(field(r, "id"), "resource id"), integer(field(r, "capacity"), "capacity")});
    }
  }

  // Dimension and group order: the explicit list first, then first appearance.
  std::vector<Dimension> dims;
  std::map<std::string, std::size_t> dim_index;
  auto group_slot = [&](const std::string& dim, const std::string& group) {
    auto [it, fresh] = dim_index.emplace(dim, dims.size());
    if (fresh) dims.push_back({dim, {}});
    auto& groups = dims[it->second].groups;
    auto g = std::find_if(groups.begin(), groups.end(), [&](const Group& x) { return x.name == group; });
    if (g == groups.end()) {
      groups.push_back({group, {}});
      return std::pair{it->second, groups.size() - 1};
    }
    return std::pair{it->second, static_cast<std::size_t>(g - groups.begin())};
  };
  if (json.contains("dimensions")) {
    for (const auto& d : array(json["dimensions"], "dimensions")) {
      const auto name = text(field(d, "name"), "dimension name");
      if (dim_index.count(name)) schema("dimension '" + name + "' listed twice");
      dim_index.emplace(name, dims.size());
      dims.push_back({name, {}});
      for (const auto& g : array(field(d, "groups"), "groups")) group_slot(name, text(g, "group id"));
    }
  }

  std::vector<AgentSpec> agents;
  const Json empty_agents = Json::array();
  const Json& agent_list = json.contains("agents") ? array(json["agents"], "agents") : empty_agents;
  bool any_additive = false, any_explicit = false;
  for (const auto& a : agent_list) {
    AgentSpec spec;
    spec.id = text(field(a, "id"), "agent id");
    spec.demand = static_cast<int>(integer_or(a, "demand", 1));
    spec.binding = boolean_or(a, "binding", false);
    agents.push_back(spec);
    if (a.contains("groups")) {
      if (!a["groups"].is_object()) schema("agent groups must map dimension to group");
      for (const auto& [dim, group] : a["groups"].items()) {
        auto [l, i] = group_slot(dim, text(group, "group id"));
        dims[l].groups[i].members.push_back(agents.size() - 1);
      }
    }
    any_additive = any_additive || a.contains("utilities");
    any_explicit = any_explicit || a.contains("bundleUtilities");
  }

  std::optional<std::vector<std::pair<std::size_t, std::size_t>>> acceptability;
  Instance skeleton(agents, resources, {});
  if (json.contains("acceptability")) {
    acceptability.emplace();
    for (const auto& pair : array(json["acceptability"], "acceptability")) {
      if (!pair.is_array() || pair.size() != 2) schema("acceptability entries are [agent, resource]");
      acceptability->emplace_back(agent_lookup(skeleton, pair[0]),
                                  resource_lookup(skeleton, text(pair[1], "resource id")));
    }
  }
  doc.instance = Instance(agents, resources, dims, acceptability);
  doc.instance.validate();
  const Instance& inst = doc.instance;

  if (any_additive && any_explicit) schema("mixing 'utilities' and 'bundleUtilities' is not supported");
  if (any_additive) {
    std::vector<std::vector<Rational>> table(inst.num_agents(),
                                             std::vector<Rational>(inst.num_resources(), 0));
    for (std::size_t a = 0; a < agent_list.size(); ++a) {
      if (!agent_list[a].contains("utilities")) continue;
      const auto& u = agent_list[a]["utilities"];
      if (!u.is_object()) schema("utilities must map resource to value");
      for (const auto& [rid, value] : u.items()) table[a][resource_lookup(inst, rid)] = rational_from_json(value);
    }
    doc.utilities = UtilityModel::additive(std::move(table));
  } else if (any_explicit) {
    std::vector<std::map<Bundle, Rational>> per(inst.num_agents());
    for (std::size_t a = 0; a < agent_list.size(); ++a) {
      if (!agent_list[a].contains("bundleUtilities")) continue;
      for (const auto& entry : array(agent_list[a]["bundleUtilities"], "bundleUtilities")) {
        per[a][bundle_from_json(inst, field(entry, "bundle"))] = rational_from_json(field(entry, "utility"));
      }
    }
    doc.utilities = UtilityModel::explicit_bundles(std::move(per));
  }
  if (doc.utilities) doc.utilities->validate(inst);

  if (json.contains("preferences")) {
    const auto& p = json["preferences"];
    Preferences prefs;
    prefs.agents.resize(inst.num_agents());
    prefs.resources.resize(inst.num_resources());
    if (p.contains("agents")) {
      for (const auto& [aid, list] : p["agents"].items()) {
        auto a = inst.find_agent(aid);
        if (!a) schema("preferences name unknown agent '" + aid + "'");
        for (const auto& b : array(list, "agent preferences")) prefs.agents[*a].push_back(bundle_from_json(inst, b));
      }
    }
    if (p.contains("resources")) {
      for (const auto& [rid, list] : p["resources"].items()) {
        const auto r = resource_lookup(inst, rid);
        for (const auto& a : array(list, "resource preferences")) prefs.resources[r].push_back(agent_lookup(inst, a));
      }
    }
    doc.preferences = std::move(prefs);
  }

  if (json.contains("apportionment")) doc.apportionment = ma_from_json(json["apportionment"]);
  return doc;
}

Json to_json(const Document& doc) {
  const Instance& inst = doc.instance;
  Json out = Json::object();
  Json dims = Json::array();
  for (const auto& d : inst.dimensions()) {
    Json groups = Json::array();
    for (const auto& g : d.groups) groups.push_back(g.name);
    dims.push_back({{"name", d.name}, {"groups", groups}});
  }
  if (!dims.empty()) out["dimensions"] = dims;

  Json agents = Json::array();
  for (std::size_t a = 0; a < inst.num_agents(); ++a) {
    const auto& spec = inst.agent(a);
    Json j = {{"id", spec.id}, {"demand", spec.demand}, {"binding", spec.binding}};
    Json groups = Json::object();
    for (std::size_t l = 0; l < inst.num_dimensions(); ++l) {
      if (auto g = inst.group_of(a, l)) groups[inst.dimension(l).name] = inst.dimension(l).groups[*g].name;
    }
    if (!groups.empty()) j["groups"] = groups;
    if (doc.utilities && doc.utilities->is_additive()) {
      Json u = Json::object();
      for (std::size_t r = 0; r < inst.num_resources(); ++r) {
        const auto& v = doc.utilities->additive_values()[a][r];
        if (v != 0) u[inst.resource(r).id] = rational_to_json(v);
      }
      j["utilities"] = u;
    } else if (doc.utilities) {
      Json list = Json::array();
      for (const auto& [bundle, value] : doc.utilities->bundle_values()[a]) {
        list.push_back({{"bundle", bundle_to_json(inst, bundle)}, {"utility", rational_to_json(value)}});
      }
      j["bundleUtilities"] = list;
    }
    agents.push_back(j);
  }
  out["agents"] = agents;

  Json resources = Json::array();
  for (const auto& r : inst.resources()) resources.push_back({{"id", r.id}, {"capacity", r.capacity}});
  out["resources"] = resources;

  if (inst.acceptability()) {
    Json pairs = Json::array();
    for (auto [a, r] : *inst.acceptability()) pairs.push_back({inst.agent(a).id, inst.resource(r).id});
    out["acceptability"] = pairs;
  }
  if (doc.preferences) {
    Json agent_prefs = Json::object(), resource_prefs = Json::object();
    for (std::size_t a = 0; a < doc.preferences->agents.size(); ++a) {
      Json list = Json::array();
      for (const auto& b : doc.preferences->agents[a]) list.push_back(bundle_to_json(inst, b));
      agent_prefs[inst.agent(a).id] = list;
    }
    for (std::size_t r = 0; r < doc.preferences->resources.size(); ++r) {
      Json list = Json::array();
      for (auto a : doc.preferences->resources[r]) list.push_back(inst.agent(a).id);
      resource_prefs[inst.resource(r).id] = list;
    }
    out["preferences"] = {{"agents", agent_prefs}, {"resources", resource_prefs}};
  }
  if (doc.apportionment) out["apportionment"] = ma_to_json(*doc.apportionment);
  return out;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) schema("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    schema("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& json) {
  std::ofstream out(path);
  if (!out) schema("cannot write '" + path.string() + "'");
  out << json.dump(2) << "\n";
}

Document read_document(const std::filesystem::path& path) { return parse_document(read_json(path)); }

CouplesInstance couples_instance(const Document& doc) {
  if (!doc.preferences) schema("couples instances need a 'preferences' block");
  return CouplesInstance(doc.instance, doc.preferences->agents, doc.preferences->resources);
}

const UtilityModel& require_utilities(const Document& doc, const std::string& what) {
  if (!doc.utilities) schema(what + " needs agent utilities");
  return *doc.utilities;
}

Json allocation_to_json(const Instance& instance, const Allocation& allocation) {
  Json out = Json::array();
  for (const auto& [key, value] : allocation.entries()) {
    out.push_back({{"agent", instance.agent(key.agent).id},
                   {"bundle", bundle_to_json(instance, key.bundle)},
                   {"value", rational_to_json(value)}});
  }
  return out;
}

Allocation allocation_from_json(const Instance& instance, const Json& json) {
  Allocation out;
  for (const auto& entry : array(json, "allocation")) {
    const auto a = agent_lookup(instance, field(entry, "agent"));
    auto bundle = bundle_from_json(instance, field(entry, "bundle"));
    const auto value = rational_from_json(field(entry, "value"));
    if (value < 0 || value > 1) schema("allocation values must lie in [0, 1]");
    if (out.value(a, bundle) != 0) schema("allocation lists an entry twice");
    out.set(a, std::move(bundle), value);
  }
  return out;
}

Json budget_to_json(const DeviationBudget& budget) {
  return {{"alpha", budget.group},
          {"delta", optional_to_json(budget.resource)},
          {"Delta", optional_to_json(budget.total)},
          {"psi", budget.agent_rows},
          {"maxDemand", budget.max_demand}};
}

DeviationBudget budget_from_json(const Json& json) {
  DeviationBudget b;
  for (const auto& a : array(field(json, "alpha"), "alpha")) b.group.push_back(integer(a, "alpha"));
  b.resource = optional_integer(json, "delta");
  b.total = optional_integer(json, "Delta");
  b.agent_rows = boolean_or(json, "psi", false);
  b.max_demand = static_cast<int>(integer_or(json, "maxDemand", 1));
  return b;
}

Json certificate_to_json(const Instance& instance, const Certificate& cert) {
  Json groups = Json::array();
  for (const auto& g : cert.groups) {
    const auto& dim = instance.dimension(g.dimension);
    groups.push_back({{"dimension", dim.name},
                      {"group", dim.groups[g.group].name},
                      {"before", rational_to_json(g.before)},
                      {"after", rational_to_json(g.after)},
                      {"deviation", rational_to_json(g.deviation)},
                      {"limit", rational_to_json(g.limit)}});
  }
  Json resources = Json::array();
  for (std::size_t r = 0; r < cert.resource_deviation.size(); ++r) {
    resources.push_back({{"resource", instance.resource(r).id},
                         {"deviation", rational_to_json(cert.resource_deviation[r])}});
  }
  return {{"groups", groups},
          {"resources", resources},
          {"totalDeviation", rational_to_json(cert.total_deviation)},
          {"violations", cert.violations},
          {"ok", cert.ok()}};
}

Json trace_to_json(const std::vector<IterationRecord>& trace) {
  Json out = Json::array();
  for (const auto& t : trace) {
    out.push_back({{"support", t.support},
                   {"activeAgents", t.active_agents},
                   {"activeGroups", t.active_groups},
                   {"groupRows", t.group_rows},
                   {"activeResources", t.active_resources},
                   {"totalRow", t.total_row},
                   {"constraints", t.constraint_count},
                   {"slackAgentRows", t.slack_agent_rows},
                   {"pivots", t.pivots}});
  }
  return out;
}

MAInstance ma_from_json(const Json& json) {
  MAInstance out;
  out.house = integer(field(json, "house"), "house");
  for (const auto& d : array(field(json, "dimensions"), "dimensions")) {
    MADimension dim;
    dim.name = text(field(d, "name"), "dimension name");
    for (const auto& g : array(field(d, "groups"), "groups")) {
      dim.groups.push_back(text(field(g, "id"), "group id"));
      dim.lower.push_back(integer_or(g, "lower", 0));
      dim.upper.push_back(integer_or(g, "upper", out.house));
    }
    out.dimensions.push_back(std::move(dim));
  }
  for (const auto& v : array(field(json, "votes"), "votes")) {
    VoteEntry entry;
    const auto& tuple = array(field(v, "tuple"), "tuple");
    if (tuple.size() != out.dimensions.size()) schema("vote tuple length differs from the dimension count");
    for (std::size_t l = 0; l < tuple.size(); ++l) {
      const auto id = text(tuple[l], "group id");
      const auto& groups = out.dimensions[l].groups;
      auto it = std::find(groups.begin(), groups.end(), id);
      if (it == groups.end()) schema("vote tuple names unknown group '" + id + "'");
      entry.tuple.push_back(static_cast<std::size_t>(it - groups.begin()));
    }
    entry.votes = integer(field(v, "votes"), "votes");
    out.votes.push_back(std::move(entry));
  }
  out.validate();
  return out;
}

Json ma_to_json(const MAInstance& instance) {
  Json dims = Json::array();
  for (const auto& d : instance.dimensions) {
    Json groups = Json::array();
    for (std::size_t i = 0; i < d.groups.size(); ++i) {
      groups.push_back({{"id", d.groups[i]}, {"lower", d.lower[i]}, {"upper", d.upper[i]}});
    }
    dims.push_back({{"name", d.name}, {"groups", groups}});
  }
  Json votes = Json::array();
  for (const auto& v : instance.votes) {
    Json tuple = Json::array();
    for (std::size_t l = 0; l < v.tuple.size(); ++l) tuple.push_back(instance.dimensions[l].groups[v.tuple[l]]);
    votes.push_back({{"tuple", tuple}, {"votes", v.votes}});
  }
  return {{"house", instance.house}, {"dimensions", dims}, {"votes", votes}};
}

MAInstance ma_from_csv(std::string_view csv, long house) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return cells;
  };
  std::stringstream in{std::string(csv)};
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(split(line));
  }
  if (rows.size() < 2 || rows[0].size() < 2) schema("vote table needs a header and at least one party");

  MAInstance out;
  out.house = house;
  MADimension parties{"party", {}, {}, {}}, districts{"district", {}, {}, {}};
  for (std::size_t c = 1; c < rows[0].size(); ++c) {
    districts.groups.push_back(rows[0][c]);
    districts.lower.push_back(0);
    districts.upper.push_back(house);
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) schema("row " + std::to_string(r + 1) + " has the wrong width");
    parties.groups.push_back(rows[r][0]);
    parties.lower.push_back(0);
    parties.upper.push_back(house);
    for (std::size_t c = 1; c < rows[r].size(); ++c) {
      const auto& cell = rows[r][c];
      if (cell.empty() || !std::all_of(cell.begin(), cell.end(), ::isdigit)) {
        schema("vote cell '" + cell + "' is not a non-negative integer");
      }
      const long votes = std::stol(cell);
      if (votes > 0) out.votes.push_back({{r - 1, c - 1}, votes});
    }
  }
  out.dimensions = {std::move(parties), std::move(districts)};
  out.validate();
  return out;
}

}  // namespace fairround
