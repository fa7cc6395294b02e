#pragma once

#include "fairround/apportionment.hpp"
#include "fairround/couples.hpp"
#include "fairround/model.hpp"
#include "fairround/rounding.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fairround {

using Json = nlohmann::ordered_json;

struct Preferences {
  std::vector<std::vector<Bundle>> agents;        // best first
  std::vector<std::vector<std::size_t>> resources;  // agent indices, best first

  bool operator==(const Preferences&) const = default;
};

/// Everything an instance file can carry. Utilities, preferences and the
/// apportionment block are optional.
struct Document {
  Instance instance;
  std::optional<UtilityModel> utilities;
  std::optional<Preferences> preferences;
  std::optional<MAInstance> apportionment;

  bool operator==(const Document&) const = default;
};

/// Throws Schema on malformed input (including JSON floating-point numbers)
/// and InvalidInstance when the parsed instance breaks an invariant.
Document parse_document(const Json& json);
Json to_json(const Document& document);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& json);
Document read_document(const std::filesystem::path& path);

/// Builds the couples view; throws Schema when preferences are missing.
CouplesInstance couples_instance(const Document& document);
/// Utilities or a Schema error naming `what` as the consumer.
const UtilityModel& require_utilities(const Document& document, const std::string& what);

/// Exact rational from a JSON integer or a "p/q" / decimal string.
Rational rational_from_json(const Json& json);
Json rational_to_json(const Rational& value);

/// "r1:2" style labels, sorted by resource index.
Json bundle_to_json(const Instance& instance, const Bundle& bundle);
Bundle bundle_from_json(const Instance& instance, const Json& json);

/// Sparse list of {agent, bundle, value}.
Json allocation_to_json(const Instance& instance, const Allocation& allocation);
Allocation allocation_from_json(const Instance& instance, const Json& json);

Json budget_to_json(const DeviationBudget& budget);
DeviationBudget budget_from_json(const Json& json);

/// Deviation part of a certificate; identical for equal inputs.
Json certificate_to_json(const Instance& instance, const Certificate& certificate);
/// Per-iteration counts.
Json trace_to_json(const std::vector<IterationRecord>& trace);

MAInstance ma_from_json(const Json& json);
Json ma_to_json(const MAInstance& instance);

/// Party-by-district vote table: a header row "party,<district>,...", then one
/// row per party with integer votes (0 leaves the cell out). Bounds are loose
/// (0 to the house size).
MAInstance ma_from_csv(std::string_view text, long house);

}  // namespace fairround
