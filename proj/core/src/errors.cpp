#include "fairround/errors.hpp"

namespace fairround {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInstance: return "invalid-instance";
    case ErrorKind::Lookup: return "lookup";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::BudgetViolated: return "budget-violated";
    case ErrorKind::ScaleExceeded: return "scale-exceeded";
    case ErrorKind::NotGroupHomogeneous: return "not-group-homogeneous";
    case ErrorKind::MalformedPreferences: return "malformed-preferences";
    case ErrorKind::NoneFound: return "none-found";
    case ErrorKind::InputNotAllocation: return "input-not-allocation";
    case ErrorKind::InvariantFailure: return "invariant-failure";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, std::string(to_string(kind)) + ": " + message);
}

}  // namespace fairround
