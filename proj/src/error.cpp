#include "mexec/error.hpp"

#include <sstream>

namespace mexec {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NumericDomain: return "numeric-domain";
        case ErrorKind::IllConditionedImpact: return "ill-conditioned-impact";
        case ErrorKind::NoValidF: return "no-valid-F";
        case ErrorKind::Shape: return "shape";
        case ErrorKind::Configuration: return "configuration";
        case ErrorKind::SingularDriver: return "singular-driver";
        case ErrorKind::UnsupportedScope: return "unsupported-scope";
        case ErrorKind::DegenerateInput: return "degenerate-input";
        case ErrorKind::Precondition: return "precondition";
        case ErrorKind::Schema: return "schema";
        case ErrorKind::AuditFailure: return "audit-failure";
    }
    return "unknown";
}

namespace {
std::string describe(ErrorKind kind, const std::string& what, std::optional<double> time) {
    std::ostringstream out;
    out << to_string(kind) << ": " << what;
    if (time) out << " (t = " << *time << ")";
    return out.str();
}
}  // namespace

Error::Error(ErrorKind kind, const std::string& what, std::optional<double> time)
    : std::runtime_error(describe(kind, what, time)), kind_(kind), time_(time) {}

void fail(ErrorKind kind, const std::string& what, std::optional<double> time) { throw Error(kind, what, time); }

}  // namespace mexec
