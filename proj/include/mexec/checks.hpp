#pragma once

#include <string>
#include <vector>

#include "mexec/model.hpp"

namespace mexec {

enum class CheckStatus { Pass, Fail, NotApplicable };

const char* to_string(CheckStatus status);

struct CheckResult {
    std::string name;
    CheckStatus status;
    bool hard;  // a hard failure refuses to solve
    std::string detail;
};

struct AuditReport {
    std::vector<CheckResult> checks;

    bool passed() const;
    const CheckResult* find(const std::string& name) const;
};

/// Grid-sampled proxies for the standing assumptions and the sufficient convexity conditions.
AuditReport assumption_audit(const MarketSpec& spec);

struct KappaReport {
    double min_eigenvalue;
    double max_eigenvalue;

    bool positive_definite() const { return min_eigenvalue >= kPositivityFloor; }
    bool indefinite() const { return min_eigenvalue < 0.0 && max_eigenvalue > 0.0; }
};

KappaReport kappa_definiteness(const CoefficientSet& coeffs);

/// (sqrt(cond gamma) - 1)(sqrt(cond rho) - 1) < 2 for symmetric positive definite gamma and rho.
bool conley_criterion(const Matrix& gamma, const Matrix& rho);

}  // namespace mexec
