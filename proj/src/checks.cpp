#include "mexec/checks.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "mexec/error.hpp"

namespace mexec {

namespace {

constexpr double kPsdSlack = 1e-10;

std::string format(const char* label, double value) {
    std::ostringstream out;
    out.precision(6);
    out << label << " " << value;
    return out.str();
}

CheckResult verdict(std::string name, bool ok, bool hard, std::string detail) {
    return {std::move(name), ok ? CheckStatus::Pass : CheckStatus::Fail, hard, std::move(detail)};
}

CheckResult not_applicable(std::string name, bool hard, std::string detail) {
    return {std::move(name), CheckStatus::NotApplicable, hard, std::move(detail)};
}

template <class Fn>
double min_over(const CoefficientSet& coeffs, Fn&& fn) {
    double out = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < coeffs.half_size(); ++j) out = std::min(out, fn(coeffs.half(j), j));
    return out;
}

}  // namespace

const char* to_string(CheckStatus status) {
    switch (status) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::NotApplicable: return "n/a";
    }
    return "unknown";
}

bool AuditReport::passed() const {
    return std::none_of(checks.begin(), checks.end(),
                        [](const CheckResult& c) { return c.hard && c.status == CheckStatus::Fail; });
}

const CheckResult* AuditReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

AuditReport assumption_audit(const MarketSpec& spec) {
    AuditReport report;
    auto& out = report.checks;
    const int n = spec.assets;
    const bool frame_shaped = spec.frame.rows() == n && spec.frame.cols() == n;
    const double frame_error =
        frame_shaped ? (spec.frame.transpose() * spec.frame - Matrix::Identity(n, n)).cwiseAbs().maxCoeff()
                     : std::numeric_limits<double>::infinity();
    out.push_back(verdict("frame_orthogonal", frame_error <= 1e-12, true, format("max |O^T O - I| =", frame_error)));
    const bool lambda_ok = spec.lambda0.size() == n && (spec.lambda0.array() > 0.0).all();
    out.push_back(verdict("lambda0_positive", lambda_ok, true, lambda_ok ? "" : "lambda0 must be positive"));
    double risk_asym = 0.0;
    const TimeGrid half = spec.grid().refined(2);
    for (std::size_t j = 0; j < half.nodes(); ++j) risk_asym = std::max(risk_asym, asymmetry(spec.risk(half.at(static_cast<int>(j)))));
    out.push_back(verdict("risk_symmetric", risk_asym <= 1e-12, true, format("max |Xi - Xi^T| =", risk_asym)));

    const bool targets = spec.has_targets();
    const bool noise = spec.has_noise();
    out.push_back(verdict("targets_supported", !(noise && targets), true,
                          noise && targets ? "nonzero targets need deterministic impact" : ""));

    std::optional<CoefficientSet> coeffs;
    try {
        coeffs.emplace(derive_coefficients(spec));
        out.push_back(verdict("coefficients_bounded", true, true, ""));
        out.push_back(verdict("coefficients_deterministic", true, true, ""));
    } catch (const Error& e) {
        const bool structural = e.kind() == ErrorKind::UnsupportedScope;
        out.push_back(verdict("coefficients_bounded", structural, true, structural ? "" : e.what()));
        out.push_back(verdict("coefficients_deterministic", !structural, true, structural ? e.what() : ""));
    }
    static const char* dependent[] = {"q_psd",         "r_psd",           "convex_r_pd",     "convex_noise_floor",
                                      "kappa_pd",      "convexity",       "general_targets", "cross_impact_setting"};
    if (!coeffs) {
        for (const char* name : dependent)
            out.push_back(not_applicable(name, std::string(name) == "convexity", "coefficients unavailable"));
        return report;
    }

    bool risk_free = true;
    for (std::size_t j = 0; j < half.nodes(); ++j)
        if (!spec.risk(half.at(static_cast<int>(j))).isZero(0.0)) risk_free = false;
    const double q_min = min_over(*coeffs, [](const CoefficientSample& s, std::size_t) { return min_eigenvalue(s.Q); });
    const double r_min = min_over(*coeffs, [](const CoefficientSample& s, std::size_t) { return min_eigenvalue(s.R); });
    const double kappa_min =
        min_over(*coeffs, [](const CoefficientSample& s, std::size_t) { return min_eigenvalue(s.kappa); });
    const double noise_min =
        min_over(*coeffs, [](const CoefficientSample& s, std::size_t) { return min_eigenvalue(4.0 * s.sum_CC); });
    const bool q_psd = q_min >= -kPsdSlack;
    const bool r_psd = r_min >= -kPsdSlack;
    out.push_back(verdict("q_psd", q_psd, true, format("min eig Q =", q_min)));
    out.push_back(verdict("r_psd", r_psd, true, format("min eig R =", r_min)));

    const bool c1 = risk_free && r_min >= kPositivityFloor;
    const bool c2 = risk_free && r_psd && noise_min >= kPositivityFloor;
    const bool c3 = q_psd && kappa_min >= kPositivityFloor;
    if (risk_free) {
        out.push_back(verdict("convex_r_pd", c1, false, format("min eig R =", r_min)));
        out.push_back(verdict("convex_noise_floor", c2, false, format("min eig 4 sum C C =", noise_min)));
    } else {
        out.push_back(not_applicable("convex_r_pd", false, "risk weight present"));
        out.push_back(not_applicable("convex_noise_floor", false, "risk weight present"));
    }
    out.push_back(verdict("kappa_pd", c3, false, format("min eig kappa =", kappa_min)));
    out.push_back(verdict("convexity", c1 || c2 || c3, true,
                          c1 || c2 || c3 ? "a sufficient convexity condition holds"
                                         : "no sufficient convexity condition holds"));

    if (targets) {
        bool ok = r_min >= kPositivityFloor || noise_min >= kPositivityFloor;
        std::string detail = ok ? "" : "needs R or the noise floor uniformly positive definite";
        try {
            const FPath f = choose_F(*coeffs);
            double qf_min = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < coeffs->half_size(); ++j) {
                const CoefficientSample& s = coeffs->half(j);
                qf_min = std::min(qf_min, min_eigenvalue(s.Q * (Matrix::Identity(n, n) - f[j])));
            }
            if (qf_min < -kPsdSlack) {
                ok = false;
                detail = format("min eig Q (I - F) =", qf_min);
            }
        } catch (const Error& e) {
            ok = false;
            detail = e.what();
        }
        out.push_back(verdict("general_targets", ok, true, detail));
    } else {
        out.push_back(not_applicable("general_targets", true, "zero targets"));
    }

    bool diagonal = risk_free;
    for (std::size_t j = 0; j < half.nodes() && diagonal; ++j) {
        const Matrix s = spec.frame * spec.resilience(half.at(static_cast<int>(j))) * spec.frame.transpose();
        const Matrix off = s - Matrix(s.diagonal().asDiagonal());
        diagonal = off.cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + s.cwiseAbs().maxCoeff());
    }
    if (diagonal) {
        double margin = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < half.nodes(); ++j) {
            const double t = half.at(static_cast<int>(j));
            const Vector rho_tilde = (spec.frame * spec.resilience(t) * spec.frame.transpose()).diagonal();
            const Vector value = 2.0 * rho_tilde + spec.drift(t) - Vector(spec.volatility(t).rowwise().squaredNorm());
            margin = std::min(margin, value.minCoeff());
        }
        out.push_back(verdict("cross_impact_setting", margin > 0.0, false,
                              format("min 2 rho_j + mu_j - |sigma_j|^2 =", margin)));
    } else {
        out.push_back(not_applicable("cross_impact_setting", false, "resilience not diagonal in the impact frame"));
    }
    return report;
}

KappaReport kappa_definiteness(const CoefficientSet& coeffs) {
    KappaReport out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (std::size_t j = 0; j < coeffs.half_size(); ++j) {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(coeffs.half(j).kappa, Eigen::EigenvaluesOnly);
        out.min_eigenvalue = std::min(out.min_eigenvalue, solver.eigenvalues().minCoeff());
        out.max_eigenvalue = std::max(out.max_eigenvalue, solver.eigenvalues().maxCoeff());
    }
    return out;
}

bool conley_criterion(const Matrix& gamma, const Matrix& rho) {
    const auto spread = [](const Matrix& a, const char* name) {
        require(a.rows() == a.cols() && asymmetry(a) <= 1e-12, ErrorKind::Precondition,
                std::string(name) + " must be symmetric");
        Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
        const double lo = solver.eigenvalues().minCoeff();
        require(lo > 0.0, ErrorKind::Precondition, std::string(name) + " must be positive definite");
        return std::sqrt(solver.eigenvalues().maxCoeff() / lo) - 1.0;
    };
    return spread(gamma, "gamma") * spread(rho, "rho") < 2.0;
}

}  // namespace mexec
