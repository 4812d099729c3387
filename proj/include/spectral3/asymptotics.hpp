#pragma once

#include "spectral3/spectral_data.hpp"

#include <string>
#include <vector>

namespace spectral3 {

// Leading asymptotic eigenvalue (-1)^{k+1} ((2pi/sqrt3)(n + 1/6 - theta/(2 pi^2 n)))^3.
cplx eigen_guess(int n, int k, cplx theta);
cplx beta_guess(int n, int k, cplx theta);

// Inverts the leading asymptotics: the (real) index n whose guess matches lambda.
double asymptotic_index(cplx lambda, int k, cplx theta);

// Cube root of (-1)^{k+1} lambda closest to the leading-order rho of index n.
cplx rho_branch(cplx lambda, int n, int k, cplx theta);

struct AsymptoticFrame {
    cplx theta{};
    int n_max = 0;
    std::vector<cplx> kappa;   // per slot 2(n-1)+(k-1)
    std::vector<cplx> kappa1;  // per slot
    double tail_max_kappa = 0.0;    // max |kappa_n| over n in [N/2, N]
    double tail_max_kappa1 = 0.0;   // same for kappa_{n1}
    double decay_slope = 0.0;       // least-squares slope of log|kappa_n| against log n over the tail

    cplx kappa_at(int n, int k) const { return kappa[2 * (n - 1) + (k - 1)]; }
    cplx kappa1_at(int n, int k) const { return kappa1[2 * (n - 1) + (k - 1)]; }
};

AsymptoticFrame extract_remainders(const SpectralData& data);
nlohmann::json to_json(const AsymptoticFrame& frame);

struct ClauseResult {
    std::string clause;
    bool pass = true;
    bool blocking = true;  // informational clauses never block the inverse solver
    std::string detail;
    std::vector<std::vector<int>> offenders;
};

struct ConditionReport {
    std::vector<ClauseResult> clauses;

    bool pass() const;  // all blocking clauses pass
    const ClauseResult& clause(const std::string& name) const;
    nlohmann::json to_json() const;
};

ConditionReport validate_condition1(const SpectralData& data, double tol = 1e-8);

}  // namespace spectral3
