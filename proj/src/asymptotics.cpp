#include "spectral3/asymptotics.hpp"

#include "spectral3/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spectral3 {

namespace {
constexpr double kPi = std::numbers::pi;
const double kScale = 2.0 * kPi / std::sqrt(3.0);

cplx leading_rho(int n, cplx theta) { return kScale * (n + 1.0 / 6.0 - theta / (2.0 * kPi * kPi * n)); }

double sign_of(int k) { return k == 1 ? 1.0 : -1.0; }
}  // namespace

cplx eigen_guess(int n, int k, cplx theta) {
    if (n < 1 || (k != 1 && k != 2)) fail(ErrorKind::InvalidArgument, "eigen_guess index out of range");
    const cplx r = leading_rho(n, theta);
    return sign_of(k) * r * r * r;
}

cplx beta_guess(int n, int k, cplx theta) { return 3.0 * eigen_guess(n, k, theta); }

double asymptotic_index(cplx lambda, int k, cplx theta) {
    const cplx z = sign_of(k) * lambda;
    // Cube root nearest the positive real axis.
    cplx best = 0.0;
    double best_arg = 10.0;
    const cplx principal = std::pow(z, 1.0 / 3.0);
    for (int j = 0; j < 3; ++j) {
        const cplx r = principal * std::polar(1.0, 2.0 * kPi * j / 3.0);
        if (std::abs(std::arg(r)) < best_arg) {
            best_arg = std::abs(std::arg(r));
            best = r;
        }
    }
    const cplx s = best / kScale - 1.0 / 6.0;
    return (0.5 * (s + std::sqrt(s * s + 2.0 * theta / (kPi * kPi)))).real();
}

cplx rho_branch(cplx lambda, int n, int k, cplx theta) {
    const cplx target = leading_rho(n, theta);
    const cplx principal = std::pow(sign_of(k) * lambda, 1.0 / 3.0);
    cplx best = principal;
    for (int j = 1; j < 3; ++j) {
        const cplx r = principal * std::polar(1.0, 2.0 * kPi * j / 3.0);
        if (std::abs(r - target) < std::abs(best - target)) best = r;
    }
    if (std::abs(std::arg(best / target)) > 0.4 * (2.0 * kPi / 3.0))
        fail(ErrorKind::BranchAmbiguity, "cube root for (" + std::to_string(n) + "," + std::to_string(k) +
                                             ") lies far from its asymptotic sector");
    return best;
}

AsymptoticFrame extract_remainders(const SpectralData& data) {
    AsymptoticFrame f;
    f.theta = data.theta();
    f.n_max = data.n_max();
    const std::size_t slots = 2 * static_cast<std::size_t>(f.n_max);
    f.kappa.resize(slots);
    f.kappa1.resize(slots);
    for (const auto& e : data.entries()) {
        const std::size_t s = 2 * static_cast<std::size_t>(e.n - 1) + static_cast<std::size_t>(e.k - 1);
        const cplx rho = rho_branch(e.lambda, e.n, e.k, f.theta);
        f.kappa[s] = static_cast<double>(e.n) *
                     (rho / kScale - static_cast<double>(e.n) - 1.0 / 6.0 + f.theta / (2.0 * kPi * kPi * e.n));
        f.kappa1[s] = static_cast<double>(e.n) * (e.beta / (3.0 * e.lambda) - 1.0);
    }
    const int lo = std::max(1, f.n_max / 2);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int n = lo; n <= f.n_max; ++n) {
        double kn = 0.0;
        for (int k = 1; k <= 2; ++k) {
            kn = std::max(kn, std::abs(f.kappa_at(n, k)));
            f.tail_max_kappa1 = std::max(f.tail_max_kappa1, std::abs(f.kappa1_at(n, k)));
        }
        f.tail_max_kappa = std::max(f.tail_max_kappa, kn);
        if (kn > 0.0) {
            const double x = std::log(static_cast<double>(n)), y = std::log(kn);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++cnt;
        }
    }
    if (cnt >= 2 && cnt * sxx - sx * sx > 0) f.decay_slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    return f;
}

nlohmann::json to_json(const AsymptoticFrame& f) {
    nlohmann::json rows = nlohmann::json::array();
    for (int n = 1; n <= f.n_max; ++n)
        for (int k = 1; k <= 2; ++k)
            rows.push_back({{"n", n}, {"k", k}, {"kappa", complex_to_json(f.kappa_at(n, k))},
                            {"kappa1", complex_to_json(f.kappa1_at(n, k))}});
    return {{"theta", complex_to_json(f.theta)},
            {"remainders", rows},
            {"tail_max_kappa", f.tail_max_kappa},
            {"tail_max_kappa1", f.tail_max_kappa1},
            {"decay_slope", f.decay_slope}};
}

bool ConditionReport::pass() const {
    return std::all_of(clauses.begin(), clauses.end(), [](const ClauseResult& c) { return c.pass || !c.blocking; });
}

const ClauseResult& ConditionReport::clause(const std::string& name) const {
    for (const auto& c : clauses)
        if (c.clause == name) return c;
    fail(ErrorKind::InvalidArgument, "no clause named " + name);
}

nlohmann::json ConditionReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : clauses)
        arr.push_back({{"clause", c.clause}, {"pass", c.pass}, {"blocking", c.blocking}, {"detail", c.detail},
                       {"offenders", c.offenders}});
    return {{"pass", pass()}, {"clauses", arr}};
}

ConditionReport validate_condition1(const SpectralData& data, double tol) {
    ConditionReport report;
    const int N = data.n_max();
    auto close = [tol](cplx a, cplx b) { return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b))); };

    ClauseResult distinct{"distinct_eigenvalues", true, true,
                          "lambda_{n,k} != lambda_{p,j} for n != p", {}};
    for (int n = 1; n <= N; ++n)
        for (int p = n + 1; p <= N; ++p)
            for (int k = 1; k <= 2; ++k)
                for (int j = 1; j <= 2; ++j)
                    if (close(data.at(n, k).lambda, data.at(p, j).lambda)) {
                        distinct.pass = false;
                        distinct.offenders.push_back({n, k, p, j});
                    }
    report.clauses.push_back(distinct);

    ClauseResult pairing{"pairing", true, true, "lambda_{n,1} = lambda_{n,2} exactly when n is in K", {}};
    ClauseResult weights{"weights_vanish_on_K", true, true, "beta_{n,1} beta_{n,2} = 0 exactly when n is in K", {}};
    ClauseResult gamma{"gamma_nonzero", true, true, "gamma_n != 0 for n in K", {}};
    for (int n = 1; n <= N; ++n) {
        const bool coincide = close(data.at(n, 1).lambda, data.at(n, 2).lambda);
        if (coincide != data.in_K(n)) {
            pairing.pass = false;
            pairing.offenders.push_back({n});
        }
        const bool vanishes = data.at(n, 1).beta * data.at(n, 2).beta == 0.0;
        if (vanishes != data.in_K(n)) {
            weights.pass = false;
            weights.offenders.push_back({n});
        }
        if (data.in_K(n) && data.gamma().at(n) == 0.0) {
            gamma.pass = false;
            gamma.offenders.push_back({n});
        }
    }
    report.clauses.push_back(pairing);
    report.clauses.push_back(weights);
    report.clauses.push_back(gamma);

    ClauseResult decay{"remainder_decay", true, false, "", {}};
    try {
        const AsymptoticFrame f = extract_remainders(data);
        decay.pass = f.tail_max_kappa <= 1.0 && f.tail_max_kappa1 <= 1.0;
        decay.detail = "tail max |kappa| = " + std::to_string(f.tail_max_kappa) +
                       ", tail max |kappa1| = " + std::to_string(f.tail_max_kappa1);
    } catch (const SpectralError& ex) {
        decay.pass = false;
        decay.detail = ex.what();
    }
    report.clauses.push_back(decay);
    return report;
}

}  // namespace spectral3
