#include "spectral3/selfadjoint.hpp"

#include "spectral3/error.hpp"

#include <algorithm>
#include <cmath>

namespace spectral3 {

SpectralData complete(const HalfData& half) {
    SpectralData data(half.theta, half.n_max());
    for (const HalfEntry& e : half.entries) {
        const bool k = half.in_K(e.n);
        data.at(e.n, 1).lambda = e.lambda;
        data.at(e.n, 2).lambda = -std::conj(e.lambda);
        data.at(e.n, 1).beta = k ? cplx{} : e.beta;
        data.at(e.n, 2).beta = k ? cplx{} : -std::conj(e.beta);
    }
    for (auto [n, g] : half.gammas) data.set_gamma(n, g);
    return data;
}

HalfData restrict(const SpectralData& data) {
    HalfData half;
    half.theta = data.theta().real();
    for (int n = 1; n <= data.n_max(); ++n) {
        const auto& d = data.at(n, 1);
        half.entries.push_back({n, d.lambda, data.in_K(n) ? cplx{} : d.beta});
    }
    for (auto [n, g] : data.gamma()) half.gammas[n] = g.real();
    return half;
}

ConditionReport check_suff_conditions(const HalfData& half, double tol) {
    ConditionReport report;
    auto close = [tol](cplx a, cplx b) { return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b))); };

    ClauseResult asym{"asymptotics", true, true, "", {}};
    try {
        const AsymptoticFrame f = extract_remainders(complete(half));
        double tail = 0.0;
        for (int n = std::max(1, half.n_max() / 2); n <= half.n_max(); ++n)
            tail = std::max({tail, std::abs(f.kappa_at(n, 1)), std::abs(f.kappa1_at(n, 1))});
        asym.pass = tail <= 1.0;
        asym.detail = "tail max remainder (k = 1) = " + std::to_string(tail);
    } catch (const SpectralError& ex) {
        asym.pass = false;
        asym.detail = ex.what();
    }
    report.clauses.push_back(asym);

    ClauseResult distinct{"distinct_eigenvalues", true, true,
                          "lambda_n != lambda_p and lambda_n != -conj(lambda_p) for n != p", {}};
    ClauseResult cross{"cross_paired_K", true, true, "lambda_n = -conj(lambda_p) with n != p is not supported", {}};
    for (const auto& a : half.entries)
        for (const auto& b : half.entries) {
            if (b.n <= a.n) continue;
            if (close(a.lambda, b.lambda)) {
                distinct.pass = false;
                distinct.offenders.push_back({a.n, b.n});
            }
            if (close(a.lambda, -std::conj(b.lambda))) {
                distinct.pass = false;
                cross.pass = false;
                distinct.offenders.push_back({a.n, b.n});
                cross.offenders.push_back({a.n, b.n});
            }
        }
    report.clauses.push_back(distinct);
    report.clauses.push_back(cross);

    ClauseResult weights{"beta_nonzero", true, true, "beta_n != 0 for n outside K", {}};
    ClauseResult right{"re_lambda_nonnegative", true, true, "Re lambda_n >= 0", {}};
    ClauseResult k_axis{"K_on_imaginary_axis", true, true, "lambda_n = -conj(lambda_n) exactly when n is in K", {}};
    ClauseResult gamma{"gamma_positive", true, true, "gamma_n > 0 for n in K", {}};
    for (const auto& e : half.entries) {
        const bool k = half.in_K(e.n);
        if (!k && e.beta == 0.0) {
            weights.pass = false;
            weights.offenders.push_back({e.n});
        }
        if (e.lambda.real() < -tol * (1.0 + std::abs(e.lambda))) {
            right.pass = false;
            right.offenders.push_back({e.n});
        }
        if (close(e.lambda, -std::conj(e.lambda)) != k) {
            k_axis.pass = false;
            k_axis.offenders.push_back({e.n});
        }
    }
    for (auto [n, g] : half.gammas)
        if (!(g > 0.0) || n < 1 || n > half.n_max()) {
            gamma.pass = false;
            gamma.offenders.push_back({n});
        }
    for (auto* c : {&weights, &right, &k_axis, &gamma}) {
        if (!c->pass) {
            std::string ns;
            for (const auto& o : c->offenders) ns += (ns.empty() ? "" : ", ") + std::to_string(o[0]);
            c->detail += "; failing n = " + ns;
        }
        report.clauses.push_back(*c);
    }
    return report;
}

nlohmann::json SymmetryReport::to_json() const {
    return {{"pass", pass()},
            {"max_violation", max_violation},
            {"tolerance", tolerance},
            {"worst_n", worst_n},
            {"worst_field", worst_field}};
}

SymmetryReport check_symmetry(const SpectralData& data, double tol) {
    SymmetryReport r;
    r.tolerance = tol;
    auto record = [&r](double v, int n, const char* field) {
        if (v > r.max_violation) {
            r.max_violation = v;
            r.worst_n = n;
            r.worst_field = field;
        }
    };
    auto rel = [](cplx a, cplx b) { return std::abs(a - b) / (1.0 + std::max(std::abs(a), std::abs(b))); };
    record(std::abs(data.theta().imag()), 0, "theta");
    for (int n = 1; n <= data.n_max(); ++n) {
        const auto& d1 = data.at(n, 1);
        const auto& d2 = data.at(n, 2);
        record(rel(d1.lambda, -std::conj(d2.lambda)), n, "lambda");
        record(rel(d1.beta, -std::conj(d2.beta)), n, "beta");
    }
    for (auto [n, g] : data.gamma()) record(std::abs(g.imag()) / (1.0 + std::abs(g)), n, "gamma");
    return r;
}

nlohmann::json to_json(const HalfData& half) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : half.entries) {
        nlohmann::json j{{"n", e.n}, {"lambda", complex_to_json(e.lambda)}};
        if (!half.in_K(e.n)) j["beta"] = complex_to_json(e.beta);
        entries.push_back(std::move(j));
    }
    nlohmann::json k = nlohmann::json::array();
    for (auto [n, g] : half.gammas) k.push_back({{"n", n}, {"gamma", g}});
    return {{"theta", half.theta}, {"entries", std::move(entries)}, {"K", std::move(k)}};
}

HalfData half_data_from_json(const nlohmann::json& j) {
    try {
        HalfData half;
        half.theta = j.at("theta").get<double>();
        for (const auto& k : j.value("K", nlohmann::json::array()))
            half.gammas[k.at("n").get<int>()] = k.at("gamma").get<double>();
        for (const auto& e : j.at("entries")) {
            HalfEntry h;
            h.n = e.at("n").get<int>();
            h.lambda = complex_from_json(e.at("lambda"));
            if (e.contains("beta")) {
                h.beta = complex_from_json(e.at("beta"));
            } else if (!half.in_K(h.n)) {
                fail(ErrorKind::Parse, "entry n = " + std::to_string(h.n) + " has no beta and is not in K");
            }
            half.entries.push_back(h);
        }
        std::ranges::sort(half.entries, {}, &HalfEntry::n);
        for (std::size_t i = 0; i < half.entries.size(); ++i)
            if (half.entries[i].n != static_cast<int>(i) + 1)
                fail(ErrorKind::Parse, "entries must cover n = 1.." + std::to_string(half.entries.size()) +
                                           " exactly once");
        return half;
    } catch (const nlohmann::json::exception& ex) {
        fail(ErrorKind::Parse, std::string("half data: ") + ex.what());
    }
}

HalfData read_half_data(const std::filesystem::path& path) {
    return half_data_from_json(read_json(path));
}

}  // namespace spectral3
