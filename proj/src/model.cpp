#include "spectral3/model.hpp"

#include "spectral3/error.hpp"
#include "spectral3/parallel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace spectral3 {

ModelCache::ModelCache(CoefficientPair coeffs, SpectralData model_data, SpectralData data, int big_n,
                       std::vector<ModelSolutions> solutions)
    : coeffs_(std::move(coeffs)),
      model_data_(std::move(model_data)),
      data_(std::move(data)),
      big_n_(big_n),
      solutions_(std::move(solutions)) {
    const std::size_t nodes = grid().nodes();
    eta_.reserve(solutions_.size());
    eta_prime_.reserve(solutions_.size());
    for (std::size_t s = 0; s < solutions_.size(); ++s) {
        const IndexV v = IndexV::from_slot(s);
        const auto [a2, a3] = eta_coefficients(v);
        const auto& sol = solutions_[s];
        std::vector<cplx> e(nodes), ep(nodes);
        for (std::size_t m = 0; m < nodes; ++m) {
            e[m] = a3 * sol.star3.states[m].y;
            ep[m] = a3 * sol.star3.states[m].y1;
            if (a2 != 0.0) {
                e[m] += a2 * sol.star2->states[m].y;
                ep[m] += a2 * sol.star2->states[m].y1;
            }
        }
        eta_.emplace_back(grid(), std::move(e));
        eta_prime_.emplace_back(grid(), std::move(ep));
    }
}

cplx ModelCache::beta(const IndexV& v) const {
    return v.eps == 0 ? data_.at(v.n, v.k).beta : model_data_.at(v.n, v.k).beta;
}

const Trajectory& ModelCache::phi_tilde(const IndexV& v) const {
    const auto& s = solutions_[v.slot()];
    return v.k == 1 ? *s.phi2 : s.phi3;
}

std::pair<cplx, cplx> ModelCache::eta_coefficients(const IndexV& v) const {
    if (k_branch(v)) return {data_.at(v.n, 2).beta, -data_.gamma().at(v.n)};
    if (v.k == 1) return {0.0, -beta(v)};
    return {beta(v), 0.0};
}

CoefficientPair model_coefficients(cplx theta, const Grid& grid, double jitter) {
    auto tau1 = GridFunction::sample(grid, [&](double x) { return theta + jitter * std::cos(2.0 * std::numbers::pi * x); });
    return CoefficientPair(std::move(tau1), GridFunction::constant(grid, 0.0));
}

namespace {

std::string describe(int n, int k, const char* which, cplx value) {
    std::ostringstream os;
    os.precision(12);
    os << which << "_{" << n << "," << k << "} = " << value;
    return os.str();
}

void check_admissibility(const SpectralData& data, const SpectralData& model, const CoefficientPair& coeffs,
                         int big_n, double tol) {
    auto close = [tol](cplx a, cplx b) { return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b))); };

    const cplx model_theta = integrate(coeffs.tau1());
    if (std::abs(model_theta - data.theta()) > 1e-10 * (1.0 + std::abs(data.theta())))
        fail(ErrorKind::AdmissibilityViolation, "condition 1: model integral of tau1 differs from theta");

    for (auto* f : {&coeffs.tau1(), &coeffs.sigma0()})
        for (cplx z : f->values())
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                fail(ErrorKind::AdmissibilityViolation, "condition 2: model coefficients are not finite");

    for (int n = 1; n <= big_n; ++n)
        for (int p = 1; p <= big_n; ++p)
            if (close(model.at(n, 1).lambda, model.at(p, 2).lambda))
                fail(ErrorKind::AdmissibilityViolation,
                     "condition 3: model spectra intersect, " + describe(n, 1, "model lambda", model.at(n, 1).lambda) +
                         " and " + describe(p, 2, "model lambda", model.at(p, 2).lambda));

    for (int n = 1; n <= big_n; ++n)
        for (int k = 1; k <= 2; ++k)
            for (int n0 = 1; n0 <= big_n; ++n0)
                for (int k0 = 1; k0 <= 2; ++k0) {
                    const auto& m = model.at(n, k);
                    const auto& g = data.at(n0, k0);
                    if (!close(m.lambda, g.lambda)) continue;
                    // An entry equal to its model counterpart cancels identically in the main equation.
                    const bool identical = n == n0 && k == k0 && close(m.beta, g.beta) && !data.in_K(n0);
                    if (identical) continue;
                    std::ostringstream os;
                    os << "condition 4: " << describe(n, k, "model lambda", m.lambda) << " collides with "
                       << describe(n0, k0, "lambda", g.lambda) << " (gap " << std::abs(m.lambda - g.lambda)
                       << "); consider --model-jitter";
                    fail(ErrorKind::AdmissibilityViolation, os.str());
                }
}

}  // namespace

ModelCache build_model(const SpectralData& data, const Grid& grid, int big_n, const ModelOptions& opts) {
    return build_model(data, model_coefficients(data.theta(), grid, opts.jitter), big_n, opts);
}

ModelCache build_model(const SpectralData& data, const CoefficientPair& model, int big_n, const ModelOptions& opts) {
    if (big_n < 1 || big_n > data.n_max())
        fail(ErrorKind::InvalidArgument, "truncation N = " + std::to_string(big_n) + " outside 1.." +
                                             std::to_string(data.n_max()));
    for (const auto& [n, g] : data.gamma())
        if (n <= big_n && g == 0.0) fail(ErrorKind::GammaZero, "gamma_" + std::to_string(n) + " vanishes");

    ForwardOptions fopts;
    fopts.newton = opts.newton;
    fopts.threads = opts.threads;
    SpectralData model_data = forward_spectrum(model, big_n, fopts);
    if (!model_data.gamma().empty())
        fail(ErrorKind::AdmissibilityViolation, "condition 3: model problem has coinciding eigenvalues");
    SpectralData truncated = data.truncated(big_n);
    check_admissibility(truncated, model_data, model, big_n, opts.collision_tol);

    const std::size_t count = 4 * static_cast<std::size_t>(big_n);
    std::vector<std::optional<ModelSolutions>> slots(count);
    parallel_for(count, opts.threads, [&](std::size_t s) {
        const IndexV v = IndexV::from_slot(s);
        const cplx lambda = v.eps == 0 ? truncated.at(v.n, v.k).lambda : model_data.at(v.n, v.k).lambda;
        const StepMaps direct = step_maps(model, Variant::Direct, lambda, false);
        const StepMaps star = step_maps(model, Variant::Star, lambda, false);
        slots[s] = ModelSolutions{lambda,
                                  v.k == 1 ? std::optional(weyl_solution(direct, 2)) : std::nullopt,
                                  weyl_solution(direct, 3),
                                  v.k == 2 ? std::optional(weyl_solution(star, 2)) : std::nullopt,
                                  weyl_solution(star, 3)};
    });
    std::vector<ModelSolutions> sols;
    sols.reserve(count);
    for (auto& s : slots) sols.push_back(std::move(*s));

    return ModelCache(model, std::move(model_data), std::move(truncated), big_n, std::move(sols));
}

XiReport xi_sequence(const SpectralData& data, const SpectralData& other, int big_n) {
    if (big_n > data.n_max() || big_n > other.n_max())
        fail(ErrorKind::InvalidArgument, "xi_sequence needs both data sets up to N = " + std::to_string(big_n));
    XiReport r;
    double d2 = 0.0;
    for (int n = 1; n <= big_n; ++n) {
        double xi = 0.0;
        const double dn = n;
        for (int k = 1; k <= 2; ++k) {
            const double dl = std::abs(data.at(n, k).lambda - other.at(n, k).lambda);
            const double db = std::abs(data.at(n, k).beta - other.at(n, k).beta);
            xi += dl / (dn * dn) + db / (dn * dn * dn);
            const double term = dl / dn + db / (dn * dn);
            d2 += term * term;
        }
        r.xi.push_back(xi);
        r.sum_n_xi_sq += (dn * xi) * (dn * xi);
    }
    r.d = std::sqrt(d2);
    return r;
}

double distance_d(const SpectralData& data, const SpectralData& other, int big_n) {
    return xi_sequence(data, other, big_n).d;
}

}  // namespace spectral3
