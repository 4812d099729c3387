#include "spectral3/inverse.hpp"

#include "spectral3/asymptotics.hpp"
#include "spectral3/error.hpp"
#include "spectral3/parallel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace spectral3 {

namespace {

bool near_pair(cplx lambda, cplx mu) {
    return std::abs(lambda - mu) <= kNearPairThreshold * (1.0 + std::max(std::abs(lambda), std::abs(mu)));
}

cplx bracket_at(const StateVector& z, const StateVector& y) { return z.y2 * y.y - z.y1 * y.y1 + z.y * y.y2; }

}  // namespace

GridFunction lagrange_bracket(const Trajectory& zstar, const Trajectory& y) {
    std::vector<cplx> out(zstar.states.size());
    for (std::size_t m = 0; m < out.size(); ++m) out[m] = bracket_at(zstar.states[m], y.states[m]);
    return GridFunction(zstar.grid, std::move(out));
}

GridFunction kernel_D(const Trajectory& zstar, const Trajectory& y, KernelForm form, bool regularized) {
    const cplx lambda = zstar.lambda, mu = y.lambda;
    const bool near = near_pair(lambda, mu);
    if (form == KernelForm::Auto) form = near ? KernelForm::Integral : KernelForm::Bracket;
    const cplx c0 = bracket_at(zstar.states.front(), y.states.front());
    // At a coincident pair the pole term is the principal part; regularization keeps only the rest.
    const bool drop_pole = regularized && near;

    if (form == KernelForm::Bracket) {
        if (lambda == mu) fail(ErrorKind::PoleHit, "bracket form of the kernel at lambda = mu");
        GridFunction b = lagrange_bracket(zstar, y);
        if (drop_pole) b = b + (-c0);
        return (1.0 / (mu - lambda)) * std::move(b);
    }

    std::vector<cplx> prod(zstar.states.size());
    for (std::size_t m = 0; m < prod.size(); ++m) prod[m] = zstar.states[m].y * y.states[m].y;
    GridFunction out = cumulative(GridFunction(zstar.grid, std::move(prod)));
    if (c0 != 0.0 && !drop_pole) {
        if (lambda == mu) fail(ErrorKind::PoleHit, "kernel D~_{2,2} evaluated on its pole lambda = mu");
        out = out + c0 / (mu - lambda);
    }
    return out;
}

GridFunction kernel_D(const CoefficientPair& model, int k, int j, cplx lambda, cplx mu, KernelForm form,
                      bool regularized) {
    const Trajectory z = weyl_solution(model, lambda, k, Variant::Star);
    const Trajectory y = weyl_solution(model, mu, j, Variant::Direct);
    return kernel_D(z, y, form, regularized);
}

Eigen::MatrixXcd MainAssembly::system_matrix(std::size_t node) const {
    Eigen::MatrixXcd A = -(G[node].transpose() * signs.asDiagonal());
    A.diagonal().array() += 1.0;
    return A;
}

namespace {

// G~_{v,v0} along the grid.
GridFunction kernel_G(const ModelCache& cache, const IndexV& v, const IndexV& v0, bool& regularized) {
    const auto& sol = cache.solutions(v);
    const Trajectory& y = cache.phi_tilde(v0);
    const auto [a2, a3] = cache.eta_coefficients(v);
    GridFunction g = a3 * kernel_D(sol.star3, y);
    if (a2 != 0.0) {
        const bool reg = cache.k_branch(v);
        if (reg && v0.k == 1 && near_pair(sol.lambda, y.lambda)) regularized = true;
        g += a2 * kernel_D(*sol.star2, y, KernelForm::Auto, reg);
    }
    return g;
}

}  // namespace

MainAssembly assemble(const ModelCache& cache, int threads) {
    const std::size_t S = cache.size();
    const std::size_t nodes = cache.grid().nodes();
    MainAssembly a;
    a.size = S;
    a.G.assign(nodes, Eigen::MatrixXcd::Zero(S, S));
    a.Gprime.assign(nodes, Eigen::MatrixXcd::Zero(S, S));
    a.rhs.assign(nodes, Eigen::VectorXcd::Zero(S));
    a.drhs.assign(nodes, Eigen::VectorXcd::Zero(S));
    a.signs.resize(S);
    for (std::size_t s = 0; s < S; ++s) {
        const IndexV v = IndexV::from_slot(s);
        a.signs(s) = v.sign();
        const Trajectory& y = cache.phi_tilde(v);
        for (std::size_t m = 0; m < nodes; ++m) {
            a.rhs[m](s) = y.states[m].y;
            a.drhs[m](s) = y.states[m].y1;
        }
    }
    std::vector<char> regularized(S, 0);
    parallel_for(S, threads, [&](std::size_t s) {
        const IndexV v = IndexV::from_slot(s);
        const GridFunction& eta = cache.eta(v);
        bool reg = false;
        for (std::size_t s0 = 0; s0 < S; ++s0) {
            const IndexV v0 = IndexV::from_slot(s0);
            const GridFunction g = kernel_G(cache, v, v0, reg);
            const Trajectory& y = cache.phi_tilde(v0);
            for (std::size_t m = 0; m < nodes; ++m) {
                a.G[m](s, s0) = g[m];
                a.Gprime[m](s, s0) = eta[m] * y.states[m].y;
            }
        }
        regularized[s] = reg;
    });
    for (char r : regularized) a.regularized_entries += static_cast<std::size_t>(r);
    return a;
}

double scaling_weight(const IndexV& v, double x) {
    const double cot = (v.k == 1 ? 1.0 : -1.0) / std::sqrt(3.0);
    return std::pow(static_cast<double>(v.n), -v.k) * std::exp(-std::numbers::pi * v.n * x * cot);
}

PhiTable solve_phi(const MainAssembly& assembly, const Grid& grid, const SolveOptions& opts) {
    const std::size_t S = assembly.size;
    const std::size_t nodes = grid.nodes();
    std::vector<Eigen::VectorXcd> phi(nodes), dphi(nodes);
    PhiTable t;
    t.cond.assign(nodes, 0.0);
    if (opts.singular_values) t.sigma_min.assign(nodes, 0.0);
    std::vector<double> residual(nodes, 0.0);

    parallel_for(nodes, opts.threads, [&](std::size_t m) {
        const double x = grid.x(static_cast<int>(m));
        Eigen::VectorXd w(S);
        for (std::size_t s = 0; s < S; ++s) w(s) = scaling_weight(IndexV::from_slot(s), x);
        const Eigen::MatrixXcd A = assembly.system_matrix(m);
        const Eigen::MatrixXcd As = w.cwiseInverse().asDiagonal() * A * w.asDiagonal();
        const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(As);
        const double rcond = lu.rcond();
        if (!(rcond >= opts.rcond_min)) {
            std::ostringstream os;
            os << "main equation singular at node " << m << " (x = " << x << "), condition estimate "
               << (rcond > 0 ? 1.0 / rcond : INFINITY);
            fail(ErrorKind::SingularSystem, os.str());
        }
        t.cond[m] = 1.0 / rcond;
        const Eigen::VectorXcd b = w.cwiseInverse().asDiagonal() * assembly.rhs[m];
        const Eigen::VectorXcd u = lu.solve(b);
        phi[m] = w.asDiagonal() * u;
        const Eigen::MatrixXcd B = assembly.Gprime[m].transpose() * assembly.signs.asDiagonal();
        const Eigen::VectorXcd b2 = w.cwiseInverse().asDiagonal() * (assembly.drhs[m] + B * phi[m]);
        dphi[m] = w.asDiagonal() * lu.solve(b2);
        residual[m] = (As * u - b).norm() / std::max(b.norm(), 1e-300);
        if (!phi[m].allFinite() || !dphi[m].allFinite())
            fail(ErrorKind::NonFinite, "main equation solution is not finite at node " + std::to_string(m));
        if (opts.singular_values) {
            const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(As);
            t.sigma_min[m] = svd.singularValues().minCoeff();
        }
    });

    for (std::size_t s = 0; s < S; ++s) {
        std::vector<cplx> p(nodes), dp(nodes);
        for (std::size_t m = 0; m < nodes; ++m) {
            p[m] = phi[m](s);
            dp[m] = dphi[m](s);
        }
        t.phi.emplace_back(grid, std::move(p));
        t.dphi.emplace_back(grid, std::move(dp));
    }
    for (double r : residual) t.residual_max = std::max(t.residual_max, r);
    return t;
}

ReconstructionResult reconstruct(const ModelCache& cache, PhiTable table) {
    const Grid& grid = cache.grid();
    const auto zero = GridFunction::constant(grid, 0.0);
    GridFunction s_dphi_eta = zero, s_phi_deta = zero, s_phi_eta = zero;
    for (std::size_t s = 0; s < cache.size(); ++s) {
        const IndexV v = IndexV::from_slot(s);
        const double sg = v.sign();
        s_dphi_eta += sg * (table.dphi[s] * cache.eta(v));
        s_phi_deta += sg * (table.phi[s] * cache.eta_prime(v));
        s_phi_eta += sg * (table.phi[s] * cache.eta(v));
    }
    const GridFunction& model_tau1 = cache.coeffs().tau1();
    const GridFunction hat_tau1 = -1.5 * (s_dphi_eta + s_phi_deta);
    GridFunction tau1 = model_tau1 + hat_tau1;
    GridFunction sigma0 = cache.coeffs().sigma0() - hat_tau1 - 3.0 * s_dphi_eta - 2.0 * cumulative(hat_tau1 * s_phi_eta);
    for (auto* f : {&tau1, &sigma0})
        for (cplx z : f->values())
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                fail(ErrorKind::NonFinite, "reconstructed coefficients are not finite");

    ReconstructionResult r{CoefficientPair(std::move(tau1), std::move(sigma0)), std::move(table), 0.0, 0.0,
                           xi_sequence(cache.data(), cache.model_data(), cache.big_n()), 0};
    for (double c : r.table.cond) r.cond_max = std::max(r.cond_max, c);
    r.residual_max = r.table.residual_max;
    return r;
}

nlohmann::json ReconstructionResult::diagnostics() const {
    nlohmann::json j{{"xi", xi.xi},
                     {"d", xi.d},
                     {"sum_n_xi_sq", xi.sum_n_xi_sq},
                     {"cond_max", cond_max},
                     {"residual_max", residual_max},
                     {"regularized_entries", regularized_entries},
                     {"theta", complex_to_json(integrate(tau1()))},
                     {"cond", table.cond}};
    if (!table.sigma_min.empty()) {
        double smin = INFINITY;
        for (double s : table.sigma_min) smin = std::min(smin, s);
        j["sigma_min"] = smin;
    }
    return j;
}

ReconstructionResult inverse(const ModelCache& cache, const InverseOptions& opts) {
    const MainAssembly a = assemble(cache, opts.solve.threads);
    ReconstructionResult r = reconstruct(cache, solve_phi(a, cache.grid(), opts.solve));
    r.regularized_entries = a.regularized_entries;
    return r;
}

void require_admissible(const SpectralData& data) {
    const ConditionReport report = validate_condition1(data);
    if (report.pass()) return;
    std::string failed;
    for (const auto& c : report.clauses) {
        if (c.pass || !c.blocking) continue;
        failed += (failed.empty() ? "" : "; ") + c.clause;
        std::string idx;
        for (const auto& o : c.offenders) {
            std::string t;
            for (int i : o) t += (t.empty() ? "" : ",") + std::to_string(i);
            idx += (idx.empty() ? "" : " ") + ("(" + t + ")");
        }
        if (!idx.empty()) failed += " at " + idx;
    }
    fail(ErrorKind::AdmissibilityViolation, "spectral data fail the condition check: " + failed);
}

ReconstructionResult inverse(const SpectralData& data, const Grid& grid, int big_n, const InverseOptions& opts) {
    if (big_n < 1 || big_n > data.n_max())
        fail(ErrorKind::InvalidArgument, "truncation N = " + std::to_string(big_n) + " outside 1.." +
                                             std::to_string(data.n_max()));
    if (!opts.force) require_admissible(data.truncated(big_n));
    ModelOptions mopts = opts.model;
    mopts.threads = opts.solve.threads;
    return inverse(build_model(data, grid, big_n, mopts), opts);
}

nlohmann::json VerifyReport::to_json() const {
    return {{"mode", mode == VerifyMode::Spectral ? "spectral" : "weyl"},
            {"pass", pass},
            {"max_rel_lambda_err", max_rel_lambda_err},
            {"max_rel_beta_err", max_rel_beta_err},
            {"max_rel_lambda_err_tail", max_rel_lambda_err_tail},
            {"max_bc_residual", max_bc_residual},
            {"interpolation_residual", interpolation_residual},
            {"breaches", breaches},
            {"detail", detail}};
}

namespace {

void verify_spectral(const ReconstructionResult& result, const ModelCache& cache, const VerifyOptions& opts,
                     VerifyReport& rep) {
    const int N = cache.big_n();
    const int total = N + opts.extra;
    ForwardOptions f;
    f.threads = opts.threads;
    SpectralData recovered, model_tail;
    try {
        recovered = forward_spectrum(result.coeffs, total, f);
        model_tail = forward_spectrum(cache.coeffs(), total, f);
    } catch (const SpectralError& e) {
        rep.pass = false;
        rep.breaches.push_back(std::string("forward problem on the reconstruction failed: ") + e.what());
        return;
    }
    nlohmann::json rows = nlohmann::json::array();
    const double beta_tol = 5.0 * opts.spectral_tol;
    for (int n = 1; n <= total; ++n)
        for (int k = 1; k <= 2; ++k) {
            const auto& ref = n <= N ? cache.data().at(n, k) : model_tail.at(n, k);
            const auto& got = recovered.at(n, k);
            const double el = std::abs(got.lambda - ref.lambda) / std::max(std::abs(ref.lambda), 1e-300);
            const double eb = std::abs(got.beta - ref.beta) / std::max(std::abs(ref.beta), 1e-12 * std::abs(ref.lambda));
            rows.push_back({{"n", n}, {"k", k}, {"rel_lambda_err", el}, {"rel_beta_err", eb}, {"tail", n > N}});
            if (n <= N) {
                rep.max_rel_lambda_err = std::max(rep.max_rel_lambda_err, el);
                rep.max_rel_beta_err = std::max(rep.max_rel_beta_err, eb);
                if (el > opts.spectral_tol)
                    rep.breaches.push_back("lambda_{" + std::to_string(n) + "," + std::to_string(k) + "} relative error " +
                                           std::to_string(el));
                if (eb > beta_tol)
                    rep.breaches.push_back("beta_{" + std::to_string(n) + "," + std::to_string(k) + "} relative error " +
                                           std::to_string(eb));
            } else {
                rep.max_rel_lambda_err_tail = std::max(rep.max_rel_lambda_err_tail, el);
            }
        }
    for (const auto& [n, g] : cache.data().gamma()) {
        if (!recovered.in_K(n)) {
            rep.breaches.push_back("index " + std::to_string(n) + " is no longer a coinciding pair");
            continue;
        }
        const double eg = std::abs(recovered.gamma().at(n) - g) / std::abs(g);
        if (eg > beta_tol) rep.breaches.push_back("gamma_" + std::to_string(n) + " relative error " + std::to_string(eg));
    }
    rep.detail = {{"rows", rows}, {"theta_recovered", complex_to_json(recovered.theta())}};
    rep.pass = rep.breaches.empty();
}

// Phi^N_{k0}(., lambda) and its derivative at every node.
std::pair<GridFunction, GridFunction> reconstructed_weyl(const ReconstructionResult& result, const ModelCache& cache,
                                                         const Trajectory& model_phi) {
    const Grid& grid = cache.grid();
    std::vector<cplx> base(grid.nodes()), dbase(grid.nodes());
    for (std::size_t m = 0; m < grid.nodes(); ++m) {
        base[m] = model_phi.states[m].y;
        dbase[m] = model_phi.states[m].y1;
    }
    GridFunction phi(grid, base), dphi(grid, dbase);
    const GridFunction model_y(grid, base);
    for (std::size_t s = 0; s < cache.size(); ++s) {
        const IndexV v = IndexV::from_slot(s);
        const auto& sol = cache.solutions(v);
        const auto [a2, a3] = cache.eta_coefficients(v);
        GridFunction P = a3 * kernel_D(sol.star3, model_phi);
        if (a2 != 0.0) P += a2 * kernel_D(*sol.star2, model_phi);
        const double sg = v.sign();
        phi += sg * (result.table.phi[s] * P);
        dphi += sg * (result.table.dphi[s] * P + result.table.phi[s] * cache.eta(v) * model_y);
    }
    return {std::move(phi), std::move(dphi)};
}

void verify_weyl(const ReconstructionResult& result, const ModelCache& cache, const VerifyOptions& opts,
                 VerifyReport& rep) {
    if (!cache.data().gamma().empty()) {
        rep.detail = {{"skipped", "the Weyl check is restricted to data without coinciding eigenvalues"}};
        return;
    }
    std::vector<cplx> points = opts.weyl_points;
    if (points.empty()) {
        const double r = std::abs(cache.data().at(1, 1).lambda);
        points = {0.5 * r * std::polar(1.0, std::numbers::pi / 4), 3.0 * r * std::polar(1.0, 3 * std::numbers::pi / 4),
                  12.0 * r * std::polar(1.0, std::numbers::pi / 3)};
    }
    nlohmann::json rows = nlohmann::json::array();
    for (cplx lambda : points) {
        const WeylTable W = weyl_solutions(cache.coeffs(), lambda);
        std::array<std::pair<GridFunction, GridFunction>, 3> Phi{
            reconstructed_weyl(result, cache, W.phi[0]), reconstructed_weyl(result, cache, W.phi[1]),
            reconstructed_weyl(result, cache, W.phi[2])};
        const std::size_t M = cache.grid().nodes() - 1;
        const std::vector<std::pair<std::string, cplx>> residuals{
            {"Phi1(1)", Phi[0].first[M]},        {"Phi1'(1)", Phi[0].second[M]}, {"Phi2(1)", Phi[1].first[M]},
            {"Phi1(0)-1", Phi[0].first[0] - 1.0}, {"Phi2(0)", Phi[1].first[0]},    {"Phi2'(0)-1", Phi[1].second[0] - 1.0},
            {"Phi3(0)", Phi[2].first[0]},        {"Phi3'(0)", Phi[2].second[0]}};
        nlohmann::json row{{"lambda", complex_to_json(lambda)}};
        for (const auto& [name, value] : residuals) {
            row[name] = std::abs(value);
            rep.max_bc_residual = std::max(rep.max_bc_residual, std::abs(value));
            if (std::abs(value) > opts.weyl_tol) {
                std::ostringstream os;
                os << name << " = " << std::abs(value) << " at lambda = " << lambda;
                rep.breaches.push_back(os.str());
            }
        }
        rows.push_back(row);
    }

    // Interpolation: Phi^N_{k+1}(., lambda_v) = phi_v, i.e. the main equation with the solved phi.
    const MainAssembly a = assemble(cache, opts.threads);
    const std::size_t nodes = cache.grid().nodes();
    for (std::size_t m = 0; m < nodes; ++m) {
        Eigen::VectorXcd phi(a.size);
        for (std::size_t s = 0; s < a.size; ++s) phi(s) = result.table.phi[s][m];
        const Eigen::VectorXcd interp = a.rhs[m] + a.G[m].transpose() * a.signs.asDiagonal() * phi;
        for (std::size_t s = 0; s < a.size; ++s) {
            const double scale = std::max(1.0, std::abs(phi(s)));
            const double err = std::abs(interp(s) - phi(s)) / scale;
            if (err > rep.interpolation_residual) rep.interpolation_residual = err;
        }
    }
    if (rep.interpolation_residual > opts.weyl_tol) {
        std::ostringstream os;
        os << "interpolation residual " << rep.interpolation_residual;
        rep.breaches.push_back(os.str());
    }
    rep.detail = {{"points", rows}};
    rep.pass = rep.breaches.empty();
}

}  // namespace

VerifyReport verify_reconstruction(const ReconstructionResult& result, const ModelCache& cache, VerifyMode mode,
                                   const VerifyOptions& opts) {
    VerifyReport rep;
    rep.mode = mode;
    if (mode == VerifyMode::Spectral)
        verify_spectral(result, cache, opts, rep);
    else
        verify_weyl(result, cache, opts, rep);
    return rep;
}

Perturbation parse_perturbation(const std::string& text) {
    const auto colon = text.find(':');
    const auto comma = text.find(',', colon == std::string::npos ? 0 : colon);
    if (colon == std::string::npos || comma == std::string::npos)
        fail(ErrorKind::Parse, "perturbation must look like beta:n,k or lambda:n,k, got '" + text + "'");
    Perturbation p;
    const std::string field = text.substr(0, colon);
    if (field == "beta")
        p.field = Perturbation::Field::Beta;
    else if (field == "lambda")
        p.field = Perturbation::Field::Lambda;
    else
        fail(ErrorKind::Parse, "unknown perturbation field '" + field + "'");
    try {
        p.n = std::stoi(text.substr(colon + 1, comma - colon - 1));
        p.k = std::stoi(text.substr(comma + 1));
    } catch (const std::exception&) {
        fail(ErrorKind::Parse, "bad perturbation index in '" + text + "'");
    }
    if (p.n < 1 || (p.k != 1 && p.k != 2)) fail(ErrorKind::InvalidArgument, "perturbation index out of range: " + text);
    return p;
}

std::vector<StabilityRow> stability_experiment(const SpectralData& base, const Grid& grid, int big_n,
                                               const std::vector<Perturbation>& perturbations,
                                               const std::vector<double>& deltas, const InverseOptions& opts) {
    if (!base.gamma().empty())
        fail(ErrorKind::InvalidArgument, "the stability experiment needs data without coinciding eigenvalues");
    for (const auto& p : perturbations)
        if (p.n > big_n) fail(ErrorKind::InvalidArgument, "perturbed index beyond the truncation N");
    const ReconstructionResult reference = inverse(base, grid, big_n, opts);
    std::vector<StabilityRow> rows;
    for (double delta : deltas) {
        StabilityRow row;
        row.delta = delta;
        SpectralData data = base;
        for (const auto& p : perturbations) {
            auto& e = data.at(p.n, p.k);
            (p.field == Perturbation::Field::Beta ? e.beta : e.lambda) += delta;
        }
        row.d = distance_d(data, base, big_n);
        try {
            const ReconstructionResult r = inverse(data, grid, big_n, opts);
            row.tau1_l2 = l2_norm(r.tau1() - reference.tau1());
            row.sigma0_w2m1 = w2m1_distance(r.sigma0(), reference.sigma0());
            if (row.d > 0.0) {
                row.ratio_tau1 = row.tau1_l2 / row.d;
                row.ratio_sigma0 = row.sigma0_w2m1 / row.d;
            }
        } catch (const SpectralError& e) {
            row.singular = e.kind() == ErrorKind::SingularSystem;
            row.error = e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace spectral3
