#include "spectral3/cli.hpp"

#include "spectral3/asymptotics.hpp"
#include "spectral3/error.hpp"
#include "spectral3/selfadjoint.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>

namespace spectral3::cli {

namespace {

using nlohmann::json;

void require_path(const std::filesystem::path& p, const char* flag) {
    if (p.empty()) fail(ErrorKind::InvalidArgument, std::string(flag) + " is required");
}

// Brings coefficients read from file onto the requested grid.
CoefficientPair on_grid(const CoefficientPair& c, int M) {
    if (c.grid().intervals() == M) return c;
    const Grid g(M);
    return CoefficientPair(GridFunction::sample(g, [&](double x) { return c.tau1().at(x); }),
                           GridFunction::sample(g, [&](double x) { return c.sigma0().at(x); }));
}

bool is_self_adjoint(const CoefficientPair& c) {
    const double scale = 1.0 + std::max(max_norm(c.tau1()), max_norm(c.sigma0()));
    for (std::size_t m = 0; m < c.grid().nodes(); ++m)
        if (std::abs(c.tau1()[m].imag()) > 1e-12 * scale || std::abs(c.sigma0()[m].real()) > 1e-12 * scale)
            return false;
    return true;
}

// Full spectral data, or half data of a self-adjoint problem that gets completed.
SpectralData load_data(const std::filesystem::path& path) {
    const json j = read_json(path);
    if (j.contains("theta") && j.at("theta").is_number()) return complete(half_data_from_json(j));
    return spectral_data_from_json(j);
}

ForwardOptions forward_options(const RunConfig& cfg) {
    ForwardOptions f;
    f.newton.tol = cfg.newton_tol;
    f.pair_tol = cfg.pair_tol;
    f.threads = cfg.threads;
    return f;
}

InverseOptions inverse_options(const RunConfig& cfg) {
    InverseOptions o;
    o.model.jitter = cfg.model_jitter;
    o.model.collision_tol = cfg.pair_tol;
    o.model.threads = cfg.threads;
    o.model.newton.tol = cfg.newton_tol;
    o.solve.threads = cfg.threads;
    o.force = cfg.force;
    return o;
}

int single_n(const RunConfig& cfg, const SpectralData& data) {
    if (cfg.big_n.size() > 1) fail(ErrorKind::InvalidArgument, "--big-n takes a single value for this command");
    const int N = cfg.big_n.empty() ? data.n_max() : cfg.big_n.front();
    if (N < 1 || N > data.n_max())
        fail(ErrorKind::InvalidArgument,
             "--big-n " + std::to_string(N) + " exceeds the " + std::to_string(data.n_max()) + " indices in the data");
    return N;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) fail(ErrorKind::Io, "cannot write " + p.string());
    out << std::setprecision(17);
    return out;
}

std::string csv_quote(const std::string& s) {
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + '"';
}

json guarded(const std::function<json()>& f) {
    try {
        return f();
    } catch (const SpectralError& e) {
        return {{"error", e.what()}};
    }
}

}  // namespace

void RunConfig::validate() const {
    if (grid < 64 || grid % 2 != 0)
        fail(ErrorKind::InvalidArgument, "--grid must be even and at least 64, got " + std::to_string(grid));
    if (n_max < 1) fail(ErrorKind::InvalidArgument, "--n-max must be positive");
    if (threads < 1) fail(ErrorKind::InvalidArgument, "--threads must be positive");
    for (int n : big_n)
        if (n < 1) fail(ErrorKind::InvalidArgument, "--big-n values must be positive");
    if (mode != "spectral" && mode != "weyl")
        fail(ErrorKind::InvalidArgument, "--mode must be spectral or weyl, got " + mode);
}

void cmd_forward(const RunConfig& cfg, std::ostream& log) {
    require_path(cfg.coeffs, "--coeffs");
    require_path(cfg.out, "--out");
    const CoefficientPair c = on_grid(read_coefficients_csv(cfg.coeffs), cfg.grid);
    const SpectralData data = forward_spectrum(c, cfg.n_max, forward_options(cfg));

    json diag{{"grid", cfg.grid},
              {"asymptotics", guarded([&] { return to_json(extract_remainders(data)); })},
              {"conditions", validate_condition1(data).to_json()}};
    if (is_self_adjoint(c)) {
        const SymmetryReport sym = check_symmetry(data);
        diag["symmetry"] = sym.to_json();
        diag["half_data"] = to_json(restrict(data));
        log << "symmetry: " << (sym.pass() ? "pass" : "FAIL") << " (max violation " << sym.max_violation << ")\n";
    }
    write_spectral_data(cfg.out, data, diag);
    log << "wrote " << 2 * data.n_max() << " eigenvalues to " << cfg.out.string() << " (K has "
        << data.gamma().size() << " indices)\n";
}

void cmd_inverse(const RunConfig& cfg, std::ostream& log) {
    require_path(cfg.data, "--data");
    require_path(cfg.out, "--out");
    const SpectralData data = load_data(cfg.data);
    const int N = single_n(cfg, data);
    const InverseOptions opts = inverse_options(cfg);
    if (!opts.force) require_admissible(data.truncated(N));
    const ModelCache cache = build_model(data, Grid(cfg.grid), N, opts.model);
    const ReconstructionResult r = inverse(cache, opts);
    write_coefficients_csv(cfg.out, r.coeffs);

    json diag = r.diagnostics();
    VerifyOptions v;
    v.threads = cfg.threads;
    diag["verify"] = guarded([&] { return verify_reconstruction(r, cache, VerifyMode::Spectral, v).to_json(); });
    if (!cfg.diag.empty()) write_json(cfg.diag, diag);
    log << "N = " << N << ", cond_max = " << r.cond_max << ", residual_max = " << r.residual_max << ", d = " << r.xi.d
        << "\n";
}

void cmd_roundtrip(const RunConfig& cfg, std::ostream& log) {
    require_path(cfg.coeffs, "--coeffs");
    require_path(cfg.out, "--out");
    std::vector<int> ns = cfg.big_n.empty() ? std::vector<int>{8, 12, 16} : cfg.big_n;
    const CoefficientPair c = on_grid(read_coefficients_csv(cfg.coeffs), cfg.grid);
    const SpectralData data = forward_spectrum(c, *std::ranges::max_element(ns), forward_options(cfg));
    const InverseOptions opts = inverse_options(cfg);
    VerifyOptions v;
    v.threads = cfg.threads;

    std::ofstream out = open_out(cfg.out);
    out << "N,tau1_l2_err,sigma0_w2m1_err,max_rel_lambda_err,max_rel_beta_err,max_rel_lambda_err_tail,cond_max,"
           "residual_max,d,verify_pass\n";
    for (int N : ns) {
        const ModelCache cache = build_model(data, Grid(cfg.grid), N, opts.model);
        const ReconstructionResult r = inverse(cache, opts);
        const VerifyReport rep = verify_reconstruction(r, cache, VerifyMode::Spectral, v);
        const double et = l2_norm(r.tau1() - c.tau1());
        const double es = w2m1_distance(r.sigma0(), c.sigma0());
        out << N << ',' << et << ',' << es << ',' << rep.max_rel_lambda_err << ',' << rep.max_rel_beta_err << ','
            << rep.max_rel_lambda_err_tail << ',' << r.cond_max << ',' << r.residual_max << ',' << r.xi.d << ','
            << (rep.pass ? 1 : 0) << '\n';
        log << "N = " << N << ": tau1 L2 error " << et << ", sigma0 W2^-1 error " << es << ", max rel lambda error "
            << rep.max_rel_lambda_err << "\n";
    }
}

void cmd_stability(const RunConfig& cfg, std::ostream& log) {
    require_path(cfg.data, "--data");
    require_path(cfg.out, "--out");
    if (cfg.perturb.empty()) fail(ErrorKind::InvalidArgument, "--perturb is required");
    if (cfg.deltas.empty()) fail(ErrorKind::InvalidArgument, "--deltas is required");
    const SpectralData data = load_data(cfg.data);
    const int N = single_n(cfg, data);
    std::vector<Perturbation> perts;
    for (const auto& p : cfg.perturb) perts.push_back(parse_perturbation(p));
    const auto rows = stability_experiment(data, Grid(cfg.grid), N, perts, cfg.deltas, inverse_options(cfg));

    std::ofstream out = open_out(cfg.out);
    out << "delta,d,tau1_l2,sigma0_w2m1,ratio_tau1,ratio_sigma0,singular,error\n";
    auto opt = [](const std::optional<double>& x) {
        std::ostringstream os;
        os << std::setprecision(17);
        if (x) os << *x;
        return os.str();
    };
    std::size_t singular = 0;
    for (const auto& r : rows) {
        out << r.delta << ',' << r.d << ',' << r.tau1_l2 << ',' << r.sigma0_w2m1 << ',' << opt(r.ratio_tau1) << ','
            << opt(r.ratio_sigma0) << ',' << (r.singular ? 1 : 0) << ',' << csv_quote(r.error) << '\n';
        singular += r.singular ? 1 : 0;
        log << "delta = " << r.delta << ": d = " << r.d << ", ratio " << opt(r.ratio_tau1)
            << (r.error.empty() ? "" : "  [" + r.error + "]") << "\n";
    }
    if (singular > 0) log << singular << " perturbed systems were singular\n";
}

void cmd_verify(const RunConfig& cfg, std::ostream& log) {
    require_path(cfg.data, "--data");
    require_path(cfg.rec, "--rec");
    require_path(cfg.out, "--out");
    const SpectralData data = load_data(cfg.data);
    const int N = single_n(cfg, data);
    const CoefficientPair rec = read_coefficients_csv(cfg.rec);
    const InverseOptions opts = inverse_options(cfg);
    const ModelCache cache = build_model(data, rec.grid(), N, opts.model);
    VerifyOptions v;
    v.threads = cfg.threads;

    VerifyReport rep;
    json extra;
    if (cfg.mode == "spectral") {
        ReconstructionResult r{rec, {}, 0.0, 0.0, xi_sequence(cache.data(), cache.model_data(), N), 0};
        rep = verify_reconstruction(r, cache, VerifyMode::Spectral, v);
    } else {
        // The Weyl check needs the solved main-equation table, which only the data determine.
        const ReconstructionResult r = inverse(cache, opts);
        rep = verify_reconstruction(r, cache, VerifyMode::Weyl, v);
        extra["rec_mismatch_tau1_l2"] = l2_norm(r.tau1() - rec.tau1());
        extra["rec_mismatch_sigma0_w2m1"] = w2m1_distance(r.sigma0(), rec.sigma0());
    }
    json j = rep.to_json();
    j["N"] = N;
    for (const auto& [k, val] : extra.items()) j[k] = val;
    write_json(cfg.out, j);
    log << "verify " << cfg.mode << ": " << (rep.pass ? "pass" : "FAIL") << "\n";
    for (const auto& b : rep.breaches) log << "  " << b << "\n";
}

int run(int argc, const char* const* argv) {
    CLI::App app{"Forward and inverse spectral problems for third-order differential operators", "spectral3"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key=value configuration file");
    RunConfig cfg;
    app.add_option("--threads", cfg.threads, "cap on data-parallel width")->capture_default_str();
    app.add_option("--grid", cfg.grid, "grid intervals M")->capture_default_str();
    app.add_option("--newton-tol", cfg.newton_tol)->capture_default_str();
    app.add_option("--pair-tol", cfg.pair_tol)->capture_default_str();

    auto* fwd = app.add_subcommand("forward", "compute spectral data of a coefficient pair");
    fwd->add_option("--coeffs", cfg.coeffs, "coefficient CSV")->required();
    fwd->add_option("--n-max", cfg.n_max)->capture_default_str();
    fwd->add_option("--out", cfg.out, "spectral-data JSON")->required();

    auto* inv = app.add_subcommand("inverse", "reconstruct coefficients from spectral data");
    inv->add_option("--data", cfg.data, "spectral-data or half-data JSON")->required();
    inv->add_option("--big-n", cfg.big_n, "truncation N");
    inv->add_option("--out", cfg.out, "reconstructed coefficient CSV")->required();
    inv->add_option("--diag", cfg.diag, "diagnostics JSON");
    inv->add_option("--model-jitter", cfg.model_jitter)->capture_default_str();
    inv->add_flag("--force", cfg.force, "skip the admissibility check");

    auto* rt = app.add_subcommand("roundtrip", "forward, inverse and forward again for several N");
    rt->add_option("--coeffs", cfg.coeffs)->required();
    rt->add_option("--big-n", cfg.big_n)->delimiter(',');
    rt->add_option("--model-jitter", cfg.model_jitter)->capture_default_str();
    rt->add_option("--out", cfg.out, "summary CSV")->required();

    auto* st = app.add_subcommand("stability", "perturb spectral data and compare reconstructions");
    st->add_option("--data", cfg.data)->required();
    st->add_option("--perturb", cfg.perturb, "field:n,k (repeatable)")->required();
    st->add_option("--deltas", cfg.deltas)->delimiter(',')->required();
    st->add_option("--big-n", cfg.big_n);
    st->add_option("--model-jitter", cfg.model_jitter)->capture_default_str();
    st->add_option("--out", cfg.out, "summary CSV")->required();

    auto* ver = app.add_subcommand("verify", "check a reconstruction against its spectral data");
    ver->add_option("--data", cfg.data)->required();
    ver->add_option("--rec", cfg.rec, "reconstructed coefficient CSV")->required();
    ver->add_option("--mode", cfg.mode)->check(CLI::IsMember({"spectral", "weyl"}))->capture_default_str();
    ver->add_option("--big-n", cfg.big_n);
    ver->add_option("--model-jitter", cfg.model_jitter)->capture_default_str();
    ver->add_option("--out", cfg.out, "verification JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        cfg.validate();
        if (*fwd) cmd_forward(cfg, std::cout);
        else if (*inv) cmd_inverse(cfg, std::cout);
        else if (*rt) cmd_roundtrip(cfg, std::cout);
        else if (*st) cmd_stability(cfg, std::cout);
        else cmd_verify(cfg, std::cout);
    } catch (const SpectralError& e) {
        std::cerr << "spectral3: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "spectral3: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace spectral3::cli
