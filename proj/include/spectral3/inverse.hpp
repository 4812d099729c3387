#pragma once

#include "spectral3/model.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace spectral3 {

// <z, y> = z^[2] y - z' y' + z y^[2] along the grid, for z a star-problem solution and y a direct one.
GridFunction lagrange_bracket(const Trajectory& zstar, const Trajectory& y);

enum class KernelForm { Auto, Bracket, Integral };

// Threshold on |lambda - mu| / (1 + max(|lambda|, |mu|)) below which Auto switches to the integral form.
inline constexpr double kNearPairThreshold = 1e-6;

// D~_{k,j}(x, lambda, mu) for zstar = Phi~*_k(., lambda) and y = Phi~_j(., mu). The integral form is
// <z,y>(0)/(mu - lambda) + int_0^x z y, whose leading term is nonzero only for (k, j) = (2, 2).
// `regularized` drops that term, which gives the constant Laurent coefficient at mu = lambda.
GridFunction kernel_D(const Trajectory& zstar, const Trajectory& y, KernelForm form = KernelForm::Auto,
                      bool regularized = false);

// Convenience overload that computes the model Weyl solutions first.
GridFunction kernel_D(const CoefficientPair& model, int k, int j, cplx lambda, cplx mu,
                      KernelForm form = KernelForm::Auto, bool regularized = false);

// Finite main equation at every node: A[v0][v] = delta - (-1)^eps(v) G~_{v,v0}.
struct MainAssembly {
    std::size_t size = 0;
    std::vector<Eigen::MatrixXcd> G;      // per node, G(v, v0)
    std::vector<Eigen::MatrixXcd> Gprime; // per node, eta~_v phi~_{v0}
    std::vector<Eigen::VectorXcd> rhs;    // per node, phi~_{v0}
    std::vector<Eigen::VectorXcd> drhs;   // per node, phi~'_{v0}
    Eigen::VectorXd signs;                // (-1)^eps(v)
    std::size_t regularized_entries = 0;  // number of K-branch kernels evaluated with the pole removed

    Eigen::MatrixXcd system_matrix(std::size_t node) const;
};

MainAssembly assemble(const ModelCache& cache, int threads = 1);

// Scaling weights w_v(x) = n^{-k} exp(-pi n x cot(k pi / 3)) matching the growth of phi~_v.
double scaling_weight(const IndexV& v, double x);

struct PhiTable {
    std::vector<GridFunction> phi;   // per IndexV slot
    std::vector<GridFunction> dphi;  // per IndexV slot
    std::vector<double> cond;        // per node, reciprocal condition estimate inverted
    std::vector<double> sigma_min;   // per node, smallest singular value of the scaled matrix (optional)
    double residual_max = 0.0;       // max relative residual of the unscaled system over nodes
};

struct SolveOptions {
    int threads = 1;
    bool singular_values = false;
    double rcond_min = 1e-14;
};

PhiTable solve_phi(const MainAssembly& assembly, const Grid& grid, const SolveOptions& opts = {});

struct ReconstructionResult {
    CoefficientPair coeffs;  // (tau1^N, sigma0^N)
    PhiTable table;
    double cond_max = 0.0;
    double residual_max = 0.0;
    XiReport xi;
    std::size_t regularized_entries = 0;

    const GridFunction& tau1() const { return coeffs.tau1(); }
    const GridFunction& sigma0() const { return coeffs.sigma0(); }
    nlohmann::json diagnostics() const;
};

ReconstructionResult reconstruct(const ModelCache& cache, PhiTable table);

// Throws AdmissibilityViolation naming every failed blocking clause and its offending indices.
void require_admissible(const SpectralData& data);

struct InverseOptions {
    ModelOptions model{};
    SolveOptions solve{};
    bool force = false;  // skip the condition report on the input data
};

// Model construction, assembly, solve, and reconstruction from the first N indices of the data.
ReconstructionResult inverse(const SpectralData& data, const Grid& grid, int big_n, const InverseOptions& opts = {});
ReconstructionResult inverse(const ModelCache& cache, const InverseOptions& opts = {});

enum class VerifyMode { Spectral, Weyl };

struct VerifyOptions {
    int extra = 4;                // indices beyond N compared with the model spectrum
    int threads = 1;
    double spectral_tol = 1e-3;
    double weyl_tol = 1e-6;
    std::vector<cplx> weyl_points;  // spectral values for the Weyl check; defaults chosen from the data
};

struct VerifyReport {
    VerifyMode mode{};
    bool pass = true;
    double max_rel_lambda_err = 0.0;
    double max_rel_beta_err = 0.0;
    double max_rel_lambda_err_tail = 0.0;  // N < n <= N + extra against the model data
    double max_bc_residual = 0.0;
    double interpolation_residual = 0.0;
    std::vector<std::string> breaches;
    nlohmann::json detail;

    nlohmann::json to_json() const;
};

VerifyReport verify_reconstruction(const ReconstructionResult& result, const ModelCache& cache, VerifyMode mode,
                                   const VerifyOptions& opts = {});

struct Perturbation {
    enum class Field { Lambda, Beta } field = Field::Beta;
    int n = 1;
    int k = 1;
};

// Parses "beta:1,1" or "lambda:2,1".
Perturbation parse_perturbation(const std::string& text);

struct StabilityRow {
    double delta = 0.0;
    double d = 0.0;
    double tau1_l2 = 0.0;
    double sigma0_w2m1 = 0.0;
    std::optional<double> ratio_tau1;
    std::optional<double> ratio_sigma0;
    bool singular = false;
    std::string error;
};

// Reconstructs from data with the listed entries shifted by delta and compares against the unperturbed
// reconstruction at the same N.
std::vector<StabilityRow> stability_experiment(const SpectralData& base, const Grid& grid, int big_n,
                                               const std::vector<Perturbation>& perturbations,
                                               const std::vector<double>& deltas, const InverseOptions& opts = {});

}  // namespace spectral3
