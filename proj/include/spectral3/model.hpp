#pragma once

#include "spectral3/forward.hpp"
#include "spectral3/spectral_data.hpp"

#include <optional>
#include <vector>

namespace spectral3 {

// Index (n, k, eps) of the main equation; eps = 0 refers to the given data, eps = 1 to the model data.
struct IndexV {
    int n = 1;
    int k = 1;
    int eps = 0;

    // Position in the fixed order: ascending n, then k, then eps.
    std::size_t slot() const { return 4 * static_cast<std::size_t>(n - 1) + 2 * static_cast<std::size_t>(k - 1) + eps; }
    static IndexV from_slot(std::size_t s) {
        return {static_cast<int>(s / 4) + 1, static_cast<int>((s / 2) % 2) + 1, static_cast<int>(s % 2)};
    }
    double sign() const { return eps == 0 ? 1.0 : -1.0; }
    auto operator<=>(const IndexV&) const = default;
};

struct ModelOptions {
    // Amplitude of a zero-mean perturbation jitter*cos(2 pi x) added to the model tau1. It moves the
    // model spectrum away from collisions while keeping the integral of tau1 equal to theta.
    double jitter = 0.0;
    // Relative distance below which two eigenvalues count as coinciding.
    double collision_tol = 1e-8;
    int threads = 1;
    NewtonOptions newton{};
};

// Model Weyl solutions at one spectral value, each with all quasi-derivatives along the grid.
// Phi~_2 is tabulated only for k = 1 and Phi~*_2 only for k = 2: at the other spectrum they have poles.
struct ModelSolutions {
    cplx lambda{};
    std::optional<Trajectory> phi2;
    Trajectory phi3;
    std::optional<Trajectory> star2;
    Trajectory star3;
};

class ModelCache {
public:
    // Tabulates eta~ and its derivative from the star solutions.
    ModelCache(CoefficientPair coeffs, SpectralData model_data, SpectralData data, int big_n,
               std::vector<ModelSolutions> solutions);

    const CoefficientPair& coeffs() const noexcept { return coeffs_; }
    const Grid& grid() const noexcept { return coeffs_.grid(); }
    const SpectralData& model_data() const noexcept { return model_data_; }
    // The given data restricted to n <= N.
    const SpectralData& data() const noexcept { return data_; }
    int big_n() const noexcept { return big_n_; }
    std::size_t size() const noexcept { return solutions_.size(); }

    cplx lambda(const IndexV& v) const { return solutions_[v.slot()].lambda; }
    cplx beta(const IndexV& v) const;
    // True for the index (n, 2, 0) with n in K, whose eta combines two star solutions.
    bool k_branch(const IndexV& v) const { return v.k == 2 && v.eps == 0 && data_.in_K(v.n); }
    const ModelSolutions& solutions(const IndexV& v) const { return solutions_[v.slot()]; }
    // phi~_v = Phi~_{k+1}(., lambda_v).
    const Trajectory& phi_tilde(const IndexV& v) const;
    // Coefficients (a2, a3) with eta~_v = a2 Phi~*_2 + a3 Phi~*_3 at lambda_v.
    std::pair<cplx, cplx> eta_coefficients(const IndexV& v) const;
    const GridFunction& eta(const IndexV& v) const { return eta_[v.slot()]; }
    const GridFunction& eta_prime(const IndexV& v) const { return eta_prime_[v.slot()]; }

private:
    CoefficientPair coeffs_;
    SpectralData model_data_;
    SpectralData data_;
    int big_n_;
    std::vector<ModelSolutions> solutions_;
    std::vector<GridFunction> eta_;
    std::vector<GridFunction> eta_prime_;
};

// Model coefficients tau1 = theta + jitter cos(2 pi x), sigma0 = 0 on the given grid.
CoefficientPair model_coefficients(cplx theta, const Grid& grid, double jitter = 0.0);

// Builds the model problem for the first N indices of the data and tabulates everything the main
// equation consumes. Throws AdmissibilityViolation when a model condition fails.
ModelCache build_model(const SpectralData& data, const Grid& grid, int big_n, const ModelOptions& opts = {});

// Same, with a prescribed model pair (used with data whose model spectrum is already known).
ModelCache build_model(const SpectralData& data, const CoefficientPair& model, int big_n,
                       const ModelOptions& opts = {});

struct XiReport {
    std::vector<double> xi;  // xi_n, n = 1..N
    double d = 0.0;
    double sum_n_xi_sq = 0.0;
};

// xi_n and the local distance d between two data sets over n <= N.
XiReport xi_sequence(const SpectralData& data, const SpectralData& other, int big_n);
double distance_d(const SpectralData& data, const SpectralData& other, int big_n);

}  // namespace spectral3
