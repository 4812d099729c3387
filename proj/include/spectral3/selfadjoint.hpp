#pragma once

#include "spectral3/asymptotics.hpp"
#include "spectral3/spectral_data.hpp"

#include <filesystem>
#include <map>
#include <vector>

namespace spectral3 {

struct HalfEntry {
    int n = 0;
    cplx lambda{};
    cplx beta{};  // ignored for n in K
};

// Half of the data of a self-adjoint problem: the k = 1 spectrum with its weights,
// and gamma_n on the indices where the two spectra coincide.
struct HalfData {
    double theta = 0.0;
    std::vector<HalfEntry> entries;  // n = 1..n_max in order
    std::map<int, double> gammas;

    int n_max() const noexcept { return static_cast<int>(entries.size()); }
    bool in_K(int n) const { return gammas.contains(n); }
};

SpectralData complete(const HalfData& half);
HalfData restrict(const SpectralData& data);

ConditionReport check_suff_conditions(const HalfData& half, double tol = 1e-8);

struct SymmetryReport {
    double max_violation = 0.0;
    double tolerance = 1e-8;
    int worst_n = 0;
    std::string worst_field;

    bool pass() const noexcept { return max_violation <= tolerance; }
    nlohmann::json to_json() const;
};

SymmetryReport check_symmetry(const SpectralData& data, double tol = 1e-8);

nlohmann::json to_json(const HalfData& half);
HalfData half_data_from_json(const nlohmann::json& j);
HalfData read_half_data(const std::filesystem::path& path);

}  // namespace spectral3
