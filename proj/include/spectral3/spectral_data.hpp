#pragma once

#include "spectral3/grid.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <vector>

namespace spectral3 {

struct SpectralIndex {
    int n;
    int k;
    auto operator<=>(const SpectralIndex&) const = default;
};

struct SpectralDatum {
    int n = 0;
    int k = 0;
    cplx lambda{};
    cplx beta{};
};

// Eigenvalues and weight numbers of both boundary value problems for n = 1..n_max.
class SpectralData {
public:
    SpectralData() = default;
    SpectralData(cplx theta, int n_max);

    cplx theta() const noexcept { return theta_; }
    void set_theta(cplx theta) noexcept { theta_ = theta; }
    int n_max() const noexcept { return n_max_; }

    const SpectralDatum& at(int n, int k) const;
    SpectralDatum& at(int n, int k);
    const std::vector<SpectralDatum>& entries() const noexcept { return entries_; }

    // gamma_n for indices n in K, where lambda_{n,1} = lambda_{n,2}.
    const std::map<int, cplx>& gamma() const noexcept { return gamma_; }
    bool in_K(int n) const { return gamma_.contains(n); }
    void set_gamma(int n, cplx gamma) { gamma_[n] = gamma; }
    void clear_gamma(int n) { gamma_.erase(n); }

    SpectralData truncated(int n) const;

private:
    std::size_t slot(int n, int k) const;

    cplx theta_{};
    int n_max_ = 0;
    std::vector<SpectralDatum> entries_;
    std::map<int, cplx> gamma_;
};

nlohmann::json to_json(const SpectralData& data);
SpectralData spectral_data_from_json(const nlohmann::json& j);

SpectralData read_spectral_data(const std::filesystem::path& path);
void write_spectral_data(const std::filesystem::path& path, const SpectralData& data,
                         const std::optional<nlohmann::json>& diagnostics = std::nullopt);

nlohmann::json complex_to_json(cplx z);
cplx complex_from_json(const nlohmann::json& j);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace spectral3
