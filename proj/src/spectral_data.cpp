#include "spectral3/spectral_data.hpp"

#include "spectral3/error.hpp"

#include <fstream>

namespace spectral3 {

using nlohmann::json;

SpectralData::SpectralData(cplx theta, int n_max) : theta_(theta), n_max_(n_max) {
    if (n_max < 1) fail(ErrorKind::InvalidArgument, "n_max must be positive");
    entries_.reserve(2 * static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n)
        for (int k = 1; k <= 2; ++k) entries_.push_back({n, k, 0.0, 0.0});
}

std::size_t SpectralData::slot(int n, int k) const {
    if (n < 1 || n > n_max_ || (k != 1 && k != 2))
        fail(ErrorKind::InvalidArgument,
             "spectral index (" + std::to_string(n) + "," + std::to_string(k) + ") out of range");
    return 2 * static_cast<std::size_t>(n - 1) + static_cast<std::size_t>(k - 1);
}

const SpectralDatum& SpectralData::at(int n, int k) const { return entries_[slot(n, k)]; }
SpectralDatum& SpectralData::at(int n, int k) { return entries_[slot(n, k)]; }

SpectralData SpectralData::truncated(int n) const {
    if (n > n_max_) fail(ErrorKind::InvalidArgument, "cannot truncate beyond n_max");
    SpectralData out(theta_, n);
    for (int i = 1; i <= n; ++i)
        for (int k = 1; k <= 2; ++k) out.at(i, k) = at(i, k);
    for (const auto& [idx, g] : gamma_)
        if (idx <= n) out.set_gamma(idx, g);
    return out;
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2) fail(ErrorKind::Parse, "expected [re, im], got " + j.dump());
    return {j[0].get<double>(), j[1].get<double>()};
}

json to_json(const SpectralData& data) {
    json entries = json::array();
    for (const auto& e : data.entries())
        entries.push_back({{"n", e.n}, {"k", e.k}, {"lambda", complex_to_json(e.lambda)},
                           {"beta", complex_to_json(e.beta)}});
    json K = json::array();
    for (const auto& [n, g] : data.gamma()) K.push_back({{"n", n}, {"gamma", complex_to_json(g)}});
    return {{"theta", complex_to_json(data.theta())}, {"n_max", data.n_max()}, {"entries", entries}, {"K", K}};
}

SpectralData spectral_data_from_json(const json& j) {
    try {
        SpectralData data(complex_from_json(j.at("theta")), j.at("n_max").get<int>());
        std::vector<bool> seen(2 * static_cast<std::size_t>(data.n_max()), false);
        for (const auto& e : j.at("entries")) {
            const int n = e.at("n").get<int>(), k = e.at("k").get<int>();
            auto& d = data.at(n, k);
            d.lambda = complex_from_json(e.at("lambda"));
            d.beta = complex_from_json(e.at("beta"));
            seen[2 * static_cast<std::size_t>(n - 1) + static_cast<std::size_t>(k - 1)] = true;
        }
        for (std::size_t i = 0; i < seen.size(); ++i)
            if (!seen[i])
                fail(ErrorKind::Parse, "missing entry n=" + std::to_string(i / 2 + 1) + " k=" + std::to_string(i % 2 + 1));
        if (j.contains("K"))
            for (const auto& e : j.at("K")) data.set_gamma(e.at("n").get<int>(), complex_from_json(e.at("gamma")));
        return data;
    } catch (const json::exception& ex) {
        fail(ErrorKind::Parse, std::string("spectral data: ") + ex.what());
    }
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& ex) {
        fail(ErrorKind::Parse, path.string() + ": " + ex.what());
    }
}

SpectralData read_spectral_data(const std::filesystem::path& path) { return spectral_data_from_json(read_json(path)); }

void write_spectral_data(const std::filesystem::path& path, const SpectralData& data,
                         const std::optional<json>& diagnostics) {
    json j = to_json(data);
    if (diagnostics) j["diagnostics"] = *diagnostics;
    write_json(path, j);
}

}  // namespace spectral3
