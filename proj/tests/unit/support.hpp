#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stlfalsify/samplers/model.hpp"
#include "stlfalsify/stl/channel.hpp"

namespace stlf::test {

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(double(i) / double(a.size()) - double(j) / double(b.size())));
    }
    return d;
}

/// Draws from N(mean, sd^2) restricted to [lo, hi] by plain rejection.
inline std::vector<double> rejection_truncated_normal(double mean, double sd, double lo, double hi, std::size_t n,
                                                      std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(mean, sd);
    std::vector<double> out;
    out.reserve(n);
    while (out.size() < n) {
        double x = normal(rng);
        if (x >= lo && x <= hi) out.push_back(x);
    }
    return out;
}

/// One continuous channel x in [-2, 2].
inline ChannelList scalar_channel() { return {ChannelSpec::continuous("x", -2.0, 2.0)}; }

inline DisturbanceModel uniform_model(const ChannelList& channels) {
    DisturbanceModel m{channels, {}};
    for (const auto& c : channels) m.models.push_back(UniformModel{c.continuous_kind().x_min, c.continuous_kind().x_max});
    return m;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("stlfalsify_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace stlf::test
