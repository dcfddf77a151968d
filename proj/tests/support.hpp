#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "cemech/core.hpp"

namespace testing {

inline double rel(double a, double b)
{
    return std::abs(a - b) / std::abs(b);
}

inline std::vector<double> linspace(double a, double b, std::size_t n)
{
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

inline std::vector<double> logspace(double a, double b, std::size_t n)
{
    auto v = linspace(std::log10(a), std::log10(b), n);
    for (double& x : v) {
        x = std::pow(10.0, x);
    }
    return v;
}

struct Gauss {
    std::mt19937_64 rng;
    std::normal_distribution<double> dist{0.0, 1.0};
    explicit Gauss(std::uint64_t seed) : rng(seed) {}
    double operator()() { return dist(rng); }
};

/// Fresh scratch directory under the system temp directory.
inline std::filesystem::path scratch(const std::string& name)
{
    auto p = std::filesystem::temp_directory_path() / ("cemech_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

// Device parameters used across the suites.
constexpr double omega_m = cemech::hz_to_rad(1.486e6);
constexpr double gamma_m = cemech::hz_to_rad(1.0e-3);
constexpr double kappa = cemech::hz_to_rad(226e3);
constexpr double kappa_ex = cemech::hz_to_rad(183e3);
constexpr double omega_c = cemech::hz_to_rad(8.349e9);
constexpr double t_bath = 0.080;

} // namespace testing
