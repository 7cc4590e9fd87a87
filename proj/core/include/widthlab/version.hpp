#pragma once

#include <array>
#include <string_view>
#include <utility>

namespace widthlab {

inline constexpr std::string_view kVersion = "0.1.0";

// Bumped whenever a module changes the numbers it produces.
inline constexpr std::array<std::pair<std::string_view, std::string_view>, 8> kModuleVersions{{
    {"manifold-spectra", "1"},
    {"filter-design", "1"},
    {"kernel-engine", "1"},
    {"discretization", "1"},
    {"finite-widths", "1"},
    {"rate-lab", "1"},
    {"mesh-laplacian", "1"},
    {"cli-harness", "1"},
}};

} // namespace widthlab
