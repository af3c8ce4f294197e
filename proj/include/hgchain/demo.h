#pragma once

#include "hgchain/io.h"

#include <cstdint>
#include <filesystem>

namespace hgchain {

inline constexpr std::uint64_t default_demo_seed = 2015;

/// Synthetic bundle: 5 provinces, 12 plants, 10 food categories on a 20x20 grid of 50 km cells.
/// The seed only perturbs the numbers; the plant roster and device retrofits are fixed.
struct DemoData
{
    io::FileSet bundle;    // bundle files without the manifest
    io::FileSet scenarios; // scenario files
};

DemoData generate_demo(std::uint64_t seed = default_demo_seed);

/// Writes the bundle with its manifest into dir and the scenarios into dir/scenarios.
void write_demo(const std::filesystem::path& dir, std::uint64_t seed = default_demo_seed);

}
