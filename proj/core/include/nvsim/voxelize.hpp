#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "nvsim/scene.hpp"

namespace nvsim {

// Permittivity sampled per staggered field-component location. Component c of
// cell (i,j,k) sits at the Yee position: half-cell offset along its own axis.
// Arrays are dims^3; the solver clamps indices at the domain edge.
struct VoxelGrid {
    double dx = 5.0; // nm
    int dims = 0;    // cells per axis; domain_size = dims * dx
    std::array<std::vector<double>, 3> eps; // eps[c][(i*dims + j)*dims + k]

    double origin() const { return -0.5 * dims * dx; } // domain corner, each axis

    std::size_t idx(int i, int j, int k) const {
        auto c = [n = dims](int v) { return v < 0 ? 0 : (v >= n ? n - 1 : v); };
        return (static_cast<std::size_t>(c(i)) * dims + c(j)) * dims + c(k);
    }

    static VoxelGrid uniform(int dims, double dx, double eps_value);
};

// Volume-fraction permittivity averaging over each component cell;
// subsamples^3 midpoint samples per cell.
VoxelGrid voxelize(const DielectricScene& scene, double dx, int subsamples = 4);

} // namespace nvsim
