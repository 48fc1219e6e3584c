#include "nvsim/voxelize.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nvsim {

namespace {

struct BBoxXY {
    double xmin, xmax, ymin, ymax;
};

BBoxXY bbox_xy(const Primitive& prim) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return std::visit(
        [](const auto& s) -> BBoxXY {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Sphere>)
                return {s.center.x - s.radius, s.center.x + s.radius, s.center.y - s.radius,
                        s.center.y + s.radius};
            else if constexpr (std::is_same_v<T, Cube>)
                return {s.center.x - s.side / 2, s.center.x + s.side / 2, s.center.y - s.side / 2,
                        s.center.y + s.side / 2};
            else if constexpr (std::is_same_v<T, Octahedron>) {
                double r = s.side / std::sqrt(2.0);
                return {s.center.x - r, s.center.x + r, s.center.y - r, s.center.y + r};
            } else if constexpr (std::is_same_v<T, Ellipsoid>)
                return {s.center.x - s.semi_axes.x, s.center.x + s.semi_axes.x,
                        s.center.y - s.semi_axes.y, s.center.y + s.semi_axes.y};
            else
                return {-inf, inf, -inf, inf};
        },
        prim.shape);
}

// Per-column (x,y) candidate lists so large opal scenes sample in O(few)
// primitive tests per point.
class ColumnIndex {
  public:
    ColumnIndex(const DielectricScene& scene, double x0, double dx, int n)
        : scene_(scene), x0_(x0), dx_(dx), n_(n), cols_(static_cast<std::size_t>(n) * n) {
        // clamp in double first so infinite boxes (half-spaces) are safe
        auto cell = [this](double coord, int adjust) {
            double t = (coord - x0_) / dx_ + adjust;
            if (!(t > 0.0)) t = 0.0;
            if (!(t < n_ - 1)) t = n_ - 1;
            return static_cast<int>(t);
        };
        for (std::size_t p = 0; p < scene.primitives.size(); ++p) {
            BBoxXY b = bbox_xy(scene.primitives[p]);
            int i0 = cell(b.xmin, -1);
            int i1 = cell(b.xmax, +1);
            int j0 = cell(b.ymin, -1);
            int j1 = cell(b.ymax, +1);
            for (int i = i0; i <= i1; ++i)
                for (int j = j0; j <= j1; ++j)
                    cols_[static_cast<std::size_t>(i) * n_ + j].push_back(static_cast<int>(p));
        }
    }

    double permittivity(const Vec3& q) const {
        if (scene_.nanodiamond.contains(q)) return scene_.nanodiamond.material.permittivity();
        int i = clampi(static_cast<int>(std::floor((q.x - x0_) / dx_)));
        int j = clampi(static_cast<int>(std::floor((q.y - x0_) / dx_)));
        const auto& col = cols_[static_cast<std::size_t>(i) * n_ + j];
        for (auto it = col.rbegin(); it != col.rend(); ++it)
            if (scene_.primitives[*it].contains(q))
                return scene_.primitives[*it].material.permittivity();
        return scene_.background.permittivity();
    }

  private:
    int clampi(int v) const { return v < 0 ? 0 : (v >= n_ ? n_ - 1 : v); }

    const DielectricScene& scene_;
    double x0_, dx_;
    int n_;
    std::vector<std::vector<int>> cols_;
};

} // namespace

VoxelGrid VoxelGrid::uniform(int dims, double dx, double eps_value) {
    VoxelGrid g;
    g.dx = dx;
    g.dims = dims;
    for (auto& arr : g.eps) arr.assign(static_cast<std::size_t>(dims) * dims * dims, eps_value);
    return g;
}

VoxelGrid voxelize(const DielectricScene& scene, double dx, int subsamples) {
    if (dx <= 0) throw SceneError("grid step must be positive");
    const double cells = scene.domain_size / dx;
    const int n = static_cast<int>(std::lround(cells));
    if (std::abs(cells - n) > 1e-9 || n < 1)
        throw SceneError("grid step does not divide the domain size");

    VoxelGrid g;
    g.dx = dx;
    g.dims = n;
    for (auto& arr : g.eps) arr.resize(static_cast<std::size_t>(n) * n * n);

    const double x0 = g.origin();
    const ColumnIndex index(scene, x0, dx, n);
    const int s = subsamples;
    const double sub = dx / s;
    const double off[3][3] = {{0.5, 0.0, 0.0}, {0.0, 0.5, 0.0}, {0.0, 0.0, 0.5}};

    for (int c = 0; c < 3; ++c) {
        std::size_t id = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k, ++id) {
                    const Vec3 node{x0 + (i + off[c][0]) * dx, x0 + (j + off[c][1]) * dx,
                                    x0 + (k + off[c][2]) * dx};
                    double acc = 0.0;
                    for (int a = 0; a < s; ++a)
                        for (int b = 0; b < s; ++b)
                            for (int d = 0; d < s; ++d)
                                acc += index.permittivity({node.x + (a + 0.5) * sub - dx / 2,
                                                          node.y + (b + 0.5) * sub - dx / 2,
                                                          node.z + (d + 0.5) * sub - dx / 2});
                    g.eps[c][id] = acc / (s * s * s);
                }
    }
    return g;
}

} // namespace nvsim
