#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "xray/raster.hpp"

namespace xray {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Planar pose on the workspace pixel grid. rot_bin indexes a discretized
// rotation: angle = rot_bin * 2*pi / n_rot.
struct Pose {
    int tx = 0;
    int ty = 0;
    int rot_bin = 0;
    int n_rot = 16;

    double angle() const { return kTwoPi * rot_bin / n_rot; }

    friend bool operator==(const Pose& a, const Pose& b) {
        return a.tx == b.tx && a.ty == b.ty && a.rot_bin == b.rot_bin &&
               a.n_rot == b.n_rot;
    }
};

// Extruded 2D object footprint: a binary occupancy grid in object-local
// pixels, a rotation origin in continuous grid coordinates (cell corners are
// integers, cell centers are half-integers), and an extrusion thickness in
// meters.
struct Footprint {
    int grid_w = 0;
    int grid_h = 0;
    std::vector<std::uint8_t> cells;  // row-major, grid_w * grid_h
    double origin_x = 0.0;
    double origin_y = 0.0;
    double thickness = 0.0;

    bool cell(int i, int j) const {
        return cells[static_cast<std::size_t>(j) * grid_w + i] != 0;
    }

    std::size_t cell_count() const {
        std::size_t n = 0;
        for (auto c : cells) n += (c != 0);
        return n;
    }

    void validate() const {
        if (grid_w <= 0 || grid_h <= 0 ||
            cells.size() != static_cast<std::size_t>(grid_w) * grid_h)
            throw std::invalid_argument("footprint: bad grid dimensions");
        if (cell_count() == 0)
            throw std::invalid_argument("footprint: no set cells");
        if (thickness <= 0.0)
            throw std::invalid_argument("footprint: thickness must be > 0");
        if (origin_x < 0.0 || origin_x > grid_w || origin_y < 0.0 || origin_y > grid_h)
            throw std::invalid_argument("footprint: origin outside grid bounds");
    }

    // Solid w x h rectangle rotating about its geometric center.
    static Footprint rect(int w, int h, double thickness) {
        Footprint f;
        f.grid_w = w;
        f.grid_h = h;
        f.cells.assign(static_cast<std::size_t>(w) * h, 1);
        f.origin_x = w / 2.0;
        f.origin_y = h / 2.0;
        f.thickness = thickness;
        f.validate();
        return f;
    }

    // Disc of the given integer radius on a (2r+1)^2 grid, centered on the
    // middle cell.
    static Footprint disc(int radius, double thickness) {
        const int d = 2 * radius + 1;
        Footprint f;
        f.grid_w = d;
        f.grid_h = d;
        f.cells.assign(static_cast<std::size_t>(d) * d, 0);
        const double c = radius + 0.5;
        const double r2 = (radius + 0.5) * (radius + 0.5);
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < d; ++i) {
                const double dx = i + 0.5 - c, dy = j + 0.5 - c;
                if (dx * dx + dy * dy <= r2)
                    f.cells[static_cast<std::size_t>(j) * d + i] = 1;
            }
        f.origin_x = c;
        f.origin_y = c;
        f.thickness = thickness;
        f.validate();
        return f;
    }

    // w x h rectangle with a cut_w x cut_h notch removed from the top-right
    // corner; rotates about the outer rectangle's center.
    static Footprint l_shape(int w, int h, int cut_w, int cut_h, double thickness) {
        Footprint f = rect(w, h, thickness);
        for (int j = h - cut_h; j < h; ++j)
            for (int i = w - cut_w; i < w; ++i)
                f.cells[static_cast<std::size_t>(j) * w + i] = 0;
        f.validate();
        return f;
    }

    friend bool operator==(const Footprint& a, const Footprint& b) {
        return a.grid_w == b.grid_w && a.grid_h == b.grid_h && a.cells == b.cells &&
               a.origin_x == b.origin_x && a.origin_y == b.origin_y &&
               a.thickness == b.thickness;
    }
};

struct PixelOffset {
    int dx = 0;
    int dy = 0;
};

namespace detail {

// cos/sin of the bin angle, snapped to exact 0/±1 so that quarter-turn bins
// rotate cells onto cells with no floating-point boundary drift.
inline void bin_trig(int rot_bin, int n_rot, double& c, double& s) {
    const double a = kTwoPi * rot_bin / n_rot;
    c = std::cos(a);
    s = std::sin(a);
    const double eps = 1e-12;
    if (std::fabs(c) < eps) c = 0.0;
    if (std::fabs(s) < eps) s = 0.0;
    if (std::fabs(c - 1.0) < eps) c = 1.0;
    if (std::fabs(c + 1.0) < eps) c = -1.0;
    if (std::fabs(s - 1.0) < eps) s = 1.0;
    if (std::fabs(s + 1.0) < eps) s = -1.0;
}

inline bool is_half_integer(double v) { return v - std::floor(v) == 0.5; }

}  // namespace detail

// Pixels covered by the footprint rotated by the bin angle about its origin,
// as offsets relative to the pose translation. Nearest-neighbor resampling:
// a workspace pixel is covered iff its center, pulled back through the
// inverse rotation, lands in a set footprint cell.
//
// Probe centers sit at offset + delta where delta is 0.5 against an
// integer origin coordinate and 0 against a half-integer one, which keeps
// probes off cell boundaries at the four exact quarter-turn angles. In
// particular rect() footprints reproduce their 2-fold symmetry exactly and
// rot_bin 0 is an exact translation of the grid.
inline std::vector<PixelOffset> rotated_offsets(const Footprint& fp, int rot_bin,
                                                int n_rot) {
    double c, s;
    detail::bin_trig(rot_bin, n_rot, c, s);
    const double dx0 = detail::is_half_integer(fp.origin_x) ? 0.0 : 0.5;
    const double dy0 = detail::is_half_integer(fp.origin_y) ? 0.0 : 0.5;

    const double ex = std::max(fp.origin_x, fp.grid_w - fp.origin_x);
    const double ey = std::max(fp.origin_y, fp.grid_h - fp.origin_y);
    const int radius = static_cast<int>(std::ceil(std::hypot(ex, ey))) + 1;

    std::vector<PixelOffset> out;
    out.reserve(fp.cell_count() + 16);
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            const double ux = dx + dx0, uy = dy + dy0;
            const double sx = c * ux + s * uy + fp.origin_x;
            const double sy = -s * ux + c * uy + fp.origin_y;
            const int i = static_cast<int>(std::floor(sx));
            const int j = static_cast<int>(std::floor(sy));
            if (i >= 0 && i < fp.grid_w && j >= 0 && j < fp.grid_h && fp.cell(i, j))
                out.push_back({dx, dy});
        }
    }
    return out;
}

// Binary mask of the footprint at the given pose, clipped to a width x height
// workspace. Fully off-workspace placements yield an empty mask.
inline Mask rasterize(const Footprint& fp, const Pose& pose, int width, int height) {
    Mask mask(width, height, 0);
    for (const auto& o : rotated_offsets(fp, pose.rot_bin, pose.n_rot)) {
        const int x = pose.tx + o.dx, y = pose.ty + o.dy;
        if (mask.in_bounds(x, y)) mask.at(x, y) = 1;
    }
    return mask;
}

}  // namespace xray
