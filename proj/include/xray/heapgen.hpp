#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "xray/rng.hpp"
#include "xray/scene.hpp"

namespace xray {

// Procedural stand-ins for mesh distractors: rectangles, L-shapes and discs
// with sampled dimensions (pixels) and thicknesses (meters). Ranges are
// inclusive. Dataset splits use two libraries with disjoint ranges so
// training shapes never appear in test heaps.
struct FootprintLibrary {
    int rect_min_side = 6;
    int rect_max_side = 19;
    int disc_min_radius = 3;
    int disc_max_radius = 10;
    int l_min_side = 8;
    int l_max_side = 19;
    double thickness_min = 0.010;
    double thickness_max = 0.050;

    Footprint sample(Rng& rng) const {
        const double t = rng.uniform(thickness_min, thickness_max);
        switch (rng.next_below(3)) {
            case 0: {
                const int w = sample_side(rng, rect_min_side, rect_max_side);
                const int h = sample_side(rng, rect_min_side, rect_max_side);
                return Footprint::rect(w, h, t);
            }
            case 1: {
                const int r = sample_side(rng, disc_min_radius, disc_max_radius);
                return Footprint::disc(r, t);
            }
            default: {
                const int w = sample_side(rng, l_min_side, l_max_side);
                const int h = sample_side(rng, l_min_side, l_max_side);
                return Footprint::l_shape(w, h, std::max(1, w / 2),
                                          std::max(1, h / 2), t);
            }
        }
    }

    // Splits every parameter range at the given fraction into two disjoint
    // sub-libraries (lower part, upper part).
    std::pair<FootprintLibrary, FootprintLibrary> split(double frac = 0.6) const {
        auto cut = [frac](int lo, int hi) {
            int c = lo + static_cast<int>(std::floor((hi - lo) * frac));
            if (c >= hi) c = hi - 1;
            if (c < lo) c = lo;
            return c;
        };
        FootprintLibrary a = *this, b = *this;
        a.rect_max_side = cut(rect_min_side, rect_max_side);
        b.rect_min_side = a.rect_max_side + 1;
        a.disc_max_radius = cut(disc_min_radius, disc_max_radius);
        b.disc_min_radius = a.disc_max_radius + 1;
        a.l_max_side = cut(l_min_side, l_max_side);
        b.l_min_side = a.l_max_side + 1;
        const double tcut = thickness_min + (thickness_max - thickness_min) * frac;
        a.thickness_max = tcut;
        b.thickness_min = std::nextafter(tcut, thickness_max);
        return {a, b};
    }

    bool disjoint_from(const FootprintLibrary& other) const {
        auto overlap_i = [](int lo1, int hi1, int lo2, int hi2) {
            return lo1 <= hi2 && lo2 <= hi1;
        };
        auto overlap_d = [](double lo1, double hi1, double lo2, double hi2) {
            return lo1 <= hi2 && lo2 <= hi1;
        };
        return !overlap_i(rect_min_side, rect_max_side, other.rect_min_side,
                          other.rect_max_side) &&
               !overlap_i(disc_min_radius, disc_max_radius, other.disc_min_radius,
                          other.disc_max_radius) &&
               !overlap_i(l_min_side, l_max_side, other.l_min_side,
                          other.l_max_side) &&
               !overlap_d(thickness_min, thickness_max, other.thickness_min,
                          other.thickness_max);
    }

private:
    static int sample_side(Rng& rng, int lo, int hi) {
        return lo + static_cast<int>(rng.next_below(
                        static_cast<std::uint64_t>(hi - lo + 1)));
    }
};

// Heap sampling parameters. The distractor count is Poisson(n_lambda)
// truncated to [n_min, n_max]; placements are Gaussian around a heap center
// sampled uniformly from the central center_range_frac of the workspace.
struct HeapConfig {
    double n_lambda = 12.0;
    int n_min = 10;
    int n_max = 15;
    double placement_sigma = 15.0;  // pixels
    // The target lands closer to the heap center than the distractors
    // (sigma scaled by this), so the pile usually buries it.
    double target_sigma_frac = 0.5;
    double center_range_frac = 0.25;
    int width = 256;
    int height = 192;
    double pixel_size = 0.003;  // meters per pixel
    int n_rot = 16;
    Footprint target_spec = Footprint::rect(10, 10, 0.005);
    FootprintLibrary footprint_library;

    // Fixed 14-distractor heaps (15 objects total) used by the policy
    // benchmark.
    static HeapConfig simulation_preset() {
        HeapConfig c;
        c.n_min = 14;
        c.n_max = 14;
        return c;
    }

    void validate() const {
        if (n_min > n_max) throw std::invalid_argument("heap config: n_min > n_max");
        if (n_min < 0) throw std::invalid_argument("heap config: negative n_min");
        if (placement_sigma <= 0.0)
            throw std::invalid_argument("heap config: placement_sigma must be > 0");
        if (target_sigma_frac < 0.0)
            throw std::invalid_argument("heap config: negative target_sigma_frac");
        if (width <= 0 || height <= 0)
            throw std::invalid_argument("heap config: bad workspace dims");
        target_spec.validate();
    }
};

// Poisson(n_lambda) rejection-sampled into [n_min, n_max]. Pinned bounds
// skip the draw entirely (rejection could spin for counts far from lambda).
inline int sample_object_count(Rng& rng, const HeapConfig& config) {
    if (config.n_min == config.n_max) return config.n_min;
    for (;;) {
        const int n = rng.poisson(config.n_lambda);
        if (n >= config.n_min && n <= config.n_max) return n;
    }
}

namespace detail {

inline Pose sample_pose(Rng& rng, double cx, double cy, double sigma, int n_rot) {
    Pose p;
    p.tx = static_cast<int>(std::lround(rng.gaussian(cx, sigma)));
    p.ty = static_cast<int>(std::lround(rng.gaussian(cy, sigma)));
    p.rot_bin = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n_rot)));
    p.n_rot = n_rot;
    return p;
}

}  // namespace detail

// Seeded heap generation: the target drops first (resampled until it lands on
// the workspace), then N distractors drop one by one; distractors that fall
// entirely off the workspace are discarded without resampling. Identical
// (seed, config) pairs produce byte-identical scenes.
inline Scene sample_heap(std::uint64_t seed, const HeapConfig& config) {
    config.validate();
    Rng rng(seed, /*stream=*/0);
    Scene scene = Scene::empty(config.width, config.height, config.pixel_size);

    const int n = sample_object_count(rng, config);
    const double fx = config.center_range_frac * config.width / 2.0;
    const double fy = config.center_range_frac * config.height / 2.0;
    const double cx = config.width / 2.0 + rng.uniform(-fx, fx);
    const double cy = config.height / 2.0 + rng.uniform(-fy, fy);

    const double target_sigma = config.placement_sigma * config.target_sigma_frac;
    for (int attempt = 0; attempt < 10000; ++attempt) {
        const Pose pose = detail::sample_pose(rng, cx, cy, target_sigma, config.n_rot);
        try {
            scene = place(scene, config.target_spec, pose, /*is_target=*/true);
            break;
        } catch (const EmptyPlacement&) {
        }
    }
    if (!scene.target()) {  // degenerate sigma/workspace combination
        Pose center{config.width / 2, config.height / 2, 0, config.n_rot};
        scene = place(scene, config.target_spec, center, /*is_target=*/true);
    }

    for (int i = 0; i < n; ++i) {
        const Footprint fp = config.footprint_library.sample(rng);
        const Pose pose =
            detail::sample_pose(rng, cx, cy, config.placement_sigma, config.n_rot);
        try {
            scene = place(scene, fp, pose);
        } catch (const EmptyPlacement&) {
            // fell outside the workspace; dropped
        }
    }
    return scene;
}

// Canonical 16x12 test scene: a 4x2 target (thickness 1.0) at (5,3,0) buried
// under a 6x6 occluder (thickness 2.0), plus a free-standing 3x3 box.
inline Scene fixture_f1() {
    Scene s = Scene::empty(16, 12, 0.01);
    s = place(s, Footprint::rect(4, 2, 1.0), Pose{5, 3, 0, 16}, /*is_target=*/true);
    s = place(s, Footprint::rect(6, 6, 2.0), Pose{6, 5, 0, 16});
    s = place(s, Footprint::rect(3, 3, 1.5), Pose{12, 9, 0, 16});
    return s;
}

}  // namespace xray
