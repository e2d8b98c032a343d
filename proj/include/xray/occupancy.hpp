#pragma once

#include <cstdint>
#include <vector>

#include "xray/errors.hpp"
#include "xray/parallel.hpp"
#include "xray/raster.hpp"
#include "xray/scene.hpp"
#include "xray/sensor.hpp"

namespace xray {

// Discretized candidate poses for the target: an n_tx x n_ty translation
// lattice with the given pixel stride crossed with n_rot rotation bins.
// include_true_pose additionally evaluates the target's actual pose when it
// falls off the lattice (used in simulation; disabled for dataset export).
struct CandidateGrid {
    int stride = 8;
    int n_tx = 64;
    int n_ty = 48;
    int n_rot = 16;
    bool include_true_pose = true;

    static CandidateGrid for_workspace(int width, int height, int stride = 8,
                                       int n_rot = 16, bool include_true_pose = true) {
        CandidateGrid g;
        g.stride = stride;
        g.n_tx = (width + stride - 1) / stride;
        g.n_ty = (height + stride - 1) / stride;
        g.n_rot = n_rot;
        g.include_true_pose = include_true_pose;
        return g;
    }

    bool contains(const Pose& pose) const {
        return pose.n_rot == n_rot && pose.rot_bin >= 0 && pose.rot_bin < n_rot &&
               pose.tx >= 0 && pose.tx % stride == 0 && pose.tx / stride < n_tx &&
               pose.ty >= 0 && pose.ty % stride == 0 && pose.ty / stride < n_ty;
    }

    std::size_t lattice_count() const {
        return static_cast<std::size_t>(n_tx) * n_ty * n_rot;
    }

    Pose pose_at(std::size_t index) const {
        const int ix = static_cast<int>(index % n_tx);
        const int iy = static_cast<int>((index / n_tx) % n_ty);
        const int r = static_cast<int>(index / (static_cast<std::size_t>(n_tx) * n_ty));
        return Pose{ix * stride, iy * stride, r, n_rot};
    }

    friend bool operator==(const CandidateGrid& a, const CandidateGrid& b) {
        return a.stride == b.stride && a.n_tx == b.n_tx && a.n_ty == b.n_ty &&
               a.n_rot == b.n_rot && a.include_true_pose == b.include_true_pose;
    }
};

// Per-pixel likelihood that the target's amodal mask covers the pixel, given
// the observation: the sum of amodal masks over all observation-consistent
// candidate poses, divided by the raster max. values(p) > 0 exactly on the
// union of matched amodal masks.
struct OccupancyDistribution {
    Raster<float> values;
    std::vector<Pose> matched_poses;
};

struct DistributionMetrics {
    double balanced_accuracy = 0.0;
    double iou = 0.0;
};

// Per-pixel max over instance extrusions (optionally skipping the target),
// floor elsewhere. Rest heights are taken as-is; nothing re-settles.
inline HeightField occluder_top(const Scene& scene, bool exclude_target) {
    HeightField top(scene.width, scene.height, static_cast<float>(scene.floor_height));
    for (const auto& inst : scene.instances) {
        if (exclude_target && inst.is_target) continue;
        const float t = top_height(inst);
        for (const auto& o : rotated_offsets(inst.footprint, inst.pose.rot_bin,
                                             inst.pose.n_rot)) {
            const int x = inst.pose.tx + o.dx, y = inst.pose.ty + o.dy;
            if (x >= 0 && x < scene.width && y >= 0 && y < scene.height)
                top.at(x, y) = std::max(top.at(x, y), t);
        }
    }
    return top;
}

// Scene with the target dropped but everything else frozen in place (no
// re-settling); the view the candidate consistency check reasons against.
inline Scene frozen_without_target(const Scene& scene) {
    Scene out = Scene::empty(scene.width, scene.height, scene.pixel_size,
                             scene.floor_height);
    out.next_id = scene.next_id;
    for (const auto& inst : scene.instances)
        if (!inst.is_target) out.instances.push_back(inst);
    out.mutable_heightmap() = occluder_top(scene, /*exclude_target=*/true);
    return out;
}

// Modal mask the target would have resting at floor level at this pose with
// every instance of the given scene unchanged: amodal pixels whose
// floor-level top strictly clears the surrounding top surface.
inline Mask candidate_modal_mask(const Scene& scene_without_target,
                                 const Footprint& target_footprint, const Pose& pose) {
    const HeightField& tops = scene_without_target.heightmap();
    const float cand_top = static_cast<float>(scene_without_target.floor_height +
                                              target_footprint.thickness);
    Mask mask(scene_without_target.width, scene_without_target.height, 0);
    for (const auto& o : rotated_offsets(target_footprint, pose.rot_bin, pose.n_rot)) {
        const int x = pose.tx + o.dx, y = pose.ty + o.dy;
        if (mask.in_bounds(x, y) && cand_top > tops.at(x, y)) mask.at(x, y) = 1;
    }
    return mask;
}

// A candidate matches the observation when both modal masks are blank, or
// their IoU strictly exceeds the threshold.
inline bool is_consistent(const Mask& candidate_modal, const Mask& observed_modal,
                          double threshold = 0.9) {
    if (!candidate_modal.same_shape(observed_modal))
        throw DimensionMismatch("is_consistent: shape mismatch");
    const std::size_t a = mask_area(candidate_modal);
    const std::size_t b = mask_area(observed_modal);
    if (a == 0 && b == 0) return true;
    return mask_iou(candidate_modal, observed_modal) > threshold;
}

inline std::size_t support_size(const OccupancyDistribution& dist) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < dist.values.size(); ++i) n += (dist.values[i] > 0.0f);
    return n;
}

// Support reduction between consecutive distributions; positive means the
// step shrank the region the target could hide in.
inline long long surrogate_reward(const OccupancyDistribution& dist_k,
                                  const OccupancyDistribution& dist_k1) {
    if (!dist_k.values.same_shape(dist_k1.values))
        throw DimensionMismatch("surrogate_reward: shape mismatch");
    return static_cast<long long>(support_size(dist_k)) -
           static_cast<long long>(support_size(dist_k1));
}

namespace detail {

struct CandidateWorkspace {
    std::vector<std::uint32_t> counts;
    std::vector<Pose> matched;
    std::vector<std::size_t> scratch_pixels;
};

// Evaluates one candidate against the observation; on a match, records the
// pose and accumulates its amodal pixels.
inline void evaluate_candidate(const Pose& pose, const std::vector<PixelOffset>& offsets,
                               int width, int height, float cand_top,
                               const HeightField& tops, const Mask& observed,
                               std::size_t observed_area, double threshold,
                               CandidateWorkspace& ws) {
    ws.scratch_pixels.clear();
    std::size_t modal = 0, inter = 0;
    for (const auto& o : offsets) {
        const int x = pose.tx + o.dx, y = pose.ty + o.dy;
        if (x < 0 || x >= width || y < 0 || y >= height) continue;
        const std::size_t p = static_cast<std::size_t>(y) * width + x;
        ws.scratch_pixels.push_back(p);
        if (cand_top > tops[p]) {
            ++modal;
            inter += (observed[p] != 0);
        }
    }
    bool match;
    if (modal == 0 && observed_area == 0) {
        match = true;
    } else {
        const std::size_t uni = modal + observed_area - inter;
        match = uni > 0 && static_cast<double>(inter) / static_cast<double>(uni) > threshold;
    }
    if (match) {
        ws.matched.push_back(pose);
        for (std::size_t p : ws.scratch_pixels) ++ws.counts[p];
    }
}

}  // namespace detail

// The exact occupancy distribution: enumerate the candidate lattice (plus the
// injected true pose when off-lattice), keep observation-consistent poses,
// sum their amodal masks and normalize by the raster max. Candidates are
// integer-accumulated per worker over disjoint index ranges and merged in
// range order, so the result is bit-identical for any worker count.
inline OccupancyDistribution occupancy_distribution(const Scene& scene,
                                                    const CandidateGrid& grid,
                                                    int n_workers = 1,
                                                    double iou_threshold = 0.9) {
    const ObjectInstance* target = scene.target();
    if (!target) throw NoTarget();

    const Mask observed = modal_mask(scene, target->id);
    const std::size_t observed_area = mask_area(observed);
    const HeightField tops = occluder_top(scene, /*exclude_target=*/true);
    const float cand_top = static_cast<float>(scene.floor_height +
                                              target->footprint.thickness);

    std::vector<std::vector<PixelOffset>> offsets_by_bin(grid.n_rot);
    for (int r = 0; r < grid.n_rot; ++r)
        offsets_by_bin[r] = rotated_offsets(target->footprint, r, grid.n_rot);

    const bool inject = grid.include_true_pose && !grid.contains(target->pose);
    std::vector<PixelOffset> injected_offsets;
    if (inject)
        injected_offsets = rotated_offsets(target->footprint, target->pose.rot_bin,
                                           target->pose.n_rot);

    const std::size_t total = grid.lattice_count() + (inject ? 1 : 0);
    const std::size_t npix = static_cast<std::size_t>(scene.width) * scene.height;

    if (n_workers < 1) n_workers = 1;
    std::vector<detail::CandidateWorkspace> workers(
        static_cast<std::size_t>(n_workers));
    for (auto& w : workers) w.counts.assign(npix, 0);

    parallel_chunks(total, n_workers, [&](int w, std::size_t begin, std::size_t end) {
        auto& ws = workers[static_cast<std::size_t>(w)];
        for (std::size_t c = begin; c < end; ++c) {
            if (c < grid.lattice_count()) {
                const Pose pose = grid.pose_at(c);
                detail::evaluate_candidate(pose, offsets_by_bin[pose.rot_bin],
                                           scene.width, scene.height, cand_top, tops,
                                           observed, observed_area, iou_threshold, ws);
            } else {
                detail::evaluate_candidate(target->pose, injected_offsets, scene.width,
                                           scene.height, cand_top, tops, observed,
                                           observed_area, iou_threshold, ws);
            }
        }
    });

    std::vector<std::uint32_t> counts(npix, 0);
    OccupancyDistribution dist;
    for (auto& w : workers) {
        for (std::size_t i = 0; i < npix; ++i) counts[i] += w.counts[i];
        dist.matched_poses.insert(dist.matched_poses.end(), w.matched.begin(),
                                  w.matched.end());
    }

    std::uint32_t max_count = 0;
    for (std::uint32_t c : counts) max_count = std::max(max_count, c);

    dist.values = Raster<float>(scene.width, scene.height, 0.0f);
    if (max_count > 0) {
        const float inv = static_cast<float>(max_count);
        for (std::size_t i = 0; i < npix; ++i)
            dist.values[i] = static_cast<float>(counts[i]) / inv;
    }
    return dist;
}

// Balanced accuracy and IoU between two normalized distributions. A pixel is
// positive when its ground-truth value exceeds 0.1 and counted correct when
// the prediction lies within 0.2 of the ground truth; a class absent from the
// ground truth scores accuracy 1.
inline DistributionMetrics distribution_metrics(const Raster<float>& pred,
                                                const Raster<float>& gt) {
    if (!pred.same_shape(gt))
        throw DimensionMismatch("distribution_metrics: shape mismatch");
    std::size_t pos_total = 0, pos_ok = 0, neg_total = 0, neg_ok = 0;
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        const double g = gt[i], p = pred[i];
        const bool within = std::fabs(p - g) <= 0.2;
        const bool gpos = g > 0.1, ppos = p > 0.1;
        if (gpos) {
            ++pos_total;
            pos_ok += within;
        } else {
            ++neg_total;
            neg_ok += within;
        }
        inter += (gpos && ppos);
        uni += (gpos || ppos);
    }
    DistributionMetrics m;
    const double acc_p = pos_total == 0 ? 1.0 : static_cast<double>(pos_ok) / pos_total;
    const double acc_n = neg_total == 0 ? 1.0 : static_cast<double>(neg_ok) / neg_total;
    m.balanced_accuracy = 0.5 * (acc_p + acc_n);
    m.iou = uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
    return m;
}

}  // namespace xray
