#pragma once

#include <cstdint>
#include <vector>

#include "xray/errors.hpp"
#include "xray/raster.hpp"
#include "xray/scene.hpp"

namespace xray {

inline constexpr double kDefaultCameraHeight = 0.8;  // meters above the floor

// Orthographic top-down depth: depth(p) = camera_height - heightmap(p).
inline DepthImage render_depth(const Scene& scene,
                               double camera_height = kDefaultCameraHeight) {
    DepthImage img;
    img.camera_height = static_cast<float>(camera_height);
    img.values = Raster<float>(scene.width, scene.height, 0.0f);
    const auto& hm = scene.heightmap();
    for (std::size_t i = 0; i < hm.size(); ++i)
        img.values[i] = img.camera_height - hm[i];
    return img;
}

// Per-pixel index (into scene.instances) of the visible instance, or -1 where
// the floor shows. Equal tops resolve to the later-placed instance.
inline std::vector<int> visibility_index_map(const Scene& scene) {
    std::vector<int> winner(static_cast<std::size_t>(scene.width) * scene.height, -1);
    std::vector<float> best(winner.size(), 0.0f);
    for (std::size_t k = 0; k < scene.instances.size(); ++k) {
        const auto& inst = scene.instances[k];
        const float top = top_height(inst);
        for (const auto& o : rotated_offsets(inst.footprint, inst.pose.rot_bin,
                                             inst.pose.n_rot)) {
            const int x = inst.pose.tx + o.dx, y = inst.pose.ty + o.dy;
            if (x < 0 || x >= scene.width || y < 0 || y >= scene.height) continue;
            const std::size_t i = static_cast<std::size_t>(y) * scene.width + x;
            if (winner[i] < 0 || top >= best[i]) {
                winner[i] = static_cast<int>(k);
                best[i] = top;
            }
        }
    }
    return winner;
}

// All pixels the instance would occupy, occluded or not.
inline Mask amodal_mask(const Scene& scene, int id) {
    const ObjectInstance* inst = scene.find(id);
    if (!inst) throw UnknownId(id);
    return instance_mask(scene, *inst);
}

// Visible pixels of the instance: where its top surface beats every other
// covering instance (ties go to the later-placed one).
inline Mask modal_mask(const Scene& scene, int id) {
    const ObjectInstance* inst = scene.find(id);
    if (!inst) throw UnknownId(id);
    const auto winner = visibility_index_map(scene);
    Mask mask(scene.width, scene.height, 0);
    int index = -1;
    for (std::size_t k = 0; k < scene.instances.size(); ++k)
        if (scene.instances[k].id == id) index = static_cast<int>(k);
    for (std::size_t i = 0; i < winner.size(); ++i)
        if (winner[i] == index) mask[i] = 1;
    return mask;
}

// Modal masks for every instance from one visibility pass, ordered like
// scene.instances.
inline std::vector<Mask> modal_masks(const Scene& scene) {
    const auto winner = visibility_index_map(scene);
    std::vector<Mask> masks(scene.instances.size(),
                            Mask(scene.width, scene.height, 0));
    for (std::size_t i = 0; i < winner.size(); ++i)
        if (winner[i] >= 0) masks[static_cast<std::size_t>(winner[i])][i] = 1;
    return masks;
}

// What the policy sees: the target's modal mask plus the depth image. The
// depth channel is stored once; consumers that want the two-channel depth
// convention duplicate it.
struct AugmentedObservation {
    Mask target_modal;
    DepthImage depth;
};

inline AugmentedObservation observe(const Scene& scene,
                                    double camera_height = kDefaultCameraHeight) {
    const ObjectInstance* target = scene.target();
    if (!target) throw NoTarget();
    AugmentedObservation obs;
    obs.target_modal = modal_mask(scene, target->id);
    obs.depth = render_depth(scene, camera_height);
    return obs;
}

}  // namespace xray
