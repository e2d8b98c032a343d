#pragma once

#include <string>
#include <utility>
#include <vector>

#include "xray/errors.hpp"
#include "xray/footprint.hpp"
#include "xray/raster.hpp"

namespace xray {

struct ObjectInstance {
    int id = 0;
    Footprint footprint;
    Pose pose;
    double rest_height = 0.0;  // bottom face height, meters
    bool is_target = false;
};

// Top-surface height of an instance. All height comparisons in the library go
// through this single float narrowing so heightmap contents, visibility tests
// and candidate checks agree bit-exactly.
inline float top_height(const ObjectInstance& inst) {
    return static_cast<float>(inst.rest_height + inst.footprint.thickness);
}

// Workspace state: ordered object instances on a planar floor plus the
// derived heightmap. Immutable by convention; operations return new values.
struct Scene {
    int width = 0;
    int height = 0;
    double pixel_size = 0.003;  // meters per pixel
    double floor_height = 0.0;
    std::vector<ObjectInstance> instances;
    int next_id = 0;

    static Scene empty(int width, int height, double pixel_size = 0.003,
                       double floor_height = 0.0) {
        Scene s;
        s.width = width;
        s.height = height;
        s.pixel_size = pixel_size;
        s.floor_height = floor_height;
        s.heightmap_ = HeightField(width, height, static_cast<float>(floor_height));
        return s;
    }

    const HeightField& heightmap() const { return heightmap_; }

    const ObjectInstance* find(int id) const {
        for (const auto& inst : instances)
            if (inst.id == id) return &inst;
        return nullptr;
    }

    const ObjectInstance* target() const {
        for (const auto& inst : instances)
            if (inst.is_target) return &inst;
        return nullptr;
    }

    HeightField& mutable_heightmap() { return heightmap_; }

private:
    HeightField heightmap_;
};

inline Mask instance_mask(const Scene& scene, const ObjectInstance& inst) {
    return rasterize(inst.footprint, inst.pose, scene.width, scene.height);
}

// Settle rule: the object rests flat at the maximum heightmap value under its
// footprint. Throws EmptyPlacement when the mask clips to nothing, i.e. the
// object fell outside the workspace.
inline Scene place(const Scene& scene, const Footprint& footprint, const Pose& pose,
                   bool is_target = false) {
    footprint.validate();
    std::vector<std::pair<int, int>> covered;
    for (const auto& o : rotated_offsets(footprint, pose.rot_bin, pose.n_rot)) {
        const int x = pose.tx + o.dx, y = pose.ty + o.dy;
        if (x >= 0 && x < scene.width && y >= 0 && y < scene.height)
            covered.emplace_back(x, y);
    }
    if (covered.empty())
        throw EmptyPlacement("placement at (" + std::to_string(pose.tx) + "," +
                             std::to_string(pose.ty) + ") clips to empty");

    float rest = static_cast<float>(scene.floor_height);
    for (const auto& [x, y] : covered)
        rest = std::max(rest, scene.heightmap().at(x, y));

    Scene out = scene;
    ObjectInstance inst;
    inst.id = out.next_id++;
    inst.footprint = footprint;
    inst.pose = pose;
    inst.rest_height = rest;
    inst.is_target = is_target;
    const float top = top_height(inst);
    for (const auto& [x, y] : covered) out.mutable_heightmap().at(x, y) = top;
    out.instances.push_back(std::move(inst));
    return out;
}

// Rebuilds a scene by replaying the given instances in order through the
// settle rule, preserving ids and flags.
inline Scene resettle(const Scene& like, const std::vector<ObjectInstance>& ordered) {
    Scene out = Scene::empty(like.width, like.height, like.pixel_size, like.floor_height);
    for (const auto& inst : ordered) {
        out = place(out, inst.footprint, inst.pose, inst.is_target);
        out.instances.back().id = inst.id;
    }
    out.next_id = like.next_id;
    return out;
}

// Removes an instance; the remaining objects re-settle in their original
// placement order.
inline Scene remove(const Scene& scene, int id) {
    std::vector<ObjectInstance> rest;
    rest.reserve(scene.instances.size());
    bool found = false;
    for (const auto& inst : scene.instances) {
        if (inst.id == id)
            found = true;
        else
            rest.push_back(inst);
    }
    if (!found) throw UnknownId(id);
    return resettle(scene, rest);
}

}  // namespace xray
