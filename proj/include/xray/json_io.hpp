#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "xray/errors.hpp"
#include "xray/footprint.hpp"
#include "xray/heapgen.hpp"
#include "xray/occupancy.hpp"
#include "xray/search.hpp"

// JSON bindings for the value types that cross the process boundary
// (dataset sidecars, manifests, rollout logs). Footprint cells are encoded
// as one '0'/'1' string per row to stay diffable.

namespace xray {

inline void to_json(nlohmann::json& j, const Pose& p) {
    j = {{"tx", p.tx}, {"ty", p.ty}, {"rot_bin", p.rot_bin}, {"n_rot", p.n_rot}};
}

inline void from_json(const nlohmann::json& j, Pose& p) {
    j.at("tx").get_to(p.tx);
    j.at("ty").get_to(p.ty);
    j.at("rot_bin").get_to(p.rot_bin);
    j.at("n_rot").get_to(p.n_rot);
}

inline void to_json(nlohmann::json& j, const Footprint& f) {
    std::vector<std::string> rows;
    rows.reserve(static_cast<std::size_t>(f.grid_h));
    for (int y = 0; y < f.grid_h; ++y) {
        std::string row(static_cast<std::size_t>(f.grid_w), '0');
        for (int x = 0; x < f.grid_w; ++x)
            if (f.cell(x, y)) row[static_cast<std::size_t>(x)] = '1';
        rows.push_back(std::move(row));
    }
    j = {{"grid_w", f.grid_w},       {"grid_h", f.grid_h},
         {"origin_x", f.origin_x},   {"origin_y", f.origin_y},
         {"thickness", f.thickness}, {"rows", rows}};
}

inline void from_json(const nlohmann::json& j, Footprint& f) {
    j.at("grid_w").get_to(f.grid_w);
    j.at("grid_h").get_to(f.grid_h);
    j.at("origin_x").get_to(f.origin_x);
    j.at("origin_y").get_to(f.origin_y);
    j.at("thickness").get_to(f.thickness);
    const auto rows = j.at("rows").get<std::vector<std::string>>();
    if (static_cast<int>(rows.size()) != f.grid_h)
        throw FormatError("footprint row count mismatch");
    f.cells.assign(static_cast<std::size_t>(f.grid_w) * f.grid_h, 0);
    for (int y = 0; y < f.grid_h; ++y) {
        if (static_cast<int>(rows[y].size()) != f.grid_w)
            throw FormatError("footprint row width mismatch");
        for (int x = 0; x < f.grid_w; ++x)
            f.cells[static_cast<std::size_t>(y) * f.grid_w + x] =
                rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] == '1';
    }
    f.validate();
}

inline void to_json(nlohmann::json& j, const FootprintLibrary& lib) {
    j = {{"rect_min_side", lib.rect_min_side},
         {"rect_max_side", lib.rect_max_side},
         {"disc_min_radius", lib.disc_min_radius},
         {"disc_max_radius", lib.disc_max_radius},
         {"l_min_side", lib.l_min_side},
         {"l_max_side", lib.l_max_side},
         {"thickness_min", lib.thickness_min},
         {"thickness_max", lib.thickness_max}};
}

inline void from_json(const nlohmann::json& j, FootprintLibrary& lib) {
    j.at("rect_min_side").get_to(lib.rect_min_side);
    j.at("rect_max_side").get_to(lib.rect_max_side);
    j.at("disc_min_radius").get_to(lib.disc_min_radius);
    j.at("disc_max_radius").get_to(lib.disc_max_radius);
    j.at("l_min_side").get_to(lib.l_min_side);
    j.at("l_max_side").get_to(lib.l_max_side);
    j.at("thickness_min").get_to(lib.thickness_min);
    j.at("thickness_max").get_to(lib.thickness_max);
}

inline void to_json(nlohmann::json& j, const HeapConfig& c) {
    j = {{"n_lambda", c.n_lambda},
         {"n_min", c.n_min},
         {"n_max", c.n_max},
         {"placement_sigma", c.placement_sigma},
         {"center_range_frac", c.center_range_frac},
         {"width", c.width},
         {"height", c.height},
         {"pixel_size", c.pixel_size},
         {"n_rot", c.n_rot},
         {"target", c.target_spec},
         {"library", c.footprint_library}};
}

inline void from_json(const nlohmann::json& j, HeapConfig& c) {
    j.at("n_lambda").get_to(c.n_lambda);
    j.at("n_min").get_to(c.n_min);
    j.at("n_max").get_to(c.n_max);
    j.at("placement_sigma").get_to(c.placement_sigma);
    j.at("center_range_frac").get_to(c.center_range_frac);
    j.at("width").get_to(c.width);
    j.at("height").get_to(c.height);
    j.at("pixel_size").get_to(c.pixel_size);
    j.at("n_rot").get_to(c.n_rot);
    j.at("target").get_to(c.target_spec);
    j.at("library").get_to(c.footprint_library);
    c.validate();
}

inline void to_json(nlohmann::json& j, const CandidateGrid& g) {
    j = {{"stride", g.stride},
         {"n_tx", g.n_tx},
         {"n_ty", g.n_ty},
         {"n_rot", g.n_rot},
         {"include_true_pose", g.include_true_pose}};
}

inline void from_json(const nlohmann::json& j, CandidateGrid& g) {
    j.at("stride").get_to(g.stride);
    j.at("n_tx").get_to(g.n_tx);
    j.at("n_ty").get_to(g.n_ty);
    j.at("n_rot").get_to(g.n_rot);
    j.at("include_true_pose").get_to(g.include_true_pose);
}

inline void to_json(nlohmann::json& j, const RolloutStep& s) {
    j = {{"index", s.index},
         {"grasped", s.grasped},
         {"reward", s.reward},
         {"target_visible", s.target_visible}};
    if (s.action_id) j["action_id"] = *s.action_id;
    if (s.support_before) j["support_before"] = *s.support_before;
    if (s.support_after) j["support_after"] = *s.support_after;
    if (s.surrogate_reward) j["surrogate_reward"] = *s.surrogate_reward;
}

inline void from_json(const nlohmann::json& j, RolloutStep& s) {
    j.at("index").get_to(s.index);
    j.at("grasped").get_to(s.grasped);
    j.at("reward").get_to(s.reward);
    j.at("target_visible").get_to(s.target_visible);
    if (j.contains("action_id")) s.action_id = j.at("action_id").get<int>();
    if (j.contains("support_before"))
        s.support_before = j.at("support_before").get<long long>();
    if (j.contains("support_after"))
        s.support_after = j.at("support_after").get<long long>();
    if (j.contains("surrogate_reward"))
        s.surrogate_reward = j.at("surrogate_reward").get<long long>();
}

inline void to_json(nlohmann::json& j, const RolloutRecord& r) {
    j = {{"seed", r.seed},
         {"policy", policy_name(r.policy)},
         {"horizon", r.horizon},
         {"gamma", r.gamma},
         {"success", r.success},
         {"action_count", r.action_count},
         {"discounted_return", r.discounted_return},
         {"steps", r.steps}};
}

inline void from_json(const nlohmann::json& j, RolloutRecord& r) {
    j.at("seed").get_to(r.seed);
    const auto policy = parse_policy(j.at("policy").get<std::string>());
    if (!policy) throw FormatError("unknown policy name");
    r.policy = *policy;
    j.at("horizon").get_to(r.horizon);
    j.at("gamma").get_to(r.gamma);
    j.at("success").get_to(r.success);
    j.at("action_count").get_to(r.action_count);
    j.at("discounted_return").get_to(r.discounted_return);
    j.at("steps").get_to(r.steps);
}

}  // namespace xray
