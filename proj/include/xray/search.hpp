#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xray/heapgen.hpp"
#include "xray/occupancy.hpp"
#include "xray/rng.hpp"
#include "xray/scene.hpp"
#include "xray/sensor.hpp"

namespace xray {

struct GraspAction {
    int object_id = 0;
};

enum class PolicyKind { XRay, Largest, Random };

inline const char* policy_name(PolicyKind p) {
    switch (p) {
        case PolicyKind::XRay: return "xray";
        case PolicyKind::Largest: return "largest";
        default: return "random";
    }
}

inline std::optional<PolicyKind> parse_policy(const std::string& name) {
    if (name == "xray") return PolicyKind::XRay;
    if (name == "largest") return PolicyKind::Largest;
    if (name == "random") return PolicyKind::Random;
    return std::nullopt;
}

inline constexpr double kDefaultTauGrasp = 0.75;

// Exposure-based grasp model: an object can be grasped when at least
// tau_grasp of its amodal area is visible from above.
inline bool graspable(const Scene& scene, int id, double tau_grasp = kDefaultTauGrasp) {
    const ObjectInstance* inst = scene.find(id);
    if (!inst) throw UnknownId(id);
    const double amodal = static_cast<double>(mask_area(amodal_mask(scene, id)));
    const double modal = static_cast<double>(mask_area(modal_mask(scene, id)));
    return modal / amodal >= tau_grasp;
}

struct MaskScore {
    int id = 0;
    double score = 0.0;
};

// Per-instance overlap between the modal mask and the distribution:
// score(i) = sum_p dist(p) * modal_i(p), sorted by (-score, id).
inline std::vector<MaskScore> score_masks(const OccupancyDistribution& dist,
                                          const Scene& scene) {
    const auto masks = modal_masks(scene);
    std::vector<MaskScore> scores;
    scores.reserve(masks.size());
    for (std::size_t k = 0; k < masks.size(); ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < masks[k].size(); ++i)
            if (masks[k][i]) s += dist.values[i];
        scores.push_back({scene.instances[k].id, s});
    }
    std::sort(scores.begin(), scores.end(), [](const MaskScore& a, const MaskScore& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    return scores;
}

namespace detail {

struct InstanceView {
    int id = 0;
    std::size_t modal_area = 0;
    std::size_t amodal_area = 0;
    bool is_target = false;

    bool grasp_ok(double tau) const {
        return static_cast<double>(modal_area) / static_cast<double>(amodal_area) >= tau;
    }
};

inline std::vector<InstanceView> instance_views(const Scene& scene) {
    const auto masks = modal_masks(scene);
    std::vector<InstanceView> views(scene.instances.size());
    for (std::size_t k = 0; k < masks.size(); ++k) {
        views[k].id = scene.instances[k].id;
        views[k].modal_area = mask_area(masks[k]);
        views[k].amodal_area = mask_area(instance_mask(scene, scene.instances[k]));
        views[k].is_target = scene.instances[k].is_target;
    }
    return views;
}

inline std::optional<GraspAction> largest_graspable(
    const std::vector<InstanceView>& views, double tau) {
    const InstanceView* best = nullptr;
    for (const auto& v : views) {
        if (!v.grasp_ok(tau)) continue;
        if (!best || v.modal_area > best->modal_area ||
            (v.modal_area == best->modal_area && v.id < best->id))
            best = &v;
    }
    if (!best) return std::nullopt;
    return GraspAction{best->id};
}

}  // namespace detail

// Support-minimizing action: grasp the graspable instance whose modal mask
// overlaps the distribution most. When every score is zero, falls back to the
// largest graspable modal mask; when nothing is graspable, returns no action
// (the step becomes a no-op but still consumes horizon).
inline std::optional<GraspAction> xray_action(const Scene& scene,
                                              const OccupancyDistribution& dist,
                                              double tau_grasp = kDefaultTauGrasp) {
    if (scene.instances.empty()) return std::nullopt;
    const auto views = detail::instance_views(scene);
    const auto scores = score_masks(dist, scene);
    const bool any_positive = !scores.empty() && scores.front().score > 0.0;
    if (any_positive) {
        for (const auto& s : scores) {
            for (const auto& v : views)
                if (v.id == s.id && v.grasp_ok(tau_grasp)) return GraspAction{v.id};
        }
        return std::nullopt;
    }
    return detail::largest_graspable(views, tau_grasp);
}

// Baseline: the target when graspable, else the largest graspable modal mask.
inline std::optional<GraspAction> largest_action(const Scene& scene,
                                                 double tau_grasp = kDefaultTauGrasp) {
    const auto views = detail::instance_views(scene);
    for (const auto& v : views)
        if (v.is_target && v.grasp_ok(tau_grasp)) return GraspAction{v.id};
    std::vector<detail::InstanceView> rest;
    for (const auto& v : views)
        if (!v.is_target) rest.push_back(v);
    return detail::largest_graspable(rest, tau_grasp);
}

// Baseline: the target when graspable, else uniform over graspable instances.
inline std::optional<GraspAction> random_action(Rng& rng, const Scene& scene,
                                                double tau_grasp = kDefaultTauGrasp) {
    const auto views = detail::instance_views(scene);
    for (const auto& v : views)
        if (v.is_target && v.grasp_ok(tau_grasp)) return GraspAction{v.id};
    std::vector<int> candidates;
    for (const auto& v : views)
        if (!v.is_target && v.grasp_ok(tau_grasp)) candidates.push_back(v.id);
    if (candidates.empty()) return std::nullopt;
    return GraspAction{candidates[rng.next_below(candidates.size())]};
}

// Grasp transition: a graspable object is lifted out (reward 1 iff it was the
// target); grasping a non-graspable object leaves the state unchanged.
inline std::pair<Scene, int> step(const Scene& scene, const GraspAction& action,
                                  double tau_grasp = kDefaultTauGrasp) {
    if (!graspable(scene, action.object_id, tau_grasp)) return {scene, 0};
    const bool was_target = scene.find(action.object_id)->is_target;
    return {remove(scene, action.object_id), was_target ? 1 : 0};
}

struct RolloutStep {
    int index = 0;
    std::optional<int> action_id;  // empty: no graspable object, step no-ops
    bool grasped = false;
    int reward = 0;
    bool target_visible = false;
    // Present when the occupancy distribution was computed for this step.
    std::optional<long long> support_before;
    std::optional<long long> support_after;
    std::optional<long long> surrogate_reward;
};

struct RolloutRecord {
    std::uint64_t seed = 0;
    PolicyKind policy = PolicyKind::XRay;
    int horizon = 10;
    double gamma = 0.95;
    bool success = false;
    int action_count = 0;
    double discounted_return = 0.0;
    std::vector<RolloutStep> steps;
};

struct RolloutConfig {
    HeapConfig heap = HeapConfig::simulation_preset();
    CandidateGrid grid;  // defaulted from heap dims in normalized()
    bool grid_set = false;
    int horizon = 10;
    double gamma = 0.95;
    double tau_grasp = kDefaultTauGrasp;
    double iou_threshold = 0.9;
    double camera_height = kDefaultCameraHeight;
    bool log_support = false;  // track support for non-X-Ray policies too
    int dist_workers = 1;

    RolloutConfig normalized() const {
        RolloutConfig c = *this;
        if (!c.grid_set) {
            c.grid = CandidateGrid::for_workspace(c.heap.width, c.heap.height, 8,
                                                  c.heap.n_rot);
            c.grid_set = true;
        }
        return c;
    }
};

// Runs one episode from an explicit starting scene: observe ->
// (distribution) -> action -> step until the target is extracted or the
// horizon runs out. The support trail is logged whenever the distribution is
// computed (always for X-Ray). After a successful extraction the support is
// 0 by definition, so the per-step surrogate rewards telescope to initial
// minus final support.
inline RolloutRecord rollout_scene(Scene scene, PolicyKind policy,
                                   const RolloutConfig& config_in,
                                   std::uint64_t seed) {
    const RolloutConfig config = config_in.normalized();
    Rng policy_rng(seed, /*stream=*/1);

    const bool track = policy == PolicyKind::XRay || config.log_support;

    RolloutRecord rec;
    rec.seed = seed;
    rec.policy = policy;
    rec.horizon = config.horizon;
    rec.gamma = config.gamma;

    long long support_now = -1;
    for (int k = 0; k < config.horizon; ++k) {
        const ObjectInstance* target = scene.target();
        const Mask target_modal = modal_mask(scene, target->id);

        OccupancyDistribution dist;
        if (track) {
            dist = occupancy_distribution(scene, config.grid, config.dist_workers,
                                          config.iou_threshold);
            support_now = static_cast<long long>(support_size(dist));
            if (!rec.steps.empty() && rec.steps.back().support_before.has_value()) {
                auto& prev = rec.steps.back();
                prev.support_after = support_now;
                prev.surrogate_reward = *prev.support_before - support_now;
            }
        }

        std::optional<GraspAction> action;
        switch (policy) {
            case PolicyKind::XRay:
                action = xray_action(scene, dist, config.tau_grasp);
                break;
            case PolicyKind::Largest:
                action = largest_action(scene, config.tau_grasp);
                break;
            case PolicyKind::Random:
                action = random_action(policy_rng, scene, config.tau_grasp);
                break;
        }

        RolloutStep st;
        st.index = k;
        st.target_visible = !mask_empty(target_modal);
        if (track) st.support_before = support_now;

        int reward = 0;
        if (action) {
            st.action_id = action->object_id;
            auto [next, r] = step(scene, *action, config.tau_grasp);
            st.grasped = true;  // policies only emit graspable ids
            reward = r;
            scene = std::move(next);
        }
        st.reward = reward;
        rec.discounted_return += reward * std::pow(config.gamma, k);
        rec.steps.push_back(st);

        if (reward == 1) {
            rec.success = true;
            if (track) {
                auto& last = rec.steps.back();
                last.support_after = 0;  // target extracted
                last.surrogate_reward = *last.support_before;
            }
            break;
        }
    }

    if (!rec.success && track && !rec.steps.empty() &&
        rec.steps.back().support_before.has_value()) {
        const auto dist = occupancy_distribution(scene, config.grid,
                                                 config.dist_workers,
                                                 config.iou_threshold);
        auto& last = rec.steps.back();
        last.support_after = static_cast<long long>(support_size(dist));
        last.surrogate_reward = *last.support_before - *last.support_after;
    }

    rec.action_count = static_cast<int>(rec.steps.size());
    return rec;
}

// Seeded episode: the heap comes from the same seed that drives the Random
// policy's choices (separate streams).
inline RolloutRecord rollout(std::uint64_t seed, PolicyKind policy,
                             const RolloutConfig& config_in) {
    const RolloutConfig config = config_in.normalized();
    return rollout_scene(sample_heap(seed, config.heap), policy, config, seed);
}

}  // namespace xray
