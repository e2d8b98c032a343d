#include <catch2/catch_amalgamated.hpp>

#include "reference.hpp"
#include "xray/xray.hpp"

using namespace xray;

TEST_CASE("depth image is camera height minus the heightmap") {
    Scene s = Scene::empty(16, 12);
    s = place(s, Footprint::rect(4, 2, 0.05), Pose{5, 3, 0, 16});
    DepthImage d = render_depth(s, 0.8f);
    CHECK(d.camera_height == 0.8f);
    CHECK(d.values.at(5, 3) == 0.75f);
    CHECK(d.values.at(0, 0) == 0.8f);
    for (std::size_t i = 0; i < d.values.size(); ++i)
        CHECK(d.values[i] == 0.8f - s.heightmap()[i]);
}

TEST_CASE("modal mask is contained in the amodal mask") {
    for (std::uint64_t seed : {31ull, 32ull, 33ull}) {
        Scene s = ref::random_scene(seed, 32, 24, 6);
        for (const auto& inst : s.instances) {
            const Mask am = amodal_mask(s, inst.id);
            const Mask mo = modal_mask(s, inst.id);
            for (std::size_t i = 0; i < am.size(); ++i)
                if (mo[i]) CHECK(am[i]);
        }
    }
}

TEST_CASE("modal masks partition the occupied pixels") {
    Scene s = ref::random_scene(41, 32, 24, 6);
    const auto masks = modal_masks(s);
    Mask occupied(s.width, s.height, 0);
    for (const auto& inst : s.instances) {
        const Mask am = instance_mask(s, inst);
        for (std::size_t i = 0; i < am.size(); ++i)
            if (am[i]) occupied[i] = 1;
    }
    for (std::size_t i = 0; i < occupied.size(); ++i) {
        int owners = 0;
        for (const auto& m : masks) owners += m[i] ? 1 : 0;
        CHECK(owners == (occupied[i] ? 1 : 0));
    }
}

TEST_CASE("later placement wins visibility ties at equal height") {
    Scene s = Scene::empty(16, 12);
    s = place(s, Footprint::rect(4, 4, 0.05), Pose{5, 5, 0, 16});
    s = place(s, Footprint::rect(4, 4, 0.05), Pose{7, 5, 0, 16});
    // Both rest on the floor with the same thickness; the overlap column
    // belongs to the most recent placement.
    const Mask first = modal_mask(s, 0);
    const Mask second = modal_mask(s, 1);
    const Mask a0 = amodal_mask(s, 0);
    const Mask a1 = amodal_mask(s, 1);
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 16; ++x) {
            if (a0.at(x, y) && a1.at(x, y)) {
                CHECK(second.at(x, y) == 1);
                CHECK(first.at(x, y) == 0);
            }
        }
    CHECK(mask_area(first) > 0);
}

TEST_CASE("occluded object has an empty modal mask") {
    Scene s = fixture_f1();
    CHECK(mask_empty(modal_mask(s, 0)));
    CHECK(mask_area(modal_mask(s, 1)) == 36);
    CHECK(mask_area(modal_mask(s, 2)) == 9);
}

TEST_CASE("modal masks match the per-pixel winner oracle") {
    for (std::uint64_t seed : {51ull, 52ull, 53ull, 54ull}) {
        Scene s = ref::random_scene(seed, 32, 24, 7);
        for (const auto& inst : s.instances)
            CHECK(modal_mask(s, inst.id) == ref::modal(s, inst.id));
    }
}

TEST_CASE("observe returns the target modal mask and the depth image") {
    Scene s = fixture_f1();
    AugmentedObservation obs = observe(s);
    CHECK(obs.target_modal == modal_mask(s, 0));
    CHECK(obs.depth.values == render_depth(s).values);
    CHECK(obs.depth.camera_height == static_cast<float>(kDefaultCameraHeight));
}

TEST_CASE("observe without a target throws") {
    Scene s = Scene::empty(8, 8);
    s = place(s, Footprint::rect(2, 2, 0.01), Pose{3, 3, 0, 16});
    CHECK_THROWS_AS(observe(s), NoTarget);
}

TEST_CASE("amodal mask of an unknown id throws") {
    Scene s = Scene::empty(8, 8);
    CHECK_THROWS_AS(amodal_mask(s, 3), UnknownId);
    CHECK_THROWS_AS(modal_mask(s, 3), UnknownId);
}
