#include <catch2/catch_amalgamated.hpp>

#include "reference.hpp"
#include "xray/xray.hpp"

using namespace xray;

TEST_CASE("empty scene has a flat floor") {
    Scene s = Scene::empty(8, 6);
    CHECK(s.width == 8);
    CHECK(s.height == 6);
    CHECK(s.instances.empty());
    for (std::size_t i = 0; i < s.heightmap().size(); ++i)
        CHECK(s.heightmap()[i] == 0.0f);
}

TEST_CASE("placing one object raises the heightmap under its mask") {
    Scene s = Scene::empty(16, 12);
    s = place(s, Footprint::rect(4, 2, 0.05), Pose{5, 3, 0, 16});
    REQUIRE(s.instances.size() == 1);
    const auto& inst = s.instances[0];
    CHECK(inst.id == 0);
    CHECK(inst.rest_height == 0.0);
    CHECK(top_height(inst) == 0.05f);
    const Mask m = instance_mask(s, inst);
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 16; ++x)
            CHECK(s.heightmap().at(x, y) == (m.at(x, y) ? 0.05f : 0.0f));
}

TEST_CASE("objects settle on top of overlapping objects") {
    Scene s = Scene::empty(16, 12);
    s = place(s, Footprint::rect(6, 6, 0.10), Pose{6, 5, 0, 16});
    s = place(s, Footprint::rect(4, 2, 0.05), Pose{6, 5, 0, 16});
    CHECK(s.instances[1].rest_height == Catch::Approx(0.10));
    CHECK(top_height(s.instances[1]) == Catch::Approx(0.15f));
    // A third object touching both stacks on the combined top.
    s = place(s, Footprint::rect(8, 8, 0.02), Pose{6, 5, 0, 16});
    CHECK(s.instances[2].rest_height == Catch::Approx(0.15));
}

TEST_CASE("rest height is the max heightmap under the mask, not the overlap average") {
    Scene s = Scene::empty(24, 12);
    s = place(s, Footprint::rect(2, 2, 0.30), Pose{4, 4, 0, 16});
    // Wide plank touching the tall block only at one end.
    s = place(s, Footprint::rect(12, 2, 0.02), Pose{8, 4, 0, 16});
    CHECK(s.instances[1].rest_height == Catch::Approx(0.30));
}

TEST_CASE("ids increase and survive removal") {
    Scene s = Scene::empty(16, 12);
    s = place(s, Footprint::rect(2, 2, 0.01), Pose{3, 3, 0, 16});
    s = place(s, Footprint::rect(2, 2, 0.01), Pose{8, 3, 0, 16});
    s = place(s, Footprint::rect(2, 2, 0.01), Pose{12, 3, 0, 16});
    s = remove(s, 1);
    REQUIRE(s.instances.size() == 2);
    CHECK(s.instances[0].id == 0);
    CHECK(s.instances[1].id == 2);
    // The next placement continues the id sequence.
    s = place(s, Footprint::rect(2, 2, 0.01), Pose{8, 8, 0, 16});
    CHECK(s.instances.back().id == 3);
}

TEST_CASE("removing an unknown id throws") {
    Scene s = Scene::empty(8, 8);
    CHECK_THROWS_AS(remove(s, 5), UnknownId);
}

TEST_CASE("removal replays the remaining stack onto the floor") {
    Scene s = Scene::empty(16, 12);
    s = place(s, Footprint::rect(6, 6, 0.10), Pose{6, 5, 0, 16});
    s = place(s, Footprint::rect(4, 2, 0.05), Pose{6, 5, 0, 16});
    CHECK(s.instances[1].rest_height == Catch::Approx(0.10));
    s = remove(s, 0);
    REQUIRE(s.instances.size() == 1);
    CHECK(s.instances[0].id == 1);
    // With the support gone the survivor drops to the floor.
    CHECK(s.instances[0].rest_height == 0.0);
    CHECK(s.heightmap().at(6, 5) == 0.05f);
}

TEST_CASE("placement fully outside the workspace throws") {
    Scene s = Scene::empty(16, 12);
    CHECK_THROWS_AS(place(s, Footprint::rect(3, 3, 0.01), Pose{40, 40, 0, 16}),
                    EmptyPlacement);
}

TEST_CASE("heightmap equals the per-pixel max oracle") {
    for (std::uint64_t seed : {11ull, 12ull, 13ull, 14ull}) {
        Scene s = ref::random_scene(seed, 32, 24, 6);
        CHECK(s.heightmap() == ref::heightmap(s));
    }
}

TEST_CASE("resettle is idempotent on an already settled scene") {
    Scene s = ref::random_scene(21, 32, 24, 6);
    Scene r = resettle(s, s.instances);
    CHECK(ref::same_scene(s, r));
}

TEST_CASE("target lookup finds the flagged instance") {
    Scene s = Scene::empty(16, 12);
    s = place(s, Footprint::rect(2, 2, 0.01), Pose{3, 3, 0, 16});
    s = place(s, Footprint::rect(2, 2, 0.01), Pose{8, 3, 0, 16}, /*is_target=*/true);
    REQUIRE(s.target() != nullptr);
    CHECK(s.target()->id == 1);
    CHECK(s.find(0) != nullptr);
    CHECK(s.find(9) == nullptr);
}

TEST_CASE("three-object fixture settles to the expected heights") {
    Scene s = fixture_f1();
    REQUIRE(s.instances.size() == 3);
    const auto& target = s.instances[0];
    const auto& occluder = s.instances[1];
    const auto& box = s.instances[2];
    CHECK(target.is_target);
    CHECK(target.rest_height == 0.0);
    CHECK(top_height(target) == 1.0f);
    // The occluder lands on the target, so its top clears everything.
    CHECK(occluder.rest_height == Catch::Approx(1.0));
    CHECK(top_height(occluder) == 3.0f);
    CHECK(box.rest_height == 0.0);
    CHECK(top_height(box) == 1.5f);
    float max_h = 0.0f;
    for (std::size_t i = 0; i < s.heightmap().size(); ++i)
        max_h = std::max(max_h, s.heightmap()[i]);
    CHECK(max_h == 3.0f);
}

TEST_CASE("grasp-and-remove commutes with never having placed the object") {
    // Place A, B, C; removing B must equal the scene built from A, C alone.
    Scene abc = Scene::empty(20, 16);
    abc = place(abc, Footprint::rect(5, 5, 0.04), Pose{6, 6, 0, 16});
    abc = place(abc, Footprint::rect(3, 3, 0.02), Pose{7, 7, 2, 16});
    abc = place(abc, Footprint::disc(2, 0.03), Pose{8, 6, 0, 16});
    Scene ac = Scene::empty(20, 16);
    ac = place(ac, Footprint::rect(5, 5, 0.04), Pose{6, 6, 0, 16});
    ac = place(ac, Footprint::disc(2, 0.03), Pose{8, 6, 0, 16});
    Scene removed = remove(abc, 1);
    REQUIRE(removed.instances.size() == 2);
    CHECK(removed.heightmap() == ac.heightmap());
    CHECK(removed.instances[0].rest_height == ac.instances[0].rest_height);
    CHECK(removed.instances[1].rest_height == ac.instances[1].rest_height);
}
