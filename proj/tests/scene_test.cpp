#include <gtest/gtest.h>

#include "curvesel/scene.hpp"
#include "test_support.hpp"

using namespace curvesel;

TEST(GenerateScene, SameSeedSameScene) {
    SceneConfig c;
    c.seed = 99;
    EXPECT_EQ(generate_scene(c), generate_scene(c));
    SceneConfig d = c;
    d.seed = 100;
    EXPECT_NE(generate_scene(c).objects, generate_scene(d).objects);
}

TEST(GenerateScene, DefaultShape) {
    const Scene s = generate_scene(SceneConfig{});
    ASSERT_EQ(s.objects.size(), 64u);
    for (std::size_t i = 0; i < s.objects.size(); ++i) {
        EXPECT_EQ(s.objects[i].id, i);
        EXPECT_EQ(s.objects[i].radius, 0.06);
        EXPECT_FALSE(s.objects[i].label.empty());
    }
    EXPECT_NO_THROW(s.target());
}

TEST(GenerateScene, SingleObjectIsTarget) {
    SceneConfig c;
    c.object_count = 1;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        c.seed = seed;
        const Scene s = generate_scene(c);
        ASSERT_EQ(s.objects.size(), 1u);
        EXPECT_EQ(s.target_id, s.objects[0].id);
    }
}

TEST(GenerateScene, ValidAcrossSeeds) {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        SceneConfig c;
        c.seed = seed;
        const Scene s = generate_scene(c);
        ASSERT_EQ(s.objects.size(), c.object_count);
        for (std::size_t i = 0; i < s.objects.size(); ++i) {
            const Vec3 d = s.objects[i].position - c.center;
            ASSERT_LE(std::abs(d.x), 1.5);
            ASSERT_LE(std::abs(d.y), 0.75);
            ASSERT_LE(std::abs(d.z), 0.75);
            for (std::size_t j = i + 1; j < s.objects.size(); ++j) {
                ASSERT_GE(distance(s.objects[i].position, s.objects[j].position), 0.12) << "seed " << seed;
            }
        }
        ASSERT_NO_THROW(s.target());
    }
}

TEST(GenerateScene, ImpossiblePackingIsInfeasible) {
    SceneConfig c;
    c.bounds = {0.2, 0.2, 0.2};
    c.object_count = 64;
    EXPECT_THROW(generate_scene(c), InfeasibleSceneError);
}

TEST(GenerateScene, InvalidConfigNamesField) {
    SceneConfig c;
    c.object_count = 0;
    try {
        generate_scene(c);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("object_count"), std::string::npos);
        EXPECT_EQ(e.field(), "object_count");
    }
    c = SceneConfig{};
    c.object_radius = -0.1;
    EXPECT_THROW(generate_scene(c), ConfigError);
    c = SceneConfig{};
    c.bounds.height_y = 0.0;
    EXPECT_THROW(generate_scene(c), ConfigError);
}

TEST(Occlusion, DirectlyBehindIsOccluded) {
    Scene s;
    s.objects = {{0, {0, 1.4, 2.0}, 0.06, ""}, {1, {0, 1.4, 3.0}, 0.06, ""}, {2, {1, 1.4, 3.0}, 0.06, ""}};
    const auto occ = occlusion_set(s, {0, 1.4, 0});
    EXPECT_EQ(occ, (std::set<ObjectId>{1}));
}

TEST(Occlusion, ConeCatchesNearlyAlignedCenters) {
    // a tiny sphere that misses the sight line but sits inside the 0.5 degree cone
    Scene s;
    s.objects = {{0, {0.005, 1.4, 1.0}, 0.001, ""}, {1, {0, 1.4, 3.0}, 0.06, ""}};
    EXPECT_EQ(occlusion_set(s, {0, 1.4, 0}), (std::set<ObjectId>{1}));
    s.objects[0].position = {0.05, 1.4, 1.0};  // ~2.9 degrees off-axis
    EXPECT_TRUE(occlusion_set(s, {0, 1.4, 0}).empty());
}

TEST(Occlusion, EyeInsideObjectIsError) {
    Scene s;
    s.objects = {{0, {0, 1.4, 0.01}, 0.06, ""}};
    EXPECT_THROW(occlusion_set(s, {0, 1.4, 0}), std::domain_error);
}

TEST(Occlusion, MatchesBruteForce) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        SceneConfig c;
        c.seed = seed;
        const Scene s = generate_scene(c);
        const Vec3 eye{0, 1.4, 0};
        EXPECT_EQ(occlusion_set(s, eye), curvesel::testing::brute_force_occlusion(s, eye, kDefaultOcclusionCone))
            << "seed " << seed;
    }
}
