#include <gtest/gtest.h>

#include <Eigen/Geometry>
#include <cmath>

#include "gridwarp/errors.hpp"
#include "gridwarp/geometry.hpp"
#include "gridwarp/random.hpp"

using namespace gridwarp;

namespace {

Intrinsics simple_k(double f, double cx, double cy) { return {f, f, cx, cy, 0.0}; }

Eigen::Matrix3d random_rotation(Rng& rng) {
    const Eigen::Vector3d axis = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal()).normalized();
    return Eigen::AngleAxisd(rng.uniform(-3.0, 3.0), axis).toRotationMatrix();
}

}  // namespace

TEST(Project, OpticalAxisHitsPrincipalPoint) {
    const auto k = simple_k(800, 320, 240);
    const Eigen::Vector2d p = project(k, Pose{}, {0, 0, 1});
    EXPECT_EQ(p, Eigen::Vector2d(320, 240));
}

TEST(Project, FocalScaling) {
    const Intrinsics k{100, 100, 50, 0, 0};
    EXPECT_DOUBLE_EQ(project(k, Pose{}, {1, 0, 1}).x(), 150.0);
}

TEST(Project, DegenerateDepthThrows) {
    EXPECT_THROW(project(simple_k(100, 0, 0), Pose{}, {1, 1, 0}), GeometryError);
}

TEST(BackProject, PrincipalPointAlongOpticalAxis) {
    const Ray r = back_project(simple_k(500, 10, 20), Pose{}, {10, 20});
    EXPECT_TRUE(r.origin.isZero());
    EXPECT_TRUE(r.direction.isApprox(Eigen::Vector3d::UnitZ(), 1e-15));
}

TEST(BackProject, OriginIsCameraCenter) {
    Pose pose;
    pose.translation = {0.1, -0.2, 0.3};
    const Ray r = back_project(simple_k(500, 0, 0), pose, {3, 4});
    EXPECT_TRUE(r.origin.isApprox(-pose.translation, 1e-15));
    EXPECT_NEAR(r.direction.norm(), 1.0, 1e-12);
}

TEST(BackProject, RoundTripThroughPlane) {
    Rng rng(51);
    const Intrinsics k{900, 880, 320, 240, 0.5};
    for (int t = 0; t < 10000; ++t) {
        Pose pose;
        pose.rotation = random_rotation(rng);
        pose.translation = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const Eigen::Vector2d px(rng.uniform(0, 640), rng.uniform(0, 480));
        const Ray ray = back_project(k, pose, px);
        const Eigen::Vector3d x = ray.at(rng.uniform(0.5, 5.0));
        const Plane plane{Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal()).normalized(), 0.0};
        const Plane through{plane.normal, plane.normal.dot(x)};
        if (std::abs(through.normal.dot(ray.direction)) < 0.05) continue;
        const Eigen::Vector3d hit = ray_plane_intersect(ray, through);
        EXPECT_LE((project(k, pose, hit) - px).norm(), 1e-9);
    }
}

TEST(DisplayRay, NodePositionsAndDirection) {
    DisplayGrid g;
    g.n_rows = 3;
    g.n_cols = 4;
    g.spacing = 0.002;
    g.height = 0.03;
    const Ray a = display_ray(g, 1, 1);
    EXPECT_EQ(a.origin, Eigen::Vector3d(0, 0, 0.03));
    EXPECT_EQ(a.direction, Eigen::Vector3d(0, 0, -1));
    EXPECT_EQ(display_ray(g, 1, 2).origin, Eigen::Vector3d(0.002, 0, 0.03));
    EXPECT_EQ(display_ray(g, 2, 1).origin, Eigen::Vector3d(0, 0.002, 0.03));
    EXPECT_EQ(display_ray(g, 3, 4).direction, a.direction);
    EXPECT_THROW(display_ray(g, 0, 1), InvalidInput);
    EXPECT_THROW(display_ray(g, 1, 5), InvalidInput);
}

TEST(DisplayGrid, CenteredAndValidate) {
    const auto g = DisplayGrid::centered(8, 8, 0.003, 0.03);
    EXPECT_NEAR(g.origin_x, -0.0105, 1e-15);
    EXPECT_NEAR(g.node_position(8, 8).x(), 0.0105, 1e-15);
    DisplayGrid bad = g;
    bad.spacing = 0.0;
    EXPECT_THROW(bad.validate(), InvalidInput);
    bad = g;
    bad.height = -1.0;
    EXPECT_THROW(bad.validate(), InvalidInput);
}

TEST(RayPlane, Examples) {
    const double h = 0.03;
    EXPECT_TRUE(ray_plane_intersect({{0, 0, h}, {0, 0, -1}}, Plane::horizontal(0)).isApprox(Eigen::Vector3d::Zero()));
    const Ray slanted = Ray::through({0, 0, 1}, {1, 0, -1});
    EXPECT_TRUE(ray_plane_intersect(slanted, Plane::horizontal(0)).isApprox(Eigen::Vector3d(1, 0, 0), 1e-15));
    EXPECT_THROW(ray_plane_intersect({{0, 0, 1}, {1, 0, 0}}, Plane::horizontal(0)), GeometryError);
    EXPECT_THROW(ray_plane_intersect({{0, 0, 1}, {0, 0, 1}}, Plane::horizontal(0)), GeometryError);
}

TEST(TwoRayLsq, IntersectingRays) {
    const Ray a = Ray::through({0, 0, 0}, {1, 1, 0});
    const Ray b = Ray::through({2, 0, 0}, {-1, 1, 0});
    const LsqPoint p = two_ray_lsq_point(a, b);
    EXPECT_TRUE(p.point.isApprox(Eigen::Vector3d(1, 1, 0), 1e-12));
    EXPECT_NEAR(p.residual, 0.0, 1e-12);
}

TEST(TwoRayLsq, SkewRays) {
    const LsqPoint p = two_ray_lsq_point({{0, 0, 0}, {1, 0, 0}}, {{0, 0, 1}, {0, 1, 0}});
    EXPECT_TRUE(p.point.isApprox(Eigen::Vector3d(0, 0, 0.5), 1e-15));
    EXPECT_DOUBLE_EQ(p.residual, 0.5);
}

TEST(TwoRayLsq, ParallelRaysCarryAngle) {
    try {
        two_ray_lsq_point({{0, 0, 0}, {1, 0, 0}}, {{0, 1, 0}, {-1, 0, 0}});
        FAIL() << "expected IllConditioned";
    } catch (const IllConditioned& e) {
        EXPECT_LT(e.angle_rad(), kMinRayAngle);
    }
    const double tiny = 1e-7;
    EXPECT_THROW(two_ray_lsq_point({{0, 0, 0}, {1, 0, 0}},
                                   Ray::through({0, 1, 0}, {1, std::tan(tiny), 0})),
                 IllConditioned);
}

TEST(TwoRayLsq, SymmetricAndRigidlyEquivariant) {
    Rng rng(52);
    for (int t = 0; t < 200; ++t) {
        const Ray a = Ray::through({rng.normal(), rng.normal(), rng.normal()}, {rng.normal(), rng.normal(), rng.normal()});
        const Ray b = Ray::through({rng.normal(), rng.normal(), rng.normal()}, {rng.normal(), rng.normal(), rng.normal()});
        const LsqPoint ab = two_ray_lsq_point(a, b);
        const LsqPoint ba = two_ray_lsq_point(b, a);
        EXPECT_LE((ab.point - ba.point).norm(), 1e-9);
        EXPECT_NEAR(ab.residual, ba.residual, 1e-9);

        const Eigen::Matrix3d r = random_rotation(rng);
        const Eigen::Vector3d s(rng.normal(), rng.normal(), rng.normal());
        const LsqPoint moved = two_ray_lsq_point({r * a.origin + s, r * a.direction},
                                                 {r * b.origin + s, r * b.direction});
        EXPECT_LE((moved.point - (r * ab.point + s)).norm(), 1e-9);
        EXPECT_NEAR(moved.residual, ab.residual, 1e-9);
    }
}

TEST(TwoRayLsq, ResidualZeroIffRaysMeet) {
    Rng rng(53);
    for (int t = 0; t < 100; ++t) {
        const Eigen::Vector3d x(rng.normal(), rng.normal(), rng.normal());
        const Eigen::Vector3d da(rng.normal(), rng.normal(), rng.normal());
        const Eigen::Vector3d db(rng.normal(), rng.normal(), rng.normal());
        const Ray a = Ray::through(x - 2.0 * da, da);
        const Ray b = Ray::through(x + 1.5 * db, db);
        const LsqPoint meet = two_ray_lsq_point(a, b);
        EXPECT_LE(meet.residual, 1e-12);
        const Eigen::Vector3d off = da.cross(db).normalized() * 1e-6;
        EXPECT_GT(two_ray_lsq_point(a, {b.origin + off, b.direction}).residual, 1e-7);
    }
}

TEST(Pose, LookAtIsRotationAndAimsAtTarget) {
    const Eigen::Vector3d c(-0.03, 0.0, 0.5);
    const Pose pose = Pose::look_at(c, Eigen::Vector3d::Zero());
    EXPECT_NO_THROW(pose.validate());
    EXPECT_TRUE(pose.center().isApprox(c, 1e-15));
    const auto k = simple_k(1000, 320, 240);
    EXPECT_LE((project(k, pose, Eigen::Vector3d::Zero()) - Eigen::Vector2d(320, 240)).norm(), 1e-9);
    // Image x follows world x.
    EXPECT_GT(project(k, pose, {0.01, 0, 0}).x(), 320.0);
    EXPECT_THROW(Pose::look_at(c, c), GeometryError);
    Pose bad;
    bad.rotation(0, 0) = 2.0;
    EXPECT_THROW(bad.validate(), InvalidInput);
}

TEST(Intrinsics, Validate) {
    EXPECT_NO_THROW(simple_k(1, 0, 0).validate());
    EXPECT_THROW(simple_k(0, 0, 0).validate(), InvalidInput);
    Intrinsics k = simple_k(10, 0, 0);
    k.fy = -1;
    EXPECT_THROW(k.validate(), InvalidInput);
}

namespace {

struct Rig {
    Intrinsics k{10000, 10000, 319.5, 319.5, 0};
    Pose pose = Pose::look_at({-0.03, 0, 0.5}, Eigen::Vector3d::Zero());
    DisplayGrid grid = DisplayGrid::centered(8, 8, 0.003, 0.03);
};

}  // namespace

TEST(TriangulateMatches, FlatGroundExact) {
    const Rig rig;
    std::vector<GridMatch> matches;
    for (int r = 1; r <= 8; ++r) {
        for (int c = 1; c <= 8; ++c) {
            Eigen::Vector3d g = rig.grid.node_position(r, c);
            g.z() = 0.0;
            matches.push_back({r, c, project(rig.k, rig.pose, g)});
        }
    }
    const HeightMap map = triangulate_matches(matches, rig.k, rig.pose, rig.grid);
    EXPECT_EQ(map.valid_count(), 64u);
    for (std::size_t i = 0; i < map.nodes.size(); ++i) {
        EXPECT_LE(std::abs(map.nodes[i].z()), 1e-9);
        EXPECT_LE(map.residual[i], 1e-9);
    }
}

TEST(TriangulateMatches, BlockHeightsExact) {
    const Rig rig;
    for (double block : {0.010, 0.020}) {
        std::vector<GridMatch> matches;
        for (int r = 1; r <= 8; ++r) {
            for (int c = 1; c <= 8; ++c) {
                Eigen::Vector3d g = rig.grid.node_position(r, c);
                g.z() = (c == 3 || c == 4) ? block : 0.0;
                matches.push_back({r, c, project(rig.k, rig.pose, g)});
            }
        }
        const HeightMap map = triangulate_matches(matches, rig.k, rig.pose, rig.grid);
        for (int r = 1; r <= 8; ++r) {
            for (int c = 1; c <= 8; ++c) {
                const double expected = (c == 3 || c == 4) ? block : 0.0;
                EXPECT_NEAR(map.nodes[map.index(r, c)].z(), expected, 1e-9);
            }
        }
    }
}

TEST(TriangulateMatches, GatesAndMissingNodes) {
    const Rig rig;
    Eigen::Vector3d g = rig.grid.node_position(2, 3);
    g.z() = 0.0;
    const Eigen::Vector2d px = project(rig.k, rig.pose, g);
    std::vector<GridMatch> matches{{2, 3, px}, {2, 4, px + Eigen::Vector2d(0, 40)}, {9, 1, px}};
    TriangulationGates gates;
    gates.max_residual = 2e-4;
    const HeightMap map = triangulate_matches(matches, rig.k, rig.pose, rig.grid, gates);
    EXPECT_TRUE(map.valid[map.index(2, 3)]);
    EXPECT_FALSE(map.valid[map.index(2, 4)]);  // 40 px off in v misses the display ray
    EXPECT_GT(map.residual[map.index(2, 4)], 2e-4);
    EXPECT_EQ(map.valid_count(), 1u);
    EXPECT_TRUE(std::isnan(map.nodes[map.index(1, 1)].z()));

    const std::vector<GridMatch> exact{{2, 3, px}};
    gates = {};
    gates.max_z = -0.001;
    EXPECT_EQ(triangulate_matches(exact, rig.k, rig.pose, rig.grid, gates).valid_count(), 0u);
    gates = {};
    gates.min_z = 0.001;
    EXPECT_EQ(triangulate_matches(exact, rig.k, rig.pose, rig.grid, gates).valid_count(), 0u);
    EXPECT_EQ(triangulate_matches(exact, rig.k, rig.pose, rig.grid).valid_count(), 1u);
}
