#include "intersim/conflict_geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace intersim;

namespace
{
    bool contains (const OrientedBox &b, double x, double y)
    {
        const double dx = x - b.center.x, dy = y - b.center.y;
        const double c = std::cos (b.heading), s = std::sin (b.heading);
        return std::abs (dx * c + dy * s) <= b.half_length && std::abs (-dx * s + dy * c) <= b.half_width;
    }

    // Jittered-grid Monte Carlo: one uniform point per cell of a g x g grid over b.
    double mc_overlap (const OrientedBox &a, const OrientedBox &b, std::mt19937_64 &rng, int g = 1000)
    {
        std::uniform_real_distribution<double> jitter (0.0, 1.0);
        const double c = std::cos (b.heading), s = std::sin (b.heading);
        long hits = 0;
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j)
            {
                const double lx = (-1.0 + 2.0 * (i + jitter (rng)) / g) * b.half_length;
                const double ly = (-1.0 + 2.0 * (j + jitter (rng)) / g) * b.half_width;
                if (contains (a, b.center.x + lx * c - ly * s, b.center.y + lx * s + ly * c))
                    ++hits;
            }
        return double (hits) / (double (g) * g) * 4.0 * b.half_length * b.half_width;
    }

    OrientedBox random_box (std::mt19937_64 &rng)
    {
        std::uniform_real_distribution<double> pos (-2.0, 2.0), ang (-M_PI, M_PI), hl (0.5, 2.5), hw (0.3, 1.2);
        return {{pos (rng), pos (rng)}, ang (rng), hl (rng), hw (rng)};
    }

    PathSample pose (double x, double y, double psi) { return {x, y, psi, 0.0, false}; }
} // namespace

TEST_CASE ("bounding box corners")
{
    const OrientedBox a = bounding_box (pose (0, 0, 0), 5.0, 2.0);
    for (const Vec2 &c : a.corners ())
    {
        CHECK (std::abs (c.x) == doctest::Approx (2.5));
        CHECK (std::abs (c.y) == doctest::Approx (1.0));
    }
    const OrientedBox b = bounding_box (pose (0, 0, M_PI / 2), 5.0, 2.0);
    for (const Vec2 &c : b.corners ())
    {
        CHECK (std::abs (c.x) == doctest::Approx (1.0));
        CHECK (std::abs (c.y) == doctest::Approx (2.5));
    }
    const OrientedBox d = bounding_box (pose (0, 0, M_PI / 4), 5.0, 2.0);
    double max_x = 0.0;
    for (const Vec2 &c : d.corners ())
        max_x = std::max (max_x, c.x);
    CHECK (max_x == doctest::Approx (3.5 / std::sqrt (2.0)));
    CHECK (max_x == doctest::Approx (2.475).epsilon (1e-3));
}

TEST_CASE ("safety region extensions")
{
    const SafetyMargins m{0.25, 1.5, 0.5};
    const SafetyRegion still = safety_region (pose (0, 0, 0), 5, 2, pose (10, 0, 0), 0.0, 0.0, m);
    CHECK (still.forward_extension == 0.0);
    CHECK (still.base.half_length == doctest::Approx (2.5 + 1.5));
    CHECK (still.base.half_width == doctest::Approx (1.0 + 0.25));

    const SafetyRegion crossing = safety_region (pose (0, 0, 0), 5, 2, pose (10, 0, M_PI / 2), 9.0, 14.0, m);
    CHECK (crossing.forward_extension == doctest::Approx (7.0));

    const SafetyRegion follow = safety_region (pose (0, 0, 0), 5, 2, pose (10, 0, 0), 14.0, 14.0, m);
    CHECK (follow.forward_extension == doctest::Approx (0.0));
    CHECK (follow.rearward_extension == 0.0);

    // the region always contains the own footprint
    const OrientedBox own = bounding_box (pose (0, 0, 0), 5, 2);
    CHECK (area_overlap (crossing, own) == doctest::Approx (10.0));
}

TEST_CASE ("exact overlap examples")
{
    const OrientedBox unit{{0, 0}, 0.0, 0.5, 0.5};
    CHECK (area_overlap (unit, OrientedBox{{100, 0}, 0.0, 0.5, 0.5}) == 0.0);
    CHECK (area_overlap (unit, unit) == doctest::Approx (1.0));
    const OrientedBox shifted{{0.5, 0}, 0.0, 0.5, 0.5};
    CHECK (std::abs (area_overlap (unit, shifted) - 0.5) <= 1e-9);
    std::mt19937_64 rng (1);
    CHECK (std::abs (mc_overlap (unit, shifted, rng) - 0.5) <= 1e-2);
}

TEST_CASE ("exact overlap agrees with Monte Carlo on random pairs")
{
    std::mt19937_64 rng (77);
    int nonzero = 0;
    for (int n = 0; n < 100; ++n)
    {
        const OrientedBox a = random_box (rng), b = random_box (rng);
        const double exact = area_overlap (a, b);
        CHECK (exact >= 0.0);
        CHECK (std::abs (exact - mc_overlap (a, b, rng, 700)) <= 1e-2);
        CHECK (exact == doctest::Approx (area_overlap (b, a)).epsilon (1e-9));
        nonzero += exact > 0.0;
    }
    CHECK (nonzero > 30);
}

TEST_CASE ("bigger margins never shrink the overlap")
{
    std::mt19937_64 rng (8);
    std::uniform_real_distribution<double> pos (-8.0, 8.0), ang (-M_PI, M_PI), v (0.0, 15.0), grow (0.0, 1.0);
    for (int n = 0; n < 200; ++n)
    {
        const PathSample self = pose (0, 0, ang (rng));
        const PathSample other = pose (pos (rng), pos (rng), ang (rng));
        const double sv = v (rng), ov = v (rng);
        SafetyMargins m{grow (rng), grow (rng), grow (rng)};
        const OrientedBox ob = bounding_box (other, 5, 2);
        const double before = area_overlap (safety_region (self, 5, 2, other, ov, sv, m), ob);
        m.lateral += grow (rng);
        m.longitudinal += grow (rng);
        m.headway += grow (rng);
        CHECK (area_overlap (safety_region (self, 5, 2, other, ov, sv, m), ob) >= before - 1e-12);
    }
}

TEST_CASE ("box distance")
{
    const OrientedBox a{{0, 0}, 0.0, 2.5, 1.0};
    CHECK (box_distance (a, OrientedBox{{10, 0}, 0.0, 2.5, 1.0}) == doctest::Approx (5.0));
    CHECK (box_distance (a, OrientedBox{{0, 5}, 0.0, 2.5, 1.0}) == doctest::Approx (3.0));
    CHECK (box_distance (a, OrientedBox{{1, 0}, 0.3, 2.5, 1.0}) == 0.0);
}

TEST_CASE ("smooth surrogate")
{
    const SafetyRegion unit{{{0, 0}, 0.0, 0.5, 0.5}, 0.0, 0.0};
    CHECK (smooth_area_overlap (unit, OrientedBox{{100, 0}, 0.0, 0.5, 0.5}, 10.0) < 1e-6);
    CHECK (smooth_area_overlap (unit, OrientedBox{{0, 0}, 0.0, 0.5, 0.5}, 10.0) >= 1.0);

    std::mt19937_64 rng (42);
    for (int n = 0; n < 300; ++n)
    {
        const OrientedBox a = random_box (rng), b = random_box (rng);
        const SafetyRegion r{a, 0.0, 0.0};
        const double sm = smooth_area_overlap (r, b, 10.0);
        CHECK (sm >= 0.0);
        CHECK (sm >= area_overlap (a, b) - 1e-12);
    }
}

TEST_CASE ("smooth surrogate gradient matches central differences")
{
    std::mt19937_64 rng (4);
    const double h = 1e-6;
    for (int n = 0; n < 50; ++n)
    {
        const SafetyRegion r{random_box (rng), 1.0, 0.0};
        OrientedBox b = random_box (rng);
        const SmoothOverlapGradient g = smooth_area_overlap_grad (r, b, 10.0);
        CHECK (g.value == doctest::Approx (smooth_area_overlap (r, b, 10.0)));
        const double x0 = b.center.x, y0 = b.center.y;
        b.center.x = x0 + h;
        double fp = smooth_area_overlap (r, b, 10.0);
        b.center.x = x0 - h;
        double fm = smooth_area_overlap (r, b, 10.0);
        b.center.x = x0;
        const double gx = (fp - fm) / (2 * h);
        b.center.y = y0 + h;
        fp = smooth_area_overlap (r, b, 10.0);
        b.center.y = y0 - h;
        fm = smooth_area_overlap (r, b, 10.0);
        b.center.y = y0;
        const double gy = (fp - fm) / (2 * h);
        const double scale = std::max ({1.0, std::abs (gx), std::abs (gy)});
        CHECK (std::abs (g.d_other_x - gx) <= 1e-5 * scale);
        CHECK (std::abs (g.d_other_y - gy) <= 1e-5 * scale);
    }
}

TEST_CASE ("path conflicts inside the critical region")
{
    const PathSpec ns = build_path (RouteSpec{Arm::North, Arm::South});
    const PathSpec sn = build_path (RouteSpec{Arm::South, Arm::North});
    const PathSpec we = build_path (RouteSpec{Arm::West, Arm::East});
    const PathSpec wn = build_path (RouteSpec{Arm::West, Arm::North});
    CHECK_FALSE (paths_conflict (ns, 2.0, sn, 2.0, 6.0));
    CHECK (paths_conflict (ns, 2.0, we, 2.0, 6.0));
    CHECK (paths_conflict (wn, 2.0, ns, 2.0, 6.0));
    CHECK (paths_conflict (wn, 2.0, sn, 2.0, 6.0));
}

TEST_CASE ("conflict set assembly")
{
    const IntersectionGeometry g;
    const PathSpec ns = build_path (RouteSpec{Arm::North, Arm::South});
    const PathSpec we = build_path (RouteSpec{Arm::West, Arm::East});
    const RegionBounds rns = compute_regions (ns, g, 15, -7);
    const RegionBounds rwe = compute_regions (we, g, 15, -7);

    WorldSnapshot w;
    w.paths_conflict = [] (AgentId a, AgentId b) { return (a == 3) != (b == 3); };
    w.agents[1] = {&ns, rns, {0, 14, 5.0}, {}};
    const PriorityAssignment solo = PriorityAssignment::from_order ({1});
    CHECK (conflict_sets (1, w, solo).combined.empty ());

    w.agents[2] = {&ns, rns, {0, 14, 20.0}, {}};
    const PriorityAssignment two = PriorityAssignment::from_order ({2, 1});
    CHECK (conflict_sets (1, w, two).combined == std::set<AgentId>{2});
    CHECK (conflict_sets (2, w, two).ahead.empty ());

    // agent 1 inside the ICR with a leader and a higher-priority crosser
    w.agents[1].state.s = 40.0;
    w.agents[2].state.s = 55.0;
    w.agents[3] = {&we, rwe, {0, 14, 60.0}, {}};
    const PriorityAssignment three = PriorityAssignment::from_order ({3, 2, 1});
    const ConflictSets cs = conflict_sets (1, w, three);
    CHECK (cs.ahead == std::set<AgentId>{2});
    CHECK (cs.cross == std::set<AgentId>{3});
    CHECK (cs.combined == std::set<AgentId>{2, 3});

    // same situation outside the ICR: only the leader counts
    w.agents[1].state.s = 5.0;
    w.agents[2].state.s = 20.0;
    CHECK (conflict_sets (1, w, three).combined == std::set<AgentId>{2});

    // a leader beyond 50 m or an oncoming vehicle is not "ahead"
    w.agents[2].state.s = 80.0;
    CHECK (ahead_set (1, w).empty ());
}
