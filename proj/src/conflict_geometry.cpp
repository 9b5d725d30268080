#include "intersim/conflict_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace intersim
{
    namespace
    {
        using Polygon = std::vector<Vec2>;

        double cross (Vec2 o, Vec2 a, Vec2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

        Polygon clip (const Polygon &subject, const std::array<Vec2, 4> &clipper)
        {
            Polygon out = subject;
            for (std::size_t e = 0; e < clipper.size () && !out.empty (); ++e)
            {
                const Vec2 a = clipper[e];
                const Vec2 b = clipper[(e + 1) % clipper.size ()];
                Polygon in = std::move (out);
                out.clear ();
                for (std::size_t k = 0; k < in.size (); ++k)
                {
                    const Vec2 p = in[k];
                    const Vec2 q = in[(k + 1) % in.size ()];
                    const double dp = cross (a, b, p);
                    const double dq = cross (a, b, q);
                    if (dp >= 0.0)
                        out.push_back (p);
                    if ((dp >= 0.0) != (dq >= 0.0))
                    {
                        const double t = dp / (dp - dq);
                        out.push_back ({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
                    }
                }
            }
            return out;
        }

        double polygon_area (const Polygon &poly)
        {
            double twice = 0.0;
            for (std::size_t k = 0; k < poly.size (); ++k)
            {
                const Vec2 p = poly[k];
                const Vec2 q = poly[(k + 1) % poly.size ()];
                twice += p.x * q.y - q.x * p.y;
            }
            return 0.5 * std::abs (twice);
        }

        double point_segment_distance (Vec2 p, Vec2 a, Vec2 b)
        {
            const double ex = b.x - a.x;
            const double ey = b.y - a.y;
            const double len2 = ex * ex + ey * ey;
            double t = len2 > 0.0 ? ((p.x - a.x) * ex + (p.y - a.y) * ey) / len2 : 0.0;
            t = std::clamp (t, 0.0, 1.0);
            return std::hypot (p.x - (a.x + t * ex), p.y - (a.y + t * ey));
        }

        // True when some box axis strictly separates the two boxes.
        bool separated (const OrientedBox &a, const OrientedBox &b)
        {
            const auto ca = a.corners ();
            const auto cb = b.corners ();
            for (const OrientedBox *box : {&a, &b})
            {
                for (double ang : {box->heading, box->heading + std::numbers::pi / 2.0})
                {
                    const double ux = std::cos (ang);
                    const double uy = std::sin (ang);
                    double amin = std::numeric_limits<double>::infinity (), amax = -amin;
                    double bmin = amin, bmax = -amin;
                    for (const Vec2 &p : ca)
                    {
                        const double d = p.x * ux + p.y * uy;
                        amin = std::min (amin, d);
                        amax = std::max (amax, d);
                    }
                    for (const Vec2 &p : cb)
                    {
                        const double d = p.x * ux + p.y * uy;
                        bmin = std::min (bmin, d);
                        bmax = std::max (bmax, d);
                    }
                    if (amax < bmin || bmax < amin)
                        return true;
                }
            }
            return false;
        }
    } // namespace

    std::array<Vec2, 4> OrientedBox::corners () const
    {
        const double c = std::cos (heading);
        const double s = std::sin (heading);
        const auto at = [&] (double lx, double ly) {
            return Vec2{center.x + lx * c - ly * s, center.y + lx * s + ly * c};
        };
        return {at (-half_length, -half_width), at (half_length, -half_width), at (half_length, half_width),
                at (-half_length, half_width)};
    }

    OrientedBox bounding_box (const PathSample &sample, double length, double width)
    {
        return {{sample.x_g, sample.y_g}, sample.psi, 0.5 * length, 0.5 * width};
    }

    OrientedBox SafetyRegion::as_box () const
    {
        const double shift = 0.5 * (forward_extension - rearward_extension);
        return {{base.center.x + shift * std::cos (base.heading), base.center.y + shift * std::sin (base.heading)},
                base.heading,
                base.half_length + 0.5 * (forward_extension + rearward_extension),
                base.half_width};
    }

    SafetyRegion safety_region (const PathSample &self_sample, double self_length, double self_width,
                                const PathSample &other_sample, double other_v, double self_v,
                                const SafetyMargins &margins)
    {
        SafetyRegion r;
        r.base = bounding_box (self_sample, self_length + 2.0 * margins.longitudinal,
                               self_width + 2.0 * margins.lateral);
        const double closing = self_v - other_v * std::cos (other_sample.psi - self_sample.psi);
        r.forward_extension = margins.headway * std::max (0.0, closing);
        r.rearward_extension = 0.0;
        return r;
    }

    double area_overlap (const OrientedBox &a, const OrientedBox &b)
    {
        const auto cb = b.corners ();
        return polygon_area (clip (Polygon (cb.begin (), cb.end ()), a.corners ()));
    }

    double area_overlap (const SafetyRegion &region, const OrientedBox &other)
    {
        return area_overlap (region.as_box (), other);
    }

    double box_distance (const OrientedBox &a, const OrientedBox &b)
    {
        if (!separated (a, b))
            return 0.0;
        const auto ca = a.corners ();
        const auto cb = b.corners ();
        double best = std::numeric_limits<double>::infinity ();
        for (std::size_t e = 0; e < 4; ++e)
        {
            for (const Vec2 &p : ca)
                best = std::min (best, point_segment_distance (p, cb[e], cb[(e + 1) % 4]));
            for (const Vec2 &p : cb)
                best = std::min (best, point_segment_distance (p, ca[e], ca[(e + 1) % 4]));
        }
        return best;
    }

    double smooth_area_overlap (const SafetyRegion &region, const OrientedBox &other, double sharpness)
    {
        const OrientedBox &b = region.base;
        return smooth::overlap_core (b.center.x, b.center.y, b.heading, b.half_length + region.forward_extension,
                                     b.half_length + region.rearward_extension, b.half_width, other.center.x,
                                     other.center.y, other.heading, other.half_length, other.half_width, sharpness);
    }

    SmoothOverlapGradient smooth_area_overlap_grad (const SafetyRegion &region, const OrientedBox &other,
                                                    double sharpness)
    {
        using D = Dual<2>;
        const OrientedBox &b = region.base;
        const D val = smooth::overlap_core<D> (b.center.x, b.center.y, b.heading,
                                               b.half_length + region.forward_extension,
                                               b.half_length + region.rearward_extension, b.half_width,
                                               D::variable (other.center.x, 0), D::variable (other.center.y, 1),
                                               other.heading, other.half_length, other.half_width, sharpness);
        return {val.val, val.d[0], val.d[1]};
    }

    bool paths_conflict (const PathSpec &a, double width_a, const PathSpec &b, double width_b, double cr_half_width,
                         double margin)
    {
        constexpr double kStep = 0.1;
        const auto inside_points = [cr_half_width] (const PathSpec &p) {
            std::vector<Vec2> pts;
            const auto n = static_cast<std::size_t> (std::ceil (p.total_length () / kStep));
            for (std::size_t k = 0; k <= n; ++k)
            {
                const PathSample smp = sample_path (p, std::min (p.total_length (), static_cast<double> (k) * kStep));
                if (std::abs (smp.x_g) <= cr_half_width && std::abs (smp.y_g) <= cr_half_width)
                    pts.push_back ({smp.x_g, smp.y_g});
            }
            return pts;
        };
        const double reach = 0.5 * width_a + margin + 0.5 * width_b + margin;
        const auto pa = inside_points (a);
        const auto pb = inside_points (b);
        for (const Vec2 &p : pa)
            for (const Vec2 &q : pb)
                if (std::hypot (p.x - q.x, p.y - q.y) <= reach)
                    return true;
        return false;
    }

    std::set<AgentId> ahead_set (AgentId i, const WorldSnapshot &world, double max_gap)
    {
        std::set<AgentId> out;
        const AgentSnapshot &me = world.agents.at (i);
        for (const auto &[l, other] : world.agents)
        {
            if (l == i)
                continue;
            const PathSample pose = sample_path (*other.path, other.state.s);
            const PathProjection proj = project_onto_path (*me.path, {pose.x_g, pose.y_g});
            const double lead = proj.s - me.state.s;
            if (proj.lateral >= me.params.width || !(lead > 0.0) || lead > max_gap)
                continue;
            const PathSample along = sample_path (*me.path, proj.s);
            const double dpsi = std::remainder (pose.psi - along.psi, 2.0 * std::numbers::pi);
            if (std::abs (dpsi) < std::numbers::pi / 4.0)
                out.insert (l);
        }
        return out;
    }

    bool inside_icr (const RegionBounds &b, double s) noexcept { return s >= b.s_icr_in && s < b.s_icr_out; }

    ConflictSets conflict_sets (AgentId i, const WorldSnapshot &world, const PriorityAssignment &assignment)
    {
        std::map<AgentId, AgentState> states;
        std::map<AgentId, RegionBounds> regions;
        for (const auto &[id, snap] : world.agents)
        {
            states[id] = snap.state;
            regions[id] = snap.regions;
        }

        ConflictSets cs;
        cs.cross = higher_priority_crossing_set (assignment, i, states, regions, world.paths_conflict);
        cs.ahead = ahead_set (i, world);
        const AgentSnapshot &me = world.agents.at (i);
        cs.combined = cs.ahead;
        if (inside_icr (me.regions, me.state.s))
            cs.combined.insert (cs.cross.begin (), cs.cross.end ());
        return cs;
    }

} // namespace intersim
