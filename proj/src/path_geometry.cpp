#include "intersim/path_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace intersim
{
    namespace
    {
        constexpr double kPi = std::numbers::pi;

        double wrap_angle (double a)
        {
            a = std::fmod (a + kPi, 2.0 * kPi);
            if (a < 0.0)
                a += 2.0 * kPi;
            return a - kPi;
        }

        double sign_of (double x) { return x >= 0.0 ? 1.0 : -1.0; }

        struct Pose
        {
            Vec2 p;
            double heading;
        };

        Pose start_pose (const Segment &seg)
        {
            if (const auto *st = std::get_if<StraightSegment> (&seg))
                return {st->start, st->heading};
            const auto &arc = std::get<ArcSegment> (seg);
            const double sgn = sign_of (arc.sweep);
            return {{arc.center.x + arc.radius * std::cos (arc.start_angle),
                     arc.center.y + arc.radius * std::sin (arc.start_angle)},
                    arc.start_angle + sgn * kPi / 2.0};
        }

        PathSample sample_segment (const Segment &seg, double local)
        {
            if (const auto *st = std::get_if<StraightSegment> (&seg))
            {
                return {st->start.x + local * std::cos (st->heading), st->start.y + local * std::sin (st->heading),
                        st->heading, 0.0, false};
            }
            const auto &arc = std::get<ArcSegment> (seg);
            const double sgn = sign_of (arc.sweep);
            const double theta = arc.start_angle + sgn * local / arc.radius;
            return {arc.center.x + arc.radius * std::cos (theta), arc.center.y + arc.radius * std::sin (theta),
                    theta + sgn * kPi / 2.0, sgn / arc.radius, false};
        }

        double segment_curvature (const Segment &seg)
        {
            if (std::holds_alternative<StraightSegment> (seg))
                return 0.0;
            const auto &arc = std::get<ArcSegment> (seg);
            return sign_of (arc.sweep) / arc.radius;
        }

        Pose end_pose (const Segment &seg)
        {
            const PathSample smp = sample_segment (seg, segment_length (seg));
            return {{smp.x_g, smp.y_g}, smp.psi};
        }

        struct ArmFrame
        {
            Vec2 point;
            double heading;
        };

        // Entry: where a vehicle coming from this arm starts. Right-hand traffic.
        ArmFrame entry_frame (Arm arm, double d, double a)
        {
            switch (arm)
            {
            case Arm::North: return {{-d, a}, -kPi / 2.0};
            case Arm::South: return {{d, -a}, kPi / 2.0};
            case Arm::East: return {{a, d}, kPi};
            case Arm::West: return {{-a, -d}, 0.0};
            }
            throw std::invalid_argument ("unknown arm");
        }

        ArmFrame exit_frame (Arm arm, double d, double a)
        {
            switch (arm)
            {
            case Arm::North: return {{d, a}, kPi / 2.0};
            case Arm::South: return {{-d, -a}, -kPi / 2.0};
            case Arm::East: return {{a, -d}, 0.0};
            case Arm::West: return {{-a, d}, kPi};
            }
            throw std::invalid_argument ("unknown arm");
        }

        // First and last path coordinate satisfying `inside`, refined by bisection.
        template <class Pred> std::optional<std::pair<double, double>> inside_span (const PathSpec &path, Pred inside)
        {
            constexpr double kStep = 0.05;
            const double total = path.total_length ();
            const auto test = [&] (double s) {
                const PathSample p = sample_path (path, s);
                return inside (p.x_g, p.y_g);
            };
            const auto refine = [&] (double out, double in) {
                for (int it = 0; it < 80; ++it)
                {
                    const double mid = 0.5 * (out + in);
                    if (test (mid))
                        in = mid;
                    else
                        out = mid;
                }
                return in;
            };

            const auto n = static_cast<std::size_t> (std::ceil (total / kStep));
            std::optional<double> first;
            std::optional<double> last;
            double prev_s = 0.0;
            bool prev_in = false;
            for (std::size_t k = 0; k <= n; ++k)
            {
                const double s = std::min (total, static_cast<double> (k) * kStep);
                const bool in = test (s);
                if (in && !first)
                    first = (k == 0) ? 0.0 : refine (prev_s, s);
                if (!in && prev_in)
                    last = refine (s, prev_s);
                prev_s = s;
                prev_in = in;
            }
            if (!first)
                return std::nullopt;
            if (prev_in)
                last = total;
            return std::make_pair (*first, *last);
        }
    } // namespace

    double segment_length (const Segment &seg)
    {
        if (const auto *st = std::get_if<StraightSegment> (&seg))
            return st->length;
        const auto &arc = std::get<ArcSegment> (seg);
        return arc.radius * std::abs (arc.sweep);
    }

    PathSpec::PathSpec (std::vector<Segment> segments) : segments_ (std::move (segments))
    {
        if (segments_.empty ())
            throw std::invalid_argument ("path needs at least one segment");

        starts_.reserve (segments_.size ());
        for (std::size_t j = 0; j < segments_.size (); ++j)
        {
            if (const auto *arc = std::get_if<ArcSegment> (&segments_[j]); arc && !(arc->radius > 0.0))
                throw std::invalid_argument ("arc radius must be positive");
            const double len = segment_length (segments_[j]);
            if (!(len > 0.0) || !std::isfinite (len))
                throw std::invalid_argument ("segment " + std::to_string (j) + " has non-positive length");
            if (j > 0)
            {
                const Pose a = end_pose (segments_[j - 1]);
                const Pose b = start_pose (segments_[j]);
                if (std::hypot (a.p.x - b.p.x, a.p.y - b.p.y) > 1e-9 ||
                    std::abs (wrap_angle (a.heading - b.heading)) > 1e-9)
                    throw std::invalid_argument ("segments " + std::to_string (j - 1) + " and " + std::to_string (j) +
                                                 " are not continuous");
            }
            starts_.push_back (total_length_);
            total_length_ += len;
        }
    }

    std::size_t PathSpec::locate (double s) const noexcept
    {
        const auto it = std::upper_bound (starts_.begin (), starts_.end (), s);
        if (it == starts_.begin ())
            return 0;
        return static_cast<std::size_t> (std::distance (starts_.begin (), it) - 1);
    }

    Arm parse_arm (std::string_view name)
    {
        if (name == "north")
            return Arm::North;
        if (name == "south")
            return Arm::South;
        if (name == "east")
            return Arm::East;
        if (name == "west")
            return Arm::West;
        throw std::invalid_argument ("unknown arm '" + std::string (name) + "'");
    }

    std::string_view arm_name (Arm arm) noexcept
    {
        switch (arm)
        {
        case Arm::North: return "north";
        case Arm::South: return "south";
        case Arm::East: return "east";
        case Arm::West: return "west";
        }
        return "?";
    }

    PathSpec build_path (const RouteSpec &route)
    {
        if (route.entry == route.exit)
            throw std::invalid_argument ("entry and exit arm must differ");
        if (!(route.approach_length > 0.0))
            throw std::invalid_argument ("approach length must be positive");

        const double d = route.lane_offset;
        const double a = route.approach_length;
        const ArmFrame in = entry_frame (route.entry, d, a);
        const ArmFrame out = exit_frame (route.exit, d, a);
        const Vec2 h_in{std::cos (in.heading), std::sin (in.heading)};
        const Vec2 h_out{std::cos (out.heading), std::sin (out.heading)};
        const double cross = h_in.x * h_out.y - h_in.y * h_out.x;

        if (std::abs (cross) < 1e-12)
        {
            // straight through: both lane lines coincide
            const double len = std::hypot (out.point.x - in.point.x, out.point.y - in.point.y);
            return PathSpec ({StraightSegment{in.point, in.heading, len}});
        }

        const double r = route.turn_radius;
        if (!(r > 0.0))
            throw std::invalid_argument ("turn radius must be positive for turning routes");

        // Corner where the entry and exit lane lines meet.
        const double along = (out.point.x - in.point.x) * h_in.x + (out.point.y - in.point.y) * h_in.y;
        const Vec2 corner{in.point.x + along * h_in.x, in.point.y + along * h_in.y};
        const double exit_leg = (out.point.x - corner.x) * h_out.x + (out.point.y - corner.y) * h_out.y;
        if (r > along || r > exit_leg)
            throw std::invalid_argument ("turn radius " + std::to_string (r) +
                                         " m exceeds the available corner clearance");

        const double sgn = cross > 0.0 ? 1.0 : -1.0;
        const Vec2 t1{corner.x - r * h_in.x, corner.y - r * h_in.y};
        const Vec2 n_left{-h_in.y, h_in.x};
        const Vec2 center{t1.x + sgn * r * n_left.x, t1.y + sgn * r * n_left.y};

        std::vector<Segment> segs;
        if (along - r > 0.0)
            segs.emplace_back (StraightSegment{in.point, in.heading, along - r});
        const ArcSegment arc{center, r, in.heading - sgn * kPi / 2.0, sgn * kPi / 2.0};
        segs.emplace_back (arc);
        if (exit_leg - r > 0.0)
        {
            const Pose arc_end = end_pose (arc);
            segs.emplace_back (StraightSegment{arc_end.p, in.heading + sgn * kPi / 2.0, exit_leg - r});
        }
        return PathSpec (std::move (segs));
    }

    PathSample sample_path (const PathSpec &path, double s)
    {
        bool clamped = false;
        if (!(s >= 0.0))
        {
            s = 0.0;
            clamped = true;
        }
        else if (s > path.total_length ())
        {
            s = path.total_length ();
            clamped = true;
        }
        const std::size_t idx = path.locate (s);
        PathSample out = sample_segment (path.segments ()[idx], s - path.segment_start (idx));
        out.clamped = clamped;
        return out;
    }

    CurvatureSample blended_curvature (const PathSpec &path, double s, double blend)
    {
        const auto &segs = path.segments ();
        if (!(s >= 0.0) || s > path.total_length ())
        {
            s = std::clamp (std::isnan (s) ? 0.0 : s, 0.0, path.total_length ());
        }
        const std::size_t idx = path.locate (s);
        CurvatureSample out{segment_curvature (segs[idx]), 0.0};
        if (!(blend > 0.0))
            return out;

        // Each boundary owns one ramp; check the two adjacent to segment idx.
        for (std::size_t b = std::max<std::size_t> (idx, 1); b <= std::min (idx + 1, segs.size () - 1); ++b)
        {
            const double k_prev = segment_curvature (segs[b - 1]);
            const double k_next = segment_curvature (segs[b]);
            if (k_prev == k_next)
                continue;
            const double at = path.segment_start (b);
            const double ramp_begin = std::abs (k_prev) <= std::abs (k_next) ? at - blend : at;
            if (s < ramp_begin || s > ramp_begin + blend)
                continue;
            const double t = (s - ramp_begin) / blend;
            const double h = t * t * (3.0 - 2.0 * t);
            const double dh = 6.0 * t * (1.0 - t);
            return {k_prev + (k_next - k_prev) * h, (k_next - k_prev) * dh / blend};
        }
        return out;
    }

    PathProjection project_onto_path (const PathSpec &path, Vec2 point)
    {
        PathProjection best{0.0, std::numeric_limits<double>::infinity ()};
        const auto &segs = path.segments ();
        for (std::size_t j = 0; j < segs.size (); ++j)
        {
            const double len = segment_length (segs[j]);
            double local = 0.0;
            if (const auto *st = std::get_if<StraightSegment> (&segs[j]))
            {
                const double t = (point.x - st->start.x) * std::cos (st->heading) +
                                 (point.y - st->start.y) * std::sin (st->heading);
                local = std::clamp (t, 0.0, len);
            }
            else
            {
                const auto &arc = std::get<ArcSegment> (segs[j]);
                const double phi = std::atan2 (point.y - arc.center.y, point.x - arc.center.x);
                double rel = sign_of (arc.sweep) * (phi - arc.start_angle);
                rel = std::fmod (rel, 2.0 * kPi);
                if (rel < 0.0)
                    rel += 2.0 * kPi;
                if (rel <= std::abs (arc.sweep))
                    local = rel * arc.radius;
                else
                    local = (rel - std::abs (arc.sweep) < 2.0 * kPi - rel) ? len : 0.0;
            }
            const PathSample p = sample_segment (segs[j], local);
            const double dist = std::hypot (point.x - p.x_g, point.y - p.y_g);
            if (dist < best.lateral)
                best = {path.segment_start (j) + local, dist};
        }
        return best;
    }

    RegionBounds compute_regions (const PathSpec &path, const IntersectionGeometry &geometry, double v_max,
                                  double a_x_min)
    {
        if (!(geometry.cr_half_width > 0.0) || !(geometry.icr_radius > geometry.cr_half_width))
            throw std::invalid_argument ("intersection geometry needs 0 < cr_half_width < icr_radius");
        if (!(a_x_min < 0.0) || !(v_max > 0.0))
            throw std::invalid_argument ("braking distance needs v_max > 0 and a_x_min < 0");

        const double h = geometry.cr_half_width;
        const auto cr = inside_span (path, [h] (double x, double y) { return std::abs (x) <= h && std::abs (y) <= h; });
        if (!cr)
            throw std::invalid_argument ("path never enters the critical region");
        const double radius = geometry.icr_radius;
        const auto icr = inside_span (path, [radius] (double x, double y) { return std::hypot (x, y) <= radius; });

        RegionBounds b;
        b.s_cr_in = cr->first;
        b.s_cr_out = cr->second;
        b.s_icr_in = icr->first;
        b.s_icr_out = icr->second;
        b.s_bsr_out = b.s_cr_in;
        b.s_bsr_in = b.s_cr_in - (v_max * v_max / (2.0 * std::abs (a_x_min)) + geometry.brake_margin);
        b.s_stop = b.s_cr_in - geometry.stop_setback;

        if (!(b.s_icr_in < b.s_bsr_in) || !(b.s_cr_in < b.s_cr_out) || !(b.s_stop < b.s_cr_in))
            throw std::invalid_argument ("region bounds out of order: the ICR must start before the BSR");
        return b;
    }

    RegionLabel region_of (const RegionBounds &b, double s) noexcept
    {
        if (s < b.s_icr_in)
            return RegionLabel::Outside;
        if (s < b.s_bsr_in)
            return RegionLabel::Icr;
        if (s < b.s_cr_in)
            return RegionLabel::Bsr;
        if (s < b.s_cr_out)
            return RegionLabel::Cr;
        return RegionLabel::Past;
    }

    std::string_view region_name (RegionLabel label) noexcept
    {
        switch (label)
        {
        case RegionLabel::Outside: return "outside";
        case RegionLabel::Icr: return "icr";
        case RegionLabel::Bsr: return "bsr";
        case RegionLabel::Cr: return "cr";
        case RegionLabel::Past: return "past";
        }
        return "?";
    }

} // namespace intersim
