#pragma once
/**
 * @file   path_geometry.hpp
 * @brief  Arc-length parameterized routes through a four-arm intersection.
 *
 * A route is a chain of straight and circular-arc primitives. Every map
 * (position, heading, curvature) is evaluated analytically per primitive, so
 * the path coordinate s is exactly the travelled distance.
 */

#include <cstddef>
#include <string_view>
#include <variant>
#include <vector>

namespace intersim
{
    struct Vec2
    {
        double x = 0.0;
        double y = 0.0;
    };

    struct StraightSegment
    {
        Vec2 start;
        double heading = 0.0; ///< rad
        double length = 0.0;  ///< m
    };

    struct ArcSegment
    {
        Vec2 center;
        double radius = 0.0;      ///< m
        double start_angle = 0.0; ///< polar angle of the start point around the center
        double sweep = 0.0;       ///< signed, positive = counter-clockwise (left turn)
    };

    using Segment = std::variant<StraightSegment, ArcSegment>;

    [[nodiscard]] double segment_length (const Segment &seg);

    struct PathSample
    {
        double x_g = 0.0;
        double y_g = 0.0;
        double psi = 0.0;
        double kappa = 0.0;
        bool clamped = false; ///< s was outside [0, total_length] and got clamped
    };

    /// Immutable chain of C0-continuous primitives.
    class PathSpec
    {
      public:
        PathSpec () = default;

        /// Throws std::invalid_argument on empty input, non-positive lengths
        /// or a pose jump between consecutive segments.
        explicit PathSpec (std::vector<Segment> segments);

        [[nodiscard]] const std::vector<Segment> &segments () const noexcept { return segments_; }
        [[nodiscard]] double total_length () const noexcept { return total_length_; }
        /// Path coordinate at which segment @p index starts.
        [[nodiscard]] double segment_start (std::size_t index) const { return starts_.at (index); }

        /// Index of the segment containing s (s already clamped).
        [[nodiscard]] std::size_t locate (double s) const noexcept;

      private:
        std::vector<Segment> segments_;
        std::vector<double> starts_;
        double total_length_ = 0.0;
    };

    enum class Arm
    {
        North,
        South,
        East,
        West
    };

    [[nodiscard]] Arm parse_arm (std::string_view name);
    [[nodiscard]] std::string_view arm_name (Arm arm) noexcept;

    struct RouteSpec
    {
        Arm entry = Arm::North;
        Arm exit = Arm::South;
        double lane_offset = 2.0;      ///< m, right-hand traffic
        double turn_radius = 8.0;      ///< m, ignored for straight routes
        double approach_length = 84.0; ///< m from the intersection center to either path end
    };

    /// Builds the lane-centerline path for a route. Entry and exit legs are
    /// approach_length long measured from the center; turns use a single
    /// quarter-circle tangent to both lane lines.
    [[nodiscard]] PathSpec build_path (const RouteSpec &route);

    /// (F_p(s), F_psi(s), F_kappa(s)). Out-of-range s is clamped and flagged.
    [[nodiscard]] PathSample sample_path (const PathSpec &path, double s);

    struct CurvatureSample
    {
        double kappa = 0.0;
        double dkappa_ds = 0.0;
    };

    /// C1 curvature profile used by the optimizer. Jumps between segments are
    /// replaced by a smoothstep ramp of width @p blend placed on the side with
    /// the smaller |kappa|, so |blended| >= |exact| everywhere.
    [[nodiscard]] CurvatureSample blended_curvature (const PathSpec &path, double s, double blend = 0.5);

    struct PathProjection
    {
        double s = 0.0;       ///< path coordinate of the closest point
        double lateral = 0.0; ///< unsigned distance to the path
    };

    [[nodiscard]] PathProjection project_onto_path (const PathSpec &path, Vec2 point);

    struct IntersectionGeometry
    {
        double cr_half_width = 6.0; ///< CR is the square |x|,|y| <= cr_half_width
        double icr_radius = 70.0;
        double brake_margin = 2.0;
        double stop_setback = 1.0;
    };

    struct RegionBounds
    {
        double s_icr_in = 0.0;
        double s_icr_out = 0.0;
        double s_bsr_in = 0.0;
        double s_bsr_out = 0.0;
        double s_cr_in = 0.0;
        double s_cr_out = 0.0;
        double s_stop = 0.0;
    };

    /// Region boundaries along @p path. The brake-safe region starts one
    /// worst-case braking distance v_max^2 / (2 |a_x_min|) plus the margin
    /// before the critical region. Throws if the path never enters the CR.
    [[nodiscard]] RegionBounds compute_regions (const PathSpec &path, const IntersectionGeometry &geometry,
                                                double v_max, double a_x_min);

    enum class RegionLabel
    {
        Outside,
        Icr,
        Bsr,
        Cr,
        Past
    };

    [[nodiscard]] RegionLabel region_of (const RegionBounds &bounds, double s) noexcept;
    [[nodiscard]] std::string_view region_name (RegionLabel label) noexcept;

} // namespace intersim
