#pragma once
/**
 * @file   conflict_geometry.hpp
 * @brief  Vehicle footprints, safety regions, their overlap area and the
 *         per-agent collision-avoidance (conflict) sets.
 */

#include "intersim/agent_dynamics.hpp"
#include "intersim/auction.hpp"
#include "intersim/dual.hpp"
#include "intersim/network.hpp"
#include "intersim/path_geometry.hpp"

#include <array>
#include <functional>
#include <map>
#include <set>

namespace intersim
{
    struct OrientedBox
    {
        Vec2 center;
        double heading = 0.0;
        double half_length = 0.0;
        double half_width = 0.0;

        /// Counter-clockwise, starting at the rear-right corner.
        [[nodiscard]] std::array<Vec2, 4> corners () const;
    };

    [[nodiscard]] OrientedBox bounding_box (const PathSample &sample, double length, double width);

    struct SafetyMargins
    {
        double lateral = 0.25;     ///< m added on each side
        double longitudinal = 1.5; ///< m added front and rear
        double headway = 0.5;      ///< s, scales the closing speed into a forward extension
    };

    /// Base box (own footprint inflated by the margins) stretched forward by
    /// forward_extension and backward by rearward_extension along its heading.
    struct SafetyRegion
    {
        OrientedBox base;
        double forward_extension = 0.0;
        double rearward_extension = 0.0;

        /// The region as a single oriented rectangle.
        [[nodiscard]] OrientedBox as_box () const;
    };

    [[nodiscard]] SafetyRegion safety_region (const PathSample &self_sample, double self_length, double self_width,
                                              const PathSample &other_sample, double other_v, double self_v,
                                              const SafetyMargins &margins);

    /// Exact intersection area by convex polygon clipping.
    [[nodiscard]] double area_overlap (const OrientedBox &a, const OrientedBox &b);
    [[nodiscard]] double area_overlap (const SafetyRegion &region, const OrientedBox &other);

    /// Euclidean gap between two boxes, 0 when they touch or overlap.
    [[nodiscard]] double box_distance (const OrientedBox &a, const OrientedBox &b);

    namespace smooth
    {
        inline constexpr double kAbsEps = 1e-3;   ///< smoothing of |cos|, |sin| in projected radii
        inline constexpr double kMinEps = 1e-2;   ///< smoothing of min() in 1-D overlaps
        inline constexpr double kHingeEps = 0.1;  ///< m/s, smoothing of max(0, closing speed)

        template <class T> T softplus (const T &x, double k)
        {
            if (value_of (x) > 0.0)
                return x + log1p (exp (T (-k) * x)) / T (k);
            return log1p (exp (T (k) * x)) / T (k);
        }
        template <class T> T abs_upper (const T &x) { return sqrt (x * x + T (kAbsEps * kAbsEps)); }
        /// >= min(a, b)
        template <class T> T min_upper (const T &a, const T &b)
        {
            const T diff = a - b;
            return T (0.5) * (a + b) - T (0.5) * (sqrt (diff * diff + T (kMinEps * kMinEps)) - T (kMinEps));
        }
        /// >= max(0, x)
        template <class T> T hinge_upper (const T &x) { return T (0.5) * (x + sqrt (x * x + T (kHingeEps * kHingeEps))); }

        /**
         * Separating-axis relaxation of the overlap between a rectangle R and a
         * box B: product of softplus-smoothed 1-D overlaps of B's projection
         * onto R's two body axes. Over-approximates the exact area.
         *
         * R spans [-rear, front] x [-half_width, half_width] in its body frame.
         */
        template <class T>
        T overlap_core (const T &cx, const T &cy, const T &heading, const T &front, const T &rear,
                        const T &half_width, const T &ox, const T &oy, const T &other_heading,
                        double other_half_length, double other_half_width, double sharpness)
        {
            const T c = cos (heading);
            const T s = sin (heading);
            const T dx = ox - cx;
            const T dy = oy - cy;
            const T p1 = dx * c + dy * s;
            const T p2 = dy * c - dx * s;
            const T rel = other_heading - heading;
            const T acr = abs_upper (cos (rel));
            const T asr = abs_upper (sin (rel));
            const T r1 = T (other_half_length) * acr + T (other_half_width) * asr;
            const T r2 = T (other_half_length) * asr + T (other_half_width) * acr;
            const T o1 = min_upper (front - (p1 - r1), (p1 + r1) + rear);
            const T o2 = min_upper (half_width - (p2 - r2), (p2 + r2) + half_width);
            return softplus (o1, sharpness) * softplus (o2, sharpness);
        }

        /**
         * Collision-avoidance surrogate used inside the optimizer: the own
         * safety region is built from the own pose and speed (forward extension
         * uses a smooth hinge on the closing speed) and tested against the other
         * agent's box.
         */
        template <class T>
        T ca_surrogate (const T &x, const T &y, const T &psi, const T &v, double self_half_length,
                        double self_half_width, const SafetyMargins &m, double ox, double oy, double opsi, double ov,
                        double other_half_length, double other_half_width, double sharpness)
        {
            const T closing = v - T (ov) * cos (T (opsi) - psi);
            const T ext = T (m.headway) * hinge_upper (closing);
            const T base_hl = T (self_half_length + m.longitudinal);
            const T hw = T (self_half_width + m.lateral);
            return overlap_core (x, y, psi, base_hl + ext, base_hl, hw, T (ox), T (oy), T (opsi), other_half_length,
                                 other_half_width, sharpness);
        }
    } // namespace smooth

    /// Differentiable over-approximation of area_overlap(region, other).
    [[nodiscard]] double smooth_area_overlap (const SafetyRegion &region, const OrientedBox &other, double sharpness);

    struct SmoothOverlapGradient
    {
        double value = 0.0;
        double d_other_x = 0.0;
        double d_other_y = 0.0;
    };
    [[nodiscard]] SmoothOverlapGradient smooth_area_overlap_grad (const SafetyRegion &region, const OrientedBox &other,
                                                                  double sharpness);

    /// Corridors of half width W/2 + margin around both centerlines intersect
    /// inside the CR square.
    [[nodiscard]] bool paths_conflict (const PathSpec &a, double width_a, const PathSpec &b, double width_b,
                                       double cr_half_width, double margin = 0.5);

    struct AgentSnapshot
    {
        const PathSpec *path = nullptr;
        RegionBounds regions;
        AgentState state;
        AgentParams params;
    };

    struct WorldSnapshot
    {
        std::map<AgentId, AgentSnapshot> agents;
        std::function<bool (AgentId, AgentId)> paths_conflict;
    };

    struct ConflictSets
    {
        std::set<AgentId> cross;
        std::set<AgentId> ahead;
        std::set<AgentId> combined;
    };

    /// Agents driving in i's lane in front of it: lateral offset from i's path
    /// below W, heading within 45 degrees of the path, and path-coordinate lead
    /// in (0, max_gap].
    [[nodiscard]] std::set<AgentId> ahead_set (AgentId i, const WorldSnapshot &world, double max_gap = 50.0);

    [[nodiscard]] bool inside_icr (const RegionBounds &b, double s) noexcept;

    [[nodiscard]] ConflictSets conflict_sets (AgentId i, const WorldSnapshot &world,
                                              const PriorityAssignment &assignment);

} // namespace intersim
