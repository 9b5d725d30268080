#pragma once
/**
 * @file   mpc.hpp
 * @brief  Per-agent nonlinear MPC: tracking objective, constraint residuals,
 *         quadratic-penalty reformulation over the input box and a
 *         forward-backward quasi-Newton (PANOC-type) solver.
 */

#include "intersim/agent_dynamics.hpp"
#include "intersim/conflict_geometry.hpp"
#include "intersim/network.hpp"
#include "intersim/path_geometry.hpp"

#include <functional>
#include <span>
#include <vector>

namespace intersim
{
    /// Trajectory another agent broadcast at the previous sampling instant.
    /// All sequences have N + 1 entries; entry j refers to time (k - 1) + j.
    struct NeighborForecast
    {
        AgentId id = 0;
        std::vector<double> x_g, y_g, psi, v;
        double length = 5.0;
        double width = 2.0;
    };

    struct OcpParameter
    {
        AgentState own_state;
        std::vector<NeighborForecast> neighbors;

        /// Throws std::invalid_argument on mismatched lengths or non-finite entries.
        void validate (std::size_t horizon) const;
    };

    struct PenaltyConfig
    {
        double initial_weight = 10.0;
        double multiplier = 5.0;
        int max_outer_iterations = 8;
        double constraint_tolerance = 1e-2;
        double inner_tolerance = 1e-4;
        int lbfgs_memory = 10;
        int max_inner_iterations = 500;
        /// Retry from fixed starting inputs when the warm start gets stuck.
        bool restart_candidates = true;

        void validate () const;
    };

    struct SolverReport
    {
        int outer_iterations = 0; ///< of the winning candidate
        int inner_iterations = 0; ///< of the winning candidate, summed over its outer iterations
        double max_violation = 0.0;
        double objective = 0.0; ///< tracking objective (no penalty) of the returned inputs
        double wall_ms = 0.0;
        bool converged = false;       ///< violation within tolerance
        bool inner_limit_hit = false; ///< some inner solve stopped at max_inner_iterations
        int candidate = 0; ///< start that won: 0 warm, 1 constant input, 2 full throttle, 3 full brake, 4 previous plan unchanged
        double final_weight = 0.0; ///< penalty weight of the last outer iteration
        std::vector<double> violation_history; ///< max violation after each outer iteration
    };

    struct PredictedTrajectory
    {
        std::vector<AgentState> states; ///< N + 1, states[0] is the measured state
        std::vector<double> x_g, y_g, psi; ///< N + 1 global poses on the path
        std::vector<double> lateral_accel; ///< N values, steps 1..N
        std::vector<double> total_accel;   ///< N values, steps 1..N

        [[nodiscard]] NeighborForecast as_forecast (AgentId id, double length, double width) const;
    };

    /// Everything about agent i that stays fixed during one solve.
    struct OcpContext
    {
        DiscreteModel model;
        AgentParams params;
        const PathSpec *path = nullptr;
        RegionBounds regions;
        SafetyMargins margins;
        double sharpness = 10.0;      ///< softplus sharpness of the CA surrogate, 1/m
        double curvature_blend = 0.5; ///< m
        int horizon = 50;
    };

    [[nodiscard]] double stage_cost (const AgentState &x, double u, double v_ref, double q, double r);
    [[nodiscard]] double terminal_cost (const AgentState &x_N, double v_ref, double q_N);
    [[nodiscard]] double preview_residual (double s_N, double s_cr_out, double s_stop);

    /// Stacked non-negative violations, in this order: for j = 1..N the four
    /// blocks [-v]+, [v - v_max]+, [|a_y| - a_y_max]+, [a_x^2 + a_y^2 - a_tot^2]+
    /// (interleaved per step), then the CA surrogate for every neighbour and
    /// step, then the spatial-preview product.
    [[nodiscard]] std::vector<double> constraint_residuals (const PredictedTrajectory &traj, const OcpParameter &z,
                                                            const OcpContext &ctx);

    [[nodiscard]] PredictedTrajectory predict (std::span<const double> u, const AgentState &x0, const OcpContext &ctx);

    struct PenaltyValue
    {
        double value = 0.0;
        std::vector<double> gradient;
    };

    /// phi(u) = tracking objective + weight * sum(residual^2), with the
    /// gradient from a reverse sweep through the rollout.
    [[nodiscard]] PenaltyValue penalty_objective (std::span<const double> u, const OcpParameter &z, double weight,
                                                  const OcpContext &ctx);

    /// Value into the return, gradient into @p grad.
    using SmoothObjective = std::function<double (std::span<const double> u, std::span<double> grad)>;

    struct BoxSolveResult
    {
        std::vector<double> u;
        int iterations = 0;
        double stationarity = 0.0; ///< ||u - P(u - gamma grad)||_inf / gamma at the last iterate
        double value = 0.0;
        bool converged = false;
    };

    /// Stationary point of @p phi over [lower, upper]: forward-backward steps
    /// accelerated by L-BFGS directions on the fixed-point residual and
    /// globalised by a line search on the forward-backward envelope.
    [[nodiscard]] BoxSolveResult box_solve (const SmoothObjective &phi, std::span<const double> lower,
                                            std::span<const double> upper, std::span<const double> u0,
                                            const PenaltyConfig &cfg);

    struct OcpSolution
    {
        std::vector<double> u;
        PredictedTrajectory trajectory;
        SolverReport report;
    };

    /// Quadratic-penalty loop around box_solve. @p warm may be empty (cold
    /// start u = 0). With restart_candidates, a warm result that did not
    /// converge, or that halts before the stop line, is compared against
    /// runs from constant and full-throttle inputs (plus full brake when
    /// unconverged). The shifted warm start itself is also a candidate. A
    /// candidate within tolerance with the lowest tracking objective wins,
    /// otherwise the one with the least violation.
    [[nodiscard]] OcpSolution solve_ocp (const OcpParameter &z, const OcpContext &ctx, const PenaltyConfig &cfg,
                                         std::span<const double> warm = {});

    /// Shift by one step and repeat the last entry.
    [[nodiscard]] std::vector<double> shift_warm_start (std::span<const double> u);

    /// Constant-speed, zero-acceleration forecast used before any solve exists.
    [[nodiscard]] PredictedTrajectory initial_broadcast (const AgentState &x0, const PathSpec &path, int horizon,
                                                         double T_s);

} // namespace intersim
