#pragma once
/**
 * @file   agent_dynamics.hpp
 * @brief  Longitudinal agent model: first-order drivetrain lag feeding a
 *         double integrator, sampled with a zero-order hold.
 *
 * Continuous model, state x = (a_x, v, s), input u = a_x,ref:
 *
 *   d/dt a_x = (u - a_x) / T_ax
 *   d/dt v   = a_x
 *   d/dt s   = v
 */

#include <span>
#include <vector>

#include <Eigen/Core>

namespace intersim
{
    struct AgentState
    {
        double a_x = 0.0; ///< m/s^2
        double v = 0.0;   ///< m/s
        double s = 0.0;   ///< m

        [[nodiscard]] Eigen::Vector3d vec () const { return {a_x, v, s}; }
        [[nodiscard]] static AgentState from (const Eigen::Vector3d &x) { return {x[0], x[1], x[2]}; }
        [[nodiscard]] bool finite () const noexcept;

        friend bool operator== (const AgentState &, const AgentState &) = default;
    };

    struct AgentParams
    {
        double T_ax = 0.3;       ///< drivetrain time constant, s
        double a_x_min = -7.0;   ///< m/s^2
        double a_x_max = 4.0;    ///< m/s^2
        double v_max = 15.0;     ///< m/s
        double a_y_max = 3.5;    ///< m/s^2
        double a_tot_max = 7.0;  ///< m/s^2
        double length = 5.0;     ///< m
        double width = 2.0;      ///< m
        double q = 1.0;
        double q_N = 1.0;
        double r = 20.0;
        double v_ref = 14.0;     ///< m/s
    };

    /// Throws std::invalid_argument naming the first violated bound.
    void validate (const AgentParams &params);

    struct DiscreteModel
    {
        Eigen::Matrix3d A_d = Eigen::Matrix3d::Identity ();
        Eigen::Vector3d B_d = Eigen::Vector3d::Zero ();
        double T_s = 0.0;
    };

    /// Exact ZOH sampling in closed form (the system is lower triangular).
    [[nodiscard]] DiscreteModel discretize (double T_ax, double T_s);

    [[nodiscard]] AgentState step (const DiscreteModel &model, const AgentState &x, double u);

    /// Returns u.size() + 1 states, the first one being x0.
    [[nodiscard]] std::vector<AgentState> rollout (const DiscreteModel &model, const AgentState &x0,
                                                   std::span<const double> u);

} // namespace intersim
