#include "intersim/agent_dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace intersim
{
    bool AgentState::finite () const noexcept
    {
        return std::isfinite (a_x) && std::isfinite (v) && std::isfinite (s);
    }

    void validate (const AgentParams &p)
    {
        const auto require = [] (bool ok, const char *what) {
            if (!ok)
                throw std::invalid_argument (std::string ("invalid agent parameters: ") + what);
        };
        require (p.T_ax > 0.0, "T_ax must be positive");
        require (p.a_x_min < 0.0 && p.a_x_max > 0.0, "need a_x_min < 0 < a_x_max");
        require (p.v_max > 0.0, "v_max must be positive");
        require (p.a_y_max > 0.0, "a_y_max must be positive");
        require (p.a_tot_max >= p.a_y_max, "a_tot_max must be >= a_y_max");
        require (p.length > 0.0 && p.width > 0.0, "vehicle dimensions must be positive");
        require (p.q > 0.0 && p.q_N > 0.0 && p.r > 0.0, "cost weights must be positive");
        require (p.v_ref >= 0.0 && p.v_ref <= p.v_max, "v_ref must lie in [0, v_max]");
    }

    DiscreteModel discretize (double T_ax, double T_s)
    {
        if (!(T_ax > 0.0))
            throw std::invalid_argument ("T_ax must be positive");
        if (!(T_s >= 0.0))
            throw std::invalid_argument ("T_s must be non-negative");

        const double tau = T_ax;
        const double h = T_s;
        const double x = h / tau;
        const double decay = std::exp (-x);
        const double one_minus = -std::expm1 (-x); // 1 - e^{-h/tau}
        const double lag_int = tau * (x + std::expm1 (-x)); // h - tau (1 - e)

        DiscreteModel m;
        m.T_s = h;
        m.A_d << decay, 0.0, 0.0,
                 tau * one_minus, 1.0, 0.0,
                 tau * lag_int, h, 1.0;
        m.B_d << one_minus, lag_int, 0.5 * h * h - tau * lag_int;
        return m;
    }

    AgentState step (const DiscreteModel &model, const AgentState &x, double u)
    {
        return AgentState::from (model.A_d * x.vec () + model.B_d * u);
    }

    std::vector<AgentState> rollout (const DiscreteModel &model, const AgentState &x0, std::span<const double> u)
    {
        std::vector<AgentState> out;
        out.reserve (u.size () + 1);
        out.push_back (x0);
        for (double uj : u)
            out.push_back (step (model, out.back (), uj));
        return out;
    }

} // namespace intersim
