#pragma once
// Independent reference computations shared by the unit tests and the
// acceptance runner.

#include "intersim/mpc.hpp"
#include "intersim/network.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <vector>

namespace oracle
{
    struct Zoh
    {
        Eigen::Matrix3d A_d;
        Eigen::Vector3d B_d;
    };

    // exp(M T) and its input integral from the truncated power series of the
    // augmented 4x4 matrix [[A, B], [0, 0]].
    inline Zoh zoh_series (double T_ax, double T_s, int terms = 30)
    {
        Eigen::Matrix4d M = Eigen::Matrix4d::Zero ();
        M (0, 0) = -1.0 / T_ax;
        M (0, 3) = 1.0 / T_ax;
        M (1, 0) = 1.0;
        M (2, 1) = 1.0;
        const Eigen::Matrix4d X = M * T_s;
        Eigen::Matrix4d term = Eigen::Matrix4d::Identity ();
        Eigen::Matrix4d sum = term;
        for (int k = 1; k < terms; ++k)
        {
            term = term * X / double (k);
            sum += term;
        }
        return {sum.topLeftCorner<3, 3> (), sum.topRightCorner<3, 1> ()};
    }

    // All-pairs shortest paths (Floyd-Warshall); returns -1 if some pair is unreachable.
    inline int diameter (const intersim::Topology &t)
    {
        std::vector<intersim::AgentId> ids (t.nodes ().begin (), t.nodes ().end ());
        const std::size_t n = ids.size ();
        std::map<intersim::AgentId, std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i)
            idx[ids[i]] = i;
        constexpr int inf = std::numeric_limits<int>::max () / 4;
        std::vector<std::vector<int>> d (n, std::vector<int> (n, inf));
        for (std::size_t i = 0; i < n; ++i)
            d[i][i] = 0;
        for (auto [a, b] : t.arcs ())
            d[idx[a]][idx[b]] = 1;
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    d[i][j] = std::min (d[i][j], d[i][k] + d[k][j]);
        int ell = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
            {
                if (d[i][j] >= inf)
                    return -1;
                ell = std::max (ell, d[i][j]);
            }
        return ell;
    }

    // Random ring through a shuffled node order plus extra arcs, so always strongly connected.
    inline intersim::Topology random_strong_digraph (int n, std::mt19937_64 &rng)
    {
        std::set<intersim::AgentId> nodes;
        std::vector<intersim::AgentId> perm;
        for (int i = 1; i <= n; ++i)
        {
            nodes.insert (i);
            perm.push_back (i);
        }
        std::shuffle (perm.begin (), perm.end (), rng);
        std::set<std::pair<intersim::AgentId, intersim::AgentId>> arcs;
        for (int i = 0; i < n; ++i)
            if (n > 1)
                arcs.emplace (perm[i], perm[(i + 1) % n]);
        std::uniform_real_distribution<double> density (0.0, 0.6);
        std::bernoulli_distribution extra (density (rng));
        for (int a = 1; a <= n; ++a)
            for (int b = 1; b <= n; ++b)
                if (a != b && extra (rng))
                    arcs.emplace (a, b);
        return {nodes, arcs};
    }

    inline std::map<intersim::AgentId, double> random_distinct_bids (const std::set<intersim::AgentId> &ids,
                                                                     std::mt19937_64 &rng)
    {
        std::uniform_real_distribution<double> bid (0.5, 20.0);
        std::map<intersim::AgentId, double> out;
        std::set<double> used;
        for (auto id : ids)
        {
            double b = bid (rng);
            while (used.count (b))
                b = bid (rng);
            used.insert (b);
            out[id] = b;
        }
        return out;
    }

    inline std::vector<intersim::AgentId> sort_oracle (const std::map<intersim::AgentId, double> &bids)
    {
        std::vector<std::pair<double, intersim::AgentId>> v;
        for (auto [id, b] : bids)
            v.emplace_back (b, id);
        std::sort (v.begin (), v.end (), [] (auto &a, auto &b) { return a.first > b.first; });
        std::vector<intersim::AgentId> order;
        for (auto &p : v)
            order.push_back (p.second);
        return order;
    }

    // A penalty-objective instance on the left-turn route with the preview
    // term and collision-avoidance terms switched on.
    struct GradientInstance
    {
        intersim::PathSpec path;
        intersim::OcpContext ctx;
        intersim::OcpParameter z;
        std::vector<double> u;
        double weight = 0.0;
    };

    inline GradientInstance random_gradient_instance (std::mt19937_64 &rng)
    {
        using namespace intersim;
        GradientInstance g;
        g.path = build_path (RouteSpec{Arm::West, Arm::North});
        g.ctx.model = discretize (0.3, 0.1);
        g.ctx.path = &g.path;
        g.ctx.regions = compute_regions (g.path, IntersectionGeometry{}, g.ctx.params.v_max, g.ctx.params.a_x_min);
        g.ctx.horizon = 50;

        std::uniform_real_distribution<double> uni (0.0, 1.0);
        const auto &R = g.ctx.regions;
        // horizon end lands strictly between the stop line and the CR exit
        const double v0 = 1.0 + 3.0 * uni (rng);
        const double s_end = R.s_stop + 1.0 + (R.s_cr_out - R.s_stop - 2.0) * uni (rng);
        g.z.own_state = {0.5 * (uni (rng) - 0.5), v0, s_end - v0 * 5.0};
        g.u.resize (50);
        for (auto &x : g.u)
            x = 0.4 * (uni (rng) - 0.5);
        g.weight = 10.0 * std::pow (10.0, 2.0 * uni (rng));

        // neighbours sit a few metres beside or ahead of the own prediction
        const PredictedTrajectory own = predict (g.u, g.z.own_state, g.ctx);
        const int n_nb = 1 + int (uni (rng) * 2.0);
        for (int l = 0; l < n_nb; ++l)
        {
            NeighborForecast nb;
            nb.id = 10 + l;
            const double dx = 6.0 * (uni (rng) - 0.5);
            const double dy = 6.0 * (uni (rng) - 0.5);
            const double heading = 2.0 * M_PI * uni (rng);
            for (int j = 0; j <= 50; ++j)
            {
                nb.x_g.push_back (own.x_g[j] + dx);
                nb.y_g.push_back (own.y_g[j] + dy);
                nb.psi.push_back (heading);
                nb.v.push_back (5.0 * uni (rng));
            }
            g.z.neighbors.push_back (nb);
        }
        return g;
    }

    // Largest componentwise |analytic - central difference|, relative to the
    // largest gradient magnitude (floored at 1).
    inline double gradient_mismatch (const GradientInstance &g, double h = 1e-6)
    {
        const auto pv = intersim::penalty_objective (g.u, g.z, g.weight, g.ctx);
        std::vector<double> u = g.u;
        double scale = 1.0, worst = 0.0;
        std::vector<double> fd (u.size ());
        for (std::size_t i = 0; i < u.size (); ++i)
        {
            const double keep = u[i];
            u[i] = keep + h;
            const double fp = intersim::penalty_objective (u, g.z, g.weight, g.ctx).value;
            u[i] = keep - h;
            const double fm = intersim::penalty_objective (u, g.z, g.weight, g.ctx).value;
            u[i] = keep;
            fd[i] = (fp - fm) / (2.0 * h);
            scale = std::max (scale, std::abs (fd[i]));
        }
        for (std::size_t i = 0; i < u.size (); ++i)
            worst = std::max (worst, std::abs (pv.gradient[i] - fd[i]));
        return worst / scale;
    }

    // Number of CA residuals that are not negligible, and the preview residual.
    inline std::pair<int, double> active_terms (const GradientInstance &g)
    {
        const auto traj = intersim::predict (g.u, g.z.own_state, g.ctx);
        const auto res = intersim::constraint_residuals (traj, g.z, g.ctx);
        const std::size_t n_box = 4 * std::size_t (g.ctx.horizon);
        int ca = 0;
        for (std::size_t i = n_box; i + 1 < res.size (); ++i)
            if (res[i] > 1e-3)
                ++ca;
        return {ca, res.back ()};
    }

} // namespace oracle
