#include "intersim/mpc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace intersim
{
    namespace
    {
        constexpr double kCaCutoff = 4.0; // m

        double pos (double x) { return x > 0.0 ? x : 0.0; }

        struct PathPoint
        {
            PathSample pose;
            double kappa = 0.0;    // blended
            double dkappa = 0.0;   // d(blended kappa)/ds
            bool on_path = true;   // false once s left [0, L]: pose frozen
        };

        PathPoint path_point (const OcpContext &ctx, double s)
        {
            PathPoint p;
            p.pose = sample_path (*ctx.path, s);
            p.on_path = !p.pose.clamped;
            const CurvatureSample k = blended_curvature (*ctx.path, s, ctx.curvature_blend);
            p.kappa = k.kappa;
            p.dkappa = p.on_path ? k.dkappa_ds : 0.0;
            return p;
        }

        struct NeighborAt
        {
            double x, y, psi, v;
        };

        // Own step j is paired with the neighbour's (k-1)-forecast entry j + 1.
        NeighborAt neighbor_at (const NeighborForecast &nb, int j)
        {
            const auto idx = std::min<std::size_t> (static_cast<std::size_t> (j) + 1, nb.x_g.size () - 1);
            return {nb.x_g[idx], nb.y_g[idx], nb.psi[idx], nb.v[idx]};
        }

        // Plain-double bound on the smallest body-axis overlap that the CA
        // surrogate sees. Below about -4 m the softplus product is < 1e-16.
        double ca_separation (double x, double y, double psi, double v, double self_hl, double self_hw,
                              const SafetyMargins &m, const NeighborAt &o, double o_hl, double o_hw)
        {
            const double c = std::cos (psi);
            const double s = std::sin (psi);
            const double dx = o.x - x;
            const double dy = o.y - y;
            const double p1 = dx * c + dy * s;
            const double p2 = dy * c - dx * s;
            const double rel = o.psi - psi;
            const double acr = std::abs (std::cos (rel)) + smooth::kAbsEps;
            const double asr = std::abs (std::sin (rel)) + smooth::kAbsEps;
            const double r1 = o_hl * acr + o_hw * asr;
            const double r2 = o_hl * asr + o_hw * acr;
            const double closing = v - o.v * std::cos (rel);
            const double ext = m.headway * (std::max (0.0, closing) + 0.5 * smooth::kHingeEps);
            const double base = self_hl + m.longitudinal;
            const double hw = self_hw + m.lateral;
            const double o1 = std::min (base + ext - (p1 - r1), p1 + r1 + base);
            const double o2 = std::min (hw - (p2 - r2), p2 + r2 + hw);
            return std::min (o1, o2) + smooth::kMinEps;
        }

        /**
         * Residual sweep over states 1..N. Returns sum of squared residuals.
         * When grad_x is given, adds weight * d(sum r^2)/dx_j into it.
         * When residuals is given, appends residuals in the documented order.
         */
        double residual_pass (const std::vector<AgentState> &xs, const OcpParameter &z, const OcpContext &ctx,
                              double weight, std::vector<Eigen::Vector3d> *grad_x, std::vector<double> *residuals)
        {
            const AgentParams &p = ctx.params;
            const int N = static_cast<int> (xs.size ()) - 1;
            double sum_sq = 0.0;
            const auto add = [&] (double r, int j, double d_ax, double d_v, double d_s) {
                sum_sq += r * r;
                if (grad_x && r != 0.0)
                    (*grad_x)[j] += 2.0 * weight * r * Eigen::Vector3d (d_ax, d_v, d_s);
            };

            std::vector<PathPoint> pts (static_cast<std::size_t> (N) + 1);
            for (int j = 1; j <= N; ++j)
                pts[j] = path_point (ctx, xs[j].s);

            for (int j = 1; j <= N; ++j)
            {
                const AgentState &x = xs[j];
                const PathPoint &pt = pts[j];
                const double ay = pt.kappa * x.v * x.v;
                const double day_dv = 2.0 * pt.kappa * x.v;
                const double day_ds = pt.dkappa * x.v * x.v;

                const double r_lo = pos (-x.v);
                add (r_lo, j, 0.0, -1.0, 0.0);
                const double r_hi = pos (x.v - p.v_max);
                add (r_hi, j, 0.0, 1.0, 0.0);
                const double r_ay = pos (std::abs (ay) - p.a_y_max);
                const double sgn = ay >= 0.0 ? 1.0 : -1.0;
                add (r_ay, j, 0.0, sgn * day_dv, sgn * day_ds);
                const double r_tot = pos (x.a_x * x.a_x + ay * ay - p.a_tot_max * p.a_tot_max);
                add (r_tot, j, 2.0 * x.a_x, 2.0 * ay * day_dv, 2.0 * ay * day_ds);
                if (residuals)
                    residuals->insert (residuals->end (), {r_lo, r_hi, r_ay, r_tot});
            }

            using D = Dual<4>;
            for (const NeighborForecast &nb : z.neighbors)
            {
                for (int j = 1; j <= N; ++j)
                {
                    const AgentState &x = xs[j];
                    const PathPoint &pt = pts[j];
                    const NeighborAt o = neighbor_at (nb, j);
                    if (ca_separation (pt.pose.x_g, pt.pose.y_g, pt.pose.psi, x.v, 0.5 * p.length, 0.5 * p.width,
                                       ctx.margins, o, 0.5 * nb.length, 0.5 * nb.width) < -kCaCutoff)
                    {
                        if (residuals)
                            residuals->push_back (0.0);
                        continue;
                    }
                    const D val = smooth::ca_surrogate<D> (
                        D::variable (pt.pose.x_g, 0), D::variable (pt.pose.y_g, 1), D::variable (pt.pose.psi, 2),
                        D::variable (x.v, 3), 0.5 * p.length, 0.5 * p.width, ctx.margins, o.x, o.y, o.psi, o.v,
                        0.5 * nb.length, 0.5 * nb.width, ctx.sharpness);
                    double d_s = 0.0;
                    if (pt.on_path)
                        d_s = val.d[0] * std::cos (pt.pose.psi) + val.d[1] * std::sin (pt.pose.psi) +
                              val.d[2] * pt.pose.kappa;
                    add (val.val, j, 0.0, val.d[3], d_s);
                    if (residuals)
                        residuals->push_back (val.val);
                }
            }

            const double s_N = xs[N].s;
            const double ahead = pos (ctx.regions.s_cr_out - s_N);
            const double behind = pos (s_N - ctx.regions.s_stop);
            const double r_pre = ahead * behind;
            double d_pre = 0.0;
            if (r_pre > 0.0)
                d_pre = -behind + ahead;
            add (r_pre, N, 0.0, 0.0, d_pre);
            if (residuals)
                residuals->push_back (r_pre);
            return sum_sq;
        }

        double tracking_cost (const std::vector<AgentState> &xs, std::span<const double> u, const AgentParams &p)
        {
            double cost = 0.0;
            for (std::size_t j = 0; j < u.size (); ++j)
                cost += stage_cost (xs[j], u[j], p.v_ref, p.q, p.r);
            return cost + terminal_cost (xs.back (), p.v_ref, p.q_N);
        }

        double evaluate (std::span<const double> u, const OcpParameter &z, double weight, const OcpContext &ctx,
                         std::span<double> grad)
        {
            const AgentParams &p = ctx.params;
            const std::vector<AgentState> xs = rollout (ctx.model, z.own_state, u);
            const int N = static_cast<int> (u.size ());
            double value = tracking_cost (xs, u, p);

            if (grad.empty ())
                return value + weight * residual_pass (xs, z, ctx, weight, nullptr, nullptr);

            std::vector<Eigen::Vector3d> gx (static_cast<std::size_t> (N) + 1, Eigen::Vector3d::Zero ());
            for (int j = 1; j < N; ++j)
                gx[j][1] += 2.0 * p.q * (xs[j].v - p.v_ref);
            gx[N][1] += 2.0 * p.q_N * (xs[N].v - p.v_ref);
            value += weight * residual_pass (xs, z, ctx, weight, &gx, nullptr);

            Eigen::Vector3d lambda = gx[N];
            for (int j = N - 1; j >= 0; --j)
            {
                grad[j] = 2.0 * p.r * u[j] + ctx.model.B_d.dot (lambda);
                lambda = gx[j] + ctx.model.A_d.transpose () * lambda;
            }
            return value;
        }

        // Limited-memory inverse Hessian estimate of the fixed-point residual map.
        class Lbfgs
        {
          public:
            explicit Lbfgs (int memory) : memory_ (static_cast<std::size_t> (std::max (memory, 0))) {}

            void reset () { pairs_.clear (); }

            void push (std::vector<double> s, std::vector<double> y)
            {
                if (memory_ == 0)
                    return;
                const double sy = dot (s, y);
                const double ss = dot (s, s);
                const double yy = dot (y, y);
                if (!(sy > 1e-12 * std::sqrt (ss * yy)) || !std::isfinite (sy))
                    return;
                pairs_.push_front ({std::move (s), std::move (y), 1.0 / sy});
                if (pairs_.size () > memory_)
                    pairs_.pop_back ();
            }

            // d = -H r
            std::vector<double> direction (const std::vector<double> &r) const
            {
                std::vector<double> q = r;
                std::vector<double> alpha (pairs_.size ());
                for (std::size_t i = 0; i < pairs_.size (); ++i)
                {
                    alpha[i] = pairs_[i].rho * dot (pairs_[i].s, q);
                    axpy (-alpha[i], pairs_[i].y, q);
                }
                if (!pairs_.empty ())
                {
                    const auto &newest = pairs_.front ();
                    const double h0 = 1.0 / (newest.rho * dot (newest.y, newest.y));
                    for (double &v : q)
                        v *= h0;
                }
                for (std::size_t i = pairs_.size (); i-- > 0;)
                {
                    const double beta = pairs_[i].rho * dot (pairs_[i].y, q);
                    axpy (alpha[i] - beta, pairs_[i].s, q);
                }
                for (double &v : q)
                    v = -v;
                return q;
            }

            static double dot (const std::vector<double> &a, const std::vector<double> &b)
            {
                return std::inner_product (a.begin (), a.end (), b.begin (), 0.0);
            }

          private:
            static void axpy (double a, const std::vector<double> &x, std::vector<double> &y)
            {
                for (std::size_t i = 0; i < y.size (); ++i)
                    y[i] += a * x[i];
            }

            struct Pair
            {
                std::vector<double> s, y;
                double rho;
            };
            std::size_t memory_;
            std::deque<Pair> pairs_;
        };

        double inf_norm (const std::vector<double> &v)
        {
            double m = 0.0;
            for (double x : v)
                m = std::max (m, std::abs (x));
            return m;
        }
    } // namespace

    void OcpParameter::validate (std::size_t horizon) const
    {
        if (!own_state.finite ())
            throw std::invalid_argument ("own state is not finite");
        for (const NeighborForecast &nb : neighbors)
        {
            for (const auto *seq : {&nb.x_g, &nb.y_g, &nb.psi, &nb.v})
            {
                if (seq->size () != horizon + 1)
                    throw std::invalid_argument ("forecast of agent " + std::to_string (nb.id) +
                                                 " must have N + 1 entries");
                if (!std::all_of (seq->begin (), seq->end (), [] (double x) { return std::isfinite (x); }))
                    throw std::invalid_argument ("forecast of agent " + std::to_string (nb.id) + " is not finite");
            }
        }
    }

    void PenaltyConfig::validate () const
    {
        if (!(multiplier > 1.0))
            throw std::invalid_argument ("penalty multiplier must exceed 1");
        if (!(constraint_tolerance > 0.0) || !(inner_tolerance > 0.0))
            throw std::invalid_argument ("tolerances must be positive");
        if (!(initial_weight > 0.0))
            throw std::invalid_argument ("initial penalty weight must be positive");
        if (max_outer_iterations < 1 || max_inner_iterations < 1 || lbfgs_memory < 0)
            throw std::invalid_argument ("iteration limits must be positive");
    }

    NeighborForecast PredictedTrajectory::as_forecast (AgentId id, double length, double width) const
    {
        NeighborForecast f;
        f.id = id;
        f.x_g = x_g;
        f.y_g = y_g;
        f.psi = psi;
        f.v.reserve (states.size ());
        for (const AgentState &x : states)
            f.v.push_back (x.v);
        f.length = length;
        f.width = width;
        return f;
    }

    double stage_cost (const AgentState &x, double u, double v_ref, double q, double r)
    {
        const double dv = x.v - v_ref;
        return q * dv * dv + r * u * u;
    }

    double terminal_cost (const AgentState &x_N, double v_ref, double q_N)
    {
        const double dv = x_N.v - v_ref;
        return q_N * dv * dv;
    }

    double preview_residual (double s_N, double s_cr_out, double s_stop)
    {
        return pos (-s_N + s_cr_out) * pos (s_N - s_stop);
    }

    PredictedTrajectory predict (std::span<const double> u, const AgentState &x0, const OcpContext &ctx)
    {
        PredictedTrajectory t;
        t.states = rollout (ctx.model, x0, u);
        for (std::size_t j = 0; j < t.states.size (); ++j)
        {
            const PathSample pose = sample_path (*ctx.path, t.states[j].s);
            t.x_g.push_back (pose.x_g);
            t.y_g.push_back (pose.y_g);
            t.psi.push_back (pose.psi);
            if (j == 0)
                continue;
            const double kappa = blended_curvature (*ctx.path, t.states[j].s, ctx.curvature_blend).kappa;
            const double ay = kappa * t.states[j].v * t.states[j].v;
            t.lateral_accel.push_back (ay);
            t.total_accel.push_back (std::hypot (t.states[j].a_x, ay));
        }
        return t;
    }

    std::vector<double> constraint_residuals (const PredictedTrajectory &traj, const OcpParameter &z,
                                              const OcpContext &ctx)
    {
        std::vector<double> out;
        residual_pass (traj.states, z, ctx, 0.0, nullptr, &out);
        return out;
    }

    PenaltyValue penalty_objective (std::span<const double> u, const OcpParameter &z, double weight,
                                    const OcpContext &ctx)
    {
        PenaltyValue pv;
        pv.gradient.assign (u.size (), 0.0);
        pv.value = evaluate (u, z, weight, ctx, pv.gradient);
        return pv;
    }

    BoxSolveResult box_solve (const SmoothObjective &phi, std::span<const double> lower, std::span<const double> upper,
                              std::span<const double> u0, const PenaltyConfig &cfg)
    {
        const std::size_t n = u0.size ();
        if (lower.size () != n || upper.size () != n)
            throw std::invalid_argument ("box and start point differ in dimension");

        constexpr double kGammaL = 0.95;
        constexpr int kMaxBacktracks = 10;

        const auto project = [&] (std::vector<double> &x) {
            for (std::size_t i = 0; i < n; ++i)
                x[i] = std::clamp (x[i], lower[i], upper[i]);
        };

        std::vector<double> u (u0.begin (), u0.end ());
        project (u);
        std::vector<double> g (n);
        double f = phi (u, g);

        // Lipschitz estimate from a small finite-difference probe
        double L = 1e-6;
        {
            std::vector<double> up (n), gp (n);
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < n; ++i)
            {
                const double h = std::max (1e-6, 1e-6 * std::abs (u[i]));
                up[i] = u[i] + h;
                den += h * h;
            }
            phi (up, gp);
            for (std::size_t i = 0; i < n; ++i)
                num += (gp[i] - g[i]) * (gp[i] - g[i]);
            if (den > 0.0 && std::isfinite (num))
                L = std::max (L, std::sqrt (num / den));
        }
        double gamma = kGammaL / L;
        double sigma = (1.0 - kGammaL) / (4.0 * gamma);

        std::vector<double> xbar (n), r (n), gbar (n);
        const auto forward_backward = [&] (const std::vector<double> &x, const std::vector<double> &gx,
                                           std::vector<double> &xb, std::vector<double> &res) {
            for (std::size_t i = 0; i < n; ++i)
            {
                xb[i] = std::clamp (x[i] - gamma * gx[i], lower[i], upper[i]);
                res[i] = x[i] - xb[i];
            }
        };

        Lbfgs lbfgs (cfg.lbfgs_memory);
        BoxSolveResult out;
        double fbar = f;
        std::vector<double> u_new (n), g_new (n), xbar_new (n), r_new (n);

        for (int it = 0;; ++it)
        {
            // grow L until the descent lemma holds at the forward-backward point
            for (;;)
            {
                forward_backward (u, g, xbar, r);
                fbar = phi (xbar, gbar);
                const double model = f - Lbfgs::dot (g, r) + 0.5 * L * Lbfgs::dot (r, r);
                if (fbar <= model + 1e-12 * std::abs (f) || !(L < 1e15))
                    break;
                L *= 2.0;
                gamma = kGammaL / L;
                sigma = (1.0 - kGammaL) / (4.0 * gamma);
                lbfgs.reset ();
            }

            out.stationarity = inf_norm (r) / gamma;
            out.iterations = it;
            if (out.stationarity <= cfg.inner_tolerance)
            {
                out.converged = true;
                break;
            }
            if (it >= cfg.max_inner_iterations)
                break;

            const double rr = Lbfgs::dot (r, r);
            const double fbe = f - Lbfgs::dot (g, r) + rr / (2.0 * gamma);
            std::vector<double> d = lbfgs.direction (r);
            if (!std::all_of (d.begin (), d.end (), [] (double x) { return std::isfinite (x); }))
                d.assign (n, 0.0), std::transform (r.begin (), r.end (), d.begin (), [] (double x) { return -x; });

            double tau = 1.0;
            double f_new = 0.0;
            for (int ls = 0;; ++ls)
            {
                if (ls == kMaxBacktracks)
                {
                    // plain forward-backward step, always a sufficient decrease
                    u_new = xbar;
                    g_new = gbar;
                    f_new = fbar;
                }
                else
                {
                    for (std::size_t i = 0; i < n; ++i)
                        u_new[i] = u[i] - (1.0 - tau) * r[i] + tau * d[i];
                    f_new = phi (u_new, g_new);
                }
                forward_backward (u_new, g_new, xbar_new, r_new);
                const double fbe_new =
                    f_new - Lbfgs::dot (g_new, r_new) + Lbfgs::dot (r_new, r_new) / (2.0 * gamma);
                if (ls == kMaxBacktracks || (std::isfinite (fbe_new) && fbe_new <= fbe - sigma * rr))
                    break;
                tau *= 0.5;
            }

            std::vector<double> s (n), y (n);
            for (std::size_t i = 0; i < n; ++i)
            {
                s[i] = u_new[i] - u[i];
                y[i] = r_new[i] - r[i];
            }
            lbfgs.push (std::move (s), std::move (y));
            u.swap (u_new);
            g.swap (g_new);
            f = f_new;
        }

        out.u = xbar;
        out.value = fbar;
        return out;
    }

    namespace
    {
        struct PenaltyRun
        {
            std::vector<double> u;
            SolverReport report;
        };

        PenaltyRun penalty_loop (const OcpParameter &z, const OcpContext &ctx, const PenaltyConfig &cfg,
                                 std::vector<double> u, std::span<const double> lower, std::span<const double> upper,
                                 bool give_up_at_limit)
        {
            PenaltyRun run;
            double weight = cfg.initial_weight;
            for (int outer = 1; outer <= cfg.max_outer_iterations; ++outer)
            {
                const SmoothObjective phi = [&] (std::span<const double> x, std::span<double> grad) {
                    return evaluate (x, z, weight, ctx, grad);
                };
                const BoxSolveResult inner = box_solve (phi, lower, upper, u, cfg);
                u = inner.u;
                run.report.outer_iterations = outer;
                run.report.inner_iterations += inner.iterations;
                run.report.inner_limit_hit = run.report.inner_limit_hit || !inner.converged;
                if (give_up_at_limit && !inner.converged)
                {
                    run.report.violation_history.push_back (std::numeric_limits<double>::infinity ());
                    run.report.max_violation = std::numeric_limits<double>::infinity ();
                    break;
                }

                const std::vector<AgentState> xs = rollout (ctx.model, z.own_state, u);
                std::vector<double> res;
                residual_pass (xs, z, ctx, 0.0, nullptr, &res);
                const double viol = res.empty () ? 0.0 : *std::max_element (res.begin (), res.end ());
                run.report.violation_history.push_back (viol);
                run.report.max_violation = viol;
                run.report.final_weight = weight;
                if (viol <= cfg.constraint_tolerance)
                {
                    run.report.converged = true;
                    break;
                }
                weight *= cfg.multiplier;
            }
            run.report.objective = tracking_cost (rollout (ctx.model, z.own_state, u), u, ctx.params);
            run.u = std::move (u);
            return run;
        }

        bool better (const SolverReport &a, const SolverReport &b)
        {
            if (a.converged != b.converged)
                return a.converged;
            if (a.converged)
                return a.objective < b.objective;
            return a.max_violation < b.max_violation;
        }
    } // namespace

    OcpSolution solve_ocp (const OcpParameter &z, const OcpContext &ctx, const PenaltyConfig &cfg,
                           std::span<const double> warm)
    {
        const auto t0 = std::chrono::steady_clock::now ();
        if (ctx.path == nullptr || ctx.horizon < 1)
            throw std::invalid_argument ("OCP context needs a path and a positive horizon");
        const auto N = static_cast<std::size_t> (ctx.horizon);
        z.validate (N);
        cfg.validate ();

        const std::vector<double> lower (N, ctx.params.a_x_min);
        const std::vector<double> upper (N, ctx.params.a_x_max);
        std::vector<double> u (N, 0.0);
        if (warm.size () == N)
            std::copy (warm.begin (), warm.end (), u.begin ());
        for (std::size_t i = 0; i < N; ++i)
            u[i] = std::clamp (std::isfinite (u[i]) ? u[i] : 0.0, lower[i], upper[i]);

        PenaltyRun best = penalty_loop (z, ctx, cfg, u, lower, upper, false);

        // A converged plan that halts before the stop line may be the local
        // minimum on the near side of the preview constraint; an unconverged
        // plan may be stuck anywhere. Only then are the other starts tried.
        const double s_N = rollout (ctx.model, z.own_state, best.u).back ().s;
        const bool halting = s_N <= ctx.regions.s_stop + 1.0 && z.own_state.s <= ctx.regions.s_stop;
        if (cfg.restart_candidates && (!best.report.converged || halting))
        {
            const std::vector<std::vector<double>> starts{std::vector<double> (N, 0.0),
                                                          std::vector<double> (N, ctx.params.a_x_max),
                                                          std::vector<double> (N, ctx.params.a_x_min)};
            const std::size_t tried = best.report.converged ? 2 : 3;
            for (std::size_t c = 0; c < tried; ++c)
            {
                PenaltyRun run = penalty_loop (z, ctx, cfg, starts[c], lower, upper, true);
                run.report.candidate = static_cast<int> (c) + 1;
                if (better (run.report, best.report))
                    best = std::move (run);
            }
        }

        // The shifted previous plan itself, unchanged, as a fallback.
        if (warm.size () == N)
        {
            PenaltyRun kept;
            kept.u = u;
            const std::vector<AgentState> xs = rollout (ctx.model, z.own_state, kept.u);
            std::vector<double> res;
            residual_pass (xs, z, ctx, 0.0, nullptr, &res);
            kept.report.max_violation = res.empty () ? 0.0 : *std::max_element (res.begin (), res.end ());
            kept.report.converged = kept.report.max_violation <= cfg.constraint_tolerance;
            kept.report.objective = tracking_cost (xs, kept.u, ctx.params);
            kept.report.candidate = 4;
            kept.report.outer_iterations = best.report.outer_iterations;
            kept.report.inner_iterations = best.report.inner_iterations;
            kept.report.violation_history = best.report.violation_history;
            if (better (kept.report, best.report))
                best = std::move (kept);
        }

        OcpSolution sol;
        sol.u = std::move (best.u);
        sol.report = std::move (best.report);
        sol.trajectory = predict (sol.u, z.own_state, ctx);
        sol.report.wall_ms =
            std::chrono::duration<double, std::milli> (std::chrono::steady_clock::now () - t0).count ();
        return sol;
    }

    std::vector<double> shift_warm_start (std::span<const double> u)
    {
        if (u.empty ())
            return {};
        std::vector<double> out (u.begin () + 1, u.end ());
        out.push_back (u.back ());
        return out;
    }

    PredictedTrajectory initial_broadcast (const AgentState &x0, const PathSpec &path, int horizon, double T_s)
    {
        PredictedTrajectory t;
        for (int j = 0; j <= horizon; ++j)
        {
            const AgentState x{0.0, x0.v, x0.s + x0.v * T_s * j};
            t.states.push_back (x);
            const PathSample pose = sample_path (path, x.s);
            t.x_g.push_back (pose.x_g);
            t.y_g.push_back (pose.y_g);
            t.psi.push_back (pose.psi);
            if (j > 0)
            {
                const double ay = pose.kappa * x.v * x.v;
                t.lateral_accel.push_back (ay);
                t.total_accel.push_back (std::abs (ay));
            }
        }
        return t;
    }

} // namespace intersim
