#include "intersim/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace intersim
{
    namespace
    {
        constexpr double kOpenLoopGain = 0.5; // 1/s, speed hold once past the ICR

        struct AgentRuntime
        {
            AgentConfig cfg;
            PathSpec path;
            RegionBounds regions;
            OcpContext ctx;
            AgentState state;
            std::vector<double> warm;
        };

        // Runs f(0..n-1) on up to `workers` threads. Exceptions are rethrown in
        // index order after the join so failures do not depend on scheduling.
        template <class F> void parallel_for (int n, int workers, F &&f)
        {
            std::vector<std::exception_ptr> errors (static_cast<std::size_t> (std::max (n, 0)));
            const auto guarded = [&] (int i) {
                try
                {
                    f (i);
                }
                catch (...)
                {
                    errors[static_cast<std::size_t> (i)] = std::current_exception ();
                }
            };
            if (workers <= 1 || n <= 1)
            {
                for (int i = 0; i < n; ++i)
                    guarded (i);
            }
            else
            {
                std::atomic<int> next{0};
                std::vector<std::jthread> pool;
                for (int w = 0; w < std::min (workers, n); ++w)
                    pool.emplace_back ([&] {
                        for (int i = next++; i < n; i = next++)
                            guarded (i);
                    });
            }
            for (const auto &e : errors)
                if (e)
                    std::rethrow_exception (e);
        }

        PredictedTrajectory poisoned (int horizon)
        {
            const double nan = std::numeric_limits<double>::quiet_NaN ();
            PredictedTrajectory t;
            const auto n = static_cast<std::size_t> (horizon) + 1;
            t.states.assign (n, AgentState{nan, nan, nan});
            t.x_g.assign (n, nan);
            t.y_g.assign (n, nan);
            t.psi.assign (n, nan);
            t.lateral_accel.assign (n - 1, nan);
            t.total_accel.assign (n - 1, nan);
            return t;
        }

        std::string num (double x)
        {
            if (std::isinf (x))
                return x > 0 ? "inf" : "-inf";
            char buf[64];
            std::snprintf (buf, sizeof buf, "%.6f", x == 0.0 ? 0.0 : x); // no "-0.000000"
            std::string s (buf);
            if (s == "-0.000000")
                s = "0.000000";
            return s;
        }

        std::string dump_state (int step, const std::vector<AgentRuntime> &agents)
        {
            std::ostringstream os;
            os << "non-finite state at step " << step << ":";
            for (const AgentRuntime &a : agents)
                os << " [agent " << a.cfg.id << " a_x=" << a.state.a_x << " v=" << a.state.v << " s=" << a.state.s
                   << "]";
            return os.str ();
        }

        void write_file (const std::filesystem::path &file, const std::string &content)
        {
            std::ofstream out (file, std::ios::binary | std::ios::trunc);
            if (!out)
                throw std::runtime_error (file.string () + ": cannot open for writing");
            out << content;
            out.flush ();
            if (!out)
                throw std::runtime_error (file.string () + ": write failed");
        }
    } // namespace

    void apply_event (EmergencyFlags &flags, const ScenarioEvent &event)
    {
        const auto it = flags.find (event.agent);
        if (it == flags.end ())
            throw std::invalid_argument ("event for unknown agent " + std::to_string (event.agent));
        switch (event.kind)
        {
        case EventKind::EmergencyOn:
            it->second = true;
            break;
        }
    }

    int event_step (const ScenarioEvent &event, double T_s)
    {
        return static_cast<int> (std::ceil (event.time / T_s - 1e-9));
    }

    SimulationResult run_simulation (const ScenarioConfig &cfg, const RunOptions &opts)
    {
        cfg.validate ();
        const DiscreteModel base_model = discretize (cfg.agents.front ().params.T_ax, cfg.T_s);

        std::vector<AgentRuntime> agents;
        std::set<AgentId> ids;
        for (const AgentConfig &ac : cfg.agents)
        {
            AgentRuntime rt;
            rt.cfg = ac;
            rt.path = build_path (ac.route);
            rt.regions = compute_regions (rt.path, cfg.geometry, ac.params.v_max, ac.params.a_x_min);
            rt.ctx.model = ac.params.T_ax == cfg.agents.front ().params.T_ax ? base_model
                                                                            : discretize (ac.params.T_ax, cfg.T_s);
            rt.ctx.params = ac.params;
            rt.ctx.regions = rt.regions;
            rt.ctx.margins = cfg.margins;
            rt.ctx.sharpness = cfg.ca_sharpness;
            rt.ctx.curvature_blend = cfg.curvature_blend;
            rt.ctx.horizon = cfg.horizon;
            rt.state = {0.0, ac.initial_speed, project_onto_path (rt.path, ac.initial_position).s};
            agents.push_back (std::move (rt));
            ids.insert (ac.id);
        }
        std::sort (agents.begin (), agents.end (),
                   [] (const AgentRuntime &a, const AgentRuntime &b) { return a.cfg.id < b.cfg.id; });
        // paths are owned by `agents`, which is not resized from here on
        for (AgentRuntime &a : agents)
            a.ctx.path = &a.path;

        std::map<AgentId, std::size_t> index;
        for (std::size_t k = 0; k < agents.size (); ++k)
            index[agents[k].cfg.id] = k;

        std::map<std::pair<AgentId, AgentId>, bool> conflict_table;
        for (const AgentRuntime &a : agents)
            for (const AgentRuntime &b : agents)
                if (a.cfg.id != b.cfg.id)
                    conflict_table[{a.cfg.id, b.cfg.id}] =
                        paths_conflict (a.path, a.cfg.params.width, b.path, b.cfg.params.width,
                                        cfg.geometry.cr_half_width);
        const auto conflict_fn = [&conflict_table] (AgentId a, AgentId b) {
            return conflict_table.at ({a, b});
        };

        const Topology full_topology = build_topology (cfg.topology, ids);

        EmergencyFlags flags;
        for (AgentId id : ids)
            flags[id] = false;
        std::vector<bool> event_done (cfg.events.size (), false);

        std::map<AgentId, PredictedTrajectory> published;
        for (const AgentRuntime &a : agents)
            published[a.cfg.id] = initial_broadcast (a.state, a.path, cfg.horizon, cfg.T_s);

        SimulationResult result;
        const int n = static_cast<int> (agents.size ());

        for (int k = 0; k < cfg.steps; ++k)
        {
            StepRecord rec;
            rec.step = k;
            rec.time = k * cfg.T_s;

            // (1) events
            for (std::size_t e = 0; e < cfg.events.size (); ++e)
            {
                if (!event_done[e] && k >= event_step (cfg.events[e], cfg.T_s))
                {
                    apply_event (flags, cfg.events[e]);
                    event_done[e] = true;
                }
            }

            rec.agents.resize (agents.size ());
            std::set<AgentId> active;
            for (std::size_t i = 0; i < agents.size (); ++i)
            {
                const AgentRuntime &a = agents[i];
                AgentStepRecord &r = rec.agents[i];
                r.id = a.cfg.id;
                r.state = a.state;
                const PathSample pose = sample_path (a.path, a.state.s);
                r.x_g = pose.x_g;
                r.y_g = pose.y_g;
                r.psi = pose.psi;
                r.a_y = pose.kappa * a.state.v * a.state.v;
                r.a_tot = std::hypot (a.state.a_x, r.a_y);
                r.region = region_of (a.regions, a.state.s);
                r.on_road = a.state.s < a.path.total_length ();
                r.emergency = flags.at (a.cfg.id);
                // (2) active set
                r.active = r.on_road && a.state.s <= a.regions.s_cr_out;
                if (r.active)
                    active.insert (a.cfg.id);
            }

            // (3) auction
            PriorityAssignment assignment;
            double cbaam_bound = 0.0;
            if (!active.empty ())
            {
                std::map<AgentId, double> bids;
                for (AgentId id : active)
                {
                    const AgentRuntime &a = agents[index.at (id)];
                    const double bid = compute_bid (a.state.s, a.state.v, a.regions.s_bsr_in, cfg.bids, flags.at (id));
                    bids[id] = bid;
                    rec.agents[index.at (id)].bid = bid;
                }
                const CbaamResult auction = run_cbaam (bids, full_topology.relay_restricted (active));
                assignment = auction.assignment;
                rec.auction_iterations = auction.agreement_iteration;
                rec.supersteps = auction.supersteps;
                rec.ell = auction.ell;
                cbaam_bound = cbaam_time_bound (static_cast<int> (active.size ()), auction.ell, cfg.latency);
                for (AgentId id : active)
                    rec.agents[index.at (id)].rank = assignment.rank (id);
            }

            // (4) conflict sets over the agents still on the road
            WorldSnapshot world;
            world.paths_conflict = conflict_fn;
            for (std::size_t i = 0; i < agents.size (); ++i)
                if (rec.agents[i].on_road)
                    world.agents[agents[i].cfg.id] =
                        AgentSnapshot{&agents[i].path, agents[i].regions, agents[i].state, agents[i].cfg.params};
            for (std::size_t i = 0; i < agents.size (); ++i)
                if (rec.agents[i].on_road)
                    rec.agents[i].conflicts = conflict_sets (agents[i].cfg.id, world, assignment).combined;

            // exact safety metrics at the measured states
            for (std::size_t i = 0; i < agents.size (); ++i)
            {
                AgentStepRecord &ri = rec.agents[i];
                if (!ri.on_road)
                    continue;
                const AgentParams &pi = agents[i].cfg.params;
                const PathSample si = sample_path (agents[i].path, ri.state.s);
                const OrientedBox bi = bounding_box (si, pi.length, pi.width);
                for (std::size_t l = 0; l < agents.size (); ++l)
                {
                    const AgentStepRecord &rl = rec.agents[l];
                    if (l == i || !rl.on_road)
                        continue;
                    const AgentParams &pl = agents[l].cfg.params;
                    const PathSample sl = sample_path (agents[l].path, rl.state.s);
                    const OrientedBox bl = bounding_box (sl, pl.length, pl.width);
                    ri.exact_overlap = std::max (ri.exact_overlap, area_overlap (bi, bl));
                    ri.min_pair_distance = std::min (ri.min_pair_distance, box_distance (bi, bl));
                    if (ri.conflicts.contains (rl.id))
                    {
                        const SafetyRegion sr =
                            safety_region (si, pi.length, pi.width, sl, rl.state.v, ri.state.v, cfg.margins);
                        ri.region_overlap = std::max (ri.region_overlap, area_overlap (sr, bl));
                    }
                }
            }

            // (5) solves against the previous broadcasts
            std::map<AgentId, PredictedTrajectory> pending;
            for (AgentId id : ids)
                pending[id] = opts.poison_pending_buffer ? poisoned (cfg.horizon) : PredictedTrajectory{};
            std::vector<double> applied (agents.size (), 0.0);

            parallel_for (n, opts.workers, [&] (int idx) {
                const auto i = static_cast<std::size_t> (idx);
                AgentRuntime &a = agents[i];
                AgentStepRecord &r = rec.agents[i];
                if (a.state.s < a.regions.s_icr_out)
                {
                    OcpParameter z;
                    z.own_state = a.state;
                    for (AgentId l : r.conflicts)
                    {
                        const AgentParams &pl = agents[index.at (l)].cfg.params;
                        z.neighbors.push_back (published.at (l).as_forecast (l, pl.length, pl.width));
                    }
                    if (opts.solve_observer)
                        opts.solve_observer (k, a.cfg.id, z, a.warm);
                    OcpSolution sol = solve_ocp (z, a.ctx, cfg.penalty, a.warm);
                    applied[i] = sol.u.front ();
                    r.solved = true;
                    r.solver = sol.report;
                    a.warm = shift_warm_start (sol.u);
                    pending.at (a.cfg.id) = std::move (sol.trajectory);
                }
                else
                {
                    const AgentParams &p = a.cfg.params;
                    applied[i] = std::clamp (kOpenLoopGain * (p.v_ref - a.state.v), p.a_x_min, p.a_x_max);
                    pending.at (a.cfg.id) = initial_broadcast (a.state, a.path, cfg.horizon, cfg.T_s);
                }
            });

            // (6) plant
            TimingRow timing;
            timing.step = k;
            timing.cbaam_bound_ms = cbaam_bound;
            for (std::size_t i = 0; i < agents.size (); ++i)
            {
                AgentRuntime &a = agents[i];
                AgentStepRecord &r = rec.agents[i];
                r.u = applied[i];
                if (r.solved)
                    timing.max_mpc_ms = std::max (timing.max_mpc_ms, r.solver.wall_ms);
                a.state = step (a.ctx.model, a.state, applied[i]);
                if (a.state.v < 0.0)
                {
                    std::ostringstream os;
                    os << "step " << k << ": agent " << a.cfg.id << " speed " << a.state.v << " clamped to 0";
                    result.log.notes.push_back (os.str ());
                    ++result.log.v_clamps;
                    a.state.v = 0.0;
                    r.v_clamped = true;
                }
            }
            if (!std::all_of (agents.begin (), agents.end (), [] (const AgentRuntime &a) { return a.state.finite (); }))
                throw std::runtime_error (dump_state (k + 1, agents));
            timing.total_ms = timing.cbaam_bound_ms + timing.max_mpc_ms;
            timing.within_budget = timing.total_ms <= 1000.0 * cfg.T_s;

            // (7) broadcasts become visible at the next step
            published = std::move (pending);
            result.log.steps.push_back (std::move (rec));
            result.timing.rows.push_back (timing);
        }
        return result;
    }

    std::string trajectory_csv (const SimulationLog &log)
    {
        std::ostringstream os;
        os << "step,time_s,agent,s_m,v_mps,ax_mps2,u_mps2,x_g_m,y_g_m,psi_rad,region,ay_mps2,atot_mps2,"
              "min_pair_dist_m,exact_overlap_m2\n";
        for (const StepRecord &st : log.steps)
            for (const AgentStepRecord &a : st.agents)
                os << st.step << ',' << num (st.time) << ',' << a.id << ',' << num (a.state.s) << ','
                   << num (a.state.v) << ',' << num (a.state.a_x) << ',' << num (a.u) << ',' << num (a.x_g) << ','
                   << num (a.y_g) << ',' << num (a.psi) << ',' << region_name (a.region) << ',' << num (a.a_y) << ','
                   << num (a.a_tot) << ',' << num (a.min_pair_distance) << ',' << num (a.exact_overlap) << '\n';
        return os.str ();
    }

    std::string priorities_csv (const SimulationLog &log)
    {
        std::ostringstream os;
        os << "step,time_s,agent,bid,rank,emergency_flag,auction_iterations\n";
        for (const StepRecord &st : log.steps)
            for (const AgentStepRecord &a : st.agents)
                os << st.step << ',' << num (st.time) << ',' << a.id << ',' << (a.active ? num (a.bid) : "") << ','
                   << a.rank << ',' << (a.emergency ? 1 : 0) << ',' << st.auction_iterations << '\n';
        return os.str ();
    }

    std::string timing_csv (const TimingReport &report)
    {
        std::ostringstream os;
        os << "step,cbaam_bound_ms,max_mpc_ms,total_ms,within_budget\n";
        for (const TimingRow &t : report.rows)
            os << t.step << ',' << num (t.cbaam_bound_ms) << ',' << num (t.max_mpc_ms) << ',' << num (t.total_ms)
               << ',' << (t.within_budget ? "true" : "false") << '\n';
        return os.str ();
    }

    std::string solver_csv (const SimulationLog &log)
    {
        std::ostringstream os;
        os << "step,agent,candidate,outer_iterations,inner_iterations,max_violation,converged,inner_limit_hit,"
              "objective,wall_ms\n";
        for (const StepRecord &st : log.steps)
            for (const AgentStepRecord &a : st.agents)
                if (a.solved)
                    os << st.step << ',' << a.id << ',' << a.solver.candidate << ',' << a.solver.outer_iterations
                       << ',' << a.solver.inner_iterations << ',' << num (a.solver.max_violation) << ','
                       << (a.solver.converged ? 1 : 0) << ',' << (a.solver.inner_limit_hit ? 1 : 0) << ','
                       << num (a.solver.objective) << ',' << num (a.solver.wall_ms) << '\n';
        return os.str ();
    }

    void export_logs (const SimulationResult &result, const std::filesystem::path &out_dir)
    {
        std::error_code ec;
        std::filesystem::create_directories (out_dir, ec);
        if (ec)
            throw std::runtime_error (out_dir.string () + ": " + ec.message ());
        write_file (out_dir / "trajectory.csv", trajectory_csv (result.log));
        write_file (out_dir / "priorities.csv", priorities_csv (result.log));
        write_file (out_dir / "timing.csv", timing_csv (result.timing));
        write_file (out_dir / "solver.csv", solver_csv (result.log));
    }

    int overlap_violations (const SimulationLog &log)
    {
        int count = 0;
        for (const StepRecord &st : log.steps)
            for (const AgentStepRecord &a : st.agents)
                if (a.exact_overlap > 0.0)
                    ++count;
        return count;
    }

} // namespace intersim
