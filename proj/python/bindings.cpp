// Python bindings for the simulator core.

#include "intersim/simulation.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace intersim;

namespace
{
    Topology topology_from (const py::object &spec, const std::set<AgentId> &nodes)
    {
        if (py::isinstance<py::str> (spec))
            return build_topology (parse_topology (spec.cast<std::string> ()), nodes);
        TopologyConfig cfg{TopologyConfig::Kind::Explicit, {}};
        for (const auto &arc : spec.cast<std::vector<std::pair<AgentId, AgentId>>> ())
            cfg.arcs.insert (arc);
        return build_topology (cfg, nodes);
    }

    RouteSpec route_of (const std::string &entry, const std::string &exit, double lane_offset, double turn_radius,
                        double approach_length)
    {
        return RouteSpec{parse_arm (entry), parse_arm (exit), lane_offset, turn_radius, approach_length};
    }

    py::dict regions_dict (const RegionBounds &b)
    {
        py::dict d;
        d["s_icr_in"] = b.s_icr_in;
        d["s_icr_out"] = b.s_icr_out;
        d["s_bsr_in"] = b.s_bsr_in;
        d["s_bsr_out"] = b.s_bsr_out;
        d["s_cr_in"] = b.s_cr_in;
        d["s_cr_out"] = b.s_cr_out;
        d["s_stop"] = b.s_stop;
        return d;
    }
} // namespace

PYBIND11_MODULE (_intersim, m)
{
    m.doc () = "Intersection crossing simulator: priority auction plus distributed MPC";

    py::register_exception<ScenarioError> (m, "ScenarioError", PyExc_ValueError);

    py::class_<AgentState> (m, "AgentState")
        .def (py::init<double, double, double> (), py::arg ("a_x") = 0.0, py::arg ("v") = 0.0, py::arg ("s") = 0.0)
        .def_readwrite ("a_x", &AgentState::a_x)
        .def_readwrite ("v", &AgentState::v)
        .def_readwrite ("s", &AgentState::s)
        .def ("__eq__", [] (const AgentState &a, const AgentState &b) { return a == b; })
        .def ("__repr__", [] (const AgentState &x) {
            return "AgentState(a_x=" + std::to_string (x.a_x) + ", v=" + std::to_string (x.v) +
                   ", s=" + std::to_string (x.s) + ")";
        });

    py::class_<DiscreteModel> (m, "DiscreteModel")
        .def_readonly ("A_d", &DiscreteModel::A_d)
        .def_readonly ("B_d", &DiscreteModel::B_d)
        .def_readonly ("T_s", &DiscreteModel::T_s);

    m.def ("discretize", &discretize, py::arg ("T_ax"), py::arg ("T_s"));
    m.def ("step", &step, py::arg ("model"), py::arg ("x"), py::arg ("u"));
    m.def (
        "rollout", [] (const DiscreteModel &model, const AgentState &x0, const std::vector<double> &u) {
            return rollout (model, x0, u);
        },
        py::arg ("model"), py::arg ("x0"), py::arg ("u"));

    py::class_<PathSample> (m, "PathSample")
        .def_readonly ("x_g", &PathSample::x_g)
        .def_readonly ("y_g", &PathSample::y_g)
        .def_readonly ("psi", &PathSample::psi)
        .def_readonly ("kappa", &PathSample::kappa)
        .def_readonly ("clamped", &PathSample::clamped);

    py::class_<PathSpec> (m, "PathSpec")
        .def_property_readonly ("total_length", &PathSpec::total_length)
        .def_property_readonly ("segment_count", [] (const PathSpec &p) { return p.segments ().size (); })
        .def ("sample", [] (const PathSpec &p, double s) { return sample_path (p, s); }, py::arg ("s"));

    m.def ("build_path", [] (const std::string &entry, const std::string &exit, double lane_offset,
                             double turn_radius, double approach_length) {
        return build_path (route_of (entry, exit, lane_offset, turn_radius, approach_length));
    },
           py::arg ("entry"), py::arg ("exit"), py::arg ("lane_offset") = 2.0, py::arg ("turn_radius") = 8.0,
           py::arg ("approach_length") = 84.0);

    m.def ("compute_regions", [] (const PathSpec &p, double v_max, double a_x_min, double cr_half_width,
                                  double icr_radius, double brake_margin, double stop_setback) {
        return regions_dict (
            compute_regions (p, IntersectionGeometry{cr_half_width, icr_radius, brake_margin, stop_setback}, v_max, a_x_min));
    },
           py::arg ("path"), py::arg ("v_max") = 15.0, py::arg ("a_x_min") = -7.0, py::arg ("cr_half_width") = 6.0,
           py::arg ("icr_radius") = 70.0, py::arg ("brake_margin") = 2.0, py::arg ("stop_setback") = 1.0);

    m.def ("compute_bid", [] (double s, double v, double s_bsr_in, bool emergency) {
        return compute_bid (s, v, s_bsr_in, BidParams{}, emergency);
    },
           py::arg ("s"), py::arg ("v"), py::arg ("s_bsr_in"), py::arg ("emergency") = false);

    m.def ("graph_ell", [] (const std::set<AgentId> &nodes, const py::object &topology) {
        return graph_ell (topology_from (topology, nodes));
    },
           py::arg ("nodes"), py::arg ("topology") = "complete");

    m.def ("cbaam_time_bound", [] (int n, int ell, double per_hop_ms) {
        return cbaam_time_bound (n, ell, LatencyModel{per_hop_ms});
    },
           py::arg ("n_agents"), py::arg ("ell"), py::arg ("per_hop_ms") = 3.0);

    m.def ("run_cbaam", [] (const std::map<AgentId, double> &bids, const py::object &topology) {
        std::set<AgentId> nodes;
        for (const auto &[id, b] : bids)
            nodes.insert (id);
        const CbaamResult r = run_cbaam (bids, topology_from (topology, nodes));
        py::dict d;
        d["order"] = r.assignment.order;
        d["agreement_iteration"] = r.agreement_iteration;
        d["supersteps"] = r.supersteps;
        d["ell"] = r.ell;
        return d;
    },
           py::arg ("bids"), py::arg ("topology") = "complete",
           "Agreed priority order for {agent: bid} over 'complete', 'ring' or a list of (from, to) arcs.");

    m.def ("area_overlap", [] (std::tuple<double, double, double, double, double> a,
                               std::tuple<double, double, double, double, double> b) {
        auto box = [] (const auto &t) {
            return OrientedBox{{std::get<0> (t), std::get<1> (t)}, std::get<2> (t), std::get<3> (t), std::get<4> (t)};
        };
        return area_overlap (box (a), box (b));
    },
           py::arg ("a"), py::arg ("b"), "Boxes as (x, y, heading, half_length, half_width).");

    m.def ("solve_ocp", [] (const std::string &entry, const std::string &exit, const AgentState &x0, int horizon) {
        const PathSpec path = build_path (RouteSpec{parse_arm (entry), parse_arm (exit)});
        OcpContext ctx;
        ctx.model = discretize (ctx.params.T_ax, 0.1);
        ctx.path = &path;
        ctx.regions = compute_regions (path, IntersectionGeometry{}, ctx.params.v_max, ctx.params.a_x_min);
        ctx.horizon = horizon;
        OcpParameter z;
        z.own_state = x0;
        OcpSolution sol;
        {
            py::gil_scoped_release release;
            sol = solve_ocp (z, ctx, PenaltyConfig{});
        }
        py::dict d;
        d["u"] = sol.u;
        d["states"] = sol.trajectory.states;
        d["max_violation"] = sol.report.max_violation;
        d["converged"] = sol.report.converged;
        d["wall_ms"] = sol.report.wall_ms;
        return d;
    },
           py::arg ("entry"), py::arg ("exit"), py::arg ("x0"), py::arg ("horizon") = 50,
           "Single agent alone on a default route, default parameters, T_s = 0.1 s.");

    py::class_<ScenarioConfig> (m, "Scenario")
        .def_readwrite ("name", &ScenarioConfig::name)
        .def_readwrite ("steps", &ScenarioConfig::steps)
        .def_readonly ("sampling_time", &ScenarioConfig::T_s)
        .def_readonly ("horizon", &ScenarioConfig::horizon)
        .def_property_readonly ("agent_ids", [] (const ScenarioConfig &c) {
            std::vector<AgentId> ids;
            for (const auto &a : c.agents)
                ids.push_back (a.id);
            return ids;
        })
        .def ("set_topology", [] (ScenarioConfig &c, const std::string &t) {
            c.topology = parse_topology (t);
            c.validate ();
        });

    m.def ("preset", &preset, py::arg ("name"));
    m.def ("load_scenario", &load_scenario, py::arg ("json_text"));
    m.def ("resolve_scenario", &resolve_scenario, py::arg ("name_or_path"));

    py::class_<SimulationResult> (m, "SimulationResult")
        .def_property_readonly ("steps", [] (const SimulationResult &r) { return r.log.steps.size (); })
        .def_property_readonly ("overlap_violations", [] (const SimulationResult &r) { return overlap_violations (r.log); })
        .def_property_readonly ("speed_clamps", [] (const SimulationResult &r) { return r.log.v_clamps; })
        .def ("trajectory_csv", [] (const SimulationResult &r) { return trajectory_csv (r.log); })
        .def ("priorities_csv", [] (const SimulationResult &r) { return priorities_csv (r.log); })
        .def ("timing_csv", [] (const SimulationResult &r) { return timing_csv (r.timing); })
        .def ("solver_csv", [] (const SimulationResult &r) { return solver_csv (r.log); })
        .def ("export", [] (const SimulationResult &r, const std::filesystem::path &dir) { export_logs (r, dir); },
              py::arg ("out_dir"))
        .def ("ranks", [] (const SimulationResult &r) {
            std::vector<std::map<AgentId, int>> out;
            for (const StepRecord &st : r.log.steps)
            {
                std::map<AgentId, int> row;
                for (const AgentStepRecord &a : st.agents)
                    row[a.id] = a.rank;
                out.push_back (std::move (row));
            }
            return out;
        }, "Per step {agent: rank}, rank 0 when not taking part in the auction.");

    m.def ("simulate", [] (const ScenarioConfig &cfg, int workers) {
        RunOptions opts;
        opts.workers = workers;
        py::gil_scoped_release release;
        return run_simulation (cfg, opts);
    },
           py::arg ("scenario"), py::arg ("workers") = 1);
}
