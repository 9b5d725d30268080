#include "intersim/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace intersim
{
    namespace
    {
        using json = nlohmann::json;

        // A JSON node together with its path from the document root.
        class Field
        {
          public:
            Field (const json &node, std::string path) : node_ (node), path_ (std::move (path)) {}

            [[noreturn]] void fail (const std::string &msg) const { throw ScenarioError (path_ + ": " + msg); }

            [[nodiscard]] const std::string &path () const noexcept { return path_; }
            [[nodiscard]] bool has (const char *key) const { return node_.contains (key); }

            [[nodiscard]] Field at (const char *key) const
            {
                if (!node_.contains (key))
                    throw ScenarioError (path_ + "." + key + ": missing required field");
                return {node_.at (key), path_ + "." + key};
            }

            [[nodiscard]] Field item (std::size_t i) const
            {
                return {node_.at (i), path_ + "[" + std::to_string (i) + "]"};
            }

            void expect_object (std::initializer_list<std::string_view> allowed) const
            {
                if (!node_.is_object ())
                    fail ("expected an object");
                for (const auto &[key, value] : node_.items ())
                    if (std::find (allowed.begin (), allowed.end (), key) == allowed.end ())
                        throw ScenarioError (path_ + "." + key + ": unknown field");
            }

            [[nodiscard]] std::size_t array_size () const
            {
                if (!node_.is_array ())
                    fail ("expected an array");
                return node_.size ();
            }

            [[nodiscard]] double number () const
            {
                if (!node_.is_number ())
                    fail ("expected a number");
                const double x = node_.get<double> ();
                if (!std::isfinite (x))
                    fail ("must be finite");
                return x;
            }

            [[nodiscard]] int integer () const
            {
                if (!node_.is_number_integer ())
                    fail ("expected an integer");
                return node_.get<int> ();
            }

            [[nodiscard]] bool boolean () const
            {
                if (!node_.is_boolean ())
                    fail ("expected true or false");
                return node_.get<bool> ();
            }

            [[nodiscard]] std::string string () const
            {
                if (!node_.is_string ())
                    fail ("expected a string");
                return node_.get<std::string> ();
            }

            [[nodiscard]] bool is_string () const noexcept { return node_.is_string (); }

            void read (const char *key, double &out) const
            {
                if (has (key))
                    out = at (key).number ();
            }
            void read (const char *key, int &out) const
            {
                if (has (key))
                    out = at (key).integer ();
            }
            void read (const char *key, bool &out) const
            {
                if (has (key))
                    out = at (key).boolean ();
            }

          private:
            const json &node_;
            std::string path_;
        };

        Vec2 read_point (const Field &f)
        {
            if (f.array_size () != 2)
                f.fail ("expected [x, y]");
            return {f.item (0).number (), f.item (1).number ()};
        }

        Arm read_arm (const Field &f)
        {
            try
            {
                return parse_arm (f.string ());
            }
            catch (const std::invalid_argument &e)
            {
                f.fail (e.what ());
            }
        }

        AgentParams read_params (const Field &f)
        {
            f.expect_object ({"T_ax", "a_x_min", "a_x_max", "v_max", "a_y_max", "a_tot_max", "length", "width", "q",
                              "q_N", "r", "v_ref"});
            AgentParams p;
            f.read ("T_ax", p.T_ax);
            f.read ("a_x_min", p.a_x_min);
            f.read ("a_x_max", p.a_x_max);
            f.read ("v_max", p.v_max);
            f.read ("a_y_max", p.a_y_max);
            f.read ("a_tot_max", p.a_tot_max);
            f.read ("length", p.length);
            f.read ("width", p.width);
            f.read ("q", p.q);
            f.read ("q_N", p.q_N);
            f.read ("r", p.r);
            f.read ("v_ref", p.v_ref);
            return p;
        }

        std::set<std::pair<AgentId, AgentId>> read_arcs (const Field &f)
        {
            std::set<std::pair<AgentId, AgentId>> arcs;
            const std::size_t n = f.array_size ();
            for (std::size_t k = 0; k < n; ++k)
            {
                const Field arc = f.item (k);
                if (arc.array_size () != 2)
                    arc.fail ("expected [from, to]");
                arcs.emplace (arc.item (0).integer (), arc.item (1).integer ());
            }
            return arcs;
        }

        TopologyConfig read_topology (const Field &f)
        {
            TopologyConfig t;
            if (f.is_string ())
            {
                const std::string kind = f.string ();
                if (kind == "complete")
                    t.kind = TopologyConfig::Kind::Complete;
                else if (kind == "ring")
                    t.kind = TopologyConfig::Kind::Ring;
                else
                    f.fail ("expected \"complete\", \"ring\" or {\"arcs\": [...]}");
                return t;
            }
            f.expect_object ({"arcs"});
            t.kind = TopologyConfig::Kind::Explicit;
            t.arcs = read_arcs (f.at ("arcs"));
            return t;
        }

        ScenarioConfig parse_document (const json &doc)
        {
            const Field root (doc, "$");
            root.expect_object ({"name", "sampling_time", "horizon", "steps", "geometry", "bid", "margins", "penalty",
                                 "topology", "latency_ms", "ca_sharpness", "curvature_blend", "agents", "events"});
            ScenarioConfig cfg;
            if (root.has ("name"))
                cfg.name = root.at ("name").string ();
            root.read ("sampling_time", cfg.T_s);
            root.read ("horizon", cfg.horizon);
            root.read ("steps", cfg.steps);
            root.read ("latency_ms", cfg.latency.per_hop_latency_ms);
            root.read ("ca_sharpness", cfg.ca_sharpness);
            root.read ("curvature_blend", cfg.curvature_blend);

            RouteSpec route_defaults;
            if (root.has ("geometry"))
            {
                const Field g = root.at ("geometry");
                g.expect_object ({"cr_half_width", "icr_radius", "brake_margin", "stop_setback", "lane_offset",
                                  "turn_radius", "approach_length"});
                g.read ("cr_half_width", cfg.geometry.cr_half_width);
                g.read ("icr_radius", cfg.geometry.icr_radius);
                g.read ("brake_margin", cfg.geometry.brake_margin);
                g.read ("stop_setback", cfg.geometry.stop_setback);
                g.read ("lane_offset", route_defaults.lane_offset);
                g.read ("turn_radius", route_defaults.turn_radius);
                g.read ("approach_length", route_defaults.approach_length);
            }
            if (root.has ("bid"))
            {
                const Field b = root.at ("bid");
                b.expect_object ({"alpha1", "alpha2", "alpha3", "alpha4", "alpha5", "emergency_bid"});
                b.read ("alpha1", cfg.bids.alpha1);
                b.read ("alpha2", cfg.bids.alpha2);
                b.read ("alpha3", cfg.bids.alpha3);
                b.read ("alpha4", cfg.bids.alpha4);
                b.read ("alpha5", cfg.bids.alpha5);
                b.read ("emergency_bid", cfg.bids.emergency_bid);
            }
            if (root.has ("margins"))
            {
                const Field m = root.at ("margins");
                m.expect_object ({"lateral", "longitudinal", "headway"});
                m.read ("lateral", cfg.margins.lateral);
                m.read ("longitudinal", cfg.margins.longitudinal);
                m.read ("headway", cfg.margins.headway);
            }
            if (root.has ("penalty"))
            {
                const Field p = root.at ("penalty");
                p.expect_object ({"initial_weight", "multiplier", "max_outer_iterations", "constraint_tolerance",
                                  "inner_tolerance", "lbfgs_memory", "max_inner_iterations", "restart_candidates"});
                p.read ("initial_weight", cfg.penalty.initial_weight);
                p.read ("multiplier", cfg.penalty.multiplier);
                p.read ("max_outer_iterations", cfg.penalty.max_outer_iterations);
                p.read ("constraint_tolerance", cfg.penalty.constraint_tolerance);
                p.read ("inner_tolerance", cfg.penalty.inner_tolerance);
                p.read ("lbfgs_memory", cfg.penalty.lbfgs_memory);
                p.read ("max_inner_iterations", cfg.penalty.max_inner_iterations);
                p.read ("restart_candidates", cfg.penalty.restart_candidates);
            }
            if (root.has ("topology"))
                cfg.topology = read_topology (root.at ("topology"));

            const Field agents = root.at ("agents");
            const std::size_t n_agents = agents.array_size ();
            for (std::size_t k = 0; k < n_agents; ++k)
            {
                const Field a = agents.item (k);
                a.expect_object ({"id", "route", "position", "speed", "params"});
                AgentConfig ac;
                ac.id = a.at ("id").integer ();
                const Field r = a.at ("route");
                r.expect_object ({"entry", "exit", "lane_offset", "turn_radius", "approach_length"});
                ac.route = route_defaults;
                ac.route.entry = read_arm (r.at ("entry"));
                ac.route.exit = read_arm (r.at ("exit"));
                r.read ("lane_offset", ac.route.lane_offset);
                r.read ("turn_radius", ac.route.turn_radius);
                r.read ("approach_length", ac.route.approach_length);
                ac.initial_position = read_point (a.at ("position"));
                ac.initial_speed = a.at ("speed").number ();
                if (a.has ("params"))
                    ac.params = read_params (a.at ("params"));
                cfg.agents.push_back (ac);
            }

            if (root.has ("events"))
            {
                const Field events = root.at ("events");
                const std::size_t n = events.array_size ();
                for (std::size_t k = 0; k < n; ++k)
                {
                    const Field e = events.item (k);
                    e.expect_object ({"time", "agent", "kind"});
                    ScenarioEvent ev;
                    ev.time = e.at ("time").number ();
                    ev.agent = e.at ("agent").integer ();
                    const Field kind = e.at ("kind");
                    if (kind.string () != "emergency_on")
                        kind.fail ("unknown event kind \"" + kind.string () + "\"");
                    ev.kind = EventKind::EmergencyOn;
                    cfg.events.push_back (ev);
                }
            }
            return cfg;
        }

        std::string read_file (const std::filesystem::path &file)
        {
            std::ifstream in (file, std::ios::binary);
            if (!in)
                throw ScenarioError (file.string () + ": cannot open file");
            std::ostringstream ss;
            ss << in.rdbuf ();
            return ss.str ();
        }

        AgentConfig preset_agent (AgentId id, Arm entry, Arm exit, Vec2 position)
        {
            AgentConfig a;
            a.id = id;
            a.route.entry = entry;
            a.route.exit = exit;
            a.initial_position = position;
            a.initial_speed = 14.0;
            return a;
        }
    } // namespace

    void ScenarioConfig::validate () const
    {
        if (!(T_s > 0.0))
            throw ScenarioError ("$.sampling_time: must be positive");
        if (horizon < 1)
            throw ScenarioError ("$.horizon: must be at least 1");
        if (steps < 0)
            throw ScenarioError ("$.steps: must be non-negative");
        if (agents.empty ())
            throw ScenarioError ("$.agents: at least one agent is required");
        if (!(ca_sharpness > 0.0))
            throw ScenarioError ("$.ca_sharpness: must be positive");
        if (!(curvature_blend >= 0.0))
            throw ScenarioError ("$.curvature_blend: must be non-negative");
        if (!(latency.per_hop_latency_ms >= 0.0))
            throw ScenarioError ("$.latency_ms: must be non-negative");
        if (!(geometry.cr_half_width > 0.0) || !(geometry.icr_radius > geometry.cr_half_width) ||
            !(geometry.brake_margin >= 0.0) || !(geometry.stop_setback >= 0.0))
            throw ScenarioError ("$.geometry: need 0 < cr_half_width < icr_radius and non-negative margins");
        if (!(margins.lateral >= 0.0) || !(margins.longitudinal >= 0.0) || !(margins.headway >= 0.0))
            throw ScenarioError ("$.margins: must be non-negative");
        try
        {
            penalty.validate ();
        }
        catch (const std::invalid_argument &e)
        {
            throw ScenarioError (std::string ("$.penalty: ") + e.what ());
        }

        std::set<AgentId> ids;
        for (std::size_t k = 0; k < agents.size (); ++k)
        {
            const AgentConfig &a = agents[k];
            const std::string where = "$.agents[" + std::to_string (k) + "]";
            if (a.id < 1)
                throw ScenarioError (where + ".id: must be a positive integer");
            if (!ids.insert (a.id).second)
                throw ScenarioError (where + ".id: duplicate agent id " + std::to_string (a.id));
            try
            {
                intersim::validate (a.params);
            }
            catch (const std::invalid_argument &e)
            {
                throw ScenarioError (where + ".params: " + e.what ());
            }
            try
            {
                intersim::validate (bids, a.params.v_max);
            }
            catch (const std::invalid_argument &e)
            {
                throw ScenarioError ("$.bid: " + std::string (e.what ()) + " (agent " + std::to_string (a.id) + ")");
            }
            if (!(a.initial_speed >= 0.0) || a.initial_speed > a.params.v_max)
                throw ScenarioError (where + ".speed: must lie in [0, v_max]");
            try
            {
                const PathSpec path = build_path (a.route);
                (void) compute_regions (path, geometry, a.params.v_max, a.params.a_x_min);
                const PathProjection proj = project_onto_path (path, a.initial_position);
                if (proj.lateral > 0.1)
                    throw ScenarioError (where + ".position: " + std::to_string (proj.lateral) +
                                         " m off the route centerline (limit 0.1 m)");
            }
            catch (const std::invalid_argument &e)
            {
                throw ScenarioError (where + ".route: " + e.what ());
            }
        }

        for (std::size_t k = 0; k < events.size (); ++k)
        {
            const std::string where = "$.events[" + std::to_string (k) + "]";
            if (!(events[k].time >= 0.0))
                throw ScenarioError (where + ".time: must be non-negative");
            if (!ids.contains (events[k].agent))
                throw ScenarioError (where + ".agent: unknown agent " + std::to_string (events[k].agent));
        }

        if (topology.kind == TopologyConfig::Kind::Explicit)
        {
            try
            {
                const Topology t = build_topology (topology, ids);
                if (!is_strongly_connected (t))
                    throw ScenarioError ("$.topology: graph is not strongly connected");
            }
            catch (const std::invalid_argument &e)
            {
                throw ScenarioError (std::string ("$.topology: ") + e.what ());
            }
        }
    }

    ScenarioConfig load_scenario (std::string_view json_text)
    {
        json doc;
        try
        {
            doc = json::parse (json_text);
        }
        catch (const json::parse_error &e)
        {
            throw ScenarioError (std::string ("$: malformed JSON: ") + e.what ());
        }
        ScenarioConfig cfg = parse_document (doc);
        cfg.validate ();
        return cfg;
    }

    ScenarioConfig load_scenario_file (const std::filesystem::path &file) { return load_scenario (read_file (file)); }

    bool is_preset (std::string_view name) noexcept { return name == "use_case_1" || name == "use_case_2"; }

    ScenarioConfig preset (std::string_view name)
    {
        if (!is_preset (name))
            throw ScenarioError ("unknown preset \"" + std::string (name) + "\"");
        ScenarioConfig cfg;
        cfg.name = std::string (name);
        cfg.agents = {
            preset_agent (1, Arm::North, Arm::South, {-2.0, 82.0}),
            preset_agent (2, Arm::West, Arm::North, {-84.0, -2.0}),
            preset_agent (3, Arm::East, Arm::West, {81.0, 2.0}),
            preset_agent (4, Arm::South, Arm::North, {2.0, -84.0}),
        };
        if (name == "use_case_2")
            cfg.events.push_back ({0.5, 2, EventKind::EmergencyOn});
        cfg.validate ();
        return cfg;
    }

    ScenarioConfig resolve_scenario (std::string_view name_or_path)
    {
        if (is_preset (name_or_path))
            return preset (name_or_path);
        return load_scenario_file (std::filesystem::path (name_or_path));
    }

    TopologyConfig parse_topology (std::string_view name_or_path)
    {
        if (name_or_path == "complete")
            return {TopologyConfig::Kind::Complete, {}};
        if (name_or_path == "ring")
            return {TopologyConfig::Kind::Ring, {}};
        const std::filesystem::path file (name_or_path);
        json doc;
        try
        {
            doc = json::parse (read_file (file));
        }
        catch (const json::parse_error &e)
        {
            throw ScenarioError (file.string () + ": malformed JSON: " + e.what ());
        }
        return read_topology (Field (doc, file.string ()));
    }

    Topology build_topology (const TopologyConfig &cfg, const std::set<AgentId> &nodes)
    {
        switch (cfg.kind)
        {
        case TopologyConfig::Kind::Complete:
            return Topology::complete (nodes);
        case TopologyConfig::Kind::Ring:
            return Topology::ring (nodes);
        case TopologyConfig::Kind::Explicit:
            break;
        }
        return Topology (nodes, cfg.arcs);
    }

    std::string_view event_kind_name (EventKind kind) noexcept
    {
        switch (kind)
        {
        case EventKind::EmergencyOn:
            return "emergency_on";
        }
        return "unknown";
    }

} // namespace intersim
