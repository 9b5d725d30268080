#pragma once
/**
 * @file   scenario.hpp
 * @brief  Scenario configuration: JSON loading with field-path diagnostics,
 *         the two built-in presets and topology construction.
 */

#include "intersim/agent_dynamics.hpp"
#include "intersim/auction.hpp"
#include "intersim/conflict_geometry.hpp"
#include "intersim/mpc.hpp"
#include "intersim/network.hpp"
#include "intersim/path_geometry.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace intersim
{
    /// Schema or invariant violation; what() starts with the offending field path.
    class ScenarioError : public std::runtime_error
    {
      public:
        using std::runtime_error::runtime_error;
    };

    struct AgentConfig
    {
        AgentId id = 0;
        RouteSpec route;
        Vec2 initial_position;
        double initial_speed = 0.0;
        AgentParams params;
    };

    enum class EventKind
    {
        EmergencyOn
    };

    struct ScenarioEvent
    {
        double time = 0.0; ///< s
        AgentId agent = 0;
        EventKind kind = EventKind::EmergencyOn;
    };

    struct TopologyConfig
    {
        enum class Kind
        {
            Complete,
            Ring,
            Explicit
        };
        Kind kind = Kind::Complete;
        std::set<std::pair<AgentId, AgentId>> arcs; ///< only for Explicit
    };

    struct ScenarioConfig
    {
        std::string name = "custom";
        double T_s = 0.1;
        int horizon = 50;
        int steps = 250;
        std::vector<AgentConfig> agents;
        IntersectionGeometry geometry;
        BidParams bids;
        SafetyMargins margins;
        PenaltyConfig penalty;
        TopologyConfig topology;
        LatencyModel latency;
        std::vector<ScenarioEvent> events;
        double ca_sharpness = 10.0;
        double curvature_blend = 0.5;

        /// Throws ScenarioError on any invariant failure.
        void validate () const;
    };

    [[nodiscard]] ScenarioConfig load_scenario (std::string_view json_text);
    [[nodiscard]] ScenarioConfig load_scenario_file (const std::filesystem::path &file);

    /// "use_case_1" or "use_case_2"; throws ScenarioError otherwise.
    [[nodiscard]] ScenarioConfig preset (std::string_view name);
    [[nodiscard]] bool is_preset (std::string_view name) noexcept;

    /// Preset name or path to a JSON file.
    [[nodiscard]] ScenarioConfig resolve_scenario (std::string_view name_or_path);

    /// "complete", "ring" or a JSON file holding {"arcs": [[from, to], ...]}.
    [[nodiscard]] TopologyConfig parse_topology (std::string_view name_or_path);

    [[nodiscard]] Topology build_topology (const TopologyConfig &cfg, const std::set<AgentId> &nodes);

    [[nodiscard]] std::string_view event_kind_name (EventKind kind) noexcept;

} // namespace intersim
