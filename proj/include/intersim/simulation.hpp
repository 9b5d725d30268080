#pragma once
/**
 * @file   simulation.hpp
 * @brief  Closed-loop step loop: auction, conflict sets, parallel OCP solves,
 *         plant update and trajectory broadcast. Also the CSV export.
 */

#include "intersim/scenario.hpp"

#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace intersim
{
    struct RunOptions
    {
        int workers = 1;
        /// Test hook: fill the buffer that receives this step's broadcasts
        /// with NaN before the solves start.
        bool poison_pending_buffer = false;
        /// Called before every OCP solve with the exact solver inputs. Runs on
        /// the worker threads, so it must be thread-safe when workers > 1.
        std::function<void (int step, AgentId agent, const OcpParameter &z, std::span<const double> warm)>
            solve_observer;
    };

    struct AgentStepRecord
    {
        AgentId id = 0;
        AgentState state;     ///< measured state at the start of the step
        double u = 0.0;       ///< applied input
        double x_g = 0.0, y_g = 0.0, psi = 0.0;
        double a_y = 0.0;     ///< kappa(s) v^2 on the exact path curvature
        double a_tot = 0.0;
        RegionLabel region = RegionLabel::Outside;
        bool active = false;  ///< takes part in the auction
        bool on_road = true;  ///< false once the end of the path is reached
        bool solved = false;  ///< false when driving open loop past the ICR
        bool emergency = false;
        double bid = 0.0;     ///< only meaningful when active
        int rank = 0;         ///< 0 when not active
        std::set<AgentId> conflicts;
        double min_pair_distance = std::numeric_limits<double>::infinity ();
        double exact_overlap = 0.0;  ///< largest footprint/footprint overlap
        double region_overlap = 0.0; ///< largest safety-region/footprint overlap over the conflict set
        bool v_clamped = false;      ///< plant clipped v at 0 after this step
        SolverReport solver;
    };

    struct StepRecord
    {
        int step = 0;
        double time = 0.0;
        int auction_iterations = 0; ///< superstep at which the lists agreed
        int supersteps = 0;
        int ell = 0;
        std::vector<AgentStepRecord> agents; ///< ascending id
    };

    struct SimulationLog
    {
        std::vector<StepRecord> steps;
        std::vector<std::string> notes; ///< plant clamps and other diagnostics
        int v_clamps = 0;
    };

    struct TimingRow
    {
        int step = 0;
        double cbaam_bound_ms = 0.0;
        double max_mpc_ms = 0.0;
        double total_ms = 0.0;
        bool within_budget = true;
    };

    struct TimingReport
    {
        std::vector<TimingRow> rows;
    };

    struct SimulationResult
    {
        SimulationLog log;
        TimingReport timing;
    };

    /// Emergency flags per agent; apply_event is idempotent.
    using EmergencyFlags = std::map<AgentId, bool>;
    void apply_event (EmergencyFlags &flags, const ScenarioEvent &event);

    /// First step index whose sampling instant is at or after the event time.
    [[nodiscard]] int event_step (const ScenarioEvent &event, double T_s);

    [[nodiscard]] SimulationResult run_simulation (const ScenarioConfig &cfg, const RunOptions &opts = {});

    /// Writes trajectory.csv, priorities.csv, timing.csv and solver.csv.
    void export_logs (const SimulationResult &result, const std::filesystem::path &out_dir);

    [[nodiscard]] std::string trajectory_csv (const SimulationLog &log);
    [[nodiscard]] std::string priorities_csv (const SimulationLog &log);
    [[nodiscard]] std::string timing_csv (const TimingReport &report);
    [[nodiscard]] std::string solver_csv (const SimulationLog &log);

    /// Number of (step, agent) rows whose footprint overlaps another one.
    [[nodiscard]] int overlap_violations (const SimulationLog &log);

} // namespace intersim
