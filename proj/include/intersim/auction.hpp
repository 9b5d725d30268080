#pragma once
/**
 * @file   auction.hpp
 * @brief  Crossing-priority negotiation: bid function and the two-phase
 *         CBAA-M protocol (local auction, then max-consensus on the lists).
 */

#include "intersim/agent_dynamics.hpp"
#include "intersim/network.hpp"
#include "intersim/path_geometry.hpp"

#include <functional>
#include <map>
#include <set>
#include <span>
#include <vector>

namespace intersim
{
    struct BidParams
    {
        double alpha1 = 0.1; ///< weight on speed
        double alpha2 = 5.0; ///< numerator of the distance term
        double alpha3 = 0.1; ///< slope inside the BSR
        double alpha4 = 1.0; ///< distance threshold to the BSR
        double alpha5 = 7.0; ///< offset inside the BSR
        double emergency_bid = 1e6;
    };

    /// Checks positivity and that inside-BSR bids dominate every outside bid
    /// for speeds up to @p v_max.
    void validate (const BidParams &p, double v_max);

    [[nodiscard]] double compute_bid (double s, double v, double s_bsr_in, const BidParams &p, bool emergency);

    /// Per-agent sorted lists; slot value 0 means unassigned.
    struct PriorityVectors
    {
        std::vector<AgentId> v;
        std::vector<double> w;

        [[nodiscard]] static PriorityVectors empty (std::size_t n) { return {std::vector<AgentId> (n, 0), std::vector<double> (n, 0.0)}; }
        [[nodiscard]] bool complete () const noexcept;
        friend bool operator== (const PriorityVectors &, const PriorityVectors &) = default;
    };

    /// Phase 1: place (i, c_i) at the earliest slot whose bid is smaller,
    /// unless i already holds a slot.
    [[nodiscard]] PriorityVectors local_auction (AgentId i, double c_i, const PriorityVectors &prev);

    /// Phase 2: slot-wise maximum over the own and received lists.
    [[nodiscard]] PriorityVectors consensus_update (const PriorityVectors &own,
                                                    std::span<const PriorityVectors> received);

    struct PriorityAssignment
    {
        std::vector<AgentId> order; ///< highest priority first
        std::map<AgentId, std::set<AgentId>> hp_sets;

        [[nodiscard]] static PriorityAssignment from_order (std::vector<AgentId> order);
        /// 1-based rank; 0 when the agent does not participate.
        [[nodiscard]] int rank (AgentId i) const noexcept;
    };

    /// Subtracts id * 1e-9 from bids that collide, until all are distinct.
    [[nodiscard]] std::map<AgentId, double> break_ties (std::map<AgentId, double> bids);

    /// Synchronous CBAA-M network state. Each superstep runs Phase 1 on every
    /// agent, one broadcast round, then Phase 2 on every agent.
    class CbaamNetwork
    {
      public:
        CbaamNetwork (std::map<AgentId, double> bids, Topology topology);

        void superstep ();
        [[nodiscard]] bool agreed () const;
        [[nodiscard]] int supersteps_run () const noexcept { return steps_; }
        [[nodiscard]] const std::map<AgentId, PriorityVectors> &vectors () const noexcept { return vectors_; }

      private:
        std::map<AgentId, double> bids_;
        Topology topology_;
        std::map<AgentId, PriorityVectors> vectors_;
        int steps_ = 0;
    };

    struct CbaamResult
    {
        PriorityAssignment assignment;
        PriorityVectors agreed;
        int agreement_iteration = 0; ///< first superstep after which all lists were identical and complete
        int supersteps = 0;          ///< supersteps executed (N_A * ell)
        int ell = 0;
    };

    /// Runs exactly N_A * max(ell, 1) supersteps. Ties are broken with
    /// break_ties first. Throws std::invalid_argument when the topology is not
    /// strongly connected or does not match the bidders, and std::runtime_error
    /// if the lists did not agree within the bound.
    [[nodiscard]] CbaamResult run_cbaam (const std::map<AgentId, double> &bids, const Topology &topology);

    /// Higher-priority agents that are still before their CR exit and whose
    /// paths conflict with i's inside the CR.
    [[nodiscard]] std::set<AgentId> higher_priority_crossing_set (
        const PriorityAssignment &assignment, AgentId i, const std::map<AgentId, AgentState> &states,
        const std::map<AgentId, RegionBounds> &regions, const std::function<bool (AgentId, AgentId)> &paths_conflict);

} // namespace intersim
