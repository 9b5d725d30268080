#pragma once
/**
 * @file   network.hpp
 * @brief  Simulated V2V network: static directed topologies, synchronous
 *         lossless broadcast rounds and the per-hop latency bookkeeping.
 */

#include <map>
#include <set>
#include <utility>
#include <vector>

namespace intersim
{
    /// Agents are numbered from 1; 0 marks an empty slot in priority vectors.
    using AgentId = int;

    /// Directed communication graph; arc (i, j) means i transmits to j.
    class Topology
    {
      public:
        Topology () = default;
        /// Throws on self-loops or arcs touching unknown nodes.
        Topology (std::set<AgentId> nodes, std::set<std::pair<AgentId, AgentId>> arcs);

        [[nodiscard]] static Topology complete (const std::set<AgentId> &nodes);
        /// Directed ring in ascending id order, closing from the largest id back to the smallest.
        [[nodiscard]] static Topology ring (const std::set<AgentId> &nodes);

        [[nodiscard]] const std::set<AgentId> &nodes () const noexcept { return nodes_; }
        [[nodiscard]] const std::set<std::pair<AgentId, AgentId>> &arcs () const noexcept { return arcs_; }

        /// Graph seen by @p members when every other node still relays:
        /// i -> j whenever the full graph has a path from i to j whose
        /// interior nodes are all outside @p members.
        [[nodiscard]] Topology relay_restricted (const std::set<AgentId> &members) const;

      private:
        std::set<AgentId> nodes_;
        std::set<std::pair<AgentId, AgentId>> arcs_;
    };

    [[nodiscard]] std::set<AgentId> out_neighbors (const Topology &t, AgentId i);
    [[nodiscard]] std::set<AgentId> in_neighbors (const Topology &t, AgentId i);

    [[nodiscard]] bool is_strongly_connected (const Topology &t);

    /// Longest shortest directed path (in arcs) over all ordered pairs.
    /// Throws std::invalid_argument when the graph is not strongly connected.
    [[nodiscard]] int graph_ell (const Topology &t);

    /// One synchronous, lossless round. Each receiver gets the payloads of its
    /// in-neighbours that sent, ordered by ascending sender id.
    template <class Message>
    [[nodiscard]] std::map<AgentId, std::vector<std::pair<AgentId, Message>>>
    broadcast_round (const Topology &t, const std::map<AgentId, Message> &payloads)
    {
        std::map<AgentId, std::vector<std::pair<AgentId, Message>>> inbox;
        for (AgentId node : t.nodes ())
            inbox[node];
        // arcs are ordered by sender first, so per-receiver lists come out sorted
        for (const auto &[from, to] : t.arcs ())
        {
            if (auto it = payloads.find (from); it != payloads.end ())
                inbox[to].emplace_back (from, it->second);
        }
        return inbox;
    }

    struct LatencyModel
    {
        double per_hop_latency_ms = 3.0;
    };

    /// Worst-case CBAA-M agreement time: n_agents * ell hops.
    [[nodiscard]] double cbaam_time_bound (int n_agents, int ell, const LatencyModel &lat = {});

} // namespace intersim
