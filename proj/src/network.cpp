#include "intersim/network.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>

namespace intersim
{
    namespace
    {
        // BFS hop counts from `source` following arcs forward; -1 = unreachable.
        std::map<AgentId, int> hops_from (const Topology &t, AgentId source)
        {
            std::map<AgentId, int> dist;
            for (AgentId n : t.nodes ())
                dist[n] = -1;
            dist[source] = 0;
            std::deque<AgentId> frontier{source};
            while (!frontier.empty ())
            {
                const AgentId cur = frontier.front ();
                frontier.pop_front ();
                for (auto it = t.arcs ().lower_bound ({cur, std::numeric_limits<AgentId>::min ()});
                     it != t.arcs ().end () && it->first == cur; ++it)
                {
                    if (dist[it->second] < 0)
                    {
                        dist[it->second] = dist[cur] + 1;
                        frontier.push_back (it->second);
                    }
                }
            }
            return dist;
        }

        void require_node (const Topology &t, AgentId i)
        {
            if (!t.nodes ().contains (i))
                throw std::invalid_argument ("agent " + std::to_string (i) + " is not in the topology");
        }
    } // namespace

    Topology::Topology (std::set<AgentId> nodes, std::set<std::pair<AgentId, AgentId>> arcs)
        : nodes_ (std::move (nodes)), arcs_ (std::move (arcs))
    {
        for (const auto &[from, to] : arcs_)
        {
            if (from == to)
                throw std::invalid_argument ("self-loop on agent " + std::to_string (from));
            if (!nodes_.contains (from) || !nodes_.contains (to))
                throw std::invalid_argument ("arc (" + std::to_string (from) + ", " + std::to_string (to) +
                                             ") references an unknown agent");
        }
    }

    Topology Topology::complete (const std::set<AgentId> &nodes)
    {
        std::set<std::pair<AgentId, AgentId>> arcs;
        for (AgentId a : nodes)
            for (AgentId b : nodes)
                if (a != b)
                    arcs.emplace (a, b);
        return {nodes, std::move (arcs)};
    }

    Topology Topology::ring (const std::set<AgentId> &nodes)
    {
        std::set<std::pair<AgentId, AgentId>> arcs;
        if (nodes.size () >= 2)
        {
            const std::vector<AgentId> order (nodes.begin (), nodes.end ());
            for (std::size_t k = 0; k < order.size (); ++k)
                arcs.emplace (order[k], order[(k + 1) % order.size ()]);
        }
        return {nodes, std::move (arcs)};
    }

    Topology Topology::relay_restricted (const std::set<AgentId> &members) const
    {
        std::set<std::pair<AgentId, AgentId>> arcs;
        for (AgentId src : members)
        {
            if (!nodes_.contains (src))
                throw std::invalid_argument ("agent " + std::to_string (src) + " is not in the topology");
            // flood through non-members only
            std::set<AgentId> seen{src};
            std::deque<AgentId> frontier{src};
            while (!frontier.empty ())
            {
                const AgentId cur = frontier.front ();
                frontier.pop_front ();
                for (auto it = arcs_.lower_bound ({cur, std::numeric_limits<AgentId>::min ()});
                     it != arcs_.end () && it->first == cur; ++it)
                {
                    const AgentId nxt = it->second;
                    if (!seen.insert (nxt).second)
                        continue;
                    if (members.contains (nxt))
                        arcs.emplace (src, nxt);
                    else
                        frontier.push_back (nxt);
                }
            }
        }
        return {members, std::move (arcs)};
    }

    std::set<AgentId> out_neighbors (const Topology &t, AgentId i)
    {
        require_node (t, i);
        std::set<AgentId> out;
        for (const auto &[from, to] : t.arcs ())
            if (from == i)
                out.insert (to);
        return out;
    }

    std::set<AgentId> in_neighbors (const Topology &t, AgentId i)
    {
        require_node (t, i);
        std::set<AgentId> in;
        for (const auto &[from, to] : t.arcs ())
            if (to == i)
                in.insert (from);
        return in;
    }

    bool is_strongly_connected (const Topology &t)
    {
        for (AgentId n : t.nodes ())
        {
            const auto dist = hops_from (t, n);
            if (std::any_of (dist.begin (), dist.end (), [] (const auto &kv) { return kv.second < 0; }))
                return false;
        }
        return true;
    }

    int graph_ell (const Topology &t)
    {
        int ell = 0;
        for (AgentId n : t.nodes ())
        {
            for (const auto &[node, d] : hops_from (t, n))
            {
                if (d < 0)
                    throw std::invalid_argument ("topology is not strongly connected");
                ell = std::max (ell, d);
            }
        }
        return ell;
    }

    double cbaam_time_bound (int n_agents, int ell, const LatencyModel &lat)
    {
        if (n_agents < 1)
            throw std::invalid_argument ("need at least one agent");
        if (!(lat.per_hop_latency_ms > 0.0))
            throw std::invalid_argument ("per-hop latency must be positive");
        // a lone agent still spends one round placing its bid
        return n_agents * std::max (ell, 1) * lat.per_hop_latency_ms;
    }

} // namespace intersim
