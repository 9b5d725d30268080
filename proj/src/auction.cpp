#include "intersim/auction.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace intersim
{
    void validate (const BidParams &p, double v_max)
    {
        if (!(p.alpha1 > 0.0 && p.alpha2 > 0.0 && p.alpha3 > 0.0 && p.alpha4 > 0.0 && p.alpha5 > 0.0))
            throw std::invalid_argument ("bid parameters alpha1..alpha5 must be positive");
        if (!(p.alpha5 > p.alpha1 * v_max + p.alpha2 / p.alpha4))
            throw std::invalid_argument ("alpha5 must exceed alpha1 * v_max + alpha2 / alpha4 so that BSR bids dominate");
        // the else-branch reaches down to alpha5 - alpha3 * alpha4 just before the BSR
        if (!(p.alpha5 > p.alpha3 * p.alpha4))
            throw std::invalid_argument ("alpha5 must exceed alpha3 * alpha4 to keep bids positive");
        if (!(p.emergency_bid > p.alpha5))
            throw std::invalid_argument ("emergency bid must exceed alpha5");
    }

    double compute_bid (double s, double v, double s_bsr_in, const BidParams &p, bool emergency)
    {
        if (emergency)
            return p.emergency_bid;
        const double gap = s_bsr_in - s;
        if (gap > p.alpha4)
            return p.alpha1 * v + p.alpha2 / gap;
        return p.alpha3 * (s - s_bsr_in) + p.alpha5;
    }

    bool PriorityVectors::complete () const noexcept
    {
        return std::none_of (v.begin (), v.end (), [] (AgentId a) { return a == 0; });
    }

    PriorityVectors local_auction (AgentId i, double c_i, const PriorityVectors &prev)
    {
        PriorityVectors next = prev;
        if (std::find (prev.v.begin (), prev.v.end (), i) != prev.v.end ())
            return next;
        for (std::size_t j = 0; j < prev.w.size (); ++j)
        {
            if (c_i > prev.w[j])
            {
                next.v[j] = i;
                next.w[j] = c_i;
                break;
            }
        }
        return next;
    }

    PriorityVectors consensus_update (const PriorityVectors &own, std::span<const PriorityVectors> received)
    {
        PriorityVectors out = own;
        for (const PriorityVectors &other : received)
        {
            if (other.w.size () != own.w.size () || other.v.size () != own.v.size ())
                throw std::invalid_argument ("priority vectors differ in length");
            for (std::size_t j = 0; j < out.w.size (); ++j)
            {
                if (other.w[j] > out.w[j])
                {
                    out.w[j] = other.w[j];
                    out.v[j] = other.v[j];
                }
            }
        }
        return out;
    }

    PriorityAssignment PriorityAssignment::from_order (std::vector<AgentId> order)
    {
        PriorityAssignment a;
        a.order = std::move (order);
        std::set<AgentId> above;
        for (AgentId id : a.order)
        {
            a.hp_sets[id] = above;
            above.insert (id);
        }
        return a;
    }

    int PriorityAssignment::rank (AgentId i) const noexcept
    {
        const auto it = std::find (order.begin (), order.end (), i);
        return it == order.end () ? 0 : static_cast<int> (std::distance (order.begin (), it)) + 1;
    }

    std::map<AgentId, double> break_ties (std::map<AgentId, double> bids)
    {
        for (int round = 0; round < 64; ++round)
        {
            std::map<double, std::vector<AgentId>> by_value;
            for (const auto &[id, bid] : bids)
                by_value[bid].push_back (id);
            bool clash = false;
            for (const auto &[value, ids] : by_value)
            {
                if (ids.size () < 2)
                    continue;
                clash = true;
                for (AgentId id : ids)
                    bids[id] = value - static_cast<double> (id) * 1e-9;
            }
            if (!clash)
                return bids;
        }
        throw std::runtime_error ("could not separate tied bids");
    }

    CbaamNetwork::CbaamNetwork (std::map<AgentId, double> bids, Topology topology)
        : bids_ (std::move (bids)), topology_ (std::move (topology))
    {
        std::set<AgentId> bidders;
        for (const auto &[id, bid] : bids_)
        {
            if (id <= 0)
                throw std::invalid_argument ("agent ids must be positive");
            if (!(bid > 0.0))
                throw std::invalid_argument ("bid of agent " + std::to_string (id) + " must be positive");
            bidders.insert (id);
        }
        if (bidders != topology_.nodes ())
            throw std::invalid_argument ("topology nodes do not match the bidding agents");
        for (AgentId id : bidders)
            vectors_[id] = PriorityVectors::empty (bidders.size ());
    }

    void CbaamNetwork::superstep ()
    {
        std::map<AgentId, PriorityVectors> placed;
        for (const auto &[id, vec] : vectors_)
            placed[id] = local_auction (id, bids_.at (id), vec);

        const auto inbox = broadcast_round (topology_, placed);
        std::vector<PriorityVectors> received;
        for (auto &[id, vec] : vectors_)
        {
            received.clear ();
            for (const auto &[from, msg] : inbox.at (id))
                received.push_back (msg);
            vec = consensus_update (placed.at (id), received);
        }
        ++steps_;
    }

    bool CbaamNetwork::agreed () const
    {
        const PriorityVectors &first = vectors_.begin ()->second;
        if (!first.complete ())
            return false;
        return std::all_of (vectors_.begin (), vectors_.end (), [&] (const auto &kv) { return kv.second == first; });
    }

    CbaamResult run_cbaam (const std::map<AgentId, double> &bids, const Topology &topology)
    {
        if (bids.empty ())
            throw std::invalid_argument ("auction needs at least one bidder");
        if (!is_strongly_connected (topology))
            throw std::invalid_argument ("CBAA-M requires a strongly connected topology");

        CbaamResult res;
        res.ell = graph_ell (topology);
        const int budget = static_cast<int> (bids.size ()) * std::max (res.ell, 1);

        CbaamNetwork net (break_ties (bids), topology);
        for (int k = 0; k < budget; ++k)
        {
            net.superstep ();
            if (res.agreement_iteration == 0 && net.agreed ())
                res.agreement_iteration = net.supersteps_run ();
        }
        if (!net.agreed ())
            throw std::runtime_error ("CBAA-M did not agree within N_A * ell supersteps");

        res.supersteps = net.supersteps_run ();
        res.agreed = net.vectors ().begin ()->second;
        res.assignment = PriorityAssignment::from_order (res.agreed.v);
        return res;
    }

    std::set<AgentId> higher_priority_crossing_set (const PriorityAssignment &assignment, AgentId i,
                                                    const std::map<AgentId, AgentState> &states,
                                                    const std::map<AgentId, RegionBounds> &regions,
                                                    const std::function<bool (AgentId, AgentId)> &paths_conflict)
    {
        std::set<AgentId> out;
        const auto it = assignment.hp_sets.find (i);
        if (it == assignment.hp_sets.end ())
            return out;
        for (AgentId l : it->second)
        {
            if (!(states.at (l).s < regions.at (l).s_cr_out))
                continue;
            if (paths_conflict (i, l))
                out.insert (l);
        }
        return out;
    }

} // namespace intersim
