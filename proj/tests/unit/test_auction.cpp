#include "intersim/auction.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace intersim;

TEST_CASE ("bid function branches")
{
    const BidParams p; // (0.1, 5, 0.1, 1, 7)
    CHECK (compute_bid (48.0, 10.0, 50.0, p, false) == doctest::Approx (3.5));
    CHECK (compute_bid (60.0, 10.0, 50.0, p, false) == doctest::Approx (8.0));
    CHECK (compute_bid (0.0, 3.0, 50.0, p, true) == p.emergency_bid);
    CHECK (compute_bid (60.0, 10.0, 50.0, p, true) == p.emergency_bid);
    // the guard distance alpha4 itself falls in the inside branch
    CHECK (compute_bid (49.0, 10.0, 50.0, p, false) == doctest::Approx (0.1 * -1.0 + 7.0));
}

TEST_CASE ("bid parameter validation")
{
    CHECK_NOTHROW (validate (BidParams{}, 15.0));
    BidParams p;
    p.alpha5 = 6.0; // 0.1 * 15 + 5 / 1 = 6.5
    CHECK_THROWS (validate (p, 15.0));
    p = {};
    p.alpha2 = 0.0;
    CHECK_THROWS (validate (p, 15.0));
}

TEST_CASE ("inside bids dominate outside bids on a grid")
{
    const BidParams p;
    const double v_max = 15.0, s_bsr_in = 100.0;
    double min_inside = 1e300, max_outside = -1e300;
    for (double s = s_bsr_in - 100.0; s <= s_bsr_in + 50.0; s += 0.05)
        for (double v = 0.0; v <= v_max; v += 0.25)
        {
            const double b = compute_bid (s, v, s_bsr_in, p, false);
            if (s >= s_bsr_in)
                min_inside = std::min (min_inside, b);
            else
                max_outside = std::max (max_outside, b);
        }
    CHECK (min_inside > max_outside);
}

TEST_CASE ("local auction placement")
{
    const PriorityVectors e = PriorityVectors::empty (4);
    const PriorityVectors a = local_auction (2, 3.5, e);
    CHECK (a.v[0] == 2);
    CHECK (a.w[0] == 3.5);

    PriorityVectors b = e;
    b.v[0] = 1;
    b.w[0] = 9.0;
    const PriorityVectors c = local_auction (3, 5.0, b);
    CHECK (c.v == std::vector<AgentId>{1, 3, 0, 0});
    CHECK (c.w == std::vector<double>{9.0, 5.0, 0.0, 0.0});

    CHECK (local_auction (3, 100.0, c) == c);

    PriorityVectors full{{1, 2}, {9.0, 8.0}};
    CHECK (local_auction (3, 1.0, full) == full);
}

TEST_CASE ("consensus update takes the slot-wise maximum")
{
    const PriorityVectors own{{1, 0}, {8.0, 0.0}};
    CHECK (consensus_update (own, {}) == own);

    const std::vector<PriorityVectors> rx{PriorityVectors{{2, 1}, {9.0, 3.0}}};
    const PriorityVectors out = consensus_update (own, rx);
    CHECK (out.w == std::vector<double>{9.0, 3.0});
    CHECK (out.v == std::vector<AgentId>{2, 1});
    CHECK (consensus_update (out, rx) == out);
}

TEST_CASE ("tie breaking is deterministic and preserves distinct bids")
{
    const auto out = break_ties ({{1, 5.0}, {2, 5.0}, {3, 4.0}});
    CHECK (out.at (1) == 5.0 - 1e-9);
    CHECK (out.at (2) == 5.0 - 2e-9);
    CHECK (out.at (3) == 4.0);
    CHECK (oracle::sort_oracle (out) == std::vector<AgentId>{1, 2, 3});
}

TEST_CASE ("small networks")
{
    const CbaamResult one = run_cbaam ({{5, 2.0}}, Topology ({5}, {}));
    CHECK (one.assignment.order == std::vector<AgentId>{5});
    CHECK (one.supersteps == 1);

    const CbaamResult three = run_cbaam ({{1, 3.5}, {2, 6.9}, {3, 8.0}}, Topology::complete ({1, 2, 3}));
    CHECK (three.assignment.order == std::vector<AgentId>{3, 2, 1});
    CHECK (three.agreement_iteration <= 3);
    CHECK (three.supersteps == 3);
    CHECK (three.assignment.rank (3) == 1);
    CHECK (three.assignment.rank (1) == 3);
    CHECK (three.assignment.rank (9) == 0);

    std::mt19937_64 rng (99);
    const Topology ring = Topology::ring ({1, 2, 3, 4});
    for (int trial = 0; trial < 100; ++trial)
    {
        const auto bids = oracle::random_distinct_bids (ring.nodes (), rng);
        const CbaamResult r = run_cbaam (bids, ring);
        CHECK (r.assignment.order == oracle::sort_oracle (bids));
        CHECK (r.agreement_iteration <= 12);
        CHECK (r.ell == 3);
    }
}

TEST_CASE ("disconnected topologies are refused")
{
    CHECK_THROWS (run_cbaam ({{1, 1.0}, {2, 2.0}}, Topology ({1, 2}, {{1, 2}})));
    CHECK_THROWS (run_cbaam ({{1, 1.0}, {2, 2.0}}, Topology::complete ({1, 3})));
}

TEST_CASE ("random strongly connected graphs match the sort oracle")
{
    std::mt19937_64 rng (2024);
    for (int n = 2; n <= 8; ++n)
        for (int trial = 0; trial < 50; ++trial)
        {
            const Topology t = oracle::random_strong_digraph (n, rng);
            const auto bids = oracle::random_distinct_bids (t.nodes (), rng);
            const int ell = oracle::diameter (t);
            CbaamNetwork net (bids, t);
            auto prev = net.vectors ();
            int agreed_at = 0;
            for (int k = 1; k <= n * ell; ++k)
            {
                net.superstep ();
                for (const auto &[id, vec] : net.vectors ())
                    for (std::size_t j = 0; j < vec.w.size (); ++j)
                        CHECK (vec.w[j] >= prev.at (id).w[j]);
                if (agreed_at == 0 && net.agreed ())
                    agreed_at = k;
                prev = net.vectors ();
            }
            CHECK (agreed_at > 0);
            // further rounds leave the agreed lists untouched
            net.superstep ();
            CHECK (net.vectors () == prev);

            const auto order = oracle::sort_oracle (bids);
            for (const auto &[id, vec] : net.vectors ())
            {
                CHECK (vec.v == order);
                for (std::size_t j = 1; j < vec.w.size (); ++j)
                    CHECK (vec.w[j - 1] > vec.w[j]);
            }
        }
}

TEST_CASE ("higher-priority sets")
{
    const PriorityAssignment a = PriorityAssignment::from_order ({3, 1, 2});
    CHECK (a.hp_sets.at (3).empty ());
    CHECK (a.hp_sets.at (2) == std::set<AgentId>{3, 1});
    for (const auto &[i, hp] : a.hp_sets)
        for (AgentId j : hp)
            CHECK (a.hp_sets.at (j).count (i) == 0);

    RegionBounds rb;
    rb.s_cr_in = 78.0;
    rb.s_cr_out = 90.0;
    const std::map<AgentId, RegionBounds> regions{{1, rb}, {2, rb}, {3, rb}};
    std::map<AgentId, AgentState> states{{1, {0, 10, 50}}, {2, {0, 10, 40}}, {3, {0, 10, 95}}};
    const auto all_conflict = [] (AgentId, AgentId) { return true; };
    CHECK (higher_priority_crossing_set (a, 3, states, regions, all_conflict).empty ());
    // agent 3 already left its CR
    CHECK (higher_priority_crossing_set (a, 2, states, regions, all_conflict) == std::set<AgentId>{1});
    states[3].s = 60.0;
    CHECK (higher_priority_crossing_set (a, 2, states, regions, all_conflict) == std::set<AgentId>{1, 3});
    const auto only_3 = [] (AgentId x, AgentId y) { return x == 3 || y == 3; };
    CHECK (higher_priority_crossing_set (a, 2, states, regions, only_3) == std::set<AgentId>{3});
}
