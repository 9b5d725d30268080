#include "intersim/agent_dynamics.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>

using namespace intersim;

namespace
{
    Eigen::Matrix3d continuous_A (double T_ax)
    {
        Eigen::Matrix3d A = Eigen::Matrix3d::Zero ();
        A (0, 0) = -1.0 / T_ax;
        A (1, 0) = 1.0;
        A (2, 1) = 1.0;
        return A;
    }
} // namespace

TEST_CASE ("zero hold time gives the identity")
{
    const DiscreteModel m = discretize (0.3, 0.0);
    CHECK (m.A_d.isApprox (Eigen::Matrix3d::Identity (), 0.0));
    CHECK (m.B_d.norm () == 0.0);
}

TEST_CASE ("nominal sampling values match exp(-1/3) and both oracles")
{
    const DiscreteModel m = discretize (0.3, 0.1);
    CHECK (std::abs (m.A_d (0, 0) - std::exp (-1.0 / 3.0)) <= 1e-9);
    CHECK (m.A_d (0, 0) == doctest::Approx (0.716531).epsilon (1e-6));

    const Eigen::Matrix3d expm = (continuous_A (0.3) * 0.1).exp ();
    CHECK ((m.A_d - expm).cwiseAbs ().maxCoeff () <= 1e-9);

    const oracle::Zoh o = oracle::zoh_series (0.3, 0.1);
    CHECK ((m.A_d - o.A_d).cwiseAbs ().maxCoeff () <= 1e-9);
    CHECK ((m.B_d - o.B_d).cwiseAbs ().maxCoeff () <= 1e-9);
    CHECK (m.A_d (0, 0) + m.B_d (0) == doctest::Approx (1.0));
}

TEST_CASE ("series oracle agreement for random lags and sample times")
{
    std::mt19937_64 rng (11);
    std::uniform_real_distribution<double> tax (0.05, 2.0), ts (0.0, 0.5);
    for (int n = 0; n < 100; ++n)
    {
        const double T_ax = tax (rng), T_s = ts (rng);
        const DiscreteModel m = discretize (T_ax, T_s);
        const oracle::Zoh o = oracle::zoh_series (T_ax, T_s);
        CHECK ((m.A_d - o.A_d).cwiseAbs ().maxCoeff () <= 1e-9);
        CHECK ((m.B_d - o.B_d).cwiseAbs ().maxCoeff () <= 1e-9);
    }
}

TEST_CASE ("non-positive lag is rejected")
{
    CHECK_THROWS (discretize (0.0, 0.1));
    CHECK_THROWS (discretize (-1.0, 0.1));
    CHECK_THROWS (discretize (0.3, -0.1));
}

TEST_CASE ("single steps")
{
    const DiscreteModel m = discretize (0.3, 0.1);
    CHECK (step (m, {0, 0, 0}, 0.0) == AgentState{0, 0, 0});
    const AgentState x = step (m, {0, 14, 0}, 0.0);
    CHECK (x.s == doctest::Approx (1.4));
    CHECK (x.v == doctest::Approx (14.0));
    CHECK (x.a_x == 0.0);

    AgentState y{};
    for (int k = 0; k < 100; ++k)
        y = step (m, y, 1.0);
    CHECK (std::abs (y.a_x - 1.0) < 1e-6);
}

TEST_CASE ("rollout composition")
{
    const DiscreteModel m = discretize (0.3, 0.1);
    const AgentState x0{0.2, 3.0, 1.0};
    CHECK (rollout (m, x0, {}).size () == 1);

    std::vector<double> zero (20, 0.0);
    const auto coast = rollout (m, AgentState{0, 5.0, 0}, zero);
    for (std::size_t j = 0; j < coast.size (); ++j)
        CHECK (coast[j].s == doctest::Approx (5.0 * 0.1 * double (j)));

    std::vector<double> u{1.0, -2.0, 0.5, 4.0, -7.0};
    const auto traj = rollout (m, x0, u);
    REQUIRE (traj.size () == u.size () + 1);
    AgentState x = x0;
    for (std::size_t j = 0; j < u.size (); ++j)
    {
        x = step (m, x, u[j]);
        CHECK (traj[j + 1] == x);
    }
}

TEST_CASE ("semigroup, linearity and eigenvalues")
{
    std::mt19937_64 rng (3);
    std::uniform_real_distribution<double> tax (0.1, 1.0), ts (0.01, 0.3), val (-5.0, 5.0);
    for (int n = 0; n < 50; ++n)
    {
        const double T_ax = tax (rng), T_s = ts (rng);
        const DiscreteModel m = discretize (T_ax, T_s);
        const int k = 7;
        const DiscreteModel big = discretize (T_ax, k * T_s);
        Eigen::Matrix3d Ak = Eigen::Matrix3d::Identity ();
        for (int i = 0; i < k; ++i)
            Ak = m.A_d * Ak;
        CHECK ((Ak - big.A_d).cwiseAbs ().maxCoeff () <= 1e-9);

        // a constant input held over k steps equals one long hold
        const double u = val (rng);
        AgentState x{val (rng), val (rng), val (rng)};
        const AgentState once = step (big, x, u);
        for (int i = 0; i < k; ++i)
            x = step (m, x, u);
        CHECK ((x.vec () - once.vec ()).cwiseAbs ().maxCoeff () <= 1e-9);

        const AgentState x1{val (rng), val (rng), val (rng)}, x2{val (rng), val (rng), val (rng)};
        const double u1 = val (rng), u2 = val (rng);
        const Eigen::Vector3d lhs = step (m, AgentState::from (x1.vec () + x2.vec ()), u1 + u2).vec ();
        const Eigen::Vector3d rhs = step (m, x1, u1).vec () + step (m, x2, u2).vec () - step (m, {}, 0.0).vec ();
        CHECK ((lhs - rhs).cwiseAbs ().maxCoeff () <= 1e-12);

        // characteristic polynomial det(lambda I - A_d) vanishes at each expected eigenvalue
        for (double lambda : {std::exp (-T_s / T_ax), 1.0})
            CHECK (std::abs ((lambda * Eigen::Matrix3d::Identity () - m.A_d).determinant ()) <= 1e-9);
    }
}

TEST_CASE ("parameter validation")
{
    CHECK_NOTHROW (validate (AgentParams{}));
    AgentParams p;
    p.a_x_min = 1.0;
    CHECK_THROWS (validate (p));
    p = {};
    p.a_tot_max = 3.0;
    CHECK_THROWS (validate (p));
    p = {};
    p.r = 0.0;
    CHECK_THROWS (validate (p));
}
