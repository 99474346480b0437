#include "support.hpp"

#include "wentzell/error.hpp"
#include "wentzell/evolve.hpp"
#include "wentzell/steady.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace wentzell;
using namespace wentzell::testing;

TEST_CASE("tridiagonal solver")
{
    const std::vector<double> sub{0.0, -1.0, -1.0}, diag{2.0, 2.0, 2.0}, sup{-1.0, -1.0, 0.0};
    const std::vector<double> x = solve_tridiagonal(sub, diag, sup, std::vector<double>{1.0, 0.0, 1.0});
    for (double v : x) CHECK(v == doctest::Approx(1.0));
    CHECK(solve_tridiagonal(std::vector<double>{0.0}, std::vector<double>{4.0}, std::vector<double>{0.0},
                            std::vector<double>{2.0})[0] == 0.5);
    CHECK_THROWS_AS(solve_tridiagonal(sub, std::vector<double>{0.0, 2.0, 2.0}, sup, diag), NumericError);
}

TEST_CASE("recruitment- and mortality-free dynamics conserve mass")
{
    std::mt19937_64 rng(31);
    for (int k = 0; k < 5; ++k) {
        Ingredients in = random_ingredients(rng);
        in.beta0 = in.b0 = "0";
        in.mu = "0";
        const auto vm = in.model();
        const Discretization disc(vm, Grid(vm.m(), 40));
        const PopulationState s0 = random_state(rng, disc.grid());
        const double U0 = total_norm(s0, disc.grid());
        const Trajectory tr = simulate(disc, s0, 5.0, 0.05);
        for (double U : tr.norms) CHECK(std::abs(U - U0) <= 1e-12 * U0);
    }
}

TEST_CASE("IMEX stays nonnegative for large steps")
{
    std::mt19937_64 rng(32);
    const auto vm = random_ingredients(rng).model();
    const Discretization disc(vm, Grid(vm.m(), 30));
    PopulationState s = random_state(rng, disc.grid());
    s.u[3] = 0.0;
    s.u0 = 0.0;
    const ImexStepper big(disc, 10.0);
    for (int k = 0; k < 20; ++k) {
        s = big.step(s);
        CHECK(s.is_nonnegative());
    }
}

TEST_CASE("pure decay matches the exponential within first-order error")
{
    const auto vm = no_recruitment(1.0).model();
    const Discretization disc(vm, Grid(vm.m(), 20));
    const PopulationState s0 = PopulationState::constant(disc.grid(), 0.5, 0.1);
    const double U0 = total_norm(s0, disc.grid());
    const double dt = 1e-3;
    const Trajectory tr = simulate(disc, s0, 2.0, dt);
    for (std::size_t k = 0; k < tr.times.size(); k += 100) {
        const double t = tr.times[k];
        CHECK(std::abs(tr.norms[k] - U0 * std::exp(-t)) <= 2.0 * dt * t * U0);
    }
    CHECK(tr.times.back() == 2.0);
}

TEST_CASE("zero initial state stays zero and is flagged extinct")
{
    const auto vm = Ingredients{}.model();
    const Discretization disc(vm, Grid(vm.m(), 10));
    const Trajectory tr = simulate(disc, PopulationState::zero(disc.grid()), 1.0, 0.1);
    CHECK(tr.final_state.is_zero());
    CHECK(tr.end == TrajectoryEnd::Extinct);
}

TEST_CASE("blow-up and extinction guards")
{
    Ingredients grow;
    grow.beta0 = "50";
    grow.b0 = "1";
    grow.mu = "0.01";
    const auto vg = grow.model();
    const Discretization dg(vg, Grid(vg.m(), 10));
    const Trajectory up = simulate(dg, PopulationState::constant(dg.grid(), 1, 1), 100.0, 0.01);
    CHECK(up.end == TrajectoryEnd::BlowUp);
    CHECK(up.norms.back() > kBlowUpNorm);
    CHECK(up.times.back() < 100.0);

    const auto vd = no_recruitment(5.0).model();
    const Discretization dd(vd, Grid(vd.m(), 10));
    const Trajectory down = simulate(dd, PopulationState::constant(dd.grid(), 1, 1), 20.0, 0.01);
    CHECK(down.end == TrajectoryEnd::Extinct);
    CHECK(down.norms.back() < kExtinctionNorm);
}

TEST_CASE("a computed steady state is stationary under the stepper")
{
    const auto vm = Ingredients{}.model();
    const Discretization disc(vm, Grid(vm.m(), 48));
    SteadyOptions o;
    o.fp_tol = 1e-12;
    o.bisection_tol = 1e-12;
    o.spectral.tol = 1e-13;
    const SteadyStateResult r = solve_steady(disc, std::nullopt, o);
    REQUIRE(r.status == SteadyStatus::Converged);
    const Trajectory tr = simulate(disc, r.ustar, 1.0, 0.01);
    CHECK(total_norm(tr.final_state - r.ustar, disc.grid()) <= 1e-6 * r.norm);
}

TEST_CASE("first order in time")
{
    std::mt19937_64 rng(33);
    const auto vm = random_ingredients(rng).model();
    const Discretization disc(vm, Grid(vm.m(), 24));
    const PopulationState s0 = random_state(rng, disc.grid(), 0.5, 1.5);
    const double T = 1.0, dt = 0.02;
    const PopulationState ref = simulate(disc, s0, T, dt / 16).final_state;
    const double e1 = total_norm(simulate(disc, s0, T, dt).final_state - ref, disc.grid());
    const double e2 = total_norm(simulate(disc, s0, T, dt / 2).final_state - ref, disc.grid());
    // Against a dt/16 reference the halving ratio is (1 - 1/16)/(1/2 - 1/16) ~ 2.14.
    const double order = std::log2(e1 / e2);
    CHECK(order >= 0.8);
    CHECK(order <= 1.2);
}

TEST_CASE("trajectory bookkeeping and CSV")
{
    const auto vm = Ingredients{}.model();
    const Discretization disc(vm, Grid(vm.m(), 10));
    const Trajectory tr = simulate(disc, PopulationState::constant(disc.grid(), 1, 0.1), 1.05, 0.1, 5);
    REQUIRE(tr.times.size() == 12);
    for (std::size_t k = 1; k < tr.times.size(); ++k) CHECK(tr.times[k] > tr.times[k - 1]);
    CHECK(tr.times.back() == 1.05);
    CHECK(tr.end == TrajectoryEnd::Completed);
    REQUIRE(tr.snapshots.size() == 3);
    CHECK(tr.snapshots[0].t == 0.0);
    CHECK(tr.snapshots[1].t == doctest::Approx(0.5));

    std::ostringstream os;
    write_trajectory_csv(os, tr);
    const std::string text = os.str();
    CHECK(text.rfind("t,U,u0\n0,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 13);

    CHECK_THROWS_AS(simulate(disc, PopulationState::zero(disc.grid()), 1.0, 0.0), NumericError);
    CHECK_THROWS_AS(simulate(disc, PopulationState::zero(disc.grid()), -1.0, 0.1), NumericError);
}
