#include "support.hpp"

#include "wentzell/discrete_ops.hpp"
#include "wentzell/error.hpp"
#include "wentzell/stability.hpp"

#include <doctest.h>

#include <algorithm>
#include <sstream>

using namespace wentzell;
using namespace wentzell::testing;

namespace {

Ingredients unit_interval()
{
    Ingredients in;
    in.m = 1.0;
    in.gamma = "0";
    in.d = "1";
    return in;
}

} // namespace

TEST_CASE("transport: hand-assembled 3x3 with pure diffusion")
{
    const auto vm = unit_interval().model();
    const SampledIngredients si(vm, Grid(1.0, 2));
    const GeneratorMatrix A = assemble_transport(si);
    REQUIRE(A.dim() == 3);
    // h = 0.5: boundary coupling d/(h/2) = 4, interior d/h = 2, divided by h in bulk rows.
    CHECK(A(0, 0) == -4.0);
    CHECK(A(0, 1) == 4.0);
    CHECK(A(0, 2) == 0.0);
    CHECK(A(1, 0) == 8.0);
    CHECK(A(1, 1) == -12.0);
    CHECK(A(1, 2) == 4.0);
    CHECK(A(2, 0) == 0.0);
    CHECK(A(2, 1) == 4.0);
    CHECK(A(2, 2) == -4.0);
    CHECK(A.metzler());
    CHECK(A.conservative());
    for (int j = 0; j < 3; ++j) CHECK(A.weighted_column_sums()(j) == 0.0);
}

TEST_CASE("transport: pure diffusion is self-adjoint in the weighted pairing")
{
    const auto vm = unit_interval().model();
    const SampledIngredients si(vm, Grid(1.0, 4));
    const Eigen::MatrixXd A = assemble_transport(si).values();
    const Eigen::MatrixXd W = Grid(1.0, 4).weights().asDiagonal();
    CHECK(((W * A) - (W * A).transpose()).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("transport: Metzler and conservative for random ingredients, upwinding by drift sign")
{
    std::mt19937_64 rng(11);
    for (int k = 0; k < 20; ++k) {
        const auto vm = random_ingredients(rng).model();
        const GeneratorMatrix A = assemble_transport(SampledIngredients(vm, Grid(vm.m(), 17)));
        CHECK(A.metzler());
        CHECK(A.conservative());
        CHECK(A.values().cwiseAbs().maxCoeff() > 0.0);
    }
    Ingredients in = unit_interval();
    in.gamma = "2";
    in.d = "0.5";
    const GeneratorMatrix A = assemble_transport(SampledIngredients(in.model(), Grid(1.0, 2)));
    // Positive drift takes u0 into cell 1 at rate gamma(0) + d/(h/2) = 2 + 2.
    CHECK(A(0, 0) == -4.0);
    CHECK(A(0, 1) == 2.0);
    // No flux at x = m: the last column loses only to its left neighbour.
    CHECK(A(2, 2) == doctest::Approx(-2.0));
}

TEST_CASE("mortality")
{
    Ingredients in = unit_interval();
    in.mu = "0";
    CHECK(assemble_mortality(SampledIngredients(in.model(), Grid(1.0, 2))).values().isZero());
    in.mu = "0.5";
    const GeneratorMatrix half = assemble_mortality(SampledIngredients(in.model(), Grid(1.0, 3)));
    CHECK(half.values().isApprox(-0.5 * Eigen::MatrixXd::Identity(4, 4)));
    CHECK(half.metzler());
    CHECK_FALSE(half.conservative());
    in.mu = "x";
    const GeneratorMatrix lin = assemble_mortality(SampledIngredients(in.model(), Grid(1.0, 2)));
    CHECK(lin(0, 0) == 0.0);
    CHECK(lin(1, 1) == -0.25);
    CHECK(lin(2, 2) == -0.75);
}

TEST_CASE("recruitment matrix")
{
    Ingredients in = unit_interval();
    in.beta0 = "1";
    in.beta1 = "1";
    in.beta2 = "1";
    in.b0 = "1";
    in.b2 = "1";
    const SampledIngredients si(in.model(), Grid(1.0, 2));
    std::mt19937_64 rng(12);
    for (int k = 0; k < 3; ++k) {
        const GeneratorMatrix K = assemble_recruitment(si, random_state(rng, si.grid(), 0.1, 1.0));
        CHECK(K(0, 0) == 1.0);
        CHECK(K(0, 1) == 0.5);
        CHECK(K(0, 2) == 0.5);
        for (int i = 1; i < 3; ++i) {
            CHECK(K(i, 0) == 0.0);
            CHECK(K(i, 1) == 0.5);
            CHECK(K(i, 2) == 0.5);
        }
    }
    CHECK_THROWS_AS(assemble_recruitment(si, PopulationState::zero(si.grid())), Error);

    Ingredients none = unit_interval();
    none.beta0 = none.b0 = "0";
    const SampledIngredients z(none.model(), Grid(1.0, 3));
    CHECK(assemble_recruitment(z, PopulationState::constant(z.grid(), 1, 1)).values().isZero());
}

TEST_CASE("F: zero, constant ingredients, homogeneity and positivity")
{
    Ingredients in = unit_interval();
    in.beta0 = "1";
    in.beta1 = "1";
    in.beta2 = "1";
    in.b0 = "1";
    in.b2 = "1";
    const SampledIngredients si(in.model(), Grid(1.0, 8));
    const Grid& g = si.grid();
    CHECK(apply_F(si, PopulationState::zero(g)).is_zero());

    const PopulationState F = apply_F(si, PopulationState::constant(g, 0.0, 1.0));
    CHECK(F.u0 == doctest::Approx(1.0));
    for (double v : F.u) CHECK(v == doctest::Approx(1.0));

    std::mt19937_64 rng(13);
    Ingredients hom;
    hom.beta0 = "2";
    hom.b0 = "0.7";
    hom.beta2 = "1 - 0.5*x";
    hom.b2 = "0.5 + x^2";
    const SampledIngredients sh(hom.model(), Grid(hom.m, 12));
    for (int k = 0; k < 10; ++k) {
        const PopulationState s = random_state(rng, sh.grid());
        const PopulationState a = apply_F(sh, 3.7 * s);
        const PopulationState b = 3.7 * apply_F(sh, s);
        CHECK(total_norm(a - b, sh.grid()) <= 1e-13 * total_norm(b, sh.grid()));
        CHECK(a.is_nonnegative());
    }
}

TEST_CASE("Gateaux derivative at zero")
{
    Ingredients van = unit_interval();
    van.beta0 = "x/(1+x)";
    van.b0 = "x";
    const SampledIngredients sv(van.model(), Grid(1.0, 6));
    CHECK(gateaux_at_zero(sv, PopulationState::constant(sv.grid(), 1, 1)).is_zero());

    Ingredients cst;
    cst.beta0 = "1.5";
    cst.b0 = "0.4";
    cst.beta2 = "1 - 0.3*x";
    const SampledIngredients sc(cst.model(), Grid(cst.m, 10));
    std::mt19937_64 rng(14);
    const PopulationState v = random_state(rng, sc.grid(), 0.1, 1.0);
    const PopulationState d = gateaux_at_zero(sc, v);
    const PopulationState f = apply_F(sc, v);
    CHECK(total_norm(d - f, sc.grid()) <= 1e-14 * total_norm(f, sc.grid()));
    CHECK_THROWS(gateaux_at_zero(sc, PopulationState::zero(sc.grid())));

    // Generic: error decreases as t -> 0.
    const auto vm = random_ingredients(rng).model();
    const SampledIngredients sg(vm, Grid(vm.m(), 16));
    const PopulationState w = random_state(rng, sg.grid(), 0.1, 1.0);
    const PopulationState dw = gateaux_at_zero(sg, w);
    double prev = INFINITY;
    for (double t : {1e-2, 1e-4, 1e-6}) {
        const double e = total_norm((1.0 / t) * apply_F(sg, t * w) - dw, sg.grid());
        CHECK(e < prev);
        prev = e;
    }
}

TEST_CASE("linearization: equals K for constant coefficients; directional check")
{
    Ingredients cst;
    cst.beta0 = "1.5";
    cst.b0 = "0.4";
    const SampledIngredients sc(cst.model(), Grid(cst.m, 10));
    std::mt19937_64 rng(15);
    const PopulationState u = random_state(rng, sc.grid(), 0.1, 1.0);
    const GeneratorMatrix J = assemble_linearization(sc, u);
    CHECK(J.values() == assemble_recruitment(sc, u).values());
    CHECK(J.apply(PopulationState::zero(sc.grid())).is_zero());
    CHECK_THROWS(assemble_linearization(sc, PopulationState::zero(sc.grid())));

    // Non-constant everything: directional derivative against apply_F.
    const auto vm = random_ingredients(rng).model();
    const SampledIngredients si(vm, Grid(vm.m(), 20));
    const Grid& g = si.grid();
    const PopulationState us = random_state(rng, g, 0.5, 1.0);
    const GeneratorMatrix L = assemble_linearization(si, us);
    const PopulationState F0 = apply_F(si, us);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int k = 0; k < 5; ++k) {
        PopulationState z = random_state(rng, g, -1.0, 1.0);
        z = total_norm(us, g) * unit(z, g);
        const PopulationState Jz = L.apply(z);
        std::vector<double> errs;
        for (double eps : {1e-3, 1e-4, 1e-5})
            errs.push_back(total_norm(apply_F(si, us + eps * z) - F0 - eps * Jz, g) / eps);
        CHECK(errs[0] / errs[1] > 8.0);
        CHECK(errs[1] / errs[2] > 8.0);
    }
}

TEST_CASE("F is locally Lipschitz on a norm ball")
{
    std::mt19937_64 rng(16);
    const auto vm = random_ingredients(rng).model();
    const SampledIngredients si(vm, Grid(vm.m(), 24));
    const Grid& g = si.grid();
    // L = sup of ||F'(u)|| over sampled points of the ball (mean-value bound).
    double L = 0.0;
    for (int k = 0; k < 100; ++k)
        L = std::max(L, operator_norm_weighted(assemble_linearization(si, random_state(rng, g, 0.0, 2.0))));
    REQUIRE(std::isfinite(L));
    for (int k = 0; k < 200; ++k) {
        const PopulationState a = random_state(rng, g, 0.0, 2.0);
        const PopulationState b = random_state(rng, g, 0.0, 2.0);
        CHECK(total_norm(apply_F(si, a) - apply_F(si, b), g) <= 1.01 * L * total_norm(a - b, g));
    }
}

TEST_CASE("fixed-environment operator and matrix dump")
{
    const auto vm = Ingredients{}.model();
    const Discretization disc(vm, Grid(vm.m(), 5));
    const PopulationState v = PopulationState::constant(disc.grid(), 1.0, 1.0);
    const GeneratorMatrix psi = disc.fixed_environment(v);
    CHECK(psi.metzler());
    CHECK(psi.values().isApprox(
        (disc.transport() + disc.mortality() + assemble_recruitment(disc.ingredients(), v)).values()));
    CHECK(disc.linear().values() == (disc.transport() + disc.mortality()).values());

    std::ostringstream os;
    write_matrix_csv(os, disc.transport());
    const std::string text = os.str();
    CHECK(text.rfind("row,boundary,1,", 0) == 0);
    CHECK(text.find("\nboundary,") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 7);
}
