#pragma once

// Shared fixtures for the unit and acceptance tests.

#include "wentzell/discrete_ops.hpp"
#include "wentzell/grid.hpp"
#include "wentzell/model.hpp"

#include <cstdio>
#include <random>
#include <string>

namespace wentzell::testing {

inline std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Ingredients {
    double m = 10.0;
    std::string beta0 = "3/(1+x)";
    std::string beta1 = "1";
    std::string beta2 = "1";
    std::string b0 = "0.5/(1+x)";
    std::string b2 = "1";
    std::string mu = "1";
    std::string gamma = "0.5";
    std::string d = "0.2";

    std::string config() const
    {
        return "m = " + num(m) + "\nbeta0 = " + beta0 + "\nbeta1 = " + beta1 + "\nbeta2 = " + beta2 +
               "\nb0 = " + b0 + "\nb2 = " + b2 + "\nmu = " + mu + "\ngamma = " + gamma + "\nd = " + d + "\n";
    }
    ValidatedModel model() const { return validate(load_config(config())); }
};

/// Recruitment-free ingredients with constant mortality.
inline Ingredients no_recruitment(double mu)
{
    Ingredients in;
    in.beta0 = "0";
    in.b0 = "0";
    in.mu = num(mu);
    return in;
}

/// A random admissible draw: smooth positive kernel, decreasing fertility,
/// mortality bounded below, signed drift, diffusion bounded below.
inline Ingredients random_ingredients(std::mt19937_64& rng, double m_max = 5.0)
{
    std::uniform_real_distribution<double> U(0.0, 1.0);
    Ingredients in;
    in.m = 1.0 + (m_max - 1.0) * U(rng);
    in.beta0 = num(0.5 + 4.0 * U(rng)) + "/(1+" + num(0.2 + U(rng)) + "*x)";
    in.beta1 = num(0.2 + U(rng)) + "*exp(-" + num(U(rng)) + "*(x-y)^2) + " + num(0.1 * U(rng));
    in.beta2 = "1 - " + num(0.5 * U(rng)) + "*x";
    in.b0 = num(0.1 + U(rng)) + "*exp(-" + num(0.1 + U(rng)) + "*x)";
    in.b2 = num(0.5 + 0.5 * U(rng)) + " + " + num(0.3 * U(rng)) + "*x^2";
    in.mu = num(0.2 + U(rng)) + " + " + num(0.2 * U(rng)) + "*sin(x)";
    in.gamma = num(-1.0 + 2.0 * U(rng)) + "*cos(" + num(U(rng)) + "*x)";
    in.d = num(0.2 + 0.8 * U(rng)) + " + " + num(0.1 * U(rng)) + "*x";
    return in;
}

inline PopulationState random_state(std::mt19937_64& rng, const Grid& g, double lo = 0.0, double hi = 1.0)
{
    std::uniform_real_distribution<double> U(lo, hi);
    PopulationState s = PopulationState::zero(g);
    s.u0 = U(rng);
    for (double& x : s.u) x = U(rng);
    return s;
}

inline PopulationState unit(const PopulationState& s, const Grid& g) { return (1.0 / total_norm(s, g)) * s; }

} // namespace wentzell::testing
