#pragma once

#include "wentzell/discrete_ops.hpp"

#include <string>

namespace wentzell {

enum class Verdict { Stable, Unstable, Inconclusive };

std::string to_string(Verdict v);

/// Dead band around zero for the linearised spectral abscissa.
inline constexpr double kVerdictBand = 1e-8;

struct StabilityReport {
    /// min of mu over x = 0 and the cell centers.
    double nu = 0.0;
    /// Induced weighted-l1 norm of F'(u*).
    double fprime_norm = 0.0;
    /// nu > ||F'(u*)||: sufficient for local asymptotic stability.
    bool sufficient_condition = false;
    /// Max real part of the spectrum of L + F'(u*).
    double linearized_bound = 0.0;
    Verdict pls_verdict = Verdict::Inconclusive;
    /// Whether L + F'(u*) happened to be Metzler.
    bool linearization_metzler = false;
};

double mortality_inf(const SampledIngredients& si);

/// max_j (sum_i w_i |B_ij|) / w_j: the exact operator norm on weighted l1.
double operator_norm_weighted(const GeneratorMatrix& B);

StabilityReport check_stability(const Discretization& disc, const PopulationState& ustar);

/// Labelled plain text followed by a key=value block.
std::string stability_report(const StabilityReport& r);

} // namespace wentzell
