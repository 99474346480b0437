#pragma once

#include "wentzell/discrete_ops.hpp"
#include "wentzell/spectral.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wentzell {

struct SteadyOptions {
    /// Target |s(Psi_v)| for points of the level set S.
    double bisection_tol = 1e-9;
    /// Relative distance between successive iterates that ends the fixed-point loop.
    double fp_tol = 1e-9;
    /// Weight of the new iterate in the damped update, in (0, 1].
    double damping = 0.5;
    std::size_t max_fp_iter = 500;
    /// Maximum number of doublings/halvings of alpha while bracketing.
    std::size_t bracket_expand_limit = 60;
    SpectralOptions spectral{};

    void check() const;
};

enum class SteadyStatus { Converged, TrivialOnly, BracketFailure, MaxIter, Unverified };

std::string to_string(SteadyStatus s);

/// Scaling of a unit direction onto the level set s(Psi) = 0.
struct Projection {
    SteadyStatus status = SteadyStatus::Converged;
    double alpha = 0.0;
    SpectralResult spectrum;
    /// Bracket width [lo, hi] after each bisection step.
    std::vector<double> bracket_widths;
    std::size_t spectral_solves = 0;
};

/// Find alpha > 0 with |s(Psi_{alpha w})| <= bisection_tol by doubling or halving
/// alpha until s changes sign, then bisecting. `w` must be nonnegative with
/// total_norm(w) = 1.
Projection project_to_S(const Discretization& disc, const PopulationState& w, const SteadyOptions& opts = {});

struct PhiResult {
    SteadyStatus status = SteadyStatus::Converged;
    /// alpha * eigvec, back on the level set.
    PopulationState next;
    /// Perron data of Psi_v.
    SpectralResult spectrum_at_v;
    Projection projection;
};

/// One application of the fixed-point map: Perron eigenvector of Psi_v,
/// projected along its ray back onto S.
PhiResult phi_map(const Discretization& disc, const PopulationState& v, const SteadyOptions& opts = {});

struct IterateRecord {
    std::size_t iteration;
    /// ||v_{k+1} - v_k|| / ||v_{k+1}||.
    double distance;
    /// |s(Psi_{v_{k+1}})| recomputed at the new iterate.
    double bound_check;
};

struct SteadyStateResult {
    SteadyStatus status = SteadyStatus::MaxIter;
    PopulationState ustar;
    double norm = 0.0;
    /// ||L u* + F(u*)|| in the weighted norm.
    double residual = 0.0;
    std::vector<IterateRecord> iterates;
    std::string message;
};

/// Damped iteration v <- P_S((1 - w) v + w Phi(v)) started from the projection of
/// `initial_direction` (default: uniform state of unit norm).
SteadyStateResult solve_steady(const Discretization& disc,
                               const std::optional<PopulationState>& initial_direction = std::nullopt,
                               const SteadyOptions& opts = {});

/// Independent runs from `starts` random strictly positive unit directions drawn
/// from a generator seeded with `seed`. Results are ordered by start index.
std::vector<SteadyStateResult> solve_steady_multistart(const Discretization& disc, std::size_t starts,
                                                       std::uint64_t seed, const SteadyOptions& opts = {});

/// ||L s + F(s)|| in the weighted norm.
double residual(const Discretization& disc, const PopulationState& s);

/// Plain-text diagnostics block (status, norm, residual, iterations).
std::string steady_report(const SteadyStateResult& r);

} // namespace wentzell
