#include "wentzell/steady.hpp"

#include "wentzell/error.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <sstream>

namespace wentzell {

void SteadyOptions::check() const
{
    if (!(bisection_tol > 0.0)) throw Error("bisection_tol must be positive");
    if (!(fp_tol > 0.0)) throw Error("fp_tol must be positive");
    if (!(damping > 0.0 && damping <= 1.0)) throw Error("damping must lie in (0, 1]");
    if (max_fp_iter == 0) throw Error("max_fp_iter must be positive");
}

std::string to_string(SteadyStatus s)
{
    switch (s) {
    case SteadyStatus::Converged: return "converged";
    case SteadyStatus::TrivialOnly: return "trivial_only";
    case SteadyStatus::BracketFailure: return "bracket_failure";
    case SteadyStatus::MaxIter: return "max_iter";
    case SteadyStatus::Unverified: return "unverified";
    }
    return "unknown";
}

namespace {

PopulationState normalized(const PopulationState& s, const Grid& g)
{
    const double n = total_norm(s, g);
    if (!(n > 0.0)) throw Error("direction has zero norm");
    return (1.0 / n) * s;
}

} // namespace

Projection project_to_S(const Discretization& disc, const PopulationState& w, const SteadyOptions& opts)
{
    opts.check();
    const Grid& g = disc.grid();
    if (!w.is_nonnegative()) throw Error("project_to_S: direction must be nonnegative");
    if (std::abs(total_norm(w, g) - 1.0) > 1e-12) throw Error("project_to_S: direction must have unit norm");

    Projection p;
    SpectralOptions sopt = opts.spectral;
    auto bound_at = [&](double alpha) {
        auto spec = spectral_bound(disc.fixed_environment(alpha * w), sopt);
        ++p.spectral_solves;
        if (!spec.converged)
            throw NumericError("project_to_S: spectral bound did not converge (residual " +
                               format_double(spec.residual) + ")");
        sopt.start = spec.eigvec.coords();
        return spec;
    };
    auto done = [&](double alpha, SpectralResult spec) {
        p.alpha = alpha;
        p.spectrum = std::move(spec);
        p.status = SteadyStatus::Converged;
        return p;
    };

    double alpha = 1.0;
    SpectralResult spec = bound_at(alpha);
    if (std::abs(spec.bound) <= opts.bisection_tol) return done(alpha, spec);

    double lo = 0.0, hi = 0.0; // s(lo) > 0 > s(hi)
    bool bracketed = false;
    const bool positive = spec.bound > 0.0;
    for (std::size_t k = 0; k < opts.bracket_expand_limit; ++k) {
        const double previous = alpha;
        alpha = positive ? 2.0 * alpha : 0.5 * alpha;
        spec = bound_at(alpha);
        if (std::abs(spec.bound) <= opts.bisection_tol) return done(alpha, spec);
        if ((spec.bound < 0.0) == positive) {
            lo = positive ? previous : alpha;
            hi = positive ? alpha : previous;
            bracketed = true;
            break;
        }
    }
    if (!bracketed) {
        // Growing alpha never made s negative, or shrinking it never made s positive.
        p.status = positive ? SteadyStatus::BracketFailure : SteadyStatus::TrivialOnly;
        p.alpha = alpha;
        p.spectrum = spec;
        return p;
    }

    for (;;) {
        const double mid = 0.5 * (lo + hi);
        spec = bound_at(mid);
        if (std::abs(spec.bound) <= opts.bisection_tol) return done(mid, spec);
        if (spec.bound > 0.0) lo = mid;
        else hi = mid;
        p.bracket_widths.push_back(hi - lo);
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
            p.status = SteadyStatus::BracketFailure;
            p.alpha = mid;
            p.spectrum = spec;
            return p;
        }
    }
}

PhiResult phi_map(const Discretization& disc, const PopulationState& v, const SteadyOptions& opts)
{
    PhiResult r;
    r.spectrum_at_v = spectral_bound(disc.fixed_environment(v), opts.spectral);
    if (!r.spectrum_at_v.converged) throw NumericError("phi_map: spectral bound did not converge");
    // The eigenvector is returned with unit norm, i.e. already on the unit slice.
    r.projection = project_to_S(disc, r.spectrum_at_v.eigvec, opts);
    r.status = r.projection.status;
    r.next = r.projection.alpha * r.spectrum_at_v.eigvec;
    return r;
}

double residual(const Discretization& disc, const PopulationState& s)
{
    const Grid& g = disc.grid();
    PopulationState r = disc.linear().apply(s);
    r += apply_F(disc.ingredients(), s);
    return total_norm(r, g);
}

SteadyStateResult solve_steady(const Discretization& disc, const std::optional<PopulationState>& initial_direction,
                               const SteadyOptions& opts)
{
    opts.check();
    const Grid& g = disc.grid();
    SteadyStateResult result;

    PopulationState direction = initial_direction
                                    ? *initial_direction
                                    : PopulationState::constant(g, 1.0 / (g.m() + 1.0), 1.0 / (g.m() + 1.0));
    if (direction.size() != g.cells()) throw Error("initial direction does not match grid");
    if (!direction.is_nonnegative()) throw Error("initial direction must be nonnegative");
    direction = normalized(direction, g);

    auto fail = [&](SteadyStatus status, const PopulationState& last, std::string msg) {
        result.status = status;
        result.ustar = last;
        result.norm = total_norm(last, g);
        result.residual = residual(disc, last);
        result.message = std::move(msg);
        return result;
    };

    Projection p = project_to_S(disc, direction, opts);
    if (p.status == SteadyStatus::TrivialOnly)
        return fail(p.status, PopulationState::zero(g), "trivial steady state only");
    if (p.status != SteadyStatus::Converged)
        return fail(p.status, p.alpha * direction, "could not bracket the level set on the initial ray");

    PopulationState v = p.alpha * direction;
    bool settled = false;
    for (std::size_t k = 1; k <= opts.max_fp_iter; ++k) {
        const PhiResult phi = phi_map(disc, v, opts);
        if (phi.status != SteadyStatus::Converged)
            return fail(phi.status, v, "projection of the Perron eigenvector failed");

        const PopulationState mix = (1.0 - opts.damping) * v + opts.damping * phi.next;
        direction = normalized(mix, g);
        p = project_to_S(disc, direction, opts);
        if (p.status != SteadyStatus::Converged)
            return fail(p.status, v, "projection of the damped iterate failed");

        const PopulationState next = p.alpha * direction;
        const double distance = total_norm(next - v, g) / total_norm(next, g);
        result.iterates.push_back({k, distance, std::abs(p.spectrum.bound)});
        v = next;
        if (distance <= opts.fp_tol) {
            settled = true;
            break;
        }
    }

    if (!settled) return fail(SteadyStatus::MaxIter, v, "fixed-point iteration did not settle");

    // Report Phi(v): its environment matches v to fp_tol and it is an exact
    // Perron vector, so the residual does not pick up the stiff part of L.
    const PhiResult last = phi_map(disc, v, opts);
    if (last.status != SteadyStatus::Converged) return fail(last.status, v, "final projection failed");
    result.ustar = last.next;
    result.norm = total_norm(result.ustar, g);
    result.residual = residual(disc, result.ustar);
    const bool small = result.residual <= 1e-7 * result.norm;
    const bool positive = result.ustar.min_entry() > 0.0;
    if (small && positive) {
        result.status = SteadyStatus::Converged;
    } else {
        result.status = SteadyStatus::Unverified;
        result.message = small ? "steady state is not strictly positive" : "residual above 1e-7 * norm";
    }
    return result;
}

std::vector<SteadyStateResult> solve_steady_multistart(const Discretization& disc, std::size_t starts,
                                                       std::uint64_t seed, const SteadyOptions& opts)
{
    const Grid& g = disc.grid();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.05, 1.0);
    std::vector<PopulationState> directions;
    directions.reserve(starts);
    for (std::size_t k = 0; k < starts; ++k) {
        PopulationState d = PopulationState::zero(g);
        d.u0 = dist(rng);
        for (double& x : d.u) x = dist(rng);
        directions.push_back(normalized(d, g));
    }

    std::vector<std::future<SteadyStateResult>> jobs;
    jobs.reserve(starts);
    for (const auto& d : directions)
        jobs.push_back(std::async(std::launch::async, [&disc, d, &opts] { return solve_steady(disc, d, opts); }));

    std::vector<SteadyStateResult> out;
    out.reserve(starts);
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

std::string steady_report(const SteadyStateResult& r)
{
    std::ostringstream os;
    os << "status = " << to_string(r.status) << '\n';
    os << "norm = " << format_double(r.norm) << '\n';
    os << "residual = " << format_double(r.residual) << '\n';
    os << "iterations = " << r.iterates.size() << '\n';
    if (!r.iterates.empty()) os << "last_distance = " << format_double(r.iterates.back().distance) << '\n';
    if (!r.message.empty()) os << "message = " << r.message << '\n';
    return os.str();
}

} // namespace wentzell
