#include "wentzell/stability.hpp"

#include "wentzell/error.hpp"
#include "wentzell/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wentzell {

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::Stable: return "stable";
    case Verdict::Unstable: return "unstable";
    case Verdict::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

double mortality_inf(const SampledIngredients& si)
{
    double nu = si.mu_boundary();
    for (double m : si.mu()) nu = std::min(nu, m);
    return nu;
}

double operator_norm_weighted(const GeneratorMatrix& B)
{
    const auto& a = B.values();
    const auto& w = B.weights();
    double norm = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        double col = 0.0;
        for (Eigen::Index i = 0; i < a.rows(); ++i) col += w(i) * std::abs(a(i, j));
        norm = std::max(norm, col / w(j));
    }
    return norm;
}

StabilityReport check_stability(const Discretization& disc, const PopulationState& ustar)
{
    const auto& si = disc.ingredients();
    const GeneratorMatrix fprime = assemble_linearization(si, ustar);

    StabilityReport r;
    r.nu = mortality_inf(si);
    r.fprime_norm = operator_norm_weighted(fprime);
    r.sufficient_condition = r.nu > r.fprime_norm;

    const GeneratorMatrix J = disc.linear() + fprime;
    r.linearization_metzler = J.metzler();
    if (J.dim() <= kDenseSpectrumLimit) {
        r.linearized_bound = dense_spectrum(J).front().real();
    } else if (J.metzler() && check_irreducible(J)) {
        const auto spec = spectral_bound(J);
        if (!spec.converged) throw NumericError("check_stability: spectral bound did not converge");
        r.linearized_bound = spec.bound;
    } else {
        throw NumericError("check_stability: linearisation too large for the dense eigensolver and not Metzler");
    }

    if (r.linearized_bound < -kVerdictBand) r.pls_verdict = Verdict::Stable;
    else if (r.linearized_bound > kVerdictBand) r.pls_verdict = Verdict::Unstable;
    else r.pls_verdict = Verdict::Inconclusive;
    return r;
}

std::string stability_report(const StabilityReport& r)
{
    std::ostringstream os;
    os << "Stability of the non-trivial steady state\n";
    os << "  mortality infimum nu          : " << format_double(r.nu) << '\n';
    os << "  linearisation norm ||F'||     : " << format_double(r.fprime_norm) << '\n';
    os << "  nu > ||F'|| (sufficient)      : " << (r.sufficient_condition ? "yes" : "no") << '\n';
    os << "  max Re spectrum of L + F'     : " << format_double(r.linearized_bound) << '\n';
    os << "  linearised stability verdict  : " << to_string(r.pls_verdict) << '\n';
    os << '\n';
    os << "nu=" << format_double(r.nu) << '\n';
    os << "fprime_norm=" << format_double(r.fprime_norm) << '\n';
    os << "sufficient_condition=" << (r.sufficient_condition ? "true" : "false") << '\n';
    os << "linearized_bound=" << format_double(r.linearized_bound) << '\n';
    os << "pls_verdict=" << to_string(r.pls_verdict) << '\n';
    return os.str();
}

} // namespace wentzell
