#pragma once

#include "wentzell/discrete_ops.hpp"
#include "wentzell/grid.hpp"

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <vector>

namespace wentzell {

enum class PerronMethod {
    /// Inverse iteration shifted to the Collatz-Wielandt upper bound max_i (Lx)_i / x_i.
    /// Every iterate stays strictly positive and convergence is superlinear.
    CollatzShiftInvert,
    /// Plain power iteration on L + cI with c = 1 + max_i |L_ii|.
    ShiftedPower,
};

struct SpectralOptions {
    double tol = 1e-10;
    /// 0 selects 100 * (N + 1).
    std::size_t max_iter = 0;
    PerronMethod method = PerronMethod::CollatzShiftInvert;
    /// On non-convergence, recover the bound from the dense eigensolver (N + 1 <= 400).
    bool dense_fallback = true;
    /// Optional positive starting vector in coordinates; empty means uniform.
    Eigen::VectorXd start;
};

struct SpectralResult {
    double bound = 0.0;
    /// Right eigenvector, total_norm = 1, strictly positive.
    PopulationState eigvec;
    std::size_t iterations = 0;
    /// ||L v - bound v|| in the weighted norm, with ||v|| = 1.
    double residual = 0.0;
    bool converged = false;
    bool used_dense_fallback = false;
};

/// Strong connectivity of the graph with an edge j -> i whenever L_ij > 0 (i != j).
bool check_irreducible(const GeneratorMatrix& L);

/// Spectral bound and Perron eigenvector of an irreducible Metzler generator.
/// Throws NumericError if L is not Metzler or is reducible. Non-convergence is
/// reported through `converged = false`.
SpectralResult spectral_bound(const GeneratorMatrix& L, const SpectralOptions& opts = {});

inline SpectralResult spectral_bound(const GeneratorMatrix& L, double tol, std::size_t max_iter)
{
    SpectralOptions o;
    o.tol = tol;
    o.max_iter = max_iter;
    return spectral_bound(L, o);
}

/// Maximum dimension accepted by dense_spectrum.
inline constexpr Eigen::Index kDenseSpectrumLimit = 400;

/// All eigenvalues via balancing, Householder reduction to Hessenberg form and
/// Francis double-shift QR. Sorted by descending real part.
std::vector<std::complex<double>> dense_spectrum(const Eigen::MatrixXd& A);
inline std::vector<std::complex<double>> dense_spectrum(const GeneratorMatrix& L)
{
    return dense_spectrum(L.values());
}

/// Solve (lambda I - L) u = h. If `known_bound` is given and lambda does not exceed it
/// a warning is written to std::clog. Throws NumericError on a singular system.
PopulationState resolvent_apply(const GeneratorMatrix& L, double lambda, const PopulationState& h,
                                std::optional<double> known_bound = std::nullopt);

} // namespace wentzell
