#include "wentzell/spectral.hpp"

#include "wentzell/error.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <deque>
#include <iostream>
#include <limits>

namespace wentzell {

using Eigen::Index;

bool check_irreducible(const GeneratorMatrix& L)
{
    const Index n = L.dim();
    if (n <= 1) return true;
    const auto& a = L.values();

    auto reaches_all = [&](bool forward) {
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::deque<Index> queue{0};
        seen[0] = 1;
        Index count = 1;
        while (!queue.empty()) {
            const Index j = queue.front();
            queue.pop_front();
            for (Index i = 0; i < n; ++i) {
                if (i == j || seen[static_cast<std::size_t>(i)]) continue;
                // Edge j -> i iff a(i, j) > 0.
                const double e = forward ? a(i, j) : a(j, i);
                if (e > 0.0) {
                    seen[static_cast<std::size_t>(i)] = 1;
                    ++count;
                    queue.push_back(i);
                }
            }
        }
        return count == n;
    };
    return reaches_all(true) && reaches_all(false);
}

namespace {

double weighted_norm(const Eigen::VectorXd& v, const Eigen::VectorXd& w)
{
    return w.dot(v.cwiseAbs());
}

struct Iterate {
    Eigen::VectorXd x; // weighted sum normalised to 1
    double estimate = 0.0;
    double residual = std::numeric_limits<double>::infinity();
};

// Eigenvalue estimate w^T L x / w^T x and the weighted residual.
void measure(const Eigen::MatrixXd& a, const Eigen::VectorXd& w, Iterate& it)
{
    const Eigen::VectorXd y = a * it.x;
    const double mass = w.dot(it.x);
    it.estimate = w.dot(y) / mass;
    it.residual = weighted_norm(y - it.estimate * it.x, w) / weighted_norm(it.x, w);
}

Eigen::VectorXd initial_vector(const SpectralOptions& opts, const Eigen::VectorXd& w)
{
    Eigen::VectorXd x;
    if (opts.start.size() == w.size() && (opts.start.array() > 0.0).all() && opts.start.allFinite())
        x = opts.start;
    else
        x = Eigen::VectorXd::Ones(w.size());
    return x / w.dot(x);
}

bool converged(const Iterate& it, double tol)
{
    return it.residual <= tol * std::max(1.0, std::abs(it.estimate));
}

SpectralResult finish(const Iterate& it, std::size_t iterations, bool ok, const Eigen::VectorXd& w)
{
    SpectralResult r;
    r.bound = it.estimate;
    Eigen::VectorXd v = it.x / weighted_norm(it.x, w);
    r.eigvec = PopulationState::from_coords(v);
    r.iterations = iterations;
    r.residual = it.residual;
    r.converged = ok;
    return r;
}

SpectralResult collatz_shift_invert(const Eigen::MatrixXd& a, const Eigen::VectorXd& w,
                                    const SpectralOptions& opts, std::size_t max_iter)
{
    const Index n = a.rows();
    const double scale = 1.0 + a.diagonal().cwiseAbs().maxCoeff();
    Iterate it;
    it.x = initial_vector(opts, w);
    measure(a, w, it);

    std::size_t k = 0;
    int stalled = 0;
    for (; k < max_iter && !converged(it, opts.tol) && stalled < 5; ++k) {
        const double before = it.residual;
        const Eigen::VectorXd y = a * it.x;
        // Collatz-Wielandt: s(L) <= max_i (Lx)_i / x_i for x > 0.
        double upper = -std::numeric_limits<double>::infinity();
        for (Index i = 0; i < n; ++i) upper = std::max(upper, y(i) / it.x(i));
        const double shift = upper + 16.0 * std::numeric_limits<double>::epsilon() * scale;

        Eigen::MatrixXd m = -a;
        m.diagonal().array() += shift;
        Eigen::VectorXd z = m.partialPivLu().solve(it.x);
        const double mass = w.dot(z);
        if (!z.allFinite() || !(mass > 0.0)) break; // shift hit the eigenvalue: x is already exact
        // Clip roundoff-level negatives; the exact resolvent is strictly positive.
        z = z.cwiseMax(std::numeric_limits<double>::min());
        it.x = z / w.dot(z);
        measure(a, w, it);
        // Convergence is only linear until the shift is close; a residual that stops
        // decreasing at all means the roundoff floor is reached.
        stalled = it.residual >= before ? stalled + 1 : 0;
    }
    return finish(it, k, converged(it, opts.tol), w);
}

SpectralResult shifted_power(const Eigen::MatrixXd& a, const Eigen::VectorXd& w,
                             const SpectralOptions& opts, std::size_t max_iter)
{
    const double c = 1.0 + a.diagonal().cwiseAbs().maxCoeff();
    Eigen::MatrixXd p = a;
    p.diagonal().array() += c;

    Iterate it;
    it.x = initial_vector(opts, w);
    double previous = std::numeric_limits<double>::infinity();
    std::size_t k = 0;
    bool ok = false;
    for (; k < max_iter; ++k) {
        const Eigen::VectorXd y = p * it.x;
        const double ratio = w.dot(y) / w.dot(it.x);
        const Eigen::VectorXd next = y / w.dot(y);
        const double step = weighted_norm(next - it.x, w);
        it.x = next;
        if (step <= opts.tol && std::abs(ratio - previous) <= opts.tol * std::max(1.0, std::abs(ratio))) {
            measure(a, w, it);
            ok = converged(it, opts.tol);
            if (ok) break;
        }
        previous = ratio;
    }
    measure(a, w, it);
    return finish(it, k, ok || converged(it, opts.tol), w);
}

// Bound from the dense eigensolver, eigenvector by a few inverse-iteration steps.
SpectralResult dense_recovery(const Eigen::MatrixXd& a, const Eigen::VectorXd& w, const SpectralOptions& opts)
{
    const auto eig = dense_spectrum(a);
    const double s = eig.front().real();
    Iterate it;
    it.x = initial_vector(opts, w);
    const double scale = 1.0 + a.diagonal().cwiseAbs().maxCoeff();
    Eigen::MatrixXd m = -a;
    m.diagonal().array() += s + 1e-10 * scale;
    const auto lu = m.partialPivLu();
    for (int k = 0; k < 5; ++k) {
        Eigen::VectorXd z = lu.solve(it.x);
        if (!z.allFinite()) break;
        if (w.dot(z) < 0.0) z = -z;
        z = z.cwiseMax(std::numeric_limits<double>::min());
        it.x = z / w.dot(z);
    }
    measure(a, w, it);
    it.estimate = s;
    const Eigen::VectorXd y = a * it.x;
    it.residual = weighted_norm(y - s * it.x, w) / weighted_norm(it.x, w);
    auto r = finish(it, 5, converged(it, opts.tol), w);
    r.used_dense_fallback = true;
    return r;
}

} // namespace

SpectralResult spectral_bound(const GeneratorMatrix& L, const SpectralOptions& opts)
{
    if (!L.metzler()) throw NumericError("spectral_bound: matrix is not Metzler");
    if (!check_irreducible(L)) throw NumericError("spectral_bound: matrix is reducible");
    if (!L.values().allFinite()) throw NumericError("spectral_bound: non-finite entries");

    const auto& a = L.values();
    const auto& w = L.weights();
    const std::size_t max_iter = opts.max_iter ? opts.max_iter : 100 * static_cast<std::size_t>(L.dim());

    SpectralResult r = opts.method == PerronMethod::ShiftedPower ? shifted_power(a, w, opts, max_iter)
                                                                  : collatz_shift_invert(a, w, opts, max_iter);
    if (!r.converged && opts.dense_fallback && L.dim() <= kDenseSpectrumLimit) {
        auto fallback = dense_recovery(a, w, opts);
        fallback.iterations += r.iterations;
        return fallback;
    }
    return r;
}

PopulationState resolvent_apply(const GeneratorMatrix& L, double lambda, const PopulationState& h,
                                std::optional<double> known_bound)
{
    if (static_cast<Index>(h.size() + 1) != L.dim()) throw Error("state length does not match matrix");
    if (known_bound && !(lambda > *known_bound))
        std::clog << "warning: resolvent evaluated at lambda=" << lambda
                  << " which does not exceed the spectral bound " << *known_bound << '\n';

    Eigen::MatrixXd m = -L.values();
    m.diagonal().array() += lambda;
    const auto lu = m.partialPivLu();
    if (lu.rcond() < 1e3 * std::numeric_limits<double>::epsilon())
        throw NumericError("resolvent: lambda I - L is singular to working precision");
    const Eigen::VectorXd u = lu.solve(h.coords());
    if (!u.allFinite()) throw NumericError("resolvent: non-finite solution");
    return PopulationState::from_coords(u);
}

} // namespace wentzell
