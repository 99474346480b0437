#include "wentzell/discrete_ops.hpp"

#include "wentzell/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace wentzell {

using Eigen::Index;

GeneratorMatrix::GeneratorMatrix(Eigen::MatrixXd values, Eigen::VectorXd weights)
    : a_(std::move(values)), w_(std::move(weights))
{
    if (a_.rows() != a_.cols() || a_.rows() != w_.size())
        throw Error("generator matrix and weight dimensions disagree");
    classify();
}

void GeneratorMatrix::classify()
{
    metzler_ = true;
    conservative_ = true;
    const Index n = a_.rows();
    for (Index j = 0; j < n; ++j) {
        double sum = 0.0;
        double abs_sum = 0.0;
        for (Index i = 0; i < n; ++i) {
            const double v = a_(i, j);
            if (i != j && v < 0.0) metzler_ = false;
            sum += w_(i) * v;
            abs_sum += w_(i) * std::abs(v);
        }
        if (std::abs(sum) > 1e-12 * abs_sum) conservative_ = false;
    }
}

Eigen::VectorXd GeneratorMatrix::weighted_column_sums() const
{
    return (w_.transpose() * a_).transpose();
}

PopulationState GeneratorMatrix::apply(const PopulationState& s) const
{
    if (static_cast<Index>(s.size() + 1) != dim()) throw Error("state length does not match matrix");
    return PopulationState::from_coords(a_ * s.coords());
}

GeneratorMatrix& GeneratorMatrix::operator+=(const GeneratorMatrix& o)
{
    if (o.dim() != dim()) throw Error("generator dimension mismatch");
    a_ += o.a_;
    classify();
    return *this;
}

GeneratorMatrix operator-(const GeneratorMatrix& a, const GeneratorMatrix& b)
{
    if (a.dim() != b.dim()) throw Error("generator dimension mismatch");
    return GeneratorMatrix(a.a_ - b.a_, a.w_);
}

void write_matrix_csv(std::ostream& os, const GeneratorMatrix& L)
{
    const Index n = L.dim();
    auto label = [](Index k) { return k == 0 ? std::string("boundary") : std::to_string(k); };
    os << "row";
    for (Index j = 0; j < n; ++j) os << ',' << label(j);
    os << '\n';
    for (Index i = 0; i < n; ++i) {
        os << label(i);
        for (Index j = 0; j < n; ++j) os << ',' << format_double(L(i, j));
        os << '\n';
    }
}

GeneratorMatrix assemble_transport(const SampledIngredients& si)
{
    const Grid& g = si.grid();
    const std::size_t n = g.cells();
    const double h = g.h();
    const auto& gamma = si.gamma();
    const auto& d = si.diffusion();

    for (std::size_t i = 0; i <= n; ++i)
        if (!(d[i] > 0.0))
            throw ModelError("diffusion not positive at x=" + format_double(g.interface(i)));

    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<Index>(n + 1), static_cast<Index>(n + 1));

    // Flux from the boundary compartment into cell 1 over the half cell [0, h/2]:
    // J0 = (gamma+ + 2d/h) u0 - (gamma- + 2d/h) u1. Row 0 loses J0, cell 1 gains J0/h.
    {
        const double out = std::max(gamma[0], 0.0) + 2.0 * d[0] / h;
        const double in = std::max(-gamma[0], 0.0) + 2.0 * d[0] / h;
        L(0, 0) -= out;
        L(0, 1) += in;
        L(1, 0) += out / h;
        L(1, 1) -= in / h;
    }

    // Interior interface between cells i and i+1 at x = i h.
    for (std::size_t i = 1; i < n; ++i) {
        const double out = std::max(gamma[i], 0.0) + d[i] / h;
        const double in = std::max(-gamma[i], 0.0) + d[i] / h;
        const auto a = static_cast<Index>(i);
        const auto b = static_cast<Index>(i + 1);
        L(a, a) -= out / h;
        L(a, b) += in / h;
        L(b, a) += out / h;
        L(b, b) -= in / h;
    }
    // No flux through x = m.

    return GeneratorMatrix(std::move(L), g.weights());
}

GeneratorMatrix assemble_mortality(const SampledIngredients& si)
{
    const Grid& g = si.grid();
    const std::size_t n = g.cells();
    if (si.mu().size() != n) throw Error("mortality samples do not match grid");
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Index>(n + 1), static_cast<Index>(n + 1));
    M(0, 0) = -si.mu_boundary();
    for (std::size_t i = 1; i <= n; ++i) M(static_cast<Index>(i), static_cast<Index>(i)) = -si.mu()[i - 1];
    return GeneratorMatrix(std::move(M), g.weights());
}

GeneratorMatrix assemble_linear(const SampledIngredients& si)
{
    return assemble_transport(si) + assemble_mortality(si);
}

namespace {

// Recruitment matrix with the density-dependent prefactors supplied explicitly,
// so the same code yields K_v (prefactors at ||v||) and dF_0 (prefactors at 0).
Eigen::MatrixXd recruitment_values(const SampledIngredients& si, const PopulationState& v,
                                   double beta0_value, double b0_value)
{
    const Grid& g = si.grid();
    const std::size_t n = g.cells();
    const double h = g.h();
    const double norm = total_norm(v, g);
    const auto tails = tail_integrals(v, g);

    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(static_cast<Index>(n + 1), static_cast<Index>(n + 1));
    const auto& kernel = si.kernel();
    const auto& kernel0 = si.kernel_boundary();
    for (std::size_t j = 1; j <= n; ++j) {
        const auto col = static_cast<Index>(j);
        const double weight = beta0_value * si.beta2(tails[j] / norm) * h;
        K(0, col) = kernel0(col - 1) * weight;
        for (Index i = 1; i <= static_cast<Index>(n); ++i) K(i, col) = kernel(i - 1, col - 1) * weight;
    }
    K(0, 0) = b0_value * si.b2(tails[0] / norm);
    return K;
}

} // namespace

GeneratorMatrix assemble_recruitment(const SampledIngredients& si, const PopulationState& v)
{
    const Grid& g = si.grid();
    const double norm = total_norm(v, g);
    if (!(norm > 0.0)) throw Error("recruitment environment has zero norm");
    return GeneratorMatrix(recruitment_values(si, v, si.beta0(norm), si.b0(norm)), g.weights());
}

GeneratorMatrix assemble_fixed_environment(const SampledIngredients& si, const PopulationState& v)
{
    return assemble_linear(si) + assemble_recruitment(si, v);
}

PopulationState apply_F(const SampledIngredients& si, const PopulationState& s)
{
    if (s.is_zero()) return PopulationState::zero(si.grid());
    return assemble_recruitment(si, s).apply(s);
}

PopulationState gateaux_at_zero(const SampledIngredients& si, const PopulationState& v)
{
    const Grid& g = si.grid();
    if (!(total_norm(v, g) > 0.0)) throw Error("Gateaux direction must be nonzero");
    const Eigen::MatrixXd K = recruitment_values(si, v, si.beta0(0.0), si.b0(0.0));
    return PopulationState::from_coords(K * v.coords());
}

GeneratorMatrix assemble_linearization(const SampledIngredients& si, const PopulationState& ustar)
{
    const Grid& g = si.grid();
    const std::size_t n = g.cells();
    const auto N = static_cast<Index>(n);
    const double h = g.h();
    const double norm = total_norm(ustar, g);
    if (!(norm > 0.0)) throw Error("linearization point has zero norm");

    const Eigen::VectorXd w = g.weights();
    const Eigen::VectorXd u = ustar.coords();
    const auto tails = tail_integrals(ustar, g);

    const double beta0 = si.beta0(norm);
    const double dbeta0 = si.beta0_prime(norm);
    const double b0 = si.b0(norm);
    const double db0 = si.b0_prime(norm);
    const double p0 = tails[0] / norm;
    const double b2 = si.b2(p0);
    const double db2 = si.b2_prime(p0);

    // kappa(i, j): beta1 row for the boundary (i = 0) and for cells (i >= 1).
    auto kappa = [&](Index i, Index j) {
        return i == 0 ? si.kernel_boundary()(j - 1) : si.kernel()(i - 1, j - 1);
    };

    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N + 1, N + 1);

    std::vector<double> g2(n + 1), dg2(n + 1);
    for (std::size_t j = 1; j <= n; ++j) {
        g2[j] = si.beta2(tails[j] / norm);
        dg2[j] = si.beta2_prime(tails[j] / norm);
    }

    for (Index i = 0; i <= N; ++i) {
        // S_i = sum_j kappa_ij beta2(p_j) u*_j h, the recruitment at u* without beta0.
        double S = 0.0;
        // E_ij = beta0 kappa_ij beta2'(p_j) u*_j h, and sum_j E_ij T_j.
        std::vector<double> E(n + 1, 0.0);
        double ET = 0.0;
        for (Index j = 1; j <= N; ++j) {
            const double k = kappa(i, j);
            S += k * g2[j] * u(j) * h;
            E[j] = beta0 * k * dg2[j] * u(j) * h;
            ET += E[j] * tails[j];
            // (a) beta0 * beta2 kernel acting on z.
            B(i, j) += k * (beta0 * g2[j] * h);
        }
        // (a) beta0' (w . z) S_i.
        // (b) rank-one norm derivative inside beta2: -sum_j E_ij T_j / n^2 * (w . z).
        const double rank_one = dbeta0 * S - ET / (norm * norm);
        for (Index k = 0; k <= N; ++k) B(i, k) += rank_one * w(k);

        // (b) tail derivative: sum_j E_ij T_j(z) / n, with T_j(z) = h/2 z_j + h sum_{k>j} z_k.
        double prefix = 0.0; // sum_{j<k} E_ij
        for (Index k = 1; k <= N; ++k) {
            B(i, k) += h * (prefix + 0.5 * E[k]) / norm;
            prefix += E[k];
        }
    }

    // (c) b-block: b2(p0) [b0 z0 + b0' (w . z) u*0].
    B(0, 0) += b2 * b0;
    for (Index k = 0; k <= N; ++k) B(0, k) += b2 * db0 * u(0) * w(k);
    // (d) b2' block: b0 b2'(p0) (T_0(z)/n - T_0 (w . z)/n^2) u*0.
    const double d_coef = b0 * db2 * u(0);
    for (Index k = 1; k <= N; ++k) B(0, k) += d_coef * h / norm;
    for (Index k = 0; k <= N; ++k) B(0, k) -= d_coef * tails[0] / (norm * norm) * w(k);

    return GeneratorMatrix(std::move(B), w);
}

Discretization::Discretization(const ValidatedModel& vm, const Grid& grid)
    : si_(vm, grid), transport_(assemble_transport(si_)), mortality_(assemble_mortality(si_)),
      linear_(transport_ + mortality_)
{
}

GeneratorMatrix Discretization::fixed_environment(const PopulationState& v) const
{
    return linear_ + assemble_recruitment(si_, v);
}

} // namespace wentzell
