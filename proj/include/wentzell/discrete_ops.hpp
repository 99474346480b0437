#pragma once

#include "wentzell/grid.hpp"
#include "wentzell/model.hpp"

#include <Eigen/Dense>

#include <iosfwd>

namespace wentzell {

/// Dense (N+1)x(N+1) operator on coordinates (u0, u_1, ..., u_N) together with
/// the weights (1, h, ..., h) of the discrete L1 (+) R pairing.
class GeneratorMatrix {
public:
    GeneratorMatrix() = default;
    GeneratorMatrix(Eigen::MatrixXd values, Eigen::VectorXd weights);

    const Eigen::MatrixXd& values() const { return a_; }
    const Eigen::VectorXd& weights() const { return w_; }
    Eigen::Index dim() const { return a_.rows(); }
    double operator()(Eigen::Index i, Eigen::Index j) const { return a_(i, j); }

    /// Every off-diagonal entry >= 0.
    bool metzler() const { return metzler_; }
    /// Every weighted column sum vanishes to 1e-12 of the column's weighted absolute sum.
    bool conservative() const { return conservative_; }

    /// sum_i w_i L_ij for each column j.
    Eigen::VectorXd weighted_column_sums() const;

    PopulationState apply(const PopulationState& s) const;

    GeneratorMatrix& operator+=(const GeneratorMatrix& o);
    friend GeneratorMatrix operator+(GeneratorMatrix a, const GeneratorMatrix& b) { return a += b; }
    friend GeneratorMatrix operator-(const GeneratorMatrix& a, const GeneratorMatrix& b);

private:
    void classify();

    Eigen::MatrixXd a_;
    Eigen::VectorXd w_;
    bool metzler_ = true;
    bool conservative_ = true;
};

/// Debug dump: row-major CSV with the first row and column labelled `boundary`.
void write_matrix_csv(std::ostream& os, const GeneratorMatrix& L);

/// Conservative finite-volume drift/diffusion generator with the mass-carrying
/// boundary compartment (no mortality, no recruitment).
GeneratorMatrix assemble_transport(const SampledIngredients& si);

/// diag(-mu(0), -mu(x_1), ..., -mu(x_N)).
GeneratorMatrix assemble_mortality(const SampledIngredients& si);

/// transport + mortality: the full linear part of the model.
GeneratorMatrix assemble_linear(const SampledIngredients& si);

/// Recruitment matrix K with the environment frozen at v.
GeneratorMatrix assemble_recruitment(const SampledIngredients& si, const PopulationState& v);

/// Fixed-environment generator transport + mortality + K_v.
GeneratorMatrix assemble_fixed_environment(const SampledIngredients& si, const PopulationState& v);

/// Full nonlinearity F(u) = K_u u, with F(0) = 0.
PopulationState apply_F(const SampledIngredients& si, const PopulationState& s);

/// Directional derivative of F at 0 along a nonnegative, nonzero v.
PopulationState gateaux_at_zero(const SampledIngredients& si, const PopulationState& v);

/// Frechet derivative of F at a nonzero equilibrium.
GeneratorMatrix assemble_linearization(const SampledIngredients& si, const PopulationState& ustar);

/// A model sampled on a grid together with its assembled linear operators.
/// Immutable after construction; shared by the steady, stability and time-stepping code.
class Discretization {
public:
    Discretization(const ValidatedModel& vm, const Grid& grid);

    const Grid& grid() const { return si_.grid(); }
    const SampledIngredients& ingredients() const { return si_; }
    const GeneratorMatrix& transport() const { return transport_; }
    const GeneratorMatrix& mortality() const { return mortality_; }
    /// transport + mortality.
    const GeneratorMatrix& linear() const { return linear_; }

    /// linear + K_v.
    GeneratorMatrix fixed_environment(const PopulationState& v) const;

private:
    SampledIngredients si_;
    GeneratorMatrix transport_;
    GeneratorMatrix mortality_;
    GeneratorMatrix linear_;
};

} // namespace wentzell
