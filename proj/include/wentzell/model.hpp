#pragma once

#include "wentzell/expr.hpp"
#include "wentzell/grid.hpp"

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

namespace wentzell {

/// Raw model ingredients as read from a config file.
///
/// beta0, b0 take the total population size; beta2, b2 take a proportion in
/// [-1, 1]; beta1 takes (x, y) in [0, m]^2; mu, gamma, d take x in [0, m].
/// All one-argument ingredients are written in terms of `x`.
struct ModelDefinition {
    double m = 1.0;
    expr::Expression beta0, beta1, beta2, b0, b2, mu, gamma, d;
};

/// Parse the line-based `key = value` config format.
ModelDefinition load_config(std::string_view text);
ModelDefinition load_config_file(const std::string& path);

struct ValidationOptions {
    std::size_t samples = 101;
    /// beta0 and b0 are sampled on [0, population_range] for sign and monotonicity.
    double population_range = 100.0;
    /// Large argument at which vanishing of beta0 and b0 is probed.
    double infinity_probe = 1e6;
    double vanishing_threshold = 1e-6;
};

/// Result of sampling one ingredient on its domain.
struct SignCertificate {
    std::string ingredient;
    double min_value = 0.0;
    double argmin = 0.0;
    std::size_t samples = 0;
};

/// A definition that passed the sampled sign checks, plus what was learned.
class ValidatedModel {
public:
    const ModelDefinition& definition() const { return def_; }
    double m() const { return def_.m; }

    const std::vector<SignCertificate>& certificates() const { return certs_; }
    std::size_t samples() const { return samples_; }

    /// Smallest sampled mortality.
    double mu_lower_bound() const { return mu0_; }
    bool mu_bounded_away_from_zero() const { return mu0_ > 0.0; }

    bool beta0_strictly_decreasing() const { return beta0_decreasing_; }
    bool b0_strictly_decreasing() const { return b0_decreasing_; }
    bool monotone_beta0_b0() const { return beta0_decreasing_ && b0_decreasing_; }

    bool beta0_vanishes_at_infinity() const { return beta0_vanishing_; }
    bool b0_vanishes_at_infinity() const { return b0_vanishing_; }
    bool vanishing_at_infinity() const { return beta0_vanishing_ && b0_vanishing_; }

    friend ValidatedModel validate(const ModelDefinition&, const ValidationOptions&);

private:
    ModelDefinition def_;
    std::vector<SignCertificate> certs_;
    std::size_t samples_ = 0;
    double mu0_ = 0.0;
    bool beta0_decreasing_ = false;
    bool b0_decreasing_ = false;
    bool beta0_vanishing_ = false;
    bool b0_vanishing_ = false;
};

/// Certify the standing sign assumptions on equispaced samples.
/// Throws ModelError naming the ingredient and sample point on violation.
ValidatedModel validate(const ModelDefinition& def, const ValidationOptions& opts = {});
inline ValidatedModel validate(const ModelDefinition& def, std::size_t samples)
{
    ValidationOptions o;
    o.samples = samples;
    return validate(def, o);
}

/// Ingredients evaluated on a grid.
class SampledIngredients {
public:
    SampledIngredients(const ValidatedModel& vm, const Grid& grid);

    const Grid& grid() const { return grid_; }

    double mu_boundary() const { return mu0_; }
    /// mu at cell centers, index 0..N-1 for cells 1..N.
    const std::vector<double>& mu() const { return mu_; }
    /// gamma and d at interfaces 0..N.
    const std::vector<double>& gamma() const { return gamma_; }
    const std::vector<double>& diffusion() const { return d_; }
    /// beta1(x_i, y_j) over cell centers: row i-1, column j-1.
    const Eigen::MatrixXd& kernel() const { return beta1_; }
    /// beta1(0, y_j) for j = 1..N.
    const Eigen::VectorXd& kernel_boundary() const { return beta1_boundary_; }

    double beta0(double total) const;
    double b0(double total) const;
    /// Argument clamped to [-1, 1].
    double beta2(double proportion) const;
    double b2(double proportion) const;

    /// Central finite-difference derivatives, step 1e-6 * max(1, |arg|),
    /// shifted to stay inside the ingredient's domain.
    double beta0_prime(double total) const;
    double b0_prime(double total) const;
    double beta2_prime(double proportion) const;
    double b2_prime(double proportion) const;

private:
    Grid grid_;
    expr::Expression beta0_, b0_, beta2_, b2_;
    double mu0_ = 0.0;
    std::vector<double> mu_, gamma_, d_;
    Eigen::MatrixXd beta1_;
    Eigen::VectorXd beta1_boundary_;
};

inline SampledIngredients sample_ingredients(const ValidatedModel& vm, const Grid& grid)
{
    return SampledIngredients(vm, grid);
}

} // namespace wentzell
