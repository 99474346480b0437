#include "wentzell/evolve.hpp"

#include "wentzell/error.hpp"

#include <cmath>
#include <optional>
#include <ostream>

namespace wentzell {

std::vector<double> solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                                      std::span<const double> sup, std::span<const double> rhs)
{
    const std::size_t n = diag.size();
    if (sub.size() != n || sup.size() != n || rhs.size() != n)
        throw NumericError("tridiagonal solve: band lengths disagree");
    if (n == 0) return {};

    std::vector<double> c(n), x(n);
    double pivot = diag[0];
    if (pivot == 0.0 || !std::isfinite(pivot)) throw NumericError("tridiagonal solve: zero pivot in row 0");
    c[0] = sup[0] / pivot;
    x[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = diag[i] - sub[i] * c[i - 1];
        if (pivot == 0.0 || !std::isfinite(pivot))
            throw NumericError("tridiagonal solve: zero pivot in row " + std::to_string(i));
        c[i] = i + 1 < n ? sup[i] / pivot : 0.0;
        x[i] = (rhs[i] - sub[i] * x[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
    return x;
}

ImexStepper::ImexStepper(const Discretization& disc, double dt) : disc_(&disc), dt_(dt)
{
    if (!(dt > 0.0) || !std::isfinite(dt)) throw NumericError("dt must be positive");
    const auto& a = disc.linear().values();
    const Eigen::Index n = a.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (std::abs(i - j) > 1 && a(i, j) != 0.0)
                throw NumericError("linear operator is not tridiagonal");

    const auto size = static_cast<std::size_t>(n);
    sub_.assign(size, 0.0);
    diag_.assign(size, 0.0);
    sup_.assign(size, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        diag_[k] = 1.0 - dt * a(i, i);
        if (i > 0) sub_[k] = -dt * a(i, i - 1);
        if (i + 1 < n) sup_[k] = -dt * a(i, i + 1);
    }
}

PopulationState ImexStepper::step(const PopulationState& s) const
{
    const auto& si = disc_->ingredients();
    PopulationState rhs = s;
    if (!s.is_zero()) rhs += dt_ * apply_F(si, s);
    const Eigen::VectorXd r = rhs.coords();
    const auto x = solve_tridiagonal(sub_, diag_, sup_, std::span<const double>(r.data(), r.size()));
    return PopulationState(x[0], std::vector<double>(x.begin() + 1, x.end()));
}

PopulationState step_imex(const Discretization& disc, const PopulationState& s, double dt)
{
    return ImexStepper(disc, dt).step(s);
}

Trajectory simulate(const Discretization& disc, const PopulationState& s0, double t_end, double dt,
                    std::size_t snapshot_stride)
{
    if (!(t_end > 0.0)) throw NumericError("t_end must be positive");
    if (!(dt > 0.0)) throw NumericError("dt must be positive");
    const Grid& g = disc.grid();
    if (s0.size() != g.cells()) throw Error("initial state does not match grid");

    // Steps of size dt, the last one shortened to land on t_end.
    auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    if (steps == 0) steps = 1;
    const double last_dt = t_end - static_cast<double>(steps - 1) * dt;

    const ImexStepper stepper(disc, dt);
    std::optional<ImexStepper> last;
    if (std::abs(last_dt - dt) > 1e-12 * dt) last.emplace(disc, last_dt);

    Trajectory tr;
    PopulationState s = s0;
    auto record = [&](double t, std::size_t k) {
        tr.times.push_back(t);
        tr.norms.push_back(total_norm(s, g));
        tr.boundary_masses.push_back(s.u0);
        if (snapshot_stride && k % snapshot_stride == 0) tr.snapshots.push_back({t, s});
    };
    record(0.0, 0);

    for (std::size_t k = 1; k <= steps; ++k) {
        const bool final_step = k == steps;
        s = (final_step && last) ? last->step(s) : stepper.step(s);
        const double t = final_step ? t_end : static_cast<double>(k) * dt;
        record(t, k);
        const double norm = tr.norms.back();
        if (!std::isfinite(norm) || norm > kBlowUpNorm) {
            tr.end = TrajectoryEnd::BlowUp;
            break;
        }
        if (norm < kExtinctionNorm) {
            tr.end = TrajectoryEnd::Extinct;
            break;
        }
    }
    tr.final_state = s;
    return tr;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr)
{
    os << "t,U,u0\n";
    for (std::size_t k = 0; k < tr.times.size(); ++k)
        os << format_double(tr.times[k]) << ',' << format_double(tr.norms[k]) << ','
           << format_double(tr.boundary_masses[k]) << '\n';
}

} // namespace wentzell
