#pragma once

#include "wentzell/discrete_ops.hpp"
#include "wentzell/grid.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace wentzell {

/// Solve a tridiagonal system by elimination without pivoting. `sub[i]` couples
/// row i to i-1 (sub[0] unused), `sup[i]` couples row i to i+1 (last unused).
/// Throws NumericError on a zero or non-finite pivot.
std::vector<double> solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                                      std::span<const double> sup, std::span<const double> rhs);

/// IMEX Euler step: (I - dt L) u+ = u + dt F(u), L = transport + mortality.
///
/// L is tridiagonal in the ordering (u0, u_1, ..., u_N) and Metzler, so
/// I - dt L is an M-matrix: the elimination needs no pivoting and maps
/// nonnegative right-hand sides to nonnegative solutions for every dt > 0.
class ImexStepper {
public:
    ImexStepper(const Discretization& disc, double dt);

    double dt() const { return dt_; }
    PopulationState step(const PopulationState& s) const;

private:
    const Discretization* disc_;
    double dt_;
    std::vector<double> sub_, diag_, sup_;
};

PopulationState step_imex(const Discretization& disc, const PopulationState& s, double dt);

enum class TrajectoryEnd { Completed, BlowUp, Extinct };

struct Snapshot {
    double t;
    PopulationState state;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> norms;
    std::vector<double> boundary_masses;
    std::vector<Snapshot> snapshots;
    TrajectoryEnd end = TrajectoryEnd::Completed;
    PopulationState final_state;
};

/// Thresholds of the early-termination guards.
inline constexpr double kBlowUpNorm = 1e12;
inline constexpr double kExtinctionNorm = 1e-14;

/// Repeated IMEX steps from s0 to t_end. A snapshot is stored every
/// `snapshot_stride` steps (0 disables snapshots), starting with t = 0.
Trajectory simulate(const Discretization& disc, const PopulationState& s0, double t_end, double dt,
                    std::size_t snapshot_stride = 0);

/// Trajectory CSV: header `t,U,u0`.
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

} // namespace wentzell
