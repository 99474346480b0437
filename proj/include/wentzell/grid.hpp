#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace wentzell {

/// Uniform partition of [0, m] into N cells.
///
/// Interface and center coordinates are computed as (i*m)/N and ((2i-1)*m)/(2N)
/// so that a grid and its doubling produce bit-identical shared points.
class Grid {
public:
    Grid(double m, std::size_t cells);

    double m() const { return m_; }
    std::size_t cells() const { return n_; }
    double h() const { return h_; }

    /// Center of cell i, 1-based (i = 1..N).
    double center(std::size_t i) const;
    /// Interface i = 0..N; interface 0 is x = 0 and interface N is x = m.
    double interface(std::size_t i) const;

    /// Weight vector (1, h, ..., h) of the discrete L1 (+) R pairing.
    Eigen::VectorXd weights() const;

    bool operator==(const Grid& o) const { return m_ == o.m_ && n_ == o.n_; }

private:
    double m_;
    std::size_t n_;
    double h_;
};

/// Boundary mass u0 plus N cell averages.
struct PopulationState {
    double u0 = 0.0;
    std::vector<double> u;

    PopulationState() = default;
    PopulationState(double boundary, std::vector<double> bulk) : u0(boundary), u(std::move(bulk)) {}

    static PopulationState zero(const Grid& g) { return {0.0, std::vector<double>(g.cells(), 0.0)}; }
    static PopulationState constant(const Grid& g, double boundary, double bulk)
    {
        return {boundary, std::vector<double>(g.cells(), bulk)};
    }

    std::size_t size() const { return u.size(); }
    bool is_zero() const;
    bool is_nonnegative() const;
    /// Smallest of u0 and all u_i.
    double min_entry() const;

    /// Coordinate vector (u0, u_1, ..., u_N).
    Eigen::VectorXd coords() const;
    static PopulationState from_coords(const Eigen::VectorXd& c);

    PopulationState& operator*=(double a);
    PopulationState& operator+=(const PopulationState& o);
    PopulationState& operator-=(const PopulationState& o);
};

PopulationState operator*(double a, PopulationState s);
PopulationState operator+(PopulationState a, const PopulationState& b);
PopulationState operator-(PopulationState a, const PopulationState& b);

/// |u0| + sum_i h |u_i|. Equals the total population size for nonnegative states.
double total_norm(const PopulationState& s, const Grid& g);

/// Midpoint tail integral from cell center x_j: (h/2) u_j + sum_{k>j} h u_k.
/// j = 0 gives the full bulk integral sum_k h u_k (u0 excluded).
double tail_integral(const PopulationState& s, const Grid& g, std::size_t j);

/// All tails T_0..T_N in one O(N) pass.
std::vector<double> tail_integrals(const PopulationState& s, const Grid& g);

/// State CSV: header `x,u`, then `boundary,<u0>`, then N rows `<x_i>,<u_i>`.
void write_state_csv(std::ostream& os, const PopulationState& s, const Grid& g);
void write_state_csv(const std::string& path, const PopulationState& s, const Grid& g);
/// Reads the CSV written above. The grid is only used to check the row count.
PopulationState read_state_csv(std::istream& is, const Grid& g);
PopulationState read_state_csv(const std::string& path, const Grid& g);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

} // namespace wentzell
