#include "wentzell/grid.hpp"

#include "wentzell/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace wentzell {

Grid::Grid(double m, std::size_t cells) : m_(m), n_(cells), h_(m / static_cast<double>(cells))
{
    if (!(m > 0.0) || !std::isfinite(m)) throw ModelError("grid length m must be positive");
    if (cells < 2) throw ModelError("grid needs at least 2 cells");
}

double Grid::center(std::size_t i) const
{
    return (static_cast<double>(2 * i - 1) * m_) / static_cast<double>(2 * n_);
}

double Grid::interface(std::size_t i) const
{
    return (static_cast<double>(i) * m_) / static_cast<double>(n_);
}

Eigen::VectorXd Grid::weights() const
{
    Eigen::VectorXd w = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n_ + 1), h_);
    w(0) = 1.0;
    return w;
}

bool PopulationState::is_zero() const
{
    return u0 == 0.0 && std::all_of(u.begin(), u.end(), [](double v) { return v == 0.0; });
}

bool PopulationState::is_nonnegative() const
{
    return u0 >= 0.0 && std::all_of(u.begin(), u.end(), [](double v) { return v >= 0.0; });
}

double PopulationState::min_entry() const
{
    double m = u0;
    for (double v : u) m = std::min(m, v);
    return m;
}

Eigen::VectorXd PopulationState::coords() const
{
    Eigen::VectorXd c(static_cast<Eigen::Index>(u.size() + 1));
    c(0) = u0;
    for (std::size_t i = 0; i < u.size(); ++i) c(static_cast<Eigen::Index>(i + 1)) = u[i];
    return c;
}

PopulationState PopulationState::from_coords(const Eigen::VectorXd& c)
{
    PopulationState s;
    s.u0 = c(0);
    s.u.assign(c.data() + 1, c.data() + c.size());
    return s;
}

PopulationState& PopulationState::operator*=(double a)
{
    u0 *= a;
    for (double& v : u) v *= a;
    return *this;
}

PopulationState& PopulationState::operator+=(const PopulationState& o)
{
    if (o.u.size() != u.size()) throw Error("state length mismatch");
    u0 += o.u0;
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += o.u[i];
    return *this;
}

PopulationState& PopulationState::operator-=(const PopulationState& o)
{
    if (o.u.size() != u.size()) throw Error("state length mismatch");
    u0 -= o.u0;
    for (std::size_t i = 0; i < u.size(); ++i) u[i] -= o.u[i];
    return *this;
}

PopulationState operator*(double a, PopulationState s) { return s *= a; }
PopulationState operator+(PopulationState a, const PopulationState& b) { return a += b; }
PopulationState operator-(PopulationState a, const PopulationState& b) { return a -= b; }

double total_norm(const PopulationState& s, const Grid& g)
{
    if (s.u.size() != g.cells()) throw Error("state length does not match grid");
    double bulk = 0.0;
    for (double v : s.u) bulk += std::abs(v);
    return std::abs(s.u0) + g.h() * bulk;
}

double tail_integral(const PopulationState& s, const Grid& g, std::size_t j)
{
    if (s.u.size() != g.cells()) throw Error("state length does not match grid");
    if (j > g.cells()) throw Error("tail index out of range");
    const double h = g.h();
    if (j == 0) {
        double sum = 0.0;
        for (double v : s.u) sum += v;
        return h * sum;
    }
    double sum = 0.0;
    for (std::size_t k = j + 1; k <= g.cells(); ++k) sum += s.u[k - 1];
    return 0.5 * h * s.u[j - 1] + h * sum;
}

std::vector<double> tail_integrals(const PopulationState& s, const Grid& g)
{
    if (s.u.size() != g.cells()) throw Error("state length does not match grid");
    const std::size_t n = g.cells();
    const double h = g.h();
    std::vector<double> t(n + 1, 0.0);
    double beyond = 0.0; // sum_{k>j} u_k
    for (std::size_t j = n; j >= 1; --j) {
        t[j] = 0.5 * h * s.u[j - 1] + h * beyond;
        beyond += s.u[j - 1];
    }
    t[0] = h * beyond;
    return t;
}

std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

void write_state_csv(std::ostream& os, const PopulationState& s, const Grid& g)
{
    if (s.u.size() != g.cells()) throw Error("state length does not match grid");
    os << "x,u\n";
    os << "boundary," << format_double(s.u0) << '\n';
    for (std::size_t i = 1; i <= g.cells(); ++i)
        os << format_double(g.center(i)) << ',' << format_double(s.u[i - 1]) << '\n';
}

void write_state_csv(const std::string& path, const PopulationState& s, const Grid& g)
{
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    write_state_csv(os, s, g);
}

namespace {

double parse_field(const std::string& text, std::size_t line)
{
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw Error("state csv line " + std::to_string(line) + ": bad number '" + text + "'");
    return v;
}

std::string trim(std::string s)
{
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

} // namespace

PopulationState read_state_csv(std::istream& is, const Grid& g)
{
    std::string line;
    std::size_t lineno = 0;
    auto next = [&]() -> bool {
        while (std::getline(is, line)) {
            ++lineno;
            line = trim(line);
            if (!line.empty()) return true;
        }
        return false;
    };

    if (!next() || line != "x,u") throw Error("state csv: missing header 'x,u'");
    if (!next()) throw Error("state csv: missing boundary row");
    auto comma = line.find(',');
    if (comma == std::string::npos || trim(line.substr(0, comma)) != "boundary")
        throw Error("state csv: first data row must be 'boundary,<u0>'");

    PopulationState s;
    s.u0 = parse_field(trim(line.substr(comma + 1)), lineno);
    while (next()) {
        comma = line.find(',');
        if (comma == std::string::npos)
            throw Error("state csv line " + std::to_string(lineno) + ": expected two fields");
        s.u.push_back(parse_field(trim(line.substr(comma + 1)), lineno));
    }
    if (s.u.size() != g.cells())
        throw Error("state csv has " + std::to_string(s.u.size()) + " cells, grid has " +
                    std::to_string(g.cells()));
    return s;
}

PopulationState read_state_csv(const std::string& path, const Grid& g)
{
    std::ifstream is(path);
    if (!is) throw Error("cannot open " + path);
    return read_state_csv(is, g);
}

} // namespace wentzell
