#include "wentzell/model.hpp"

#include "wentzell/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

namespace wentzell {

namespace {

constexpr std::string_view kKeys[] = {"m", "beta0", "beta1", "beta2", "b0", "b2", "mu", "gamma", "d"};

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Strip a trailing `#` comment that is not inside a quoted string.
std::string_view strip_comment(std::string_view line)
{
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        else if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

expr::Expression parse_ingredient(const std::string& key, std::string_view raw, std::size_t lineno)
{
    std::string_view text = raw;
    if (!text.empty() && text.front() == '"') {
        if (text.size() < 2 || text.back() != '"')
            throw ModelError("line " + std::to_string(lineno) + ": unterminated string for key " + key);
        text = text.substr(1, text.size() - 2);
    }
    try {
        auto e = expr::parse(text);
        e.require_only(key == "beta1" ? "xy" : "x");
        return e;
    } catch (const ParseError& err) {
        throw ModelError("key " + key + ": " + err.what());
    } catch (const EvalError& err) {
        throw ModelError("key " + key + ": " + err.what());
    }
}

std::string fmt(double v) { return format_double(v); }

void check_finite(const std::string& name, double v, const std::string& where)
{
    if (!std::isfinite(v)) throw ModelError(name + " not finite at " + where);
}

// Equispaced points lo, ..., hi (count >= 2).
std::vector<double> linspace(double lo, double hi, std::size_t count)
{
    std::vector<double> pts(count);
    for (std::size_t k = 0; k < count; ++k)
        pts[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
    pts.back() = hi;
    return pts;
}

double eval_checked(const expr::Expression& e, const std::string& name, double x,
                    std::optional<double> y = std::nullopt)
{
    const std::string where = y ? "(x,y)=(" + fmt(x) + "," + fmt(*y) + ")" : "x=" + fmt(x);
    double v = 0.0;
    try {
        v = e.evaluate(x, y);
    } catch (const EvalError& err) {
        throw ModelError(name + " cannot be evaluated at " + where + ": " + err.what());
    }
    check_finite(name, v, where);
    return v;
}

double centered_derivative(const expr::Expression& e, double a, double lo, double hi)
{
    const double step = 1e-6 * std::max(1.0, std::abs(a));
    const double left = std::max(a - step, lo);
    const double right = std::min(a + step, hi);
    return (e.evaluate(right) - e.evaluate(left)) / (right - left);
}

} // namespace

ModelDefinition load_config(std::string_view text)
{
    std::map<std::string, std::pair<std::string, std::size_t>> values;
    std::size_t lineno = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++lineno;
        std::string_view line = trim(strip_comment(text.substr(start, end - start)));
        start = end + 1;
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ModelError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys))
            throw ModelError("line " + std::to_string(lineno) + ": unknown key " + key);
        if (values.count(key)) throw ModelError("duplicate key " + key);
        if (value.empty()) throw ModelError("empty value for key " + key);
        values.emplace(key, std::make_pair(std::string(value), lineno));
    }

    for (auto key : kKeys)
        if (!values.count(std::string(key))) throw ModelError("missing key " + std::string(key));

    ModelDefinition def;
    {
        std::string_view raw = values["m"].first;
        if (!raw.empty() && raw.front() == '"' && raw.size() >= 2 && raw.back() == '"')
            raw = raw.substr(1, raw.size() - 2);
        double m = 0.0;
        auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), m);
        if (ec != std::errc() || ptr != raw.data() + raw.size())
            throw ModelError("key m: expected a number, got '" + std::string(raw) + "'");
        if (!(m > 0.0) || !std::isfinite(m)) throw ModelError("key m: must be positive");
        def.m = m;
    }
    auto ingredient = [&](const char* key) {
        const auto& [raw, line] = values[key];
        return parse_ingredient(key, raw, line);
    };
    def.beta0 = ingredient("beta0");
    def.beta1 = ingredient("beta1");
    def.beta2 = ingredient("beta2");
    def.b0 = ingredient("b0");
    def.b2 = ingredient("b2");
    def.mu = ingredient("mu");
    def.gamma = ingredient("gamma");
    def.d = ingredient("d");
    return def;
}

ModelDefinition load_config_file(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw ModelError("cannot open config " + path);
    std::stringstream buf;
    buf << is.rdbuf();
    return load_config(buf.str());
}

ValidatedModel validate(const ModelDefinition& def, const ValidationOptions& opts)
{
    if (opts.samples < 2) throw ModelError("validation needs at least 2 samples");
    if (!(def.m > 0.0)) throw ModelError("m must be positive");

    ValidatedModel vm;
    vm.def_ = def;
    vm.samples_ = opts.samples;

    const auto space = linspace(0.0, def.m, opts.samples);
    const auto proportion = linspace(-1.0, 1.0, opts.samples);
    const auto population = linspace(0.0, opts.population_range, opts.samples);

    // Sample a one-argument ingredient, record its minimum, enforce the sign.
    auto certify = [&](const expr::Expression& e, const std::string& name,
                       const std::vector<double>& pts, bool strict) {
        SignCertificate c{name, std::numeric_limits<double>::infinity(), 0.0, pts.size()};
        for (double x : pts) {
            const double v = eval_checked(e, name, x);
            if (strict ? !(v > 0.0) : v < 0.0)
                throw ModelError(name + (strict ? " not positive" : " negative") + " at x=" + fmt(x));
            if (v < c.min_value) {
                c.min_value = v;
                c.argmin = x;
            }
        }
        vm.certs_.push_back(c);
        return c;
    };

    certify(def.beta0, "beta0", population, false);
    certify(def.b0, "b0", population, false);
    certify(def.beta2, "beta2", proportion, false);
    certify(def.b2, "b2", proportion, false);
    vm.mu0_ = certify(def.mu, "mu", space, false).min_value;
    certify(def.d, "d", space, true);
    for (double x : space) eval_checked(def.gamma, "gamma", x);

    SignCertificate k{"beta1", std::numeric_limits<double>::infinity(), 0.0,
                      opts.samples * opts.samples};
    for (double x : space) {
        for (double y : space) {
            const double v = eval_checked(def.beta1, "beta1", x, y);
            if (v < 0.0)
                throw ModelError("beta1 negative at (x,y)=(" + fmt(x) + "," + fmt(y) + ")");
            if (v < k.min_value) {
                k.min_value = v;
                k.argmin = x;
            }
        }
    }
    vm.certs_.push_back(k);

    auto decreasing = [&](const expr::Expression& e, const std::string& name) {
        double prev = eval_checked(e, name, population.front());
        for (std::size_t i = 1; i < population.size(); ++i) {
            const double v = eval_checked(e, name, population[i]);
            if (!(v < prev)) return false;
            prev = v;
        }
        return true;
    };
    auto vanishing = [&](const expr::Expression& e) {
        try {
            const double v = e.evaluate(opts.infinity_probe);
            return std::isfinite(v) && std::abs(v) < opts.vanishing_threshold;
        } catch (const EvalError&) {
            return false;
        }
    };
    vm.beta0_decreasing_ = decreasing(def.beta0, "beta0");
    vm.b0_decreasing_ = decreasing(def.b0, "b0");
    vm.beta0_vanishing_ = vanishing(def.beta0);
    vm.b0_vanishing_ = vanishing(def.b0);
    return vm;
}

SampledIngredients::SampledIngredients(const ValidatedModel& vm, const Grid& grid)
    : grid_(grid)
{
    const auto& def = vm.definition();
    if (grid.m() != vm.m()) throw ModelError("grid length does not match model m");
    beta0_ = def.beta0;
    b0_ = def.b0;
    beta2_ = def.beta2;
    b2_ = def.b2;

    const std::size_t n = grid.cells();
    mu0_ = eval_checked(def.mu, "mu", 0.0);
    mu_.resize(n);
    for (std::size_t i = 1; i <= n; ++i) mu_[i - 1] = eval_checked(def.mu, "mu", grid.center(i));

    gamma_.resize(n + 1);
    d_.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double xi = grid.interface(i);
        gamma_[i] = eval_checked(def.gamma, "gamma", xi);
        d_[i] = eval_checked(def.d, "d", xi);
    }

    const auto ni = static_cast<Eigen::Index>(n);
    beta1_.resize(ni, ni);
    beta1_boundary_.resize(ni);
    for (std::size_t j = 1; j <= n; ++j) {
        const double y = grid.center(j);
        beta1_boundary_(static_cast<Eigen::Index>(j - 1)) = eval_checked(def.beta1, "beta1", 0.0, y);
        for (std::size_t i = 1; i <= n; ++i)
            beta1_(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1)) =
                eval_checked(def.beta1, "beta1", grid.center(i), y);
    }
}

double SampledIngredients::beta0(double total) const { return beta0_.evaluate(total); }
double SampledIngredients::b0(double total) const { return b0_.evaluate(total); }
double SampledIngredients::beta2(double p) const { return beta2_.evaluate(std::clamp(p, -1.0, 1.0)); }
double SampledIngredients::b2(double p) const { return b2_.evaluate(std::clamp(p, -1.0, 1.0)); }

double SampledIngredients::beta0_prime(double total) const
{
    return centered_derivative(beta0_, total, 0.0, std::numeric_limits<double>::infinity());
}

double SampledIngredients::b0_prime(double total) const
{
    return centered_derivative(b0_, total, 0.0, std::numeric_limits<double>::infinity());
}

double SampledIngredients::beta2_prime(double p) const
{
    return centered_derivative(beta2_, std::clamp(p, -1.0, 1.0), -1.0, 1.0);
}

double SampledIngredients::b2_prime(double p) const
{
    return centered_derivative(b2_, std::clamp(p, -1.0, 1.0), -1.0, 1.0);
}

} // namespace wentzell
