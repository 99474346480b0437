#include "wentzell/cli.hpp"

#include "wentzell/error.hpp"
#include "wentzell/evolve.hpp"
#include "wentzell/model.hpp"
#include "wentzell/spectral.hpp"
#include "wentzell/stability.hpp"
#include "wentzell/steady.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace fs = std::filesystem;

namespace wentzell::cli {

namespace {

struct CommonArgs {
    std::string config;
    std::size_t grid = 64;
    std::size_t samples = 101;
    std::string out;
};

struct SimulateArgs {
    double t_end = 0.0;
    double dt = 0.0;
    std::string initial;
    std::size_t snapshot_stride = 0;
};

struct SteadyArgs {
    std::size_t multistart = 0;
    std::uint64_t seed = 0;
    double fp_tol = 1e-9;
    double bisection_tol = 1e-9;
    double damping = 0.5;
    std::size_t max_iter = 500;
    double spectral_tol = 1e-10;
};

struct StabilityArgs {
    std::string steady;
};

struct SpectralArgs {
    std::string env;
    std::string alpha_scan;
    std::string direction;
    double tol = 1e-10;
};

/// Key=value run record, written once at the end of a command.
class Manifest {
public:
    Manifest(std::string command, const CommonArgs& common)
        : start_(std::chrono::steady_clock::now()), out_(common.out)
    {
        set("command", std::move(command));
        set("config", common.config);
        set("grid", std::to_string(common.grid));
        set("out", common.out);
    }

    void set(const std::string& key, std::string value)
    {
        for (auto& kv : entries_)
            if (kv.first == key) {
                kv.second = std::move(value);
                return;
            }
        entries_.emplace_back(key, std::move(value));
    }

    /// Path inside the output directory, recorded as an artifact.
    std::string artifact(const std::string& name)
    {
        artifacts_.push_back(name);
        return (fs::path(out_) / name).string();
    }

    void commit()
    {
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        std::string list;
        for (const auto& a : artifacts_) list += (list.empty() ? "" : ",") + a;
        list += (list.empty() ? "" : ",") + std::string("manifest.txt");

        const fs::path final_path = fs::path(out_) / "manifest.txt";
        const fs::path tmp = fs::path(out_) / ".manifest.txt.tmp";
        {
            std::ofstream f(tmp);
            if (!f) throw Error("cannot write " + tmp.string());
            for (const auto& [k, v] : entries_) f << k << '=' << v << '\n';
            f << "wall_clock_seconds=" << format_double(wall) << '\n';
            f << "artifacts=" << list << '\n';
            if (!f) throw Error("cannot write " + tmp.string());
        }
        fs::rename(tmp, final_path);
    }

private:
    std::chrono::steady_clock::time_point start_;
    std::string out_;
    std::vector<std::pair<std::string, std::string>> entries_;
    std::vector<std::string> artifacts_;
};

struct Loaded {
    ValidatedModel model;
    Discretization disc;
};

Loaded load(const CommonArgs& a)
{
    if (a.grid < 2) throw ModelError("--grid must be at least 2");
    ValidatedModel vm = validate(load_config_file(a.config), a.samples);
    Grid g(vm.m(), a.grid);
    Discretization disc(vm, g);
    return {std::move(vm), std::move(disc)};
}

void ensure_dir(const std::string& out)
{
    if (out.empty()) throw Error("--out must not be empty");
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) throw Error("cannot create output directory " + out);
}

template <class F>
void write_file(const std::string& path, F&& body)
{
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path);
    body(f);
    if (!f) throw Error("cannot write " + path);
}

std::string tolerances(const SteadyArgs& s)
{
    std::ostringstream os;
    os << "fp_tol:" << format_double(s.fp_tol) << ";bisection_tol:" << format_double(s.bisection_tol)
       << ";spectral_tol:" << format_double(s.spectral_tol) << ";damping:" << format_double(s.damping)
       << ";max_iter:" << s.max_iter;
    return os.str();
}

SteadyOptions steady_options(const SteadyArgs& s)
{
    SteadyOptions o;
    o.fp_tol = s.fp_tol;
    o.bisection_tol = s.bisection_tol;
    o.damping = s.damping;
    o.max_fp_iter = s.max_iter;
    o.spectral.tol = s.spectral_tol;
    o.check();
    return o;
}

int steady_exit(SteadyStatus s)
{
    switch (s) {
    case SteadyStatus::Converged: return kOk;
    case SteadyStatus::TrivialOnly: return kTrivialOnly;
    default: return kNotConverged;
    }
}

// ---- simulate -------------------------------------------------------------

int cmd_simulate(const CommonArgs& c, const SimulateArgs& a, std::ostream& out)
{
    if (!(a.dt > 0.0)) throw ModelError("dt must be positive");
    if (!(a.t_end >= 0.0)) throw ModelError("t-end must be nonnegative");
    const Loaded l = load(c);
    const Grid& g = l.disc.grid();

    PopulationState s0;
    if (!a.initial.empty()) {
        s0 = read_state_csv(a.initial, g);
        if (!s0.is_nonnegative()) throw ModelError("initial state must be nonnegative");
    } else {
        const double v = 1.0 / (g.m() + 1.0);
        s0 = PopulationState::constant(g, v, v);
    }

    const auto steps = static_cast<std::size_t>(std::ceil(a.t_end / a.dt - 1e-9));
    const std::size_t stride = a.snapshot_stride > 0 ? a.snapshot_stride : std::max<std::size_t>(1, steps / 10);

    ensure_dir(c.out);
    Manifest m("simulate", c);
    m.set("tolerances", "dt:" + format_double(a.dt) + ";t_end:" + format_double(a.t_end));
    m.set("seed", "none");
    m.set("initial", a.initial.empty() ? "uniform" : a.initial);

    const Trajectory tr = simulate(l.disc, s0, a.t_end, a.dt, stride);
    write_file(m.artifact("trajectory.csv"), [&](std::ostream& f) { write_trajectory_csv(f, tr); });
    for (std::size_t k = 0; k < tr.snapshots.size(); ++k)
        write_state_csv(m.artifact("snap_" + std::to_string(k) + ".csv"), tr.snapshots[k].state, g);
    write_state_csv(m.artifact("final.csv"), tr.final_state, g);

    const char* end = tr.end == TrajectoryEnd::Completed ? "completed"
                      : tr.end == TrajectoryEnd::BlowUp  ? "blow_up"
                                                         : "extinct";
    m.set("end", end);
    m.commit();

    out << "t=" << format_double(tr.times.back()) << '\n';
    out << "U=" << format_double(total_norm(tr.final_state, g)) << '\n';
    out << "u0=" << format_double(tr.final_state.u0) << '\n';
    out << "end=" << end << '\n';
    return kOk;
}

// ---- steady ---------------------------------------------------------------

int cmd_steady(const CommonArgs& c, const SteadyArgs& a, std::ostream& out, std::ostream& err)
{
    const SteadyOptions opts = steady_options(a);
    const Loaded l = load(c);
    const Grid& g = l.disc.grid();
    ensure_dir(c.out);
    Manifest m("steady", c);
    m.set("tolerances", tolerances(a));
    m.set("seed", a.multistart > 0 ? std::to_string(a.seed) : "none");
    m.set("multistart", std::to_string(a.multistart));

    std::vector<SteadyStateResult> runs;
    if (a.multistart > 0) runs = solve_steady_multistart(l.disc, a.multistart, a.seed, opts);
    else runs.push_back(solve_steady(l.disc, std::nullopt, opts));

    // Lowest start index wins among converged runs.
    std::size_t chosen = 0;
    for (std::size_t k = 0; k < runs.size(); ++k)
        if (runs[k].status == SteadyStatus::Converged) {
            chosen = k;
            break;
        }
    const SteadyStateResult& best = runs[chosen];

    if (runs.size() > 1) {
        for (std::size_t k = 0; k < runs.size(); ++k) {
            write_state_csv(m.artifact("steady_" + std::to_string(k) + ".csv"), runs[k].ustar, g);
            write_file(m.artifact("diagnostics_" + std::to_string(k) + ".txt"),
                       [&](std::ostream& f) { f << "start = " << k << '\n' << steady_report(runs[k]); });
        }
    }
    if (best.status == SteadyStatus::Converged)
        write_state_csv(m.artifact("steady.csv"), best.ustar, g);
    write_file(m.artifact("diagnostics.txt"), [&](std::ostream& f) {
        if (runs.size() > 1) f << "chosen_start = " << chosen << '\n';
        f << steady_report(best);
        f << "iteration,distance,bound_check\n";
        for (const auto& it : best.iterates)
            f << it.iteration << ',' << format_double(it.distance) << ',' << format_double(it.bound_check) << '\n';
    });
    m.set("status", to_string(best.status));
    m.commit();

    out << "status=" << to_string(best.status) << '\n';
    out << "norm=" << format_double(best.norm) << '\n';
    out << "u0=" << format_double(best.ustar.u0) << '\n';
    out << "residual=" << format_double(best.residual) << '\n';
    out << "iterations=" << best.iterates.size() << '\n';
    if (best.status == SteadyStatus::TrivialOnly) err << "trivial steady state only\n";
    else if (best.status != SteadyStatus::Converged) err << "steady state not found: " << best.message << '\n';
    return steady_exit(best.status);
}

// ---- stability ------------------------------------------------------------

int cmd_stability(const CommonArgs& c, const StabilityArgs& a, const SteadyArgs& sa, std::ostream& out,
                  std::ostream& err)
{
    const Loaded l = load(c);
    const Grid& g = l.disc.grid();

    PopulationState ustar;
    if (!a.steady.empty()) {
        ustar = read_state_csv(a.steady, g);
    } else {
        const SteadyStateResult r = solve_steady(l.disc, std::nullopt, steady_options(sa));
        if (r.status != SteadyStatus::Converged) {
            err << (r.status == SteadyStatus::TrivialOnly ? std::string("trivial steady state only")
                                                          : "steady state not found: " + r.message)
                << '\n';
            return steady_exit(r.status);
        }
        ustar = r.ustar;
    }

    const StabilityReport rep = check_stability(l.disc, ustar);
    const std::string text = stability_report(rep);
    out << text;

    if (!c.out.empty()) {
        ensure_dir(c.out);
        Manifest m("stability", c);
        m.set("tolerances", a.steady.empty() ? tolerances(sa) : "verdict_band:" + format_double(kVerdictBand));
        m.set("seed", "none");
        m.set("steady", a.steady.empty() ? "computed" : a.steady);
        if (a.steady.empty()) write_state_csv(m.artifact("steady.csv"), ustar, g);
        write_file(m.artifact("stability.txt"), [&](std::ostream& f) { f << text; });
        m.commit();
    }

    switch (rep.pls_verdict) {
    case Verdict::Stable: return kOk;
    case Verdict::Unstable: return kUnstable;
    case Verdict::Inconclusive: break;
    }
    return kInconclusive;
}

// ---- spectral -------------------------------------------------------------

struct AlphaScan {
    double lo, hi;
    std::size_t steps;
};

AlphaScan parse_scan(const std::string& spec)
{
    const auto a = spec.find(':');
    const auto b = a == std::string::npos ? a : spec.find(':', a + 1);
    if (b == std::string::npos) throw ModelError("--alpha-scan expects lo:hi:steps");
    AlphaScan s{};
    try {
        std::size_t used = 0;
        const std::string lo = spec.substr(0, a), hi = spec.substr(a + 1, b - a - 1), st = spec.substr(b + 1);
        s.lo = std::stod(lo, &used);
        if (used != lo.size()) throw std::invalid_argument(lo);
        s.hi = std::stod(hi, &used);
        if (used != hi.size()) throw std::invalid_argument(hi);
        const long n = std::stol(st, &used);
        if (used != st.size() || n < 2) throw std::invalid_argument(st);
        s.steps = static_cast<std::size_t>(n);
    } catch (const std::logic_error&) {
        throw ModelError("--alpha-scan expects lo:hi:steps with numeric bounds and steps >= 2");
    }
    if (!(s.lo > 0.0 && s.hi > s.lo)) throw ModelError("--alpha-scan requires 0 < lo < hi");
    return s;
}

int cmd_spectral(const CommonArgs& c, const SpectralArgs& a, std::ostream& out)
{
    if (a.env.empty() == a.alpha_scan.empty())
        throw ModelError("spectral needs exactly one of --env or --alpha-scan");
    if (!a.alpha_scan.empty() && a.direction.empty()) throw ModelError("--alpha-scan requires --direction");
    if (!(a.tol > 0.0)) throw ModelError("--tol must be positive");

    const Loaded l = load(c);
    const Grid& g = l.disc.grid();
    SpectralOptions so;
    so.tol = a.tol;

    ensure_dir(c.out);
    Manifest m("spectral", c);
    m.set("tolerances", "spectral_tol:" + format_double(a.tol));
    m.set("seed", "none");

    if (!a.env.empty()) {
        const PopulationState v = read_state_csv(a.env, g);
        if (!v.is_nonnegative()) throw ModelError("environment must be nonnegative");
        const SpectralResult r = spectral_bound(l.disc.fixed_environment(v), so);
        if (!r.converged) throw NumericError("spectral bound did not converge");
        m.set("env", a.env);
        write_state_csv(m.artifact("eigvec.csv"), r.eigvec, g);
        m.commit();
        out << "s=" << format_double(r.bound) << '\n';
        out << "residual=" << format_double(r.residual) << '\n';
        out << "iterations=" << r.iterations << '\n';
        return kOk;
    }

    const AlphaScan scan = parse_scan(a.alpha_scan);
    PopulationState w = read_state_csv(a.direction, g);
    if (!w.is_nonnegative() || w.is_zero()) throw ModelError("direction must be nonnegative and nonzero");
    w = (1.0 / total_norm(w, g)) * w;

    std::vector<std::pair<double, double>> rows;
    for (std::size_t k = 0; k < scan.steps; ++k) {
        const double alpha = scan.lo + (scan.hi - scan.lo) * static_cast<double>(k) / (scan.steps - 1.0);
        const SpectralResult r = spectral_bound(l.disc.fixed_environment(alpha * w), so);
        if (!r.converged) throw NumericError("spectral bound did not converge at alpha=" + format_double(alpha));
        so.start = r.eigvec.coords();
        rows.emplace_back(alpha, r.bound);
    }
    bool decreasing = true;
    for (std::size_t k = 1; k < rows.size(); ++k) decreasing = decreasing && rows[k].second < rows[k - 1].second;

    m.set("alpha_scan", a.alpha_scan);
    m.set("direction", a.direction);
    write_file(m.artifact("alpha_scan.csv"), [&](std::ostream& f) {
        f << "alpha,s\n";
        for (const auto& [al, s] : rows) f << format_double(al) << ',' << format_double(s) << '\n';
    });
    m.commit();
    out << "points=" << rows.size() << '\n';
    out << "s_first=" << format_double(rows.front().second) << '\n';
    out << "s_last=" << format_double(rows.back().second) << '\n';
    out << "strictly_decreasing=" << (decreasing ? "true" : "false") << '\n';
    return kOk;
}

void add_common(CLI::App* sub, CommonArgs& c, bool out_required)
{
    sub->add_option("--config", c.config, "Model configuration file")->required();
    sub->add_option("--grid", c.grid, "Number of cells N")->capture_default_str();
    sub->add_option("--samples", c.samples, "Sample points for coefficient validation")->capture_default_str();
    auto* o = sub->add_option("--out", c.out, "Output directory");
    if (out_required) o->required();
}

void add_steady_tuning(CLI::App* sub, SteadyArgs& s)
{
    sub->add_option("--fp-tol", s.fp_tol, "Fixed-point stopping tolerance")->capture_default_str();
    sub->add_option("--bisection-tol", s.bisection_tol, "Tolerance on |s| at the level set")->capture_default_str();
    sub->add_option("--damping", s.damping, "Damping weight in (0, 1]")->capture_default_str();
    sub->add_option("--max-iter", s.max_iter, "Maximum fixed-point iterations")->capture_default_str();
    sub->add_option("--spectral-tol", s.spectral_tol, "Perron solver tolerance")->capture_default_str();
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Structured epidemic model with a Wentzell boundary compartment", "wentzell"};
    app.require_subcommand(1);

    CommonArgs common;
    SimulateArgs sim;
    SteadyArgs st;
    StabilityArgs stab;
    SpectralArgs spec;

    auto* simulate_cmd = app.add_subcommand("simulate", "Integrate the dynamics in time");
    add_common(simulate_cmd, common, true);
    simulate_cmd->add_option("--t-end", sim.t_end, "Final time")->required();
    simulate_cmd->add_option("--dt", sim.dt, "Time step")->required();
    simulate_cmd->add_option("--initial", sim.initial, "Initial state CSV (default: uniform, unit norm)");
    simulate_cmd->add_option("--snapshot-stride", sim.snapshot_stride, "Steps between snapshots (0: about ten)");

    auto* steady_cmd = app.add_subcommand("steady", "Find the non-trivial steady state");
    add_common(steady_cmd, common, true);
    steady_cmd->add_option("--multistart", st.multistart, "Independent runs from random directions");
    steady_cmd->add_option("--seed", st.seed, "Seed for the random directions");
    add_steady_tuning(steady_cmd, st);

    auto* stability_cmd = app.add_subcommand("stability", "Stability report for a steady state");
    add_common(stability_cmd, common, false);
    stability_cmd->add_option("--steady", stab.steady, "Steady state CSV (default: compute it)");
    add_steady_tuning(stability_cmd, st);

    auto* spectral_cmd = app.add_subcommand("spectral", "Spectral bound of the fixed-environment generator");
    add_common(spectral_cmd, common, true);
    spectral_cmd->add_option("--env", spec.env, "Environment state CSV");
    spectral_cmd->add_option("--alpha-scan", spec.alpha_scan, "lo:hi:steps scan along --direction");
    spectral_cmd->add_option("--direction", spec.direction, "Direction state CSV for --alpha-scan");
    spectral_cmd->add_option("--tol", spec.tol, "Perron solver tolerance")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        if (*simulate_cmd) return cmd_simulate(common, sim, out);
        if (*steady_cmd) return cmd_steady(common, st, out, err);
        if (*stability_cmd) return cmd_stability(common, stab, st, out, err);
        return cmd_spectral(common, spec, out);
    } catch (const NumericError& e) {
        err << "error: " << e.what() << '\n';
        return kNumericFailure;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNumericFailure;
    }
}

} // namespace wentzell::cli
