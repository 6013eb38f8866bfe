// abcorr: parameter sweeps, invariant checks and q calibration for two
// electron interference experiments driven by a correlated two-mode field.
//
// Exit codes: 0 success, 1 numeric or validation failure, 2 usage error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "abcorr/error.hpp"
#include "abcorr/interference.hpp"
#include "abcorr/scan.hpp"
#include "abcorr/validation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Reference extrema of the separable-state ratio map; default calibration
// targets.
constexpr double kReferenceRsepMin = 0.7557;
constexpr double kReferenceRsepMax = 0.995;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Flags {
    std::string quantity;
    std::string state = "sep";
    std::optional<double> q;
    double xi = 1.0;
    std::optional<double> charge;
    double omega1 = abcorr::kDefaultOmega1;
    double omega2 = abcorr::kDefaultOmega2;
    std::optional<std::string> time;
    std::optional<std::string> sigma_a;
    std::optional<std::string> sigma_b;
    int grid_n = 101;
    int t_samples = 1024;
    std::optional<std::string> t_start;
    std::optional<std::string> t_end;
    std::string dims = "16";
    double tol = 1e-12;
    std::string out;
    bool perturb = false;
    std::string which;
    double target = 0.0;
    std::optional<double> other_target;
    unsigned threads = 0;
};

double angle_or(const std::optional<std::string>& text, double fallback) {
    if (!text) {
        return fallback;
    }
    try {
        return abcorr::parse_angle(*text);
    } catch (const abcorr::InvalidArgument& e) {
        throw UsageError(e.what());
    }
}

abcorr::ScanSettings make_settings(const Flags& f) {
    abcorr::ScanSettings s;
    try {
        double q = f.q.value_or(0.5);
        if (f.charge) {
            const double from_charge = f.xi * *f.charge / std::numbers::sqrt2;
            if (f.q && std::abs(*f.q - from_charge) > 1e-14 * std::max(1.0, *f.q)) {
                throw UsageError("--q disagrees with --xi * --charge / sqrt(2)");
            }
            s.mode_a = abcorr::ModeParams::from_charge(f.omega1, f.xi, *f.charge);
            s.mode_b = abcorr::ModeParams::from_charge(f.omega2, f.xi, *f.charge);
        } else {
            s.mode_a = abcorr::ModeParams::from_q(f.omega1, q, f.xi);
            s.mode_b = abcorr::ModeParams::from_q(f.omega2, q, f.xi);
        }
        const auto dims = abcorr::parse_dims(f.dims);
        s.dim = dims.front();
        s.weyl.policy.tol = f.tol;
        s.weyl.policy.validate();
    } catch (const abcorr::InvalidArgument& e) {
        throw UsageError(e.what());
    }
    if (f.grid_n < 2) {
        throw UsageError("--grid-n must be at least 2");
    }
    s.grid_n = f.grid_n;
    s.state = f.state;
    s.threads = f.threads;
    s.time = angle_or(f.time, abcorr::half_period_time(s));
    return s;
}

int emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << text;
        return std::cout ? kExitOk : kExitFailure;
    }
    std::ofstream file(out, std::ios::binary | std::ios::trunc);
    if (!file) {
        std::cerr << "error: cannot open " << out << " for writing\n";
        return kExitFailure;
    }
    file << text;
    return file ? kExitOk : kExitFailure;
}

int run_grid(const Flags& f) {
    abcorr::Quantity quantity{};
    try {
        quantity = abcorr::parse_quantity(f.quantity);
    } catch (const abcorr::InvalidArgument& e) {
        throw UsageError(e.what());
    }
    const auto settings = make_settings(f);
    return emit(abcorr::to_csv(abcorr::compute_grid(quantity, settings)), f.out);
}

int run_slice(const Flags& f) {
    const auto settings = make_settings(f);
    const double sigma_b = angle_or(f.sigma_b, -1.1 * std::numbers::pi);
    return emit(abcorr::to_csv(abcorr::compute_slice(settings, sigma_b)), f.out);
}

int run_timeseries(const Flags& f) {
    const auto settings = make_settings(f);
    const double sigma_a = angle_or(f.sigma_a, 0.98 * std::numbers::pi);
    const double sigma_b = angle_or(f.sigma_b, -1.1 * std::numbers::pi);
    if (f.t_samples < 2) {
        throw UsageError("--t-samples must be at least 2");
    }
    const double t_start = angle_or(f.t_start, 0.0);
    const double dw = std::abs(settings.mode_a.omega - settings.mode_b.omega);
    // Two beat periods by default, or a fixed window when there is no beat.
    const double default_span = dw > 0.0 ? 2.0 * 2.0 * std::numbers::pi / dw : 1e5;
    const double t_end = angle_or(f.t_end, t_start + default_span);
    return emit(abcorr::to_csv(abcorr::compute_timeseries(settings, sigma_a, sigma_b, t_start,
                                                          t_end, f.t_samples)),
                f.out);
}

int run_validate(const Flags& f) {
    abcorr::ValidateOptions opts;
    opts.perturb = f.perturb;
    opts.threads = f.threads;
    try {
        opts.dims = abcorr::parse_dims(f.dims);
    } catch (const abcorr::InvalidArgument& e) {
        throw UsageError(e.what());
    }
    const auto results = abcorr::run_validation(opts);
    const int rc = emit(abcorr::format_report(results), f.out);
    if (rc != kExitOk) {
        return rc;
    }
    return abcorr::all_passed(results) ? kExitOk : kExitFailure;
}

int run_calibrate(const Flags& f) {
    abcorr::BoundKind which{};
    if (f.which == "min") {
        which = abcorr::BoundKind::min;
    } else if (f.which == "max") {
        which = abcorr::BoundKind::max;
    } else {
        throw UsageError("--which must be min or max");
    }
    const auto c = abcorr::calibrate_q(f.target, which);
    const bool min_side = which == abcorr::BoundKind::min;
    const double other_ref =
        f.other_target.value_or(min_side ? kReferenceRsepMax : kReferenceRsepMin);
    const double other_value = min_side ? c.bounds.upper : c.bounds.lower;
    const double cross = other_value - other_ref;

    std::string report;
    auto line = [&](const std::string& key, const std::string& value) {
        report += key + '=' + value + '\n';
    };
    line("which", f.which);
    line("target", abcorr::format_real(c.target));
    line("q", abcorr::format_real(c.q));
    line("charge_at_xi", abcorr::format_real(c.q * std::numbers::sqrt2 / f.xi));
    line("xi", abcorr::format_real(f.xi));
    line("min_bound", abcorr::format_real(c.bounds.lower));
    line("max_bound", abcorr::format_real(c.bounds.upper));
    line("residual", abcorr::format_real(c.residual));
    line(min_side ? "reference_max" : "reference_min", abcorr::format_real(other_ref));
    line("cross_residual", abcorr::format_real(cross));
    line("reconciled_within_1e-3", std::abs(cross) <= 1e-3 ? "yes" : "no");
    return emit(report, f.out);
}

void add_model_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--q", f.q, "dimensionless coupling q = xi*e/sqrt(2) (default 0.5)");
    cmd->add_option("--xi", f.xi, "loop constant xi")->capture_default_str();
    cmd->add_option("--charge", f.charge, "electron charge e; sets q = xi*e/sqrt(2)");
    cmd->add_option("--omega1", f.omega1, "frequency of the mode seen by experiment A")
        ->capture_default_str();
    cmd->add_option("--omega2", f.omega2, "frequency of the mode seen by experiment B")
        ->capture_default_str();
    cmd->add_option("--time", f.time, "dimensionless time (default pi/(omega1-omega2))");
    cmd->add_option("--threads", f.threads, "worker threads (0: all cores)");
    cmd->add_option("--out", f.out, "output file (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Correlated electron interference under a two-mode quantized field"};
    app.require_subcommand(1);
    Flags f;

    auto* grid = app.add_subcommand("grid", "sample a quantity over (sigma_a, sigma_b)");
    grid->add_option("--quantity", f.quantity, "i-sep | r-sep | r-ent | i-ent | i-numeric | r-numeric")
        ->required();
    grid->add_option("--state", f.state, "sep | ent | product | FILE (numeric quantities)")
        ->capture_default_str();
    grid->add_option("--grid-n", f.grid_n, "points per axis over [-2pi, 2pi]")->capture_default_str();
    grid->add_option("--dims", f.dims, "truncation dimension per mode")->capture_default_str();
    grid->add_option("--tol", f.tol, "truncation convergence tolerance")->capture_default_str();
    add_model_flags(grid, f);

    auto* slice = app.add_subcommand("slice", "R_sep and R_ent along sigma_a at fixed sigma_b");
    slice->add_option("--sigma-b", f.sigma_b, "fixed sigma_b (default -1.1pi)");
    slice->add_option("--grid-n", f.grid_n, "points over [-2pi, 2pi]")->capture_default_str();
    add_model_flags(slice, f);

    auto* ts = app.add_subcommand("timeseries", "R_sep and R_ent against time");
    ts->add_option("--sigma-a", f.sigma_a, "screen phase A (default 0.98pi)");
    ts->add_option("--sigma-b", f.sigma_b, "screen phase B (default -1.1pi)");
    ts->add_option("--t-samples", f.t_samples, "number of samples")->capture_default_str();
    ts->add_option("--t-start", f.t_start, "first sample time (default 0)");
    ts->add_option("--t-end", f.t_end, "end of the window, excluded (default two beat periods)");
    add_model_flags(ts, f);

    auto* validate = app.add_subcommand("validate", "run the invariant suite");
    validate->add_flag("--perturb", f.perturb, "negate the entangled state's coherences");
    validate->add_option("--dims", f.dims, "truncation dims to compare, e.g. 16,32,64")
        ->default_val("16,32,64");
    validate->add_option("--threads", f.threads, "worker threads (0: all cores)");
    validate->add_option("--out", f.out, "report file (default stdout)");

    auto* calibrate = app.add_subcommand("calibrate", "recover q from an R_sep extremum");
    calibrate->add_option("--which", f.which, "min | max")->required();
    calibrate->add_option("--target", f.target, "target bound value")->required();
    calibrate->add_option("--other-target", f.other_target,
                          "reference for the opposite bound (default 0.995 / 0.7557)");
    calibrate->add_option("--xi", f.xi, "loop constant used to report the charge")
        ->capture_default_str();
    calibrate->add_option("--out", f.out, "report file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*grid) return run_grid(f);
        if (*slice) return run_slice(f);
        if (*ts) return run_timeseries(f);
        if (*validate) return run_validate(f);
        if (*calibrate) return run_calibrate(f);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const abcorr::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}
