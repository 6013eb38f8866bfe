#pragma once

// Parameter sweeps over screen phases and time, written as CSV tables with
// a `# meta:` header block so each file is self-describing.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "abcorr/interference.hpp"

namespace abcorr {

enum class Quantity { i_sep, r_sep, r_ent, i_ent, i_numeric, r_numeric };

Quantity parse_quantity(std::string_view name);
std::string to_string(Quantity q);

/// Angle in radians. Accepts plain numbers ("0.5") and multiples of pi
/// with a suffix ("-1.1pi", "pi", "-pi").
double parse_angle(std::string_view text);

/// Comma separated positive integers, e.g. "16,32,64".
std::vector<Index> parse_dims(std::string_view text);

constexpr double kDefaultOmega1 = 1.2e-4;
constexpr double kDefaultOmega2 = 1.0e-4;

struct ScanSettings {
    ModeParams mode_a = ModeParams::from_q(kDefaultOmega1, 0.5);
    ModeParams mode_b = ModeParams::from_q(kDefaultOmega2, 0.5);
    double time = 0.0;
    int grid_n = 101;
    Index dim = 16;
    std::string state = "sep";  // sep | ent | product | path to a state file
    unsigned threads = 0;       // 0: hardware concurrency
    WeylOptions weyl{};
};

/// pi / (omega1 - omega2), the half-period of the entangled cross term;
/// zero when the frequencies coincide.
double half_period_time(const ScanSettings& settings);

/// "sep", "ent", "product" (product of the separable state's marginals)
/// or a state-file path.
TwoModeState resolve_state(std::string_view name, Index dim);

using Meta = std::vector<std::pair<std::string, std::string>>;

struct FringeGrid {
    std::vector<double> axis_a;
    std::vector<double> axis_b;
    std::vector<double> values;  // row-major, sigma_a slow
    Meta meta;
};

struct SliceTable {
    std::vector<double> sigma_a;
    std::vector<double> r_sep;
    std::vector<double> r_ent;
    Meta meta;
};

struct TimeSeries {
    std::vector<double> times;
    std::vector<double> r_sep;
    std::vector<double> r_ent;
    Meta meta;
};

/// Grid over [-2pi, 2pi]^2 with settings.grid_n points per axis.
FringeGrid compute_grid(Quantity quantity, const ScanSettings& settings);

/// R_sep and R_ent closed forms along sigma_a at fixed sigma_b.
SliceTable compute_slice(const ScanSettings& settings, double sigma_b);

/// `samples` uniform times in [t_start, t_end) (end excluded, so an integer
/// number of periods gives an exact DFT grid).
TimeSeries compute_timeseries(const ScanSettings& settings, double sigma_a, double sigma_b,
                              double t_start, double t_end, int samples);

/// 17 significant digits; parsing the text recovers the same double.
std::string format_real(double value);

std::string to_csv(const FringeGrid& grid);
std::string to_csv(const SliceTable& slice);
std::string to_csv(const TimeSeries& series);

/// Runs body(i) for i in [0, n) across worker threads. Results must be
/// written to per-index slots; the first exception by index is rethrown.
template <typename Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    std::vector<std::exception_ptr> errors(n);
    auto worker = [&](unsigned id) {
        for (std::size_t i = id; i < n; i += threads) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker, t);
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace abcorr
