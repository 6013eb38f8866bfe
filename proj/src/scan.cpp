#include "abcorr/scan.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <optional>
#include <sstream>
#include <system_error>

#include "abcorr/error.hpp"

namespace abcorr {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_number(std::string_view text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        throw InvalidArgument("not a number: '" + std::string(text) + "'");
    }
    return value;
}

Meta base_meta(const std::string& quantity, const std::string& state, const ScanSettings& s,
               const std::string& dim) {
    return {
        {"quantity", quantity},
        {"state", state},
        {"q", format_real(s.mode_a.q)},
        {"xi", format_real(s.mode_a.xi)},
        {"charge", format_real(s.mode_a.charge)},
        {"omega1", format_real(s.mode_a.omega)},
        {"omega2", format_real(s.mode_b.omega)},
        {"t", format_real(s.time)},
        {"dim", dim},
    };
}

void write_meta(std::ostringstream& os, const Meta& meta) {
    for (const auto& [key, value] : meta) {
        os << "# meta: " << key << '=' << value << '\n';
    }
}

void check_common(const ScanSettings& s) {
    s.mode_a.validate();
    s.mode_b.validate();
    if (s.grid_n < 2) {
        throw InvalidArgument("grid size must be at least 2 per axis");
    }
    if (!std::isfinite(s.time)) {
        throw InvalidArgument("time must be finite");
    }
}

}  // namespace

Quantity parse_quantity(std::string_view name) {
    if (name == "i-sep") return Quantity::i_sep;
    if (name == "r-sep") return Quantity::r_sep;
    if (name == "r-ent") return Quantity::r_ent;
    if (name == "i-ent") return Quantity::i_ent;
    if (name == "i-numeric") return Quantity::i_numeric;
    if (name == "r-numeric") return Quantity::r_numeric;
    throw InvalidArgument("unknown quantity '" + std::string(name) + "'");
}

std::string to_string(Quantity q) {
    switch (q) {
        case Quantity::i_sep: return "i-sep";
        case Quantity::r_sep: return "r-sep";
        case Quantity::r_ent: return "r-ent";
        case Quantity::i_ent: return "i-ent";
        case Quantity::i_numeric: return "i-numeric";
        case Quantity::r_numeric: return "r-numeric";
    }
    return "?";
}

double parse_angle(std::string_view text) {
    text = trim(text);
    if (text.empty()) {
        throw InvalidArgument("empty angle");
    }
    if (text.size() >= 2 && text.substr(text.size() - 2) == "pi") {
        std::string_view coeff = text.substr(0, text.size() - 2);
        double factor = 1.0;
        if (coeff.empty() || coeff == "+") {
            factor = 1.0;
        } else if (coeff == "-") {
            factor = -1.0;
        } else {
            factor = parse_number(coeff);
        }
        return factor * std::numbers::pi;
    }
    return parse_number(text);
}

std::vector<Index> parse_dims(std::string_view text) {
    std::vector<Index> dims;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const std::string_view item = trim(text.substr(0, comma));
        Index value = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
        if (ec != std::errc{} || ptr != item.data() + item.size() || value < 2) {
            throw InvalidArgument("dims must be integers >= 2, got '" + std::string(item) + "'");
        }
        dims.push_back(value);
        if (comma == std::string_view::npos) {
            break;
        }
        text.remove_prefix(comma + 1);
    }
    if (dims.empty()) {
        throw InvalidArgument("no dims given");
    }
    return dims;
}

double half_period_time(const ScanSettings& settings) {
    const double dw = settings.mode_a.omega - settings.mode_b.omega;
    return dw == 0.0 ? 0.0 : std::numbers::pi / dw;
}

TwoModeState resolve_state(std::string_view name, Index dim) {
    if (name == "sep") {
        return make_rho_sep(dim);
    }
    if (name == "ent") {
        return make_rho_ent(dim);
    }
    if (name == "product") {
        const TwoModeState sep = make_rho_sep(dim);
        return make_product(partial_trace(sep, Mode::A), partial_trace(sep, Mode::B));
    }
    return load_state_file(std::filesystem::path(std::string(name)));
}

FringeGrid compute_grid(Quantity quantity, const ScanSettings& settings) {
    check_common(settings);
    FringeGrid grid;
    grid.axis_a = linspace_pi(-2.0, 2.0, settings.grid_n);
    grid.axis_b = grid.axis_a;
    const std::size_t n = grid.axis_a.size();
    grid.values.assign(n * n, 0.0);

    const double q = settings.mode_a.q;
    const double w1 = settings.mode_a.omega;
    const double w2 = settings.mode_b.omega;
    const double t = settings.time;

    const bool numeric = quantity == Quantity::i_numeric || quantity == Quantity::r_numeric;
    std::string state_label;
    std::string dim_label = "closed-form";
    std::optional<ExperimentConfig> config;
    if (numeric) {
        config.emplace(ExperimentConfig{settings.mode_a, settings.mode_b,
                                        resolve_state(settings.state, settings.dim), t});
        state_label = config->state.label();
        dim_label = std::to_string(config->state.dim_a()) + "x" +
                    std::to_string(config->state.dim_b());
    } else {
        state_label = (quantity == Quantity::i_sep || quantity == Quantity::r_sep) ? "sep" : "ent";
    }

    parallel_for(n, settings.threads, [&](std::size_t row) {
        const double sa = grid.axis_a[row];
        for (std::size_t col = 0; col < n; ++col) {
            const double sb = grid.axis_b[col];
            double v = 0.0;
            switch (quantity) {
                case Quantity::i_sep: v = intensity_joint_sep_closed(sa, sb, q); break;
                case Quantity::r_sep: v = ratio_sep_closed(sa, sb, q); break;
                case Quantity::i_ent: v = intensity_joint_ent_closed(sa, sb, q, w1, w2, t); break;
                case Quantity::r_ent: v = ratio_ent_closed(sa, sb, q, w1, w2, t); break;
                case Quantity::i_numeric: v = intensity_joint_numeric(*config, sa, sb); break;
                case Quantity::r_numeric: v = ratio(*config, sa, sb, settings.weyl); break;
            }
            grid.values[row * n + col] = v;
        }
    });

    grid.meta = base_meta(to_string(quantity), state_label, settings, dim_label);
    grid.meta.emplace_back("grid_n", std::to_string(settings.grid_n));
    return grid;
}

SliceTable compute_slice(const ScanSettings& settings, double sigma_b) {
    check_common(settings);
    SliceTable slice;
    slice.sigma_a = linspace_pi(-2.0, 2.0, settings.grid_n);
    const std::size_t n = slice.sigma_a.size();
    slice.r_sep.assign(n, 0.0);
    slice.r_ent.assign(n, 0.0);
    const double q = settings.mode_a.q;
    parallel_for(n, settings.threads, [&](std::size_t i) {
        const double sa = slice.sigma_a[i];
        slice.r_sep[i] = ratio_sep_closed(sa, sigma_b, q);
        slice.r_ent[i] = ratio_ent_closed(sa, sigma_b, q, settings.mode_a.omega,
                                          settings.mode_b.omega, settings.time);
    });
    slice.meta = base_meta("slice", "sep,ent", settings, "closed-form");
    slice.meta.emplace_back("sigma_b", format_real(sigma_b));
    return slice;
}

TimeSeries compute_timeseries(const ScanSettings& settings, double sigma_a, double sigma_b,
                              double t_start, double t_end, int samples) {
    check_common(settings);
    if (samples < 2) {
        throw InvalidArgument("time series needs at least 2 samples");
    }
    if (!std::isfinite(t_start) || !std::isfinite(t_end) || !(t_end > t_start)) {
        throw InvalidArgument("time range must satisfy t_start < t_end");
    }
    TimeSeries ts;
    const auto n = static_cast<std::size_t>(samples);
    ts.times.resize(n);
    ts.r_sep.assign(n, 0.0);
    ts.r_ent.assign(n, 0.0);
    const double span = t_end - t_start;
    for (std::size_t k = 0; k < n; ++k) {
        ts.times[k] = t_start + span * static_cast<double>(k) / static_cast<double>(n);
    }
    for (std::size_t k = 1; k < n; ++k) {
        if (!(ts.times[k] > ts.times[k - 1])) {
            throw InvalidArgument("time range too narrow for the requested sample count");
        }
    }
    const double q = settings.mode_a.q;
    // R_sep carries no time dependence; one evaluation fills the column.
    const double r_sep = ratio_sep_closed(sigma_a, sigma_b, q);
    parallel_for(n, settings.threads, [&](std::size_t k) {
        ts.r_sep[k] = r_sep;
        ts.r_ent[k] = ratio_ent_closed(sigma_a, sigma_b, q, settings.mode_a.omega,
                                       settings.mode_b.omega, ts.times[k]);
    });
    ts.meta = base_meta("timeseries", "sep,ent", settings, "closed-form");
    ts.meta.emplace_back("sigma_a", format_real(sigma_a));
    ts.meta.emplace_back("sigma_b", format_real(sigma_b));
    ts.meta.emplace_back("t_start", format_real(t_start));
    ts.meta.emplace_back("t_end", format_real(t_end));
    return ts;
}

std::string format_real(double value) {
    char buf[64];
    const auto [ptr, ec] =
        std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    if (ec != std::errc{}) {
        throw NumericError("could not format value");
    }
    return std::string(buf, ptr);
}

std::string to_csv(const FringeGrid& grid) {
    std::ostringstream os;
    write_meta(os, grid.meta);
    os << "sigma_a,sigma_b,value\n";
    const std::size_t nb = grid.axis_b.size();
    for (std::size_t i = 0; i < grid.axis_a.size(); ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            os << format_real(grid.axis_a[i]) << ',' << format_real(grid.axis_b[j]) << ','
               << format_real(grid.values[i * nb + j]) << '\n';
        }
    }
    return os.str();
}

std::string to_csv(const SliceTable& slice) {
    std::ostringstream os;
    write_meta(os, slice.meta);
    os << "sigma_a,r_sep,r_ent\n";
    for (std::size_t i = 0; i < slice.sigma_a.size(); ++i) {
        os << format_real(slice.sigma_a[i]) << ',' << format_real(slice.r_sep[i]) << ','
           << format_real(slice.r_ent[i]) << '\n';
    }
    return os.str();
}

std::string to_csv(const TimeSeries& series) {
    std::ostringstream os;
    write_meta(os, series.meta);
    os << "time,r_sep,r_ent\n";
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        os << format_real(series.times[i]) << ',' << format_real(series.r_sep[i]) << ','
           << format_real(series.r_ent[i]) << '\n';
    }
    return os.str();
}

}  // namespace abcorr
