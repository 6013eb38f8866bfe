#include "abcorr/interference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "abcorr/error.hpp"

namespace abcorr {

namespace {

constexpr double kDegenerateProduct = 1e-12;
constexpr double kImaginaryResidue = 1e-8;
constexpr double kCalibrationTol = 1e-9;
constexpr double kCalibrationQMax = 2.0;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

// 1 + (e^{i sigma} D(lambda) + e^{-i sigma} D(-lambda)) / 2
Matrix fringe_operator(Complex lambda, double sigma, Index dim) {
    const Complex phase = std::polar(1.0, sigma);
    Matrix op = 0.5 * (phase * displacement_analytic(lambda, dim).matrix() +
                       std::conj(phase) * displacement_analytic(-lambda, dim).matrix());
    op.diagonal().array() += 1.0;
    return op;
}

double checked_denominator(double denom, double sigma_a, double sigma_b) {
    if (std::abs(denom) < kDegenerateProduct) {
        std::ostringstream os;
        os << "marginal intensity product " << denom << " vanishes at sigma_a=" << sigma_a
           << ", sigma_b=" << sigma_b;
        throw DegeneracyError(sigma_a, sigma_b, os.str());
    }
    return denom;
}

double bound_value(double q, BoundKind which) {
    const Bounds b = rsep_bounds(q);
    return which == BoundKind::min ? b.lower : b.upper;
}

// Golden-section minimisation of f on [lo, hi].
template <typename F>
double golden_minimize(F&& f, double lo, double hi, int iterations = 80) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    for (int i = 0; i < iterations; ++i) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    return 0.5 * (lo + hi);
}

Extremum refine(Extremum start, double step, double sign, double q) {
    // sign = +1 minimises R, -1 maximises it.
    Extremum best = start;
    for (int sweep = 0; sweep < 4; ++sweep) {
        const double sa = golden_minimize(
            [&](double s) { return sign * ratio_sep_closed(s, best.sigma_b, q); },
            best.sigma_a - step, best.sigma_a + step);
        if (sign * ratio_sep_closed(sa, best.sigma_b, q) < sign * best.value) {
            best.sigma_a = sa;
            best.value = ratio_sep_closed(sa, best.sigma_b, q);
        }
        const double sb = golden_minimize(
            [&](double s) { return sign * ratio_sep_closed(best.sigma_a, s, q); },
            best.sigma_b - step, best.sigma_b + step);
        if (sign * ratio_sep_closed(best.sigma_a, sb, q) < sign * best.value) {
            best.sigma_b = sb;
            best.value = ratio_sep_closed(best.sigma_a, sb, q);
        }
    }
    return best;
}

}  // namespace

ModeParams ModeParams::from_q(double omega, double q, double xi) {
    ModeParams p;
    p.omega = omega;
    p.xi = xi;
    p.q = q;
    p.charge = q * std::numbers::sqrt2 / xi;
    p.validate();
    return p;
}

ModeParams ModeParams::from_charge(double omega, double xi, double charge) {
    ModeParams p;
    p.omega = omega;
    p.xi = xi;
    p.charge = charge;
    p.q = xi * charge / std::numbers::sqrt2;
    p.validate();
    return p;
}

void ModeParams::validate() const {
    if (!std::isfinite(omega) || !(omega > 0.0)) {
        throw InvalidArgument("mode frequency must be positive");
    }
    if (!std::isfinite(xi) || !(xi > 0.0)) {
        throw InvalidArgument("loop constant xi must be positive");
    }
    if (!std::isfinite(q) || q < 0.0 || !std::isfinite(charge)) {
        throw InvalidArgument("coupling q must be finite and non-negative");
    }
    if (std::abs(q - xi * charge / std::numbers::sqrt2) > 1e-14 * std::max(1.0, q)) {
        throw InvalidArgument("q is inconsistent with xi * charge / sqrt(2)");
    }
}

Complex lambda_of(const ModeParams& params, double time) {
    return Complex(0.0, params.q) * std::polar(1.0, params.omega * time);
}

double intensity_single(const FockOperator& rho_mode, double sigma, const ModeParams& params,
                        double time, const WeylOptions& options) {
    params.validate();
    const WeylValue w = weyl_single(rho_mode, lambda_of(params, time), options);
    return 1.0 + w.magnitude * std::cos(sigma + w.phase);
}

double intensity_joint_numeric(const ExperimentConfig& config, double sigma_a, double sigma_b) {
    config.mode_a.validate();
    config.mode_b.validate();
    const TwoModeState& rho = config.state;
    // Closed-form matrix elements are exact per entry, so the state's own
    // dimensions suffice for the trace.
    const Matrix fa = fringe_operator(lambda_of(config.mode_a, config.time), sigma_a, rho.dim_a());
    const Matrix fb = fringe_operator(lambda_of(config.mode_b, config.time), sigma_b, rho.dim_b());
    const Complex value = trace_two_mode(rho, fa, fb);
    if (std::abs(value.imag()) > kImaginaryResidue) {
        throw ConsistencyError("joint intensity has imaginary residue " + fmt(value.imag()));
    }
    return value.real();
}

double ratio(const ExperimentConfig& config, double sigma_a, double sigma_b,
             const WeylOptions& options) {
    const double joint = intensity_joint_numeric(config, sigma_a, sigma_b);
    const double ia = intensity_single(partial_trace(config.state, Mode::A), sigma_a,
                                       config.mode_a, config.time, options);
    const double ib = intensity_single(partial_trace(config.state, Mode::B), sigma_b,
                                       config.mode_b, config.time, options);
    return joint / checked_denominator(ia * ib, sigma_a, sigma_b);
}

double alpha(double q) {
    const double q2 = q * q;
    return 0.5 * (2.0 - q2) * std::exp(-0.5 * q2);
}

double beta(double q) {
    const double q2 = q * q;
    return 0.5 * (1.0 - q2) * std::exp(-q2);
}

double intensity_single_sep_closed(double sigma, double q) {
    return 1.0 + alpha(q) * std::cos(sigma);
}

double intensity_joint_sep_closed(double sigma_a, double sigma_b, double q) {
    const double ca = std::cos(sigma_a);
    const double cb = std::cos(sigma_b);
    return 1.0 + alpha(q) * (ca + cb) + 2.0 * beta(q) * ca * cb;
}

double intensity_joint_ent_closed(double sigma_a, double sigma_b, double q, double omega1,
                                  double omega2, double time) {
    const double q2 = q * q;
    return intensity_joint_sep_closed(sigma_a, sigma_b, q) +
           q2 * std::exp(-q2) * std::sin(sigma_a) * std::sin(sigma_b) *
               std::cos((omega1 - omega2) * time);
}

double ratio_sep_closed(double sigma_a, double sigma_b, double q) {
    const double a = alpha(q);
    const double denom = (1.0 + a * std::cos(sigma_a)) * (1.0 + a * std::cos(sigma_b));
    return intensity_joint_sep_closed(sigma_a, sigma_b, q) /
           checked_denominator(denom, sigma_a, sigma_b);
}

double ratio_ent_closed(double sigma_a, double sigma_b, double q, double omega1, double omega2,
                        double time) {
    const double a = alpha(q);
    const double q2 = q * q;
    const double denom = checked_denominator(
        (1.0 + a * std::cos(sigma_a)) * (1.0 + a * std::cos(sigma_b)), sigma_a, sigma_b);
    return ratio_sep_closed(sigma_a, sigma_b, q) +
           q2 * std::exp(-q2) * std::sin(sigma_a) * std::sin(sigma_b) *
               std::cos((omega1 - omega2) * time) / denom;
}

Bounds rsep_bounds(double q) {
    if (!std::isfinite(q) || q < 0.0) {
        throw InvalidArgument("q must be finite and non-negative");
    }
    if (q == 0.0) {
        throw DegeneracyError(std::numbers::pi, std::numbers::pi,
                              "lower R_sep bound is 0/0 at q = 0");
    }
    const double q2 = q * q;
    // With u = e^{-q^2/2}:  1 - alpha = (1-u) + q^2 u/2  and
    // 1 - 2 alpha + 2 beta = (1-u) ((1-u) + q^2 u).
    const double u = std::exp(-0.5 * q2);
    const double one_minus_u = -std::expm1(-0.5 * q2);
    const double one_minus_alpha = one_minus_u + 0.5 * q2 * u;
    Bounds b;
    b.lower = one_minus_u * (one_minus_u + q2 * u) / (one_minus_alpha * one_minus_alpha);
    const double a = alpha(q);
    b.upper = (1.0 + 2.0 * a + 2.0 * beta(q)) / ((1.0 + a) * (1.0 + a));
    return b;
}

Calibration calibrate_q(double target, BoundKind which) {
    if (!std::isfinite(target)) {
        throw InvalidArgument("calibration target must be finite");
    }
    // Quadratic spacing puts the first sample at q ~ 5e-7 so targets just
    // above the q -> 0 limit are still bracketed.
    constexpr int samples = 2000;
    auto q_at = [](int k) {
        const double s = static_cast<double>(k) / samples;
        return kCalibrationQMax * s * s;
    };
    auto f = [&](double q) { return bound_value(q, which) - target; };

    double range_lo = which == BoundKind::min ? 0.75 : 1.0;  // q -> 0 limits
    double range_hi = range_lo;
    double prev_q = q_at(1);
    double prev_f = f(prev_q);
    range_lo = std::min(range_lo, prev_f + target);
    range_hi = std::max(range_hi, prev_f + target);
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    bool found = prev_f == 0.0;
    if (found) {
        bracket_lo = bracket_hi = prev_q;
    }
    for (int k = 2; k <= samples; ++k) {
        const double q = q_at(k);
        const double fq = f(q);
        range_lo = std::min(range_lo, fq + target);
        range_hi = std::max(range_hi, fq + target);
        if (!found && (fq == 0.0 || (fq > 0.0) != (prev_f > 0.0))) {
            found = true;
            bracket_lo = prev_q;
            bracket_hi = q;
        }
        prev_q = q;
        prev_f = fq;
    }
    if (!found) {
        std::ostringstream os;
        os << "no q in (0, " << kCalibrationQMax << "] gives "
           << (which == BoundKind::min ? "min" : "max") << " bound " << target
           << "; attainable range is [" << fmt(range_lo) << ", " << fmt(range_hi) << "]";
        throw NoRootError(range_lo, range_hi, os.str());
    }

    double q = bracket_lo;
    if (bracket_hi != bracket_lo) {
        std::uintmax_t max_iter = 200;
        const auto [lo, hi] = boost::math::tools::toms748_solve(
            f, bracket_lo, bracket_hi, boost::math::tools::eps_tolerance<double>(52), max_iter);
        q = std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
    }
    Calibration c{which, target, q, rsep_bounds(q), f(q)};
    if (std::abs(c.residual) > kCalibrationTol) {
        throw NumericError("calibration residual " + fmt(c.residual) + " exceeds 1e-9");
    }
    return c;
}

std::vector<double> linspace_pi(double lo_pi, double hi_pi, int n) {
    if (n < 2) {
        throw InvalidArgument("a grid axis needs at least 2 points");
    }
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double units = lo_pi + (hi_pi - lo_pi) * static_cast<double>(k) /
                                         static_cast<double>(n - 1);
        out[static_cast<std::size_t>(k)] = units * std::numbers::pi;
    }
    return out;
}

RsepExtrema locate_rsep_extrema(double q, int grid_n) {
    const std::vector<double> axis = linspace_pi(-2.0, 2.0, grid_n);
    const double step = axis[1] - axis[0];

    std::vector<Extremum> all;
    all.reserve(axis.size() * axis.size());
    RsepExtrema out{};
    out.grid_min.value = std::numeric_limits<double>::infinity();
    out.grid_max.value = -std::numeric_limits<double>::infinity();
    for (double sa : axis) {
        for (double sb : axis) {
            const Extremum e{sa, sb, ratio_sep_closed(sa, sb, q)};
            all.push_back(e);
            if (e.value < out.grid_min.value) {
                out.grid_min = e;
            }
            if (e.value > out.grid_max.value) {
                out.grid_max = e;
            }
        }
    }
    for (const auto& e : all) {
        if (e.value - out.grid_min.value <= 1e-12) {
            out.grid_argmin.push_back(e);
        }
        if (out.grid_max.value - e.value <= 1e-12) {
            out.grid_argmax.push_back(e);
        }
    }
    out.refined_min = refine(out.grid_min, step, 1.0, q);
    out.refined_max = refine(out.grid_max, step, -1.0, q);
    return out;
}

}  // namespace abcorr
