#include "abcorr/validation.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "abcorr/error.hpp"
#include "abcorr/interference.hpp"
#include "abcorr/scan.hpp"
#include "abcorr/weyl.hpp"

namespace abcorr {

namespace {

using Rng = std::mt19937_64;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Complex random_lambda(Rng& rng, double max_abs) {
    const double r = max_abs * std::sqrt(uniform(rng, 0.0, 1.0));
    return std::polar(r, uniform(rng, -std::numbers::pi, std::numbers::pi));
}

FockOperator random_density(Index dim, Rng& rng) {
    std::normal_distribution<double> g;
    Matrix a(dim, dim);
    for (Index i = 0; i < dim; ++i) {
        for (Index j = 0; j < dim; ++j) {
            a(i, j) = Complex(g(rng), g(rng));
        }
    }
    Matrix rho = a * a.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint());
    return FockOperator(std::move(rho));
}

FockOperator random_diagonal_density(Index dim, Rng& rng) {
    Matrix rho = Matrix::Zero(dim, dim);
    double total = 0.0;
    for (Index i = 0; i < dim; ++i) {
        const double p = uniform(rng, 0.0, 1.0);
        rho(i, i) = p;
        total += p;
    }
    rho /= total;
    return FockOperator(std::move(rho));
}

std::string sci(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(3) << v;
    return os.str();
}

CheckResult bounded(std::string name, double residual, double tol, std::string detail = {}) {
    CheckResult r;
    r.name = std::move(name);
    r.residual = residual;
    r.tolerance = tol;
    r.passed = std::isfinite(residual) && residual <= tol;
    r.detail = std::move(detail);
    return r;
}

// Runs a check body, turning library exceptions into failures.
CheckResult guarded(const std::string& name, const std::function<CheckResult()>& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        CheckResult r;
        r.name = name;
        r.passed = false;
        r.residual = std::numeric_limits<double>::infinity();
        r.detail = std::string("exception: ") + e.what();
        return r;
    }
}

struct Context {
    const ValidateOptions& options;
    Rng rng;
    Index dim;  // working truncation for two-mode states
    TwoModeState sep;
    TwoModeState ent;  // possibly perturbed
    ModeParams mode_a;
    ModeParams mode_b;
};

CheckResult check_displacement_paths(Context& ctx) {
    double worst = 0.0;
    for (Index dim : {Index{32}, Index{64}}) {
        for (int s = 0; s < 20; ++s) {
            const Complex lambda = random_lambda(ctx.rng, 1.0);
            const Matrix diff =
                displacement_exp(lambda, dim).matrix() - displacement_analytic(lambda, dim).matrix();
            worst = std::max(worst, diff.topLeftCorner(dim / 2, dim / 2).cwiseAbs().maxCoeff());
        }
    }
    return bounded("fock: exponential and analytic displacement agree on half block", worst, 1e-10,
                   "20 random |lambda|<=1 at dims 32, 64");
}

CheckResult check_partial_trace(Context& ctx) {
    double worst = 0.0;
    std::vector<TwoModeState> states{ctx.sep, ctx.ent};
    for (int s = 0; s < 5; ++s) {
        states.push_back(make_product(random_density(3, ctx.rng), random_density(4, ctx.rng)));
    }
    for (const auto& rho : states) {
        const Complex tr = rho.matrix().trace();
        for (Mode keep : {Mode::A, Mode::B}) {
            worst = std::max(worst, std::abs(partial_trace(rho, keep).trace() - tr));
        }
    }
    return bounded("fock: partial trace preserves the trace", worst, 1e-14);
}

CheckResult check_number_spectrum(Context& ctx) {
    double worst = 0.0;
    for (Index dim : {Index{2}, ctx.dim, Index{64}}) {
        const Matrix n = (make_creation(dim) * make_annihilation(dim)).matrix();
        Matrix expected = Matrix::Zero(dim, dim);
        for (Index m = 0; m < dim; ++m) {
            expected(m, m) = static_cast<double>(m);
        }
        worst = std::max(worst, (n - expected).cwiseAbs().maxCoeff());
    }
    return bounded("fock: number operator spectrum is 0..dim-1", worst, 1e-12);
}

CheckResult check_truncation_doubling(Context& ctx) {
    std::vector<Complex> lambdas;
    for (int s = 0; s < 8; ++s) {
        lambdas.push_back(random_lambda(ctx.rng, 1.0));
    }
    std::vector<Complex> reference;
    double worst = 0.0;
    std::ostringstream detail;
    detail << "dims";
    for (Index dim : ctx.options.dims) {
        detail << ' ' << dim;
        const FockOperator marginal = partial_trace(make_rho_sep(dim), Mode::A);
        for (DisplacementPath path : {DisplacementPath::analytic, DisplacementPath::exponential}) {
            WeylOptions opts;
            opts.path = path;
            opts.policy.initial_dim = dim;
            opts.policy.max_dim = 4 * dim;
            for (std::size_t s = 0; s < lambdas.size(); ++s) {
                const Complex w = weyl_single(marginal, lambdas[s], opts).value;
                if (reference.size() <= s) {
                    reference.push_back(w);
                } else {
                    worst = std::max(worst, std::abs(w - reference[s]));
                }
            }
        }
    }
    detail << ", analytic and exponential paths";
    return bounded("weyl: values unchanged across truncation dims", worst, 1e-12, detail.str());
}

CheckResult check_constructors(Context& ctx) {
    for (Index dim : ctx.options.dims) {
        (void)make_rho_sep(dim);
        (void)make_rho_ent(dim);
    }
    (void)make_product(random_density(4, ctx.rng), random_density(3, ctx.rng));
    return bounded("states: constructors pass hermiticity/trace/positivity", 0.0, 0.0);
}

CheckResult check_ppt_separable(Context& ctx) {
    double lowest = ppt_min_eigenvalue(ctx.sep);
    const TwoModeState product =
        make_product(partial_trace(ctx.sep, Mode::A), partial_trace(ctx.sep, Mode::B));
    lowest = std::min(lowest, ppt_min_eigenvalue(product));
    for (int s = 0; s < 3; ++s) {
        lowest = std::min(lowest, ppt_min_eigenvalue(make_product(random_density(3, ctx.rng),
                                                                  random_density(3, ctx.rng))));
    }
    return bounded("states: partial transpose of separable/product states is PSD",
                   std::max(0.0, -lowest), 1e-10, "min eigenvalue " + sci(lowest));
}

CheckResult check_projector(Context& ctx) {
    const Matrix& r = ctx.ent.matrix();
    return bounded("states: entangled state is a projector", (r * r - r).cwiseAbs().maxCoeff(),
                   1e-12);
}

CheckResult check_marginals(Context& ctx) {
    double worst = 0.0;
    for (Mode keep : {Mode::A, Mode::B}) {
        worst = std::max(worst, (partial_trace(ctx.sep, keep).matrix() -
                                 partial_trace(ctx.ent, keep).matrix())
                                    .cwiseAbs()
                                    .maxCoeff());
    }
    return bounded("states: separable and entangled marginals agree", worst, 1e-14);
}

CheckResult check_weyl_magnitude(Context& ctx) {
    double worst = 0.0;
    for (int s = 0; s < 30; ++s) {
        const FockOperator rho = random_density(8, ctx.rng);
        worst = std::max(worst, weyl_single(rho, random_lambda(ctx.rng, 2.0)).magnitude - 1.0);
    }
    return bounded("weyl: |W| <= 1 for random states, |lambda| <= 2", std::max(0.0, worst), 1e-10);
}

CheckResult check_weyl_conjugation(Context& ctx) {
    double worst = 0.0;
    for (int s = 0; s < 30; ++s) {
        const FockOperator rho = random_density(6, ctx.rng);
        const Complex lambda = random_lambda(ctx.rng, 2.0);
        worst = std::max(worst, std::abs(weyl_single(rho, -lambda).value -
                                         std::conj(weyl_single(rho, lambda).value)));
    }
    return bounded("weyl: W(-lambda) = conj W(lambda)", worst, 1e-12);
}

CheckResult check_weyl_factorization(Context& ctx) {
    double worst = 0.0;
    for (int s = 0; s < 10; ++s) {
        const FockOperator ra = random_density(4, ctx.rng);
        const FockOperator rb = random_density(5, ctx.rng);
        const TwoModeState rho = make_product(ra, rb);
        const Complex la = random_lambda(ctx.rng, 1.5);
        const Complex lb = random_lambda(ctx.rng, 1.5);
        const Complex joint = weyl_two(rho, la, lb).value;
        worst = std::max(worst, std::abs(joint - weyl_single(ra, la).value * weyl_single(rb, lb).value));
    }
    return bounded("weyl: two-mode values factorize on product states", worst, 1e-12);
}

CheckResult check_periodicity(Context& ctx) {
    const double q = ctx.mode_a.q;
    const double w1 = ctx.mode_a.omega;
    const double w2 = ctx.mode_b.omega;
    double worst = 0.0;
    for (int s = 0; s < 40; ++s) {
        const double sa = uniform(ctx.rng, -kTwoPi, kTwoPi);
        const double sb = uniform(ctx.rng, -kTwoPi, kTwoPi);
        const double t = uniform(ctx.rng, 0.0, 1e5);
        const ExperimentConfig sep{ctx.mode_a, ctx.mode_b, ctx.sep, t};
        const ExperimentConfig ent{ctx.mode_a, ctx.mode_b, ctx.ent, t};
        const std::vector<std::function<double(double, double)>> fs{
            [&](double a, double b) { return intensity_joint_sep_closed(a, b, q); },
            [&](double a, double b) { return intensity_joint_ent_closed(a, b, q, w1, w2, t); },
            [&](double a, double b) { return ratio_sep_closed(a, b, q); },
            [&](double a, double b) { return ratio_ent_closed(a, b, q, w1, w2, t); },
            [&](double a, double b) { return intensity_joint_numeric(sep, a, b); },
            [&](double a, double b) { return intensity_joint_numeric(ent, a, b); },
            [&](double a, double b) { return ratio(ent, a, b); },
        };
        for (const auto& f : fs) {
            const double base = f(sa, sb);
            worst = std::max(worst, std::abs(f(sa + kTwoPi, sb) - base));
            worst = std::max(worst, std::abs(f(sa, sb + kTwoPi) - base));
        }
    }
    return bounded("interference: intensities and ratios are 2pi periodic", worst, 1e-12);
}

CheckResult check_marginalization(Context& ctx) {
    constexpr int nodes = 2048;
    double worst = 0.0;
    for (const TwoModeState* state : {&ctx.sep, &ctx.ent}) {
        for (double sa : {0.3, 1.7, -2.9}) {
            const double t = uniform(ctx.rng, 0.0, 1e5);
            const ExperimentConfig cfg{ctx.mode_a, ctx.mode_b, *state, t};
            // Periodic trapezoid rule over one screen period.
            double sum = 0.0;
            for (int k = 0; k < nodes; ++k) {
                sum += intensity_joint_numeric(cfg, sa, kTwoPi * k / nodes);
            }
            const double single =
                intensity_single(partial_trace(*state, Mode::A), sa, ctx.mode_a, t);
            worst = std::max(worst, std::abs(sum / nodes - single));
        }
    }
    return bounded("interference: averaging the joint intensity over sigma_b gives I_A", worst,
                   1e-8, "trapezoid, 2048 nodes, sep and ent");
}

CheckResult check_factorizable_ratio(Context& ctx) {
    const Index d = ctx.dim;
    const std::vector<TwoModeState> states{
        make_product(FockOperator::projector(0, d), FockOperator::projector(0, d)),
        make_product(FockOperator::projector(1, d), FockOperator::projector(0, d)),
        make_product(random_diagonal_density(d, ctx.rng), random_diagonal_density(d, ctx.rng)),
    };
    double worst = 0.0;
    for (const auto& rho : states) {
        for (int s = 0; s < 50; ++s) {
            const ExperimentConfig cfg{ctx.mode_a, ctx.mode_b, rho, uniform(ctx.rng, 0.0, 1e5)};
            const double r = ratio(cfg, uniform(ctx.rng, -kTwoPi, kTwoPi),
                                   uniform(ctx.rng, -kTwoPi, kTwoPi));
            worst = std::max(worst, std::abs(r - 1.0));
        }
    }
    return bounded("interference: R = 1 for factorizable states", worst, 1e-10,
                   "50 random samples per state");
}

CheckResult check_closed_vs_numeric(Context& ctx) {
    double worst = 0.0;
    std::string where;
    const double w1 = ctx.mode_a.omega;
    const double w2 = ctx.mode_b.omega;
    const double period = kTwoPi / std::abs(w1 - w2);
    for (double q : {0.1, 0.3, 0.7, 1.0}) {
        const ModeParams ma = ModeParams::from_q(w1, q, ctx.mode_a.xi);
        const ModeParams mb = ModeParams::from_q(w2, q, ctx.mode_b.xi);
        for (int s = 0; s < 50; ++s) {
            const double sa = uniform(ctx.rng, -kTwoPi, kTwoPi);
            const double sb = uniform(ctx.rng, -kTwoPi, kTwoPi);
            const double t = uniform(ctx.rng, 0.0, period);
            const ExperimentConfig sep{ma, mb, ctx.sep, t};
            const ExperimentConfig ent{ma, mb, ctx.ent, t};
            const double residuals[] = {
                std::abs(intensity_single(partial_trace(ctx.sep, Mode::A), sa, ma, t) -
                         intensity_single_sep_closed(sa, q)),
                std::abs(intensity_single(partial_trace(ctx.ent, Mode::B), sb, mb, t) -
                         intensity_single_sep_closed(sb, q)),
                std::abs(intensity_joint_numeric(sep, sa, sb) -
                         intensity_joint_sep_closed(sa, sb, q)),
                std::abs(ratio(sep, sa, sb) - ratio_sep_closed(sa, sb, q)),
                std::abs(intensity_joint_numeric(ent, sa, sb) -
                         intensity_joint_ent_closed(sa, sb, q, w1, w2, t)),
                std::abs(ratio(ent, sa, sb) - ratio_ent_closed(sa, sb, q, w1, w2, t)),
            };
            for (double r : residuals) {
                if (r > worst) {
                    worst = r;
                    std::ostringstream os;
                    os << "worst at q=" << q << " sigma_a=" << sa << " sigma_b=" << sb
                       << " t=" << t;
                    where = os.str();
                }
            }
        }
    }
    return bounded("interference: closed forms match truncated-Fock traces", worst, 1e-10, where);
}

CheckResult check_rsep_time_independence(Context& ctx) {
    double worst = 0.0;
    for (int s = 0; s < 30; ++s) {
        const double sa = uniform(ctx.rng, -kTwoPi, kTwoPi);
        const double sb = uniform(ctx.rng, -kTwoPi, kTwoPi);
        const ExperimentConfig c1{ctx.mode_a, ctx.mode_b, ctx.sep, uniform(ctx.rng, 0.0, 1e5)};
        const ExperimentConfig c2{ctx.mode_a, ctx.mode_b, ctx.sep, uniform(ctx.rng, 0.0, 1e5)};
        worst = std::max(worst, std::abs(ratio(c1, sa, sb) - ratio(c2, sa, sb)));
    }
    return bounded("interference: numeric R_sep is time independent", worst, 1e-12);
}

CheckResult check_rent_spectrum(Context& ctx) {
    constexpr std::size_t n = 1024;
    const double q = ctx.mode_a.q;
    const double w1 = ctx.mode_a.omega;
    const double w2 = ctx.mode_b.omega;
    const double period = kTwoPi / std::abs(w1 - w2);
    double worst = 0.0;
    for (int s = 0; s < 5; ++s) {
        const double sa = uniform(ctx.rng, -kTwoPi, kTwoPi);
        const double sb = uniform(ctx.rng, -kTwoPi, kTwoPi);
        std::vector<double> samples(n);
        for (std::size_t k = 0; k < n; ++k) {
            samples[k] = ratio_ent_closed(sa, sb, q, w1, w2, period * k / n);
        }
        worst = std::max(worst, 1.0 - spectral_fraction(samples, 1));
    }
    return bounded("interference: R_ent power sits in the DC and |w1-w2| bins", worst, 1e-10,
                   "1024 samples over one period");
}

CheckResult check_rsep_bounds(Context&) {
    double worst = 0.0;
    std::string where = "no violation";
    for (double q : {0.2, 0.5, 1.0}) {
        const Bounds b = rsep_bounds(q);
        const std::vector<double> axis = linspace_pi(-2.0, 2.0, 101);
        for (double sa : axis) {
            for (double sb : axis) {
                const double r = ratio_sep_closed(sa, sb, q);
                const double violation = std::max(b.lower - r, r - b.upper);
                if (violation > worst) {
                    worst = violation;
                    std::ostringstream os;
                    os << "q=" << q << ": R_sep(" << sa / std::numbers::pi << "pi, "
                       << sb / std::numbers::pi << "pi) = " << r << " outside [" << b.lower
                       << ", " << b.upper << "]";
                    where = os.str();
                }
            }
        }
    }
    return bounded("interference: R_sep between its (pi,pi) and (0,0) values on a 101x101 grid",
                   worst, 1e-12, where);
}

CheckResult check_csv_determinism(Context& ctx) {
    ScanSettings s;
    s.mode_a = ctx.mode_a;
    s.mode_b = ctx.mode_b;
    s.grid_n = 21;
    s.dim = 8;
    s.time = half_period_time(s);
    int mismatches = 0;
    for (Quantity quantity : {Quantity::r_ent, Quantity::r_numeric}) {
        s.threads = 1;
        const std::string serial = to_csv(compute_grid(quantity, s));
        s.threads = 4;
        const std::string threaded = to_csv(compute_grid(quantity, s));
        const std::string again = to_csv(compute_grid(quantity, s));
        mismatches += (serial != threaded) + (threaded != again);
    }
    return bounded("scan: CSV output is byte-identical across runs and thread counts",
                   static_cast<double>(mismatches), 0.0);
}

CheckResult check_round_trip(Context& ctx) {
    int failures = 0;
    std::vector<double> values;
    for (int s = 0; s < 2000; ++s) {
        values.push_back(uniform(ctx.rng, -10.0, 10.0) * std::pow(10.0, uniform(ctx.rng, -8, 8)));
    }
    for (double v : linspace_pi(-2.0, 2.0, 101)) {
        values.push_back(v);
        values.push_back(ratio_sep_closed(v, -v / 3.0, ctx.mode_a.q));
    }
    for (double v : values) {
        const std::string text = format_real(v);
        double back = 0.0;
        std::from_chars(text.data(), text.data() + text.size(), back);
        failures += back != v;
    }
    return bounded("scan: printed values round-trip exactly", static_cast<double>(failures), 0.0);
}

}  // namespace

TwoModeState make_perturbed_ent(Index dim) {
    Matrix m = make_rho_ent(dim).matrix();
    const Index s01 = pair_index(0, 1, dim);
    const Index s10 = pair_index(1, 0, dim);
    m(s01, s10) = -m(s01, s10);
    m(s10, s01) = -m(s10, s01);
    return TwoModeState(dim, dim, std::move(m), "ent-perturbed");
}

double spectral_fraction(const std::vector<double>& samples, std::size_t bin) {
    const std::size_t n = samples.size();
    if (n < 2 || bin >= n) {
        throw InvalidArgument("spectral_fraction needs bin < sample count");
    }
    std::vector<double> power(n, 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        Complex acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            // (j*k) mod n keeps the twiddle angle small and exact.
            const double angle = -kTwoPi * static_cast<double>((j * k) % n) / static_cast<double>(n);
            acc += samples[j] * std::polar(1.0, angle);
        }
        power[k] = std::norm(acc);
        total += power[k];
    }
    if (total == 0.0) {
        return 1.0;
    }
    double kept = power[0] + power[bin];
    if (bin != 0 && n - bin != bin) {
        kept += power[n - bin];
    }
    return kept / total;
}

std::vector<CheckResult> run_validation(const ValidateOptions& options) {
    if (options.dims.empty()) {
        throw InvalidArgument("validation needs at least one truncation dim");
    }
    const Index dim = options.dims.front();
    Context ctx{options,
                Rng(options.seed),
                dim,
                make_rho_sep(dim),
                options.perturb ? make_perturbed_ent(dim) : make_rho_ent(dim),
                ModeParams::from_q(kDefaultOmega1, 0.5),
                ModeParams::from_q(kDefaultOmega2, 0.5)};

    using Check = CheckResult (*)(Context&);
    const std::pair<const char*, Check> checks[] = {
        {"fock: displacement paths", check_displacement_paths},
        {"fock: partial trace", check_partial_trace},
        {"fock: number spectrum", check_number_spectrum},
        {"weyl: truncation doubling", check_truncation_doubling},
        {"states: constructors", check_constructors},
        {"states: ppt", check_ppt_separable},
        {"states: projector", check_projector},
        {"states: marginals", check_marginals},
        {"weyl: magnitude", check_weyl_magnitude},
        {"weyl: conjugation", check_weyl_conjugation},
        {"weyl: factorization", check_weyl_factorization},
        {"interference: periodicity", check_periodicity},
        {"interference: marginalization", check_marginalization},
        {"interference: factorizable ratio", check_factorizable_ratio},
        {"interference: closed vs numeric", check_closed_vs_numeric},
        {"interference: time independence", check_rsep_time_independence},
        {"interference: spectrum", check_rent_spectrum},
        {"interference: R_sep bounds", check_rsep_bounds},
        {"scan: determinism", check_csv_determinism},
        {"scan: round trip", check_round_trip},
    };
    std::vector<CheckResult> results;
    for (const auto& [name, check] : checks) {
        results.push_back(guarded(name, [&] { return check(ctx); }));
    }
    return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CheckResult& r) { return r.passed; });
}

std::string format_report(const std::vector<CheckResult>& results) {
    std::ostringstream os;
    std::size_t failed = 0;
    for (const auto& r : results) {
        os << (r.passed ? "PASS  " : "FAIL  ") << r.name << "\n      residual " << sci(r.residual)
           << "  tol " << sci(r.tolerance);
        if (!r.detail.empty()) {
            os << "  (" << r.detail << ")";
        }
        os << '\n';
        failed += !r.passed;
    }
    os << results.size() - failed << '/' << results.size() << " checks passed\n";
    return os.str();
}

}  // namespace abcorr
