#pragma once

// Electron fringe intensities under a quantized two-mode field.
//
// Each experiment sees I(sigma) = 1 + cos(sigma + e*phi), where the phase
// factor exp(i e phi(t)) is the displacement D(i q e^{i omega t}). Screen
// phases sigma are plain radians; all results are 2*pi periodic in them.

#include <vector>

#include "abcorr/fock.hpp"
#include "abcorr/states.hpp"
#include "abcorr/weyl.hpp"

namespace abcorr {

/// Physical parameters of one field mode in units k_B = hbar = c = 1.
/// q = xi * charge / sqrt(2) is the dimensionless coupling.
struct ModeParams {
    double omega = 1.0;
    double xi = 1.0;
    double charge = 0.0;
    double q = 0.0;

    static ModeParams from_q(double omega, double q, double xi = 1.0);
    static ModeParams from_charge(double omega, double xi, double charge);

    void validate() const;
};

struct ExperimentConfig {
    ModeParams mode_a;
    ModeParams mode_b;
    TwoModeState state;
    double time = 0.0;
};

/// lambda = i q e^{i omega t}
Complex lambda_of(const ModeParams& params, double time);

/// 1 + |W| cos(sigma + arg W) with W the Weyl function of `rho_mode`.
double intensity_single(const FockOperator& rho_mode, double sigma, const ModeParams& params,
                        double time, const WeylOptions& options = {});

/// Tr{rho [1 + cos(sigma_a + e phi_a)] ⊗ [1 + cos(sigma_b + e phi_b)]} with each
/// cosine expanded as (e^{i sigma} D(lambda) + e^{-i sigma} D(-lambda)) / 2.
/// Throws ConsistencyError if the trace has an imaginary part above 1e-8.
double intensity_joint_numeric(const ExperimentConfig& config, double sigma_a, double sigma_b);

/// Joint intensity over the product of the two marginal intensities, all
/// from numeric traces. DegeneracyError when |I_A I_B| < 1e-12.
double ratio(const ExperimentConfig& config, double sigma_a, double sigma_b,
             const WeylOptions& options = {});

// Closed forms for the separable and entangled one-photon states.

/// Single-experiment visibility (2 - q^2)/2 e^{-q^2/2}.
double alpha(double q);
/// (1 - q^2)/2 e^{-q^2}
double beta(double q);

double intensity_single_sep_closed(double sigma, double q);
double intensity_joint_sep_closed(double sigma_a, double sigma_b, double q);
double intensity_joint_ent_closed(double sigma_a, double sigma_b, double q, double omega1,
                                  double omega2, double time);
double ratio_sep_closed(double sigma_a, double sigma_b, double q);
double ratio_ent_closed(double sigma_a, double sigma_b, double q, double omega1, double omega2,
                        double time);

struct Bounds {
    double lower;  // value at (pi, pi)
    double upper;  // value at (0, 0)
};

/// (1-2a+2b)/(1-a)^2 and (1+2a+2b)/(1+a)^2. The lower one is evaluated in a
/// cancellation-free form so it stays accurate as q -> 0 (limit 3/4).
/// Throws DegeneracyError for q == 0.
Bounds rsep_bounds(double q);

enum class BoundKind { min, max };

struct Calibration {
    BoundKind which;
    double target;
    double q;
    Bounds bounds;
    double residual;  // bound(q) - target
};

/// Finds q in (0, 2] whose chosen bound equals `target` to 1e-9: scan for
/// the first sign change, then bracketed root search. NoRootError lists
/// the attainable range when there is no crossing.
Calibration calibrate_q(double target, BoundKind which);

struct Extremum {
    double sigma_a;
    double sigma_b;
    double value;
};

struct RsepExtrema {
    Extremum grid_min;
    Extremum grid_max;
    Extremum refined_min;
    Extremum refined_max;
    std::vector<Extremum> grid_argmin;  // every grid point within 1e-12 of the minimum
    std::vector<Extremum> grid_argmax;
};

/// Exhaustive scan of ratio_sep_closed on a grid_n x grid_n grid over
/// [-2pi, 2pi]^2 (which contains 0, ±pi, ±2pi whenever grid_n - 1 is a
/// multiple of 4), followed by coordinate-wise golden-section refinement.
RsepExtrema locate_rsep_extrema(double q, int grid_n = 101);

/// n points spanning [lo_pi*pi, hi_pi*pi], computed in units of pi so that
/// grid points land exactly on integer multiples of pi where possible.
std::vector<double> linspace_pi(double lo_pi, double hi_pi, int n);

}  // namespace abcorr
