#pragma once

#include "abcorr/fock.hpp"
#include "abcorr/states.hpp"

namespace abcorr {

enum class DisplacementPath {
    analytic,     // closed-form matrix elements (default)
    exponential,  // truncated matrix exponential, kept for cross-checks
};

FockOperator displacement(Complex lambda, Index dim, DisplacementPath path);

struct WeylOptions {
    TruncationPolicy policy{};
    DisplacementPath path = DisplacementPath::analytic;
};

/// Tr[rho D(lambda)]. `magnitude` is the fringe visibility and `phase`
/// the fringe shift, reported in (-pi, pi].
struct WeylValue {
    Complex value;
    double magnitude = 0.0;
    double phase = 0.0;
    Index truncation_dim = 0;  // displacement dimension that was accepted

    static WeylValue from(Complex value, Index truncation_dim);
};

/// Single-mode Weyl function. The displacement is evaluated at
/// max(policy.initial_dim, rho.dim()) and at twice that, doubling until
/// successive traces agree within policy.tol; TruncationError otherwise.
WeylValue weyl_single(const FockOperator& rho, Complex lambda, const WeylOptions& options = {});

/// Tr[rho (D(lambda_a) ⊗ D(lambda_b))] under the same convergence rule.
WeylValue weyl_two(const TwoModeState& rho, Complex lambda_a, Complex lambda_b,
                   const WeylOptions& options = {});

/// Tr[rho (X ⊗ Y)] by direct index contraction, skipping zero entries of
/// rho. X and Y may be larger than the state; only their leading blocks
/// are read.
Complex trace_two_mode(const Matrix& rho, Index dim_a, Index dim_b, const Matrix& x,
                       const Matrix& y);

/// Same contraction driven by the state's cached nonzero list.
Complex trace_two_mode(const TwoModeState& rho, const Matrix& x, const Matrix& y);

}  // namespace abcorr
