#pragma once

// Truncated single-mode Fock space: ladder operators, displacement
// operators and the two-mode tensor conventions shared by every module.

#include <complex>

#include <Eigen/Dense>

namespace abcorr {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

/// Controls adaptive truncation: evaluate at `initial_dim`, double, and
/// accept once two successive results differ by less than `tol`.
struct TruncationPolicy {
    Index initial_dim = 16;
    Index max_dim = 256;
    double tol = 1e-12;

    /// Throws InvalidArgument unless 2 <= initial_dim <= max_dim and tol > 0.
    void validate() const;
};

enum class Mode { A, B };

/// Two-mode basis ordering |m>⊗|n>: mode A is the slow index, mode B the
/// fast one. Every two-mode matrix in the library uses this layout.
constexpr Index pair_index(Index m, Index n, Index dim_b) noexcept {
    return m * dim_b + n;
}

/// Square complex matrix over the number basis |0>..|N-1>, N >= 2,
/// with finite entries.
class FockOperator {
public:
    explicit FockOperator(Matrix entries);

    static FockOperator identity(Index dim);
    static FockOperator projector(Index n, Index dim);  // |n><n|

    Index dim() const noexcept { return entries_.rows(); }
    const Matrix& matrix() const noexcept { return entries_; }
    Complex operator()(Index row, Index col) const { return entries_(row, col); }

    FockOperator adjoint() const;
    Complex trace() const { return entries_.trace(); }

private:
    Matrix entries_;
};

FockOperator operator*(const FockOperator& lhs, const FockOperator& rhs);

FockOperator make_annihilation(Index dim);
FockOperator make_creation(Index dim);
FockOperator make_number(Index dim);

/// exp(M) by scaling and squaring with a Taylor kernel.
Matrix matrix_exponential(const Matrix& m);

/// D(lambda) = exp(lambda a^+ - conj(lambda) a), exponentiated in the
/// truncated space. Rows and columns near dim-1 carry truncation error.
FockOperator displacement_exp(Complex lambda, Index dim);

/// D(lambda) from closed-form matrix elements (associated Laguerre
/// polynomials); every stored entry equals the infinite-dimensional one.
FockOperator displacement_analytic(Complex lambda, Index dim);

/// Kronecker product with `a` on the slow index. Each factor must fit in
/// `policy.max_dim`.
FockOperator tensor(const FockOperator& a, const FockOperator& b,
                    const TruncationPolicy& policy = {});

/// Reduced operator on `keep` for a two-mode matrix of shape
/// (dim_a*dim_b)^2 laid out per pair_index.
FockOperator partial_trace(const Matrix& two_mode, Index dim_a, Index dim_b, Mode keep);

}  // namespace abcorr
