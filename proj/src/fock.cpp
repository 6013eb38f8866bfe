#include "abcorr/fock.hpp"

#include <cmath>
#include <string>

#include "abcorr/error.hpp"

namespace abcorr {

namespace {

void require_dim(Index dim) {
    if (dim < 2) {
        throw InvalidDimension("Fock dimension must be >= 2, got " + std::to_string(dim));
    }
}

void require_finite(Complex z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw InvalidArgument("displacement amplitude must be finite");
    }
}

// One-norm, the usual choice for the scaling step.
double one_norm(const Matrix& m) {
    return m.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace

void TruncationPolicy::validate() const {
    if (initial_dim < 2 || initial_dim > max_dim) {
        throw InvalidArgument("truncation policy requires 2 <= initial_dim <= max_dim");
    }
    if (!(tol > 0.0)) {
        throw InvalidArgument("truncation policy requires tol > 0");
    }
}

FockOperator::FockOperator(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) {
        throw ShapeError("Fock operator must be square");
    }
    require_dim(entries_.rows());
    if (!entries_.allFinite()) {
        throw InvalidArgument("Fock operator has non-finite entries");
    }
}

FockOperator FockOperator::identity(Index dim) {
    require_dim(dim);
    return FockOperator(Matrix::Identity(dim, dim));
}

FockOperator FockOperator::projector(Index n, Index dim) {
    require_dim(dim);
    if (n < 0 || n >= dim) {
        throw InvalidArgument("number state outside the truncated basis");
    }
    Matrix m = Matrix::Zero(dim, dim);
    m(n, n) = 1.0;
    return FockOperator(std::move(m));
}

FockOperator FockOperator::adjoint() const {
    return FockOperator(entries_.adjoint());
}

FockOperator operator*(const FockOperator& lhs, const FockOperator& rhs) {
    if (lhs.dim() != rhs.dim()) {
        throw ShapeError("operator product of mismatched dimensions");
    }
    return FockOperator(lhs.matrix() * rhs.matrix());
}

FockOperator make_annihilation(Index dim) {
    require_dim(dim);
    Matrix a = Matrix::Zero(dim, dim);
    for (Index m = 0; m + 1 < dim; ++m) {
        a(m, m + 1) = std::sqrt(static_cast<double>(m + 1));
    }
    return FockOperator(std::move(a));
}

FockOperator make_creation(Index dim) {
    return make_annihilation(dim).adjoint();
}

FockOperator make_number(Index dim) {
    require_dim(dim);
    Matrix n = Matrix::Zero(dim, dim);
    for (Index m = 0; m < dim; ++m) {
        n(m, m) = static_cast<double>(m);
    }
    return FockOperator(std::move(n));
}

Matrix matrix_exponential(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw ShapeError("matrix exponential needs a square matrix");
    }
    const Index n = m.rows();
    const double norm = one_norm(m);

    int squarings = 0;
    if (norm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    }
    const Matrix scaled = m / std::ldexp(1.0, squarings);

    // ||scaled|| <= 1/2, so 30 terms put the remainder far below 1e-18.
    Matrix result = Matrix::Identity(n, n);
    Matrix term = Matrix::Identity(n, n);
    for (int k = 1; k <= 30; ++k) {
        term = term * scaled / static_cast<double>(k);
        result += term;
        if (one_norm(term) < 1e-18 * one_norm(result)) {
            break;
        }
    }
    for (int s = 0; s < squarings; ++s) {
        result = result * result;
    }
    return result;
}

FockOperator displacement_exp(Complex lambda, Index dim) {
    require_finite(lambda);
    require_dim(dim);
    const Matrix a = make_annihilation(dim).matrix();
    const Matrix generator = lambda * a.adjoint() - std::conj(lambda) * a;
    return FockOperator(matrix_exponential(generator));
}

FockOperator displacement_analytic(Complex lambda, Index dim) {
    require_finite(lambda);
    require_dim(dim);

    const double x = std::norm(lambda);
    const double envelope = std::exp(-0.5 * x);
    const Complex minus_conj = -std::conj(lambda);
    const double log_abs = x > 0.0 ? 0.5 * std::log(x) : 0.0;
    const double arg_plus = std::arg(lambda);
    const double arg_minus = std::arg(minus_conj);

    Matrix d = Matrix::Zero(dim, dim);
    // For offset k = m - n >= 0:
    //   <m|D|n> = sqrt(n!/m!) lambda^k e^{-x/2} L_n^{(k)}(x)
    //   <n|D|m> = sqrt(n!/m!) (-conj lambda)^k e^{-x/2} L_n^{(k)}(x)
    // L_n^{(k)} by upward recurrence in n at fixed k.
    for (Index k = 0; k < dim; ++k) {
        double lag_prev = 0.0;
        double lag = 1.0;
        for (Index n = 0; n + k < dim; ++n) {
            if (n == 1) {
                lag_prev = lag;
                lag = 1.0 + static_cast<double>(k) - x;
            } else if (n > 1) {
                const double nn = static_cast<double>(n - 1);
                const double next =
                    ((2.0 * nn + 1.0 + static_cast<double>(k) - x) * lag -
                     (nn + static_cast<double>(k)) * lag_prev) /
                    (nn + 1.0);
                lag_prev = lag;
                lag = next;
            }
            const Index m = n + k;
            if (k == 0) {
                d(n, n) = envelope * lag;
                continue;
            }
            if (x == 0.0) {
                continue;
            }
            // sqrt(n!/m!) |lambda|^k combined in log space.
            const double log_mag = 0.5 * (std::lgamma(static_cast<double>(n) + 1.0) -
                                          std::lgamma(static_cast<double>(m) + 1.0)) +
                                   static_cast<double>(k) * log_abs;
            const double scale = std::exp(log_mag) * envelope * lag;
            const double kd = static_cast<double>(k);
            d(m, n) = std::polar(1.0, kd * arg_plus) * scale;
            d(n, m) = std::polar(1.0, kd * arg_minus) * scale;
        }
    }
    return FockOperator(std::move(d));
}

FockOperator tensor(const FockOperator& a, const FockOperator& b, const TruncationPolicy& policy) {
    if (a.dim() > policy.max_dim || b.dim() > policy.max_dim) {
        throw TruncationError("tensor factor exceeds the truncation cap of " +
                              std::to_string(policy.max_dim));
    }
    const Index na = a.dim();
    const Index nb = b.dim();
    Matrix out(na * nb, na * nb);
    for (Index i = 0; i < na; ++i) {
        for (Index k = 0; k < na; ++k) {
            out.block(i * nb, k * nb, nb, nb) = a(i, k) * b.matrix();
        }
    }
    return FockOperator(std::move(out));
}

FockOperator partial_trace(const Matrix& two_mode, Index dim_a, Index dim_b, Mode keep) {
    if (dim_a < 2 || dim_b < 2) {
        throw ShapeError("two-mode dimensions must both be >= 2");
    }
    if (two_mode.rows() != dim_a * dim_b || two_mode.cols() != dim_a * dim_b) {
        throw ShapeError("matrix of size " + std::to_string(two_mode.rows()) + "x" +
                         std::to_string(two_mode.cols()) + " does not factor as " +
                         std::to_string(dim_a) + "*" + std::to_string(dim_b));
    }
    if (keep == Mode::A) {
        Matrix out = Matrix::Zero(dim_a, dim_a);
        for (Index i = 0; i < dim_a; ++i) {
            for (Index k = 0; k < dim_a; ++k) {
                Complex acc = 0.0;
                for (Index j = 0; j < dim_b; ++j) {
                    acc += two_mode(pair_index(i, j, dim_b), pair_index(k, j, dim_b));
                }
                out(i, k) = acc;
            }
        }
        return FockOperator(std::move(out));
    }
    Matrix out = Matrix::Zero(dim_b, dim_b);
    for (Index j = 0; j < dim_b; ++j) {
        for (Index l = 0; l < dim_b; ++l) {
            Complex acc = 0.0;
            for (Index i = 0; i < dim_a; ++i) {
                acc += two_mode(pair_index(i, j, dim_b), pair_index(i, l, dim_b));
            }
            out(j, l) = acc;
        }
    }
    return FockOperator(std::move(out));
}

}  // namespace abcorr
