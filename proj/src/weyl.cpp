#include "abcorr/weyl.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "abcorr/error.hpp"

namespace abcorr {

namespace {

template <typename Eval>
WeylValue converge(const TruncationPolicy& policy, Index support_dim, Eval&& eval) {
    policy.validate();
    Index dim = std::max(policy.initial_dim, support_dim);
    if (dim > policy.max_dim) {
        throw TruncationError("state dimension " + std::to_string(support_dim) +
                              " exceeds the truncation cap " + std::to_string(policy.max_dim));
    }
    Complex previous = eval(dim);
    for (;;) {
        const Index next = 2 * dim;
        if (next > policy.max_dim) {
            std::ostringstream os;
            os << "Weyl value did not converge to " << policy.tol << " before max_dim "
               << policy.max_dim << " (last dim " << dim << ")";
            throw TruncationError(os.str());
        }
        const Complex current = eval(next);
        if (std::abs(current - previous) < policy.tol) {
            return WeylValue::from(current, next);
        }
        previous = current;
        dim = next;
    }
}

}  // namespace

FockOperator displacement(Complex lambda, Index dim, DisplacementPath path) {
    return path == DisplacementPath::analytic ? displacement_analytic(lambda, dim)
                                              : displacement_exp(lambda, dim);
}

WeylValue WeylValue::from(Complex value, Index truncation_dim) {
    WeylValue w;
    w.value = value;
    w.magnitude = std::abs(value);
    w.phase = std::arg(value);
    if (w.phase <= -std::numbers::pi) {
        w.phase = std::numbers::pi;
    }
    w.truncation_dim = truncation_dim;
    return w;
}

WeylValue weyl_single(const FockOperator& rho, Complex lambda, const WeylOptions& options) {
    validate_density(rho);
    const Index n = rho.dim();
    const Matrix& r = rho.matrix();
    return converge(options.policy, n, [&](Index dim) {
        const FockOperator d = displacement(lambda, dim, options.path);
        // Tr[rho D] over the state's support.
        Complex acc = 0.0;
        for (Index i = 0; i < n; ++i) {
            for (Index k = 0; k < n; ++k) {
                acc += r(i, k) * d(k, i);
            }
        }
        return acc;
    });
}

WeylValue weyl_two(const TwoModeState& rho, Complex lambda_a, Complex lambda_b,
                   const WeylOptions& options) {
    const Index support = std::max(rho.dim_a(), rho.dim_b());
    return converge(options.policy, support, [&](Index dim) {
        const FockOperator da = displacement(lambda_a, dim, options.path);
        const FockOperator db = displacement(lambda_b, dim, options.path);
        return trace_two_mode(rho, da.matrix(), db.matrix());
    });
}

Complex trace_two_mode(const Matrix& rho, Index dim_a, Index dim_b, const Matrix& x,
                       const Matrix& y) {
    if (rho.rows() != dim_a * dim_b || rho.cols() != dim_a * dim_b) {
        throw ShapeError("state does not factor as dim_a*dim_b");
    }
    if (x.rows() < dim_a || x.cols() < dim_a || y.rows() < dim_b || y.cols() < dim_b) {
        throw ShapeError("operator smaller than the state it is traced against");
    }
    // Tr[rho (X⊗Y)] = sum rho[(i,j),(k,l)] X(k,i) Y(l,j)
    Complex acc = 0.0;
    for (Index i = 0; i < dim_a; ++i) {
        for (Index j = 0; j < dim_b; ++j) {
            const Index row = pair_index(i, j, dim_b);
            for (Index k = 0; k < dim_a; ++k) {
                for (Index l = 0; l < dim_b; ++l) {
                    const Complex v = rho(row, pair_index(k, l, dim_b));
                    if (v == Complex(0.0)) {
                        continue;
                    }
                    acc += v * x(k, i) * y(l, j);
                }
            }
        }
    }
    return acc;
}

Complex trace_two_mode(const TwoModeState& rho, const Matrix& x, const Matrix& y) {
    const Index na = rho.dim_a();
    const Index nb = rho.dim_b();
    if (x.rows() < na || x.cols() < na || y.rows() < nb || y.cols() < nb) {
        throw ShapeError("operator smaller than the state it is traced against");
    }
    Complex acc = 0.0;
    for (const auto& e : rho.nonzeros()) {
        const Index i = e.row / nb;
        const Index j = e.row % nb;
        const Index k = e.col / nb;
        const Index l = e.col % nb;
        acc += e.value * x(k, i) * y(l, j);
    }
    return acc;
}

}  // namespace abcorr
