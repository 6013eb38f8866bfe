#include "abcorr/states.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

#include <json.hpp>

#include "abcorr/error.hpp"

namespace abcorr {

namespace {

constexpr double kLoaderTol = 1e-9;
// Dense (Na*Nb)^2 storage; beyond this the file is almost certainly a mistake.
constexpr Index kMaxLoadedPairDim = 4096;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

void require_mode_dim(Index dim) {
    if (dim < 2) {
        throw InvalidDimension("each mode needs dimension >= 2, got " + std::to_string(dim));
    }
}

// Checks shared by single- and two-mode density matrices.
void check_density(const Matrix& m) {
    const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (herm > TwoModeState::kHermiticityTol) {
        throw ValidationError("hermiticity", "max |rho - rho^+| = " + fmt(herm));
    }
    const Complex tr = m.trace();
    if (std::abs(tr - 1.0) > TwoModeState::kTraceTol) {
        throw ValidationError("trace", "trace is " + fmt(tr.real()) + " (expected 1)");
    }
    const double min_eig = min_eigenvalue_hermitian(m);
    if (min_eig < TwoModeState::kPositivityTol) {
        throw ValidationError("positivity", "minimum eigenvalue " + fmt(min_eig));
    }
}

Matrix embed_pair_state(Index dim, bool coherent) {
    require_mode_dim(dim);
    Matrix m = Matrix::Zero(dim * dim, dim * dim);
    const Index s01 = pair_index(0, 1, dim);
    const Index s10 = pair_index(1, 0, dim);
    m(s01, s01) = 0.5;
    m(s10, s10) = 0.5;
    if (coherent) {
        m(s01, s10) = 0.5;
        m(s10, s01) = 0.5;
    }
    return m;
}

}  // namespace

TwoModeState::TwoModeState(Index dim_a, Index dim_b, Matrix entries, std::string label)
    : dim_a_(dim_a), dim_b_(dim_b), entries_(std::move(entries)), label_(std::move(label)) {
    if (dim_a_ < 2 || dim_b_ < 2) {
        throw ValidationError("dimension", "each mode needs dimension >= 2");
    }
    if (entries_.rows() != dim_a_ * dim_b_ || entries_.cols() != dim_a_ * dim_b_) {
        throw ValidationError("dimension", "matrix shape does not match dims " +
                                               std::to_string(dim_a_) + "x" +
                                               std::to_string(dim_b_));
    }
    if (!entries_.allFinite()) {
        throw ValidationError("schema", "non-finite entries");
    }
    check_density(entries_);
    for (Index r = 0; r < entries_.rows(); ++r) {
        for (Index c = 0; c < entries_.cols(); ++c) {
            if (entries_(r, c) != Complex(0.0)) {
                nonzeros_.push_back({r, c, entries_(r, c)});
            }
        }
    }
}

double TwoModeState::purity() const {
    return entries_.cwiseAbs2().sum();
}

std::string to_string(CorrelationClass c) {
    switch (c) {
        case CorrelationClass::factorizable: return "factorizable";
        case CorrelationClass::separable: return "separable";
        case CorrelationClass::entangled_by_ppt: return "entangled-by-PPT-witness";
        case CorrelationClass::undetermined: return "undetermined";
    }
    return "undetermined";
}

double min_eigenvalue_hermitian(const Matrix& h) {
    std::vector<Index> support;
    for (Index i = 0; i < h.rows(); ++i) {
        if (h.row(i).cwiseAbs().maxCoeff() != 0.0 || h.col(i).cwiseAbs().maxCoeff() != 0.0) {
            support.push_back(i);
        }
    }
    if (support.empty()) {
        return 0.0;
    }
    const auto n = static_cast<Index>(support.size());
    Matrix sub(n, n);
    for (Index r = 0; r < n; ++r) {
        for (Index c = 0; c < n; ++c) {
            sub(r, c) = h(support[r], support[c]);
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericError("Hermitian eigensolver did not converge");
    }
    double lowest = solver.eigenvalues().minCoeff();
    // Dropped rows are zero eigenvalues.
    if (n < h.rows()) {
        lowest = std::min(lowest, 0.0);
    }
    return lowest;
}

void validate_density(const FockOperator& rho) {
    check_density(rho.matrix());
}

TwoModeState make_rho_sep(Index dim) {
    return TwoModeState(dim, dim, embed_pair_state(dim, false), "sep");
}

TwoModeState make_rho_ent(Index dim) {
    return TwoModeState(dim, dim, embed_pair_state(dim, true), "ent");
}

TwoModeState make_product(const FockOperator& rho_a, const FockOperator& rho_b) {
    validate_density(rho_a);
    validate_density(rho_b);
    TruncationPolicy unbounded;
    unbounded.max_dim = std::max(rho_a.dim(), rho_b.dim());
    return TwoModeState(rho_a.dim(), rho_b.dim(), tensor(rho_a, rho_b, unbounded).matrix(),
                        "product");
}

FockOperator partial_trace(const TwoModeState& rho, Mode keep) {
    const Index nb = rho.dim_b();
    const Index n = keep == Mode::A ? rho.dim_a() : nb;
    Matrix out = Matrix::Zero(n, n);
    for (const auto& e : rho.nonzeros()) {
        const Index i = e.row / nb;
        const Index j = e.row % nb;
        const Index k = e.col / nb;
        const Index l = e.col % nb;
        if (keep == Mode::A && j == l) {
            out(i, k) += e.value;
        } else if (keep == Mode::B && i == k) {
            out(j, l) += e.value;
        }
    }
    return FockOperator(std::move(out));
}

double ppt_min_eigenvalue(const TwoModeState& rho) {
    const Index na = rho.dim_a();
    const Index nb = rho.dim_b();
    const Matrix& m = rho.matrix();
    Matrix pt(na * nb, na * nb);
    for (Index i = 0; i < na; ++i) {
        for (Index j = 0; j < nb; ++j) {
            for (Index k = 0; k < na; ++k) {
                for (Index l = 0; l < nb; ++l) {
                    pt(pair_index(i, j, nb), pair_index(k, l, nb)) =
                        m(pair_index(i, l, nb), pair_index(k, j, nb));
                }
            }
        }
    }
    return min_eigenvalue_hermitian(pt);
}

CorrelationClass classify(const TwoModeState& rho) {
    constexpr double tol = 1e-12;
    const FockOperator ra = partial_trace(rho, Mode::A);
    const FockOperator rb = partial_trace(rho, Mode::B);
    TruncationPolicy unbounded;
    unbounded.max_dim = std::max(ra.dim(), rb.dim());
    const Matrix product = tensor(ra, rb, unbounded).matrix();
    if ((product - rho.matrix()).cwiseAbs().maxCoeff() <= tol) {
        return CorrelationClass::factorizable;
    }
    if (ppt_min_eigenvalue(rho) < TwoModeState::kPositivityTol) {
        return CorrelationClass::entangled_by_ppt;
    }
    Matrix off = rho.matrix();
    off.diagonal().setZero();
    if (off.cwiseAbs().maxCoeff() <= tol) {
        return CorrelationClass::separable;
    }
    return CorrelationClass::undetermined;
}

TwoModeState load_state(std::string_view json_text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError("schema", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ValidationError("schema", "top level must be an object");
    }
    if (!doc.contains("dims") || !doc["dims"].is_array() || doc["dims"].size() != 2 ||
        !doc["dims"][0].is_number_integer() || !doc["dims"][1].is_number_integer()) {
        throw ValidationError("schema", "\"dims\" must be an array of two integers");
    }
    const auto na = doc["dims"][0].get<Index>();
    const auto nb = doc["dims"][1].get<Index>();
    if (na < 2 || nb < 2) {
        throw ValidationError("dimension", "each mode needs dimension >= 2");
    }
    if (na * nb > kMaxLoadedPairDim) {
        throw ValidationError("dimension", "two-mode dimension exceeds " +
                                               std::to_string(kMaxLoadedPairDim));
    }
    if (!doc.contains("entries") || !doc["entries"].is_array()) {
        throw ValidationError("schema", "\"entries\" must be an array");
    }

    auto read_pair = [&](const json& e, const char* key) {
        if (!e.contains(key) || !e[key].is_array() || e[key].size() != 2 ||
            !e[key][0].is_number_integer() || !e[key][1].is_number_integer()) {
            throw ValidationError("schema", std::string("entry field \"") + key +
                                                "\" must be an array of two integers");
        }
        const auto m = e[key][0].get<Index>();
        const auto n = e[key][1].get<Index>();
        if (m < 0 || m >= na || n < 0 || n >= nb) {
            throw ValidationError("schema", std::string("entry field \"") + key +
                                                "\" is outside the declared dims");
        }
        return pair_index(m, n, nb);
    };

    std::map<std::pair<Index, Index>, Complex> declared;
    for (const auto& e : doc["entries"]) {
        if (!e.is_object() || !e.contains("re") || !e["re"].is_number() ||
            (e.contains("im") && !e["im"].is_number())) {
            throw ValidationError("schema", "entry needs numeric \"re\" (and optional \"im\")");
        }
        const Index row = read_pair(e, "bra");
        const Index col = read_pair(e, "ket");
        const Complex value(e["re"].get<double>(), e.value("im", 0.0));
        auto [it, inserted] = declared.emplace(std::make_pair(row, col), value);
        if (!inserted && std::abs(it->second - value) > kLoaderTol) {
            throw ValidationError("schema", "entry declared twice with different values");
        }
    }

    Matrix m = Matrix::Zero(na * nb, na * nb);
    for (const auto& [rc, value] : declared) {
        const auto [row, col] = rc;
        if (row == col) {
            if (std::abs(value.imag()) > kLoaderTol) {
                throw ValidationError("hermiticity", "diagonal entry has imaginary part " +
                                                         fmt(value.imag()));
            }
            m(row, col) = value.real();
            continue;
        }
        Complex v = value;
        if (auto mirror = declared.find({col, row}); mirror != declared.end()) {
            const Complex partner = std::conj(mirror->second);
            if (std::abs(partner - value) > kLoaderTol) {
                throw ValidationError("hermiticity", "entry and its transpose are not conjugate");
            }
            v = 0.5 * (value + partner);
        }
        m(row, col) = v;
        m(col, row) = std::conj(v);
    }

    std::string label = "file";
    if (doc.contains("label") && doc["label"].is_string()) {
        label = doc["label"].get<std::string>();
    }
    return TwoModeState(na, nb, std::move(m), std::move(label));
}

TwoModeState load_state_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("schema", "cannot open state file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_state(buf.str());
}

}  // namespace abcorr
