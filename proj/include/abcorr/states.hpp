#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "abcorr/fock.hpp"

namespace abcorr {

/// Density matrix of two field modes over |m>⊗|n> (A slow, B fast).
/// Construction enforces Hermiticity, unit trace and positivity.
class TwoModeState {
public:
    static constexpr double kHermiticityTol = 1e-12;
    static constexpr double kTraceTol = 1e-12;
    static constexpr double kPositivityTol = -1e-10;

    /// Throws ValidationError naming the first invariant that fails.
    TwoModeState(Index dim_a, Index dim_b, Matrix entries, std::string label = {});

    Index dim_a() const noexcept { return dim_a_; }
    Index dim_b() const noexcept { return dim_b_; }
    const Matrix& matrix() const noexcept { return entries_; }
    const std::string& label() const noexcept { return label_; }

    double purity() const;

    struct Entry {
        Index row;
        Index col;
        Complex value;
    };
    /// Nonzero entries in row-major order.
    const std::vector<Entry>& nonzeros() const noexcept { return nonzeros_; }

private:
    Index dim_a_;
    Index dim_b_;
    Matrix entries_;
    std::string label_;
    std::vector<Entry> nonzeros_;
};

enum class CorrelationClass { factorizable, separable, entangled_by_ppt, undetermined };

std::string to_string(CorrelationClass c);

/// Smallest eigenvalue of a Hermitian matrix. Rows and columns that are
/// identically zero only contribute zero eigenvalues, so the dense solve
/// runs on the remaining support.
double min_eigenvalue_hermitian(const Matrix& h);

/// Checks a single-mode density matrix at the TwoModeState tolerances.
void validate_density(const FockOperator& rho);

/// 1/2 (|01><01| + |10><10|)
TwoModeState make_rho_sep(Index dim);

/// |S><S| with |S> = (|01> + |10>)/sqrt(2)
TwoModeState make_rho_ent(Index dim);

TwoModeState make_product(const FockOperator& rho_a, const FockOperator& rho_b);

FockOperator partial_trace(const TwoModeState& rho, Mode keep);

/// Minimum eigenvalue of the partial transpose on mode B. Negative values
/// certify entanglement.
double ppt_min_eigenvalue(const TwoModeState& rho);

/// Factorizable if rho equals the product of its marginals, entangled when
/// the partial transpose has a negative eigenvalue, separable when rho is
/// diagonal in the product number basis, otherwise undetermined.
CorrelationClass classify(const TwoModeState& rho);

/// Parses a JSON state file:
///   {"dims":[Na,Nb],"entries":[{"bra":[m,n],"ket":[p,q],"re":x,"im":y},...]}
/// Each entry is <m,n|rho|p,q>. Undeclared entries are zero and the
/// conjugate of every off-diagonal entry is filled in.
TwoModeState load_state(std::string_view json_text);
TwoModeState load_state_file(const std::filesystem::path& path);

}  // namespace abcorr
