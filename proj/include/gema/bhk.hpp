#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gema/errors.hpp"

namespace gema::bhk {

/*
 * Exponent matrix of an invertible polynomial: row i holds the exponents of
 * monomial i, column j belongs to variable prefix + j. Coefficients are not
 * stored; nothing computed here depends on them.
 */
class ExponentMatrix {
   public:
    ExponentMatrix() = default;

    /// Validates shape (NotSquare) and nonnegativity (ParseError).
    explicit ExponentMatrix(std::vector<std::vector<std::int64_t>> rows, std::string prefix = "x");

    std::size_t size() const { return rows_.size(); }
    std::int64_t operator()(std::size_t monomial, std::size_t variable) const {
        return rows_[monomial][variable];
    }
    const std::vector<std::vector<std::int64_t>>& rows() const { return rows_; }
    const std::string& prefix() const { return prefix_; }
    std::string variable(std::size_t j) const { return prefix_ + std::to_string(j); }

    /// Polynomial with unit coefficients, e.g. "x0^3*x1 + x1^3".
    std::string polynomial() const;

    friend bool operator==(const ExponentMatrix& a, const ExponentMatrix& b) { return a.rows_ == b.rows_; }

   private:
    std::vector<std::vector<std::int64_t>> rows_;
    std::string prefix_ = "x";
};

struct WeightSystem {
    std::vector<std::int64_t> weights;
    std::int64_t degree = 0;
};

enum class AtomKind { Fermat, Loop, Chain };

std::string_view atom_name(AtomKind kind);

/*
 * One block of the decomposition. variables are listed in the order the
 * atom is written: for a chain x_{v0}^{a0} x_{v1} + ... + x_{vk}^{ak}, for a
 * loop starting from its smallest variable. monomials[i] is the row owned by
 * variables[i] and exponents[i] its leading exponent a_i.
 */
struct Atom {
    AtomKind kind = AtomKind::Fermat;
    std::vector<std::size_t> variables;
    std::vector<std::size_t> monomials;
    std::vector<std::int64_t> exponents;
};

struct SymmetryGroup {
    std::vector<std::int64_t> invariant_factors;  // nontrivial, d1 | d2 | ...
    std::int64_t order = 1;
};

/*
 * Grammar: monomial ('+' | '-') monomial ..., where a monomial is an optional
 * integer coefficient followed by '*'-separated factors var or var^k (k >= 1).
 * All variables share one alphabetic prefix followed by an index; indices must
 * cover 0..N without gaps. Rows keep input order.
 */
ExponentMatrix parse_polynomial(std::string_view text);

/// Exact determinant of E.
std::int64_t determinant(const ExponentMatrix& e);

/// Fermat / loop / chain decomposition; NotInvertible when none exists.
std::vector<Atom> classify_atoms(const ExponentMatrix& e);

/// Solves E q = 1 exactly; w = q scaled to coprime positive integers, d the common degree.
WeightSystem weights(const ExponentMatrix& e);

bool is_calabi_yau(const WeightSystem& ws);

/// E^T with the alternate variable prefix (x <-> y). Involutive.
ExponentMatrix transpose_mirror(const ExponentMatrix& e);

/// Invariant factors of Z^{N+1} / E^T Z^{N+1} by Smith normal form.
SymmetryGroup symmetry_group(const ExponentMatrix& e);

}  // namespace gema::bhk
