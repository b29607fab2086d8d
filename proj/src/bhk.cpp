#include "gema/bhk.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "gema/exact.hpp"

namespace gema::bhk {

using exact::BigInt;

ExponentMatrix::ExponentMatrix(std::vector<std::vector<std::int64_t>> rows, std::string prefix)
    : rows_(std::move(rows)), prefix_(std::move(prefix)) {
    if (rows_.empty()) throw NotSquare("exponent matrix is empty");
    for (const auto& row : rows_) {
        if (row.size() != rows_.size()) {
            throw NotSquare(std::to_string(rows_.size()) + " monomials but a row with " +
                            std::to_string(row.size()) + " variables");
        }
        for (auto v : row)
            if (v < 0) throw ParseError("negative exponent");
    }
}

std::string ExponentMatrix::polynomial() const {
    std::string out;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (i) out += " + ";
        bool first = true;
        for (std::size_t j = 0; j < rows_[i].size(); ++j) {
            if (rows_[i][j] == 0) continue;
            if (!first) out += "*";
            first = false;
            out += variable(j);
            if (rows_[i][j] != 1) out += "^" + std::to_string(rows_[i][j]);
        }
        if (first) out += "1";
    }
    return out;
}

std::string_view atom_name(AtomKind kind) {
    switch (kind) {
        case AtomKind::Fermat: return "fermat";
        case AtomKind::Loop: return "loop";
        case AtomKind::Chain: return "chain";
    }
    return "unknown";
}

namespace {

class Parser {
   public:
    explicit Parser(std::string_view s) : s_(s) {}

    ExponentMatrix parse() {
        std::vector<std::map<std::size_t, std::int64_t>> monomials;
        skip_ws();
        if (at_end()) fail("empty polynomial");
        if (peek() == '+' || peek() == '-') ++pos_;
        monomials.push_back(monomial());
        while (true) {
            skip_ws();
            if (at_end()) break;
            if (peek() != '+' && peek() != '-') fail("expected '+' or '-'");
            ++pos_;
            monomials.push_back(monomial());
        }

        std::size_t n = 0;
        for (const auto& m : monomials)
            for (const auto& [var, exp] : m) n = std::max(n, var + 1);
        std::vector<bool> seen(n, false);
        for (const auto& m : monomials)
            for (const auto& [var, exp] : m) seen[var] = true;
        for (std::size_t j = 0; j < n; ++j)
            if (!seen[j]) throw ParseError("variable " + prefix_ + std::to_string(j) + " does not appear");
        if (monomials.size() != n) {
            throw NotSquare(std::to_string(monomials.size()) + " monomials in " + std::to_string(n) +
                            " variables");
        }

        std::vector<std::vector<std::int64_t>> rows(n, std::vector<std::int64_t>(n, 0));
        for (std::size_t i = 0; i < n; ++i)
            for (const auto& [var, exp] : monomials[i]) rows[i][var] = exp;
        return ExponentMatrix(std::move(rows), prefix_);
    }

   private:
    std::map<std::size_t, std::int64_t> monomial() {
        std::map<std::size_t, std::int64_t> out;
        skip_ws();
        if (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
            number();  // coefficient, discarded
            skip_ws();
            if (at_end() || peek() != '*') fail("constant term");
            ++pos_;
        }
        while (true) {
            skip_ws();
            auto [var, exp] = factor();
            out[var] += exp;
            skip_ws();
            if (at_end() || peek() != '*') break;
            ++pos_;
        }
        return out;
    }

    std::pair<std::size_t, std::int64_t> factor() {
        const std::size_t start = pos_;
        while (!at_end() && (std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
        if (pos_ == start) fail("expected a variable");
        std::string prefix(s_.substr(start, pos_ - start));
        if (prefix_.empty()) {
            prefix_ = prefix;
        } else if (prefix != prefix_) {
            fail("mixed variable names '" + prefix_ + "' and '" + prefix + "'");
        }
        if (at_end() || !std::isdigit(static_cast<unsigned char>(peek()))) fail("variable without index");
        const auto index = number();
        std::int64_t exp = 1;
        skip_ws();
        if (!at_end() && peek() == '^') {
            ++pos_;
            skip_ws();
            if (at_end() || !std::isdigit(static_cast<unsigned char>(peek()))) fail("expected exponent");
            exp = number();
            if (exp < 1) fail("exponents must be at least 1");
        }
        return {static_cast<std::size_t>(index), exp};
    }

    std::int64_t number() {
        std::int64_t v = 0;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
            if (v > 100000000) fail("number too large");
            v = v * 10 + (peek() - '0');
            ++pos_;
        }
        return v;
    }

    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
    }
    bool at_end() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what + " at offset " + std::to_string(pos_));
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    std::string prefix_;
};

exact::IntMatrix big(const ExponentMatrix& e) { return exact::to_big(e.rows()); }

}  // namespace

ExponentMatrix parse_polynomial(std::string_view text) { return Parser(text).parse(); }

std::int64_t determinant(const ExponentMatrix& e) { return exact::to_int64(exact::determinant(big(e))); }

std::vector<Atom> classify_atoms(const ExponentMatrix& e) {
    if (determinant(e) == 0) throw ZeroDeterminant("exponent matrix is singular");
    const std::size_t n = e.size();

    // Each monomial must be x_i^a (a >= 2) or x_i^a x_j (a >= 2); it is owned by i and,
    // in the second case, induces the edge i -> j.
    std::vector<std::optional<std::size_t>> owner_row(n), next(n);
    std::vector<std::int64_t> lead(n, 0);
    for (std::size_t r = 0; r < n; ++r) {
        std::vector<std::size_t> support;
        for (std::size_t j = 0; j < n; ++j)
            if (e(r, j) != 0) support.push_back(j);
        std::size_t own = 0;
        std::optional<std::size_t> target;
        if (support.size() == 1 && e(r, support[0]) >= 2) {
            own = support[0];
        } else if (support.size() == 2) {
            const auto a = support[0], b = support[1];
            if (e(r, b) == 1 && e(r, a) >= 2) {
                own = a;
                target = b;
            } else if (e(r, a) == 1 && e(r, b) >= 2) {
                own = b;
                target = a;
            } else {
                throw NotInvertible("monomial " + std::to_string(r) + " is not of atomic type");
            }
        } else {
            throw NotInvertible("monomial " + std::to_string(r) + " is not of atomic type");
        }
        if (owner_row[own]) throw NotInvertible(e.variable(own) + " leads two monomials");
        owner_row[own] = r;
        next[own] = target;
        lead[own] = e(r, own);
    }

    std::vector<int> indegree(n, 0);
    for (std::size_t v = 0; v < n; ++v)
        if (next[v]) ++indegree[*next[v]];
    for (std::size_t v = 0; v < n; ++v)
        if (indegree[v] > 1) throw NotInvertible(e.variable(v) + " is the target of two monomials");

    std::vector<bool> used(n, false);
    std::vector<Atom> atoms;
    auto walk = [&](std::size_t start, AtomKind kind) {
        Atom atom;
        atom.kind = kind;
        std::optional<std::size_t> v = start;
        while (v && !used[*v]) {
            used[*v] = true;
            atom.variables.push_back(*v);
            atom.monomials.push_back(*owner_row[*v]);
            atom.exponents.push_back(lead[*v]);
            v = next[*v];
        }
        return atom;
    };

    // Chains and Fermat atoms start at variables nobody points to; everything left lies on cycles.
    for (std::size_t v = 0; v < n; ++v)
        if (!used[v] && indegree[v] == 0) {
            Atom atom = walk(v, AtomKind::Chain);
            if (atom.variables.size() == 1) atom.kind = AtomKind::Fermat;
            atoms.push_back(std::move(atom));
        }
    for (std::size_t v = 0; v < n; ++v)
        if (!used[v]) atoms.push_back(walk(v, AtomKind::Loop));

    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) {
        return *std::min_element(a.variables.begin(), a.variables.end()) <
               *std::min_element(b.variables.begin(), b.variables.end());
    });
    return atoms;
}

WeightSystem weights(const ExponentMatrix& e) {
    const exact::IntMatrix m = big(e);
    const BigInt det = exact::determinant(m);
    if (det == 0) throw ZeroDeterminant("exponent matrix is singular");
    const exact::IntMatrix adj = exact::adjugate(m);

    // E adj(E) 1 = det 1, so v = sign(det) adj(E) 1 satisfies E v = |det| 1.
    const std::size_t n = e.size();
    std::vector<BigInt> v(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) v[i] += adj[i][j];
    BigInt d = abs(det);
    if (det < 0)
        for (auto& x : v) x = -x;

    BigInt g = d;
    for (const auto& x : v) g = boost::multiprecision::gcd(g, x);
    WeightSystem ws;
    for (std::size_t i = 0; i < n; ++i) {
        const BigInt wi = v[i] / g;
        if (wi <= 0) throw NonPositiveWeight(e.variable(i) + " has non-positive weight");
        ws.weights.push_back(exact::to_int64(wi));
    }
    ws.degree = exact::to_int64(d / g);
    return ws;
}

bool is_calabi_yau(const WeightSystem& ws) {
    return std::accumulate(ws.weights.begin(), ws.weights.end(), std::int64_t{0}) == ws.degree;
}

ExponentMatrix transpose_mirror(const ExponentMatrix& e) {
    const std::size_t n = e.size();
    std::vector<std::vector<std::int64_t>> t(n, std::vector<std::int64_t>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) t[j][i] = e(i, j);
    return ExponentMatrix(std::move(t), e.prefix() == "y" ? "x" : "y");
}

SymmetryGroup symmetry_group(const ExponentMatrix& e) {
    const exact::IntMatrix m = big(e);
    const BigInt det = exact::determinant(m);
    if (det == 0) throw ZeroDeterminant("exponent matrix is singular");
    SymmetryGroup g;
    BigInt order = 1;
    for (const auto& d : exact::smith_diagonal(exact::transpose(m))) {
        order *= d;
        if (d != 1) g.invariant_factors.push_back(exact::to_int64(d));
    }
    if (order != abs(det)) throw std::logic_error("Smith normal form order disagrees with |det E|");
    g.order = exact::to_int64(order);
    return g;
}

}  // namespace gema::bhk
