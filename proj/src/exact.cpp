#include "gema/exact.hpp"

#include <limits>
#include <utility>

#include "gema/errors.hpp"

namespace gema::exact {

namespace {

void require_square(const IntMatrix& m) {
    for (const auto& row : m)
        if (row.size() != m.size()) throw NotSquare("matrix is not square");
}

}  // namespace

IntMatrix to_big(const Matrix<std::int64_t>& m) {
    IntMatrix out;
    out.reserve(m.size());
    for (const auto& row : m) out.emplace_back(row.begin(), row.end());
    return out;
}

IntMatrix transpose(const IntMatrix& m) {
    if (m.empty()) return {};
    IntMatrix t(m[0].size(), std::vector<BigInt>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
    return t;
}

BigInt determinant(const IntMatrix& input) {
    require_square(input);
    const std::size_t n = input.size();
    if (n == 0) return 1;
    IntMatrix a = input;
    BigInt sign = 1;
    BigInt prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t swap = k + 1;
            while (swap < n && a[swap][k] == 0) ++swap;
            if (swap == n) return 0;
            std::swap(a[k], a[swap]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

IntMatrix adjugate(const IntMatrix& m) {
    require_square(m);
    const std::size_t n = m.size();
    if (n == 1) return {{BigInt(1)}};
    IntMatrix adj(n, std::vector<BigInt>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            IntMatrix minor;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == i) continue;
                std::vector<BigInt> row;
                for (std::size_t c = 0; c < n; ++c)
                    if (c != j) row.push_back(m[r][c]);
                minor.push_back(std::move(row));
            }
            const BigInt cof = determinant(minor);
            adj[j][i] = ((i + j) % 2 == 0) ? cof : BigInt(-cof);
        }
    return adj;
}

std::vector<BigInt> smith_diagonal(IntMatrix a) {
    const std::size_t rows = a.size();
    const std::size_t cols = rows ? a[0].size() : 0;
    const std::size_t diag = std::min(rows, cols);

    for (std::size_t t = 0; t < diag; ++t) {
        while (true) {
            // Pivot: smallest nonzero magnitude in the trailing block.
            std::size_t pr = rows, pc = cols;
            for (std::size_t i = t; i < rows; ++i)
                for (std::size_t j = t; j < cols; ++j)
                    if (a[i][j] != 0 && (pr == rows || abs(a[i][j]) < abs(a[pr][pc]))) {
                        pr = i;
                        pc = j;
                    }
            if (pr == rows) break;  // trailing block is zero
            std::swap(a[t], a[pr]);
            for (auto& row : a) std::swap(row[t], row[pc]);

            bool clean = true;
            for (std::size_t i = t + 1; i < rows; ++i) {
                const BigInt q = a[i][t] / a[t][t];
                if (q != 0)
                    for (std::size_t j = t; j < cols; ++j) a[i][j] -= q * a[t][j];
                if (a[i][t] != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < cols; ++j) {
                const BigInt q = a[t][j] / a[t][t];
                if (q != 0)
                    for (std::size_t i = t; i < rows; ++i) a[i][j] -= q * a[i][t];
                if (a[t][j] != 0) clean = false;
            }
            if (!clean) continue;

            // Divisibility: fold an offending row into row t and retry.
            std::size_t bad = rows;
            for (std::size_t i = t + 1; i < rows && bad == rows; ++i)
                for (std::size_t j = t + 1; j < cols; ++j)
                    if (a[i][j] % a[t][t] != 0) {
                        bad = i;
                        break;
                    }
            if (bad == rows) break;
            for (std::size_t j = t; j < cols; ++j) a[t][j] += a[bad][j];
        }
    }

    std::vector<BigInt> out(diag);
    for (std::size_t t = 0; t < diag; ++t) out[t] = abs(a[t][t]);
    return out;
}

bool invert(const RationalMatrix& m, RationalMatrix& out) {
    const std::size_t n = m.size();
    RationalMatrix a = m;
    out.assign(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].size() != n) throw NotSquare("matrix is not square");
        out[i][i] = 1;
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && a[p][k] == 0) ++p;
        if (p == n) return false;
        std::swap(a[k], a[p]);
        std::swap(out[k], out[p]);
        const Rational pivot = a[k][k];
        for (std::size_t j = 0; j < n; ++j) {
            a[k][j] /= pivot;
            out[k][j] /= pivot;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k || a[i][k] == 0) continue;
            const Rational f = a[i][k];
            for (std::size_t j = 0; j < n; ++j) {
                a[i][j] -= f * a[k][j];
                out[i][j] -= f * out[k][j];
            }
        }
    }
    return true;
}

RationalMatrix transpose(const RationalMatrix& m) {
    if (m.empty()) return {};
    RationalMatrix t(m[0].size(), std::vector<Rational>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
    return t;
}

RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b) {
    const std::size_t n = a.size();
    const std::size_t inner = b.size();
    const std::size_t m = inner ? b[0].size() : 0;
    RationalMatrix out(n, std::vector<Rational>(m, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].size() != inner) throw DimensionMismatch("matrix product shapes differ");
        for (std::size_t k = 0; k < inner; ++k)
            for (std::size_t j = 0; j < m; ++j) out[i][j] += a[i][k] * b[k][j];
    }
    return out;
}

std::int64_t to_int64(const BigInt& v) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
        throw OverflowError("integer does not fit in 64 bits");
    }
    return static_cast<std::int64_t>(v);
}

}  // namespace gema::exact
