#pragma once

// Reference computations written independently of the library code paths.
// Slow and simple on purpose.

#include <algorithm>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "loglattice/rational.hpp"

namespace oracle {

using loglattice::Rational;
using Dense = std::vector<std::vector<Rational>>;

/// Rank by plain Gauss-Jordan over ℚ with rational pivots.
inline std::size_t gauss_rank(Dense a) {
    std::size_t r = 0;
    const std::size_t rows = a.size();
    const std::size_t cols = rows ? a[0].size() : 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && a[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[r]);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            const Rational f = a[i][c] / a[r][c];
            for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
        }
        ++r;
    }
    return r;
}

/// p/q in lowest terms (the two-argument gmpxx constructor does not reduce).
inline Rational frac(long p, long q) {
    Rational r(p, q);
    r.canonicalize();
    return r;
}

/// Deterministic 64-bit generator (splitmix64) for hand-rolled property tests.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : s_(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    int uniform(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
    Rational rational(int span, int max_den) {
        Rational q(uniform(-span, span), uniform(1, max_den));
        q.canonicalize();
        return q;
    }

private:
    std::uint64_t s_;
};

/// floor(a / b) for b > 0 by repeated subtraction/addition.
inline int slow_floor_div(int a, int b) {
    int q = 0;
    if (a >= 0) {
        while ((q + 1) * b <= a) ++q;
    } else {
        while (q * b > a) --q;
    }
    return q;
}

/// Dimension of the kernel and cokernel of f ↦ x f' + c(x) f on Laurent polynomials
/// spanned by x^k, k ∈ [-N, N], where c is a Laurent polynomial given by coefficients.
/// Targets cover every exponent reached.
inline std::pair<long, long> laurent_kernel_cokernel(const std::map<int, Rational>& c, int N) {
    int tmin = -N, tmax = N;
    for (const auto& [e, v] : c) {
        tmin = std::min(tmin, -N + e);
        tmax = std::max(tmax, N + e);
    }
    const std::size_t rows = static_cast<std::size_t>(tmax - tmin + 1);
    const std::size_t cols = static_cast<std::size_t>(2 * N + 1);
    Dense m(rows, std::vector<Rational>(cols, Rational(0)));
    for (int k = -N; k <= N; ++k) {
        const std::size_t col = static_cast<std::size_t>(k + N);
        m[static_cast<std::size_t>(k - tmin)][col] += k;
        for (const auto& [e, v] : c) m[static_cast<std::size_t>(k + e - tmin)][col] += v;
    }
    const long r = static_cast<long>(gauss_rank(m));
    return {static_cast<long>(cols) - r, static_cast<long>(rows) - r};
}

}  // namespace oracle
