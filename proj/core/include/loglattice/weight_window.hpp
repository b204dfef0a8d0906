#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace loglattice {

using Exponent = std::vector<int>;

/// Box [lo, hi] of exponent vectors. Finite stand-in for a formal completion.
class WeightWindow {
public:
    WeightWindow() = default;
    WeightWindow(Exponent lo, Exponent hi);

    /// Same bounds in every one of `n` variables.
    static WeightWindow cube(std::size_t n, int lo, int hi);

    std::size_t n_vars() const { return lo_.size(); }
    const Exponent& lo() const { return lo_; }
    const Exponent& hi() const { return hi_; }

    bool contains(const Exponent& a) const;

    /// Grows the box by `k` in every direction.
    WeightWindow enlarged(int k) const;

    /// Number of lattice points.
    std::size_t size() const;

    /// Calls f(exponent) on every point of [lo, hi] in lexicographic order.
    template <class F>
    void for_each(F&& f) const {
        for_each_in_box(lo_, hi_, f);
    }

    /// Lexicographic walk over an arbitrary box; no-op when lo > hi somewhere.
    template <class F>
    static void for_each_in_box(const Exponent& lo, const Exponent& hi, F&& f) {
        const std::size_t n = lo.size();
        for (std::size_t i = 0; i < n; ++i)
            if (lo[i] > hi[i]) return;
        Exponent a = lo;
        if (n == 0) {
            f(a);
            return;
        }
        for (;;) {
            f(a);
            std::size_t i = n;
            while (i > 0) {
                --i;
                if (a[i] < hi[i]) {
                    ++a[i];
                    for (std::size_t j = i + 1; j < n; ++j) a[j] = lo[j];
                    break;
                }
                if (i == 0) return;
            }
        }
    }

    std::string describe() const;

    friend bool operator==(const WeightWindow&, const WeightWindow&) = default;

private:
    Exponent lo_;
    Exponent hi_;
};

Exponent exp_add(const Exponent& a, const Exponent& b);
Exponent exp_sub(const Exponent& a, const Exponent& b);
Exponent scaled(const Exponent& a, int k);
bool leq(const Exponent& a, const Exponent& b);  // componentwise
Exponent componentwise_max(const Exponent& a, const Exponent& b);
Exponent componentwise_min(const Exponent& a, const Exponent& b);
std::string to_string(const Exponent& a);

}  // namespace loglattice
