#include "doctest.h"
#include "loglattice/errors.hpp"
#include "loglattice/log_derham.hpp"
#include "oracles.hpp"

using namespace loglattice;
using oracle::frac;

namespace {

ElementaryModel irregular(Exponent pole, const Rational& lambda = 0) {
    return {ExponentialFactor::monomial(pole), RegularBlock::scalar(pole.size(), lambda)};
}
ElementaryModel regular(std::size_t n, const Rational& lambda, std::size_t rank = 1) {
    return {ExponentialFactor(n), RegularBlock::scalar(n, lambda, rank)};
}
const WeightWindow W1 = WeightWindow::cube(1, -12, 12);
const WeightWindow W2 = WeightWindow::cube(2, -8, 8);
const DimensionMap ZERO1{{0, 0}, {1, 0}};

DimensionMap h(const LatticeTower& t, const TwistDivisor& d, const WeightWindow& w) {
    return complex_cohomology(build_log_complex(t, d, w).base);
}

}  // namespace

TEST_CASE("build_log_complex examples") {
    FormalConnection empty(1, {});
    const auto z = build_log_complex(closed_form_tower(empty, 1), TwistDivisor(), W1);
    CHECK(z.base.dim(0) == 0);
    CHECK(z.base.dim(1) == 0);

    FormalConnection reg(1, {regular(1, 0)});
    CHECK(h(tower(reg, 1), TwistDivisor(), W1) == DimensionMap{{0, 1}, {1, 1}});

    FormalConnection x1(1, {irregular({1})});
    CHECK(h(tower(x1, 1), TwistDivisor(), W1) == ZERO1);

    CHECK_THROWS_AS(build_log_complex(closed_form_tower(x1, 0), TwistDivisor(), W1), InvalidArgument);
    CHECK_THROWS_AS(build_log_complex(closed_form_tower(FormalConnection(1, {irregular({3})}), 1), TwistDivisor(),
                                      WeightWindow::cube(1, -2, 5)),
                    WindowOverflow);
}

TEST_CASE("the window map for x^{-1} is c x^k -> (k x^k - x^{k-1}) dx/x") {
    FormalConnection x1(1, {irregular({1})});
    const auto c = build_log_complex(tower(x1, 1), TwistDivisor(), WeightWindow::cube(1, -4, 4)).base;
    const auto& d = c.differential(0);
    for (std::size_t col = 0; col < c.dim(0); ++col) {
        const int k = c.basis(0)[col].alpha[0];
        for (std::size_t row = 0; row < c.dim(1); ++row) {
            const int e = c.basis(1)[row].alpha[0];
            const Rational expect = e == k ? Rational(k) : (e == k - 1 ? Rational(-1) : Rational(0));
            CHECK(d.at(row, col) == expect);
        }
    }
}

TEST_CASE("d o d = 0 for two-variable complexes with nilpotent parts") {
    RegularBlock r = RegularBlock::scalar(2, frac(1, 3), 2);
    r.nilpotent = {{{0, 1}, {0, 0}}, {{0, 2}, {0, 0}}};
    ExponentialFactor phi(2);
    phi.add_term({2, 1}, 1);
    phi.add_term({1, 1}, frac(-1, 2));
    phi.add_term({0, 1}, 3);
    FormalConnection c(2, {{phi, r}, regular(2, 0)});
    const auto fc = build_log_complex(tower(c, 2), TwistDivisor({1, 0}), W2);
    CHECK_NOTHROW(fc.base.verify());
    CHECK(fc.base.dim(2) > 0);
}

TEST_CASE("graded_F_piece examples") {
    FormalConnection reg(1, {regular(1, frac(1, 2))});
    for (int q = 1; q <= 3; ++q) {
        const auto g = graded_F_piece(closed_form_tower(reg, 1), TwistDivisor(), W1, q);
        CHECK(g.dim(0) == 0);
        CHECK(g.dim(1) == 0);
    }
    for (int m = 1; m <= 3; ++m) {
        FormalConnection xm(1, {irregular({m})});
        const auto t = closed_form_tower(xm, 1);
        for (int q = 1; q <= 3; ++q) {
            const auto g = graded_F_piece(t, TwistDivisor(), WeightWindow::cube(1, -20, 12), q);
            CHECK(g.dim(0) == static_cast<std::size_t>(m));
            CHECK(g.dim(1) == static_cast<std::size_t>(m));
            // multiplication by -m: one entry -m per column
            for (const auto& [k, v] : g.differential(0).entries()) CHECK(v == -m);
            CHECK(g.differential(0).nnz() == static_cast<std::size_t>(m));
            CHECK(is_acyclic(complex_cohomology(g)));
        }
    }
    FormalConnection reg0(1, {regular(1, 0)});
    CHECK(complex_cohomology(graded_F_piece(closed_form_tower(reg0, 1), TwistDivisor(), W1, 0)) ==
          DimensionMap{{0, 1}, {1, 1}});
}

TEST_CASE("check_alpha examples") {
    FormalConnection x2(1, {irregular({2})});
    const auto r = check_alpha(closed_form_tower(x2, 1), TwistDivisor(), W1, 3);
    CHECK(r.pass());
    CHECK(r.entries.size() == 3);

    FormalConnection bi(2, {irregular({1, 2})});
    CHECK(check_alpha(closed_form_tower(bi, 2), TwistDivisor(), W2, 2).pass());

    FormalConnection reg(2, {regular(2, frac(1, 3))});
    CHECK(check_alpha(closed_form_tower(reg, 2), TwistDivisor(), W2, 3).pass());
}

TEST_CASE("graded pieces of random good blocks are acyclic") {
    oracle::Rng rng(4);
    const Rational residues[] = {0, frac(1, 3), frac(1, 2)};
    for (int it = 0; it < 12; ++it) {
        const std::size_t n = static_cast<std::size_t>(rng.uniform(1, 2));
        Exponent m(n);
        for (auto& v : m) v = rng.uniform(n == 1 ? 1 : 0, 3);
        if (m == Exponent(n, 0)) m[0] = 1;
        ElementaryModel blk{ExponentialFactor::monomial(m, rng.uniform(1, 3)),
                            RegularBlock::scalar(n, residues[rng.uniform(0, 2)], rng.uniform(1, 2))};
        FormalConnection c(n, {blk, regular(n, residues[rng.uniform(0, 2)])});
        const auto r = check_alpha(closed_form_tower(c, static_cast<int>(n)), TwistDivisor::zero(n),
                                   WeightWindow::cube(n, n == 1 ? -12 : -6, n == 1 ? 12 : 6), 3);
        CHECK_MESSAGE(r.pass(), r.failures());
    }
}

TEST_CASE("Euler characteristic does not depend on the twist or on shifts") {
    FormalConnection c(1, {irregular({2}), regular(1, 0), regular(1, frac(1, 2))});
    const auto t = closed_form_tower(c, 1);
    const long chi = euler_characteristic(h(t, TwistDivisor({0}), W1));
    for (int d = 0; d <= 2; ++d) CHECK(euler_characteristic(h(t, TwistDivisor({d}), W1)) == chi);
    for (int a = 0; a <= 2; ++a) CHECK(h(t.shifted(a), TwistDivisor(), W1) == h(t, TwistDivisor(), W1));

    FormalConnection c2(2, {irregular({1, 0}), regular(2, 0)});
    const auto t2 = closed_form_tower(c2, 2);
    const auto base = h(t2, TwistDivisor({0, 0}), W2);
    CHECK(h(t2, TwistDivisor({1, 1}), W2) == base);
    CHECK(h(t2, TwistDivisor({2, 0}), W2) == base);
    CHECK(h(t2.shifted(1), TwistDivisor(), W2) == base);
}

TEST_CASE("cohomology is stable under window enlargement") {
    for (const auto& c : {FormalConnection(1, {regular(1, 0)}), FormalConnection(1, {irregular({1})}),
                          FormalConnection(1, {irregular({3}), regular(1, 0)})}) {
        const auto t = closed_form_tower(c, 1);
        const auto s = stabilized([&](const WeightWindow& w) { return h(t, TwistDivisor(), w); }, W1);
        CHECK(s.stable());
    }
}

TEST_CASE("pole_filtration examples") {
    FormalConnection reg(1, {regular(1, 0)});
    const auto p = pole_filtration(reg, TwistDivisor(), W1, 3);
    CHECK(p.length(0) == 1);
    CHECK(p.length(1) == 1);
    CHECK(p.floors[0][0] == -1);

    // V⁰ of an irregular block is stable under x^{-1}: P⁰ already fills the window.
    FormalConnection x1(1, {irregular({1})});
    const auto q = pole_filtration(x1, TwistDivisor(), W1, 3);
    CHECK(q.length(0) == 0);
    CHECK(q.floors[0][0] == -12);
    // the lattice-level raise F_1D·E_0(D) against E_0(D): two more pole orders
    const auto raise0 = lattice_pole_raise(x1, W1, 0);
    const auto raise1 = lattice_pole_raise(x1, W1, 1);
    CHECK(raise1[0] - raise0[0] == 2);
    CHECK(lattice_pole_raise(reg, W1, 1)[0] - lattice_pole_raise(reg, W1, 0)[0] == 1);
    CHECK(lattice_pole_raise(x1, W1, 3)[0] == 1 + 3 * 2);
}

TEST_CASE("check_filtered_qis_P_sigma examples") {
    for (const Rational& l : {Rational(0), frac(1, 2), frac(1, 3)}) {
        const auto r = check_filtered_qis_P_sigma(FormalConnection(1, {regular(1, l)}), TwistDivisor(), W1);
        CHECK_MESSAGE(r.pass(), r.failures());
    }
    CHECK(check_filtered_qis_P_sigma(FormalConnection(1, {irregular({1})}), TwistDivisor(), W1).pass());
    CHECK(check_filtered_qis_P_sigma(FormalConnection(1, {irregular({2}), regular(1, 0, 2)}), TwistDivisor({1}), W1)
              .pass());

    // residue 1 in the left convention: fails exactly at p = 0
    const auto bad = check_filtered_qis_P_sigma(FormalConnection(1, {regular(1, 1)}), TwistDivisor(), W1);
    CHECK_FALSE(bad.pass());
    for (const auto& e : bad.entries) CHECK(e.pass == (e.label != "p=0"));
}

TEST_CASE("check_beta examples") {
    for (int m = 1; m <= 3; ++m) {
        const auto r = check_beta(FormalConnection(1, {irregular({m})}), TwistDivisor(), W1);
        CHECK(r.pass());
        CHECK(r.entries[0].dims == ZERO1);
    }
    const auto r0 = check_beta(FormalConnection(1, {regular(1, 0)}), TwistDivisor(), W1);
    CHECK(r0.pass());
    CHECK(r0.entries[0].dims == DimensionMap{{0, 1}, {1, 1}});
    const auto rh = check_beta(FormalConnection(1, {regular(1, frac(1, 2))}), TwistDivisor(), W1);
    CHECK(rh.pass());
    CHECK(rh.entries[0].dims == ZERO1);

    const auto r2 = check_beta(FormalConnection(2, {irregular({1, 0}), regular(2, 0)}), TwistDivisor({1, 1}), W2);
    CHECK(r2.pass());
    CHECK(r2.entries[0].dims == DimensionMap{{0, 1}, {1, 2}, {2, 1}});
}
