#include "doctest.h"
#include "loglattice/connection.hpp"
#include "loglattice/errors.hpp"
#include "oracles.hpp"

using namespace loglattice;
using oracle::frac;

namespace {

// dφ/dx as coefficients of x^k dx, differentiated term by term.
std::map<int, Rational> derivative_of_phi(const ExponentialFactor& phi) {
    std::map<int, Rational> d;  // coefficient of x^k dx
    for (const auto& [beta, c] : phi.terms()) d[-beta[0] - 1] += c * (-beta[0]);
    return d;
}

RankOneForm form(std::map<int, Rational> c) { return RankOneForm{std::move(c)}; }

}  // namespace

TEST_CASE("local_formal_type examples") {
    const auto zero = P1Point::at(0), inf = P1Point::at_infinity();
    auto t = local_formal_type(form({{-2, -1}}), zero);
    CHECK(t.phi == ExponentialFactor::monomial({1}));
    CHECK(t.lambda == 0);

    t = local_formal_type(form({{-1, frac(1, 2)}}), zero);
    CHECK(t.phi.is_zero());
    CHECK(t.lambda == frac(1, 2));

    // y = 1/x turns -x^{-2}dx into dy
    t = local_formal_type(form({{-2, -1}}), inf);
    CHECK(t.phi.is_zero());
    CHECK(t.lambda == 0);
    CHECK(form({{-2, -1}}).local_coefficients(inf) == std::map<int, Rational>{{0, 1}});
}

TEST_CASE("local_formal_type: dφ reproduces the polar part and residues are normalized") {
    oracle::Rng rng(5);
    for (int it = 0; it < 50; ++it) {
        std::map<int, Rational> c;
        const int k = rng.uniform(2, 5);
        c[-k] = rng.rational(4, 3);
        if (c[-k] == 0) c[-k] = 1;
        for (int j = -k + 1; j <= 2; ++j)
            if (rng.uniform(0, 1)) c[j] = rng.rational(4, 3);
        const auto t = local_formal_type(form(c), P1Point::at(0));
        CHECK(t.pole() == k - 1);
        auto d = derivative_of_phi(t.phi);
        for (const auto& [j, v] : c)
            if (j <= -2) CHECK(d[j] == v);
        for (const auto& [j, v] : d) CHECK(j <= -2);
        CHECK(t.lambda >= 0);
        CHECK(t.lambda < 1);
        CHECK(t.lambda + t.twist == (c.count(-1) ? c[-1] : Rational(0)));
    }
}

TEST_CASE("curve connections reject poles off the boundary and other points") {
    const auto zero = P1Point::at(0), inf = P1Point::at_infinity();
    CHECK_THROWS_AS(CurveConnection(BoundaryDivisor({zero}), {form({{0, 1}})}), InvalidArgument);
    CHECK_NOTHROW(CurveConnection(BoundaryDivisor({inf}), {form({{0, 1}})}));
    CHECK_THROWS_AS(CurveConnection(BoundaryDivisor({P1Point::at(1)}), {}), InvalidArgument);
}

TEST_CASE("dm_lattice examples") {
    FormalConnection f(1, {{ExponentialFactor::monomial({2}), RegularBlock::scalar(1, 0)}});
    CHECK(dm_lattice(f).shifts == std::vector<Exponent>{{0}});
    FormalConnection g(1, {{ExponentialFactor(1), RegularBlock::scalar(1, frac(1, 3))}});
    CHECK(dm_lattice(g).shifts == std::vector<Exponent>{{0}});
    FormalConnection h(1, {{ExponentialFactor::monomial({1}), RegularBlock::scalar(1, 0)},
                           {ExponentialFactor(1), RegularBlock::scalar(1, frac(1, 2))}});
    CHECK(dm_lattice(h).shifts == std::vector<Exponent>{{0}, {0}});
    // idempotent: the lattice of the same presentation is unchanged
    CHECK(dm_lattice(h).shifts == dm_lattice(FormalConnection(1, h.blocks())).shifts);

    FormalConnection bad(1, {{ExponentialFactor(1), RegularBlock::scalar(1, 1)}});
    CHECK_THROWS_AS(dm_lattice(bad), InvalidArgument);
    ExponentialFactor not_good(2);
    not_good.add_term({1, 0}, 1);
    not_good.add_term({0, 1}, 1);
    CHECK_FALSE(not_good.is_good());
    CHECK_THROWS_AS(dm_lattice(FormalConnection(2, {{not_good, RegularBlock::scalar(2, 0)}})), InvalidArgument);
}

TEST_CASE("regular block validation") {
    RegularBlock r = RegularBlock::scalar(1, 0, 2);
    r.nilpotent = {{{0, 1}, {0, 0}}};
    CHECK_NOTHROW(r.validate(1));
    r.nilpotent = {{{1, 0}, {0, 0}}};
    CHECK_THROWS_AS(r.validate(1), InvalidArgument);
    RegularBlock two = RegularBlock::scalar(2, 0, 2);
    two.nilpotent = {{{0, 1}, {0, 0}}, {{0, 0}, {1, 0}}};
    CHECK_THROWS_AS(two.validate(2), InvalidArgument);  // nilpotent but not commuting
}

TEST_CASE("kummer_invariants examples") {
    // trivial cover
    KummerData id{{1}, {{0}}, {{3}}};
    CHECK(kummer_invariants(id, WeightWindow::cube(1, -6, 6)) == std::vector<Exponent>{{3}});
    // t^{-2}O under t^2 = x, trivial frame weight
    KummerData k{{2}, {{0}}, {{2}}};
    CHECK(kummer_invariants(k, WeightWindow::cube(1, -6, 6)) == std::vector<Exponent>{{1}});
    // residue 1/2 downstairs: e' = t^{-1} f is normalized upstairs (residue 0), μ_2 acts on e' by -1
    KummerData half{{2}, {{-1}}, {{0}}};
    CHECK(kummer_invariants(half, WeightWindow::cube(1, -6, 6)) == std::vector<Exponent>{{0}});
    KummerData shifted{{2}, {{1}}, {{0}}};
    CHECK(kummer_invariants(shifted, WeightWindow::cube(1, -6, 6)) == std::vector<Exponent>{{-1}});
    CHECK_THROWS_AS(kummer_invariants(KummerData{{0}, {{0}}, {{0}}}, WeightWindow::cube(1, -2, 2)),
                    InvalidArgument);
    CHECK_THROWS_AS(kummer_invariants(KummerData{{2}, {{0}}, {{9}}}, WeightWindow::cube(1, -3, 3)), WindowOverflow);
}

TEST_CASE("kummer_invariants: enumeration matches floor formula, composition of covers") {
    oracle::Rng rng(9);
    for (int it = 0; it < 60; ++it) {
        const int r1 = rng.uniform(1, 4), r2 = rng.uniform(1, 3);
        const int s = rng.uniform(-3, 8), a = rng.uniform(-5, 5), b = rng.uniform(-3, 3);
        const WeightWindow w = WeightWindow::cube(1, -30, 30);
        // direct enumeration vs slow oracle
        KummerData k{{r1}, {{a}}, {{s}}};
        CHECK(kummer_invariants(k, w)[0][0] == oracle::slow_floor_div(s - a, r1));
        // t^{r1} = u, u^{r2} = x; frames e' = t^a g, g = u^b f
        const int mid = kummer_invariants(KummerData{{r1}, {{a}}, {{s}}}, w)[0][0];
        const int down = kummer_invariants(KummerData{{r2}, {{b}}, {{mid}}}, w)[0][0];
        const int direct = kummer_invariants(KummerData{{r1 * r2}, {{a + r1 * b}}, {{s}}}, w)[0][0];
        CHECK(down == direct);
    }
    // two variables, independent per branch
    KummerData k2{{2, 3}, {{1, -1}}, {{4, 2}}};
    CHECK(kummer_invariants(k2, WeightWindow::cube(2, -8, 8)) == kummer_invariants_formula(k2));
}

TEST_CASE("ramification_index examples") {
    PuiseuxType unram{{{Rational(2), Rational(1)}}, frac(1, 3)};
    CHECK(ramification_index(unram, 6) == 1);
    // φ = x^{-3/2}: the pullback of t^{-3} along t^2 = x
    PuiseuxType half{{{frac(3, 2), Rational(1)}}, Rational(0)};
    CHECK_THROWS_AS(local_formal_type(half), RamifiedInput);
    CHECK(ramification_index(half, 2) == 2);
    CHECK(ramification_index(half, 12) == 2);
    CHECK(local_formal_type(pullback(half, 2)).pole() == 3);
    CHECK_THROWS_AS(ramification_index(half, 3), RamifiedInput);
    CHECK(ramification_index(std::vector<PuiseuxType>{unram, unram}, 4) == 1);
    PuiseuxType third{{{frac(1, 3), Rational(1)}}, Rational(0)};
    CHECK(ramification_index(std::vector<PuiseuxType>{half, third}, 12) == 6);
}
