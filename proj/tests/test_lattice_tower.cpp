#include "doctest.h"
#include "loglattice/errors.hpp"
#include "loglattice/lattice_tower.hpp"
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

}  // namespace

TEST_CASE("step examples") {
    FormalConnection reg(1, {regular(1, 0)});
    Level e0{{{0}}};
    CHECK(step(e0, reg) == e0);

    FormalConnection x2(1, {irregular({2})});
    for (int i = 0; i < 4; ++i) CHECK(step(Level{{{2 * i}}}, x2) == Level{{{2 * (i + 1)}}});

    FormalConnection bi(2, {irregular({1, 1})});
    for (int i = 0; i < 3; ++i) CHECK(step(Level{{{i, i}}}, bi) == Level{{{i + 1, i + 1}}});

    CHECK_THROWS_AS(step(Level{{{4}}}, x2, WeightWindow::cube(1, -5, 5)), WindowOverflow);
}

TEST_CASE("tower and closed form examples") {
    FormalConnection reg(1, {regular(1, 0)});
    const auto t = tower(reg, 2);
    CHECK(t.levels().size() == 3);
    CHECK(t.levels()[0] == t.levels()[2]);

    FormalConnection x1(1, {irregular({1})});
    const auto t1 = tower(x1, 2);
    CHECK(t1.levels()[0].shifts[0] == Exponent{0});
    CHECK(t1.levels()[1].shifts[0] == Exponent{1});
    CHECK(t1.levels()[2].shifts[0] == Exponent{2});

    FormalConnection mixed(1, {irregular({1}), regular(1, frac(1, 2))});
    CHECK(tower(mixed, 1).levels()[1] == Level{{{1}, {0}}});

    FormalConnection x3(1, {irregular({3})});
    CHECK(closed_form_tower(x3, 2).levels()[2].shifts[0] == Exponent{6});
    CHECK(closed_form_tower(reg, 3).levels()[3].shifts[0] == Exponent{0});
    FormalConnection m21(2, {irregular({2, 1})});
    CHECK(closed_form_tower(m21, 1).levels()[1].shifts[0] == Exponent{2, 1});
}

TEST_CASE("tower equals closed form on random good blocks") {
    oracle::Rng rng(21);
    const Rational residues[] = {0, frac(1, 3), frac(1, 2)};
    for (int it = 0; it < 25; ++it) {
        const std::size_t n = static_cast<std::size_t>(rng.uniform(1, 2));
        std::vector<ElementaryModel> blocks;
        const int nb = rng.uniform(1, 2);
        for (int b = 0; b < nb; ++b) {
            ElementaryModel blk;
            blk.phi = ExponentialFactor(n);
            if (rng.uniform(0, 3) != 0) {
                Exponent m(n);
                for (auto& v : m) v = rng.uniform(1, 3);
                blk.phi.add_term(m, rng.rational(3, 2) == 0 ? Rational(1) : Rational(rng.uniform(1, 3)));
                // lower order terms
                if (rng.uniform(0, 1)) {
                    Exponent low = m;
                    low[0] = std::max(0, low[0] - 1);
                    bool nz = false;
                    for (int v : low) nz = nz || v > 0;
                    if (nz && low != m) blk.phi.add_term(low, rng.rational(3, 2));
                }
            }
            const std::size_t rank = static_cast<std::size_t>(rng.uniform(1, 2));
            blk.regular = RegularBlock::scalar(n, residues[rng.uniform(0, 2)], rank);
            if (rank == 2 && rng.uniform(0, 1)) {
                DenseMatrixQ nil{{0, 1}, {0, 0}};
                blk.regular.nilpotent.assign(n, nil);
            }
            blocks.push_back(blk);
        }
        FormalConnection c(n, blocks);
        for (int depth = 0; depth <= 4; ++depth) {
            const auto t = tower(c, depth);
            const auto cf = closed_form_tower(c, depth);
            CHECK(t.levels() == cf.levels());
            for (std::size_t i = 1; i < t.levels().size(); ++i)
                for (std::size_t b = 0; b < blocks.size(); ++b)
                    CHECK(leq(t.levels()[i - 1].shifts[b], t.levels()[i].shifts[b]));
        }
    }
}

TEST_CASE("irregularity and regular singularity") {
    CHECK(irregularity(FormalConnection(1, {irregular({4})})) == 4);
    CHECK(irregularity(FormalConnection(1, {regular(1, frac(1, 2))})) == 0);
    CHECK(irregularity(FormalConnection(1, {irregular({1}), irregular({3})})) == 4);
    CHECK(irregularity(FormalConnection(1, {{ExponentialFactor::monomial({2}), RegularBlock::scalar(1, 0, 2)}})) == 4);

    CHECK(is_regular_singular(FormalConnection(1, {regular(1, 0), regular(1, frac(1, 3))})));
    CHECK_FALSE(is_regular_singular(FormalConnection(1, {irregular({1})})));
    CHECK_FALSE(is_regular_singular(FormalConnection(2, {irregular({0, 2})})));
    CHECK(is_regular_singular(FormalConnection(1, {})));
    // irregularity vanishes exactly on regular singular local types
    for (int m = 0; m <= 3; ++m) {
        FormalConnection c = m == 0 ? FormalConnection(1, {regular(1, 0)}) : FormalConnection(1, {irregular({m})});
        CHECK((irregularity(c) == 0) == is_regular_singular(c));
    }
}

TEST_CASE("v0_on_window examples") {
    const WeightWindow w = WeightWindow::cube(1, -5, 5);
    CHECK(v0_on_window(FormalConnection(1, {regular(1, 0)}), w, TwistDivisor()).stabilization_index == 0);
    const auto v1 = v0_on_window(FormalConnection(1, {irregular({1})}), w, TwistDivisor());
    CHECK(v1.stabilization_index == 5);
    CHECK(v1.floor[0] == Exponent{5});
    CHECK(v0_on_window(FormalConnection(1, {irregular({2})}), w, TwistDivisor()).stabilization_index == 3);
    CHECK(v0_on_window(FormalConnection(1, {irregular({2})}), w, TwistDivisor({1})).stabilization_index == 2);
}

TEST_CASE("once stable, always stable") {
    FormalConnection reg(2, {regular(2, frac(1, 3), 2)});
    Level e{{{1, 2}}};
    Level s = step(e, reg);
    CHECK(s == e);
    CHECK(step(s, reg) == s);
}

TEST_CASE("shifted towers stay nested") {
    FormalConnection c(1, {irregular({2}), regular(1, 0)});
    const auto t = closed_form_tower(c, 3).shifted(2);
    CHECK(t.levels()[0].shifts[0] == Exponent{2});
    CHECK(t.levels()[3].shifts[0] == Exponent{8});
    CHECK_THROWS_AS(closed_form_tower(c, 1).shifted(-1), InvalidArgument);
}
