#include "loglattice/lattice_tower.hpp"

#include <algorithm>
#include <climits>

#include "loglattice/errors.hpp"
#include "loglattice/sparse_matrix.hpp"
#include "span_floor.hpp"

namespace loglattice {

LatticeTower::LatticeTower(FormalConnection conn, std::vector<Level> levels)
    : conn_(std::move(conn)), levels_(std::move(levels)) {
    for (const auto& l : levels_) {
        if (l.shifts.size() != conn_.blocks().size())
            throw InvalidArgument("tower level has the wrong number of blocks");
        for (const auto& s : l.shifts)
            if (s.size() != conn_.n_vars()) throw InvalidArgument("tower shift has wrong n_vars");
    }
    for (std::size_t i = 1; i < levels_.size(); ++i)
        for (std::size_t b = 0; b < levels_[i].shifts.size(); ++b)
            if (!leq(levels_[i - 1].shifts[b], levels_[i].shifts[b]))
                throw InvalidArgument("tower levels are not nested at level " + std::to_string(i));
}

Level LatticeTower::level(int i) const {
    if (i < 0) throw InvalidArgument("tower level index must be >= 0");
    if (levels_.empty()) throw InvalidArgument("empty tower");
    if (static_cast<std::size_t>(i) < levels_.size()) return levels_[static_cast<std::size_t>(i)];
    Level l = levels_.back();
    const int extra = i - static_cast<int>(depth());
    for (std::size_t b = 0; b < l.shifts.size(); ++b)
        l.shifts[b] = exp_add(l.shifts[b], scaled(conn_.blocks()[b].phi.pole_divisor(), extra));
    return l;
}

Exponent LatticeTower::floor_shift(std::size_t b, int i, const TwistDivisor& delta) const {
    Exponent s = level(i).shifts.at(b);
    if (delta.size() != 0) {
        if (delta.size() != s.size()) throw InvalidArgument("twist divisor has wrong length");
        for (std::size_t k = 0; k < s.size(); ++k) s[k] += delta[k];
    }
    return s;
}

LatticeTower LatticeTower::shifted(int a) const {
    if (a < 0) throw InvalidArgument("tower shift must be non-negative");
    std::vector<Level> lv = levels_;
    for (auto& l : lv)
        for (auto& s : l.shifts)
            for (auto& v : s) v += a;
    return LatticeTower(conn_, std::move(lv));
}

namespace {

Exponent step_block(const ElementaryModel& blk, std::size_t n, const Exponent& shift, const WeightWindow& w,
                    bool clip, std::size_t block_index) {
    std::vector<detail::Operator> ops;
    for (std::size_t i = 0; i < n; ++i)
        ops.emplace_back([&blk, i](const Exponent& a, std::size_t j) { return blk.nabla_log(i, a, j); });
    return detail::saturate_floor(blk.rank(), shift, w, clip, ops, blk.phi.pole_divisor(),
                                  "block " + std::to_string(block_index));
}

WeightWindow step_window(const Level& e, const FormalConnection& conn, int steps) {
    const std::size_t n = conn.n_vars();
    Exponent lo(n, 0), hi(n, 1);
    for (std::size_t b = 0; b < e.shifts.size(); ++b) {
        const Exponent m = conn.blocks()[b].phi.pole_divisor();
        for (std::size_t i = 0; i < n; ++i) {
            lo[i] = std::min(lo[i], -(e.shifts[b][i] + steps * m[i]) - 1);
            hi[i] = std::max(hi[i], m[i] + 1);
        }
    }
    return WeightWindow(lo, hi);
}

}  // namespace

Level step(const Level& e, const FormalConnection& conn, const WeightWindow& w, bool clip) {
    if (e.shifts.size() != conn.blocks().size())
        throw InvalidArgument("level does not match the connection");
    if (w.n_vars() != conn.n_vars()) throw InvalidArgument("window has wrong number of variables");
    Level next;
    for (std::size_t b = 0; b < conn.blocks().size(); ++b)
        next.shifts.push_back(step_block(conn.blocks()[b], conn.n_vars(), e.shifts[b], w, clip, b));
    return next;
}

Level step(const Level& e, const FormalConnection& conn) {
    return step(e, conn, step_window(e, conn, 1));
}

LatticeTower tower(const Level& seed, const FormalConnection& conn, int depth) {
    if (depth < 0) throw InvalidArgument("tower depth must be >= 0");
    std::vector<Level> levels{seed};
    const WeightWindow w = step_window(seed, conn, depth);
    for (int i = 0; i < depth; ++i) levels.push_back(step(levels.back(), conn, w));
    return LatticeTower(conn, std::move(levels));
}

LatticeTower tower(const FormalConnection& conn, int depth) {
    Level seed{dm_lattice(conn).shifts};
    return tower(seed, conn, depth);
}

LatticeTower closed_form_tower(const FormalConnection& conn, int depth) {
    if (depth < 0) throw InvalidArgument("tower depth must be >= 0");
    std::vector<Level> levels;
    for (int i = 0; i <= depth; ++i) {
        Level l;
        for (const auto& b : conn.blocks()) l.shifts.push_back(scaled(b.phi.pole_divisor(), i));
        levels.push_back(std::move(l));
    }
    return LatticeTower(conn, std::move(levels));
}

long irregularity(const FormalConnection& conn) {
    if (conn.n_vars() != 1) throw InvalidArgument("irregularity needs a one-variable local type");
    long r = 0;
    for (const auto& b : conn.blocks())
        r += static_cast<long>(b.rank()) * b.phi.pole_divisor()[0];
    return r;
}

bool is_regular_singular(const FormalConnection& conn) {
    if (conn.blocks().empty()) return true;
    Level e0;
    for (std::size_t b = 0; b < conn.blocks().size(); ++b) e0.shifts.emplace_back(conn.n_vars(), 0);
    return step(e0, conn) == e0;
}

V0Module v0_on_window(const FormalConnection& conn, const WeightWindow& w, const TwistDivisor& delta) {
    const std::size_t n = conn.n_vars();
    if (w.n_vars() != n) throw InvalidArgument("window has wrong number of variables");
    if (delta.size() != 0 && delta.size() != n) throw InvalidArgument("twist divisor has wrong length");
    int depth = 0;
    for (int v : w.lo()) depth = std::max(depth, -v);
    int min_pole = INT_MAX;
    for (const auto& b : conn.blocks())
        for (int v : b.phi.pole_divisor())
            if (v > 0) min_pole = std::min(min_pole, v);
    const int cap = min_pole == INT_MAX ? 1 : 1 + depth / min_pole;

    auto clip = [&](Exponent s) {
        for (std::size_t i = 0; i < n; ++i) s[i] = std::min(s[i], -w.lo()[i]);
        return s;
    };
    Level cur;
    for (std::size_t b = 0; b < conn.blocks().size(); ++b) {
        Exponent s(n, 0);
        if (delta.size() != 0)
            for (std::size_t i = 0; i < n; ++i) s[i] = delta[i];
        cur.shifts.push_back(clip(s));
    }
    std::vector<Level> levels{cur};
    for (int i = 0; i <= cap; ++i) {
        Level next = step(cur, conn, w, true);
        if (next == cur) {
            V0Module v{closed_form_tower(conn, std::max(i, 0)), w, delta, i, cur.shifts};
            return v;
        }
        cur = std::move(next);
    }
    throw NotStabilized("V0 did not stabilise within " + std::to_string(cap) + " steps on " + w.describe());
}

}  // namespace loglattice
