#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "loglattice/connection.hpp"
#include "loglattice/geometry.hpp"
#include "loglattice/weight_window.hpp"

namespace loglattice {

/// One lattice of the tower: block b is x^{-shifts[b]}·O ⊗ R_b.
struct Level {
    std::vector<Exponent> shifts;
    bool operator==(const Level&) const = default;
};

/// E_0 ⊂ E_1 ⊂ ... ⊂ E_n, stored as per-block pole orders.
class LatticeTower {
public:
    LatticeTower() = default;
    LatticeTower(FormalConnection conn, std::vector<Level> levels);

    const FormalConnection& connection() const { return conn_; }
    std::size_t n_vars() const { return conn_.n_vars(); }
    std::size_t depth() const { return levels_.empty() ? 0 : levels_.size() - 1; }
    const std::vector<Level>& levels() const { return levels_; }
    /// Level i; beyond the stored depth the tower is continued by the closed form.
    Level level(int i) const;
    /// Pole order of block b at level i ≥ 0, twisted by delta.
    Exponent floor_shift(std::size_t b, int i, const TwistDivisor& delta) const;

    /// Every level shifted by a ≥ 0 extra pole order in every direction.
    LatticeTower shifted(int a) const;

private:
    FormalConnection conn_;
    std::vector<Level> levels_;
};

/// Smallest lattice containing E and every ∇_{x_i∂_i}E, found from the span of
/// generators on the window. With clip = true exponents below the window floor are
/// dropped and the result is clipped to the window; otherwise leaving the window throws
/// WindowOverflow. Throws Error if the span is not a monomial lattice.
Level step(const Level& e, const FormalConnection& conn, const WeightWindow& w, bool clip = false);
/// Same with a window chosen large enough for one step.
Level step(const Level& e, const FormalConnection& conn);

/// Iterates step() from the seed.
LatticeTower tower(const Level& seed, const FormalConnection& conn, int depth);
LatticeTower tower(const FormalConnection& conn, int depth);

/// Level i = ⊕ L_φ(i·I_φ) ⊗ R_φ, no iteration.
LatticeTower closed_form_tower(const FormalConnection& conn, int depth);

/// Length of E_1/E_0 for a one-variable local type: Σ rank·(pole order of φ).
long irregularity(const FormalConnection& conn);

/// step(E_0) == E_0.
bool is_regular_singular(const FormalConnection& conn);

/// Window-restricted V⁰E(Δ): the levels clipped to w until they stop growing.
struct V0Module {
    LatticeTower tower;
    WeightWindow window;
    TwistDivisor delta;
    int stabilization_index = 0;
    /// Per block pole order of the stabilized window-clipped lattice (twist included).
    std::vector<Exponent> floor;
};

/// Iteration cap 1 + depth/min pole order, where depth is the window's largest pole.
V0Module v0_on_window(const FormalConnection& conn, const WeightWindow& w, const TwistDivisor& delta);

}  // namespace loglattice
