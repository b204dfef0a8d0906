#include "span_floor.hpp"

#include <map>

#include "loglattice/errors.hpp"
#include "loglattice/sparse_matrix.hpp"

namespace loglattice::detail {

namespace {
using Row = std::pair<Exponent, std::size_t>;
}

Exponent saturate_floor(std::size_t rank, const Exponent& shift, const WeightWindow& w, bool clip,
                        const std::vector<Operator>& ops, const Exponent& margin, const std::string& what) {
    const std::size_t n = w.n_vars();
    Exponent floor = scaled(shift, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (floor[i] < w.lo()[i]) {
            if (!clip) throw WindowOverflow("lattice of " + what + " leaves the window " + w.describe());
            floor[i] = w.lo()[i];
        }
        if (floor[i] > w.hi()[i]) throw InvalidArgument("window too small for the lattice of " + what);
    }

    // Images of generators, keeping only rows outside the current box.
    std::vector<std::vector<std::pair<Row, Rational>>> images;
    Exponent new_floor = floor;
    WeightWindow::for_each_in_box(floor, w.hi(), [&](const Exponent& a) {
        for (std::size_t j = 0; j < rank; ++j)
            for (const auto& op : ops) {
                std::vector<std::pair<Row, Rational>> v;
                for (auto& t : op(a, j)) {
                    if (!w.contains(t.alpha)) {
                        if (!clip)
                            throw WindowOverflow("saturation of " + what + " leaves the window " +
                                                 w.describe());
                        continue;
                    }
                    if (leq(floor, t.alpha)) continue;
                    new_floor = componentwise_min(new_floor, t.alpha);
                    v.push_back({{t.alpha, t.fiber}, t.coeff});
                }
                if (!v.empty()) images.push_back(std::move(v));
            }
    });
    if (images.empty()) return scaled(floor, -1);

    // The part of the new box at least `margin` below the top must lie in the span.
    const Exponent top = exp_sub(w.hi(), margin);
    std::map<Row, std::size_t> row_index;
    std::vector<bool> reliable_row;
    auto index = [&](const Row& r) {
        auto [it, fresh] = row_index.try_emplace(r, row_index.size());
        if (fresh) reliable_row.push_back(leq(r.first, top));
        return it->second;
    };
    std::size_t reliable = 0;
    WeightWindow::for_each_in_box(new_floor, top, [&](const Exponent& a) {
        if (leq(floor, a)) return;
        for (std::size_t j = 0; j < rank; ++j) {
            index({a, j});
            ++reliable;
        }
    });
    for (const auto& v : images)
        for (const auto& [r, c] : v) index(r);
    SparseMatrixQ m(row_index.size(), images.size());
    for (std::size_t c = 0; c < images.size(); ++c)
        for (const auto& [r, v] : images[c]) m.add(row_index.at(r), c, v);
    std::vector<std::size_t> strip;
    for (std::size_t r = 0; r < reliable_row.size(); ++r)
        if (!reliable_row[r]) strip.push_back(r);
    if (rank_q(m) != reliable + rank_q(m.select_rows(strip)))
        throw Error("span of " + what + " is not a monomial lattice");
    return scaled(new_floor, -1);
}

}  // namespace loglattice::detail
