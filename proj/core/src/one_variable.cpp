#include "loglattice/one_variable.hpp"

#include "loglattice/errors.hpp"
#include "span_floor.hpp"

namespace loglattice {

std::vector<ElementaryModel::Term> partial(const ElementaryModel& blk, int a, std::size_t fiber) {
    auto terms = blk.nabla_log(0, Exponent{a}, fiber);
    for (auto& t : terms) t.alpha[0] -= 1;
    return terms;
}

SparseMatrixQ one_variable_matrix(const ElementaryModel& blk, Range1 src, Range1 dst, bool use_partial,
                                  const Rational& sign) {
    if (blk.phi.n_vars() != 1) throw InvalidArgument("one-variable operator on a multivariable block");
    const std::size_t r = blk.rank();
    SparseMatrixQ m(dst.count() * r, src.count() * r);
    for (int a = src.lo; a <= src.hi; ++a)
        for (std::size_t j = 0; j < r; ++j) {
            const auto terms = use_partial ? partial(blk, a, j) : blk.nabla_log(0, Exponent{a}, j);
            const std::size_t col = static_cast<std::size_t>(a - src.lo) * r + j;
            for (const auto& t : terms)
                if (dst.contains(t.alpha[0]))
                    m.add(static_cast<std::size_t>(t.alpha[0] - dst.lo) * r + t.fiber, col, sign * t.coeff);
        }
    return m;
}

SparseMatrixQ drop_rows_in(const SparseMatrixQ& m, const ElementaryModel& blk, Range1 dst, Range1 sub) {
    const std::size_t r = blk.rank();
    std::vector<std::size_t> keep;
    for (int a = dst.lo; a <= dst.hi; ++a)
        if (!sub.contains(a))
            for (std::size_t j = 0; j < r; ++j) keep.push_back(static_cast<std::size_t>(a - dst.lo) * r + j);
    return m.select_rows(keep);
}

int derivation_step(const ElementaryModel& blk, int shift, const WeightWindow& w, bool clip) {
    if (w.n_vars() != 1) throw InvalidArgument("derivation_step needs a one-variable window");
    std::vector<detail::Operator> ops{[&blk](const Exponent& a, std::size_t j) { return partial(blk, a[0], j); }};
    const Exponent margin{blk.phi.pole_divisor()[0] + 1};
    return detail::saturate_floor(blk.rank(), Exponent{shift}, w, clip, ops, margin, "derivative span")[0];
}

}  // namespace loglattice
