#include "loglattice/sparse_matrix.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <unordered_map>

#include "loglattice/errors.hpp"

namespace loglattice {

namespace {

std::atomic<std::size_t> g_block_cap{0};
thread_local std::size_t t_last_block = 0;

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

// Sparse integer row, sorted by column.
using IntRow = std::vector<std::pair<std::size_t, Integer>>;

void remove_content(IntRow& r) {
    if (r.empty()) return;
    Integer g = 0;
    for (const auto& e : r) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), e.second.get_mpz_t());
        if (g == 1) break;
    }
    if (r.front().second < 0) g = -g;
    if (g != 1)
        for (auto& e : r) mpz_divexact(e.second.get_mpz_t(), e.second.get_mpz_t(), g.get_mpz_t());
}

// a*r - b*p, both sorted by column.
IntRow combine(const Integer& a, const IntRow& r, const Integer& b, const IntRow& p) {
    IntRow out;
    out.reserve(r.size() + p.size());
    std::size_t i = 0, j = 0;
    while (i < r.size() || j < p.size()) {
        if (j == p.size() || (i < r.size() && r[i].first < p[j].first)) {
            out.emplace_back(r[i].first, a * r[i].second);
            ++i;
        } else if (i == r.size() || p[j].first < r[i].first) {
            out.emplace_back(p[j].first, -b * p[j].second);
            ++j;
        } else {
            Integer v = a * r[i].second - b * p[j].second;
            if (v != 0) out.emplace_back(r[i].first, std::move(v));
            ++i;
            ++j;
        }
    }
    return out;
}

std::size_t sparse_rank(std::vector<IntRow> rows) {
    std::unordered_map<std::size_t, IntRow> pivots;
    for (auto& r : rows) {
        remove_content(r);
        while (!r.empty()) {
            const std::size_t c = r.front().first;
            auto it = pivots.find(c);
            if (it == pivots.end()) {
                pivots.emplace(c, std::move(r));
                break;
            }
            const IntRow& p = it->second;
            r = combine(p.front().second, r, r.front().second, p);
            remove_content(r);
        }
    }
    return pivots.size();
}

// Row of rationals scaled to a primitive integer row.
IntRow integer_row(const std::vector<std::pair<std::size_t, Rational>>& r) {
    Integer l = 1;
    for (const auto& e : r) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), e.second.get_den_mpz_t());
    IntRow out;
    out.reserve(r.size());
    for (const auto& e : r) {
        Integer v = e.second.get_num() * (l / e.second.get_den());
        out.emplace_back(e.first, std::move(v));
    }
    return out;
}

}  // namespace

SparseMatrixQ SparseMatrixQ::identity(std::size_t n) {
    SparseMatrixQ m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.entries_.emplace(Key{i, i}, Rational(1));
    return m;
}

SparseMatrixQ SparseMatrixQ::from_dense(const std::vector<std::vector<Rational>>& rows) {
    const std::size_t c = rows.empty() ? 0 : rows.front().size();
    SparseMatrixQ m(rows.size(), c);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != c) throw InvalidArgument("from_dense: ragged rows");
        for (std::size_t j = 0; j < c; ++j) m.set(i, j, rows[i][j]);
    }
    return m;
}

Rational SparseMatrixQ::at(std::size_t i, std::size_t j) const {
    auto it = entries_.find({i, j});
    return it == entries_.end() ? Rational(0) : it->second;
}

void SparseMatrixQ::set(std::size_t i, std::size_t j, const Rational& v) {
    if (i >= rows_ || j >= cols_) throw InvalidArgument("matrix index out of range");
    if (v == 0)
        entries_.erase({i, j});
    else
        entries_[{i, j}] = v;
}

void SparseMatrixQ::add(std::size_t i, std::size_t j, const Rational& v) {
    if (i >= rows_ || j >= cols_) throw InvalidArgument("matrix index out of range");
    if (v == 0) return;
    auto [it, fresh] = entries_.try_emplace(Key{i, j}, v);
    if (!fresh) {
        it->second += v;
        if (it->second == 0) entries_.erase(it);
    }
}

SparseMatrixQ SparseMatrixQ::transposed() const {
    SparseMatrixQ t(cols_, rows_);
    for (const auto& [k, v] : entries_) t.entries_.emplace(Key{k.second, k.first}, v);
    return t;
}

SparseMatrixQ SparseMatrixQ::operator*(const SparseMatrixQ& o) const {
    if (cols_ != o.rows_) throw InvalidArgument("matrix product shape mismatch");
    std::vector<std::vector<std::pair<std::size_t, const Rational*>>> orow(o.rows_);
    for (const auto& [k, v] : o.entries_) orow[k.first].emplace_back(k.second, &v);
    SparseMatrixQ r(rows_, o.cols_);
    for (const auto& [k, v] : entries_)
        for (const auto& [j, w] : orow[k.second]) r.add(k.first, j, v * *w);
    return r;
}

SparseMatrixQ SparseMatrixQ::operator-(const SparseMatrixQ& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw InvalidArgument("matrix difference shape mismatch");
    SparseMatrixQ r(*this);
    for (const auto& [k, v] : o.entries_) r.add(k.first, k.second, -v);
    return r;
}

SparseMatrixQ SparseMatrixQ::scaled(const Rational& c) const {
    SparseMatrixQ r(rows_, cols_);
    if (c == 0) return r;
    for (const auto& [k, v] : entries_) r.entries_.emplace(k, v * c);
    return r;
}

SparseMatrixQ SparseMatrixQ::select_rows(const std::vector<std::size_t>& keep) const {
    std::vector<long> where(rows_, -1);
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] >= rows_) throw InvalidArgument("select_rows: index out of range");
        where[keep[i]] = static_cast<long>(i);
    }
    SparseMatrixQ r(keep.size(), cols_);
    for (const auto& [k, v] : entries_)
        if (where[k.first] >= 0) r.entries_.emplace(Key{static_cast<std::size_t>(where[k.first]), k.second}, v);
    return r;
}

SparseMatrixQ SparseMatrixQ::select_cols(const std::vector<std::size_t>& keep) const {
    std::vector<long> where(cols_, -1);
    for (std::size_t j = 0; j < keep.size(); ++j) {
        if (keep[j] >= cols_) throw InvalidArgument("select_cols: index out of range");
        where[keep[j]] = static_cast<long>(j);
    }
    SparseMatrixQ r(rows_, keep.size());
    for (const auto& [k, v] : entries_)
        if (where[k.second] >= 0) r.entries_.emplace(Key{k.first, static_cast<std::size_t>(where[k.second])}, v);
    return r;
}

SparseMatrixQ SparseMatrixQ::hconcat(const SparseMatrixQ& o) const {
    if (rows_ != o.rows_) throw InvalidArgument("hconcat: row count mismatch");
    SparseMatrixQ r(rows_, cols_ + o.cols_);
    r.entries_ = entries_;
    for (const auto& [k, v] : o.entries_) r.entries_.emplace(Key{k.first, k.second + cols_}, v);
    return r;
}

SparseMatrixQ SparseMatrixQ::vconcat(const SparseMatrixQ& o) const {
    if (cols_ != o.cols_) throw InvalidArgument("vconcat: column count mismatch");
    SparseMatrixQ r(rows_ + o.rows_, cols_);
    r.entries_ = entries_;
    for (const auto& [k, v] : o.entries_) r.entries_.emplace(Key{k.first + rows_, k.second}, v);
    return r;
}

std::vector<std::vector<Rational>> SparseMatrixQ::to_dense() const {
    std::vector<std::vector<Rational>> d(rows_, std::vector<Rational>(cols_, Rational(0)));
    for (const auto& [k, v] : entries_) d[k.first][k.second] = v;
    return d;
}

std::size_t bareiss_rank(std::vector<std::vector<Integer>> a) {
    const std::size_t m = a.size();
    if (m == 0) return 0;
    const std::size_t n = a.front().size();
    Integer prev = 1;
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < m; ++c) {
        std::size_t p = r;
        while (p < m && a[p][c] == 0) ++p;
        if (p == m) continue;
        std::swap(a[p], a[r]);
        for (std::size_t i = r + 1; i < m; ++i) {
            for (std::size_t j = c + 1; j < n; ++j) {
                a[i][j] = a[r][c] * a[i][j] - a[i][c] * a[r][j];
                mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
            }
            a[i][c] = 0;
        }
        prev = a[r][c];
        ++r;
    }
    return r;
}

std::size_t rank_q(const SparseMatrixQ& m) {
    t_last_block = 0;
    if (m.is_zero()) return 0;
    const std::size_t R = m.rows();
    UnionFind uf(R + m.cols());
    for (const auto& [k, v] : m.entries()) uf.unite(k.first, R + k.second);

    // Group rows by component; entries arrive sorted by (row, col).
    std::unordered_map<std::size_t, std::vector<std::vector<std::pair<std::size_t, Rational>>>> comps;
    std::unordered_map<std::size_t, std::size_t> comp_cols;
    std::vector<bool> col_seen(m.cols(), false);
    std::size_t cur_row = static_cast<std::size_t>(-1);
    std::vector<std::pair<std::size_t, Rational>>* row = nullptr;
    for (const auto& [k, v] : m.entries()) {
        if (k.first != cur_row) {
            cur_row = k.first;
            auto& list = comps[uf.find(k.first)];
            list.emplace_back();
            row = &list.back();
        }
        row->emplace_back(k.second, v);
        if (!col_seen[k.second]) {
            col_seen[k.second] = true;
            ++comp_cols[uf.find(R + k.second)];
        }
    }

    const std::size_t cap = g_block_cap.load();
    std::size_t total = 0;
    for (auto& [root, rows] : comps) {
        const std::size_t ncols = comp_cols[root];
        const std::size_t size = rows.size() + ncols;
        t_last_block = std::max(t_last_block, size);
        if (cap != 0 && size > cap)
            throw DimensionCap("rank block of size " + std::to_string(size) + " exceeds cap " +
                               std::to_string(cap));
        if (rows.size() == 1) {
            ++total;
            continue;
        }
        std::vector<IntRow> irows;
        irows.reserve(rows.size());
        for (const auto& r : rows) irows.push_back(integer_row(r));
        total += sparse_rank(std::move(irows));
    }
    return total;
}

std::size_t last_rank_block_size() { return t_last_block; }

void set_block_dimension_cap(std::size_t cap) { g_block_cap.store(cap); }
std::size_t block_dimension_cap() { return g_block_cap.load(); }

}  // namespace loglattice
