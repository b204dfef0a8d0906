#include "loglattice/connection.hpp"

#include <algorithm>
#include <climits>
#include <sstream>

#include "loglattice/errors.hpp"

namespace loglattice {

ExponentialFactor ExponentialFactor::monomial(const Exponent& pole, const Rational& c) {
    ExponentialFactor f(pole.size());
    f.add_term(pole, c);
    return f;
}

void ExponentialFactor::add_term(const Exponent& beta, const Rational& c) {
    if (beta.size() != n_) throw InvalidArgument("exponential factor: wrong number of variables");
    bool nonzero = false;
    for (int b : beta) {
        if (b < 0) throw InvalidArgument("exponential factor: pole exponents must be >= 0");
        nonzero = nonzero || b > 0;
    }
    if (!nonzero) throw InvalidArgument("exponential factor: constant term is not allowed");
    if (c == 0) return;
    auto [it, fresh] = terms_.try_emplace(beta, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Exponent ExponentialFactor::pole_divisor() const {
    Exponent m(n_, 0);
    for (const auto& [b, c] : terms_) m = componentwise_max(m, b);
    return m;
}

bool ExponentialFactor::is_good() const {
    if (terms_.empty()) return true;
    return terms_.count(pole_divisor()) == 1;
}

TruncatedLaurentSeries ExponentialFactor::as_series(const WeightWindow& w) const {
    TruncatedLaurentSeries s(w);
    for (const auto& [b, c] : terms_) s.add_term(scaled(b, -1), c);
    return s;
}

std::string ExponentialFactor::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [b, c] : terms_) {
        os << (first ? "" : " + ") << loglattice::to_string(c) << "*x^-" << loglattice::to_string(b);
        first = false;
    }
    return os.str();
}

RegularBlock RegularBlock::scalar(std::size_t n_vars, const Rational& lambda, std::size_t rank) {
    RegularBlock r;
    r.rank = rank;
    r.residues.assign(n_vars, lambda);
    return r;
}

bool RegularBlock::tau_normalized() const {
    return std::all_of(residues.begin(), residues.end(),
                       [](const Rational& l) { return l >= 0 && l < 1; });
}

Rational RegularBlock::nilpotent_entry(std::size_t i, std::size_t row, std::size_t col) const {
    if (nilpotent.empty()) return 0;
    return nilpotent[i][row][col];
}

namespace {

DenseMatrixQ mat_mul(const DenseMatrixQ& a, const DenseMatrixQ& b) {
    const std::size_t n = a.size();
    DenseMatrixQ c(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            if (a[i][k] != 0)
                for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
}

bool is_zero(const DenseMatrixQ& a) {
    for (const auto& r : a)
        for (const auto& v : r)
            if (v != 0) return false;
    return true;
}

}  // namespace

void RegularBlock::validate(std::size_t n_vars) const {
    if (rank == 0) throw InvalidArgument("regular block of rank 0");
    if (residues.size() != n_vars)
        throw InvalidArgument("regular block: need one residue per branch");
    if (nilpotent.empty()) return;
    if (nilpotent.size() != n_vars)
        throw InvalidArgument("regular block: need one nilpotent matrix per branch");
    for (const auto& n : nilpotent) {
        if (n.size() != rank) throw InvalidArgument("regular block: nilpotent matrix has wrong size");
        for (const auto& r : n)
            if (r.size() != rank) throw InvalidArgument("regular block: nilpotent matrix has wrong size");
        DenseMatrixQ p = n;
        for (std::size_t k = 1; k < rank; ++k) p = mat_mul(p, n);
        if (!is_zero(p)) throw InvalidArgument("regular block: matrix is not nilpotent");
    }
    for (std::size_t i = 0; i < n_vars; ++i)
        for (std::size_t j = i + 1; j < n_vars; ++j)
            if (mat_mul(nilpotent[i], nilpotent[j]) != mat_mul(nilpotent[j], nilpotent[i]))
                throw InvalidArgument("regular block: nilpotent parts do not commute");
}

std::vector<ElementaryModel::Term> ElementaryModel::nabla_log(std::size_t i, const Exponent& alpha,
                                                              std::size_t fiber) const {
    std::vector<Term> out;
    const Rational diag = alpha[i] + regular.residues[i];
    if (diag != 0) out.push_back({alpha, fiber, diag});
    if (!regular.nilpotent.empty())
        for (std::size_t k = 0; k < regular.rank; ++k) {
            const Rational& v = regular.nilpotent[i][k][fiber];
            if (v != 0) out.push_back({alpha, k, v});
        }
    for (const auto& [beta, c] : phi.terms())
        if (beta[i] != 0) out.push_back({exp_sub(alpha, beta), fiber, -c * beta[i]});
    return out;
}

FormalConnection::FormalConnection(std::size_t n_vars, std::vector<ElementaryModel> blocks)
    : n_(n_vars), blocks_(std::move(blocks)) {
    for (const auto& b : blocks_) {
        if (b.phi.n_vars() != n_) throw InvalidArgument("block exponential factor has wrong n_vars");
        b.regular.validate(n_);
    }
}

std::size_t FormalConnection::rank() const {
    std::size_t r = 0;
    for (const auto& b : blocks_) r += b.rank();
    return r;
}

bool FormalConnection::is_good() const {
    return std::all_of(blocks_.begin(), blocks_.end(), [](const auto& b) { return b.phi.is_good(); });
}

bool FormalConnection::tau_normalized() const {
    return std::all_of(blocks_.begin(), blocks_.end(),
                       [](const auto& b) { return b.regular.tau_normalized(); });
}

int FormalConnection::max_pole() const {
    int m = 0;
    for (const auto& b : blocks_)
        for (int v : b.phi.pole_divisor()) m = std::max(m, v);
    return m;
}

std::map<int, Rational> RankOneForm::local_coefficients(const P1Point& p) const {
    if (!p.infinity && p.coord != 0)
        throw InvalidArgument("only the points 0 and inf are supported, got " + p.to_string());
    if (!p.infinity) return coeffs;
    // x = 1/y, dx = -dy/y^2: x^k dx = -y^{-k-2} dy
    std::map<int, Rational> out;
    for (const auto& [k, c] : coeffs)
        if (c != 0) out[-k - 2] = -c;
    return out;
}

int RankOneForm::pole_order(const P1Point& p) const {
    int m = 0;
    for (const auto& [j, c] : local_coefficients(p))
        if (c != 0 && j < 0) m = std::max(m, -j);
    return m;
}

CurveConnection::CurveConnection(BoundaryDivisor boundary, std::vector<RankOneForm> summands)
    : boundary_(std::move(boundary)), summands_(std::move(summands)) {
    for (const auto& p : boundary_.points())
        if (!p.infinity && p.coord != 0)
            throw InvalidArgument("boundary point " + p.to_string() + " is not 0 or inf");
    const P1Point zero = P1Point::at(0), inf = P1Point::at_infinity();
    for (const auto& s : summands_)
        for (const auto& p : {zero, inf})
            if (s.pole_order(p) > 0 && !boundary_.contains(p))
                throw InvalidArgument("connection form has a pole at " + p.to_string() +
                                      " outside the boundary");
}

int LocalType::pole() const {
    const Exponent m = phi.pole_divisor();
    return m.empty() ? 0 : m[0];
}

ElementaryModel LocalType::model() const {
    return {phi, RegularBlock::scalar(1, lambda)};
}

LocalType local_formal_type(const RankOneForm& omega, const P1Point& p) {
    LocalType t;
    t.phi = ExponentialFactor(1);
    for (const auto& [j, a] : omega.local_coefficients(p)) {
        if (a == 0) continue;
        if (j <= -2) t.phi.add_term({-(j + 1)}, a / Rational(j + 1));
        if (j == -1) t.residue = a;
    }
    t.twist = floor_to_int(t.residue);
    t.lambda = t.residue - t.twist;
    return t;
}

FormalConnection local_formal_connection(const CurveConnection& c, const P1Point& p) {
    std::vector<ElementaryModel> blocks;
    for (const auto& s : c.summands()) blocks.push_back(local_formal_type(s, p).model());
    return FormalConnection(1, std::move(blocks));
}

SeedLattice dm_lattice(const FormalConnection& f) {
    SeedLattice s;
    for (std::size_t b = 0; b < f.blocks().size(); ++b) {
        const auto& blk = f.blocks()[b];
        if (!blk.phi.is_good())
            throw InvalidArgument("block " + std::to_string(b) + " has no dominant pole monomial");
        if (!blk.regular.tau_normalized())
            throw InvalidArgument("block " + std::to_string(b) + " has a residue outside [0,1)");
        s.shifts.emplace_back(f.n_vars(), 0);
    }
    return s;
}

PuiseuxType pullback(const PuiseuxType& t, int rho) {
    if (rho < 1) throw InvalidArgument("cover degree must be positive");
    PuiseuxType r;
    for (const auto& [q, c] : t.terms) r.terms[q * rho] += c;
    r.residue = t.residue * rho;
    return r;
}

LocalType local_formal_type(const PuiseuxType& t) {
    LocalType lt;
    lt.phi = ExponentialFactor(1);
    for (const auto& [q, c] : t.terms) {
        if (q <= 0) throw InvalidArgument("exponential factor exponents must be positive");
        if (!is_integer(q))
            throw RamifiedInput("pole exponent " + to_string(q) + " is not an integer");
        lt.phi.add_term({static_cast<int>(q.get_num().get_si())}, c);
    }
    lt.residue = t.residue;
    lt.twist = floor_to_int(t.residue);
    lt.lambda = t.residue - lt.twist;
    return lt;
}

int ramification_index(const PuiseuxType& t, int bound) {
    if (bound < 1) throw InvalidArgument("ramification bound must be positive");
    for (int rho = 1; rho <= bound; ++rho) {
        if (bound % rho != 0) continue;
        try {
            local_formal_type(pullback(t, rho));
            return rho;
        } catch (const RamifiedInput&) {
        }
    }
    throw RamifiedInput("no cover of degree dividing " + std::to_string(bound) + " unramifies the input");
}

int ramification_index(const std::vector<PuiseuxType>& summands, int bound) {
    if (bound < 1) throw InvalidArgument("ramification bound must be positive");
    for (int rho = 1; rho <= bound; ++rho) {
        if (bound % rho != 0) continue;
        bool ok = true;
        for (const auto& s : summands) {
            try {
                local_formal_type(pullback(s, rho));
            } catch (const RamifiedInput&) {
                ok = false;
                break;
            }
        }
        if (ok) return rho;
    }
    throw RamifiedInput("no cover of degree dividing " + std::to_string(bound) + " unramifies the input");
}

namespace {

void check_kummer(const KummerData& k) {
    if (k.weights.size() != k.upstairs.size())
        throw InvalidArgument("kummer: weights and upstairs lattice have different ranks");
    for (int r : k.rho)
        if (r < 1) throw InvalidArgument("kummer: cover degrees must be positive");
    for (std::size_t j = 0; j < k.weights.size(); ++j)
        if (k.weights[j].size() != k.rho.size() || k.upstairs[j].size() != k.rho.size())
            throw InvalidArgument("kummer: vector length differs from the number of branches");
}

int floor_div(int a, int b) {
    int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

std::vector<Exponent> kummer_invariants(const KummerData& k, const WeightWindow& w) {
    check_kummer(k);
    const std::size_t n = k.rho.size();
    if (w.n_vars() != n) throw InvalidArgument("kummer: window has wrong number of variables");
    std::vector<Exponent> out;
    for (std::size_t j = 0; j < k.weights.size(); ++j) {
        const Exponent floor_up = scaled(k.upstairs[j], -1);
        for (std::size_t i = 0; i < n; ++i)
            if (floor_up[i] < w.lo()[i] || floor_up[i] + k.rho[i] - 1 > w.hi()[i])
                throw WindowOverflow("kummer: upstairs lattice of fibre " + std::to_string(j) +
                                     " does not fit the window " + w.describe());
        Exponent best(n, INT_MAX);
        bool found = false;
        w.for_each([&](const Exponent& a) {
            if (!leq(floor_up, a)) return;
            for (std::size_t i = 0; i < n; ++i)
                if ((a[i] + k.weights[j][i]) % k.rho[i] != 0) return;
            found = true;
            for (std::size_t i = 0; i < n; ++i)
                best[i] = std::min(best[i], (a[i] + k.weights[j][i]) / k.rho[i]);
        });
        if (!found) throw WindowOverflow("kummer: no invariant section in the window");
        out.push_back(scaled(best, -1));
    }
    return out;
}

std::vector<Exponent> kummer_invariants_formula(const KummerData& k) {
    check_kummer(k);
    std::vector<Exponent> out;
    for (std::size_t j = 0; j < k.weights.size(); ++j) {
        Exponent s(k.rho.size());
        for (std::size_t i = 0; i < s.size(); ++i)
            s[i] = floor_div(k.upstairs[j][i] - k.weights[j][i], k.rho[i]);
        out.push_back(s);
    }
    return out;
}

}  // namespace loglattice
