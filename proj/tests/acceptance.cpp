// Acceptance checks: one PASS/FAIL line per criterion, tolerances and time limits pinned here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fracwave/complex_dyn.hpp"
#include "fracwave/cycles.hpp"
#include "fracwave/errors.hpp"
#include "fracwave/filters.hpp"
#include "fracwave/fourier_product.hpp"
#include "fracwave/spectra.hpp"
#include "fracwave/transfer.hpp"
#include "fracwave/wavelet.hpp"
#include "oracles.hpp"

using namespace fracwave;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::set<std::int64_t> scalars(const std::vector<IntVector>& v) {
    std::set<std::int64_t> s;
    for (const auto& x : v) s.insert(x[0]);
    return s;
}

std::vector<Rational> points_1d(const Cycle& c) {
    std::vector<Rational> out;
    for (const auto& p : c.points) out.push_back(p[0]);
    return out;
}

const AffineIFS& cantor4() {
    static const AffineIFS ifs(ExpansiveIntMatrix::scalar(4), DigitSet::scalars({0, 2}));
    return ifs;
}

TrigPolynomial haar() { return TrigPolynomial::from_scalar_map({{0, 0.5}, {1, 0.5}}); }
TrigPolynomial stretched() { return TrigPolynomial::from_scalar_map({{0, 0.5}, {3, 0.5}}); }

// 1: Hadamard certificate for (4, {0,2}, {0,1}).
Outcome criterion1() {
    Outcome o;
    const auto c = hadamard_check(ExpansiveIntMatrix::scalar(4), DigitSet::scalars({0, 2}), DigitSet::scalars({0, 1}));
    o.require(c.valid, "not certified");
    o.require(c.unitarity_defect <= 1e-12, "defect " + fmt("%.3g", c.unitarity_defect));
    const double r = 1 / std::sqrt(2.0);
    const Complex want[2][2] = {{r, r}, {r, -r}};
    double worst = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) worst = std::max(worst, std::abs(c.matrix[i][j] - want[i][j]));
    o.require(worst <= 1e-12, "matrix deviation " + fmt("%.3g", worst));
    o.detail = "defect " + fmt("%.2g", c.unitarity_defect) + ", matrix deviation " + fmt("%.2g", worst) +
               (o.ok ? "" : "; " + o.detail);
    return o;
}

// 2: lambda0(4, {0,1}, 2) and its 28 exact Gram zeros.
Outcome criterion2() {
    Outcome o;
    const auto s = lambda0(ExpansiveIntMatrix::scalar(4), DigitSet::scalars({0, 1}), 2);
    o.require(scalars(s.elements) == std::set<std::int64_t>{0, 1, 4, 5, 16, 17, 20, 21}, "wrong set");
    const auto g = verify_orthogonality(cantor4(), s);
    o.require(g.exact_zero_pairs == 28, std::to_string(g.exact_zero_pairs) + " exact zeros");
    o.require(g.numeric_zero_pairs == 0 && g.nonzero_pairs == 0, "uncertified pairs");
    o.require(g.max_diag_deviation <= 1e-12, "diagonal");
    if (o.ok) o.detail = "8 elements, 28/28 off-diagonal entries exact zeros";
    return o;
}

struct FixtureRow {
    RationalVector x;
    unsigned level;
    double gap;
};

std::vector<FixtureRow> load_gap_fixture() {
    std::ifstream in(FRACWAVE_FIXTURE_DIR "/completeness_gaps.csv");
    if (!in) throw InvalidInput("missing fixture completeness_gaps.csv");
    std::vector<FixtureRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("x,", 0) == 0) continue;
        std::stringstream ss(line);
        std::string x, level, gap;
        std::getline(ss, x, ',');
        std::getline(ss, level, ',');
        std::getline(ss, gap, ',');
        const auto slash = x.find('/');
        rows.push_back({RationalVector(IntVector{std::stoll(x.substr(0, slash))}, std::stoll(x.substr(slash + 1))),
                        static_cast<unsigned>(std::stoul(level)), std::stod(gap)});
    }
    return rows;
}

// 3: completeness scan, 16 grid points, levels 2..8.
Outcome criterion3() {
    Outcome o;
    // Observed per-level decay of the gap 1 - h is 0.282..0.291 across the grid; the level-8 gap must
    // stay below the level-2 gap shrunk by this ratio over six levels.
    constexpr double kDecayRatio = 0.29;
    std::vector<RationalVector> grid;
    for (int k = 0; k < 16; ++k) grid.push_back(RationalVector(IntVector{k}, 16));
    const std::vector<unsigned> levels{2, 3, 4, 5, 6, 7, 8};
    const auto s = lambda0(ExpansiveIntMatrix::scalar(4), DigitSet::scalars({0, 1}), 8);
    const auto rep = verify_completeness(cantor4(), s, grid, levels);
    o.require(rep.orthogonality.certified_orthogonal(), "orthogonality not certified");
    double worst_gap8 = 0, worst_ratio = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double prev = -1, gap2 = 0;
        for (std::size_t l = 0; l < levels.size(); ++l) {
            const auto& r = rep.rows[i * levels.size() + l];
            o.require(r.partial_sum + r.error_bound >= prev, "not monotone at x = " + r.x.str());
            o.require(r.partial_sum <= 1 + 1e-8, "exceeds 1 at x = " + r.x.str());
            prev = r.partial_sum;
            if (r.level == 2) gap2 = 1 - r.partial_sum;
            if (r.level == 8) {
                const double gap8 = 1 - r.partial_sum;
                o.require(r.partial_sum >= 1 - 1e-3, "level 8 below 1 - 1e-3 at x = " + r.x.str());
                o.require(gap8 <= gap2 * std::pow(kDecayRatio, 6) + r.error_bound + 1e-15,
                          "level-8 gap above calibrated bound at x = " + r.x.str());
                worst_gap8 = std::max(worst_gap8, gap8);
                if (gap2 > 0) worst_ratio = std::max(worst_ratio, std::pow(gap8 / gap2, 1.0 / 6));
            }
        }
    }
    // frozen high-precision gaps
    double fixture_dev = 0;
    for (const auto& f : load_gap_fixture()) {
        const auto r = verify_completeness(cantor4(), s, {f.x}, {f.level}).rows.at(0);
        const double dev = std::abs((1 - r.partial_sum) - f.gap);
        fixture_dev = std::max(fixture_dev, dev);
        o.require(dev <= r.error_bound + 1e-12, "fixture mismatch at x = " + f.x.str());
    }
    const std::string summary = "worst level-8 gap " + fmt("%.3g", worst_gap8) + ", mean decay ratio <= " +
                                fmt("%.4f", worst_ratio) + ", fixture deviation " + fmt("%.2g", fixture_dev);
    o.detail = o.ok ? summary : summary + "; " + o.detail;
    return o;
}

// 4: middle-third negative result.
Outcome criterion4() {
    Outcome o;
    const auto A = ExpansiveIntMatrix::scalar(3);
    const auto B = DigitSet::scalars({0, 2});
    std::size_t pairs = 0, certified = 0;
    for (std::int64_t l1 = -50; l1 <= 50; ++l1)
        for (std::int64_t l2 = l1 + 1; l2 <= 50; ++l2) {
            ++pairs;
            // the Hadamard property is invariant under translating L, so test L - l1 with the library
            // and the untranslated L with the naive matrix
            const auto c = hadamard_check(A, B, DigitSet::scalars({0, l2 - l1}));
            const double naive = oracle::hadamard_defect(3, {0, 2}, {l1, l2});
            if (c.valid || naive <= 1e-12) ++certified;
        }
    o.require(certified == 0, std::to_string(certified) + " triples certified");

    const AffineIFS mt(A, B);
    const RationalVector q34(IntVector{3}, 4);
    const auto base = mu_hat(mt, q34);
    o.require(base.exact_zero, "e_0 and e_3/4 not certified orthogonal");
    std::size_t tested = 0, both = 0, undecided = 0;
    for (std::int64_t q = 1; q <= 64; ++q)
        for (std::int64_t p = -8 * q; p <= 8 * q; ++p) {
            if (oracle::gcd64(p, q) != 1) continue;
            ++tested;
            const RationalVector r(IntVector{p}, q);
            const auto a = mu_hat(mt, r);
            const auto b = mu_hat(mt, r - q34);
            if (a.exact_zero && b.exact_zero) ++both;
            if (!a.certified_nonzero && !b.certified_nonzero) ++undecided;
        }
    o.require(both == 0, std::to_string(both) + " rationals orthogonal to both");
    o.require(undecided == 0, std::to_string(undecided) + " rationals left undecided");
    if (o.ok)
        o.detail = std::to_string(pairs) + " digit pairs rejected; " + std::to_string(tested) +
                   " rationals each certified non-orthogonal to e_0 or e_3/4";
    return o;
}

// 5: cycle detection.
Outcome criterion5() {
    Outcome o;
    const auto A = ExpansiveIntMatrix::scalar(4);
    const auto m = filter_from_digits(DigitSet::scalars({0, 2}));
    using P = std::vector<std::vector<Rational>>;
    const auto collect = [](const std::vector<Cycle>& cs) {
        P out;
        for (const auto& c : cs) out.push_back(points_1d(c));
        return out;
    };
    const auto c01 = find_cycles(dual_ifs(A, DigitSet::scalars({0, 1})), m, 12);
    o.require(collect(c01) == P{{Rational(0)}}, "L = {0,1}: expected only {0}");
    const auto c03 = find_cycles(dual_ifs(A, DigitSet::scalars({0, 3})), m, 12);
    o.require(collect(c03) == P{{Rational(0)}, {Rational(1)}}, "L = {0,3}: expected {0} and {1}");
    const auto dual2 = dual_ifs(ExpansiveIntMatrix::scalar(2), DigitSet::scalars({0, 1}));
    const auto cs = find_cycles(dual2, stretched(), 12, CycleConvention::modulo_lattice);
    o.require(collect(cs) == P{{Rational(0)}, {Rational(1, 3), Rational(2, 3)}}, "stretched Haar: expected {1/3, 2/3}");
    if (o.ok) o.detail = "{0} | {0},{1} | {0},{1/3,2/3} with periods <= 12";
    return o;
}

// 6: Lambda_3 from the cycles of (4, {0,2}, {0,3}).
Outcome criterion6() {
    Outcome o;
    const auto A = ExpansiveIntMatrix::scalar(4);
    const auto L = DigitSet::scalars({0, 3});
    const auto cycles = find_cycles(dual_ifs(A, L), filter_from_digits(DigitSet::scalars({0, 2})), 12);
    const auto s = spectrum_from_cycles(A, L, cycles, 3);
    std::set<std::int64_t> want = oracle::digit_sums(4, {0, 3}, 3);
    for (auto v : oracle::digit_sums(4, {0, -3}, 3)) want.insert(v - 1);
    o.require(scalars(s.elements) == want, "set differs from the truncated Lambda_3");
    const auto g = verify_orthogonality(cantor4(), s);
    o.require(g.certified_orthogonal() && g.max_diag_deviation <= 1e-12, "Gram not certified identity");
    if (o.ok)
        o.detail = std::to_string(s.size()) + " elements, " + std::to_string(g.exact_zero_pairs) +
                   " exact off-diagonal zeros";
    return o;
}

// 7: Lawton and Cohen agree.
Outcome criterion7() {
    Outcome o;
    const auto A = ExpansiveIntMatrix::scalar(2);
    const auto R = DigitSet::scalars({0, 1});
    const auto lh = lawton_test(haar(), A, R);
    const auto ch = cohen_test(haar(), A, R, 12);
    o.require(lh.orthonormal && ch.positive, "Haar not orthonormal by both");
    const auto ls = lawton_test(stretched(), A, R);
    const auto cs = cohen_test(stretched(), A, R, 12);
    o.require(!ls.orthonormal && !cs.positive, "stretched Haar not rejected by both");
    o.require(ls.eigen.multiplicity >= 2, "multiplicity " + std::to_string(ls.eigen.multiplicity));
    o.require(ls.non_constant_eigenvector.has_value(), "no non-constant eigenvector");
    bool witness = false;
    for (const auto& c : cs.extreme_cycles)
        witness = witness || points_1d(c) == std::vector<Rational>{Rational(1, 3), Rational(2, 3)};
    o.require(witness, "cycle witness {1/3, 2/3} missing");
    if (o.ok)
        o.detail = "Haar multiplicity " + std::to_string(lh.eigen.multiplicity) + ", stretched Haar multiplicity " +
                   std::to_string(ls.eigen.multiplicity) + " with cycle {1/3, 2/3}";
    return o;
}

// 8: wavelet numerics for the stretched Haar filter.
Outcome criterion8() {
    Outcome o;
    const unsigned J = 12;
    const auto cas = cascade(stretched(), 2, 40, J);
    const double err = l2_distance(cas.phi, SampledFunction::indicator(0, 3, J, 1.0 / 3.0));
    o.require(err < 1e-2, "cascade L2 error " + fmt("%.3g", err));
    const auto g = translate_gram(cas.phi, 1);
    const double lag1 = std::abs(g(0, 1) - Complex(2.0 / 9.0));
    o.require(lag1 <= 1e-3, "lag-1 Gram off by " + fmt("%.3g", lag1));
    const auto dual = dual_ifs(ExpansiveIntMatrix::scalar(2), DigitSet::scalars({0, 1}));
    const auto cycles = find_cycles(dual, stretched(), 12, CycleConvention::modulo_lattice);
    const auto sf = make_super_function(stretched(), cycles, cas.phi);
    o.require(sf.components.size() == 3, std::to_string(sf.components.size()) + " components");
    const auto sg = super_gram(sf, 4);
    const double sdev = (sg - Eigen::MatrixXcd::Identity(sg.rows(), sg.cols())).cwiseAbs().maxCoeff();
    o.require(sdev <= 1e-3, "super Gram deviation " + fmt("%.3g", sdev));
    const auto psi = wavelet_from_mra(stretched(), cas.phi);
    const double pd = parseval_defect(psi, {SampledFunction::indicator(0, 1, J)}, -8, 8, -400, 400);
    o.require(pd < 1e-2, "Parseval defect " + fmt("%.3g", pd));
    const std::string summary = "cascade error " + fmt("%.2g", err) + ", lag-1 deviation " + fmt("%.2g", lag1) +
                                ", super Gram deviation " + fmt("%.2g", sdev) + ", Parseval defect " +
                                fmt("%.3g", pd);
    o.detail = o.ok ? summary : summary + "; " + o.detail;
    return o;
}

// 9: K^2 split on random lacunary expansions.
Outcome criterion9() {
    Outcome o;
    std::mt19937_64 rng(20261016);
    std::uniform_int_distribution<int> bit(0, 1);
    std::normal_distribution<double> gauss;
    double worst = 0;
    bool roundtrip = true;
    for (int trial = 0; trial < 100; ++trial) {
        LacunaryExpansion f;
        while (f.coefficients.size() < 8) {
            std::int64_t l = 0, p = 1;
            for (int d = 0; d < 10; ++d, p *= 4) l += bit(rng) * p;
            f.coefficients[l] = Complex(gauss(rng), gauss(rng));
        }
        const auto [f0, f1] = k2_split(f);
        const double rel = std::abs(f0.norm_sq() + f1.norm_sq() - f.norm_sq()) / f.norm_sq();
        worst = std::max(worst, rel);
        const auto merged = k2_merge(f0, f1);
        const auto [g0, g1] = k2_split(merged);
        roundtrip = roundtrip && merged.coefficients == f.coefficients && g0.coefficients == f0.coefficients &&
                    g1.coefficients == f1.coefficients;
    }
    o.require(worst < 1e-12, "norm identity relative error " + fmt("%.3g", worst));
    o.require(roundtrip, "split/merge round trip is not the identity");
    if (o.ok) o.detail = "100 expansions, worst relative norm error " + fmt("%.2g", worst) + ", exact round trips";
    return o;
}

// 10: equilibrium measure of z^2.
Outcome criterion10() {
    Outcome o;
    const std::size_t n = 100000;
    const auto samples = brolin_sample(ComplexPolynomial::monomial_plus(2), n, kDefaultBurnIn, 1);
    double radial = 0;
    for (auto z : samples) radial = std::max(radial, std::abs(std::abs(z) - 1));
    o.require(radial < 1e-6, "max ||z| - 1| = " + fmt("%.3g", radial));
    const auto m = moments(samples, 8);
    const double limit = 3 / std::sqrt(static_cast<double>(n));
    double worst = 0;
    for (unsigned k = 1; k <= 8; ++k) worst = std::max(worst, std::abs(m[k].value));
    o.require(worst < limit, "max |M_n| = " + fmt("%.3g", worst));
    if (o.ok)
        o.detail = "max ||z| - 1| " + fmt("%.2g", radial) + ", max |M_n| " + fmt("%.3g", worst) + " < " +
                   fmt("%.3g", limit);
    return o;
}

// 11: transfer-operator identities on the QMF corpus.
Outcome criterion11() {
    Outcome o;
    struct Entry {
        std::string name;
        TrigPolynomial m;
        ExpansiveIntMatrix A;
        DigitSet branches;
    };
    const double s3 = std::sqrt(3.0);
    TrigPolynomial haar2d(2);
    for (std::int64_t a = 0; a <= 1; ++a)
        for (std::int64_t b = 0; b <= 1; ++b) haar2d.set({a, b}, 0.25);
    const std::vector<Entry> corpus{
        {"haar", haar(), ExpansiveIntMatrix::scalar(2), DigitSet::scalars({0, 1})},
        {"stretched-haar", stretched(), ExpansiveIntMatrix::scalar(2), DigitSet::scalars({0, 1})},
        {"daub4",
         TrigPolynomial::from_scalar_map({{0, (1 + s3) / 8}, {1, (3 + s3) / 8}, {2, (3 - s3) / 8}, {3, (1 - s3) / 8}}),
         ExpansiveIntMatrix::scalar(2), DigitSet::scalars({0, 1})},
        {"(1+e5)/2", TrigPolynomial::from_scalar_map({{0, 0.5}, {5, 0.5}}), ExpansiveIntMatrix::scalar(2),
         DigitSet::scalars({0, 1})},
        {"haar3", TrigPolynomial::from_scalar_map({{0, 1.0 / 3}, {1, 1.0 / 3}, {2, 1.0 / 3}}),
         ExpansiveIntMatrix::scalar(3), DigitSet::scalars({0, 1, 2})},
        {"haar2d", haar2d, ExpansiveIntMatrix(IntMatrix{{2, 0}, {0, 2}}), DigitSet({{0, 0}, {1, 0}, {0, 1}, {1, 1}})},
    };
    std::vector<TransferMatrix> mats;
    double worst_one = 0;
    for (const auto& e : corpus) {
        const double qmf = qmf_defect(e.m, e.A, e.branches, 32);
        o.require(qmf <= 1e-12, e.name + " fails QMF");
        mats.push_back(build_transfer_matrix(e.m, e.A, e.branches));
        const Eigen::VectorXcd one = mats.back().constant_vector();
        const double d = (mats.back().entries * one - one).cwiseAbs().maxCoeff();
        worst_one = std::max(worst_one, d);
        o.require(d <= 1e-12, e.name + ": ||T1 - 1|| = " + fmt("%.3g", d));
    }
    // fractal setting: the digit filter of a Hadamard triple on its cylinder basis
    for (std::int64_t l : {1, 3}) {
        const auto T = build_transfer_matrix(filter_from_digits(DigitSet::scalars({0, 2})), ExpansiveIntMatrix::scalar(4),
                                             DigitSet::scalars({0, l}), TransferSetting::fractal);
        const Eigen::VectorXcd one = T.constant_vector();
        const double d = (T.entries * one - one).cwiseAbs().maxCoeff();
        worst_one = std::max(worst_one, d);
        o.require(d <= 1e-12, "fractal L = {0," + std::to_string(l) + "}: ||T1 - 1|| = " + fmt("%.3g", d));
    }
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(-2.0, 2.0);
    std::uniform_int_distribution<std::size_t> pick(0, corpus.size() - 1);
    double worst_pt = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto i = pick(rng);
        const auto& T = mats[i];
        Eigen::VectorXcd c(static_cast<Eigen::Index>(T.size()));
        TrigPolynomial f(T.window.front().size());
        for (std::size_t k = 0; k < T.size(); ++k) {
            const Complex ck(unit(rng), unit(rng));
            c(static_cast<Eigen::Index>(k)) = ck;
            f.set(T.window[k], ck);
        }
        std::vector<double> x(f.dim());
        for (auto& v : x) v = unit(rng);
        const auto matrix_side = T.evaluate_image(c, x);
        const auto pointwise = transfer_apply_direct(corpus[i].m, corpus[i].A, corpus[i].branches, f, x);
        double d = std::abs(matrix_side - pointwise);
        if (f.dim() == 1) {
            std::vector<std::int64_t> br;
            for (const auto& b : corpus[i].branches.points()) br.push_back(b[0]);
            const auto ora = oracle::transfer_direct(
                corpus[i].A.scalar_value(), br, [&](double y) { return corpus[i].m.evaluate(y); },
                [&](double y) { return f.evaluate(y); }, x[0]);
            d = std::max(d, std::abs(matrix_side - ora));
        }
        worst_pt = std::max(worst_pt, d);
    }
    o.require(worst_pt <= 1e-10, "pointwise mismatch " + fmt("%.3g", worst_pt));
    const std::string summary = "8 filters, max ||T1 - 1|| " + fmt("%.2g", worst_one) +
                                ", 100 random pairs max deviation " + fmt("%.2g", worst_pt);
    o.detail = o.ok ? summary : summary + "; " + o.detail;
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        double limit_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, 1e-3, criterion1}, {2, 1.0, criterion2},  {3, 30.0, criterion3}, {4, 60.0, criterion4},
        {5, 10.0, criterion5}, {6, 5.0, criterion6},  {7, 1.0, criterion7},  {8, 60.0, criterion8},
        {9, 1.0, criterion9},  {10, 10.0, criterion10}, {11, 5.0, criterion11},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.limit_seconds) {
            o.ok = false;
            o.detail += "; runtime " + fmt("%.3g", secs) + " s exceeds " + fmt("%g", c.limit_seconds) + " s";
        }
        std::printf("criterion %2d: %s  %s  [%.3f s, limit %g s]\n", c.id, o.ok ? "PASS" : "FAIL", o.detail.c_str(),
                    secs, c.limit_seconds);
        std::fflush(stdout);
        if (!o.ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
