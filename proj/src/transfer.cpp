#include "fracwave/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "fracwave/config.hpp"
#include "fracwave/errors.hpp"

namespace fracwave {
namespace {

void require_complete_residues(const ExpansiveIntMatrix& A, const DigitSet& branches) {
    if (static_cast<std::int64_t>(branches.size()) != A.det_abs())
        throw InvalidInput("branches must be a complete residue system: |branches| = " +
                           std::to_string(branches.size()) + " but |det A| = " + std::to_string(A.det_abs()));
    for (std::size_t i = 0; i < branches.size(); ++i)
        for (std::size_t j = i + 1; j < branches.size(); ++j) {
            const auto diff = RationalVector(branches[i]) - RationalVector(branches[j]);
            if (A.transpose_inverse().apply(diff).is_integer())
                throw InvalidInput("branches " + std::to_string(i) + " and " + std::to_string(j) +
                                   " are congruent mod A^T Z^d; not a complete residue system");
        }
}

std::vector<IntVector> wavelet_window(const TrigPolynomial& w, const ExpansiveIntMatrix& A) {
    const auto d = A.dim();
    std::set<IntVector> window;
    if (d == 1) {
        const auto a = std::abs(A.scalar_value());
        const auto D = w.max_frequency();
        const auto W = (D + a - 2) / (a - 1);
        if (static_cast<std::size_t>(2 * W + 1) > kTransferWindowCap)
            throw EnumerationOverflow("transfer window exceeds the cap");
        for (auto k = -W; k <= W; ++k) window.insert({k});
    } else {
        window.insert(IntVector(d, 0));
        for (const auto& [k, a] : w.coefficients()) window.insert(k);
        std::vector<IntVector> todo(window.begin(), window.end());
        while (!todo.empty()) {
            const auto k = todo.back();
            todo.pop_back();
            for (const auto& [j, a] : w.coefficients()) {
                IntVector n(d);
                for (std::size_t i = 0; i < d; ++i) n[i] = k[i] + j[i];
                const auto image = A.inverse().apply(RationalVector(n));
                if (!image.is_integer()) continue;
                if (window.insert(image.as_integers()).second) {
                    todo.push_back(image.as_integers());
                    if (window.size() > kTransferWindowCap) throw EnumerationOverflow("transfer window exceeds the cap");
                }
            }
        }
    }
    return {window.begin(), window.end()};
}

// Closed communicating classes of the directed graph with edges where entries are nonzero.
std::size_t closed_class_count(const Eigen::MatrixXcd& t) {
    const auto n = static_cast<std::size_t>(t.rows());
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != Complex{}) adj[i].push_back(j);
    // reach[i][j]: j reachable from i.
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<std::size_t> stack{s};
        reach[s][s] = 1;
        while (!stack.empty()) {
            const auto u = stack.back();
            stack.pop_back();
            for (auto v : adj[u])
                if (!reach[s][v]) {
                    reach[s][v] = 1;
                    stack.push_back(v);
                }
        }
    }
    std::size_t classes = 0;
    std::vector<char> assigned(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (assigned[i]) continue;
        bool closed = true;
        for (std::size_t j = 0; j < n; ++j) {
            if (!reach[i][j]) continue;
            if (reach[j][i])
                assigned[j] = 1;
            else
                closed = false;
        }
        if (closed) ++classes;
    }
    return classes;
}

TransferMatrix build_fractal(const TrigPolynomial& m, const ExpansiveIntMatrix& A, const DigitSet& L, unsigned depth) {
    const auto n = L.size();
    if (depth == 0) {
        depth = 1;
        while (saturating_pow(n, depth + 1) <= kCylinderStateCap && depth < 6) ++depth;
        if (n == 1) depth = 1;
    }
    const auto states = saturating_pow(n, depth);
    if (states > kCylinderStateCap) throw EnumerationOverflow("cylinder state count exceeds the cap");
    const auto dual = dual_ifs(A, L);

    TransferMatrix t{TransferSetting::fractal, {}, {}, {}, {}, m, A, L, depth};
    const auto count = static_cast<std::size_t>(states);
    t.words.resize(count);
    t.representatives.resize(count);
    for (std::size_t s = 0; s < count; ++s) {
        // Most significant digit first: s = w_1 w_2 ... w_n in base N.
        std::vector<std::size_t> w(depth);
        auto rem = s;
        for (unsigned i = depth; i-- > 0;) {
            w[i] = rem % n;
            rem /= n;
        }
        // Fixed point of sigma_{w_1} o ... o sigma_{w_n}.
        std::vector<std::size_t> reversed(w.rbegin(), w.rend());
        t.representatives[s] = word_orbit(dual, reversed).front();
        t.words[s] = std::move(w);
    }
    t.entries = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(count));
    std::size_t stride = 1;
    for (unsigned i = 1; i < depth; ++i) stride *= n;
    for (std::size_t s = 0; s < count; ++s) {
        for (std::size_t l = 0; l < n; ++l) {
            const auto y = dual.apply(l, t.representatives[s]);
            // Target cylinder (l, w_1, ..., w_{n-1}).
            const auto target = l * stride + s / n;
            if (m.vanishes_exact(y) == true) continue;
            t.entries(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(target)) += std::norm(m.evaluate(y));
        }
    }
    return t;
}

}  // namespace

std::optional<std::size_t> TransferMatrix::index_of(const IntVector& k) const {
    const auto it = std::lower_bound(window.begin(), window.end(), k);
    if (it == window.end() || *it != k) return std::nullopt;
    return static_cast<std::size_t>(it - window.begin());
}

Eigen::VectorXcd TransferMatrix::constant_vector() const {
    if (setting == TransferSetting::fractal) return Eigen::VectorXcd::Ones(entries.rows());
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(entries.rows());
    if (const auto idx = index_of(IntVector(scale.dim(), 0))) v(static_cast<Eigen::Index>(*idx)) = 1.0;
    return v;
}

Complex TransferMatrix::evaluate_image(const Eigen::VectorXcd& coeffs, const std::vector<double>& x) const {
    if (setting != TransferSetting::wavelet) throw InvalidInput("pointwise images need the wavelet setting");
    const Eigen::VectorXcd image = entries * coeffs;
    TrigPolynomial f(scale.dim());
    for (std::size_t i = 0; i < window.size(); ++i) f.set(window[i], image(static_cast<Eigen::Index>(i)));
    return f.evaluate(x);
}

Complex transfer_apply_direct(const TrigPolynomial& m, const ExpansiveIntMatrix& A, const DigitSet& branches,
                              const TrigPolynomial& f, const std::vector<double>& x) {
    const auto d = A.dim();
    const auto minv = A.transpose_inverse().to_doubles();
    Complex acc{};
    std::vector<double> y(d);
    for (const auto& l : branches.points()) {
        for (std::size_t r = 0; r < d; ++r) {
            y[r] = 0;
            for (std::size_t c = 0; c < d; ++c) y[r] += minv[r][c] * (x[c] + static_cast<double>(l[c]));
        }
        acc += std::norm(m.evaluate(y)) * f.evaluate(y);
    }
    return acc;
}

TransferMatrix build_transfer_matrix(const TrigPolynomial& m, const ExpansiveIntMatrix& A, const DigitSet& branches,
                                     TransferSetting setting, unsigned depth) {
    if (m.dim() != A.dim() || branches.dim() != A.dim()) throw InvalidInput("filter, A and branch dimensions differ");
    if (setting == TransferSetting::fractal) return build_fractal(m, A, branches, depth);

    require_complete_residues(A, branches);
    const auto w = m.modulus_squared();
    TransferMatrix t{setting, wavelet_window(w, A), {}, {}, {}, m, A, branches, 0};
    const auto size = static_cast<Eigen::Index>(t.window.size());
    t.entries = Eigen::MatrixXcd::Zero(size, size);
    const double det = static_cast<double>(A.det_abs());
    const auto d = A.dim();
    // T[k'][k] = |det A| w_{A k' - k}; check nothing leaves the window.
    for (Eigen::Index col = 0; col < size; ++col) {
        const auto& k = t.window[static_cast<std::size_t>(col)];
        for (const auto& [j, wj] : w.coefficients()) {
            IntVector n(d);
            for (std::size_t i = 0; i < d; ++i) n[i] = k[i] + j[i];
            const auto image = A.inverse().apply(RationalVector(n));
            if (!image.is_integer()) continue;
            const auto row = t.index_of(image.as_integers());
            if (!row) throw ComputationError("transfer window is not invariant: frequency leaks to " + image.str());
            t.entries(static_cast<Eigen::Index>(*row), col) += det * wj;
        }
    }
    return t;
}

EigenOneResult eigenvalue_one_multiplicity(const TransferMatrix& T, double tol) {
    if (!(tol > 0 && tol < 1e-4)) throw InvalidInput("eigenvalue tolerance must lie in (0, 1e-4)");
    const auto n = T.entries.rows();
    EigenOneResult out;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(T.entries, false);
    if (eig.info() != Eigen::Success) throw ComputationError("eigenvalue solver failed on the transfer matrix");
    out.eigenvalues = eig.eigenvalues();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) {
        return std::abs(out.eigenvalues(a)) > std::abs(out.eigenvalues(b));
    });
    Eigen::VectorXcd sorted(n);
    for (Eigen::Index i = 0; i < n; ++i) sorted(i) = out.eigenvalues(order[static_cast<std::size_t>(i)]);
    out.eigenvalues = sorted;

    const Eigen::MatrixXcd shifted = T.entries - Eigen::MatrixXcd::Identity(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted, Eigen::ComputeFullV);
    out.singular_values = svd.singularValues();
    std::vector<Eigen::Index> null_cols;
    for (Eigen::Index i = 0; i < out.singular_values.size(); ++i)
        if (out.singular_values(i) <= tol) null_cols.push_back(i);
    out.eigenvectors.resize(n, static_cast<Eigen::Index>(null_cols.size()));
    for (std::size_t c = 0; c < null_cols.size(); ++c)
        out.eigenvectors.col(static_cast<Eigen::Index>(c)) = svd.matrixV().col(null_cols[c]);
    out.multiplicity = null_cols.size();
    if (T.setting == TransferSetting::fractal) {
        out.closed_classes = closed_class_count(T.entries);
        out.multiplicity = *out.closed_classes;
    }
    return out;
}

LawtonVerdict lawton_test(const TrigPolynomial& m, const ExpansiveIntMatrix& A, const DigitSet& branches,
                          TransferSetting setting, double tol, unsigned depth) {
    if (!m.is_low_pass()) throw InvalidInput("filter is not low-pass: m(0) != 1");
    auto t = build_transfer_matrix(m, A, branches, setting, depth);
    double defect = 0;
    if (setting == TransferSetting::wavelet) {
        const auto grid = static_cast<unsigned>(std::max<std::int64_t>(16, 2 * m.modulus_squared().max_frequency() + 1));
        defect = qmf_defect(m, A, branches, grid);
    } else {
        const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(t.entries.rows());
        defect = (t.entries * ones - ones).cwiseAbs().maxCoeff();
    }
    if (defect > 1e-12)
        throw InvalidInput("QMF condition fails (defect " + std::to_string(defect) + " > 1e-12); Lawton test needs it");

    LawtonVerdict v{false, eigenvalue_one_multiplicity(t, tol), defect, std::nullopt, std::move(t)};
    v.orthonormal = v.eigen.multiplicity == 1;
    if (v.eigen.multiplicity > 1 && v.eigen.eigenvectors.cols() > 0) {
        const Eigen::VectorXcd c = v.matrix.constant_vector().normalized();
        double best = -1;
        for (Eigen::Index i = 0; i < v.eigen.eigenvectors.cols(); ++i) {
            const Eigen::VectorXcd col = v.eigen.eigenvectors.col(i);
            const double off = (col - c * c.dot(col)).norm();
            if (off > best) {
                best = off;
                v.non_constant_eigenvector = col;
            }
        }
    }
    return v;
}

CohenVerdict cohen_test(const TrigPolynomial& m, const ExpansiveIntMatrix& A, const DigitSet& branches,
                        unsigned max_period, TransferSetting setting) {
    if (!m.is_low_pass()) throw InvalidInput("filter is not low-pass: m(0) != 1");
    const auto convention =
        setting == TransferSetting::wavelet ? CycleConvention::modulo_lattice : CycleConvention::exact_points;
    CohenVerdict v;
    v.max_period = max_period;
    v.extreme_cycles = find_cycles(dual_ifs(A, branches), m, max_period, convention);
    v.positive = std::all_of(v.extreme_cycles.begin(), v.extreme_cycles.end(),
                             [](const Cycle& c) { return c.is_trivial(); });
    return v;
}

}  // namespace fracwave
