#include "fracwave/ifs.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "fracwave/config.hpp"
#include "fracwave/errors.hpp"

namespace fracwave {
namespace {

Eigen::MatrixXd to_eigen(const IntMatrix& m) {
    const auto n = static_cast<Eigen::Index>(m.size());
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) out(r, c) = static_cast<double>(m[r][c]);
    return out;
}

std::string vec_str(const IntVector& v) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << "]";
    return os.str();
}

}  // namespace

ExpansiveIntMatrix::ExpansiveIntMatrix(IntMatrix entries) : entries_(std::move(entries)) {
    const auto d = entries_.size();
    if (d == 0) throw InvalidInput("matrix A must be at least 1x1");
    for (const auto& row : entries_)
        if (row.size() != d) throw InvalidInput("matrix A must be square");

    const auto det = determinant(entries_);
    if (det == 0) throw InvalidInput("matrix A is singular, not expansive");
    det_abs_ = det < 0 ? -det : det;

    const Eigen::MatrixXd a = to_eigen(entries_);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
    if (solver.info() != Eigen::Success) throw ComputationError("eigenvalue computation for A failed");
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const auto ev = solver.eigenvalues()(i);
        eigenvalues_.push_back(ev);
        if (std::abs(ev) <= 1.0 + kEigenTolerance) {
            std::ostringstream os;
            os << "matrix A is not expansive: eigenvalue " << ev.real() << (ev.imag() < 0 ? "" : "+") << ev.imag()
               << "i has modulus " << std::abs(ev) << " <= 1";
            throw InvalidInput(os.str());
        }
    }

    const RationalMatrix exact(entries_);
    inverse_ = exact.inverse();
    transpose_inverse_ = inverse_.transpose();
    if (!(inverse_ * exact == RationalMatrix::identity(d)))
        throw ComputationError("exact inverse of A failed verification");

    const Eigen::MatrixXd inv = a.inverse();
    Eigen::MatrixXd power = inv;
    for (unsigned j = 1; j <= 64; ++j) {
        const double norm = Eigen::JacobiSVD<Eigen::MatrixXd>(power).singularValues()(0);
        if (norm < 1.0) {
            contraction_power_ = j;
            contraction_ratio_ = norm;
            return;
        }
        power = power * inv;
    }
    throw InvalidInput("matrix A: no power j <= 64 with ||A^-j|| < 1; contraction not certified");
}

ExpansiveIntMatrix ExpansiveIntMatrix::scalar(std::int64_t a) { return ExpansiveIntMatrix(IntMatrix{{a}}); }

std::string ExpansiveIntMatrix::str() const {
    if (dim() == 1) return std::to_string(entries_[0][0]);
    std::string out = "[";
    for (std::size_t r = 0; r < dim(); ++r) out += (r ? "," : "") + vec_str(entries_[r]);
    return out + "]";
}

DigitSet::DigitSet(std::vector<IntVector> points) : points_(std::move(points)) {
    if (points_.empty()) throw InvalidInput("digit set must be nonempty");
    dim_ = points_.front().size();
    if (dim_ == 0) throw InvalidInput("digits must have dimension >= 1");
    std::set<IntVector> seen;
    for (const auto& p : points_) {
        if (p.size() != dim_) throw InvalidInput("digits have inconsistent dimensions");
        if (!seen.insert(p).second) throw InvalidInput("digit set has a repeated point " + vec_str(p));
    }
}

DigitSet DigitSet::scalars(const IntVector& values) {
    std::vector<IntVector> pts;
    pts.reserve(values.size());
    for (auto v : values) pts.push_back({v});
    return DigitSet(std::move(pts));
}

bool DigitSet::contains_zero() const { return contains(IntVector(dim_, 0)); }

bool DigitSet::contains(const IntVector& p) const {
    return std::find(points_.begin(), points_.end(), p) != points_.end();
}

std::string DigitSet::str() const {
    std::string out = "{";
    for (std::size_t i = 0; i < size(); ++i)
        out += (i ? "," : "") + (dim_ == 1 ? std::to_string(points_[i][0]) : vec_str(points_[i]));
    return out + "}";
}

AffineIFS::AffineIFS(ExpansiveIntMatrix matrix, DigitSet digits, Orientation orientation,
                     std::optional<std::vector<double>> probabilities)
    : matrix_(std::move(matrix)),
      digits_(std::move(digits)),
      orientation_(orientation),
      probabilities_(std::move(probabilities)) {
    if (digits_.dim() != matrix_.dim()) throw InvalidInput("digit dimension does not match matrix dimension");
    if (probabilities_) {
        if (probabilities_->size() != digits_.size())
            throw InvalidInput("probability vector length must equal the number of digits");
        double sum = 0;
        for (double p : *probabilities_) {
            if (!(p > 0)) throw InvalidInput("probabilities must be positive");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw InvalidInput("probabilities must sum to 1");
    }
    contraction_double_ = contraction().to_doubles();
}

IntMatrix AffineIFS::expanding_matrix() const {
    return orientation_ == Orientation::forward ? matrix_.entries() : matrix_.transpose_entries();
}

const RationalMatrix& AffineIFS::contraction() const {
    return orientation_ == Orientation::forward ? matrix_.inverse() : matrix_.transpose_inverse();
}

RationalVector AffineIFS::apply(std::size_t digit, const RationalVector& x) const {
    return contraction().apply(x + RationalVector(digits_[digit]));
}

std::vector<double> AffineIFS::apply(std::size_t digit, const std::vector<double>& x) const {
    const auto d = dim();
    std::vector<double> shifted(d), out(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) shifted[i] = x[i] + static_cast<double>(digits_[digit][i]);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) out[r] += contraction_double_[r][c] * shifted[c];
    return out;
}

void AffineIFS::require_uniform_weights() const {
    if (!probabilities_) return;
    const double u = 1.0 / static_cast<double>(digits_.size());
    for (double p : *probabilities_)
        if (std::abs(p - u) > 1e-12)
            throw InvalidInput("non-uniform weights p_i != 1/N are not supported by this analysis");
}

std::vector<Box> attractor_boxes(const AffineIFS& ifs, unsigned depth, const Box& seed_box) {
    const auto d = ifs.dim();
    if (seed_box.size() != d) throw InvalidInput("seed box dimension does not match the IFS");
    for (const auto& iv : seed_box)
        if (!(iv.lo <= iv.hi)) throw InvalidInput("seed box is empty");
    const auto n = ifs.digits().size();
    const auto count = saturating_pow(n, depth);
    check_enumeration(count, "attractor boxes");
    if (depth == 0) return {seed_box};

    // Word maps x -> M^depth x + t_w, with t_{b.w'} = M (t_{w'} + b).
    std::vector<std::vector<double>> offsets{std::vector<double>(d, 0.0)};
    for (unsigned level = 0; level < depth; ++level) {
        std::vector<std::vector<double>> next;
        next.reserve(offsets.size() * n);
        for (std::size_t b = 0; b < n; ++b)
            for (const auto& t : offsets) next.push_back(ifs.apply(b, t));
        offsets = std::move(next);
    }

    // Bounding box of M^depth applied to the seed corners.
    Box linear_image(d, Interval{INFINITY, -INFINITY});
    const std::vector<double> zero(d, 0.0);
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
        std::vector<double> corner(d);
        for (std::size_t i = 0; i < d; ++i) corner[i] = (mask >> i & 1U) ? seed_box[i].hi : seed_box[i].lo;
        // Apply M^depth via repeated maps with the zero digit offset removed.
        std::vector<double> y = corner;
        for (unsigned level = 0; level < depth; ++level) {
            auto moved = ifs.apply(0, y);
            const auto shift = ifs.apply(0, zero);
            for (std::size_t i = 0; i < d; ++i) y[i] = moved[i] - shift[i];
        }
        for (std::size_t i = 0; i < d; ++i) {
            linear_image[i].lo = std::min(linear_image[i].lo, y[i]);
            linear_image[i].hi = std::max(linear_image[i].hi, y[i]);
        }
    }

    std::vector<Box> boxes;
    boxes.reserve(offsets.size());
    for (const auto& t : offsets) {
        Box box(d);
        for (std::size_t i = 0; i < d; ++i) box[i] = {linear_image[i].lo + t[i], linear_image[i].hi + t[i]};
        boxes.push_back(std::move(box));
    }
    return boxes;
}

double hausdorff_distance_1d(const std::vector<Box>& a, const std::vector<Box>& b) {
    const auto merged = [](const std::vector<Box>& boxes) {
        std::vector<Interval> ivs;
        for (const auto& box : boxes) {
            if (box.size() != 1) throw InvalidInput("hausdorff_distance_1d needs one-dimensional boxes");
            ivs.push_back(box[0]);
        }
        std::sort(ivs.begin(), ivs.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
        std::vector<Interval> out;
        for (const auto& iv : ivs) {
            if (!out.empty() && iv.lo <= out.back().hi)
                out.back().hi = std::max(out.back().hi, iv.hi);
            else
                out.push_back(iv);
        }
        return out;
    };
    const auto dist_to = [](double x, const std::vector<Interval>& ivs) {
        double best = INFINITY;
        for (const auto& iv : ivs) best = std::min(best, x < iv.lo ? iv.lo - x : (x > iv.hi ? x - iv.hi : 0.0));
        return best;
    };
    // sup over X of dist(x, Y): on each interval of X the maximum sits at an endpoint or at a gap midpoint of Y.
    const auto directed = [&](const std::vector<Interval>& x, const std::vector<Interval>& y) {
        double h = 0;
        for (const auto& iv : x) {
            h = std::max({h, dist_to(iv.lo, y), dist_to(iv.hi, y)});
            for (std::size_t k = 0; k + 1 < y.size(); ++k) {
                const double mid = 0.5 * (y[k].hi + y[k + 1].lo);
                if (mid > iv.lo && mid < iv.hi) h = std::max(h, dist_to(mid, y));
            }
        }
        return h;
    };
    const auto ma = merged(a), mb = merged(b);
    if (ma.empty() || mb.empty()) throw InvalidInput("hausdorff_distance_1d needs non-empty unions");
    return std::max(directed(ma, mb), directed(mb, ma));
}

RationalVector QuadratureRule::exact_point(const AffineIFS& ifs, std::size_t i) const {
    RationalVector x(scaled.at(i));
    for (unsigned k = 0; k < depth; ++k) x = ifs.contraction().apply(x);
    return x;
}

QuadratureRule measure_quadrature_points(const AffineIFS& ifs, unsigned depth) {
    if (depth == 0) throw InvalidInput("quadrature depth must be >= 1");
    ifs.require_uniform_weights();
    const auto n = ifs.digits().size();
    const auto count = saturating_pow(n, depth);
    check_enumeration(count, "quadrature points");
    const auto d = ifs.dim();
    const auto s = ifs.expanding_matrix();

    QuadratureRule rule;
    rule.depth = depth;
    rule.weight = Rational(1);
    for (unsigned k = 0; k < depth; ++k) rule.weight *= Rational(1, static_cast<std::int64_t>(n));

    // Word (b_1..b_depth): x = M(b_1 + M(b_2 + ...)), scaled = sum S^{depth-k} b_k.
    rule.points = {std::vector<double>(d, 0.0)};
    rule.scaled = {IntVector(d, 0)};
    IntMatrix power = identity_matrix(d);
    for (unsigned level = 0; level < depth; ++level) {
        std::vector<std::vector<double>> next_points;
        std::vector<IntVector> next_scaled;
        next_points.reserve(rule.points.size() * n);
        next_scaled.reserve(rule.points.size() * n);
        for (std::size_t b = 0; b < n; ++b) {
            const auto lifted = mat_vec(power, ifs.digits()[b]);
            for (std::size_t i = 0; i < rule.points.size(); ++i) {
                next_points.push_back(ifs.apply(b, rule.points[i]));
                IntVector sc = rule.scaled[i];
                for (std::size_t c = 0; c < d; ++c) sc[c] = checked_add(sc[c], lifted[c]);
                next_scaled.push_back(std::move(sc));
            }
        }
        rule.points = std::move(next_points);
        rule.scaled = std::move(next_scaled);
        power = mat_mul(power, s);
    }
    return rule;
}

AffineIFS dual_ifs(const ExpansiveIntMatrix& matrix, const DigitSet& L) {
    return AffineIFS(matrix, L, Orientation::dual);
}

}  // namespace fracwave
