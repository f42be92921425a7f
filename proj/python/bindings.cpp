#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fracwave/complex_dyn.hpp"
#include "fracwave/cycles.hpp"
#include "fracwave/errors.hpp"
#include "fracwave/fourier_product.hpp"
#include "fracwave/spectra.hpp"
#include "fracwave/transfer.hpp"
#include "fracwave/wavelet.hpp"

namespace py = pybind11;
using namespace fracwave;

namespace {

// int -> 1x1, nested lists -> rows
ExpansiveIntMatrix to_matrix(const py::object& A) {
    if (py::isinstance<py::int_>(A)) return ExpansiveIntMatrix::scalar(A.cast<std::int64_t>());
    return ExpansiveIntMatrix(A.cast<IntMatrix>());
}

DigitSet to_digits(const py::object& B, std::size_t dim) {
    if (dim == 1) return DigitSet::scalars(B.cast<IntVector>());
    return DigitSet(B.cast<IntMatrix>());
}

py::object fraction(const Rational& r) {
    static const py::object Fraction = py::module_::import("fractions").attr("Fraction");
    return Fraction(r.num(), r.den());
}

py::object point(const RationalVector& v) {
    if (v.dim() == 1) return fraction(v[0]);
    py::list out;
    for (std::size_t i = 0; i < v.dim(); ++i) out.append(fraction(v[i]));
    return py::tuple(out);
}

// float, int, Fraction or a sequence of those
RationalVector to_rational_point(const py::object& x) {
    const auto one = [](const py::handle& h) {
        if (py::isinstance<py::int_>(h)) return Rational(h.cast<std::int64_t>());
        return Rational(h.attr("numerator").cast<std::int64_t>(), h.attr("denominator").cast<std::int64_t>());
    };
    if (py::isinstance<py::sequence>(x)) {
        std::vector<Rational> c;
        for (const auto& h : x) c.push_back(one(h));
        return RationalVector::from_components(c);
    }
    return RationalVector::from_components(std::vector<Rational>{one(x)});
}

bool is_exact(const py::object& x) {
    const auto exact = [](const py::handle& h) { return py::hasattr(h, "numerator") && !py::isinstance<py::float_>(h); };
    if (py::isinstance<py::sequence>(x)) {
        for (const auto& h : x)
            if (!exact(h)) return false;
        return true;
    }
    return exact(x);
}

TrigPolynomial to_filter(const std::map<std::int64_t, Complex>& m) { return TrigPolynomial::from_scalar_map(m); }

py::dict product_dict(const ProductEvaluation& v) {
    py::dict d;
    d["value"] = v.value;
    d["tail_bound"] = v.tail_bound;
    d["truncation_depth"] = v.truncation_depth;
    d["exact_zero"] = v.exact_zero;
    d["certified_nonzero"] = v.certified_nonzero;
    return d;
}

}  // namespace

PYBIND11_MODULE(_fracwave, m) {
    m.doc() = "Fourier bases on self-affine measures and wavelet filters";

    m.def(
        "hadamard_check",
        [](const py::object& A, const py::object& B, const py::object& L) {
            const auto a = to_matrix(A);
            const auto c = hadamard_check(a, to_digits(B, a.dim()), to_digits(L, a.dim()));
            py::dict d;
            d["valid"] = c.valid;
            d["defect"] = c.unitarity_defect;
            d["matrix"] = c.matrix;
            return d;
        },
        py::arg("A"), py::arg("B"), py::arg("L"));

    m.def(
        "lambda0",
        [](const py::object& A, const py::object& L, unsigned level) {
            const auto a = to_matrix(A);
            return lambda0(a, to_digits(L, a.dim()), level).sorted();
        },
        py::arg("A"), py::arg("L"), py::arg("level"));

    m.def(
        "find_cycles",
        [](const py::object& A, const py::object& L, const py::object& B, const py::object& m0, unsigned max_period,
           bool on_torus) {
            const auto a = to_matrix(A);
            const auto dual = dual_ifs(a, to_digits(L, a.dim()));
            TrigPolynomial filter = m0.is_none() ? filter_from_digits(to_digits(B, a.dim()))
                                                 : to_filter(m0.cast<std::map<std::int64_t, Complex>>());
            const auto cs = find_cycles(dual, filter, max_period,
                                        on_torus ? CycleConvention::modulo_lattice : CycleConvention::exact_points);
            py::list out;
            for (const auto& c : cs) {
                py::list pts;
                for (const auto& x : c.points) pts.append(point(x));
                out.append(pts);
            }
            return out;
        },
        py::arg("A"), py::arg("L"), py::arg("B") = py::none(), py::arg("m0") = py::none(),
        py::arg("max_period") = kDefaultMaxPeriod1d, py::arg("on_torus") = false);

    m.def(
        "mu_hat",
        [](const py::object& A, const py::object& B, const py::object& x, double err) {
            const auto a = to_matrix(A);
            const AffineIFS ifs(a, to_digits(B, a.dim()));
            if (is_exact(x)) return product_dict(mu_hat(ifs, to_rational_point(x), err));
            std::vector<double> xs;
            if (py::isinstance<py::sequence>(x))
                xs = x.cast<std::vector<double>>();
            else
                xs = {x.cast<double>()};
            return product_dict(mu_hat(ifs, xs, err));
        },
        py::arg("A"), py::arg("B"), py::arg("x"), py::arg("err") = kDefaultProductError);

    m.def(
        "lawton",
        [](const std::map<std::int64_t, Complex>& m0, std::int64_t a) {
            IntVector residues;
            for (std::int64_t r = 0; r < a; ++r) residues.push_back(r);
            const auto v = lawton_test(to_filter(m0), ExpansiveIntMatrix::scalar(a), DigitSet::scalars(residues));
            py::dict d;
            d["orthonormal"] = v.orthonormal;
            d["multiplicity"] = v.eigen.multiplicity;
            d["qmf_defect"] = v.qmf_defect;
            d["size"] = v.matrix.size();
            return d;
        },
        py::arg("m0"), py::arg("A") = 2);

    m.def(
        "cascade",
        [](const std::map<std::int64_t, Complex>& m0, unsigned iterations, unsigned J) {
            const auto r = cascade(to_filter(m0), 2, iterations, J);
            std::vector<double> xs;
            const double h = r.phi.step();
            for (std::size_t i = 0; i < r.phi.samples.size(); ++i) xs.push_back(r.phi.origin + h * double(i));
            return py::make_tuple(xs, r.phi.samples, r.residual);
        },
        py::arg("m0"), py::arg("iterations") = 40, py::arg("J") = kDefaultResolution);

    m.def(
        "brolin_moments",
        [](const std::vector<Complex>& coefficients, std::size_t n, unsigned n_max, unsigned burn_in,
           std::uint64_t seed) {
            const auto s = brolin_sample(ComplexPolynomial(coefficients), n, burn_in, seed);
            py::list out;
            for (const auto& e : moments(s, n_max)) out.append(py::make_tuple(e.value, e.std_error));
            return out;
        },
        py::arg("coefficients"), py::arg("n"), py::arg("n_max") = 8, py::arg("burn_in") = kDefaultBurnIn,
        py::arg("seed") = 0);

    m.def(
        "k2_split",
        [](const std::map<std::int64_t, Complex>& f) {
            LacunaryExpansion e;
            e.coefficients = f;
            const auto [f0, f1] = k2_split(e);
            return py::make_tuple(f0.coefficients, f1.coefficients);
        },
        py::arg("f"));
}
