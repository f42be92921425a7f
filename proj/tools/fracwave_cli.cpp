#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>

#include "fracwave/complex_dyn.hpp"
#include "fracwave/config.hpp"
#include "fracwave/cycles.hpp"
#include "fracwave/errors.hpp"
#include "fracwave/filters.hpp"
#include "fracwave/fourier_product.hpp"
#include "fracwave/ifs.hpp"
#include "fracwave/io.hpp"
#include "fracwave/spectra.hpp"
#include "fracwave/transfer.hpp"
#include "fracwave/wavelet.hpp"

#ifndef FRACWAVE_VERSION
#define FRACWAVE_VERSION "0.0.0"
#endif

using namespace fracwave;

namespace {

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw ComputationError("SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 15]);
    }
    return out;
}

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string point_str(const RationalVector& x) {
    std::string s;
    for (std::size_t i = 0; i < x.dim(); ++i) {
        if (i) s += ";";
        s += x[i].str();
    }
    return s;
}

json matrix_json(const ExpansiveIntMatrix& A) {
    if (A.is_scalar()) return A.scalar_value();
    return A.entries();
}

json digits_json(const DigitSet& s) {
    json out = json::array();
    for (const auto& p : s.points()) out.push_back(int_vector_json(p));
    return out;
}

json complex_matrix_json(const Eigen::MatrixXcd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
        rows.push_back(row);
    }
    return rows;
}

json complex_vector_json(const Eigen::VectorXcd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v(i)));
    return out;
}

struct Run {
    std::string out_path;
    unsigned threads = 0;
    std::uint64_t seed = 0;
    std::string started;
    CLI::App* sub = nullptr;
    CLI::App* app = nullptr;
    json digests = json::object();

    void digest_file(const std::string& path) {
        if (path.empty() || digests.contains(path)) return;
        digests[path] = sha256_hex(read_file(path));
    }

    static json option_value(const CLI::Option* opt) {
        if (opt->count() > 0) {
            if (opt->get_expected_min() == 0) return true;
            const auto& res = opt->results();
            if (res.size() == 1) return res[0];
            return res;
        }
        const auto def = opt->get_default_str();
        if (def.empty()) return nullptr;
        return def;
    }

    json manifest() const {
        json config = json::object();
        for (const CLI::App* a : {static_cast<const CLI::App*>(app), static_cast<const CLI::App*>(sub)})
            for (const auto* opt : a->get_options()) {
                if (opt->get_lnames().empty()) continue;
                const auto& name = opt->get_lnames().front();
                if (name == "help" || name == "version") continue;
                config[name] = option_value(opt);
            }
        const char* cap = std::getenv("FS_ENUM_CAP");
        config["enumeration_cap"] = enumeration_cap();
        if (cap) config["FS_ENUM_CAP"] = cap;
        return json{{"subcommand", sub->get_name()}, {"config", config}, {"version", FRACWAVE_VERSION},
                    {"seed", seed},                  {"wall_clock", started}, {"input_digests", digests}};
    }

    void write(const std::string& text) const {
        if (out_path.empty()) {
            std::cout << text;
            std::cout.flush();
            return;
        }
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw InvalidInput("cannot write " + out_path);
        f << text;
    }

    void emit_json(json result) const {
        result["manifest"] = manifest();
        write(result.dump(2) + "\n");
    }

    // rows already CSV-formatted, one per line.
    void emit_csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows,
                  const std::vector<std::string>& comments = {}) const {
        std::string s = "# manifest: " + manifest().dump() + "\n";
        for (const auto& c : comments) s += "# " + c + "\n";
        for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
        s += "\n";
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
            s += "\n";
        }
        write(s);
    }
};

// IFS data assembled from --ifs and the --A/--B/--L flags (flags win).
struct IfsOptions {
    std::string ifs_path, A, B, L, p;

    void add(CLI::App* sub, bool with_B = true, bool with_L = true) {
        sub->add_option("--ifs", ifs_path, "IFS spec JSON {\"A\", \"B\", \"L\", \"p\"}")->check(CLI::ExistingFile);
        sub->add_option("--A", A, "expansive integer matrix: 4 or rows '2,0;0,2'");
        if (with_B) sub->add_option("--B", B, "digit set: '0,2' or points '0,0;1,0' for d > 1");
        if (with_L) sub->add_option("--L", L, "dual digit set, same syntax as --B");
    }

    struct Resolved {
        std::optional<ExpansiveIntMatrix> A;
        std::optional<DigitSet> B, L;
        std::optional<std::vector<double>> p;
    };

    Resolved resolve(Run& run) const {
        Resolved r;
        if (!ifs_path.empty()) {
            run.digest_file(ifs_path);
            auto spec = load_ifs_spec(ifs_path);
            r.A = spec.A;
            r.B = spec.B;
            r.L = spec.L;
            r.p = spec.probabilities;
        }
        if (!A.empty()) r.A = ExpansiveIntMatrix(parse_int_matrix(A));
        if (!r.A) throw InvalidInput("A required");
        if (!B.empty()) r.B = parse_digits(B, r.A->dim());
        if (!L.empty()) r.L = parse_digits(L, r.A->dim());
        if (r.B && r.B->dim() != r.A->dim()) throw InvalidInput("B dimension does not match A");
        if (r.L && r.L->dim() != r.A->dim()) throw InvalidInput("L dimension does not match A");
        return r;
    }
};

const ExpansiveIntMatrix& need(const std::optional<ExpansiveIntMatrix>& A) {
    if (!A) throw InvalidInput("A required");
    return *A;
}

const DigitSet& need(const std::optional<DigitSet>& s, const char* name) {
    if (!s) throw InvalidInput(std::string(name) + " required");
    return *s;
}

AffineIFS forward_ifs(const IfsOptions::Resolved& r) {
    return AffineIFS(need(r.A), need(r.B, "B"), Orientation::forward, r.p);
}

TransferSetting parse_setting(const std::string& s) {
    if (s == "wavelet") return TransferSetting::wavelet;
    if (s == "fractal") return TransferSetting::fractal;
    throw InvalidInput("setting must be 'wavelet' or 'fractal', got '" + s + "'");
}

DigitSet default_branches(const ExpansiveIntMatrix& A) {
    if (!A.is_scalar()) throw InvalidInput("L required (branch digits must be given when d > 1)");
    IntVector v;
    for (std::int64_t k = 0; k < A.det_abs(); ++k) v.push_back(k);
    return DigitSet::scalars(v);
}

unsigned default_period(const ExpansiveIntMatrix& A, unsigned requested) {
    if (requested > 0) return requested;
    return A.is_scalar() ? kDefaultMaxPeriod1d : kDefaultMaxPeriodNd;
}

// Grid of n^d points k/n in [0,1)^d, lexicographic.
std::vector<RationalVector> unit_grid(std::size_t dim, std::int64_t n) {
    if (n <= 0) throw InvalidInput("grid must be positive");
    check_enumeration(saturating_pow(static_cast<std::uint64_t>(n), static_cast<unsigned>(dim)), "grid points");
    std::vector<RationalVector> out;
    IntVector idx(dim, 0);
    while (true) {
        out.emplace_back(idx, n);
        std::size_t c = dim;
        while (c > 0) {
            --c;
            if (++idx[c] < n) break;
            idx[c] = 0;
            if (c == 0) return out;
        }
        if (dim == 0) return out;
    }
}

// Points separated by ';'; in dimension 1 a plain comma list also works.
std::vector<RationalVector> parse_points(const std::string& text, std::size_t dim) {
    std::vector<RationalVector> out;
    if (dim == 1 && text.find(';') == std::string::npos) {
        for (const auto& q : parse_rational_list(text)) out.push_back(RationalVector::from_components(std::vector<Rational>{q}));
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        out.push_back(parse_rational_point(item));
        if (out.back().dim() != dim)
            throw InvalidInput("point '" + item + "' has dimension " + std::to_string(out.back().dim()) +
                               ", expected " + std::to_string(dim));
    }
    return out;
}

std::vector<unsigned> level_list(const std::string& text) {
    std::vector<unsigned> out;
    if (text.find("..") != std::string::npos) {
        const auto [lo, hi] = parse_range(text);
        if (lo < 0) throw InvalidInput("levels must be nonnegative");
        for (auto l = lo; l <= hi; ++l) out.push_back(static_cast<unsigned>(l));
    } else {
        for (auto l : parse_int_list(text)) {
            if (l < 0) throw InvalidInput("levels must be nonnegative");
            out.push_back(static_cast<unsigned>(l));
        }
    }
    if (out.empty()) throw InvalidInput("no levels given");
    return out;
}

// Spectrum from the extreme cycles of m_B on the dual IFS, or lambda0 when B is absent.
SpectrumSet build_spectrum(const IfsOptions::Resolved& r, unsigned level, unsigned max_period, bool candidate_only) {
    const auto& A = need(r.A);
    const auto& L = need(r.L, "L");
    if (candidate_only || !r.B) return lambda0(A, L, level);
    const auto cycles = find_cycles(dual_ifs(A, L), filter_from_digits(*r.B), default_period(A, max_period));
    return spectrum_from_cycles(A, L, cycles, level);
}

TrigPolynomial filter_option(Run& run, const std::string& m0, const std::optional<DigitSet>& B) {
    if (m0 == "B") {
        if (!B) throw InvalidInput("--filter B needs the digit set B");
        return filter_from_digits(*B);
    }
    if (!m0.empty()) {
        const auto t = m0;
        if (t != "haar" && t != "stretched-haar" && t != "haar3" && t != "daub4" && t.front() != '{')
            run.digest_file(t);
        return resolve_filter(t);
    }
    if (B) return filter_from_digits(*B);
    throw InvalidInput("a filter is required: --m0 or --B");
}

SampledFunction cascade_phi(const TrigPolynomial& m0, unsigned iterations, unsigned J, CascadeResult* keep = nullptr) {
    auto res = cascade(m0, 2, iterations, J);
    if (keep) *keep = res;
    return res.phi;
}

using Handler = std::function<void(Run&)>;

struct Registry {
    std::vector<std::pair<CLI::App*, Handler>> handlers;
    void add(CLI::App* sub, Handler h) { handlers.emplace_back(sub, std::move(h)); }
};

void register_all(CLI::App& app, Registry& reg) {
    {
        auto* sub = app.add_subcommand("check-hadamard", "certify a Hadamard triple (A, B, L)");
        auto ifs = std::make_shared<IfsOptions>();
        ifs->add(sub);
        reg.add(sub, [ifs](Run& run) {
            auto r = ifs->resolve(run);
            const auto cert = hadamard_check(need(r.A), need(r.B, "B"), need(r.L, "L"));
            json matrix = json::array();
            for (const auto& row : cert.matrix) {
                json jr = json::array();
                for (auto c : row) jr.push_back(complex_json(c));
                matrix.push_back(jr);
            }
            run.emit_json({{"valid", cert.valid},
                           {"defect", cert.unitarity_defect},
                           {"tolerance", HadamardCertificate::kTolerance},
                           {"A", matrix_json(cert.A)},
                           {"B", digits_json(cert.B)},
                           {"L", digits_json(cert.L)},
                           {"matrix", matrix}});
        });
    }
    {
        auto* sub = app.add_subcommand("find-cycles", "exact periodic orbits of the dual IFS with |m| = 1");
        auto ifs = std::make_shared<IfsOptions>();
        ifs->add(sub);
        auto m0 = std::make_shared<std::string>();
        auto period = std::make_shared<unsigned>(0);
        auto setting = std::make_shared<std::string>();
        auto all = std::make_shared<bool>(false);
        sub->add_option("--m0,--filter", *m0, "filter: B (digit filter m_B) | haar | stretched-haar | haar3 | daub4 | JSON file | inline JSON");
        sub->add_option("--max-period", *period, "longest period searched (0 = 12 for d = 1, 6 otherwise)");
        sub->add_option("--setting", *setting, "fractal (cycles on R^d) or wavelet (cycles mod Z^d)");
        sub->add_flag("--all", *all, "also list non-extreme cycles");
        reg.add(sub, [=](Run& run) {
            auto r = ifs->resolve(run);
            const auto& A = need(r.A);
            const auto m = filter_option(run, *m0, r.B);
            const std::string s = setting->empty() ? (m0->empty() || *m0 == "B" ? "fractal" : "wavelet") : *setting;
            const auto st = parse_setting(s);
            DigitSet L;
            if (r.L)
                L = *r.L;
            else if (st == TransferSetting::wavelet)
                L = default_branches(A);
            else
                throw InvalidInput("L required");
            const auto p = default_period(A, *period);
            const auto conv =
                st == TransferSetting::wavelet ? CycleConvention::modulo_lattice : CycleConvention::exact_points;
            const auto cycles = find_cycles(dual_ifs(A, L), m, p, conv, *all);
            json pts = json::array(), details = json::array();
            for (const auto& c : cycles) {
                json cp = json::array();
                for (const auto& x : c.points) cp.push_back(rational_vector_json(x));
                pts.push_back(cp);
                details.push_back(cycle_json(c, L));
            }
            run.emit_json({{"cycles", pts},
                           {"details", details},
                           {"max_period", p},
                           {"setting", s},
                           {"filter", filter_to_json(m)},
                           {"exact", true}});
        });
    }
    {
        auto* sub = app.add_subcommand("gen-spectrum", "candidate or completed spectrum up to a level");
        auto ifs = std::make_shared<IfsOptions>();
        ifs->add(sub);
        auto level = std::make_shared<unsigned>(3);
        auto period = std::make_shared<unsigned>(0);
        auto candidate = std::make_shared<bool>(false);
        sub->add_option("--level", *level, "digit sums with powers 0..level");
        sub->add_option("--max-period", *period, "cycle search bound when B is given");
        sub->add_flag("--lambda0", *candidate, "candidate set only, ignoring extreme cycles");
        reg.add(sub, [=](Run& run) {
            auto r = ifs->resolve(run);
            const auto s = build_spectrum(r, *level, *period, *candidate);
            json out = spectrum_json(s);
            json cycles = json::array();
            for (const auto& c : s.cycles) cycles.push_back(cycle_json(c, s.L));
            out["cycles"] = cycles;
            out["exact"] = true;
            run.emit_json(out);
        });
    }
    {
        auto* sub = app.add_subcommand("verify-onb", "Gram matrix of exponentials in L^2(mu_B)");
        auto ifs = std::make_shared<IfsOptions>();
        ifs->add(sub);
        auto level = std::make_shared<unsigned>(3);
        auto period = std::make_shared<unsigned>(0);
        auto lambdas = std::make_shared<std::string>();
        auto matrix = std::make_shared<bool>(false);
        sub->add_option("--level", *level, "spectrum level");
        sub->add_option("--max-period", *period, "cycle search bound");
        sub->add_option("--lambda", *lambdas, "explicit frequencies, ';'-separated rational points");
        sub->add_flag("--matrix", *matrix, "include the Gram matrix");
        reg.add(sub, [=](Run& run) {
            auto r = ifs->resolve(run);
            const auto mu = forward_ifs(r);
            GramReport g;
            json out;
            if (!lambdas->empty()) {
                const auto pts = parse_points(*lambdas, mu.dim());
                g = verify_orthogonality(mu, pts, *matrix);
                json l = json::array();
                for (const auto& x : pts) l.push_back(rational_vector_json(x));
                out["frequencies"] = l;
            } else {
                const auto s = build_spectrum(r, *level, *period, false);
                g = verify_orthogonality(mu, s, *matrix);
                out["level"] = s.level;
                out["frequencies"] = spectrum_json(s)["elements"];
            }
            out["gram"] = gram_report_json(g);
            if (g.matrix) out["matrix"] = complex_matrix_json(*g.matrix);
            run.emit_json(out);
        });
    }
    {
        auto* sub = app.add_subcommand("completeness-scan", "partial sums of sum_lambda |mu_hat(x + lambda)|^2");
        auto ifs = std::make_shared<IfsOptions>();
        ifs->add(sub);
        auto grid = std::make_shared<std::int64_t>(16);
        auto levels = std::make_shared<std::string>("2..8");
        auto xs = std::make_shared<std::string>();
        auto period = std::make_shared<unsigned>(0);
        sub->add_option("--grid", *grid, "points k/grid per axis in [0,1)");
        sub->add_option("--levels", *levels, "levels 'lo..hi' or a list");
        sub->add_option("--x", *xs, "explicit points, ';'-separated (overrides --grid)");
        sub->add_option("--max-period", *period, "cycle search bound");
        reg.add(sub, [=](Run& run) {
            auto r = ifs->resolve(run);
            const auto mu = forward_ifs(r);
            const auto lv = level_list(*levels);
            const auto s = build_spectrum(r, *std::max_element(lv.begin(), lv.end()), *period, false);
            const auto pts = xs->empty() ? unit_grid(mu.dim(), *grid) : parse_points(*xs, mu.dim());
            const auto rep = verify_completeness(mu, s, pts, lv);
            std::vector<std::vector<std::string>> rows;
            for (const auto& row : rep.rows)
                rows.push_back({point_str(row.x), std::to_string(row.level), num(row.partial_sum),
                                std::to_string(row.n_terms), num(row.error_bound)});
            run.emit_csv({"x", "level", "partial_sum", "n_terms", "error_bound"}, rows,
                         {"orthogonality: " + gram_report_json(rep.orthogonality).dump()});
        });
    }
    {
        auto* sub = app.add_subcommand("mu-hat", "Fourier transform of the invariant measure at a point");
        auto ifs = std::make_shared<IfsOptions>();
        ifs->add(sub, true, false);
        auto x = std::make_shared<std::string>();
        auto err = std::make_shared<double>(kDefaultProductError);
        sub->add_option("--x", *x, "rational point, e.g. 3/4 or 1/2,1/3")->required();
        sub->add_option("--err", *err, "target truncation error");
        reg.add(sub, [=](Run& run) {
            auto r = ifs->resolve(run);
            const auto mu = forward_ifs(r);
            const auto pt = parse_rational_point(*x);
            if (!(*err > 0)) throw InvalidInput("err must be positive");
            const auto v = mu_hat(mu, pt, *err);
            run.emit_json({{"x", rational_vector_json(pt)},
                           {"value", complex_json(v.value)},
                           {"abs", std::abs(v.value)},
                           {"tail_bound", v.tail_bound},
                           {"truncation_depth", v.truncation_depth},
                           {"exact_zero", v.exact_zero},
                           {"zero_witness", v.zero_witness ? json(*v.zero_witness) : json(nullptr)},
                           {"certified_nonzero", v.certified_nonzero}});
        });
    }
    {
        auto* sub = app.add_subcommand("h-scan", "sum over a frequency set of |mu_hat(x + lambda)|^2 on a grid");
        auto ifs = std::make_shared<IfsOptions>();
        ifs->add(sub);
        auto grid = std::make_shared<std::int64_t>(64);
        auto level = std::make_shared<unsigned>(6);
        auto lambdas = std::make_shared<std::string>();
        auto xs = std::make_shared<std::string>();
        sub->add_option("--grid", *grid, "points k/grid per axis in [0,1)");
        sub->add_option("--level", *level, "spectrum level when --L is used");
        sub->add_option("--lambda", *lambdas, "explicit frequencies, ';'-separated (instead of --L)");
        sub->add_option("--x", *xs, "explicit points, ';'-separated (overrides --grid)");
        reg.add(sub, [=](Run& run) {
            auto r = ifs->resolve(run);
            const auto mu = forward_ifs(r);
            std::vector<RationalVector> lam;
            if (!lambdas->empty())
                lam = parse_points(*lambdas, mu.dim());
            else
                lam = build_spectrum(r, *level, 0, false).as_rational();
            const auto pts = xs->empty() ? unit_grid(mu.dim(), *grid) : parse_points(*xs, mu.dim());
            std::vector<PartialSum> sums(pts.size());
            parallel_for(pts.size(), [&](std::size_t i) { sums[i] = h_function_partial(mu, lam, pts[i]); });
            std::vector<std::vector<std::string>> rows;
            for (std::size_t i = 0; i < pts.size(); ++i)
                rows.push_back({point_str(pts[i]), num(sums[i].value), std::to_string(sums[i].terms),
                                num(sums[i].error_bound)});
            run.emit_csv({"x", "partial_sum", "n_terms", "error_bound"}, rows);
        });
    }
    const auto add_filter_test = [&](const char* name, const char* desc, bool lawton) {
        auto* sub = app.add_subcommand(name, desc);
        auto ifs = std::make_shared<IfsOptions>();
        ifs->add(sub);
        auto m0 = std::make_shared<std::string>();
        auto setting = std::make_shared<std::string>();
        auto period = std::make_shared<unsigned>(0);
        auto depth = std::make_shared<unsigned>(0);
        auto tol = std::make_shared<double>(kEigenOneTolerance);
        sub->add_option("--m0,--filter", *m0, "filter: B (digit filter m_B) | haar | stretched-haar | haar3 | daub4 | JSON file | inline JSON");
        sub->add_option("--setting", *setting, "wavelet (default with --m0) or fractal (default with --B)");
        sub->add_option("--max-period", *period, "cycle search bound");
        if (lawton) {
            sub->add_option("--depth", *depth, "cylinder depth in the fractal setting (0 = default)");
            sub->add_option("--tol", *tol, "eigenvalue-one tolerance");
        }
        reg.add(sub, [=](Run& run) {
            IfsOptions local = *ifs;
            if (local.A.empty() && local.ifs_path.empty()) local.A = "2";
            auto r = local.resolve(run);
            const auto& A = need(r.A);
            const auto m = filter_option(run, *m0, r.B);
            const std::string s = setting->empty() ? (m0->empty() || *m0 == "B" ? "fractal" : "wavelet") : *setting;
            const auto st = parse_setting(s);
            DigitSet L;
            if (r.L)
                L = *r.L;
            else if (st == TransferSetting::wavelet)
                L = default_branches(A);
            else
                throw InvalidInput("L required");
            const auto p = default_period(A, *period);
            const auto cohen = cohen_test(m, A, L, p, st);
            json cycles = json::array();
            for (const auto& c : cohen.extreme_cycles) cycles.push_back(cycle_json(c, L));
            if (!lawton) {
                run.emit_json({{"positive", cohen.positive},
                               {"orthonormal", cohen.positive},
                               {"setting", s},
                               {"max_period", p},
                               {"extreme_cycles", cycles},
                               {"filter", filter_to_json(m)}});
                return;
            }
            const auto v = lawton_test(m, A, L, st, *tol, *depth);
            json basis = json::array();
            if (st == TransferSetting::wavelet) {
                for (const auto& k : v.matrix.window) basis.push_back(int_vector_json(k));
            } else {
                for (const auto& w : v.matrix.words) {
                    json jw = json::array();
                    for (auto d : w) jw.push_back(int_vector_json(L[d]));
                    basis.push_back(jw);
                }
            }
            const auto shown = std::min<Eigen::Index>(16, v.eigen.eigenvalues.size());
            json eig = json::array();
            for (Eigen::Index i = 0; i < shown; ++i) eig.push_back(complex_json(v.eigen.eigenvalues(i)));
            json vecs = json::array();
            for (Eigen::Index c = 0; c < v.eigen.eigenvectors.cols(); ++c)
                vecs.push_back(complex_vector_json(v.eigen.eigenvectors.col(c)));
            const auto& sv = v.eigen.singular_values;
            json small = json::array();
            for (Eigen::Index i = sv.size(); i-- > std::max<Eigen::Index>(0, sv.size() - 4);) small.push_back(sv(i));
            json out{{"orthonormal", v.orthonormal},
                     {"multiplicity", v.eigen.multiplicity},
                     {"tolerance", *tol},
                     {"setting", s},
                     {"qmf_defect", v.qmf_defect},
                     {"size", v.matrix.size()},
                     {"eigenvalues", eig},
                     {"eigenvalues_shown", shown},
                     {"smallest_singular_values_of_T_minus_I", small},
                     {"basis", basis},
                     {"eigenvectors", vecs}};
            if (v.eigen.closed_classes) out["closed_classes"] = *v.eigen.closed_classes;
            out["non_constant_eigenvector"] =
                v.non_constant_eigenvector ? complex_vector_json(*v.non_constant_eigenvector) : json(nullptr);
            out["cycles"] = cycles;
            out["cohen_positive"] = cohen.positive;
            out["filter"] = filter_to_json(m);
            run.emit_json(out);
        });
    };
    add_filter_test("lawton", "transfer-operator eigenvalue-one test", true);
    add_filter_test("cohen", "extreme-cycle test", false);

    struct WaveletOpts {
        std::string m0 = "stretched-haar";
        unsigned iterations = 40;
        unsigned J = kDefaultResolution;
    };
    const auto add_wavelet_opts = [](CLI::App* sub, WaveletOpts& w) {
        sub->add_option("--m0,--filter", w.m0, "dilation-2 filter: haar | stretched-haar | daub4 | JSON file | inline JSON");
        sub->add_option("--iterations", w.iterations, "cascade iterations");
        sub->add_option("--J", w.J, "resolution: cells of width 2^-J");
    };
    {
        auto* sub = app.add_subcommand("cascade", "scaling function by the cell-averaged cascade");
        auto w = std::make_shared<WaveletOpts>();
        add_wavelet_opts(sub, *w);
        reg.add(sub, [=](Run& run) {
            const auto m = filter_option(run, w->m0, std::nullopt);
            CascadeResult res;
            cascade_phi(m, w->iterations, w->J, &res);
            const double err = res.successive_distances.empty() ? 0.0 : res.successive_distances.back();
            std::vector<std::vector<std::string>> rows;
            const auto& phi = res.phi;
            for (std::size_t i = 0; i < phi.samples.size(); ++i) {
                const double x = phi.origin + phi.step() * static_cast<double>(i);
                rows.push_back({num(x), num(phi.samples[i].real()), num(phi.samples[i].imag()), num(err)});
            }
            run.emit_csv({"x", "re", "im", "err"}, rows,
                         {"err = L2 distance between the last two iterates; residual ||S phi - phi|| = " +
                          num(res.residual)});
        });
    }
    {
        auto* sub = app.add_subcommand("parseval", "Parseval defect of the dyadic wavelet system");
        auto w = std::make_shared<WaveletOpts>();
        add_wavelet_opts(sub, *w);
        auto jr = std::make_shared<std::string>("-8..8");
        auto kr = std::make_shared<std::string>("-300..300");
        auto fs = std::make_shared<std::vector<std::string>>();
        sub->add_option("--j-range", *jr, "scales 'lo..hi'");
        sub->add_option("--k-range", *kr, "translations 'lo..hi'");
        sub->add_option("--f", *fs, "test indicator 'lo,hi' (repeatable; default 0,1)");
        reg.add(sub, [=](Run& run) {
            const auto m = filter_option(run, w->m0, std::nullopt);
            CascadeResult res;
            const auto phi = cascade_phi(m, w->iterations, w->J, &res);
            const auto psi = wavelet_from_mra(m, phi);
            const auto [jlo, jhi] = parse_range(*jr);
            const auto [klo, khi] = parse_range(*kr);
            if (jlo < -30 || jhi > 30) throw InvalidInput("scales must lie in [-30, 30]");
            std::vector<SampledFunction> tests;
            json tj = json::array();
            for (const auto& f : (fs->empty() ? std::vector<std::string>{"0,1"} : *fs)) {
                const auto iv = parse_rational_list(f);
                if (iv.size() != 2 || !(iv[0] < iv[1])) throw InvalidInput("test interval '" + f + "' must be lo,hi");
                tests.push_back(SampledFunction::indicator(iv[0].to_double(), iv[1].to_double(), w->J));
                tj.push_back({rational_json(iv[0]), rational_json(iv[1])});
            }
            const double defect = parseval_defect(psi, tests, static_cast<int>(jlo), static_cast<int>(jhi), klo, khi);
            run.emit_json({{"defect", defect},
                           {"j_range", {jlo, jhi}},
                           {"k_range", {klo, khi}},
                           {"tests", tj},
                           {"psi_norm", psi.norm()},
                           {"phi_residual", res.residual},
                           {"integration", "exact on step functions"},
                           {"filter", filter_to_json(m)}});
        });
    }
    {
        auto* sub = app.add_subcommand("super-gram", "Gram matrix of the cycle-augmented scaling function");
        auto w = std::make_shared<WaveletOpts>();
        add_wavelet_opts(sub, *w);
        auto shifts = std::make_shared<unsigned>(4);
        auto period = std::make_shared<unsigned>(kDefaultMaxPeriod1d);
        sub->add_option("--shifts", *shifts, "translates -shifts..shifts");
        sub->add_option("--max-period", *period, "cycle search bound");
        reg.add(sub, [=](Run& run) {
            const auto m = filter_option(run, w->m0, std::nullopt);
            const auto phi = cascade_phi(m, w->iterations, w->J);
            const auto branches = DigitSet::scalars({0, 1});
            const auto cycles = find_cycles(dual_ifs(ExpansiveIntMatrix::scalar(2), branches), m, *period,
                                            CycleConvention::modulo_lattice);
            const auto sf = make_super_function(m, cycles, phi);
            const auto g = super_gram(sf, *shifts);
            const double dev = (g - Eigen::MatrixXcd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
            const auto plain = translate_gram(phi, *shifts);
            const double plain_dev =
                (plain - Eigen::MatrixXcd::Identity(plain.rows(), plain.cols())).cwiseAbs().maxCoeff();
            json cj = json::array();
            for (const auto& c : cycles) cj.push_back(cycle_json(c, branches));
            run.emit_json({{"components", sf.components.size()},
                           {"cycles", cj},
                           {"identity_deviation", dev},
                           {"plain_gram_deviation", plain_dev},
                           {"shifts", *shifts},
                           {"matrix", complex_matrix_json(g)}});
        });
    }
    {
        auto* sub = app.add_subcommand("brolin-moments", "moments of the equilibrium measure by inverse iteration");
        auto poly = std::make_shared<std::string>("z^2 + c");
        auto c = std::make_shared<std::string>("0");
        auto n = std::make_shared<std::size_t>(100000);
        auto burn = std::make_shared<unsigned>(kDefaultBurnIn);
        auto nmax = std::make_shared<unsigned>(8);
        sub->add_option("--poly", *poly, "polynomial in z, may use the parameter c");
        sub->add_option("--c", *c, "complex parameter, e.g. -0.1+0.65i");
        sub->add_option("--n", *n, "samples after burn-in");
        sub->add_option("--burn-in", *burn, "discarded initial steps");
        sub->add_option("--nmax", *nmax, "largest moment order");
        reg.add(sub, [=](Run& run) {
            const auto R = parse_polynomial(*poly, parse_complex(*c));
            if (*n == 0) throw InvalidInput("n must be positive");
            const auto samples = brolin_sample(R, *n, *burn, run.seed);
            const auto mom = moments(samples, *nmax);
            std::vector<std::vector<std::string>> rows;
            for (const auto& e : mom)
                rows.push_back({std::to_string(e.n), num(e.value.real()), num(e.value.imag()), num(e.std_error)});
            run.emit_csv({"n", "re", "im", "std_error"}, rows);
        });
    }
    {
        auto* sub = app.add_subcommand("k2-split", "split f = F0(z^4) + z F1(z^4) on the scale-4 spectrum");
        auto f = std::make_shared<std::string>();
        auto z = std::make_shared<std::string>();
        sub->add_option("--f", *f, "coefficients JSON {\"lambda\": [re, im]} (file or inline)")->required();
        sub->add_option("--z", *z, "optional point |z| < 1 for a pointwise check");
        reg.add(sub, [=](Run& run) {
            json j;
            const auto t = *f;
            try {
                if (!t.empty() && t.front() == '{') {
                    j = json::parse(t);
                } else {
                    run.digest_file(t);
                    j = json::parse(read_file(t));
                }
            } catch (const json::parse_error& e) {
                throw InvalidInput(std::string("malformed coefficient JSON: ") + e.what());
            }
            const auto fx = lacunary_from_json(j);
            const auto [f0, f1] = k2_split(fx);
            const auto back = k2_merge(f0, f1);
            const double nf = fx.norm_sq(), n0 = f0.norm_sq(), n1 = f1.norm_sq();
            json out{{"F0", lacunary_to_json(f0)},
                     {"F1", lacunary_to_json(f1)},
                     {"norm_sq_f", nf},
                     {"norm_sq_F0", n0},
                     {"norm_sq_F1", n1},
                     {"identity_defect", nf > 0 ? std::abs(nf - n0 - n1) / nf : std::abs(n0 + n1)},
                     {"roundtrip_exact", back.coefficients == fx.coefficients}};
            if (!z->empty()) {
                const auto zz = parse_complex(*z);
                const auto lhs = evaluate_Ff(fx, zz);
                const auto z4 = zz * zz * zz * zz;
                const auto rhs = evaluate_Ff(f0, z4) + zz * evaluate_Ff(f1, z4);
                out["z"] = complex_json(zz);
                out["F_z"] = complex_json(lhs);
                out["split_z"] = complex_json(rhs);
                out["pointwise_error"] = std::abs(lhs - rhs);
            }
            run.emit_json(out);
        });
    }
    {
        auto* sub = app.add_subcommand("probe-problem2", "necessary-condition checks for spectral (rho, beta, p) IFS");
        auto rho = std::make_shared<std::string>();
        auto beta = std::make_shared<std::string>();
        auto p = std::make_shared<std::string>();
        sub->add_option("--rho", *rho, "contraction ratio, rational, e.g. 1/4")->required();
        sub->add_option("--beta", *beta, "translations, rationals, e.g. 0,1/2")->required();
        sub->add_option("--p", *p, "probabilities (default uniform)");
        reg.add(sub, [=](Run& run) {
            const auto r = parse_rational(*rho);
            if (!(Rational(0) < r && r < Rational(1))) throw InvalidInput("rho must lie in (0, 1)");
            const auto b = parse_rational_list(*beta);
            if (b.size() < 2) throw InvalidInput("at least two translations are required");
            for (std::size_t i = 0; i < b.size(); ++i)
                for (std::size_t k = i + 1; k < b.size(); ++k)
                    if (b[i] == b[k]) throw InvalidInput("translations must be distinct");
            const auto n = b.size();
            std::vector<Rational> probs;
            if (!p->empty()) {
                probs = parse_rational_list(*p);
                if (probs.size() != n) throw InvalidInput("p must have one entry per translation");
                Rational total;
                for (const auto& q : probs) {
                    if (!(Rational(0) < q)) throw InvalidInput("probabilities must be positive");
                    total += q;
                }
                if (total != Rational(1)) throw InvalidInput("probabilities must sum to 1, got " + total.str());
            }
            json checks = json::array();
            const auto inv = Rational(1) / r;
            const bool scale_ok = inv.is_integer() && inv.num() >= 2;
            checks.push_back({{"check", "rho = 1/P with P an integer"},
                              {"passed", scale_ok},
                              {"detail", scale_ok ? "P = " + inv.str()
                                                  : "1/rho = " + inv.str() +
                                                        " is not an integer; necessary condition fails"}});
            bool uniform = true;
            std::string pdetail = "uniform weights 1/" + std::to_string(n);
            for (const auto& q : probs)
                if (q != Rational(1, static_cast<std::int64_t>(n))) {
                    uniform = false;
                    pdetail = "weight " + q.str() + " differs from 1/" + std::to_string(n) +
                              "; necessary condition fails";
                    break;
                }
            checks.push_back({{"check", "p_i = 1/N"}, {"passed", uniform}, {"detail", pdetail}});

            const bool has_zero = std::any_of(b.begin(), b.end(), [](const Rational& q) { return q.is_zero(); });
            json witness = nullptr;
            json hadamard{{"check", "beta = alpha B with (P, B, L) a Hadamard triple"}};
            if (!has_zero) {
                hadamard["passed"] = nullptr;
                hadamard["detail"] = "0 is not a translation; condition not applicable";
            } else if (!scale_ok) {
                hadamard["passed"] = nullptr;
                hadamard["detail"] = "needs an integer P";
            } else {
                std::int64_t den = 1;
                for (const auto& q : b) den = std::lcm(den, q.den());
                std::int64_t g = 0;
                IntVector ints;
                for (const auto& q : b) {
                    const auto v = checked_mul(q.num(), den / q.den());
                    ints.push_back(v);
                    g = std::gcd(g, v);
                }
                for (auto& v : ints) v /= g;
                const auto P = inv.num();
                IntVector cand;
                for (std::int64_t l = 1; l < P; ++l) cand.push_back(l);
                // B = k B0 with B0 primitive, k = 1..P; partners L are searched in {0..P-1} with 0 in L.
                bool found = false;
                std::uint64_t tried = 0;
                std::int64_t multiplier = 1;
                const auto A = ExpansiveIntMatrix::scalar(P);
                for (std::int64_t k = 1; k <= P && !found && n <= static_cast<std::size_t>(P); ++k) {
                    IntVector scaled;
                    for (auto v : ints) scaled.push_back(checked_mul(k, v));
                    const auto B = DigitSet::scalars(scaled);
                    std::vector<bool> pick(cand.size(), false);
                    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(n - 1), true);
                    do {
                        check_enumeration(++tried, "Hadamard partner sets");
                        IntVector L{0};
                        for (std::size_t i = 0; i < cand.size(); ++i)
                            if (pick[i]) L.push_back(cand[i]);
                        if (hadamard_check(A, B, DigitSet::scalars(L)).valid) {
                            witness = L;
                            found = true;
                            multiplier = k;
                            break;
                        }
                    } while (std::prev_permutation(pick.begin(), pick.end()));
                }
                json bj = json::array();
                for (auto v : ints) bj.push_back(checked_mul(multiplier, v));
                hadamard["passed"] = found;
                hadamard["alpha"] = rational_json(Rational(g, den) / Rational(multiplier));
                hadamard["B"] = bj;
                hadamard["partner_sets_tried"] = tried;
                hadamard["detail"] = found ? "Hadamard partner found"
                                           : (n > static_cast<std::size_t>(P)
                                                  ? "N > P: no Hadamard triple can exist"
                                                  : "no partner L in {0..P-1} for B = k B0, k = 1..P");
            }
            hadamard["witness_L"] = witness;
            checks.push_back(hadamard);
            run.emit_json({{"status", "evidence-only"},
                           {"rho", rational_json(r)},
                           {"beta", [&] {
                                json a = json::array();
                                for (const auto& q : b) a.push_back(rational_json(q));
                                return a;
                            }()},
                           {"checks", checks},
                           {"note", "necessary conditions only; passing them does not establish spectrality"}});
        });
    }
    {
        auto* sub = app.add_subcommand("probe-overlap", "overlap of first-level pieces by quadrature collisions");
        auto ifs = std::make_shared<IfsOptions>();
        ifs->add(sub, true, false);
        auto depth = std::make_shared<unsigned>(8);
        sub->add_option("--depth", *depth, "largest word length");
        reg.add(sub, [=](Run& run) {
            auto r = ifs->resolve(run);
            const auto mu = forward_ifs(r);
            const auto N = mu.digits().size();
            const auto d = mu.dim();
            if (*depth == 0) throw InvalidInput("depth must be >= 1");
            // Attractor radius bound about 0 from sum_k ||M^k|| max||b||.
            const auto Md = mu.contraction().to_doubles();
            Eigen::MatrixXd M(d, d);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t k = 0; k < d; ++k) M(i, k) = Md[i][k];
            const auto opnorm = [](const Eigen::MatrixXd& X) {
                Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
                return svd.singularValues()(0);
            };
            const auto j = mu.matrix().contraction_power();
            const double ratio = mu.matrix().contraction_ratio();
            double head = 0;
            Eigen::MatrixXd Pk = Eigen::MatrixXd::Identity(d, d);
            for (unsigned k = 1; k <= j; ++k) {
                Pk = Pk * M;
                head += opnorm(Pk);
            }
            double bmax = 0;
            for (const auto& bpt : mu.digits().points()) {
                double s = 0;
                for (auto c : bpt) s += static_cast<double>(c) * static_cast<double>(c);
                bmax = std::max(bmax, std::sqrt(s));
            }
            const double radius = bmax * head / (1.0 - ratio);
            json rows = json::array();
            Eigen::MatrixXd Mn = Eigen::MatrixXd::Identity(d, d);
            for (unsigned n = 1; n <= *depth; ++n) {
                Mn = Mn * M;
                const auto rule = measure_quadrature_points(mu, n);
                const std::size_t per = rule.points.size() / N;
                const double reach = 2.0 * opnorm(Mn) * radius;
                // Sort by the first coordinate and sweep; pairs closer than reach may touch.
                std::vector<std::size_t> order(rule.points.size());
                std::iota(order.begin(), order.end(), std::size_t{0});
                std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                    return rule.points[a][0] < rule.points[b][0] ||
                           (rule.points[a][0] == rule.points[b][0] && a < b);
                });
                std::vector<std::vector<std::vector<bool>>> exact(
                    N, std::vector<std::vector<bool>>(N, std::vector<bool>(per, false)));
                std::vector<std::vector<std::vector<bool>>> touch(
                    N, std::vector<std::vector<bool>>(N, std::vector<bool>(per, false)));
                for (std::size_t a = 0; a < order.size(); ++a) {
                    const auto ia = order[a];
                    for (std::size_t c = a + 1; c < order.size(); ++c) {
                        const auto ic = order[c];
                        if (rule.points[ic][0] - rule.points[ia][0] > reach) break;
                        const auto ba = ia / per, bc = ic / per;
                        if (ba == bc) continue;
                        double dist = 0;
                        for (std::size_t k = 0; k < d; ++k) {
                            const double t = rule.points[ia][k] - rule.points[ic][k];
                            dist += t * t;
                        }
                        if (std::sqrt(dist) > reach) continue;
                        touch[ba][bc][ia % per] = true;
                        touch[bc][ba][ic % per] = true;
                        if (rule.scaled[ia] == rule.scaled[ic]) {
                            exact[ba][bc][ia % per] = true;
                            exact[bc][ba][ic % per] = true;
                        }
                    }
                }
                const double w = rule.weight.to_double();
                for (std::size_t b1 = 0; b1 < N; ++b1)
                    for (std::size_t b2 = b1 + 1; b2 < N; ++b2) {
                        const auto t1 = std::count(touch[b1][b2].begin(), touch[b1][b2].end(), true);
                        const auto t2 = std::count(touch[b2][b1].begin(), touch[b2][b1].end(), true);
                        const auto e = std::min(std::count(exact[b1][b2].begin(), exact[b1][b2].end(), true),
                                                std::count(exact[b2][b1].begin(), exact[b2][b1].end(), true));
                        rows.push_back({{"depth", n},
                                        {"b", int_vector_json(mu.digits()[b1])},
                                        {"b_prime", int_vector_json(mu.digits()[b2])},
                                        {"exact_collisions", e},
                                        {"collision_mass", static_cast<double>(e) * w},
                                        {"touching_cylinders", std::min(t1, t2)},
                                        {"mass_upper_bound", static_cast<double>(std::min(t1, t2)) * w}});
                    }
            }
            run.emit_json({{"status", "evidence-only"},
                           {"attractor_radius_bound", radius},
                           {"rows", rows},
                           {"note", "mass_upper_bound bounds mu(tau_b X cap tau_b' X) from above; exact collisions "
                                    "of quadrature points are evidence of overlap, not a proof"}});
        });
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fracwave: Fourier bases on self-affine measures and wavelet filters", "fracwave"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.fallthrough();
    Run run;
    run.app = &app;
    run.started = utc_now();
    app.add_option("--out", run.out_path, "write results to this file instead of standard output");
    app.add_option("--threads", run.threads, "worker threads (0 = all cores)");
    app.add_option("--seed", run.seed, "random seed");
    app.set_version_flag("--version", FRACWAVE_VERSION);
    Registry reg;
    register_all(app, reg);

    if (argc > 1 && argv[1][0] != '-') {
        const std::string name = argv[1];
        const auto subs = app.get_subcommands([](const CLI::App*) { return true; });
        if (std::none_of(subs.begin(), subs.end(), [&](const CLI::App* s) { return s->get_name() == name; })) {
            std::cerr << "error: unknown subcommand '" << name << "'\n\n" << app.help();
            return 2;
        }
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        set_thread_count(run.threads);
        for (auto& [sub, handler] : reg.handlers)
            if (sub->parsed()) {
                run.sub = sub;
                handler(run);
                return 0;
            }
        std::cerr << app.help();
        return 2;
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ComputationError& e) {
        std::cerr << "computation failed: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "computation failed: " << e.what() << "\n";
        return 1;
    }
}
