#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "levi/classify.hpp"
#include "levi/connection.hpp"
#include "levi/errors.hpp"
#include "levi/report.hpp"
#include "levi/sampling.hpp"
#include "levi/shape.hpp"
#include "levi/surface.hpp"

namespace {

using namespace levi;

constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitGeometry = 3;
constexpr int kExitSampling = 4;
constexpr int kExitUnclassified = 5;
constexpr int kExitIo = 6;
constexpr int kExitCheckFailed = 7;

// Surface loads that parse but fail the realness probe share the parse exit code.
struct RealnessFailure : Error {
    using Error::Error;
};

struct Opts {
    std::string surface_path;
    std::string point;
    std::string start;
    std::string csv;
    double tol = 1e-9;
    std::uint64_t seed = 0;
    int samples = 100;
    double step = 0.0; // 0 = derived from curvature at the start point
    int max_iter = 32;
    double decision_tol = 1e-6;
    bool json = false;
    bool no_timing = false;
};

int thread_count() {
    if (const char* env = std::getenv("LEVI_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return std::min(v, 64);
    }
    unsigned hc = std::thread::hardware_concurrency();
    if (hc == 0) hc = 1;
    return static_cast<int>(std::min(hc, 8u));
}

template <class F>
void parallel_for(int count, F&& f) {
    int workers = std::min(thread_count(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto run = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(run);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

JValue jcplx(cplx v) {
    JValue a = JValue::array();
    a.push(JValue::number(v.real()));
    a.push(JValue::number(v.imag()));
    return a;
}

JValue jvec_real(const std::vector<double>& v) {
    JValue a = JValue::array();
    for (double x : v) a.push(JValue::number(x));
    return a;
}

JValue jvec_cplx(const std::vector<cplx>& v) {
    JValue a = JValue::array();
    for (cplx x : v) a.push(jcplx(x));
    return a;
}

JValue jmat_cplx(const std::vector<std::vector<cplx>>& m) {
    JValue a = JValue::array();
    for (const auto& row : m) a.push(jvec_cplx(row));
    return a;
}

std::vector<cplx> parse_point(const std::string& text, int n) {
    std::vector<double> reals;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        size_t a = item.find_first_not_of(" \t");
        if (a == std::string::npos) throw Error("empty coordinate in point list");
        size_t b = item.find_last_not_of(" \t");
        try {
            reals.push_back(std::stod(item.substr(a, b - a + 1)));
        } catch (const std::exception&) {
            throw Error("cannot parse coordinate '" + item + "'");
        }
    }
    if (static_cast<int>(reals.size()) != 2 * (n + 1))
        throw Error("expected " + std::to_string(2 * (n + 1)) +
                    " comma-separated reals, got " + std::to_string(reals.size()));
    std::vector<cplx> z(n + 1);
    for (int h = 0; h <= n; ++h) z[h] = cplx(reals[2 * h], reals[2 * h + 1]);
    return z;
}

SurfaceDef load_surface(const std::string& path) {
    SurfaceDef s = parse_surface_file(path);
    RealnessReport rr = check_real_valued(s, 64, 0x5eedull);
    if (!rr.pass)
        throw RealnessFailure("surface is not real-valued: max |Im F| = " +
                              std::to_string(rr.max_imag));
    return s;
}

JValue report_shell(const SurfaceDef& s, const std::string& cmd, JValue inputs,
                    JValue results, double ms, bool no_timing) {
    JValue r = JValue::object();
    r.set("tool_version", JValue::str("1.0.0"));
    JValue sur = JValue::object();
    sur.set("name", JValue::str(s.name));
    sur.set("n", JValue::integer(s.n));
    r.set("surface", std::move(sur));
    r.set("command", JValue::str(cmd));
    r.set("inputs", std::move(inputs));
    r.set("results", std::move(results));
    if (!no_timing) r.set("timing_ms", JValue::number(ms));
    return r;
}

SurfacePoint resolve_start(const SurfaceDef& s, const Opts& o) {
    if (!o.start.empty()) {
        std::vector<cplx> z0 = parse_point(o.start, s.n);
        return project(s, z0, o.tol, o.max_iter);
    }
    return find_start(s, o.tol, o.seed, o.max_iter);
}

double walk_step(const SurfaceDef& s, const SurfacePoint& base, const Opts& o) {
    return o.step > 0.0 ? o.step : default_step(s, base);
}

// ---------------------------------------------------------------- compute

int cmd_compute(const Opts& o) {
    SurfaceDef s = load_surface(o.surface_path);
    if (o.point.empty()) {
        std::cerr << "error: compute requires --point\n";
        return kExitUsage;
    }
    std::vector<cplx> z = parse_point(o.point, s.n);
    auto t0 = std::chrono::steady_clock::now();
    SurfacePoint p = locate(s, z, o.tol);
    SecondForm sf = second_form(s, p);
    double ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();

    const int n = s.n;
    double h_real = (2.0 * n * sf.H + sf.h_TT) / (2.0 * n + 1.0);

    if (o.json) {
        JValue in = JValue::object();
        in.set("point", JValue::str(o.point));
        in.set("tol", JValue::number(o.tol));
        JValue res = JValue::object();
        res.set("pivot", JValue::integer(sf.frame.pivot + 1));
        res.set("grad_norm", JValue::number(sf.frame.grad_norm));
        res.set("hol_grad_norm", JValue::number(sf.frame.hol_grad_norm));
        res.set("pivot_ratio", JValue::number(sf.frame.pivot_ratio));
        res.set("H", JValue::number(sf.H));
        res.set("H_closed_form", JValue::number(sf.H_closed));
        res.set("H_real", JValue::number(h_real));
        res.set("h_TT", JValue::number(sf.h_TT));
        res.set("h_hol_antihol", jmat_cplx(sf.h_hol_antihol));
        res.set("h_hol_hol", jmat_cplx(sf.h_hol_hol));
        res.set("h_hol_T", jvec_cplx(sf.h_hol_T));
        res.set("levi_eigs", jvec_real(sf.levi_eigs));
        res.set("shape_eigs", jvec_real(sf.shape_eigs));
        res.set("metric", jmat_cplx(sf.frame.g));
        res.set("hesse_gap", JValue::number(sf.hesse_gap));
        std::cout << report_shell(s, "compute", std::move(in), std::move(res),
                                  ms, o.no_timing)
                         .dump_string();
    } else {
        std::cout << "surface: " << s.name << "  (n = " << n << ")\n";
        std::cout << "pivot coordinate: z" << sf.frame.pivot + 1
                  << "  |grad F| = " << format_number(sf.frame.grad_norm)
                  << "\n";
        std::cout << "Levi curvature H       = " << format_number(sf.H) << "\n";
        std::cout << "H (closed form)        = " << format_number(sf.H_closed)
                  << "\n";
        std::cout << "mean curvature (real)  = " << format_number(h_real) << "\n";
        std::cout << "h(T,T)                 = " << format_number(sf.h_TT) << "\n";
        std::cout << "Levi eigenvalues       =";
        for (double k : sf.levi_eigs) std::cout << ' ' << format_number(k);
        std::cout << "\nshape eigenvalues      =";
        for (double k : sf.shape_eigs) std::cout << ' ' << format_number(k);
        std::cout << "\n";
        if (!o.no_timing) std::cout << "elapsed: " << ms << " ms\n";
    }
    return 0;
}

// ------------------------------------------------------------------ check

int cmd_check(const Opts& o) {
    SurfaceDef s = load_surface(o.surface_path);
    auto t0 = std::chrono::steady_clock::now();
    SurfacePoint base = resolve_start(s, o);
    SampleSet set = sample_patch(s, base, o.samples, walk_step(s, base, o), o.seed);
    std::vector<SurfacePoint> good = well_conditioned(s, set);
    if (good.empty()) throw TooManyRejections("no well-conditioned sample points");

    std::vector<CodazziReport> reports(good.size());
    parallel_for(static_cast<int>(good.size()),
                 [&](int i) { reports[i] = codazzi_residuals(s, good[i]); });

    CodazziReport worst;
    for (const CodazziReport& r : reports) {
        worst.codazzi_mixed = std::max(worst.codazzi_mixed, r.codazzi_mixed);
        worst.codazzi_her_t = std::max(worst.codazzi_her_t, r.codazzi_her_t);
        worst.codazzi_sym_t = std::max(worst.codazzi_sym_t, r.codazzi_sym_t);
        worst.codazzi_t_t = std::max(worst.codazzi_t_t, r.codazzi_t_t);
        worst.codazzi_her_skew = std::max(worst.codazzi_her_skew, r.codazzi_her_skew);
        worst.codazzi_sym_skew = std::max(worst.codazzi_sym_skew, r.codazzi_sym_skew);
        worst.gauss = std::max(worst.gauss, r.gauss);
        worst.normal_t_bracket = std::max(worst.normal_t_bracket, r.normal_t_bracket);
        worst.normal_h_t = std::max(worst.normal_h_t, r.normal_h_t);
        worst.bracket_levi = std::max(worst.bracket_levi, r.bracket_levi);
        worst.metric_compat = std::max(worst.metric_compat, r.metric_compat);
        worst.torsion_hol = std::max(worst.torsion_hol, r.torsion_hol);
        worst.torsion_mixed = std::max(worst.torsion_mixed, r.torsion_mixed);
        worst.parallel_bundle = std::max(worst.parallel_bundle, r.parallel_bundle);
        worst.bracket_gen = std::max(worst.bracket_gen, r.bracket_gen);
        worst.real_projection = std::max(worst.real_projection, r.real_projection);
    }
    double ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();

    bool pass = worst.max_residual() <= o.tol;

    if (o.json) {
        JValue in = JValue::object();
        in.set("samples", JValue::integer(o.samples));
        in.set("seed", JValue::integer(static_cast<long long>(o.seed)));
        in.set("tol", JValue::number(o.tol));
        JValue res = JValue::object();
        res.set("sampled", JValue::integer(set.stats.count));
        res.set("well_conditioned", JValue::integer(static_cast<long long>(good.size())));
        res.set("rejected", JValue::integer(set.stats.rejected_count));
        res.set("min_grad", JValue::number(set.stats.min_grad));
        JValue rv = JValue::object();
        for (const auto& [name, v] : worst.entries()) rv.set(name, JValue::number(v));
        res.set("residuals", std::move(rv));
        res.set("max_residual", JValue::number(worst.max_residual()));
        res.set("pass", JValue::boolean(pass));
        std::cout << report_shell(s, "check", std::move(in), std::move(res), ms,
                                  o.no_timing)
                         .dump_string();
    } else {
        std::cout << "surface: " << s.name << "  samples: " << set.stats.count
                  << "  well-conditioned: " << good.size() << "\n";
        for (const auto& [name, v] : worst.entries())
            std::cout << "  " << name << std::string(18 - name.size(), ' ')
                      << format_number(v) << (v <= o.tol ? "" : "  <-- over tolerance")
                      << "\n";
        std::cout << (pass ? "PASS" : "FAIL") << " (tolerance "
                  << format_number(o.tol) << ")\n";
        if (!o.no_timing) std::cout << "elapsed: " << ms << " ms\n";
    }
    return pass ? 0 : kExitCheckFailed;
}

// --------------------------------------------------------------- classify

JValue verdict_json(const ClassificationVerdict& v) {
    JValue res = JValue::object();
    res.set("kind", JValue::str(to_string(v.kind)));
    JValue params = JValue::object();
    if (v.kind == VerdictKind::Sphere) {
        params.set("center", jvec_cplx(v.sphere.center));
        params.set("radius", JValue::number(v.sphere.radius));
        params.set("center_spread", JValue::number(v.sphere.center_spread));
    } else if (v.kind == VerdictKind::SphericalTube) {
        params.set("radius", JValue::number(v.tube.radius));
        JValue dirs = JValue::array();
        for (const auto& dvec : v.tube.axis_dirs) dirs.push(jvec_cplx(dvec));
        params.set("axis_dirs", std::move(dirs));
    } else if (v.kind == VerdictKind::HermitianCylinder) {
        params.set("m", JValue::integer(v.cylinder.m));
        params.set("radius", JValue::number(v.cylinder.radius));
    }
    res.set("params", std::move(params));
    JValue diag = JValue::object();
    diag.set("H_mean", JValue::number(v.diagnostics.H_mean));
    diag.set("H_dev", JValue::number(v.diagnostics.H_dev));
    diag.set("umbilical_dev", JValue::number(v.diagnostics.umbilical_dev));
    diag.set("h_alpha0_max", JValue::number(v.diagnostics.h_alpha0_max));
    diag.set("h_TT_mean", JValue::number(v.diagnostics.h_TT_mean));
    diag.set("h_TT_dev", JValue::number(v.diagnostics.h_TT_dev));
    diag.set("case_label", JValue::str(v.diagnostics.case_label));
    diag.set("orientation_flipped", JValue::boolean(v.diagnostics.orientation_flipped));
    diag.set("strictly_pseudoconvex",
             JValue::boolean(v.diagnostics.strictly_pseudoconvex));
    diag.set("note", JValue::str(v.diagnostics.note));
    res.set("diagnostics", std::move(diag));
    return res;
}

int cmd_classify(const Opts& o) {
    SurfaceDef s = load_surface(o.surface_path);
    if (o.samples < 10) {
        std::cerr << "error: classify needs --samples >= 10\n";
        return kExitUsage;
    }
    auto t0 = std::chrono::steady_clock::now();
    SurfacePoint base = resolve_start(s, o);
    SampleSet set = sample_patch(s, base, o.samples, walk_step(s, base, o), o.seed);
    ClassificationVerdict v = classify(s, set, o.decision_tol);
    double ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();

    if (o.json) {
        JValue in = JValue::object();
        in.set("samples", JValue::integer(o.samples));
        in.set("seed", JValue::integer(static_cast<long long>(o.seed)));
        in.set("tol", JValue::number(o.tol));
        in.set("decision_tol", JValue::number(o.decision_tol));
        std::cout << report_shell(s, "classify", std::move(in), verdict_json(v),
                                  ms, o.no_timing)
                         .dump_string();
    } else {
        std::cout << "surface: " << s.name << "\nverdict: " << to_string(v.kind);
        if (!v.diagnostics.case_label.empty())
            std::cout << "  (case " << v.diagnostics.case_label << ")";
        std::cout << "\n";
        if (v.kind == VerdictKind::Sphere) {
            std::cout << "  radius " << format_number(v.sphere.radius)
                      << ", center spread "
                      << format_number(v.sphere.center_spread) << "\n";
        } else if (v.kind == VerdictKind::SphericalTube) {
            std::cout << "  radius " << format_number(v.tube.radius) << "\n";
        } else if (v.kind == VerdictKind::HermitianCylinder) {
            std::cout << "  m = " << v.cylinder.m << ", radius "
                      << format_number(v.cylinder.radius) << "\n";
        }
        std::cout << "  H mean " << format_number(v.diagnostics.H_mean)
                  << ", dev " << format_number(v.diagnostics.H_dev)
                  << ", umbilical dev "
                  << format_number(v.diagnostics.umbilical_dev) << "\n";
        if (!v.diagnostics.note.empty())
            std::cout << "  note: " << v.diagnostics.note << "\n";
        if (!o.no_timing) std::cout << "elapsed: " << ms << " ms\n";
    }
    return v.kind == VerdictKind::Unclassified ? kExitUnclassified : 0;
}

// ------------------------------------------------------------------- scan

int cmd_scan(const Opts& o) {
    SurfaceDef s = load_surface(o.surface_path);
    auto t0 = std::chrono::steady_clock::now();
    SurfacePoint base = resolve_start(s, o);
    SampleSet set = sample_patch(s, base, o.samples, walk_step(s, base, o), o.seed);

    std::vector<SecondForm> forms(set.points.size());
    parallel_for(static_cast<int>(set.points.size()),
                 [&](int i) { forms[i] = second_form(s, set.points[i]); });

    std::ofstream csv(o.csv);
    if (!csv) {
        std::cerr << "error: cannot open CSV output '" << o.csv << "'\n";
        return kExitIo;
    }
    csv << "index";
    for (int h = 0; h <= s.n; ++h) csv << ",re_z" << h + 1 << ",im_z" << h + 1;
    csv << ",H";
    for (int a = 1; a <= s.n; ++a) csv << ",levi_" << a;
    csv << ",h_TT,umbilical_dev\n";
    for (size_t i = 0; i < forms.size(); ++i) {
        const SecondForm& f = forms[i];
        csv << i;
        for (int h = 0; h <= s.n; ++h)
            csv << ',' << format_number(f.frame.z[h].real()) << ','
                << format_number(f.frame.z[h].imag());
        csv << ',' << format_number(f.H);
        double dev = 0.0;
        for (double k : f.levi_eigs) {
            csv << ',' << format_number(k);
            dev = std::max(dev, std::abs(k - f.H));
        }
        csv << ',' << format_number(f.h_TT) << ',' << format_number(dev) << "\n";
    }
    csv.flush();
    if (!csv) {
        std::cerr << "error: failed writing CSV output '" << o.csv << "'\n";
        return kExitIo;
    }
    csv.close();

    CurvatureConstancy cc = curvature_constancy(forms);
    double umb = umbilicality_deviation(forms);
    double h00_mean = 0.0;
    for (const SecondForm& f : forms) h00_mean += f.h_TT;
    h00_mean /= double(forms.size());
    double ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();

    if (o.json) {
        JValue in = JValue::object();
        in.set("samples", JValue::integer(o.samples));
        in.set("seed", JValue::integer(static_cast<long long>(o.seed)));
        in.set("csv", JValue::str(o.csv));
        JValue res = JValue::object();
        res.set("count", JValue::integer(set.stats.count));
        res.set("rejected", JValue::integer(set.stats.rejected_count));
        res.set("min_grad", JValue::number(set.stats.min_grad));
        res.set("H_mean", JValue::number(cc.mean));
        res.set("H_dev", JValue::number(cc.dev));
        res.set("umbilical_dev", JValue::number(umb));
        res.set("h_TT_mean", JValue::number(h00_mean));
        std::cout << report_shell(s, "scan", std::move(in), std::move(res), ms,
                                  o.no_timing)
                         .dump_string();
    } else {
        std::cout << "surface: " << s.name << "  rows: " << set.stats.count
                  << "  -> " << o.csv << "\n";
        std::cout << "H mean " << format_number(cc.mean) << ", dev "
                  << format_number(cc.dev) << ", umbilical dev "
                  << format_number(umb) << "\n";
        if (!o.no_timing) std::cout << "elapsed: " << ms << " ms\n";
    }
    return 0;
}

void add_common(CLI::App* sub, Opts& o) {
    sub->add_option("--surface", o.surface_path, "surface definition file")
        ->required();
    sub->add_option("--tol", o.tol, "surface membership / residual tolerance");
    sub->add_option("--seed", o.seed, "random walk seed");
    sub->add_option("--samples", o.samples, "number of sample points")
        ->check(CLI::PositiveNumber);
    sub->add_option("--step", o.step, "walk step size (default: curvature-scaled)");
    sub->add_option("--max-iter", o.max_iter, "projection iteration cap")
        ->check(CLI::PositiveNumber);
    sub->add_option("--start", o.start,
                    "seed point for the walk, 2(n+1) comma-separated reals");
    sub->add_flag("--json", o.json, "machine-readable report on stdout");
    sub->add_flag("--no-timing", o.no_timing, "omit timing from the report");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"implicit hypersurface geometry toolkit"};
    app.require_subcommand(1);

    Opts o;
    CLI::App* c_compute = app.add_subcommand("compute", "invariants at one point");
    add_common(c_compute, o);
    c_compute->add_option("--point", o.point,
                          "point on the surface, 2(n+1) comma-separated reals");

    CLI::App* c_check = app.add_subcommand("check", "residual sweep over samples");
    add_common(c_check, o);

    CLI::App* c_classify = app.add_subcommand("classify", "classification verdict");
    add_common(c_classify, o);
    c_classify->add_option("--decision-tol", o.decision_tol,
                           "tolerance for classification decisions");

    CLI::App* c_scan = app.add_subcommand("scan", "per-sample CSV of invariants");
    add_common(c_scan, o);
    c_scan->add_option("--csv", o.csv, "CSV output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (c_compute->parsed()) return cmd_compute(o);
        if (c_check->parsed()) return cmd_check(o);
        if (c_classify->parsed()) return cmd_classify(o);
        if (c_scan->parsed()) return cmd_scan(o);
        std::cerr << "error: no command\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const RealnessFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const NotOnSurface& e) {
        std::cerr << "error: NotOnSurface: " << e.what() << "\n";
        return kExitGeometry;
    } catch (const DegeneratePoint& e) {
        std::cerr << "error: DegeneratePoint: " << e.what() << "\n";
        return kExitGeometry;
    } catch (const NoConvergence& e) {
        std::cerr << "error: NoConvergence: " << e.what() << "\n";
        return kExitSampling;
    } catch (const TooManyRejections& e) {
        std::cerr << "error: TooManyRejections: " << e.what() << "\n";
        return kExitSampling;
    } catch (const DimensionMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitGeometry;
    }
}
