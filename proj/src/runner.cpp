#include "jspec/runner.hpp"

#include "jspec/cauchy.hpp"
#include "jspec/convergence.hpp"
#include "jspec/errors.hpp"
#include "jspec/io.hpp"
#include "jspec/spectra.hpp"
#include "jspec/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace jspec {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "jspec 0.1.0";

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
    throw Error(ErrorCode::Config, "config field '" + field + "': " + what);
}

template <class T>
T get_field(const json& j, const std::string& field) {
    try {
        return j.get<T>();
    } catch (const json::exception& e) {
        field_error(field, e.what());
    }
}

std::complex<double> z_from_json(const json& j, const std::string& field) {
    if (j.is_string()) return parse_complex(j.get<std::string>());
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2) return {get_field<double>(j[0], field), get_field<double>(j[1], field)};
    field_error(field, "expected \"a+bi\", a number or [re, im]");
}

std::pair<double, double> pair_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2) field_error(field, "expected [lo, hi]");
    return {get_field<double>(j[0], field), get_field<double>(j[1], field)};
}

json config_to_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    json fam = {{"name", c.family}};
    for (const auto& [k, v] : c.family_options) fam[k] = v;
    if (!c.custom_path.empty()) fam["path"] = c.custom_path;
    j["family"] = fam;
    j["n"] = c.n;
    j["n_grid"] = c.n_grid;
    j["tol"] = c.tol;
    json zs = json::array();
    for (auto z : c.z) zs.push_back({z.real(), z.imag()});
    j["z"] = zs;
    j["eps"] = c.eps;
    j["x"] = c.x;
    json iv = json::array();
    for (const auto& I : c.intervals) {
        json holes = json::array();
        for (const auto& [a, b] : I.holes) holes.push_back({a, b});
        iv.push_back({{"lo", I.lo}, {"hi", I.hi}, {"holes", holes}});
    }
    j["intervals"] = iv;
    j["normalizer"] = c.normalizer;
    j["rel_tol"] = c.rel_tol;
    j["j_max"] = c.j_max;
    j["M"] = c.M;
    return j;
}

JacobiFamily make_family(const RunConfig& c) {
    if (c.family == "custom") {
        if (c.custom_path.empty()) throw Error(ErrorCode::Config, "custom family needs family.path");
        return load_custom_family(c.custom_path);
    }
    return builtin_family(c.family, c.family_options);
}

NormalizerKind natural_normalizer(const JacobiFamily& family) {
    const CaseClass cc = classify(family);
    return cc.variant == SpectralCase::IIb ? NormalizerKind::SumSqrtAlphaGammaOverA : NormalizerKind::SumAlphaOverA;
}

NormalizerKind normalizer_for(const RunConfig& c, const JacobiFamily& family) {
    return c.normalizer.empty() ? natural_normalizer(family) : normalizer_from_name(c.normalizer);
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

struct Outcome {
    json tolerances = json::object();
    json results = json::object();
    std::vector<std::string> files;
    bool pass = true;

    void check(const std::string& name, double value, double tol, bool ok) {
        tolerances[name] = tol;
        results[name] = {{"value", value}, {"pass", ok}};
        pass = pass && ok;
    }
};

void emit(const RunConfig& c, Outcome& o, const std::string& name, const std::string& content) {
    write_file_atomic(c.out / name, content);
    o.files.push_back(name);
}

void cmd_spectrum(const RunConfig& c, Outcome& o) {
    const JacobiFamily family = make_family(c);
    const SpectrumResult spec = eigenvalues(family, c.n, c.tol);
    std::ostringstream csv;
    write_spectrum_csv(csv, spec);
    emit(c, o, "spectrum.csv", csv.str());
    emit(c, o, "spectrum.json", spectrum_metadata_json(spec));
}

void cmd_density(const RunConfig& c, Outcome& o) {
    const JacobiFamily family = make_family(c);
    if (c.intervals.empty()) throw Error(ErrorCode::Config, "density needs 'intervals'");
    std::vector<Interval> iv;
    for (const auto& I : c.intervals) iv.push_back({I.lo, I.hi, I.holes});
    const ExperimentPlan plan{family, normalizer_for(c, family), c.n_grid, iv, predicted_model(family, c.j_max),
                              c.rel_tol};
    const DensityReport rep = density_experiment(plan);
    std::ostringstream csv;
    write_density_csv(csv, rep);
    emit(c, o, "density.csv", csv.str());
    emit(c, o, "density.json", density_summary_json(rep));
    double worst = 0;
    const std::size_t ni = iv.size();
    for (std::size_t i = rep.rows.size() - ni; i < rep.rows.size(); ++i) worst = std::max(worst, rep.rows[i].rel_err);
    o.check("density_rel_err", worst, c.rel_tol, rep.pass);
}

void cmd_cauchy(const RunConfig& c, Outcome& o) {
    const JacobiFamily family = make_family(c);
    if (c.z.empty()) throw Error(ErrorCode::Config, "cauchy needs 'z'");
    const NormalizerKind kind = normalizer_for(c, family);
    std::optional<DensityModel> model;
    try {
        model = predicted_model(family, c.j_max);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::Domain) throw;
    }
    std::ostringstream csv;
    csv << "z_re,z_im,n,rho_n,value_re,value_im,normalized_re,normalized_im,predicted_re,predicted_im,rel_err\n";
    csv.precision(17);
    double worst = 0;
    for (auto z : c.z) {
        const CauchySample s = cauchy_sample(family, c.n, z, kind);
        const cplx v = s.normalized();
        cplx pred(NAN, NAN);
        double err = NAN;
        if (model && z.imag() > 0) {
            pred = limit_g(*model, z);
            err = std::abs(v - pred) / std::abs(pred);
            worst = std::max(worst, err);
        }
        csv << z.real() << ',' << z.imag() << ',' << c.n << ',' << s.normalizer << ',' << s.value.real() << ','
            << s.value.imag() << ',' << v.real() << ',' << v.imag() << ',' << pred.real() << ',' << pred.imag() << ','
            << err << '\n';
    }
    emit(c, o, "cauchy.csv", csv.str());
    if (model) o.check("cauchy_rel_err", worst, c.rel_tol, worst < c.rel_tol);
}

void cmd_classify(const RunConfig& c, Outcome& o) {
    const JacobiFamily family = make_family(c);
    const CaseClass cc = classify(family);
    json j = {{"case", case_name(cc.variant)}, {"epsilon", cc.epsilon}, {"trace0", cc.trace0},
              {"margin", cc.margin}};
    emit(c, o, "classify.json", j.dump(2));
}

void cmd_levinson(const RunConfig& c, Outcome& o) {
    const JacobiFamily family = make_family(c);
    if (c.z.empty()) throw Error(ErrorCode::Config, "levinson needs 'z'");
    std::ostringstream csv;
    csv << "z_re,z_im,j,log_product,lower_bound_sum\n";
    csv.precision(17);
    bool monotone = true;
    for (auto z : c.z) {
        const index_t M = c.M > 0 ? c.M : choose_start_index(family, {z}, 1, std::min<index_t>(c.j_max, 1000));
        const LevinsonResult r = levinson_ratio_product(family, z, M, c.j_max);
        monotone = monotone && r.nondecreasing;
        for (std::size_t k = 0; k < r.j.size(); ++k)
            csv << z.real() << ',' << z.imag() << ',' << r.j[k] << ',' << r.log_products[k] << ','
                << r.lower_bound_sums[k] << '\n';
    }
    emit(c, o, "levinson.csv", csv.str());
    o.check("levinson_nondecreasing", monotone ? 1.0 : 0.0, 1.0, monotone);
}

void cmd_kernel(const RunConfig& c, Outcome& o) {
    const JacobiFamily family = make_family(c);
    const std::vector<double> xs = c.x.empty() ? std::vector<double>{0.0} : c.x;
    const KernelRatioReport rep = kernel_ratio_experiment(family, xs, c.n_grid, normalizer_for(c, family));
    std::ostringstream csv;
    csv << "x,n,ratio\n";
    csv.precision(17);
    for (const auto& r : rep.rows) csv << r.x << ',' << r.n << ',' << r.ratio << '\n';
    emit(c, o, "kernel.csv", csv.str());
    o.check("kernel_positive", rep.positive ? 1.0 : 0.0, 1.0, rep.positive);
}

void cmd_stieltjes(const RunConfig& c, Outcome& o) {
    const JacobiFamily family = make_family(c);
    if (c.x.empty()) throw Error(ErrorCode::Config, "stieltjes needs 'x'");
    const DensityModel model = predicted_model(family, c.j_max);
    const ComplexFn g = [&](cplx z) { return limit_g(model, z); };
    const std::vector<double> eps = c.eps.empty() ? default_eps_sequence() : c.eps;
    std::ostringstream csv;
    csv << "x,density,closed_form,abs_err,error_estimate,singular\n";
    csv.precision(17);
    double worst = 0;
    for (double x : c.x) {
        const StieltjesEstimate est = stieltjes_density(g, x, eps);
        const double exact = closed_form_density(model, x);
        const double err = est.singular ? 0.0 : std::abs(est.density - exact);
        if (!est.singular) worst = std::max(worst, err);
        csv << x << ',' << est.density << ',' << exact << ',' << err << ',' << est.error_estimate << ','
            << (est.singular ? 1 : 0) << '\n';
    }
    emit(c, o, "stieltjes.csv", csv.str());
    o.check("stieltjes_abs_err", worst, c.tol, worst <= c.tol);
}

void cmd_gapcount(const RunConfig& c, Outcome& o) {
    const JacobiFamily family = make_family(c);
    if (c.intervals.size() != 1) throw Error(ErrorCode::Config, "gapcount needs exactly one interval");
    const GapCountReport rep = gap_count_experiment(family, c.intervals[0].lo, c.intervals[0].hi, c.n_grid);
    std::ostringstream csv;
    csv << "n,interval_lo,interval_hi,count\n";
    csv.precision(17);
    for (std::size_t k = 0; k < rep.n.size(); ++k) csv << rep.n[k] << ',' << rep.lo << ',' << rep.hi << ',' << rep.counts[k] << '\n';
    emit(c, o, "gapcount.csv", csv.str());
    o.check("gapcount_tail_constant", double(rep.max_count), 0.0, rep.tail_constant);
}

}  // namespace

const std::vector<std::string>& run_commands() {
    static const std::vector<std::string> cmds{"spectrum", "density", "cauchy",    "classify",
                                               "levinson", "kernel",  "stieltjes", "gapcount"};
    return cmds;
}

std::string command_help() {
    return "Outputs (CSV columns):\n"
           "  spectrum   spectrum.csv: index,eigenvalue (+ spectrum.json)\n"
           "  density    density.csv: family,case,n,rho_n,interval_lo,interval_hi,count,normalized,predicted,rel_err\n"
           "  cauchy     cauchy.csv: z_re,z_im,n,rho_n,value_re,value_im,normalized_re,normalized_im,\n"
           "             predicted_re,predicted_im,rel_err\n"
           "  classify   classify.json: case,epsilon,trace0,margin\n"
           "  levinson   levinson.csv: z_re,z_im,j,log_product,lower_bound_sum\n"
           "  kernel     kernel.csv: x,n,ratio\n"
           "  stieltjes  stieltjes.csv: x,density,closed_form,abs_err,error_estimate,singular\n"
           "  gapcount   gapcount.csv: n,interval_lo,interval_hi,count\n"
           "Every run also writes manifest.json. Exit status: 0 all tolerances hold, 1 a tolerance failed,\n"
           "2 config error, 3 numerical refusal.\n";
}

RunConfig default_run_config(const std::string& command) {
    RunConfig c;
    c.command = command;
    return c;
}

RunConfig parse_run_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        // byte offset -> line/column
        std::size_t line = 1, col = 1;
        for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
            if (text[k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw Error(ErrorCode::Config, "config parse error at line " + std::to_string(line) + ", column " +
                                           std::to_string(col) + ": " + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::Config, "config must be a JSON object");
    RunConfig c;
    static const std::vector<std::string> known{"command", "family", "n", "n_grid", "tol", "z", "eps", "x",
                                                "intervals", "normalizer", "rel_tol", "j_max", "M", "out"};
    for (const auto& [k, v] : j.items())
        if (std::find(known.begin(), known.end(), k) == known.end()) field_error(k, "unknown field");
    if (j.contains("command")) c.command = get_field<std::string>(j["command"], "command");
    if (j.contains("family")) {
        const json& f = j["family"];
        if (f.is_string()) {
            c.family = f.get<std::string>();
        } else if (f.is_object()) {
            if (!f.contains("name")) field_error("family", "missing 'name'");
            c.family = get_field<std::string>(f["name"], "family.name");
            for (const auto& [k, v] : f.items()) {
                if (k == "name") continue;
                if (k == "path") c.custom_path = get_field<std::string>(v, "family.path");
                else c.family_options[k] = get_field<double>(v, "family." + k);
            }
        } else {
            field_error("family", "expected a name or an object");
        }
    }
    if (j.contains("n")) c.n = get_field<index_t>(j["n"], "n");
    if (j.contains("n_grid")) c.n_grid = get_field<std::vector<index_t>>(j["n_grid"], "n_grid");
    if (j.contains("tol")) {
        c.tol = get_field<double>(j["tol"], "tol");
        if (!(c.tol > 0)) field_error("tol", "must be > 0");
    }
    if (j.contains("z")) {
        const json& z = j["z"];
        if (z.is_array() && !(z.size() == 2 && z[0].is_number()))
            for (std::size_t k = 0; k < z.size(); ++k) c.z.push_back(z_from_json(z[k], "z[" + std::to_string(k) + "]"));
        else
            c.z.push_back(z_from_json(z, "z"));
    }
    if (j.contains("eps")) c.eps = get_field<std::vector<double>>(j["eps"], "eps");
    if (j.contains("x")) c.x = get_field<std::vector<double>>(j["x"], "x");
    if (j.contains("intervals")) {
        const json& iv = j["intervals"];
        if (!iv.is_array()) field_error("intervals", "expected an array");
        for (std::size_t k = 0; k < iv.size(); ++k) {
            const std::string name = "intervals[" + std::to_string(k) + "]";
            IntervalSpec I{};
            if (iv[k].is_array()) {
                std::tie(I.lo, I.hi) = pair_from_json(iv[k], name);
            } else if (iv[k].is_object()) {
                if (!iv[k].contains("lo") || !iv[k].contains("hi")) field_error(name, "needs 'lo' and 'hi'");
                I.lo = get_field<double>(iv[k]["lo"], name + ".lo");
                I.hi = get_field<double>(iv[k]["hi"], name + ".hi");
                if (iv[k].contains("holes"))
                    for (const json& h : iv[k]["holes"]) I.holes.push_back(pair_from_json(h, name + ".holes"));
            } else {
                field_error(name, "expected [lo, hi] or {lo, hi, holes}");
            }
            c.intervals.push_back(I);
        }
    }
    if (j.contains("normalizer")) c.normalizer = get_field<std::string>(j["normalizer"], "normalizer");
    if (j.contains("rel_tol")) c.rel_tol = get_field<double>(j["rel_tol"], "rel_tol");
    if (j.contains("j_max")) c.j_max = get_field<index_t>(j["j_max"], "j_max");
    if (j.contains("M")) c.M = get_field<index_t>(j["M"], "M");
    if (j.contains("out")) c.out = get_field<std::string>(j["out"], "out");
    return c;
}

void finalize_config(RunConfig& c) {
    if (std::find(run_commands().begin(), run_commands().end(), c.command) == run_commands().end())
        throw Error(ErrorCode::Config, "unknown command '" + c.command + "'");
    if (c.n < 1) field_error("n", "must be >= 1");
    if (c.tol == 0) c.tol = c.command == "stieltjes" ? 1e-6 : 1e-12;
    if (!(c.tol > 0)) field_error("tol", "must be > 0");
    if (!(c.rel_tol > 0)) field_error("rel_tol", "must be > 0");
    if (c.j_max < 1) field_error("j_max", "must be >= 1");
    if (c.M < 0) field_error("M", "must be >= 0");
    if (c.n_grid.empty()) c.n_grid = {c.n};
    for (std::size_t k = 0; k < c.n_grid.size(); ++k)
        if (c.n_grid[k] < 1 || (k > 0 && c.n_grid[k] <= c.n_grid[k - 1]))
            field_error("n_grid", "must be positive and strictly increasing");
    for (double e : c.eps)
        if (!(e > 0)) field_error("eps", "entries must be > 0");
    for (const auto& I : c.intervals)
        if (!(I.lo < I.hi)) field_error("intervals", "need lo < hi");
    if (!c.normalizer.empty()) normalizer_from_name(c.normalizer);
    c.canonical = config_to_json(c).dump();
}

int run(const RunConfig& c, std::ostream& log) {
    Outcome o;
    if (c.command == "spectrum") cmd_spectrum(c, o);
    else if (c.command == "density") cmd_density(c, o);
    else if (c.command == "cauchy") cmd_cauchy(c, o);
    else if (c.command == "classify") cmd_classify(c, o);
    else if (c.command == "levinson") cmd_levinson(c, o);
    else if (c.command == "kernel") cmd_kernel(c, o);
    else if (c.command == "stieltjes") cmd_stieltjes(c, o);
    else if (c.command == "gapcount") cmd_gapcount(c, o);
    else throw Error(ErrorCode::Config, "unknown command '" + c.command + "'");

    json m;
    m["version"] = kVersion;
    m["command"] = c.command;
    m["config"] = json::parse(c.canonical);
    m["config_hash"] = hex64(fnv1a64(c.canonical));
    m["tolerances"] = o.tolerances;
    m["results"] = o.results;
    m["outputs"] = o.files;
    m["pass"] = o.pass;
    write_file_atomic(c.out / "manifest.json", m.dump(2) + "\n");
    for (const auto& f : o.files) log << "wrote " << (c.out / f).string() << '\n';
    for (const auto& [name, r] : o.results.items())
        log << name << " = " << fmt(r["value"].get<double>()) << (r["pass"].get<bool>() ? "  ok" : "  FAILED") << '\n';
    return o.pass ? 0 : 1;
}

}  // namespace jspec
