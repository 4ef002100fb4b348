#include "jspec/params.hpp"

#include "jspec/errors.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

namespace jspec {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::Config: return "ConfigError";
        case ErrorCode::Domain: return "DomainError";
        case ErrorCode::DegenerateDiscriminant: return "DegenerateDiscriminant";
        case ErrorCode::NegativeDeterminantRay: return "NegativeDeterminantRay";
        case ErrorCode::ZeroUpperRight: return "ZeroUpperRight";
        case ErrorCode::SingularFrame: return "SingularFrame";
        case ErrorCode::NonConvergent: return "NonConvergent";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::Diagnostic: return "DiagnosticFailure";
    }
    return "Error";
}

void PeriodicBase::validate() const {
    if (N < 1) throw Error(ErrorCode::Config, "period N must be positive");
    if (alpha.size() != static_cast<std::size_t>(N) || beta.size() != static_cast<std::size_t>(N))
        throw Error(ErrorCode::Config, "alpha and beta must have exactly N entries");
    for (double v : alpha)
        if (!(v > 0)) throw Error(ErrorCode::Config, "alpha entries must be positive");
    for (double v : beta)
        if (!std::isfinite(v)) throw Error(ErrorCode::Config, "beta entries must be finite");
}

JacobiFamily::JacobiFamily(std::string name, ParamFn param_fn, PeriodicBase base, GammaFn gamma_fn,
                           std::map<std::string, double> options)
    : name_(std::move(name)),
      param_fn_(std::move(param_fn)),
      base_(std::move(base)),
      gamma_fn_(std::move(gamma_fn)),
      options_(std::move(options)) {
    base_.validate();
    if (!param_fn_) throw Error(ErrorCode::Config, "family '" + name_ + "' has no parameter map");
}

JacobiParams JacobiFamily::params(index_t n) const {
    if (n < 0) throw Error(ErrorCode::Domain, "negative parameter index");
    JacobiParams p = param_fn_(n);
    if (!(p.a > 0)) throw Error(ErrorCode::Domain, "a_n must be positive (family " + name_ + ")");
    return p;
}

double JacobiFamily::gamma(index_t n) const {
    if (!gamma_fn_) throw Error(ErrorCode::Config, "family '" + name_ + "' has no tempering sequence gamma");
    double g = gamma_fn_(n);
    if (!(g > 0)) throw Error(ErrorCode::Domain, "gamma_n must be positive");
    return g;
}

JacobiFamily builtin_family(const std::string& name, const std::map<std::string, double>& options) {
    auto opt = [&](const char* key, double fallback) {
        auto it = options.find(key);
        return it == options.end() ? fallback : it->second;
    };
    if (name == "chebyshev") {
        return JacobiFamily(name, [](index_t) { return JacobiParams{0.5, 0.0}; }, PeriodicBase{1, {0.5}, {0.0}});
    }
    if (name == "hermite") {
        return JacobiFamily(name, [](index_t n) { return JacobiParams{std::sqrt((n + 1) / 2.0), 0.0}; },
                            PeriodicBase{1, {1.0}, {0.0}});
    }
    if (name == "synthetic_iia") {
        return JacobiFamily(name, [](index_t n) { return JacobiParams{double(n + 1), 0.0}; },
                            PeriodicBase{2, {1.0, 1.0}, {0.0, 0.0}});
    }
    if (name == "laguerre") {
        return JacobiFamily(name, [](index_t n) { return JacobiParams{double(n + 1), double(2 * n + 1)}; },
                            PeriodicBase{1, {1.0}, {2.0}}, [](index_t n) { return double(n + 1); });
    }
    if (name == "meixner") {
        const double c = opt("c", 0.5);
        const double beta0 = opt("beta0", 1.0);
        if (!(c > 0 && c < 1)) throw Error(ErrorCode::Config, "meixner requires 0 < c < 1");
        if (!(beta0 > 0)) throw Error(ErrorCode::Config, "meixner requires beta0 > 0");
        auto fn = [c, beta0](index_t n) {
            const double nn = double(n);
            return JacobiParams{std::sqrt(c * (nn + 1) * (nn + beta0)) / (1 - c),
                                ((1 + c) * nn + beta0 * c) / (1 - c)};
        };
        return JacobiFamily(name, fn, PeriodicBase{1, {1.0}, {(1 + c) / std::sqrt(c)}}, {},
                            {{"c", c}, {"beta0", beta0}});
    }
    if (name == "custom")
        throw Error(ErrorCode::Config, "custom families need tables: use custom_family or a JSON file");
    throw Error(ErrorCode::Config, "unknown family '" + name + "'");
}

JacobiFamily custom_family(std::string name, JacobiFamily::ParamFn param_fn, PeriodicBase base,
                           JacobiFamily::GammaFn gamma_fn) {
    return JacobiFamily(std::move(name), std::move(param_fn), std::move(base), std::move(gamma_fn));
}

namespace {

enum class Extension { None, LastRatio, Linear };

struct Tables {
    std::vector<double> a, b, gamma;
    int N;
    Extension ext;

    // last tabulated index in residue class of n
    index_t last_in_class(index_t n) const {
        const index_t L = index_t(a.size()) - 1;
        const index_t r = n % N;
        return L - ((L - r) % N + N) % N;
    }

    JacobiParams at(index_t n) const {
        if (n < index_t(a.size())) return {a[n], b[n]};
        const index_t m = last_in_class(n);
        const double steps = double((n - m) / N);
        switch (ext) {
            case Extension::None:
                throw Error(ErrorCode::Domain, "index beyond custom table and extension is 'none'");
            case Extension::LastRatio: {
                const double q = a[m] / a[m - N];
                const double an = a[m] * std::pow(q, steps);
                return {an, an * (b[m] / a[m])};
            }
            case Extension::Linear: {
                const double an = a[m] + steps * (a[m] - a[m - N]);
                const double bn = b[m] + steps * (b[m] - b[m - N]);
                if (!(an > 0)) throw Error(ErrorCode::Domain, "linear extension produced a_n <= 0");
                return {an, bn};
            }
        }
        return {a[m], b[m]};
    }

    double gamma_at(index_t n) const {
        if (n < index_t(gamma.size())) return gamma[n];
        const index_t m = last_in_class(n);
        switch (ext) {
            case Extension::None:
                throw Error(ErrorCode::Domain, "index beyond custom table and extension is 'none'");
            case Extension::LastRatio:
                return at(n).a * (gamma[m] / a[m]);
            case Extension::Linear: {
                const double steps = double((n - m) / N);
                return gamma[m] + steps * (gamma[m] - gamma[m - N]);
            }
        }
        return gamma[m];
    }
};

std::vector<double> number_list(const nlohmann::json& doc, const char* key, bool required) {
    if (!doc.contains(key)) {
        if (required) throw Error(ErrorCode::Config, std::string("custom family: missing field '") + key + "'");
        return {};
    }
    const auto& arr = doc.at(key);
    if (!arr.is_array()) throw Error(ErrorCode::Config, std::string("custom family: field '") + key + "' must be an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number())
            throw Error(ErrorCode::Config, std::string("custom family: field '") + key + "[" + std::to_string(i) +
                                               "]' is not a number");
        out.push_back(arr[i].get<double>());
    }
    return out;
}

}  // namespace

JacobiFamily custom_family_from_json(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::Config, std::string("custom family: ") + e.what());
    }
    auto tables = std::make_shared<Tables>();
    const std::string name = doc.value("name", std::string("custom"));
    if (!doc.contains("N") || !doc.at("N").is_number_integer())
        throw Error(ErrorCode::Config, "custom family: field 'N' must be an integer");
    PeriodicBase base{doc.at("N").get<int>(), number_list(doc, "alpha", true), number_list(doc, "beta", true)};
    base.validate();
    tables->N = base.N;
    tables->a = number_list(doc, "a", true);
    tables->b = number_list(doc, "b", true);
    tables->gamma = number_list(doc, "gamma", false);
    if (tables->a.empty() || tables->a.size() != tables->b.size())
        throw Error(ErrorCode::Config, "custom family: 'a' and 'b' must be non-empty and of equal length");
    for (std::size_t i = 0; i < tables->a.size(); ++i)
        if (!(tables->a[i] > 0))
            throw Error(ErrorCode::Config, "custom family: a[" + std::to_string(i) + "] must be positive");
    if (!tables->gamma.empty()) {
        if (tables->gamma.size() != tables->a.size())
            throw Error(ErrorCode::Config, "custom family: 'gamma' must match the length of 'a'");
        for (double g : tables->gamma)
            if (!(g > 0)) throw Error(ErrorCode::Config, "custom family: gamma entries must be positive");
    }
    const std::string ext = doc.value("extension", std::string("last_ratio"));
    if (ext == "last_ratio") tables->ext = Extension::LastRatio;
    else if (ext == "linear") tables->ext = Extension::Linear;
    else if (ext == "none") tables->ext = Extension::None;
    else throw Error(ErrorCode::Config, "custom family: unknown extension rule '" + ext + "'");
    if (tables->ext != Extension::None && tables->a.size() < std::size_t(2 * base.N))
        throw Error(ErrorCode::Config, "custom family: extension needs at least 2N tabulated entries");

    JacobiFamily::GammaFn gamma_fn;
    if (!tables->gamma.empty()) gamma_fn = [tables](index_t n) { return tables->gamma_at(n); };
    return JacobiFamily(name, [tables](index_t n) { return tables->at(n); }, base, gamma_fn);
}

JacobiFamily load_custom_family(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Config, "cannot open custom family file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return custom_family_from_json(ss.str());
}

const char* normalizer_name(NormalizerKind kind) {
    switch (kind) {
        case NormalizerKind::SumAlphaOverA: return "sum_alpha_over_a";
        case NormalizerKind::SumSqrtAlphaGammaOverA: return "sum_sqrt_alpha_gamma_over_a";
        case NormalizerKind::Count: return "count";
    }
    return "?";
}

NormalizerKind normalizer_from_name(const std::string& name) {
    if (name == "sum_alpha_over_a") return NormalizerKind::SumAlphaOverA;
    if (name == "sum_sqrt_alpha_gamma_over_a") return NormalizerKind::SumSqrtAlphaGammaOverA;
    if (name == "count") return NormalizerKind::Count;
    throw Error(ErrorCode::Config, "unknown normalizer '" + name + "'");
}

namespace {

double rho_term(const JacobiFamily& family, NormalizerKind kind, index_t k) {
    switch (kind) {
        case NormalizerKind::SumAlphaOverA: return family.base().alpha_at(k) / family.a(k);
        case NormalizerKind::SumSqrtAlphaGammaOverA:
            return std::sqrt(family.base().alpha_at(k) * family.gamma(k)) / family.a(k);
        case NormalizerKind::Count: return 1.0;
    }
    return 0.0;
}

}  // namespace

std::vector<double> rho_sequence(const JacobiFamily& family, NormalizerKind kind, index_t n_max) {
    if (n_max < 0) throw Error(ErrorCode::Domain, "rho: n must be >= 0");
    if (kind == NormalizerKind::SumSqrtAlphaGammaOverA && !family.has_gamma())
        throw Error(ErrorCode::Config, "rho: tempered normalizer needs gamma for family '" + family.name() + "'");
    std::vector<double> out(static_cast<std::size_t>(n_max + 1));
    double s = 0;
    for (index_t k = 0; k <= n_max; ++k) {
        s += rho_term(family, kind, k);
        out[k] = s;
    }
    return out;
}

double rho(const JacobiFamily& family, NormalizerKind kind, index_t n) {
    if (kind == NormalizerKind::Count) {
        if (n < 0) throw Error(ErrorCode::Domain, "rho: n must be >= 0");
        return double(n + 1);
    }
    return rho_sequence(family, kind, n).back();
}

double carleman_partial_sum(const JacobiFamily& family, index_t n) {
    double s = 0;
    for (index_t k = 0; k <= n; ++k) s += 1.0 / family.a(k);
    return s;
}

CarlemanDiagnostic carleman_growth(const JacobiFamily& family, const std::vector<index_t>& n_grid) {
    CarlemanDiagnostic out;
    if (n_grid.empty()) return out;
    double s = 0;
    index_t k = 0;
    for (index_t n : n_grid) {
        for (; k <= n; ++k) s += 1.0 / family.a(k);
        out.n.push_back(n);
        out.partial_sums.push_back(s);
    }
    // slope of log S against log n
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < out.n.size(); ++i) {
        if (out.n[i] < 1) continue;
        const double x = std::log(double(out.n[i])), y = std::log(out.partial_sums[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y; ++m;
    }
    const double den = m * sxx - sx * sx;
    out.growth_exponent = (m >= 2 && den > 0) ? (m * sxy - sx * sy) / den : 0.0;
    return out;
}

std::vector<double> stolz_d1N_diagnostic(const std::function<double(index_t)>& seq, int N, index_t n_max) {
    if (N < 1) throw Error(ErrorCode::Domain, "stolz: N must be positive");
    if (n_max < 2 * index_t(N)) throw Error(ErrorCode::Domain, "stolz: n_max must be at least 2N");
    std::vector<double> out(N, 0.0);
    for (index_t m = 1; m + N <= n_max; ++m) out[m % N] += std::abs(seq(m + N) - seq(m));
    return out;
}

ModulationResidual modulation_residual(const JacobiFamily& family, index_t n) {
    if (n < 1) throw Error(ErrorCode::Domain, "modulation residual needs n >= 1");
    const auto& base = family.base();
    const JacobiParams p = family.params(n);
    const double ratio = family.a(n - 1) / p.a - base.alpha_at(n - 1) / base.alpha_at(n);
    const double shift = p.b / p.a - base.beta_at(n) / base.alpha_at(n);
    return {std::abs(ratio), std::abs(shift)};
}

}  // namespace jspec
