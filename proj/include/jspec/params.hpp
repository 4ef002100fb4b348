#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace jspec {

using index_t = std::int64_t;

struct PeriodicBase {
    int N = 1;
    std::vector<double> alpha;
    std::vector<double> beta;

    std::size_t wrap(index_t n) const {
        index_t r = n % N;
        return static_cast<std::size_t>(r < 0 ? r + N : r);
    }
    double alpha_at(index_t n) const { return alpha[wrap(n)]; }
    double beta_at(index_t n) const { return beta[wrap(n)]; }

    // throws Error(Config) when N, alpha or beta are inconsistent
    void validate() const;
};

struct JacobiParams {
    double a;
    double b;
};

class JacobiFamily {
public:
    using ParamFn = std::function<JacobiParams(index_t)>;
    using GammaFn = std::function<double(index_t)>;

    JacobiFamily(std::string name, ParamFn param_fn, PeriodicBase base, GammaFn gamma_fn = {},
                 std::map<std::string, double> options = {});

    const std::string& name() const { return name_; }
    const PeriodicBase& base() const { return base_; }
    const std::map<std::string, double>& options() const { return options_; }

    JacobiParams params(index_t n) const;
    double a(index_t n) const { return params(n).a; }
    double b(index_t n) const { return params(n).b; }

    bool has_gamma() const { return static_cast<bool>(gamma_fn_); }
    double gamma(index_t n) const;

private:
    std::string name_;
    ParamFn param_fn_;
    PeriodicBase base_;
    GammaFn gamma_fn_;
    std::map<std::string, double> options_;
};

// chebyshev, hermite, synthetic_iia, laguerre, meixner (options c, beta0)
JacobiFamily builtin_family(const std::string& name, const std::map<std::string, double>& options = {});

JacobiFamily custom_family(std::string name, JacobiFamily::ParamFn param_fn, PeriodicBase base,
                           JacobiFamily::GammaFn gamma_fn = {});

// Tables from JSON text / file. Keys: name, N, alpha, beta, a, b, gamma (optional),
// extension ("last_ratio" default, "linear", "none").
JacobiFamily custom_family_from_json(const std::string& json_text);
JacobiFamily load_custom_family(const std::string& path);

enum class NormalizerKind { SumAlphaOverA, SumSqrtAlphaGammaOverA, Count };

const char* normalizer_name(NormalizerKind kind);
NormalizerKind normalizer_from_name(const std::string& name);

double rho(const JacobiFamily& family, NormalizerKind kind, index_t n);
// rho_0..rho_{n_max}
std::vector<double> rho_sequence(const JacobiFamily& family, NormalizerKind kind, index_t n_max);

double carleman_partial_sum(const JacobiFamily& family, index_t n);

struct CarlemanDiagnostic {
    std::vector<index_t> n;
    std::vector<double> partial_sums;
    double growth_exponent;  // least-squares slope of log S_n against log n
};
CarlemanDiagnostic carleman_growth(const JacobiFamily& family, const std::vector<index_t>& n_grid);

std::vector<double> stolz_d1N_diagnostic(const std::function<double(index_t)>& seq, int N, index_t n_max);

struct ModulationResidual {
    double ratio;  // |a_{n-1}/a_n - alpha_{n-1}/alpha_n|
    double shift;  // |b_n/a_n - beta_n/alpha_n|
};
ModulationResidual modulation_residual(const JacobiFamily& family, index_t n);

}  // namespace jspec
