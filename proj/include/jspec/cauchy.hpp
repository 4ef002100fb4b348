#pragma once

#include "jspec/orthopoly.hpp"
#include "jspec/spectra.hpp"
#include "jspec/transfer.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace jspec {

using ComplexFn = std::function<cplx(cplx)>;

struct CauchySample {
    cplx z;
    cplx value;  // C[nu_n](z)
    index_t n;
    double normalizer;  // rho_n
    cplx normalized() const { return value / normalizer; }
};

cplx cauchy_discrete(const SpectrumResult& spec, cplx z);
// -p'_{n+1}(z) / p_{n+1}(z) = C[nu_n](z), nu_n the eigenvalues of A_{n+1}
cplx cauchy_via_logderiv(const JacobiFamily& family, index_t n, cplx z);
CauchySample cauchy_sample(const JacobiFamily& family, index_t n, cplx z, NormalizerKind kind);

struct DensityModel {
    SpectralCase variant = SpectralCase::Undecided;
    int N = 1;
    double alpha_last = 1;
    double trace_derivative = 0;  // tr X'_0(0)
    double discr0 = 0;            // discr X_0(0)
    double level = 0;             // case I constant density
    std::vector<double> h;        // c0 + c1 x + c2 x^2 (cases IIa, IIb)
    std::vector<std::pair<double, double>> lambda_minus;  // {h < 0}, possibly unbounded
    double norm_const = 0;
    NormalizerKind normalizer = NormalizerKind::SumAlphaOverA;
};

DensityModel model_case_i(const PeriodicBase& base);
DensityModel model_from_h(const PeriodicBase& base, SpectralCase variant, std::vector<double> h);
// classify + h_estimate on a fixed real grid when needed
DensityModel predicted_model(const JacobiFamily& family, index_t j_max = 100000);

cplx limit_g(const DensityModel& model, cplx z);
double closed_form_density(const DensityModel& model, double x);
// integral of the model density over [lo, hi] from closed-form antiderivatives
double model_mass(const DensityModel& model, double lo, double hi);

struct OmegaTilde {
    cplx z0;
    ComplexFn g;
    double mass_bound;  // Im g(z0) / y0
};

OmegaTilde make_omega_tilde(ComplexFn g, cplx z0);
cplx omega_tilde_transform(const OmegaTilde& ot, cplx z);
// estimate of the total mass lim_{y->inf} -i y C(i y)
double omega_tilde_total_mass(const OmegaTilde& ot, double y_large = 1e7);

struct StieltjesEstimate {
    std::vector<double> eps;
    std::vector<double> values;  // (1/pi) Im g(x + i eps)
    double density;              // extrapolated to eps = 0 (inf when singular)
    double error_estimate;
    bool singular;
    double atom_mass;  // lim (x - z) g(z), meaningful when singular
};

std::vector<double> default_eps_sequence();
StieltjesEstimate stieltjes_density(const ComplexFn& g, double x, const std::vector<double>& eps_seq = default_eps_sequence());

enum class KnownMeasure { ChebyshevU, Hermite, Laguerre };
KnownMeasure known_measure_for(const JacobiFamily& family);

struct EtaTransform {
    cplx value;
    double error_estimate;
    bool converged;
};
// sum_{k<=n} int p_k(x)^2 / (x - z) dmu(x)
EtaTransform eta_cauchy(const JacobiFamily& family, index_t n, cplx z, double tol = 1e-10);

struct GapResult {
    double gap;    // |C[nu_n](z) - C[eta_n](z)|
    double bound;  // 8 / |Im z|
    double shift_gap;    // |C[eta_{n+L}](z) - C[eta_n](z)|
    double shift_bound;  // L / |Im z|
    double quadrature_error;
    bool quadrature_ok;
};
GapResult kernel_measure_gap(const JacobiFamily& family, index_t n, index_t L, cplx z);

}  // namespace jspec
