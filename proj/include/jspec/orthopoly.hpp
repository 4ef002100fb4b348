#pragma once

#include "jspec/params.hpp"
#include "jspec/spectra.hpp"

#include <complex>
#include <iosfwd>
#include <vector>

namespace jspec {

using cplx = std::complex<double>;

// (u_n, u_{n+1}) = (u, v) * exp(log_scale)
struct ScaledPair {
    cplx u{1.0, 0.0};
    cplx v{0.0, 0.0};
    double log_scale = 0;

    cplx true_u() const { return u * std::exp(log_scale); }
    cplx true_v() const { return v * std::exp(log_scale); }
    // brings max(|u|,|v|) into [1/2, 1) by an exact power of two
    void renormalize();
};

struct ScaledValue {
    cplx mantissa;
    double log_scale = 0;
    cplx value() const { return mantissa * std::exp(log_scale); }
};

// (p_n, p_{n+1}, p'_n, p'_{n+1}) sharing one log_scale
struct ScaledQuad {
    cplx p, p_next, dp, dp_next;
    double log_scale = 0;
};

ScaledPair eval_pn(const JacobiFamily& family, index_t n, cplx z);
ScaledQuad eval_pn_derivative(const JacobiFamily& family, index_t n, cplx z);

// Advance a solution of the recurrence (valid for indices >= 1) from the pair at index m
// to the pair at index target >= m.
ScaledPair propagate(const JacobiFamily& family, ScaledPair pair, index_t m, index_t target, cplx z);

// Pair at index 0 of the generalized eigenvector started from eta = (u_{-1}, u_0):
// returns (u_0, u_1) with u_1 = (-eta_0 + (z - b_0) eta_1) / a_0.
ScaledPair start_from_eta(const JacobiFamily& family, cplx eta0, cplx eta1, cplx z);

// Second-kind start (q_0, q_1) = (0, 1/a_0).
ScaledPair second_kind_start(const JacobiFamily& family);

struct KernelDiag {
    double log_value;
    double value() const;
};

KernelDiag cd_kernel_diag(const JacobiFamily& family, index_t n, double x);
double cd_kernel_ratio(const JacobiFamily& family, index_t n, double x, NormalizerKind kind);

struct QuadratureRule {
    index_t n = 0;
    std::vector<double> nodes;
    std::vector<double> weights;
};

QuadratureRule gauss_quadrature(const JacobiFamily& family, index_t n, const SolverConfig& config = {});
void write_quadrature_csv(std::ostream& out, const QuadratureRule& rule);

// a_m (u_m v_{m+1} - u_{m+1} v_m) for pairs (u_m, u_{m+1}), (v_m, v_{m+1}); constant in m.
cplx wronskian(const ScaledPair& u, const ScaledPair& v, double a_m);

struct MinimalSolution {
    index_t n_back = 0;
    std::vector<ScaledValue> values;  // u_0 .. u_{n_out}, u_0 = 1
    double stability = 0;             // max relative change when n_back is doubled
    bool unstable = false;
};

index_t default_n_back(index_t n_out);
MinimalSolution minimal_solution(const JacobiFamily& family, cplx z, index_t n_back, index_t n_out,
                                 double tol = 1e-10);

}  // namespace jspec
