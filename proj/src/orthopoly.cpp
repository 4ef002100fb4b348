#include "jspec/orthopoly.hpp"

#include "jspec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace jspec {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

// exponent e with max(m) * 2^-e in [1/2, 1)
inline int scale_exponent(double m) {
    int e = 0;
    std::frexp(m, &e);
    return e;
}

}  // namespace

void ScaledPair::renormalize() {
    const double m = std::max(std::abs(u), std::abs(v));
    if (m == 0 || (m >= 0.5 && m < 1.0)) return;
    const int e = scale_exponent(m);
    u = cplx(std::ldexp(u.real(), -e), std::ldexp(u.imag(), -e));
    v = cplx(std::ldexp(v.real(), -e), std::ldexp(v.imag(), -e));
    log_scale += e * kLn2;
}

double KernelDiag::value() const { return std::exp(log_value); }

ScaledPair propagate(const JacobiFamily& family, ScaledPair pair, index_t m, index_t target, cplx z) {
    if (target < m) throw Error(ErrorCode::Domain, "propagate: target before start");
    if (target == m) return pair;
    double a_prev = family.a(m);
    for (index_t k = m + 1; k <= target; ++k) {
        const JacobiParams p = family.params(k);
        const cplx next = ((z - p.b) * pair.v - a_prev * pair.u) / p.a;
        pair.u = pair.v;
        pair.v = next;
        pair.renormalize();
        a_prev = p.a;
    }
    return pair;
}

ScaledPair start_from_eta(const JacobiFamily& family, cplx eta0, cplx eta1, cplx z) {
    const JacobiParams p = family.params(0);
    ScaledPair s{eta1, (-eta0 + (z - p.b) * eta1) / p.a, 0.0};
    s.renormalize();
    return s;
}

ScaledPair second_kind_start(const JacobiFamily& family) {
    ScaledPair s{cplx(0.0), cplx(1.0 / family.a(0)), 0.0};
    s.renormalize();
    return s;
}

ScaledPair eval_pn(const JacobiFamily& family, index_t n, cplx z) {
    if (n < 0) throw Error(ErrorCode::Domain, "eval_pn: n must be >= 0");
    return propagate(family, start_from_eta(family, 0.0, 1.0, z), 0, n, z);
}

ScaledQuad eval_pn_derivative(const JacobiFamily& family, index_t n, cplx z) {
    if (n < 0) throw Error(ErrorCode::Domain, "eval_pn_derivative: n must be >= 0");
    const JacobiParams p0 = family.params(0);
    ScaledQuad q{cplx(1.0), (z - p0.b) / p0.a, cplx(0.0), cplx(1.0 / p0.a), 0.0};
    double a_prev = p0.a;
    for (index_t k = 1; k <= n; ++k) {
        const JacobiParams p = family.params(k);
        const cplx next = ((z - p.b) * q.p_next - a_prev * q.p) / p.a;
        const cplx dnext = ((z - p.b) * q.dp_next + q.p_next - a_prev * q.dp) / p.a;
        q.p = q.p_next;
        q.p_next = next;
        q.dp = q.dp_next;
        q.dp_next = dnext;
        a_prev = p.a;
        const double m = std::max({std::abs(q.p), std::abs(q.p_next), std::abs(q.dp), std::abs(q.dp_next)});
        if (m != 0 && (m < 0.5 || m >= 2.0)) {
            const int e = scale_exponent(m);
            const double f = std::ldexp(1.0, -e);
            q.p *= f;
            q.p_next *= f;
            q.dp *= f;
            q.dp_next *= f;
            q.log_scale += e * kLn2;
        }
    }
    return q;
}

KernelDiag cd_kernel_diag(const JacobiFamily& family, index_t n, double x) {
    if (n < 0) throw Error(ErrorCode::Domain, "cd_kernel_diag: n must be >= 0");
    // u = p_{k-1}, v = p_k in units of exp(L); sum in units of exp(2L)
    const JacobiParams p0 = family.params(0);
    double u = 1.0, v = (x - p0.b) / p0.a, L = 0.0;
    double sum = 1.0;
    if (n == 0) return {0.0};
    sum += v * v;
    double a_prev = p0.a;
    for (index_t k = 1; k < n; ++k) {
        const JacobiParams p = family.params(k);
        const double next = ((x - p.b) * v - a_prev * u) / p.a;
        u = v;
        v = next;
        a_prev = p.a;
        const double m = std::max(std::abs(u), std::abs(v));
        if (m != 0 && (m < 0.5 || m >= 2.0)) {
            const int e = scale_exponent(m);
            u = std::ldexp(u, -e);
            v = std::ldexp(v, -e);
            sum = std::ldexp(sum, -2 * e);
            L += e * kLn2;
        }
        sum += v * v;
    }
    return {std::log(sum) + 2 * L};
}

double cd_kernel_ratio(const JacobiFamily& family, index_t n, double x, NormalizerKind kind) {
    return std::exp(cd_kernel_diag(family, n, x).log_value - std::log(rho(family, kind, n)));
}

QuadratureRule gauss_quadrature(const JacobiFamily& family, index_t n, const SolverConfig& config) {
    if (n < 0) throw Error(ErrorCode::Domain, "gauss_quadrature: n must be >= 0");
    QuadratureRule rule;
    rule.n = n;
    rule.nodes = eigenvalues(family, n + 1, 1e-15, config).eigenvalues;
    for (double y : rule.nodes) rule.weights.push_back(1.0 / cd_kernel_diag(family, n, y).value());
    return rule;
}

void write_quadrature_csv(std::ostream& out, const QuadratureRule& rule) {
    out << "node,weight\n" << std::setprecision(17);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) out << rule.nodes[i] << ',' << rule.weights[i] << '\n';
}

cplx wronskian(const ScaledPair& u, const ScaledPair& v, double a_m) {
    return a_m * (u.u * v.v - u.v * v.u) * std::exp(u.log_scale + v.log_scale);
}

index_t default_n_back(index_t n_out) { return 4 * n_out + 200; }

namespace {

// u_0..u_{n_out} by backward recurrence from (u_{n_back}, u_{n_back+1}) = (1, 0), relative to u_0.
std::vector<ScaledValue> backward_run(const JacobiFamily& family, cplx z, index_t n_back, index_t n_out) {
    std::vector<ScaledValue> out(n_out + 1);
    // pair holds (u_k, u_{k+1})
    ScaledPair pair{cplx(1.0), cplx(0.0), 0.0};
    double a_k = family.a(n_back);
    auto record = [&](index_t k) {
        if (k <= n_out) out[k] = {pair.u, pair.log_scale};
    };
    record(n_back);
    for (index_t k = n_back; k >= 1; --k) {
        const JacobiParams p = family.params(k);
        const double a_km1 = family.a(k - 1);
        a_k = p.a;
        const cplx prev = ((z - p.b) * pair.u - a_k * pair.v) / a_km1;
        pair.v = pair.u;
        pair.u = prev;
        pair.renormalize();
        record(k - 1);
    }
    const ScaledValue u0 = out[0];
    for (auto& s : out) {
        s.mantissa /= u0.mantissa;
        s.log_scale -= u0.log_scale;
    }
    return out;
}

}  // namespace

MinimalSolution minimal_solution(const JacobiFamily& family, cplx z, index_t n_back, index_t n_out, double tol) {
    if (z.imag() == 0) throw Error(ErrorCode::Domain, "minimal_solution: z must be off the real axis");
    if (n_out < 0 || n_back <= n_out) throw Error(ErrorCode::Domain, "minimal_solution: need n_back > n_out >= 0");
    MinimalSolution sol;
    sol.n_back = n_back;
    sol.values = backward_run(family, z, n_back, n_out);
    const std::vector<ScaledValue> check = backward_run(family, z, 2 * n_back, n_out);
    double worst = 0;
    for (index_t k = 0; k <= n_out; ++k) {
        const cplx ratio = sol.values[k].mantissa / check[k].mantissa *
                           std::exp(sol.values[k].log_scale - check[k].log_scale);
        worst = std::max(worst, std::abs(ratio - 1.0));
    }
    sol.stability = worst;
    sol.unstable = !(worst <= tol);
    return sol;
}

}  // namespace jspec
