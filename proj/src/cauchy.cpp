#include "jspec/cauchy.hpp"

#include "jspec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace jspec {

using std::numbers::pi;

cplx cauchy_discrete(const SpectrumResult& spec, cplx z) {
    if (z.imag() == 0) throw Error(ErrorCode::Domain, "Cauchy transform needs Im z != 0");
    cplx s = 0.0;
    for (double y : spec.eigenvalues) s += 1.0 / (y - z);
    return s;
}

cplx cauchy_via_logderiv(const JacobiFamily& family, index_t n, cplx z) {
    if (z.imag() == 0) throw Error(ErrorCode::Domain, "Cauchy transform needs Im z != 0");
    const ScaledQuad q = eval_pn_derivative(family, n, z);
    return -q.dp_next / q.p_next;
}

CauchySample cauchy_sample(const JacobiFamily& family, index_t n, cplx z, NormalizerKind kind) {
    return {z, cauchy_via_logderiv(family, n, z), n, rho(family, kind, n)};
}

namespace {

std::vector<std::pair<double, double>> negative_set(const std::vector<double>& h) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double c0 = h.size() > 0 ? h[0] : 0, c1 = h.size() > 1 ? h[1] : 0, c2 = h.size() > 2 ? h[2] : 0;
    std::vector<std::pair<double, double>> out;
    if (c2 != 0) {
        const double d = c1 * c1 - 4 * c2 * c0;
        if (d <= 0) {
            if (c2 < 0) {
                if (d == 0) {
                    const double r = -c1 / (2 * c2);
                    out = {{-inf, r}, {r, inf}};
                } else {
                    out = {{-inf, inf}};
                }
            }
            return out;
        }
        // stable roots
        const double q = -0.5 * (c1 + std::copysign(std::sqrt(d), c1));
        double r1 = q / c2, r2 = c0 / q;
        if (q == 0) r1 = r2 = 0;
        if (r1 > r2) std::swap(r1, r2);
        if (c2 < 0) out = {{-inf, r1}, {r2, inf}};
        else out = {{r1, r2}};
        return out;
    }
    if (c1 != 0) {
        const double r = -c0 / c1;
        out = c1 < 0 ? std::vector<std::pair<double, double>>{{r, inf}} : std::vector<std::pair<double, double>>{{-inf, r}};
        return out;
    }
    if (c0 < 0) out = {{-inf, inf}};
    return out;
}

}  // namespace

DensityModel model_case_i(const PeriodicBase& base) {
    const CaseClass cc = classify_base(base);
    if (cc.variant != SpectralCase::I) throw Error(ErrorCode::Domain, "base is not in case I");
    DensityModel m;
    m.variant = SpectralCase::I;
    m.N = base.N;
    m.alpha_last = base.alpha_at(base.N - 1);
    const Mat2C X0 = periodic_X(base, 0, 0.0);
    m.trace_derivative = periodic_X_derivative(base, 0, 0.0).trace().real();
    m.discr0 = X0.discr().real();
    m.level = std::abs(m.trace_derivative) / (pi * m.N * std::sqrt(-m.discr0));
    m.normalizer = NormalizerKind::SumAlphaOverA;
    return m;
}

DensityModel model_from_h(const PeriodicBase& base, SpectralCase variant, std::vector<double> h) {
    if (variant != SpectralCase::IIa && variant != SpectralCase::IIb)
        throw Error(ErrorCode::Domain, "model_from_h needs case IIa or IIb");
    DensityModel m;
    m.variant = variant;
    m.N = base.N;
    m.alpha_last = base.alpha_at(base.N - 1);
    m.trace_derivative = periodic_X_derivative(base, 0, 0.0).trace().real();
    m.discr0 = periodic_X(base, 0, 0.0).discr().real();
    h.resize(3, 0.0);
    m.h = h;
    m.lambda_minus = negative_set(m.h);
    if (variant == SpectralCase::IIa) {
        m.norm_const = 1.0 / (4 * pi * m.N * m.alpha_last);
        m.normalizer = NormalizerKind::SumAlphaOverA;
    } else {
        m.norm_const = std::sqrt(m.alpha_last) * std::abs(m.trace_derivative) / (pi * m.N);
        m.normalizer = NormalizerKind::SumSqrtAlphaGammaOverA;
    }
    return m;
}

DensityModel predicted_model(const JacobiFamily& family, index_t j_max) {
    const CaseClass cc = classify(family);
    if (cc.variant == SpectralCase::I) return model_case_i(family.base());
    if (cc.variant != SpectralCase::IIa && cc.variant != SpectralCase::IIb)
        throw Error(ErrorCode::Domain, std::string("no limiting density model for case ") + case_name(cc.variant));
    std::vector<cplx> grid;
    for (double x : {-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0}) grid.emplace_back(x, 0.0);
    const HEstimate h = h_estimate(family, grid, j_max);
    return model_from_h(family.base(), cc.variant, h.poly_fit);
}

cplx limit_g(const DensityModel& m, cplx z) {
    if (!(z.imag() > 0)) throw Error(ErrorCode::Domain, "limit_g is evaluated in the upper half-plane");
    switch (m.variant) {
        case SpectralCase::I:
            return {0.0, pi * m.level};
        case SpectralCase::IIa:
        case SpectralCase::IIb: {
            const cplx hz = poly_eval(m.h, z);
            if (hz.imag() == 0 && hz.real() <= 0)
                throw Error(ErrorCode::Domain, "h(z) lies on the branch cut of the square root");
            const double c = m.variant == SpectralCase::IIa ? 1.0 / (4 * m.N * m.alpha_last)
                                                            : 1.0 / (4 * m.N * std::sqrt(m.alpha_last));
            return -c * poly_derivative(m.h, z) / std::sqrt(hz);
        }
        default:
            throw Error(ErrorCode::Domain, "limit_g needs case I, IIa or IIb");
    }
}

double closed_form_density(const DensityModel& m, double x) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (m.variant) {
        case SpectralCase::I:
            return m.level;
        case SpectralCase::IIa: {
            const double hx = poly_eval(m.h, x).real();
            const double dh = poly_derivative(m.h, x).real();
            if (hx < 0) return m.norm_const * std::abs(dh) / std::sqrt(-hx);
            if (hx == 0) return dh == 0 ? 0.0 : inf;
            return 0.0;
        }
        case SpectralCase::IIb: {
            const double hx = poly_eval(m.h, x).real();
            if (hx < 0) return m.norm_const / std::sqrt(-hx);
            if (hx == 0) return inf;
            return 0.0;
        }
        default:
            throw Error(ErrorCode::Domain, "closed_form_density needs case I, IIa or IIb");
    }
}

double model_mass(const DensityModel& m, double lo, double hi) {
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw Error(ErrorCode::Domain, "model_mass needs a finite interval lo <= hi");
    if (m.variant == SpectralCase::I) return m.level * (hi - lo);
    if (m.variant != SpectralCase::IIa && m.variant != SpectralCase::IIb)
        throw Error(ErrorCode::Domain, "model_mass needs case I, IIa or IIb");
    // breakpoints: ends of Lambda_- and the critical point of h
    std::vector<double> cuts{lo, hi};
    for (const auto& [a, b] : m.lambda_minus) {
        if (a > lo && a < hi) cuts.push_back(a);
        if (b > lo && b < hi) cuts.push_back(b);
    }
    if (m.h[2] != 0) {
        const double xc = -m.h[1] / (2 * m.h[2]);
        if (xc > lo && xc < hi) cuts.push_back(xc);
    }
    std::sort(cuts.begin(), cuts.end());
    auto G = [&](double x) { return 2 * std::sqrt(std::max(0.0, -poly_eval(m.h, x).real())); };
    // antiderivative of 1/sqrt(-h) for quadratic h, monotone on each side of the critical point
    auto F = [&](double x) {
        const double c2 = m.h[2], xc = -m.h[1] / (2 * c2);
        const double k = -poly_eval(m.h, xc).real();  // -h = -c2 (x - xc)^2 + k
        const double s = std::sqrt(std::abs(c2)), t = x - xc;
        if (c2 > 0) return std::asin(std::clamp(t / std::sqrt(k / c2), -1.0, 1.0)) / s;
        if (k > 0) return std::asinh(t / std::sqrt(k / -c2)) / s;
        if (k == 0) return std::log(std::abs(t)) / s;
        return std::acosh(std::max(1.0, std::abs(t) / std::sqrt(k / c2))) / s;
    };
    double total = 0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double u = cuts[k], v = cuts[k + 1];
        if (v <= u) continue;
        if (!(poly_eval(m.h, 0.5 * (u + v)).real() < 0)) continue;
        if (m.variant == SpectralCase::IIa) {
            total += m.norm_const * std::abs(G(v) - G(u));
        } else if (m.h[2] != 0) {
            total += m.norm_const * std::abs(F(v) - F(u));
        } else if (m.h[1] != 0) {
            total += m.norm_const * std::abs(G(v) - G(u)) / std::abs(m.h[1]);
        } else {
            total += m.norm_const * (v - u) / std::sqrt(-m.h[0]);
        }
    }
    return total;
}

OmegaTilde make_omega_tilde(ComplexFn g, cplx z0) {
    if (!(z0.imag() > 0)) throw Error(ErrorCode::Domain, "omega tilde needs Im z0 > 0");
    const cplx g0 = g(z0);
    return {z0, std::move(g), g0.imag() / z0.imag()};
}

cplx omega_tilde_transform(const OmegaTilde& ot, cplx z) {
    if (z.imag() < 0) return std::conj(omega_tilde_transform(ot, std::conj(z)));
    if (z.imag() == 0) throw Error(ErrorCode::Domain, "omega tilde transform needs Im z != 0");
    const double x0 = ot.z0.real(), y0 = ot.z0.imag();
    const cplx den = (z - x0) * (z - x0) + y0 * y0;
    const double scale = std::max(1.0, std::norm(z - x0) + y0 * y0);
    if (std::abs(den) <= 1e-14 * scale || std::abs(z - cplx(x0, std::sqrt(y0))) <= 1e-14 * std::abs(z))
        throw Error(ErrorCode::Domain, "omega tilde transform evaluated at its excluded point");
    const cplx g0 = ot.g(ot.z0);
    return (ot.g(z) - g0.real() - ((z - x0) / y0) * g0.imag()) / den;
}

double omega_tilde_total_mass(const OmegaTilde& ot, double y_large) {
    const cplx z(ot.z0.real(), y_large);
    return (-(z - ot.z0.real()) * omega_tilde_transform(ot, z)).real();
}

std::vector<double> default_eps_sequence() { return {1e-2, 1e-3, 1e-4, 1e-5}; }

namespace {

// polynomial extrapolation to t = 0 through (t_k, v_k)
template <class T>
T neville_at_zero(const std::vector<double>& t, std::vector<T> v) {
    const std::size_t m = t.size();
    for (std::size_t level = 1; level < m; ++level)
        for (std::size_t i = 0; i + level < m; ++i)
            v[i] = (t[i + level] * v[i] - t[i] * v[i + 1]) / (t[i + level] - t[i]);
    return v[0];
}

}  // namespace

StieltjesEstimate stieltjes_density(const ComplexFn& g, double x, const std::vector<double>& eps_seq) {
    if (eps_seq.size() < 4) throw Error(ErrorCode::Domain, "stieltjes_density needs at least 4 eps values");
    for (std::size_t k = 0; k < eps_seq.size(); ++k)
        if (!(eps_seq[k] > 0) || (k > 0 && !(eps_seq[k] < eps_seq[k - 1])))
            throw Error(ErrorCode::Domain, "eps sequence must be positive and decreasing");
    StieltjesEstimate est;
    est.eps = eps_seq;
    std::vector<cplx> residue;
    for (double e : eps_seq) {
        const cplx z(x, e);
        const cplx gz = g(z);
        est.values.push_back(gz.imag() / pi);
        residue.push_back((x - z) * gz);
    }
    const double first = eps_seq.front() * est.values.front();
    const double last = eps_seq.back() * est.values.back();
    est.singular = first > 0 && last > 0.5 * first;
    est.atom_mass = neville_at_zero(eps_seq, residue).real();
    if (est.singular) {
        est.density = std::numeric_limits<double>::infinity();
        est.error_estimate = std::numeric_limits<double>::infinity();
        return est;
    }
    est.density = neville_at_zero(eps_seq, est.values);
    const std::vector<double> tail_eps(eps_seq.begin() + 1, eps_seq.end());
    const std::vector<double> tail_vals(est.values.begin() + 1, est.values.end());
    est.error_estimate = std::abs(est.density - neville_at_zero(tail_eps, tail_vals));
    return est;
}

KnownMeasure known_measure_for(const JacobiFamily& family) {
    if (family.name() == "chebyshev") return KnownMeasure::ChebyshevU;
    if (family.name() == "hermite") return KnownMeasure::Hermite;
    if (family.name() == "laguerre") return KnownMeasure::Laguerre;
    throw Error(ErrorCode::Domain, "no known orthogonality measure for family '" + family.name() + "'");
}

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

template <class F>
EtaTransform integrate_pieces(F f, double a, double b, int pieces, double tol) {
    EtaTransform out{0.0, 0.0, true};
    const double h = (b - a) / pieces;
    double l1_total = 0;
    for (int k = 0; k < pieces; ++k) {
        const double u = a + k * h, v = k + 1 == pieces ? b : a + (k + 1) * h;
        double err = 0, l1 = 0;
        out.value += GK::integrate(f, u, v, 12, tol, &err, &l1);
        out.error_estimate += err;
        l1_total += l1;
    }
    out.converged = std::isfinite(out.error_estimate) && out.error_estimate <= tol * std::max(1.0, l1_total);
    return out;
}

}  // namespace

EtaTransform eta_cauchy(const JacobiFamily& family, index_t n, cplx z, double tol) {
    if (z.imag() == 0) throw Error(ErrorCode::Domain, "eta transform needs Im z != 0");
    const KnownMeasure kind = known_measure_for(family);
    const int pieces = int(std::min<index_t>(4 * (n + 1) + 16, 4096));
    switch (kind) {
        case KnownMeasure::ChebyshevU: {
            // x = cos(theta): dmu = (2/pi) sin^2(theta) dtheta
            auto f = [&](double th) -> cplx {
                const double x = std::cos(th), s = std::sin(th);
                return cd_kernel_diag(family, n, x).value() * (2 / pi) * s * s / (x - z);
            };
            return integrate_pieces(f, 0.0, pi, pieces, tol);
        }
        case KnownMeasure::Hermite: {
            auto logw = [&](double x) { return cd_kernel_diag(family, n, x).log_value - x * x - 0.5 * std::log(pi); };
            double X = std::sqrt(2.0 * n + 2) + 4;
            while (logw(X) > -60) X += 1;
            auto f = [&](double x) -> cplx { return std::exp(logw(x)) / (x - z); };
            return integrate_pieces(f, -X, X, pieces, tol);
        }
        case KnownMeasure::Laguerre: {
            auto logw = [&](double x) { return cd_kernel_diag(family, n, x).log_value - x; };
            double X = 4.0 * n + 8;
            while (logw(X) > -60) X *= 1.1;
            auto f = [&](double x) -> cplx { return std::exp(logw(x)) / (x - z); };
            return integrate_pieces(f, 0.0, X, pieces, tol);
        }
    }
    return {0.0, 0.0, false};
}

GapResult kernel_measure_gap(const JacobiFamily& family, index_t n, index_t L, cplx z) {
    if (L < 0) throw Error(ErrorCode::Domain, "shift L must be >= 0");
    const EtaTransform eta = eta_cauchy(family, n, z);
    const EtaTransform eta_shift = eta_cauchy(family, n + L, z);
    GapResult r;
    r.gap = std::abs(cauchy_via_logderiv(family, n, z) - eta.value);
    r.bound = 8 / std::abs(z.imag());
    r.shift_gap = std::abs(eta_shift.value - eta.value);
    r.shift_bound = double(L) / std::abs(z.imag());
    r.quadrature_error = eta.error_estimate + eta_shift.error_estimate;
    r.quadrature_ok = eta.converged && eta_shift.converged;
    return r;
}

}  // namespace jspec
