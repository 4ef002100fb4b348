#include "jspec/errors.hpp"
#include "jspec/transfer.hpp"

#include <algorithm>
#include <cmath>

namespace jspec {

cplx ParabolicData::tau(cplx z) const {
    return S * S / 4 + double(t_flag * epsilon) * trace_derivative * z + U;
}

cplx ParabolicData::upsilon(cplx z) const { return S * S / 4 - tau(z); }

namespace {

// kernel vector of a rank-one nilpotent 2x2 matrix, first entry 1 when possible
std::pair<double, double> kernel_vector(double m11, double m12, double m21, double m22) {
    const bool first = std::hypot(m11, m12) >= std::hypot(m21, m22);
    const double r1 = first ? m11 : m21, r2 = first ? m12 : m22;
    double v1 = r2, v2 = -r1;
    if (std::abs(v1) > 1e-14 * std::hypot(v1, v2)) return {1.0, v2 / v1};
    return {0.0, 1.0};
}

// least-norm w with M w = v, where M = v l^T
std::pair<double, double> jordan_partner(double m11, double m12, double m21, double m22, std::pair<double, double> v) {
    const bool use_first = std::abs(v.first) >= std::abs(v.second);
    const double l1 = use_first ? m11 / v.first : m21 / v.second;
    const double l2 = use_first ? m12 / v.first : m22 / v.second;
    const double nn = l1 * l1 + l2 * l2;
    return {l1 / nn, l2 / nn};
}

Mat2C columns(std::pair<double, double> c1, std::pair<double, double> c2) {
    return {c1.first, c2.first, c1.second, c2.second};
}

struct TailStats {
    double mean = 0, lo = 0, hi = 0;
};

}  // namespace

ParabolicData parabolic_data(const JacobiFamily& family, index_t n_probe, double tail_tol) {
    const CaseClass cc = classify(family);
    if (cc.variant != SpectralCase::IIb) throw Error(ErrorCode::Domain, "parabolic data needs a case IIb family");
    if (!family.has_gamma()) throw Error(ErrorCode::Config, "parabolic data needs the tempering sequence gamma");
    const PeriodicBase& base = family.base();
    const int N = base.N;
    if (n_probe < 8 * N) throw Error(ErrorCode::Domain, "parabolic data: n_probe too small");

    ParabolicData pd;
    pd.epsilon = cc.epsilon;
    pd.alpha_last = base.alpha_at(N - 1);
    const Mat2C X0 = periodic_X(base, 0, 0.0);
    pd.trace_derivative = periodic_X_derivative(base, 0, 0.0).trace().real();
    if (pd.trace_derivative == 0) throw Error(ErrorCode::Diagnostic, "tr X'_0(0) vanishes");

    const double t_est = family.gamma(n_probe) / family.a(n_probe);
    if (std::abs(t_est - 1) < 0.1) pd.t_flag = 1;
    else if (t_est < 0.25) pd.t_flag = 0;
    else throw Error(ErrorCode::Diagnostic, "gamma_n / a_n has no limit in {0, 1} at the probe");

    const double eps = pd.epsilon;
    pd.s_residues.assign(N, 0.0);
    pd.u_residues.assign(N, 0.0);
    for (int i = 0; i < N; ++i) {
        const Mat2C Xi = periodic_X(base, i, 0.0);
        const double x11 = Xi.m11.real(), x21 = Xi.m21.real();
        TailStats st_s, st_u;
        bool first = true;
        int count = 0;
        for (index_t n = n_probe / 2; n <= n_probe; ++n) {
            if (((n % N) + N) % N != i) continue;
            const JacobiParams p = family.params(n);
            const double a_prev = family.a(n - 1);
            const double g = family.gamma(n);
            const double delta = base.alpha_at(n - 1) / base.alpha_at(n) - a_prev / p.a;
            const double r = base.beta_at(n) / base.alpha_at(n) - p.b / p.a;
            const double s = std::sqrt(base.alpha_at(n) * g) * delta;
            const double u = g * ((1 - eps * x11) * delta - eps * x21 * r);
            if (first) {
                st_s = {0, s, s};
                st_u = {0, u, u};
                first = false;
            }
            st_s.mean += s;
            st_u.mean += u;
            st_s.lo = std::min(st_s.lo, s);
            st_s.hi = std::max(st_s.hi, s);
            st_u.lo = std::min(st_u.lo, u);
            st_u.hi = std::max(st_u.hi, u);
            ++count;
        }
        st_s.mean /= count;
        st_u.mean /= count;
        if (st_s.hi - st_s.lo > tail_tol * std::max(1.0, std::abs(st_s.mean)) ||
            st_u.hi - st_u.lo > tail_tol * std::max(1.0, std::abs(st_u.mean)))
            throw Error(ErrorCode::Diagnostic, "tail of s_n or u_n oscillates beyond tolerance in residue " +
                                                   std::to_string(i));
        pd.s_residues[i] = st_s.mean;
        pd.u_residues[i] = st_u.mean;
        pd.S += st_s.mean / base.alpha_at(i - 1);
        pd.U += st_u.mean / base.alpha_at(i - 1);
    }

    // Jordan bases: X0 = eps (Id + M), J = Id + MJ with J = [[0,1],[-1,2]]
    const Mat2C M = eps * X0 - Mat2C::identity();
    const double m11 = M.m11.real(), m12 = M.m12.real(), m21 = M.m21.real(), m22 = M.m22.real();
    const auto v1 = kernel_vector(m11, m12, m21, m22);
    const auto v2 = jordan_partner(m11, m12, m21, m22, v1);
    const auto w1 = kernel_vector(-1, 1, -1, 1);
    const auto w2 = jordan_partner(-1, 1, -1, 1, w1);
    pd.T0 = columns(v1, v2) * columns(w1, w2).inverse();
    const Mat2C J{0.0, 1.0, -1.0, 2.0};
    pd.conjugacy_error = (X0 - eps * (pd.T0 * J * pd.T0.inverse())).max_abs();
    if (!(pd.conjugacy_error <= 1e-10)) throw Error(ErrorCode::Diagnostic, "T0 fails the conjugacy check");
    return pd;
}

Mat2C parabolic_Z(const JacobiFamily& family, const ParabolicData& pd, index_t j, cplx z) {
    const int N = family.base().N;
    const double ratio = pd.alpha_last / family.gamma(j * N + N - 1);
    cplx theta;
    if (pd.t_flag == 1) {
        const cplx tau = pd.tau(z);
        if (tau.imag() == 0 && tau.real() >= 0)
            throw Error(ErrorCode::Domain, "tau(z) lies on [0, inf); z is outside the frame's domain");
        theta = std::sqrt(ratio) * std::sqrt(-tau);
    } else {
        theta = std::sqrt(ratio * std::abs(pd.tau(0.0)));
    }
    const cplx ep = std::exp(theta), em = std::exp(-theta);
    if (ep == em) throw Error(ErrorCode::SingularFrame, "Z_j is singular");
    return pd.T0 * Mat2C{1.0, 1.0, ep, em};
}

ParabolicFrame parabolic_frame(const JacobiFamily& family, const ParabolicData& pd, index_t j, cplx z) {
    if (j < 1) throw Error(ErrorCode::Domain, "parabolic frame needs j >= 1");
    const Mat2C Zj = parabolic_Z(family, pd, j, z);
    const Mat2C Zn = parabolic_Z(family, pd, j + 1, z);
    ParabolicFrame f;
    f.Z = Zj;
    f.Y = Zn.inverse() * transfer_X(family, j * family.base().N, z) * Zj;
    f.deviation = (double(pd.epsilon) * f.Y - Mat2C::identity()).norm();
    return f;
}

}  // namespace jspec
