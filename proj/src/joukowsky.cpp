#include "jspec/errors.hpp"
#include "jspec/transfer.hpp"

#include <cmath>

namespace jspec {

cplx glued_sqrt(cplx w) {
    if (w.imag() == 0) {
        // signed zeros would otherwise select the lower-half-plane limit
        const double x = w.real();
        if (std::abs(x) <= 1) return {0.0, std::sqrt((1 - x) * (1 + x))};
        const double r = std::sqrt((x - 1) * (x + 1));
        return {x > 0 ? r : -r, 0.0};
    }
    return std::sqrt(w - 1.0) * std::sqrt(w + 1.0);
}

JoukowskyRoots joukowsky_roots(cplx w) {
    const cplx s = glued_sqrt(w);
    const cplx plus = w + s;
    // w - s cancels when |w| is large; 1/plus cancels nowhere on |plus| >= 1
    const cplx minus = std::abs(w) <= 1 ? w - s : 1.0 / plus;
    return {plus, minus};
}

XiModulus xi_modulus(cplx w) {
    const double dm = std::abs(w - 1.0), dp = std::abs(w + 1.0);
    const double s = dm + dp;
    // s^2 - 4 = 2(|w|^2 - 1 + |w^2 - 1|); inside the unit disk rationalize to 8y^2/(|w^2-1| + 1 - |w|^2)
    const double r2 = std::norm(w), q = std::abs(w * w - 1.0);
    const double under = r2 < 1 ? 8 * w.imag() * w.imag() / (q + 1 - r2) : 2 * (r2 - 1 + q);
    XiModulus out{0.5 * (s + std::sqrt(under)), std::nullopt};
    if (w.imag() != 0) out.gap_bound = std::abs(w.imag()) / (2 * std::sqrt(dm * dp));
    return out;
}

EigenPair eigpair(const Mat2C& Y, double tol) {
    const cplx det = Y.det();
    if (det.imag() == 0 && det.real() <= 0)
        throw Error(ErrorCode::NegativeDeterminantRay, "det Y lies on (-inf, 0]");
    const double scale = Y.norm();
    if (std::abs(Y.discr()) < tol * scale * scale)
        throw Error(ErrorCode::DegenerateDiscriminant, "discriminant vanishes at tolerance");
    const cplx sd = std::sqrt(det);
    const cplx w = Y.trace() / (2.0 * sd);
    const JoukowskyRoots xi = joukowsky_roots(w);
    EigenPair ep;
    ep.lambda_plus = sd * xi.plus;
    ep.lambda_minus = sd * xi.minus;
    ep.branch = {sd, w, w.imag() == 0 && std::abs(w.real()) <= 1};
    return ep;
}

EigenPair eigpair_scaled(const Mat2C& Y, double gscale, double eps_shift, double tol) {
    EigenPair ep = eigpair(Y, tol);
    ep.zeta_plus = gscale * (ep.lambda_plus - eps_shift);
    ep.zeta_minus = gscale * (ep.lambda_minus - eps_shift);
    return ep;
}

cplx eigpair_derivative(const Mat2C& Y, const Mat2C& Yp, double tol) {
    const EigenPair ep = eigpair(Y, tol);
    const cplx det = Y.det();
    const cplx ddet = Yp.m11 * Y.m22 + Y.m11 * Yp.m22 - Yp.m12 * Y.m21 - Y.m12 * Yp.m21;
    const cplx sd = ep.branch.sqrt_det;
    const cplx dw = Yp.trace() / (2.0 * sd) - Y.trace() * ddet / (4.0 * det * sd);
    return ddet / (2.0 * det) + dw / glued_sqrt(ep.branch.w);
}

Diagonalization diagonalize(const Mat2C& Y, double tol) {
    const double scale = Y.norm();
    if (std::abs(Y.m12) < tol * scale) throw Error(ErrorCode::ZeroUpperRight, "[Y]_12 vanishes at tolerance");
    const EigenPair ep = eigpair(Y, tol);
    Diagonalization d;
    d.C = {1.0, 1.0, (ep.lambda_plus - Y.m11) / Y.m12, (ep.lambda_minus - Y.m11) / Y.m12};
    d.D = Mat2C::diag(ep.lambda_plus, ep.lambda_minus);
    d.recon_error = (Y - d.C * d.D * d.C.inverse()).norm() / scale;
    return d;
}

}  // namespace jspec
