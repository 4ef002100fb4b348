#include "jspec/transfer.hpp"

#include "jspec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include <Eigen/Dense>
#include <json.hpp>

namespace jspec {

Mat2C transfer_B(const JacobiFamily& family, index_t n, cplx z) {
    const JacobiParams p = family.params(n);
    const double coupling = n == 0 ? 1.0 : family.a(n - 1);
    return {0.0, 1.0, -coupling / p.a, (z - p.b) / p.a};
}

Mat2C transfer_B_derivative(const JacobiFamily& family, index_t n) { return {0.0, 0.0, 0.0, 1.0 / family.a(n)}; }

Mat2C transfer_X(const JacobiFamily& family, index_t n, cplx z) {
    if (n < 1) throw Error(ErrorCode::Domain, "X_n is defined for n >= 1");
    const int N = family.base().N;
    // reuse a_{k-1} across the product
    double a_prev = family.a(n - 1);
    Mat2C X = Mat2C::identity();
    for (index_t k = n; k < n + N; ++k) {
        const JacobiParams p = family.params(k);
        const Mat2C B{0.0, 1.0, -a_prev / p.a, (z - p.b) / p.a};
        X = B * X;
        a_prev = p.a;
    }
    return X;
}

Mat2C transfer_X_derivative(const JacobiFamily& family, index_t n, cplx z) {
    if (n < 1) throw Error(ErrorCode::Domain, "X_n is defined for n >= 1");
    const int N = family.base().N;
    Mat2C X = Mat2C::identity();
    Mat2C D{0.0, 0.0, 0.0, 0.0};
    for (index_t k = n; k < n + N; ++k) {
        const Mat2C B = transfer_B(family, k, z);
        D = transfer_B_derivative(family, k) * X + B * D;
        X = B * X;
    }
    return D;
}

Mat2C periodic_B(const PeriodicBase& base, index_t j, cplx x) {
    const double aj = base.alpha_at(j);
    return {0.0, 1.0, -base.alpha_at(j - 1) / aj, (x - base.beta_at(j)) / aj};
}

Mat2C periodic_X(const PeriodicBase& base, index_t n, cplx x) {
    Mat2C X = Mat2C::identity();
    for (index_t k = n; k < n + base.N; ++k) X = periodic_B(base, k, x) * X;
    return X;
}

Mat2C periodic_X_derivative(const PeriodicBase& base, index_t n, cplx x) {
    Mat2C X = Mat2C::identity();
    Mat2C D{0.0, 0.0, 0.0, 0.0};
    for (index_t k = n; k < n + base.N; ++k) {
        const Mat2C B = periodic_B(base, k, x);
        const Mat2C dB{0.0, 0.0, 0.0, 1.0 / base.alpha_at(k)};
        D = dB * X + B * D;
        X = B * X;
    }
    return D;
}

const char* case_name(SpectralCase c) {
    switch (c) {
        case SpectralCase::I: return "I";
        case SpectralCase::IIa: return "IIa";
        case SpectralCase::IIb: return "IIb";
        case SpectralCase::III: return "III";
        case SpectralCase::Undecided: return "Undecided";
    }
    return "?";
}

namespace {

CaseClass classify_matrix(const Mat2C& X0, double tol_class) {
    CaseClass c{};
    c.trace0 = X0.trace().real();
    c.margin = std::abs(std::abs(c.trace0) - 2.0);
    c.epsilon = c.trace0 > 0 ? 1 : (c.trace0 < 0 ? -1 : 0);
    c.identity_distance = (X0 - double(c.epsilon) * Mat2C::identity()).max_abs();
    if (std::abs(c.trace0) < 2.0 - tol_class) {
        c.variant = SpectralCase::I;
        c.epsilon = 0;
    } else if (std::abs(c.trace0) > 2.0 + tol_class) {
        c.variant = SpectralCase::III;
    } else if (c.identity_distance <= tol_class) {
        c.variant = SpectralCase::IIa;
    } else if (c.identity_distance > 100 * tol_class) {
        c.variant = SpectralCase::IIb;
    } else {
        c.variant = SpectralCase::Undecided;
    }
    return c;
}

}  // namespace

CaseClass classify_base(const PeriodicBase& base, double tol_class) {
    return classify_matrix(periodic_X(base, 0, 0.0), tol_class);
}

CaseClass classify(const JacobiFamily& family, index_t probe_n, double tol_class) {
    if (!(tol_class > 0)) throw Error(ErrorCode::Domain, "tol_class must be positive");
    if (probe_n <= 0) return classify_base(family.base(), tol_class);
    // empirical probe: X_{probe_n N}(0) of the family itself approximates X_0(0)
    return classify_matrix(transfer_X(family, probe_n * family.base().N, 0.0), tol_class);
}

cplx poly_eval(const std::vector<double>& c, cplx z) {
    cplx s = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) s = s * z + c[k];
    return s;
}

cplx poly_derivative(const std::vector<double>& c, cplx z) {
    cplx s = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) s = s * z + double(k) * c[k];
    return s;
}

HEstimate h_estimate(const JacobiFamily& family, const std::vector<cplx>& z_grid, index_t j_max) {
    const CaseClass cc = classify(family);
    if (cc.variant != SpectralCase::IIa && cc.variant != SpectralCase::IIb)
        throw Error(ErrorCode::Domain, std::string("h_estimate needs case IIa or IIb, got ") + case_name(cc.variant));
    if (j_max < 16) throw Error(ErrorCode::Domain, "h_estimate: j_max must be at least 16");
    const int N = family.base().N;
    const bool iia = cc.variant == SpectralCase::IIa;
    auto scale = [&](index_t j) {
        const index_t m = j * N + N - 1;
        if (iia) {
            const double a = family.a(m);
            return a * a;
        }
        return family.gamma(m);
    };
    std::vector<index_t> js;
    for (index_t j = j_max; j >= 8; j /= 2) js.push_back(j);
    std::reverse(js.begin(), js.end());

    HEstimate out;
    out.variant = cc.variant;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (cplx z : z_grid) {
        HPoint pt;
        pt.z = z;
        std::vector<double> noise;
        for (index_t j : js) {
            const Mat2C X = transfer_X(family, j * N, z);
            const double sc = scale(j);
            pt.samples.emplace_back(j, sc * X.discr());
            noise.push_back(64 * eps * sc * std::max(1.0, X.max_abs() * X.max_abs()));
        }
        const std::size_t m = pt.samples.size();
        // Cauchy differences over the last quartile must not grow beyond noise
        std::vector<double> diffs;
        for (std::size_t k = 1; k < m; ++k) diffs.push_back(std::abs(pt.samples[k].second - pt.samples[k - 1].second));
        const std::size_t q = std::max<std::size_t>(2, diffs.size() / 4);
        for (std::size_t k = diffs.size() - q + 1; k < diffs.size(); ++k) {
            if (diffs[k] > diffs[k - 1] + 4 * noise[k + 1])
                throw Error(ErrorCode::NonConvergent, "scaled discriminant does not settle at z = (" +
                                                          std::to_string(z.real()) + ", " +
                                                          std::to_string(z.imag()) + ")");
        }
        const auto [j1, s1] = pt.samples[m - 1];
        const auto [j2, s2] = pt.samples[m - 2];
        if (std::abs(s1 - s2) <= noise[m - 1]) {
            pt.extrapolated = s1;
            pt.richardson_used = false;
        } else {
            // eliminate the c/j term
            pt.extrapolated = (double(j1) * s1 - double(j2) * s2) / double(j1 - j2);
            pt.richardson_used = true;
        }
        out.points.push_back(std::move(pt));
    }

    const int degree = iia ? 2 : 1;
    std::vector<const HPoint*> real_pts;
    for (const auto& p : out.points)
        if (p.z.imag() == 0) real_pts.push_back(&p);
    out.residual = std::numeric_limits<double>::quiet_NaN();
    if (int(real_pts.size()) >= degree + 1) {
        Eigen::MatrixXd A(real_pts.size(), degree + 1);
        Eigen::VectorXd y(real_pts.size());
        for (std::size_t r = 0; r < real_pts.size(); ++r) {
            const double x = real_pts[r]->z.real();
            for (int c = 0; c <= degree; ++c) A(r, c) = std::pow(x, c);
            y(r) = real_pts[r]->extrapolated.real();
        }
        const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(y);
        out.poly_fit.assign(3, 0.0);
        for (int c = 0; c <= degree; ++c) out.poly_fit[c] = coef(c);
        double res = 0;
        for (const HPoint* p : real_pts)
            res = std::max(res, std::abs(poly_eval(out.poly_fit, p->z.real()) - p->extrapolated));
        out.residual = res;
    }
    return out;
}

Mat2C levinson_step_matrix(const JacobiFamily& family, SpectralCase variant, const ParabolicData* pd, index_t j,
                           cplx z) {
    if (variant == SpectralCase::IIb) {
        if (!pd) throw Error(ErrorCode::Domain, "case IIb steps need parabolic data");
        return parabolic_frame(family, *pd, j, z).Y;
    }
    return transfer_X(family, j * family.base().N, z);
}

index_t choose_start_index(const JacobiFamily& family, const std::vector<cplx>& probes, index_t floor,
                           index_t scan_max) {
    const CaseClass cc = classify(family);
    std::optional<ParabolicData> pd;
    if (cc.variant == SpectralCase::IIb) pd = parabolic_data(family, std::max<index_t>(4 * scan_max, 100000));
    index_t M = std::max<index_t>(floor, 1);
    for (index_t j = M; j <= scan_max; ++j) {
        for (cplx z : probes) {
            try {
                eigpair(levinson_step_matrix(family, cc.variant, pd ? &*pd : nullptr, j, z));
            } catch (const Error&) {
                M = j + 1;
            }
        }
    }
    return M;
}

namespace {

double tail_slope(const std::vector<index_t>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = x.size() / 2; i < x.size(); ++i) {
        if (!(y[i] > 0)) continue;
        const double lx = std::log(double(x[i])), ly = std::log(y[i]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly; ++m;
    }
    const double den = m * sxx - sx * sx;
    return (m >= 2 && den > 0) ? (m * sxy - sx * sy) / den : 0.0;
}

}  // namespace

LevinsonResult levinson_ratio_product(const JacobiFamily& family, cplx z, index_t M, index_t j_max) {
    if (M < 1 || j_max < M) throw Error(ErrorCode::Domain, "levinson: need 1 <= M <= j_max");
    const CaseClass cc = classify(family);
    if (cc.variant == SpectralCase::III || cc.variant == SpectralCase::Undecided)
        throw Error(ErrorCode::Domain, "levinson products need case I, IIa or IIb");
    std::optional<ParabolicData> pd;
    if (cc.variant == SpectralCase::IIb) pd = parabolic_data(family, std::max<index_t>(j_max, 100000));
    LevinsonResult out;
    out.M = M;
    double log_prod = 0, bound = 0;
    for (index_t j = M; j <= j_max; ++j) {
        EigenPair ep;
        try {
            ep = eigpair(levinson_step_matrix(family, cc.variant, pd ? &*pd : nullptr, j, z));
        } catch (const Error& e) {
            throw Error(e.code(), std::string(e.what()) + " at j = " + std::to_string(j));
        }
        const double step = 2 * std::log(std::abs(joukowsky_roots(ep.branch.w).plus));
        const double prev = log_prod;
        log_prod += step;
        if (log_prod < prev) out.nondecreasing = false;
        const XiModulus xm = xi_modulus(ep.branch.w);
        if (xm.gap_bound) bound += 2 * std::log1p(*xm.gap_bound);
        out.j.push_back(j);
        out.log_products.push_back(log_prod);
        out.lower_bound_sums.push_back(bound);
    }
    out.growth_exponent = tail_slope(out.j, out.log_products);
    return out;
}

AsymptoticProfile asymptotic_profile(const JacobiFamily& family, cplx z, int residue, index_t M, index_t k_max,
                                     cplx eta0, cplx eta1) {
    const CaseClass cc = classify(family);
    if (cc.variant == SpectralCase::III || cc.variant == SpectralCase::Undecided)
        throw Error(ErrorCode::Domain, "asymptotic profiles need case I, IIa or IIb");
    const int N = family.base().N;
    if (residue < 0 || residue >= N) throw Error(ErrorCode::Domain, "residue must lie in [0, N)");
    if (M < 1 || k_max <= M) throw Error(ErrorCode::Domain, "asymptotic_profile: need 1 <= M < k_max");
    std::optional<ParabolicData> pd;
    if (cc.variant == SpectralCase::IIb) pd = parabolic_data(family, std::max<index_t>(k_max * N, 100000));

    AsymptoticProfile out;
    ScaledPair pair = start_from_eta(family, eta0, eta1, z);
    index_t at = 0;
    cplx log_lambda = 0.0;  // sum of principal logs of lambda_j^+, j in [M, k)
    for (index_t k = M; k <= k_max; ++k) {
        const index_t target = k * N + residue;
        pair = propagate(family, pair, at, target, z);
        at = target;
        const cplx v = pair.u * std::exp(cplx(pair.log_scale, 0.0) - log_lambda);
        out.k.push_back(k);
        out.values.push_back(v);
        if (k < k_max) {
            const EigenPair ep = eigpair(levinson_step_matrix(family, cc.variant, pd ? &*pd : nullptr, k, z));
            log_lambda += std::log(ep.lambda_plus);
        }
    }
    out.limit = out.values.back();
    // dyadic block maxima of |v_{k+1} - v_k|
    index_t lo = 1;
    while (lo * 2 <= M) lo *= 2;
    for (; lo < k_max; lo *= 2) {
        double mx = 0;
        bool any = false;
        for (std::size_t i = 0; i + 1 < out.k.size(); ++i) {
            if (out.k[i] >= lo && out.k[i] < 2 * lo) {
                mx = std::max(mx, std::abs(out.values[i + 1] - out.values[i]));
                any = true;
            }
        }
        if (any) out.block_max.push_back(mx);
    }
    const double lim = std::abs(out.limit);
    out.tail_difference = out.block_max.empty() || lim == 0 ? 0.0 : out.block_max.back() / lim;
    out.converged = out.block_max.size() >= 3;
    for (std::size_t b = out.block_max.size() >= 3 ? out.block_max.size() - 3 : 0; b + 1 < out.block_max.size(); ++b)
        if (!(out.block_max[b + 1] < out.block_max[b])) out.converged = false;
    return out;
}

void write_profile_csv(std::ostream& out, const std::vector<index_t>& k, const std::vector<cplx>& values) {
    out << "k,value_re,value_im\n" << std::setprecision(17);
    for (std::size_t i = 0; i < k.size(); ++i) out << k[i] << ',' << values[i].real() << ',' << values[i].imag() << '\n';
}

void write_h_estimate_csv(std::ostream& out, const HEstimate& h) {
    out << "z_re,z_im,j,value_re,value_im\n" << std::setprecision(17);
    for (const auto& p : h.points)
        for (const auto& [j, v] : p.samples)
            out << p.z.real() << ',' << p.z.imag() << ',' << j << ',' << v.real() << ',' << v.imag() << '\n';
}

std::string h_estimate_json(const HEstimate& h) {
    nlohmann::json j;
    j["case"] = case_name(h.variant);
    j["poly_fit"] = h.poly_fit;
    j["residual"] = h.residual;
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : h.points)
        pts.push_back({{"z", {p.z.real(), p.z.imag()}},
                       {"extrapolated", {p.extrapolated.real(), p.extrapolated.imag()}},
                       {"richardson", p.richardson_used}});
    j["points"] = pts;
    return j.dump(2);
}

}  // namespace jspec
