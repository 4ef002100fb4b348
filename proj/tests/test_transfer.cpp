#include "jspec/errors.hpp"
#include "jspec/transfer.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <random>
#include <sstream>

using namespace jspec;

namespace {

bool near(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }
bool mat_near(const Mat2C& x, const Mat2C& y, double tol) {
    return near(x.m11, y.m11, tol) && near(x.m12, y.m12, tol) && near(x.m21, y.m21, tol) && near(x.m22, y.m22, tol);
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return ErrorCode::Config;
}

// plain 2x2 product for the oracle, independent of Mat2C
using M2 = std::array<double, 4>;
M2 mul(const M2& x, const M2& y) {
    return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
}

}  // namespace

TEST_SUITE("transfer") {

TEST_CASE("transfer matrices") {
    const JacobiFamily lag = builtin_family("laguerre");
    CHECK(mat_near(transfer_B(lag, 0, 0.0), {0.0, 1.0, -1.0, -1.0}, 1e-15));
    CHECK(mat_near(transfer_B(builtin_family("chebyshev"), 3, 0.0), {0.0, 1.0, -1.0, 0.0}, 1e-15));
    for (index_t n : {1, 10, 1000, 100000}) {
        CHECK(near(transfer_B(lag, n, cplx(0.3, 1)).det(), lag.a(n - 1) / lag.a(n), 1e-14));
        const cplx x = 0.7;
        const Mat2C X = transfer_X(lag, n, x);
        CHECK(near(X.trace(), (x - 2.0 * double(n) - 1.0) / double(n + 1), 1e-13));
        CHECK(near(X.det(), double(n) / double(n + 1), 1e-13));
        CHECK(near(double(n + 1) * X.discr(), (x * x - 2.0 * x * double(2 * n + 1) + 1.0) / double(n + 1), 1e-9));
    }
    const JacobiFamily s = builtin_family("synthetic_iia");
    for (index_t j : {1, 7, 5000}) {
        const Mat2C X = transfer_X(s, 2 * j, cplx(0.2, 0.1));
        CHECK(near(X.det(), double(j) / double(j + 1), 1e-12));
        CHECK(mat_near(X, transfer_B(s, 2 * j + 1, cplx(0.2, 0.1)) * transfer_B(s, 2 * j, cplx(0.2, 0.1)), 1e-15));
    }
}

TEST_CASE("transfer derivative by finite differences") {
    const JacobiFamily s = builtin_family("synthetic_iia");
    const cplx z(0.4, 0.3);
    const double h = 1e-6;
    const Mat2C fd = (1.0 / (2 * h)) * (transfer_X(s, 10, z + h) - transfer_X(s, 10, z - h));
    CHECK(mat_near(transfer_X_derivative(s, 10, z), fd, 1e-8));
    const Mat2C pfd = (1.0 / (2 * h)) * (periodic_X(s.base(), 0, z + h) - periodic_X(s.base(), 0, z - h));
    CHECK(mat_near(periodic_X_derivative(s.base(), 0, z), pfd, 1e-8));
}

TEST_CASE("joukowsky roots") {
    CHECK(near(joukowsky_roots(2.0).plus, 2 + std::sqrt(3.0), 1e-15));
    CHECK(near(joukowsky_roots(cplx(0, 1)).plus, cplx(0, 1 + std::sqrt(2.0)), 1e-15));
    CHECK(near(joukowsky_roots(0.0).plus, cplx(0, 1), 1e-15));
    CHECK(near(joukowsky_roots(-2.0).plus, -2 - std::sqrt(3.0), 1e-15));
    // continuity from the upper half-plane onto (-1, 1)
    for (double x : {-0.9, -0.2, 0.5}) CHECK(near(joukowsky_roots(cplx(x, 1e-12)).plus, joukowsky_roots(x).plus, 1e-9));
    // conjugation symmetry
    const cplx w(0.3, -0.8);
    CHECK(near(joukowsky_roots(w).plus, std::conj(joukowsky_roots(std::conj(w)).plus), 1e-15));
}

TEST_CASE("xi modulus") {
    CHECK(xi_modulus(cplx(0, 1)).value == doctest::Approx(1 + std::sqrt(2.0)).epsilon(1e-15));
    for (double x : {-1.0, -0.3, 0.0, 0.99, 1.0}) CHECK(xi_modulus(x).value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(xi_modulus(2.0).value == doctest::Approx(2 + std::sqrt(3.0)).epsilon(1e-15));
    CHECK_FALSE(xi_modulus(0.5).gap_bound.has_value());
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    for (int i = 0; i < 200; ++i) {
        const cplx w(nd(rng), nd(rng));
        const XiModulus m = xi_modulus(w);
        REQUIRE(m.gap_bound.has_value());
        CHECK(*m.gap_bound <= m.value - 1 + 1e-14);
    }
}

TEST_CASE("eigpair examples") {
    const EigenPair a = eigpair({0.0, 1.0, -1.0, 1.0});
    CHECK(near(a.lambda_plus, cplx(0.5, std::sqrt(3.0) / 2), 1e-14));
    CHECK(near(a.lambda_minus, cplx(0.5, -std::sqrt(3.0) / 2), 1e-14));
    CHECK(a.branch.boundary_limit);
    const EigenPair d = eigpair(Mat2C::diag(2.0, 0.5));
    CHECK(near(d.lambda_plus, 2.0, 1e-15));
    CHECK(near(d.lambda_minus, 0.5, 1e-15));
    CHECK(code_of([] { eigpair({0.0, 1.0, -1.0, -2.0}); }) == ErrorCode::DegenerateDiscriminant);
    CHECK(code_of([] { eigpair({0.0, 1.0, 1.0, 0.0}); }) == ErrorCode::NegativeDeterminantRay);
    const EigenPair s = eigpair_scaled(Mat2C::diag(2.0, 0.5), 10.0, 1.0);
    REQUIRE(s.zeta_plus.has_value());
    CHECK(near(*s.zeta_plus, 10.0, 1e-14));
    CHECK(near(*s.zeta_minus, -5.0, 1e-14));
}

TEST_CASE("eigpair invariants on random matrices") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    int tested = 0;
    while (tested < 300) {
        const Mat2C Y{cplx(nd(rng), nd(rng)), cplx(nd(rng), nd(rng)), cplx(nd(rng), nd(rng)), cplx(nd(rng), nd(rng))};
        const cplx det = Y.det();
        if (det.imag() == 0 && det.real() <= 0) continue;
        if (std::abs(Y.discr()) < 1e-6 * Y.norm() * Y.norm()) continue;
        const EigenPair e = eigpair(Y);
        CHECK(std::abs(e.lambda_plus * e.lambda_minus - det) <= 1e-12 * Y.norm() * Y.norm());
        CHECK(std::abs(e.lambda_plus + e.lambda_minus - Y.trace()) <= 1e-12 * Y.norm());
        CHECK(std::abs(e.lambda_plus) >= std::abs(e.lambda_minus) * (1 - 1e-14));
        ++tested;
    }
}

TEST_CASE("eigpair derivative") {
    const Mat2C Y{0.0, 1.0, -1.0, 3.0}, Z{0.0, 0.0, 0.0, 0.0};
    CHECK(eigpair_derivative(Y, Z) == cplx(0.0));
    const cplx z(0, 1);
    const Mat2C Yz{0.0, 1.0, -1.0, z}, Yp{0.0, 0.0, 0.0, 1.0};
    const cplx w(0, 0.5);
    CHECK(near(eigpair_derivative(Yz, Yp), 0.5 / (joukowsky_roots(w).plus - w), 1e-14));
    const double h = 1e-5;
    auto lam = [&](double t) { return eigpair({0.0, 1.0, -1.0, z + t}).lambda_plus; };
    const cplx fd = (lam(h) - lam(-h)) / (2 * h) / lam(0);
    CHECK(near(eigpair_derivative(Yz, Yp), fd, 1e-8));
}

TEST_CASE("diagonalize") {
    const Diagonalization d = diagonalize({0.0, 1.0, -1.0, 1.0});
    CHECK(d.recon_error < 1e-12);
    const Diagonalization e = diagonalize({1.0, 2.0, 3.0, cplx(4.0, 1.0)});
    CHECK(std::abs(e.D.m11) >= std::abs(e.D.m22));
    CHECK(e.recon_error < 1e-10);
    CHECK(code_of([] { diagonalize(Mat2C::diag(2.0, 0.5)); }) == ErrorCode::ZeroUpperRight);
}

TEST_CASE("classification") {
    const CaseClass h = classify(builtin_family("hermite"));
    CHECK(h.variant == SpectralCase::I);
    CHECK(h.trace0 == 0.0);
    const CaseClass s = classify(builtin_family("synthetic_iia"));
    CHECK(s.variant == SpectralCase::IIa);
    CHECK(s.epsilon == -1);
    const CaseClass l = classify(builtin_family("laguerre"));
    CHECK(l.variant == SpectralCase::IIb);
    CHECK(l.epsilon == -1);
    CHECK(l.trace0 == doctest::Approx(-2.0));
    const CaseClass m = classify(builtin_family("meixner", {{"c", 0.5}, {"beta0", 1.0}}));
    CHECK(m.variant == SpectralCase::III);
    CHECK(std::abs(m.trace0) == doctest::Approx(1.5 / std::sqrt(0.5)));
    CHECK(classify_base(PeriodicBase{2, {1, 1}, {0, 1e-5}}).variant == SpectralCase::Undecided);
    CHECK(classify_base(PeriodicBase{2, {1, 1}, {0, 1e-3}}).variant == SpectralCase::IIb);
    CHECK(classify_base(PeriodicBase{2, {1, 1}, {0, 1e-9}}).variant == SpectralCase::IIa);
    CHECK(std::string(case_name(SpectralCase::IIb)) == "IIb");
}

TEST_CASE("h estimate for synthetic_iia against a product oracle") {
    const JacobiFamily s = builtin_family("synthetic_iia");
    // a^2 discr X_{2j}(x) with plain real products
    for (double x : {-1.5, 0.5, 2.0}) {
        const index_t j = 200000;
        M2 X{1, 0, 0, 1};
        for (index_t k = 2 * j; k < 2 * j + 2; ++k) X = mul({0, 1, -s.a(k - 1) / s.a(k), (x - s.b(k)) / s.a(k)}, X);
        const double d = (X[0] - X[3]) * (X[0] - X[3]) + 4 * X[1] * X[2];
        const double scaled = s.a(2 * j + 1) * s.a(2 * j + 1) * d;
        CHECK(scaled == doctest::Approx(-4 * x * x).epsilon(1e-4));
    }
    std::vector<cplx> grid;
    for (double x : {-2.0, -1.0, 0.0, 1.0, 2.0}) grid.emplace_back(x, 0.0);
    const HEstimate h = h_estimate(s, grid, 100000);
    CHECK(h.poly_fit[2] < 0);
    CHECK(std::abs(h.poly_fit[2] + 4) < 1e-2);
    CHECK(std::abs(h.poly_fit[1]) < 1e-2);
    CHECK(std::abs(h.poly_fit[0]) < 1e-2);
    CHECK(h.residual < 1e-2);
    std::ostringstream csv;
    write_h_estimate_csv(csv, h);
    CHECK_FALSE(csv.str().empty());
    CHECK(h_estimate_json(h).find("poly_fit") != std::string::npos);
    CHECK(code_of([] { h_estimate(builtin_family("hermite"), {cplx(0.5, 0)}, 1000); }) == ErrorCode::Domain);
}

TEST_CASE("h estimate for laguerre is affine") {
    std::vector<cplx> grid;
    for (double x : {-1.0, 0.0, 1.0, 3.0}) grid.emplace_back(x, 0.0);
    const HEstimate h = h_estimate(builtin_family("laguerre"), grid, 100000);
    CHECK(std::abs(h.poly_fit[1] + 4) < 4e-2);
    CHECK(std::abs(h.poly_fit[0]) < 4e-2);
}

TEST_CASE("parabolic data for laguerre") {
    const JacobiFamily lag = builtin_family("laguerre");
    const ParabolicData pd = parabolic_data(lag, 100000);
    CHECK(pd.t_flag == 1);
    CHECK(pd.epsilon == -1);
    CHECK(pd.conjugacy_error < 1e-10);
    const Mat2C J{0.0, 1.0, -1.0, 2.0};
    CHECK(mat_near(periodic_X(lag.base(), 0, 0.0), double(pd.epsilon) * (pd.T0 * J * pd.T0.inverse()), 1e-10));
    for (double x : {-2.0, 0.5, 3.0}) CHECK(std::abs(4 * pd.alpha_last * pd.tau(x) + 4 * x) < 4e-2 * std::max(1.0, std::abs(x)));
}

// N=1 family with quadratic growth: a = (n+1)^2, b = 2a - 2(n+1) + c, gamma = a.
// First-order expansion gives S = 2, U = c - 1, tau(z) = c - z.
TEST_CASE("parabolic tau on a family with nonzero S and U") {
    const double c = 0.5;
    const JacobiFamily f = custom_family(
        "quadratic", [c](index_t n) { const double m = double(n + 1); return JacobiParams{m * m, 2 * m * m - 2 * m + c}; },
        PeriodicBase{1, {1.0}, {2.0}}, [](index_t n) { const double m = double(n + 1); return m * m; });
    CHECK(classify(f).variant == SpectralCase::IIb);
    const ParabolicData pd = parabolic_data(f, 100000);
    CHECK(pd.S == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(pd.U == doctest::Approx(c - 1).epsilon(1e-3));
    for (double x : {-1.0, 0.0, 2.0}) CHECK(pd.tau(x).real() == doctest::Approx(c - x).epsilon(1e-3));
    std::vector<cplx> grid;
    for (double x : {-1.0, 0.0, 1.0, 2.0}) grid.emplace_back(x, 0.0);
    const HEstimate h = h_estimate(f, grid, 100000);
    CHECK(h.poly_fit[0] == doctest::Approx(4 * c).epsilon(1e-3));
    CHECK(h.poly_fit[1] == doctest::Approx(-4.0).epsilon(1e-3));
}

TEST_CASE("parabolic tau with period two") {
    const double b1 = -2;
    const JacobiFamily f = custom_family(
        "two", [b1](index_t n) { const double m = double(n + 1); return JacobiParams{m, n % 2 ? b1 * m : 0.0}; },
        PeriodicBase{2, {1.0, 1.0}, {0.0, b1}}, [](index_t n) { return double(n + 1); });
    CHECK(classify(f).variant == SpectralCase::IIb);
    const ParabolicData pd = parabolic_data(f, 100000);
    CHECK(pd.trace_derivative == doctest::Approx(-b1));
    std::vector<cplx> grid;
    for (double x : {-1.0, 0.0, 1.0, 2.0}) grid.emplace_back(x, 0.0);
    const HEstimate h = h_estimate(f, grid, 100000);
    for (double x : {-1.0, 1.0, 2.0}) {
        const double from_tau = 4 * pd.alpha_last * pd.tau(x).real();
        CHECK(from_tau == doctest::Approx(poly_eval(h.poly_fit, x).real()).epsilon(1e-3));
        CHECK(from_tau == doctest::Approx(4 * b1 * x).epsilon(1e-3));
    }
}

TEST_CASE("parabolic frame") {
    const JacobiFamily lag = builtin_family("laguerre");
    const ParabolicData pd = parabolic_data(lag, 100000);
    const cplx z(0, 1);
    const ParabolicFrame fr = parabolic_frame(lag, pd, 10000, z);
    CHECK(fr.deviation <= 5 / std::sqrt(lag.gamma(10000)));
    double prev = INFINITY;
    for (index_t j : {100, 1000, 10000}) {
        const double dev = parabolic_frame(lag, pd, j, z).deviation;
        CHECK(dev < prev);
        prev = dev;
    }
    const cplx theta = std::sqrt(pd.alpha_last / lag.gamma(10000)) * std::sqrt(-pd.tau(z));
    CHECK(near(parabolic_Z(lag, pd, 10000, z).det(), pd.T0.det() * (std::exp(-theta) - std::exp(theta)), 1e-10));
    // tau(z) = -z lies on [0, inf) for z <= 0
    CHECK(code_of([&] { parabolic_Z(lag, pd, 10, -1.0); }) == ErrorCode::Domain);
}

TEST_CASE("levinson products") {
    const JacobiFamily h = builtin_family("hermite");
    const cplx z(0, 1);
    const EigenPair e = eigpair(transfer_X(h, 50, z));
    CHECK(std::abs(e.lambda_plus / e.lambda_minus) == doctest::Approx(std::norm(joukowsky_roots(e.branch.w).plus)).epsilon(1e-12));
    const LevinsonResult r = levinson_ratio_product(h, z, 1, 20000);
    CHECK(r.nondecreasing);
    CHECK(r.log_products.back() > r.log_products[r.log_products.size() / 2]);
    for (std::size_t k = 0; k < r.j.size(); k += 997) CHECK(r.log_products[k] >= r.lower_bound_sums[k] - 1e-9);
    // growth like sum 1/a_j ~ sqrt(j)
    CHECK(r.growth_exponent == doctest::Approx(0.5).epsilon(0.1));
    CHECK(code_of([&] { levinson_ratio_product(builtin_family("meixner"), z, 1, 10); }) == ErrorCode::Domain);
    CHECK(choose_start_index(h, {z, cplx(1, 1)}, 1, 50) >= 1);
}

TEST_CASE("asymptotic profile") {
    const JacobiFamily h = builtin_family("hermite");
    const cplx z(0, 1);
    const AsymptoticProfile p = asymptotic_profile(h, z, 0, 1, 4000);
    CHECK(p.converged);
    CHECK(std::abs(p.limit) > 0);
    // block b covers k in [2^b, 2^(b+1)); differences shrink beyond k = 128
    REQUIRE(p.block_max.size() > 9);
    for (std::size_t b = 8; b < p.block_max.size(); ++b) CHECK(p.block_max[b] < p.block_max[b - 1]);
    const AsymptoticProfile q = asymptotic_profile(h, z, 0, 1, 4000, 0.0, 3.0);
    CHECK(near(q.limit, 3.0 * p.limit, 1e-12));
    std::ostringstream out;
    write_profile_csv(out, p.k, p.values);
    CHECK_FALSE(out.str().empty());
}

}
