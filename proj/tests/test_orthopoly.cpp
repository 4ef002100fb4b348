#include "jspec/errors.hpp"
#include "jspec/orthopoly.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace jspec;

namespace {

bool near(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

// naive recurrence, no scaling; fine for small n
cplx naive_p(const JacobiFamily& f, index_t n, cplx z) {
    cplx pm = 0, p = 1;
    for (index_t k = 0; k < n; ++k) {
        const cplx next = ((z - f.b(k)) * p - (k ? f.a(k - 1) : 0.0) * pm) / f.a(k);
        pm = p;
        p = next;
    }
    return p;
}

ScaledPair pair_from_values(const ScaledValue& x, const ScaledValue& y) {
    const double ls = std::max(x.log_scale, y.log_scale);
    return {x.mantissa * std::exp(x.log_scale - ls), y.mantissa * std::exp(y.log_scale - ls), ls};
}

}  // namespace

TEST_SUITE("orthopoly") {

TEST_CASE("polynomial values") {
    const JacobiFamily c = builtin_family("chebyshev");
    CHECK(near(eval_pn(c, 2, 1.0).true_u(), 3.0, 1e-14));
    CHECK(near(eval_pn(c, 2, cplx(0, 1)).true_u(), -5.0, 1e-14));
    for (const char* name : {"hermite", "laguerre", "meixner"}) CHECK(eval_pn(builtin_family(name), 0, cplx(0.3, 2)).true_u() == 1.0);
}

TEST_CASE("scaled evaluation matches naive recurrence") {
    for (const char* name : {"chebyshev", "hermite", "laguerre", "synthetic_iia"}) {
        const JacobiFamily f = builtin_family(name);
        for (cplx z : {cplx(0.4, 0), cplx(-1, 0.5), cplx(2, 3)})
            for (index_t n : {1, 5, 30}) CHECK(near(eval_pn(f, n, z).true_u(), naive_p(f, n, z), 1e-11));
    }
}

TEST_CASE("scaled pair invariant") {
    const ScaledPair p = eval_pn(builtin_family("hermite"), 1000000, cplx(0, 1));
    const double m = std::max(std::abs(p.u), std::abs(p.v));
    CHECK(m >= 0.5);
    CHECK(m <= 2.0);
    CHECK(std::isfinite(p.log_scale));
    CHECK(p.log_scale > 710);  // the unscaled value would overflow
}

TEST_CASE("derivatives") {
    const ScaledQuad q = eval_pn_derivative(builtin_family("chebyshev"), 2, cplx(0, 1));
    CHECK(near(q.dp * std::exp(q.log_scale), cplx(0, 8), 1e-14));
    const ScaledQuad q0 = eval_pn_derivative(builtin_family("laguerre"), 0, 2.0);
    CHECK(q0.dp == 0.0);
    const ScaledQuad h = eval_pn_derivative(builtin_family("hermite"), 1, cplx(0.7, 0.1));
    CHECK(near(h.dp * std::exp(h.log_scale), std::sqrt(2.0), 1e-14));
    // finite-difference oracle
    const JacobiFamily f = builtin_family("laguerre");
    const cplx z(1.5, 0.5);
    const double hh = 1e-6;
    const cplx fd = (naive_p(f, 9, z + hh) - naive_p(f, 9, z - hh)) / (2 * hh);
    const ScaledQuad g = eval_pn_derivative(f, 9, z);
    CHECK(near(g.dp * std::exp(g.log_scale), fd, 1e-7));
}

TEST_CASE("christoffel darboux diagonal") {
    CHECK(cd_kernel_diag(builtin_family("chebyshev"), 2, 0.0).value() == doctest::Approx(2.0));
    CHECK(cd_kernel_diag(builtin_family("laguerre"), 0, 3.7).value() == doctest::Approx(1.0));
    CHECK(cd_kernel_diag(builtin_family("hermite"), 1, 0.0).value() == doctest::Approx(1.0));
    // U_k(0)^2 sums to ceil((n+1)/2)
    const JacobiFamily c = builtin_family("chebyshev");
    for (index_t n : {7, 100, 1001}) CHECK(cd_kernel_diag(c, n, 0.0).value() == doctest::Approx(double((n + 2) / 2)));
    const KernelDiag big = cd_kernel_diag(builtin_family("hermite"), 200000, 30.0);
    CHECK(std::isfinite(big.log_value));
    CHECK(cd_kernel_ratio(c, 999, 0.0, NormalizerKind::Count) == doctest::Approx(0.5));
}

TEST_CASE("gauss quadrature") {
    const JacobiFamily c = builtin_family("chebyshev");
    const QuadratureRule q = gauss_quadrature(c, 1);
    REQUIRE(q.nodes.size() == 2);
    CHECK(q.nodes[0] == doctest::Approx(-0.5));
    CHECK(q.nodes[1] == doctest::Approx(0.5));
    CHECK(q.weights[0] == doctest::Approx(0.5));
    CHECK(q.weights[1] == doctest::Approx(0.5));
    CHECK(q.weights[0] * 0.25 + q.weights[1] * 0.25 == doctest::Approx(0.25));
    for (const char* name : {"hermite", "laguerre", "meixner"}) {
        const QuadratureRule r = gauss_quadrature(builtin_family(name), 20);
        double s = 0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i) {
            s += r.weights[i];
            CHECK(r.weights[i] > 0);
            if (i) CHECK(r.nodes[i] > r.nodes[i - 1]);
            CHECK(r.weights[i] * cd_kernel_diag(builtin_family(name), 20, r.nodes[i]).value() == doctest::Approx(1.0));
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
    // hermite moments of exp(-x^2)/sqrt(pi): 1/2, 3/4
    const QuadratureRule h = gauss_quadrature(builtin_family("hermite"), 5);
    double m2 = 0, m4 = 0;
    for (std::size_t i = 0; i < h.nodes.size(); ++i) {
        m2 += h.weights[i] * std::pow(h.nodes[i], 2);
        m4 += h.weights[i] * std::pow(h.nodes[i], 4);
    }
    CHECK(m2 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m4 == doctest::Approx(0.75).epsilon(1e-12));
    std::ostringstream out;
    write_quadrature_csv(out, q);
    CHECK(out.str().rfind("node,weight\n", 0) == 0);
}

TEST_CASE("wronskian") {
    const JacobiFamily c = builtin_family("chebyshev");
    const cplx z(0.3, 0.2);
    const ScaledPair p = eval_pn(c, 0, z), q = second_kind_start(c);
    CHECK(near(wronskian(p, q, c.a(0)), 1.0, 1e-15));
    CHECK(std::abs(wronskian(p, p, c.a(0))) == 0.0);
    ScaledPair p2 = p;
    p2.u *= 2.0;
    p2.v *= 2.0;
    CHECK(near(wronskian(p2, q, c.a(0)), 2.0 * wronskian(p, q, c.a(0)), 1e-15));
}

TEST_CASE("wronskian constant along forward solutions") {
    // real x in the oscillatory region: no cancellation between growing solutions
    for (const char* name : {"chebyshev", "hermite"}) {
        const JacobiFamily f = builtin_family(name);
        const double x = 0.3;
        const cplx w0 = wronskian(eval_pn(f, 0, x), second_kind_start(f), f.a(0));
        for (index_t m : {1, 10, 100, 1000, 10000}) {
            const ScaledPair u = eval_pn(f, m, x);
            const ScaledPair v = propagate(f, second_kind_start(f), 0, m, x);
            CHECK(near(wronskian(u, v, f.a(m)), w0, 1e-10));
        }
    }
}

TEST_CASE("start from eta") {
    const JacobiFamily f = builtin_family("laguerre");
    const cplx z(0.5, 1);
    const ScaledPair s = start_from_eta(f, 0.0, 1.0, z);
    CHECK(near(s.true_u(), 1.0, 1e-15));
    CHECK(near(s.true_v(), (z - f.b(0)) / f.a(0), 1e-15));
    CHECK(near(propagate(f, s, 0, 12, z).true_u(), naive_p(f, 12, z), 1e-11));
}

TEST_CASE("minimal solution") {
    const JacobiFamily h = builtin_family("hermite");
    const cplx z(0, 1);
    const MinimalSolution m = minimal_solution(h, z, default_n_back(50), 50);
    CHECK(m.values[0].value() == cplx(1.0));
    CHECK_FALSE(m.unstable);
    const MinimalSolution m2 = minimal_solution(h, z, 2 * default_n_back(50), 50);
    CHECK(std::abs(m.values[5].value() - m2.values[5].value()) < 1e-10 * std::abs(m2.values[5].value()));
    // Wronskian with p is nonzero and constant (p grows, u- decays: no cancellation)
    const cplx w1 = wronskian(eval_pn(h, 1, z), pair_from_values(m.values[1], m.values[2]), h.a(1));
    CHECK(std::abs(w1) > 1e-3);
    for (index_t k : {5, 20, 40}) {
        const cplx wk = wronskian(eval_pn(h, k, z), pair_from_values(m.values[k], m.values[k + 1]), h.a(k));
        CHECK(near(wk, w1, 1e-9));
    }
    // decays relative to p
    CHECK(std::abs(m.values[40].value()) < std::abs(m.values[10].value()));
    CHECK_THROWS_AS(minimal_solution(h, 0.5, 100, 10), Error);
}

}
