#include "jspec/convergence.hpp"
#include "jspec/errors.hpp"
#include "jspec/spectra.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace jspec;

namespace {

constexpr double pi = 3.14159265358979323846;

ExperimentPlan plan_for(const char* name, std::vector<index_t> grid, std::vector<Interval> intervals, double tol) {
    const JacobiFamily f = builtin_family(name);
    const DensityModel m = predicted_model(f);
    return {f, m.normalizer, std::move(grid), std::move(intervals), m, tol};
}

}  // namespace

TEST_SUITE("convergence") {

TEST_CASE("hermite density experiment") {
    const DensityReport r = density_experiment(plan_for("hermite", {1000, 10000, 100000}, {{-1, 1, {}}, {0, 3, {}}}, 0.1));
    REQUIRE(r.rows.size() == 6);
    CHECK(r.variant == SpectralCase::I);
    CHECK(r.pass);
    CHECK(r.rows[0].predicted == doctest::Approx(1 / pi));
    CHECK(r.rows[1].predicted == doctest::Approx(3 / (2 * pi)));
    for (std::size_t k = 0; k < r.rows.size(); ++k) {
        const DensityRow& row = r.rows[k];
        CHECK(row.n == (index_t[]){1000, 10000, 100000}[k / 2]);
        CHECK(row.count == count_in_interval(make_table(builtin_family("hermite"), row.n + 1), row.interval.lo, row.interval.hi));
        if (k >= 2) CHECK(row.count >= r.rows[k - 2].count);
    }
    CHECK(r.rows[4].rel_err < r.rows[0].rel_err);
}

TEST_CASE("laguerre and synthetic density experiments") {
    const DensityReport l = density_experiment(plan_for("laguerre", {1000, 100000}, {{0, 1, {}}}, 0.1));
    CHECK(l.rows.back().predicted == doctest::Approx(1 / pi).epsilon(1e-3));
    CHECK(l.rows.back().rel_err < 0.1);
    const double d = 0.5;
    const DensityReport s = density_experiment(plan_for("synthetic_iia", {1000, 100000}, {{-10, 10, {{-d, d}}}}, 0.25));
    CHECK(s.rows.back().predicted == doctest::Approx((20 - 2 * d) / (2 * pi)).epsilon(2e-3));
    const index_t whole = count_in_interval(make_table(builtin_family("synthetic_iia"), 100001), -10, 10);
    const index_t hole = count_in_interval(make_table(builtin_family("synthetic_iia"), 100001), -d, d);
    CHECK(s.rows.back().count == whole - hole);
    std::ostringstream csv;
    write_density_csv(csv, l);
    const std::string text = csv.str();
    CHECK(text.substr(0, text.find('\n')) == "family,case,n,rho_n,interval_lo,interval_hi,count,normalized,predicted,rel_err");
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    const std::string js = density_summary_json(l);
    CHECK(js.find("\"pass\"") != std::string::npos);
}

TEST_CASE("arcsine comparison") {
    const JacobiFamily c = builtin_family("chebyshev");
    CHECK(cdf_compare_bounded(c, 1) <= 0.5);
    double prev = INFINITY;
    for (index_t n : {100, 1000, 5000}) {
        const double d = cdf_compare_bounded(c, n);
        CHECK(d < prev);
        prev = d;
    }
    CHECK(prev < 0.02);
}

TEST_CASE("periodic band density") {
    const PeriodicBase arc{1, {0.5}, {0.0}};
    CHECK(periodic_band_density(arc, 0.0) == doctest::Approx(1 / pi).epsilon(1e-13));
    CHECK(periodic_band_density(arc, 0.6) == doctest::Approx(1 / (pi * std::sqrt(1 - 0.36))).epsilon(1e-13));
    CHECK(periodic_band_density(arc, 1.5) == 0.0);
    CHECK(periodic_band_density(arc, 1.0) == INFINITY);
    const PeriodicBase two{2, {1.0, 0.5}, {0.0, 0.0}};
    const auto bands = periodic_bands(two);
    REQUIRE(bands.size() == 2);
    CHECK(bands[0].first == doctest::Approx(-bands[1].second).epsilon(1e-10));
    for (double x : {0.1, 0.7, 1.2, 1.45}) CHECK(periodic_band_density(two, x) == doctest::Approx(periodic_band_density(two, -x)).epsilon(1e-12));
    CHECK(periodic_band_density(two, bands[1].second + 0.1) == 0.0);
    CHECK(periodic_band_density(two, 0.5 * (bands[0].second + bands[1].first)) == 0.0);
    CHECK(std::abs(periodic_band_mass(two) - 1) < 1e-6);
    CHECK(std::abs(periodic_band_mass(PeriodicBase{3, {1.0, 2.0, 0.7}, {0.3, -1.0, 0.5}}) - 1) < 1e-6);
}

TEST_CASE("kernel ratios") {
    const KernelRatioReport c = kernel_ratio_experiment(builtin_family("chebyshev"), {0.0}, {10, 11, 1000}, NormalizerKind::Count);
    REQUIRE(c.rows.size() == 3);
    for (const KernelRatioRow& row : c.rows)
        CHECK(row.ratio == doctest::Approx(double((row.n + 2) / 2) / double(row.n + 1)).epsilon(1e-12));
    const KernelRatioReport h = kernel_ratio_experiment(builtin_family("hermite"), {-1.0, 0.0, 0.5}, {1000, 10000, 100000}, NormalizerKind::SumAlphaOverA);
    CHECK(h.positive);
    REQUIRE(h.last_change.size() == 3);
    for (double ch : h.last_change) CHECK(ch < 0.05);
}

TEST_CASE("gap counts") {
    const std::vector<index_t> grid{100, 1000, 10000, 100000};
    const GapCountReport l = gap_count_experiment(builtin_family("laguerre"), -2, -1, grid);
    for (index_t c : l.counts) CHECK(c == 0);
    const JacobiFamily m = builtin_family("meixner");
    for (index_t c : gap_count_experiment(m, -10, -5, grid).counts) CHECK(c == 0);
    const GapCountReport mx = gap_count_experiment(m, 0, 10, grid);
    CHECK(mx.tail_constant);
    CHECK(mx.max_count < 20);
    CHECK(mx.counts.back() == mx.counts[mx.counts.size() - 2]);
}

TEST_CASE("test functions") {
    TestFunction hat;
    CHECK(hat(0.0) == 1.0);
    CHECK(hat(1.25) == doctest::Approx(0.5));
    CHECK(hat(2.0) == 0.0);
    CHECK(hat.support() == std::pair{-1.5, 1.5});
    TestFunction g;
    g.kind = TestFunction::Kind::TruncatedGaussian;
    CHECK(g(0.0) == 1.0);
    CHECK(g(5.0) == 0.0);
    const DensityModel hm = predicted_model(builtin_family("hermite"));
    CHECK(model_integral(hm, hat) == doctest::Approx(2.5 / (2 * pi)).epsilon(1e-8));
    const double v = normalized_counting_integral(builtin_family("hermite"), 20000, hm.normalizer, hat);
    CHECK(v == doctest::Approx(2.5 / (2 * pi)).epsilon(0.1));
    const DensityModel lm = model_from_h(PeriodicBase{1, {1.0}, {2.0}}, SpectralCase::IIb, {0, -4, 0});
    TestFunction w;
    w.kind = TestFunction::Kind::Weighted;
    w.f = [](double x) { return 1 / (1 + x * x); };
    w.weighted_bound = 1;
    // int_0^inf dx / (2 pi sqrt(x) (1 + x^2)) = 1 / (2 sqrt 2)
    CHECK(model_integral(lm, w) == doctest::Approx(1 / (2 * std::sqrt(2.0))).epsilon(1e-6));
}

}
