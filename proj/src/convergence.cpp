#include "jspec/convergence.hpp"

#include "jspec/errors.hpp"
#include "jspec/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>
#include <json.hpp>

namespace jspec {

namespace {

void check_grid(const std::vector<index_t>& n_grid) {
    if (n_grid.empty()) throw Error(ErrorCode::Config, "n_grid is empty");
    for (std::size_t k = 0; k < n_grid.size(); ++k)
        if (n_grid[k] < 1 || (k > 0 && n_grid[k] <= n_grid[k - 1]))
            throw Error(ErrorCode::Config, "n_grid must be positive and strictly increasing");
}

index_t count_interval(const TridiagonalTable& t, const Interval& I) {
    index_t c = count_in_interval(t, I.lo, I.hi);
    for (const auto& [a, b] : I.holes) {
        const double u = std::max(a, I.lo), v = std::min(b, I.hi);
        if (u < v) c -= count_in_interval(t, u, v);
    }
    return c;
}

double model_interval(const DensityModel& m, const Interval& I) {
    double s = model_mass(m, I.lo, I.hi);
    for (const auto& [a, b] : I.holes) {
        const double u = std::max(a, I.lo), v = std::min(b, I.hi);
        if (u < v) s -= model_mass(m, u, v);
    }
    return s;
}

}  // namespace

DensityReport density_experiment(const ExperimentPlan& plan) {
    check_grid(plan.n_grid);
    if (plan.intervals.empty()) throw Error(ErrorCode::Config, "density experiment needs at least one interval");
    for (const Interval& I : plan.intervals)
        if (!(I.lo < I.hi)) throw Error(ErrorCode::Config, "interval needs lo < hi");
    DensityReport rep;
    rep.family = plan.family.name();
    rep.variant = plan.model.variant;
    rep.rel_tol = plan.rel_tol;
    const std::vector<double> rho_all = rho_sequence(plan.family, plan.normalizer, plan.n_grid.back());
    std::vector<double> predicted;
    for (const Interval& I : plan.intervals) predicted.push_back(model_interval(plan.model, I));

    for (index_t n : plan.n_grid) {
        const TridiagonalTable t = make_table(plan.family, n + 1);
        for (std::size_t i = 0; i < plan.intervals.size(); ++i) {
            DensityRow r;
            r.n = n;
            r.rho_n = rho_all[n];
            r.interval = plan.intervals[i];
            r.count = count_interval(t, plan.intervals[i]);
            r.normalized = double(r.count) / r.rho_n;
            r.predicted = predicted[i];
            r.rel_err = std::abs(r.normalized - r.predicted) / std::abs(r.predicted);
            rep.rows.push_back(r);
        }
    }

    rep.pass = true;
    const std::size_t ni = plan.intervals.size(), nn = plan.n_grid.size();
    for (std::size_t i = 0; i < ni; ++i) {
        const DensityRow& last = rep.rows[(nn - 1) * ni + i];
        if (!(last.rel_err < plan.rel_tol)) rep.pass = false;
        // over the last half of the grid the error should not grow
        for (std::size_t k = nn / 2; k + 1 < nn; ++k)
            if (rep.rows[(k + 1) * ni + i].rel_err > rep.rows[k * ni + i].rel_err) rep.slow_convergence = true;
    }
    return rep;
}

void write_density_csv(std::ostream& out, const DensityReport& rep) {
    out << "family,case,n,rho_n,interval_lo,interval_hi,count,normalized,predicted,rel_err\n";
    out.precision(17);
    for (const DensityRow& r : rep.rows)
        out << rep.family << ',' << case_name(rep.variant) << ',' << r.n << ',' << r.rho_n << ',' << r.interval.lo << ','
            << r.interval.hi << ',' << r.count << ',' << r.normalized << ',' << r.predicted << ',' << r.rel_err << '\n';
}

std::string density_summary_json(const DensityReport& rep) {
    nlohmann::json j;
    j["family"] = rep.family;
    j["case"] = case_name(rep.variant);
    j["rel_tol"] = rep.rel_tol;
    j["pass"] = rep.pass;
    j["slow_convergence"] = rep.slow_convergence;
    nlohmann::json rows = nlohmann::json::array();
    for (const DensityRow& r : rep.rows) {
        nlohmann::json holes = nlohmann::json::array();
        for (const auto& [a, b] : r.interval.holes) holes.push_back({a, b});
        rows.push_back({{"n", r.n}, {"interval", {r.interval.lo, r.interval.hi}}, {"holes", holes},
                        {"count", r.count}, {"normalized", r.normalized}, {"predicted", r.predicted},
                        {"rel_err", r.rel_err}});
    }
    j["rows"] = rows;
    return j.dump(2);
}

double cdf_compare_bounded(const JacobiFamily& family, index_t n) {
    if (n < 1) throw Error(ErrorCode::Domain, "cdf_compare_bounded needs n >= 1");
    // 1e-11 moves the cdf by < 1e-8 even at the edge nodes
    const SpectrumResult spec = eigenvalues(family, n + 1, 1e-11);
    const double m = double(spec.eigenvalues.size());
    auto F = [](double x) {
        if (x <= -1) return 0.0;
        if (x >= 1) return 1.0;
        return 0.5 + std::asin(x) / std::numbers::pi;
    };
    // the sup is attained at a jump of F_emp
    double d = 0;
    for (std::size_t k = 0; k < spec.eigenvalues.size(); ++k) {
        const double f = F(spec.eigenvalues[k]);
        d = std::max({d, std::abs(f - double(k) / m), std::abs(f - double(k + 1) / m)});
    }
    return d;
}

double periodic_band_density(const PeriodicBase& base, double x) {
    const Mat2C X = periodic_X(base, 0, x);
    const double disc = X.discr().real();
    if (disc > 0) return 0.0;
    if (disc == 0) return std::numeric_limits<double>::infinity();
    const double dtr = periodic_X_derivative(base, 0, x).trace().real();
    return std::abs(dtr) / (std::numbers::pi * base.N * std::sqrt(-disc));
}

std::vector<std::pair<double, double>> periodic_bands(const PeriodicBase& base) {
    double amax = 0, blo = base.beta_at(0), bhi = base.beta_at(0);
    for (int j = 0; j < base.N; ++j) {
        amax = std::max(amax, base.alpha_at(j));
        blo = std::min(blo, base.beta_at(j));
        bhi = std::max(bhi, base.beta_at(j));
    }
    const double lo = blo - 2 * amax - 1e-9, hi = bhi + 2 * amax + 1e-9;
    auto disc = [&](double x) { return periodic_X(base, 0, x).discr().real(); };
    const int samples = 4000 * base.N;
    std::vector<double> edges;
    double xp = lo, fp = disc(lo);
    for (int k = 1; k <= samples; ++k) {
        const double x = lo + (hi - lo) * k / samples;
        const double f = disc(x);
        if (f == 0) {
            edges.push_back(x);
        } else if ((fp < 0) != (f < 0) && fp != 0) {
            std::uintmax_t it = 200;
            const auto r = boost::math::tools::toms748_solve(disc, xp, x, fp, f,
                                                             boost::math::tools::eps_tolerance<double>(52), it);
            edges.push_back(0.5 * (r.first + r.second));
        }
        xp = x;
        fp = f;
    }
    std::vector<std::pair<double, double>> bands;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k)
        if (disc(0.5 * (edges[k] + edges[k + 1])) < 0) bands.emplace_back(edges[k], edges[k + 1]);
    return bands;
}

double periodic_band_mass(const PeriodicBase& base) {
    boost::math::quadrature::tanh_sinh<double> ts;
    double total = 0;
    for (const auto& [a, b] : periodic_bands(base)) {
        auto f = [&](double x) {
            const double v = periodic_band_density(base, x);
            return std::isfinite(v) ? v : 0.0;
        };
        total += ts.integrate(f, a, b);
    }
    return total;
}

KernelRatioReport kernel_ratio_experiment(const JacobiFamily& family, const std::vector<double>& x_grid,
                                          const std::vector<index_t>& n_grid, NormalizerKind kind) {
    check_grid(n_grid);
    KernelRatioReport rep;
    const std::vector<double> rho_all = rho_sequence(family, kind, n_grid.back());
    for (double x : x_grid) {
        double prev = 0, cur = 0;
        for (index_t n : n_grid) {
            prev = cur;
            cur = cd_kernel_diag(family, n, x).value() / rho_all[n];
            if (!(cur > 0)) rep.positive = false;
            rep.rows.push_back({x, n, cur});
        }
        rep.last_change.push_back(n_grid.size() > 1 ? std::abs(cur - prev) / std::abs(cur) : 0.0);
    }
    return rep;
}

GapCountReport gap_count_experiment(const JacobiFamily& family, double lo, double hi, const std::vector<index_t>& n_grid) {
    check_grid(n_grid);
    if (!(lo < hi)) throw Error(ErrorCode::Config, "gap count interval needs lo < hi");
    GapCountReport rep{lo, hi, {}, {}, 0, false};
    for (index_t n : n_grid) {
        const index_t c = count_in_interval(family, CountingQuery{lo, hi, n + 1});
        rep.n.push_back(n);
        rep.counts.push_back(c);
        rep.max_count = std::max(rep.max_count, c);
    }
    const std::size_t start = rep.counts.size() / 2;
    rep.tail_constant = std::all_of(rep.counts.begin() + start, rep.counts.end(),
                                    [&](index_t c) { return c == rep.counts.back(); });
    return rep;
}

double TestFunction::operator()(double x) const {
    switch (kind) {
        case Kind::Hat:
            if (x >= a && x <= b) return 1.0;
            if (x < a) return std::max(0.0, 1 - (a - x) / ramp);
            return std::max(0.0, 1 - (x - b) / ramp);
        case Kind::TruncatedGaussian: {
            const double u = (x - center) / width;
            return std::abs(u) <= cutoff ? std::exp(-0.5 * u * u) : 0.0;
        }
        case Kind::Weighted:
            return f(x);
    }
    return 0.0;
}

std::pair<double, double> TestFunction::support() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (kind) {
        case Kind::Hat: return {a - ramp, b + ramp};
        case Kind::TruncatedGaussian: return {center - cutoff * width, center + cutoff * width};
        case Kind::Weighted: return {-inf, inf};
    }
    return {-inf, inf};
}

double normalized_counting_integral(const JacobiFamily& family, index_t n, NormalizerKind kind, const TestFunction& f) {
    const auto [lo, hi] = f.support();
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        const SpectrumResult spec = eigenvalues(family, n + 1, 1e-12);
        return counting_integral(spec, [&](double x) { return f(x); }) / rho(family, kind, n);
    }
    // only the eigenvalues inside the support contribute
    const TridiagonalTable t = make_table(family, n + 1);
    const double a = std::clamp(lo, t.lower, t.upper), b = std::clamp(hi, t.lower, t.upper);
    const index_t k0 = sturm_count(t, a).count, k1 = sturm_count(t, b).count;
    double s = 0;
    for (double y : bisect_eigenvalues(t, 1e-12, k0, k1, a, b)) s += f(y);
    return s / rho(family, kind, n);
}

double model_integral(const DensityModel& model, const TestFunction& f) {
    auto [lo, hi] = f.support();
    std::vector<double> cuts{lo, hi};
    for (const auto& [a, b] : model.lambda_minus) {
        if (a > lo && a < hi) cuts.push_back(a);
        if (b > lo && b < hi) cuts.push_back(b);
    }
    if (f.kind == TestFunction::Kind::Hat) {
        if (f.a > lo && f.a < hi) cuts.push_back(f.a);
        if (f.b > lo && f.b < hi) cuts.push_back(f.b);
    }
    std::sort(cuts.begin(), cuts.end());
    boost::math::quadrature::tanh_sinh<double> ts;
    double total = 0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        if (!(cuts[k] < cuts[k + 1])) continue;
        auto g = [&](double x) {
            const double d = closed_form_density(model, x);
            return std::isfinite(d) ? d * f(x) : 0.0;
        };
        total += ts.integrate(g, cuts[k], cuts[k + 1]);
    }
    return total;
}

}  // namespace jspec
