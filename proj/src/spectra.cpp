#include "jspec/spectra.hpp"

#include "jspec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace jspec {

namespace {

constexpr int kLanes = 8;

void finish_table(TridiagonalTable& t) {
    const index_t n = t.size();
    double scale = 0;
    t.lower = std::numeric_limits<double>::infinity();
    t.upper = -std::numeric_limits<double>::infinity();
    for (index_t k = 0; k < n; ++k) {
        const double left = k > 0 ? std::sqrt(t.offdiag_sq[k - 1]) : 0.0;
        const double right = k + 1 < n ? std::sqrt(t.offdiag_sq[k]) : 0.0;
        t.lower = std::min(t.lower, t.diag[k] - left - right);
        t.upper = std::max(t.upper, t.diag[k] + left + right);
        scale = std::max({scale, std::abs(t.diag[k]), right});
    }
    if (scale == 0) scale = 1;
    // widen so that count(lower) = 0 and count(upper) = n hold strictly
    const double pad = 4 * std::numeric_limits<double>::epsilon() * scale * double(n) + scale * 1e-14;
    t.lower -= pad;
    t.upper += pad;
    double emax = 1;
    for (double e2 : t.offdiag_sq) emax = std::max(emax, e2);
    t.pivmin = std::numeric_limits<double>::min() * emax;
}

inline double pivot(double diag, double x, double off_sq, double prev) { return (diag - x) - off_sq / prev; }

inline bool lane_active(double lo, double hi, double tol) {
    const double mid = 0.5 * (lo + hi);
    const double floor = 2 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi));
    return hi - lo > std::max(tol, floor) && mid > lo && mid < hi;
}

}  // namespace

TridiagonalTable make_table(const JacobiFamily& family, index_t n) {
    if (n < 1) throw Error(ErrorCode::Domain, "truncation size must be >= 1");
    TridiagonalTable t;
    t.diag.resize(n);
    t.offdiag_sq.resize(n - 1);
    for (index_t k = 0; k < n; ++k) {
        const JacobiParams p = family.params(k);
        t.diag[k] = p.b;
        if (k + 1 < n) t.offdiag_sq[k] = p.a * p.a;
    }
    finish_table(t);
    return t;
}

TridiagonalTable make_table(std::vector<double> diag, const std::vector<double>& offdiag) {
    if (diag.empty() || offdiag.size() + 1 != diag.size())
        throw Error(ErrorCode::Domain, "table needs n diagonal and n-1 off-diagonal entries");
    TridiagonalTable t;
    t.diag = std::move(diag);
    t.offdiag_sq.reserve(offdiag.size());
    for (double a : offdiag) {
        if (!(a > 0)) throw Error(ErrorCode::Domain, "off-diagonal entries must be positive");
        t.offdiag_sq.push_back(a * a);
    }
    finish_table(t);
    return t;
}

namespace {

// nudge +pivmin: eigenvalues strictly below x; -pivmin: eigenvalues <= x
SturmCount sturm_count_signed(const TridiagonalTable& t, double x, double nudge) {
    const double pm = t.pivmin;
    SturmCount out{0, 0};
    double d = t.diag[0] - x;
    if (std::abs(d) < pm) { d = nudge; ++out.nudges; }
    out.count += d < 0;
    const index_t n = t.size();
    for (index_t k = 1; k < n; ++k) {
        d = pivot(t.diag[k], x, t.offdiag_sq[k - 1], d);
        if (std::abs(d) < pm) { d = nudge; ++out.nudges; }
        out.count += d < 0;
    }
    return out;
}

}  // namespace

SturmCount sturm_count(const TridiagonalTable& t, double x) { return sturm_count_signed(t, x, t.pivmin); }

index_t sturm_count(const JacobiFamily& family, index_t n, double x) {
    return sturm_count(make_table(family, n), x).count;
}

namespace {

template <int W>
void sturm_lanes(const TridiagonalTable& t, const double* x, index_t* counts) {
    const double pm = t.pivmin;
    const double* dg = t.diag.data();
    const double* e2 = t.offdiag_sq.data();
    // counts kept in doubles (exact below 2^53) so the lane loop vectorizes
    double d[W], c[W];
    for (int s = 0; s < W; ++s) {
        double v = dg[0] - x[s];
        v = std::abs(v) < pm ? pm : v;
        d[s] = v;
        c[s] = v < 0 ? 1.0 : 0.0;
    }
    const index_t n = t.size();
    for (index_t k = 1; k < n; ++k) {
        const double dk = dg[k], ek = e2[k - 1];
        for (int s = 0; s < W; ++s) {
            double v = pivot(dk, x[s], ek, d[s]);
            v = std::abs(v) < pm ? pm : v;
            d[s] = v;
            c[s] += v < 0 ? 1.0 : 0.0;
        }
    }
    for (int s = 0; s < W; ++s) counts[s] = index_t(c[s]);
}

}  // namespace

void sturm_count_batch(const TridiagonalTable& t, const double* xs, index_t* counts, int m) {
    int i = 0;
    for (; i + kLanes <= m; i += kLanes) sturm_lanes<kLanes>(t, xs + i, counts + i);
    for (; i < m; ++i) counts[i] = sturm_count(t, xs[i]).count;
}

std::vector<double> bisect_eigenvalues_serial(const TridiagonalTable& t, double tol) {
    const index_t n = t.size();
    std::vector<double> out(n);
    for (index_t k = 0; k < n; ++k) {
        double lo = t.lower, hi = t.upper;
        while (lane_active(lo, hi, tol)) {
            const double mid = 0.5 * (lo + hi);
            if (sturm_count(t, mid).count <= k) lo = mid;
            else hi = mid;
        }
        out[k] = 0.5 * (lo + hi);
    }
    return out;
}

std::vector<double> bisect_eigenvalues(const TridiagonalTable& t, double tol) {
    return bisect_eigenvalues(t, tol, 0, t.size(), t.lower, t.upper);
}

std::vector<double> bisect_eigenvalues(const TridiagonalTable& t, double tol, index_t k_begin, index_t k_end,
                                       double lower, double upper) {
    if (k_begin < 0 || k_end > t.size() || k_begin > k_end)
        throw Error(ErrorCode::Domain, "bisect_eigenvalues: index range out of bounds");
    const index_t n = k_end - k_begin;
    std::vector<double> out(n);
    const index_t groups = (n + kLanes - 1) / kLanes;
#pragma omp parallel for schedule(dynamic, 4)
    for (index_t g = 0; g < groups; ++g) {
        const index_t k0 = k_begin + g * kLanes;
        const int width = int(std::min<index_t>(kLanes, k_end - k0));
        double lo[kLanes], hi[kLanes], mid[kLanes];
        index_t cnt[kLanes];
        bool active[kLanes];
        for (int s = 0; s < kLanes; ++s) {
            lo[s] = lower;
            hi[s] = upper;
            active[s] = s < width && lane_active(lo[s], hi[s], tol);
        }
        while (std::any_of(active, active + kLanes, [](bool b) { return b; })) {
            for (int s = 0; s < kLanes; ++s) mid[s] = 0.5 * (lo[s] + hi[s]);
            sturm_lanes<kLanes>(t, mid, cnt);
            for (int s = 0; s < kLanes; ++s) {
                if (!active[s]) continue;
                if (cnt[s] <= k0 + s) lo[s] = mid[s];
                else hi[s] = mid[s];
                active[s] = lane_active(lo[s], hi[s], tol);
            }
        }
        for (int s = 0; s < width; ++s) out[k0 - k_begin + s] = 0.5 * (lo[s] + hi[s]);
    }
    return out;
}

namespace {

SpectrumResult run_eigenvalues(const JacobiFamily& family, index_t n, double tol, const SolverConfig& config,
                               bool parallel) {
    if (n < 1) throw Error(ErrorCode::Domain, "eigenvalues: n must be >= 1");
    if (!(tol > 0)) throw Error(ErrorCode::Domain, "eigenvalues: tol must be positive");
    if (n > config.max_full_spectrum)
        throw Error(ErrorCode::BudgetExceeded, "full spectrum of size " + std::to_string(n) +
                                                   " exceeds the configured limit " +
                                                   std::to_string(config.max_full_spectrum));
    const TridiagonalTable t = make_table(family, n);
    SpectrumResult r;
    r.family = family.name();
    r.n = n;
    r.tol = tol;
    r.eigenvalues = parallel ? bisect_eigenvalues(t, tol) : bisect_eigenvalues_serial(t, tol);
    for (double y : r.eigenvalues) r.nudges += sturm_count(t, y).nudges;
    return r;
}

}  // namespace

SpectrumResult eigenvalues(const JacobiFamily& family, index_t n, double tol, const SolverConfig& config) {
    return run_eigenvalues(family, n, tol, config, true);
}

SpectrumResult eigenvalues_serial(const JacobiFamily& family, index_t n, double tol, const SolverConfig& config) {
    return run_eigenvalues(family, n, tol, config, false);
}

index_t count_in_interval(const TridiagonalTable& t, double lo, double hi) {
    if (!(lo < hi)) throw Error(ErrorCode::Domain, "counting query needs lo < hi");
    const index_t below_hi = hi >= t.upper ? t.size() : sturm_count(t, hi).count;
    const index_t upto_lo = lo <= t.lower ? 0 : sturm_count_signed(t, lo, -t.pivmin).count;
    return std::max<index_t>(0, below_hi - upto_lo);
}

index_t count_in_interval(const JacobiFamily& family, const CountingQuery& q) {
    if (!(q.lo < q.hi)) throw Error(ErrorCode::Domain, "counting query needs lo < hi");
    return count_in_interval(make_table(family, q.n), q.lo, q.hi);
}

double counting_integral(const SpectrumResult& spec, const std::function<double(double)>& f) {
    double s = 0;
    for (double y : spec.eigenvalues) s += f(y);
    return s;
}

void write_spectrum_csv(std::ostream& out, const SpectrumResult& spec) {
    out << "index,eigenvalue\n";
    out << std::setprecision(17);
    for (std::size_t k = 0; k < spec.eigenvalues.size(); ++k) out << k << ',' << spec.eigenvalues[k] << '\n';
}

std::string spectrum_metadata_json(const SpectrumResult& spec) {
    nlohmann::json j;
    j["family"] = spec.family;
    j["n"] = spec.n;
    j["tol"] = spec.tol;
    j["pivot_nudges"] = spec.nudges;
    return j.dump(2);
}

}  // namespace jspec
