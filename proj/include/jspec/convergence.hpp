#pragma once

#include "jspec/cauchy.hpp"
#include "jspec/params.hpp"
#include "jspec/transfer.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace jspec {

// [lo, hi] minus a list of open holes
struct Interval {
    double lo = 0;
    double hi = 0;
    std::vector<std::pair<double, double>> holes;
};

struct ExperimentPlan {
    JacobiFamily family;
    NormalizerKind normalizer = NormalizerKind::SumAlphaOverA;
    std::vector<index_t> n_grid;
    std::vector<Interval> intervals;
    DensityModel model;
    double rel_tol = 0.1;  // checked at the largest n
};

struct DensityRow {
    index_t n;
    double rho_n;
    Interval interval;
    index_t count;
    double normalized;
    double predicted;
    double rel_err;
};

struct DensityReport {
    std::string family;
    SpectralCase variant = SpectralCase::Undecided;
    double rel_tol = 0;
    std::vector<DensityRow> rows;  // sorted by (n, interval index)
    bool slow_convergence = false;
    bool pass = false;
};

DensityReport density_experiment(const ExperimentPlan& plan);
void write_density_csv(std::ostream& out, const DensityReport& report);
std::string density_summary_json(const DensityReport& report);

// sup |F_emp - arcsine cdf| for nu_n / (n+1)
double cdf_compare_bounded(const JacobiFamily& family, index_t n);

// density of states of the periodic base; +inf at band edges, 0 off the bands
double periodic_band_density(const PeriodicBase& base, double x);
std::vector<std::pair<double, double>> periodic_bands(const PeriodicBase& base);
double periodic_band_mass(const PeriodicBase& base);

struct KernelRatioRow {
    double x;
    index_t n;
    double ratio;
};
struct KernelRatioReport {
    std::vector<KernelRatioRow> rows;
    std::vector<double> last_change;  // per x, relative change between the last two n
    bool positive = true;
};
KernelRatioReport kernel_ratio_experiment(const JacobiFamily& family, const std::vector<double>& x_grid,
                                          const std::vector<index_t>& n_grid, NormalizerKind kind);

struct GapCountReport {
    double lo, hi;
    std::vector<index_t> n;
    std::vector<index_t> counts;
    index_t max_count = 0;
    bool tail_constant = false;  // constant over the last half of n_grid
};
GapCountReport gap_count_experiment(const JacobiFamily& family, double lo, double hi, const std::vector<index_t>& n_grid);

struct TestFunction {
    enum class Kind { Hat, TruncatedGaussian, Weighted };
    Kind kind = Kind::Hat;
    double a = -1, b = 1, ramp = 0.5;          // hat: 1 on [a,b], linear ramps outside
    double center = 0, width = 1, cutoff = 4;  // truncated gaussian
    std::function<double(double)> f;           // weighted
    double weighted_bound = 0;                 // sup (1+x^2)|f|

    double operator()(double x) const;
    std::pair<double, double> support() const;
};

// integral of f against nu_n / rho_n, from the full spectrum of A_{n+1}
double normalized_counting_integral(const JacobiFamily& family, index_t n, NormalizerKind kind, const TestFunction& f);
// integral of f against the model density (numeric; reporting only)
double model_integral(const DensityModel& model, const TestFunction& f);

}  // namespace jspec
