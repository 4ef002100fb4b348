#pragma once

#include "jspec/params.hpp"

#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace jspec {

// Diagonal b_0..b_{n-1} and squared off-diagonal a_0^2..a_{n-2}^2 of A_n.
struct TridiagonalTable {
    std::vector<double> diag;
    std::vector<double> offdiag_sq;
    double lower = 0;   // Gershgorin enclosure
    double upper = 0;
    double pivmin = 0;  // pivots below this magnitude are nudged

    index_t size() const { return index_t(diag.size()); }
};

TridiagonalTable make_table(const JacobiFamily& family, index_t n);
TridiagonalTable make_table(std::vector<double> diag, const std::vector<double>& offdiag);

struct SturmCount {
    index_t count;   // eigenvalues strictly below x
    index_t nudges;  // pivots replaced by +pivmin
};

SturmCount sturm_count(const TridiagonalTable& table, double x);
index_t sturm_count(const JacobiFamily& family, index_t n, double x);

// Counts for several shifts in one sweep over the table; identical arithmetic per shift
// to the scalar sturm_count, so results agree exactly.
void sturm_count_batch(const TridiagonalTable& table, const double* xs, index_t* counts, int m);

struct SpectrumResult {
    std::string family;
    index_t n = 0;
    std::vector<double> eigenvalues;
    double tol = 0;
    index_t nudges = 0;
};

struct SolverConfig {
    index_t max_full_spectrum = 200000;  // refuse full spectra beyond this size
};

// Batched bisection, OpenMP over groups of eigenvalues.
std::vector<double> bisect_eigenvalues(const TridiagonalTable& table, double tol);
// Eigenvalues k_begin <= k < k_end, bracketed by [lo, hi] (counts below lo <= k_begin, below hi >= k_end).
std::vector<double> bisect_eigenvalues(const TridiagonalTable& table, double tol, index_t k_begin, index_t k_end,
                                       double lo, double hi);
// Scalar reference; bitwise equal to bisect_eigenvalues.
std::vector<double> bisect_eigenvalues_serial(const TridiagonalTable& table, double tol);

SpectrumResult eigenvalues(const JacobiFamily& family, index_t n, double tol, const SolverConfig& config = {});
SpectrumResult eigenvalues_serial(const JacobiFamily& family, index_t n, double tol,
                                  const SolverConfig& config = {});

struct CountingQuery {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    index_t n = 1;
};

// eigenvalues of A_n in the open interval (lo, hi)
index_t count_in_interval(const JacobiFamily& family, const CountingQuery& query);
index_t count_in_interval(const TridiagonalTable& table, double lo, double hi);

double counting_integral(const SpectrumResult& spec, const std::function<double(double)>& f);

void write_spectrum_csv(std::ostream& out, const SpectrumResult& spec);
std::string spectrum_metadata_json(const SpectrumResult& spec);

}  // namespace jspec
