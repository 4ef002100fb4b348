#pragma once

#include "jspec/mat2.hpp"
#include "jspec/orthopoly.hpp"
#include "jspec/params.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace jspec {

// ---- transfer matrices

Mat2C transfer_B(const JacobiFamily& family, index_t n, cplx z);
Mat2C transfer_B_derivative(const JacobiFamily& family, index_t n);
// X_n = B_{n+N-1} ... B_n, n >= 1
Mat2C transfer_X(const JacobiFamily& family, index_t n, cplx z);
// d/dz X_n(z)
Mat2C transfer_X_derivative(const JacobiFamily& family, index_t n, cplx z);

Mat2C periodic_B(const PeriodicBase& base, index_t j, cplx x);
Mat2C periodic_X(const PeriodicBase& base, index_t n, cplx x);
Mat2C periodic_X_derivative(const PeriodicBase& base, index_t n, cplx x);

// ---- Joukowsky roots of xi^2 - 2 w xi + 1 = 0

// sqrt(w-1) sqrt(w+1), holomorphic off [-1,1]; on [-1,1] the limit from the upper half-plane
cplx glued_sqrt(cplx w);

struct JoukowskyRoots {
    cplx plus;
    cplx minus;
};
JoukowskyRoots joukowsky_roots(cplx w);

struct XiModulus {
    double value;
    std::optional<double> gap_bound;  // lower bound for value - 1 when Im w != 0
};
XiModulus xi_modulus(cplx w);

// ---- eigenvalues of 2x2 matrices

struct BranchMeta {
    cplx sqrt_det;
    cplx w;                  // tr / (2 sqrt det)
    bool boundary_limit;     // w on [-1,1], upper half-plane limit taken
};

struct EigenPair {
    cplx lambda_plus;
    cplx lambda_minus;
    std::optional<cplx> zeta_plus;
    std::optional<cplx> zeta_minus;
    BranchMeta branch;
};

EigenPair eigpair(const Mat2C& Y, double tol = 1e-12);
// scaled eigenvalues zeta = gscale * (lambda - eps_shift)
EigenPair eigpair_scaled(const Mat2C& Y, double gscale, double eps_shift, double tol = 1e-12);
// (lambda_plus)' / lambda_plus along Y(t) with Y'(t) = Yprime
cplx eigpair_derivative(const Mat2C& Y, const Mat2C& Yprime, double tol = 1e-12);

struct Diagonalization {
    Mat2C C;
    Mat2C D;
    double recon_error;  // ||Y - C D C^-1|| / ||Y||
};
Diagonalization diagonalize(const Mat2C& Y, double tol = 1e-12);

// ---- case classification

enum class SpectralCase { I, IIa, IIb, III, Undecided };
const char* case_name(SpectralCase c);

struct CaseClass {
    SpectralCase variant;
    int epsilon;  // sign of tr X_0(0); 0 when not applicable
    double trace0;
    double margin;  // | |trace0| - 2 |
    double identity_distance;  // max |X_0(0) - eps Id| entry
};

CaseClass classify(const JacobiFamily& family, index_t probe_n = 0, double tol_class = 1e-6);
CaseClass classify_base(const PeriodicBase& base, double tol_class = 1e-6);

// ---- discriminant limit h

struct HPoint {
    cplx z;
    std::vector<std::pair<index_t, cplx>> samples;  // (j, scale_j * discr X_{jN}(z))
    cplx extrapolated;
    bool richardson_used;
};

struct HEstimate {
    SpectralCase variant;
    std::vector<HPoint> points;
    std::vector<double> poly_fit;  // c0 + c1 x + c2 x^2 over real grid points
    double residual;               // max |fit - extrapolated| over real grid points
};

HEstimate h_estimate(const JacobiFamily& family, const std::vector<cplx>& z_grid, index_t j_max);
cplx poly_eval(const std::vector<double>& coeffs, cplx z);
cplx poly_derivative(const std::vector<double>& coeffs, cplx z);

// ---- parabolic (case IIb) frame

struct ParabolicData {
    int epsilon = 0;
    int t_flag = 0;
    double S = 0;
    double U = 0;
    double trace_derivative = 0;  // tr X'_0(0)
    double alpha_last = 0;        // alpha_{N-1}
    std::vector<double> s_residues;
    std::vector<double> u_residues;
    Mat2C T0;
    double conjugacy_error = 0;  // max |X_0(0) - eps T0 J T0^-1| entry

    cplx tau(cplx z) const;
    cplx upsilon(cplx z) const;
};

ParabolicData parabolic_data(const JacobiFamily& family, index_t n_probe, double tail_tol = 1e-2);

struct ParabolicFrame {
    Mat2C Z;
    Mat2C Y;
    double deviation;  // ||eps Y - Id||
};

Mat2C parabolic_Z(const JacobiFamily& family, const ParabolicData& pd, index_t j, cplx z);
ParabolicFrame parabolic_frame(const JacobiFamily& family, const ParabolicData& pd, index_t j, cplx z);

// ---- Levinson products and asymptotic profiles

// Y_j = X_{jN} (cases I, IIa) or the parabolic frame's Y_j (IIb)
Mat2C levinson_step_matrix(const JacobiFamily& family, SpectralCase variant, const ParabolicData* pd, index_t j,
                           cplx z);

// smallest j >= floor beyond which eigpair succeeds at every probe (scan up to scan_max)
index_t choose_start_index(const JacobiFamily& family, const std::vector<cplx>& probes, index_t floor,
                           index_t scan_max);

struct LevinsonResult {
    index_t M = 1;
    std::vector<index_t> j;
    std::vector<double> log_products;      // log prod_{M<=i<=j} |lambda+/lambda-|
    std::vector<double> lower_bound_sums;  // sum_{M<=i<=j} 2 log(1 + gap bound)
    double growth_exponent = 0;            // slope of log(log-product) against log j, second half
    bool nondecreasing = true;
};

LevinsonResult levinson_ratio_product(const JacobiFamily& family, cplx z, index_t M, index_t j_max);

struct AsymptoticProfile {
    std::vector<index_t> k;
    std::vector<cplx> values;  // u_{kN+i} / prod_{M<=j<k} lambda_j^+
    cplx limit;
    double tail_difference;  // relative Cauchy difference near k_max
    std::vector<double> block_max;  // max difference over dyadic blocks of k
    bool converged;
};

AsymptoticProfile asymptotic_profile(const JacobiFamily& family, cplx z, int residue, index_t M, index_t k_max,
                                     cplx eta0 = 0.0, cplx eta1 = 1.0);

void write_profile_csv(std::ostream& out, const std::vector<index_t>& k, const std::vector<cplx>& values);
void write_h_estimate_csv(std::ostream& out, const HEstimate& h);
std::string h_estimate_json(const HEstimate& h);

}  // namespace jspec
