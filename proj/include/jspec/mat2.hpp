#pragma once

#include <complex>

namespace jspec {

using cplx = std::complex<double>;

struct Mat2C {
    cplx m11, m12, m21, m22;
    const char* label = nullptr;

    static Mat2C identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2C diag(cplx d1, cplx d2) { return {d1, 0.0, 0.0, d2}; }

    cplx det() const { return m11 * m22 - m12 * m21; }
    cplx trace() const { return m11 + m22; }
    // (tr)^2 - 4 det, written to avoid cancellation when Y is close to a multiple of Id
    cplx discr() const {
        const cplx d = m11 - m22;
        return d * d + 4.0 * m12 * m21;
    }
    Mat2C inverse() const;
    double norm() const;  // Frobenius
    double max_abs() const;
    bool finite() const;
};

Mat2C operator*(const Mat2C& x, const Mat2C& y);
Mat2C operator+(const Mat2C& x, const Mat2C& y);
Mat2C operator-(const Mat2C& x, const Mat2C& y);
Mat2C operator*(cplx s, const Mat2C& x);

}  // namespace jspec
