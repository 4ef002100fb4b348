#include "jspec/mat2.hpp"

#include "jspec/errors.hpp"

#include <algorithm>
#include <cmath>

namespace jspec {

Mat2C Mat2C::inverse() const {
    const cplx d = det();
    if (d == 0.0) throw Error(ErrorCode::Domain, "inverse of a singular 2x2 matrix");
    return {m22 / d, -m12 / d, -m21 / d, m11 / d};
}

double Mat2C::norm() const {
    return std::sqrt(std::norm(m11) + std::norm(m12) + std::norm(m21) + std::norm(m22));
}

double Mat2C::max_abs() const { return std::max({std::abs(m11), std::abs(m12), std::abs(m21), std::abs(m22)}); }

bool Mat2C::finite() const {
    auto ok = [](cplx c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); };
    return ok(m11) && ok(m12) && ok(m21) && ok(m22);
}

Mat2C operator*(const Mat2C& x, const Mat2C& y) {
    return {x.m11 * y.m11 + x.m12 * y.m21, x.m11 * y.m12 + x.m12 * y.m22,
            x.m21 * y.m11 + x.m22 * y.m21, x.m21 * y.m12 + x.m22 * y.m22};
}

Mat2C operator+(const Mat2C& x, const Mat2C& y) {
    return {x.m11 + y.m11, x.m12 + y.m12, x.m21 + y.m21, x.m22 + y.m22};
}

Mat2C operator-(const Mat2C& x, const Mat2C& y) {
    return {x.m11 - y.m11, x.m12 - y.m12, x.m21 - y.m21, x.m22 - y.m22};
}

Mat2C operator*(cplx s, const Mat2C& x) { return {s * x.m11, s * x.m12, s * x.m21, s * x.m22}; }

}  // namespace jspec
