// SPDX-License-Identifier: Apache-2.0

#include "irsofdm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace irsofdm {

namespace {

bool finite(const cplx& z) noexcept { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Twiddles exp(sign * j 2 pi k / N), k = 0..N-1.
std::vector<cplx> twiddles(std::size_t n, double sign)
{
    std::vector<cplx> w(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double arg = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        w[k] = {std::cos(arg), std::sin(arg)};
    }
    return w;
}

ComplexVec direct_transform(std::span<const cplx> x, double sign, double scale)
{
    const std::size_t n = x.size();
    if (n == 0) throw std::invalid_argument("dft: empty input");
    const auto w = twiddles(n, sign);
    // Skip the trailing zeros that zero-padded impulse responses carry.
    std::size_t support = n;
    while (support > 0 && x[support - 1] == cplx{}) --support;

    ComplexVec out(n);
    for (std::size_t i = 0; i < n; ++i) {
        cplx acc{};
        std::size_t idx = 0;
        for (std::size_t k = 0; k < support; ++k) {
            acc += x[k] * w[idx];
            idx += i;
            if (idx >= n) idx %= n;
        }
        out[i] = acc * scale;
    }
    return out;
}

} // namespace

ComplexVec::ComplexVec(std::vector<cplx> data) : v_(std::move(data))
{
    if (!all_finite()) throw std::invalid_argument("ComplexVec: non-finite element");
}

ComplexVec::ComplexVec(std::initializer_list<cplx> init) : ComplexVec(std::vector<cplx>(init)) {}

bool ComplexVec::all_finite() const noexcept
{
    return std::all_of(v_.begin(), v_.end(), finite);
}

ComplexVec ComplexMat::column(std::size_t c) const
{
    const auto s = col(c);
    return ComplexVec(std::vector<cplx>(s.begin(), s.end()));
}

void ComplexMat::set_column(std::size_t c, std::span<const cplx> x)
{
    if (x.size() != rows_) throw std::invalid_argument("ComplexMat::set_column: length mismatch");
    std::copy(x.begin(), x.end(), col(c).begin());
}

bool ComplexMat::all_finite() const noexcept
{
    return std::all_of(a_.begin(), a_.end(), finite);
}

ComplexVec dft(std::span<const cplx> x) { return direct_transform(x, -1.0, 1.0); }

ComplexVec idft(std::span<const cplx> X)
{
    return direct_transform(X, +1.0, 1.0 / static_cast<double>(X.size()));
}

ComplexMat dft_columns(const ComplexMat& A)
{
    ComplexMat out(A.rows(), A.cols());
    for (std::size_t c = 0; c < A.cols(); ++c) {
        const auto X = dft(A.col(c));
        out.set_column(c, X.span());
    }
    return out;
}

ComplexVec linear_convolve(std::span<const cplx> a, std::span<const cplx> b)
{
    if (a.empty() || b.empty()) throw std::invalid_argument("linear_convolve: empty operand");
    ComplexVec c(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

ComplexVec zero_pad(std::span<const cplx> x, std::size_t n)
{
    if (n < x.size())
        throw std::invalid_argument("zero_pad: target length " + std::to_string(n) + " shorter than input length " +
                                    std::to_string(x.size()));
    ComplexVec out(n);
    std::copy(x.begin(), x.end(), out.begin());
    return out;
}

double norm2(std::span<const cplx> x) noexcept
{
    double s = 0.0;
    for (const auto& z : x) s += std::norm(z);
    return s;
}

cplx inner(std::span<const cplx> x, std::span<const cplx> y) noexcept
{
    cplx s{};
    const std::size_t n = std::min(x.size(), y.size());
    for (std::size_t i = 0; i < n; ++i) s += std::conj(x[i]) * y[i];
    return s;
}

ComplexVec mat_vec_add(std::span<const cplx> x, const ComplexMat& A, std::span<const cplx> w)
{
    if (A.rows() != x.size() || A.cols() != w.size()) throw std::invalid_argument("mat_vec_add: dimension mismatch");
    ComplexVec y(x.size());
    std::copy(x.begin(), x.end(), y.begin());
    for (std::size_t c = 0; c < A.cols(); ++c) {
        if (w[c] == cplx{}) continue;
        const auto col = A.col(c);
        for (std::size_t r = 0; r < A.rows(); ++r) y[r] += col[r] * w[c];
    }
    return y;
}

} // namespace irsofdm
