// SPDX-License-Identifier: Apache-2.0
//
// Complex-vector primitives shared by the channel, protocol and optimizer
// modules: an unnormalized forward DFT, its inverse, linear convolution and
// zero padding.

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace irsofdm {

using cplx = std::complex<double>;

/// Fixed-length vector of complex baseband samples.
class ComplexVec {
public:
    ComplexVec() = default;
    /// Zero vector of length n.
    explicit ComplexVec(std::size_t n) : v_(n) {}
    /// Takes ownership of `data`; throws std::invalid_argument on NaN/Inf.
    explicit ComplexVec(std::vector<cplx> data);
    ComplexVec(std::initializer_list<cplx> init);

    std::size_t size() const noexcept { return v_.size(); }
    cplx& operator[](std::size_t i) noexcept { return v_[i]; }
    const cplx& operator[](std::size_t i) const noexcept { return v_[i]; }

    auto begin() noexcept { return v_.begin(); }
    auto end() noexcept { return v_.end(); }
    auto begin() const noexcept { return v_.begin(); }
    auto end() const noexcept { return v_.end(); }

    std::span<cplx> span() noexcept { return v_; }
    std::span<const cplx> span() const noexcept { return v_; }

    bool all_finite() const noexcept;

    friend bool operator==(const ComplexVec&, const ComplexVec&) = default;

private:
    std::vector<cplx> v_;
};

/// Dense column-major complex matrix.
class ComplexMat {
public:
    ComplexMat() = default;
    ComplexMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    cplx& operator()(std::size_t r, std::size_t c) noexcept { return a_[c * rows_ + r]; }
    const cplx& operator()(std::size_t r, std::size_t c) const noexcept { return a_[c * rows_ + r]; }

    std::span<cplx> col(std::size_t c) noexcept { return {a_.data() + c * rows_, rows_}; }
    std::span<const cplx> col(std::size_t c) const noexcept { return {a_.data() + c * rows_, rows_}; }

    ComplexVec column(std::size_t c) const;
    void set_column(std::size_t c, std::span<const cplx> x);

    bool all_finite() const noexcept;

    friend bool operator==(const ComplexMat&, const ComplexMat&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> a_;
};

/// X[n] = sum_k x[k] exp(-j 2 pi n k / N).
ComplexVec dft(std::span<const cplx> x);
/// x[k] = (1/N) sum_n X[n] exp(+j 2 pi n k / N).
ComplexVec idft(std::span<const cplx> X);
/// Forward DFT applied to every column.
ComplexMat dft_columns(const ComplexMat& A);

/// Full linear convolution, length a.size() + b.size() - 1.
ComplexVec linear_convolve(std::span<const cplx> a, std::span<const cplx> b);

/// Copies x into a length-n vector; throws std::invalid_argument if n < x.size().
ComplexVec zero_pad(std::span<const cplx> x, std::size_t n);

/// Squared Euclidean norm.
double norm2(std::span<const cplx> x) noexcept;
/// x^H y.
cplx inner(std::span<const cplx> x, std::span<const cplx> y) noexcept;
/// y = x + A * w.
ComplexVec mat_vec_add(std::span<const cplx> x, const ComplexMat& A, std::span<const cplx> w);

} // namespace irsofdm
