#pragma once

#include <cstddef>
#include <span>

namespace xpert::kernels {

/// Dense kernels used by the transformer. Every kernel has a plain serial
/// reference and an OpenMP version that assigns each output element to a
/// single thread, so its result does not depend on the thread count. The
/// OpenMP version vectorizes its sums and may differ from the reference in
/// the last bits.
enum class Exec { serial, parallel };

/// y[rows x out] = x[rows x in] * w^T + b, with w stored [out x in]. `b` may
/// be empty.
void linear_forward(Exec exec, std::span<const double> x, std::span<const double> w,
                    std::span<const double> b, std::size_t rows, std::size_t in, std::size_t out,
                    std::span<double> y);

/// Accumulates dx += dy * w, dw += dy^T * x, db += column sums of dy. Any of
/// dx, dw, db may be empty to skip it.
void linear_backward(Exec exec, std::span<const double> x, std::span<const double> w,
                     std::span<const double> dy, std::size_t rows, std::size_t in, std::size_t out,
                     std::span<double> dx, std::span<double> dw, std::span<double> db);

/// c[m x n] = a[m x k] * b[n x k]^T * scale (both operands row-major, b read
/// by rows). Row strides allow head slices of a packed matrix.
void matmul_nt(Exec exec, const double* a, std::size_t lda, const double* b, std::size_t ldb,
               std::size_t m, std::size_t n, std::size_t k, double scale, double* c,
               std::size_t ldc);

/// c[m x n] (+)= a[m x k] * b[k x n]; `accumulate` selects += over =.
void matmul_nn(Exec exec, const double* a, std::size_t lda, const double* b, std::size_t ldb,
               std::size_t m, std::size_t n, std::size_t k, double* c, std::size_t ldc,
               bool accumulate);

/// c[m x n] (+)= a[k x m]^T * b[k x n].
void matmul_tn(Exec exec, const double* a, std::size_t lda, const double* b, std::size_t ldb,
               std::size_t m, std::size_t n, std::size_t k, double* c, std::size_t ldc,
               bool accumulate);

namespace serial {
void linear_forward(std::span<const double> x, std::span<const double> w,
                    std::span<const double> b, std::size_t rows, std::size_t in, std::size_t out,
                    std::span<double> y);
void linear_backward(std::span<const double> x, std::span<const double> w,
                     std::span<const double> dy, std::size_t rows, std::size_t in, std::size_t out,
                     std::span<double> dx, std::span<double> dw, std::span<double> db);
}  // namespace serial

namespace parallel {
void linear_forward(std::span<const double> x, std::span<const double> w,
                    std::span<const double> b, std::size_t rows, std::size_t in, std::size_t out,
                    std::span<double> y);
void linear_backward(std::span<const double> x, std::span<const double> w,
                     std::span<const double> dy, std::size_t rows, std::size_t in, std::size_t out,
                     std::span<double> dx, std::span<double> dw, std::span<double> db);
}  // namespace parallel

}  // namespace xpert::kernels
