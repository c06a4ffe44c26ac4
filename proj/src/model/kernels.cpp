#include "xpert/kernels.hpp"

#include <algorithm>
#include <cstddef>

namespace xpert::kernels {
namespace {

inline double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
#pragma omp simd reduction(+ : acc)
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

using Index = std::ptrdiff_t;

}  // namespace

namespace serial {

void linear_forward(std::span<const double> x, std::span<const double> w,
                    std::span<const double> b, std::size_t rows, std::size_t in, std::size_t out,
                    std::span<double> y) {
  for (std::size_t t = 0; t < rows; ++t) {
    for (std::size_t o = 0; o < out; ++o) {
      double acc = 0.0;
      for (std::size_t i = 0; i < in; ++i) acc += x[t * in + i] * w[o * in + i];
      y[t * out + o] = acc + (b.empty() ? 0.0 : b[o]);
    }
  }
}

void linear_backward(std::span<const double> x, std::span<const double> w,
                     std::span<const double> dy, std::size_t rows, std::size_t in, std::size_t out,
                     std::span<double> dx, std::span<double> dw, std::span<double> db) {
  for (std::size_t t = 0; t < rows; ++t) {
    for (std::size_t o = 0; o < out; ++o) {
      const double g = dy[t * out + o];
      if (!db.empty()) db[o] += g;
      for (std::size_t i = 0; i < in; ++i) {
        if (!dx.empty()) dx[t * in + i] += g * w[o * in + i];
        if (!dw.empty()) dw[o * in + i] += g * x[t * in + i];
      }
    }
  }
}

}  // namespace serial

namespace parallel {

void linear_forward(std::span<const double> x, std::span<const double> w,
                    std::span<const double> b, std::size_t rows, std::size_t in, std::size_t out,
                    std::span<double> y) {
  const Index n_rows = static_cast<Index>(rows);
#pragma omp parallel for schedule(static)
  for (Index t = 0; t < n_rows; ++t) {
    const double* xr = x.data() + t * in;
    double* yr = y.data() + t * out;
    for (std::size_t o = 0; o < out; ++o) {
      yr[o] = dot(xr, w.data() + o * in, in) + (b.empty() ? 0.0 : b[o]);
    }
  }
}

void linear_backward(std::span<const double> x, std::span<const double> w,
                     std::span<const double> dy, std::size_t rows, std::size_t in, std::size_t out,
                     std::span<double> dx, std::span<double> dw, std::span<double> db) {
  const Index n_rows = static_cast<Index>(rows);
  const Index n_out = static_cast<Index>(out);
  if (!dx.empty()) {
#pragma omp parallel for schedule(static)
    for (Index t = 0; t < n_rows; ++t) {
      for (std::size_t o = 0; o < out; ++o) {
        axpy(dy[t * out + o], w.data() + o * in, dx.data() + t * in, in);
      }
    }
  }
  if (!dw.empty() || !db.empty()) {
#pragma omp parallel for schedule(static)
    for (Index o = 0; o < n_out; ++o) {
      for (std::size_t t = 0; t < rows; ++t) {
        const double g = dy[t * out + o];
        if (!db.empty()) db[o] += g;
        if (!dw.empty()) axpy(g, x.data() + t * in, dw.data() + o * in, in);
      }
    }
  }
}

}  // namespace parallel

void linear_forward(Exec exec, std::span<const double> x, std::span<const double> w,
                    std::span<const double> b, std::size_t rows, std::size_t in, std::size_t out,
                    std::span<double> y) {
  if (exec == Exec::serial) {
    serial::linear_forward(x, w, b, rows, in, out, y);
  } else {
    parallel::linear_forward(x, w, b, rows, in, out, y);
  }
}

void linear_backward(Exec exec, std::span<const double> x, std::span<const double> w,
                     std::span<const double> dy, std::size_t rows, std::size_t in, std::size_t out,
                     std::span<double> dx, std::span<double> dw, std::span<double> db) {
  if (exec == Exec::serial) {
    serial::linear_backward(x, w, dy, rows, in, out, dx, dw, db);
  } else {
    parallel::linear_backward(x, w, dy, rows, in, out, dx, dw, db);
  }
}

void matmul_nt(Exec exec, const double* a, std::size_t lda, const double* b, std::size_t ldb,
               std::size_t m, std::size_t n, std::size_t k, double scale, double* c,
               std::size_t ldc) {
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t p = 0; p < k; ++p) acc += a[i * lda + p] * b[j * ldb + p];
        c[i * ldc + j] = acc * scale;
      }
    }
    return;
  }
  const Index rows = static_cast<Index>(m);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < n; ++j) c[i * ldc + j] = dot(a + i * lda, b + j * ldb, k) * scale;
  }
}

void matmul_nn(Exec exec, const double* a, std::size_t lda, const double* b, std::size_t ldb,
               std::size_t m, std::size_t n, std::size_t k, double* c, std::size_t ldc,
               bool accumulate) {
  const Index rows = static_cast<Index>(m);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (Index i = 0; i < rows; ++i) {
    double* ci = c + i * ldc;
    if (!accumulate) std::fill(ci, ci + n, 0.0);
    for (std::size_t p = 0; p < k; ++p) axpy(a[i * lda + p], b + p * ldb, ci, n);
  }
}

void matmul_tn(Exec exec, const double* a, std::size_t lda, const double* b, std::size_t ldb,
               std::size_t m, std::size_t n, std::size_t k, double* c, std::size_t ldc,
               bool accumulate) {
  const Index rows = static_cast<Index>(m);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (Index i = 0; i < rows; ++i) {
    double* ci = c + i * ldc;
    if (!accumulate) std::fill(ci, ci + n, 0.0);
    for (std::size_t p = 0; p < k; ++p) axpy(a[p * lda + i], b + p * ldb, ci, n);
  }
}

}  // namespace xpert::kernels
