#include "atoss/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "atoss/parallel.hpp"

namespace atoss::kern {

void affine_serial(const double* w, const double* b, const double* x,
                   double* y, size_t rows, size_t cols) {
  for (size_t r = 0; r < rows; ++r) {
    const double* wr = w + r * cols;
    double acc = b ? b[r] : 0.0;
    for (size_t c = 0; c < cols; ++c) acc += wr[c] * x[c];
    y[r] = acc;
  }
}

void affine_omp(const double* w, const double* b, const double* x, double* y,
                size_t rows, size_t cols) {
  par::parallel_for(rows, [&](size_t r) {
    const double* wr = w + r * cols;
    double acc = b ? b[r] : 0.0;
    for (size_t c = 0; c < cols; ++c) acc += wr[c] * x[c];
    y[r] = acc;
  });
}

void accum_outer_serial(double* grad_w, double* grad_b, const double* dy,
                        const double* x, double alpha, size_t rows,
                        size_t cols) {
  for (size_t r = 0; r < rows; ++r) {
    double g = alpha * dy[r];
    double* gr = grad_w + r * cols;
    for (size_t c = 0; c < cols; ++c) gr[c] += g * x[c];
    if (grad_b) grad_b[r] += g;
  }
}

void accum_outer_omp(double* grad_w, double* grad_b, const double* dy,
                     const double* x, double alpha, size_t rows, size_t cols) {
  par::parallel_for(rows, [&](size_t r) {
    double g = alpha * dy[r];
    double* gr = grad_w + r * cols;
    for (size_t c = 0; c < cols; ++c) gr[c] += g * x[c];
    if (grad_b) grad_b[r] += g;
  });
}

void affine_backward_input_serial(const double* w, const double* dy,
                                  double* dx, size_t rows, size_t cols) {
  for (size_t c = 0; c < cols; ++c) {
    double acc = 0.0;
    for (size_t r = 0; r < rows; ++r) acc += w[r * cols + c] * dy[r];
    dx[c] = acc;
  }
}

void affine_backward_input_omp(const double* w, const double* dy, double* dx,
                               size_t rows, size_t cols) {
  par::parallel_for(cols, [&](size_t c) {
    double acc = 0.0;
    for (size_t r = 0; r < rows; ++r) acc += w[r * cols + c] * dy[r];
    dx[c] = acc;
  });
}

void log_softmax(double* x, size_t n) {
  double mx = x[0];
  for (size_t i = 1; i < n; ++i) mx = std::max(mx, x[i]);
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) sum += std::exp(x[i] - mx);
  double lse = mx + std::log(sum);
  for (size_t i = 0; i < n; ++i) x[i] -= lse;
}

void affine(const double* w, const double* b, const double* x, double* y,
            size_t rows, size_t cols) {
  if (par::detail::use_parallel())
    affine_omp(w, b, x, y, rows, cols);
  else
    affine_serial(w, b, x, y, rows, cols);
}

void accum_outer(double* grad_w, double* grad_b, const double* dy,
                 const double* x, double alpha, size_t rows, size_t cols) {
  if (par::detail::use_parallel())
    accum_outer_omp(grad_w, grad_b, dy, x, alpha, rows, cols);
  else
    accum_outer_serial(grad_w, grad_b, dy, x, alpha, rows, cols);
}

void affine_backward_input(const double* w, const double* dy, double* dx,
                           size_t rows, size_t cols) {
  if (par::detail::use_parallel())
    affine_backward_input_omp(w, dy, dx, rows, cols);
  else
    affine_backward_input_serial(w, dy, dx, rows, cols);
}

}  // namespace atoss::kern
