// Dense kernels behind the trainable seq2seq backend. Each kernel comes in a
// serial reference version and an OpenMP version parallelized over output
// rows; every row is an independent serial dot product, so the two produce
// bit-identical results. The benchmark target compares them.
#pragma once

#include <cstddef>
#include <vector>

namespace atoss::kern {

// y = W x + b, W is rows x cols in row-major order.
void affine_serial(const double* w, const double* b, const double* x,
                   double* y, size_t rows, size_t cols);
void affine_omp(const double* w, const double* b, const double* x, double* y,
                size_t rows, size_t cols);

// grad_w += alpha * outer(dy, x); grad_b += alpha * dy.
void accum_outer_serial(double* grad_w, double* grad_b, const double* dy,
                        const double* x, double alpha, size_t rows,
                        size_t cols);
void accum_outer_omp(double* grad_w, double* grad_b, const double* dy,
                     const double* x, double alpha, size_t rows, size_t cols);

// dx = W^T dy (column-wise dot products; parallel over columns).
void affine_backward_input_serial(const double* w, const double* dy,
                                  double* dx, size_t rows, size_t cols);
void affine_backward_input_omp(const double* w, const double* dy, double* dx,
                               size_t rows, size_t cols);

// In-place log-softmax over a vector; returns nothing, serial by design
// (single small vector, called per decoding step).
void log_softmax(double* x, size_t n);

// Dispatch: picks the OpenMP kernels when par::threads() > 1.
void affine(const double* w, const double* b, const double* x, double* y,
            size_t rows, size_t cols);
void accum_outer(double* grad_w, double* grad_b, const double* dy,
                 const double* x, double alpha, size_t rows, size_t cols);
void affine_backward_input(const double* w, const double* dy, double* dx,
                           size_t rows, size_t cols);

}  // namespace atoss::kern
