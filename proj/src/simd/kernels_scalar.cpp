#include <cmath>

#include "ssep/simd.hpp"

namespace ssep::simd {
namespace {

double sum_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double max_abs_diff_scalar(const double* x, const double* y, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(x[i] - y[i]));
  return m;
}

void csr_matvec_scalar(const std::uint32_t* row_ptr, const std::uint32_t* col, const double* val,
                       std::size_t rows, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::uint32_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += val[k] * x[col[k]];
    y[r] = s;
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::scalar,        sum_scalar,         dot_scalar, axpy_scalar,
                                 max_abs_diff_scalar, csr_matvec_scalar};
  return table;
}

}  // namespace ssep::simd
