#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

// Dense numeric kernels with a scalar reference and an AVX2 variant chosen
// at runtime. Setting SSEP_SIMD=scalar in the environment forces the
// reference path.

namespace ssep::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// Compressed sparse row matrix view. Column indices are 32-bit.
struct CsrView {
  std::span<const std::uint32_t> row_ptr;  // rows + 1 entries
  std::span<const std::uint32_t> col;
  std::span<const double> val;
};

struct KernelTable {
  Isa isa;
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  /// y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  /// max_i |x_i - y_i|
  double (*max_abs_diff)(const double* x, const double* y, std::size_t n);
  /// y = A x
  void (*csr_matvec)(const std::uint32_t* row_ptr, const std::uint32_t* col, const double* val,
                     std::size_t rows, const double* x, double* y);
};

const KernelTable& scalar_kernels();
/// nullptr when the CPU or the build lacks AVX2+FMA.
const KernelTable* avx2_kernels();
/// The table selected for this process (decided once, on first use).
const KernelTable& active();

inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }
inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}
inline double max_abs_diff(std::span<const double> x, std::span<const double> y) {
  return active().max_abs_diff(x.data(), y.data(), x.size());
}
inline void csr_matvec(const CsrView& a, std::span<const double> x, std::span<double> y) {
  active().csr_matvec(a.row_ptr.data(), a.col.data(), a.val.data(), a.row_ptr.size() - 1, x.data(),
                      y.data());
}

}  // namespace ssep::simd
