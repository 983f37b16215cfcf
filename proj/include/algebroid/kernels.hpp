// Data-parallel inner loops shared by the field calculus and the Lie kernel.
//
// Every kernel exists as a portable scalar reference and, on x86-64, as an
// AVX2/FMA variant compiled with a function-level target attribute. The
// active variant is chosen once at startup from CPUID and can be pinned with
// set_backend() or the ALGEBROID_SIMD environment variable ("scalar"/"avx2").
#pragma once

#include <span>
#include <string_view>

namespace algebroid::kernels {

enum class Backend { Scalar, Avx2 };

bool avx2_available();
Backend active_backend();
/// Throws std::invalid_argument when the requested backend is not supported by this CPU.
void set_backend(Backend backend);
std::string_view backend_name(Backend backend);

// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

// out = a * x + b * y + c * z  (the three-point stencil shape)
void combine3(double a, std::span<const double> x, double b, std::span<const double> y, double c,
              std::span<const double> z, std::span<double> out);

// max_i |x_i - y_i|
double max_abs_diff(std::span<const double> x, std::span<const double> y);

// sum_i x_i * y_i
double dot(std::span<const double> x, std::span<const double> y);

namespace scalar {
void axpy(double a, const double* x, double* y, std::size_t n);
void combine3(double a, const double* x, double b, const double* y, double c, const double* z, double* out,
              std::size_t n);
double max_abs_diff(const double* x, const double* y, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void axpy(double a, const double* x, double* y, std::size_t n);
void combine3(double a, const double* x, double b, const double* y, double c, const double* z, double* out,
              std::size_t n);
double max_abs_diff(const double* x, const double* y, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
}  // namespace avx2
#endif

}  // namespace algebroid::kernels
