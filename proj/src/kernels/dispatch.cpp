#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "algebroid/kernels.hpp"

namespace algebroid::kernels {
namespace {

struct Table {
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*combine3)(double, const double*, double, const double*, double, const double*, double*, std::size_t);
  double (*max_abs_diff)(const double*, const double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
};

constexpr Table kScalar{scalar::axpy, scalar::combine3, scalar::max_abs_diff, scalar::dot};
#if defined(__x86_64__) || defined(_M_X64)
constexpr Table kAvx2{avx2::axpy, avx2::combine3, avx2::max_abs_diff, avx2::dot};
#endif

Backend initial_backend() {
  if (const char* env = std::getenv("ALGEBROID_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Backend::Scalar;
    if (v == "avx2" && avx2_available()) return Backend::Avx2;
  }
  return avx2_available() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{initial_backend()};
  return backend;
}

const Table& table() {
#if defined(__x86_64__) || defined(_M_X64)
  if (current().load(std::memory_order_relaxed) == Backend::Avx2) return kAvx2;
#endif
  return kScalar;
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("kernel operands differ in length");
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

Backend active_backend() { return current().load(); }

void set_backend(Backend backend) {
  if (backend == Backend::Avx2 && !avx2_available()) throw std::invalid_argument("AVX2 not supported on this CPU");
  current().store(backend);
}

std::string_view backend_name(Backend backend) { return backend == Backend::Avx2 ? "avx2" : "scalar"; }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  check_sizes(x.size(), y.size());
  table().axpy(a, x.data(), y.data(), x.size());
}

void combine3(double a, std::span<const double> x, double b, std::span<const double> y, double c,
              std::span<const double> z, std::span<double> out) {
  check_sizes(x.size(), out.size());
  check_sizes(y.size(), out.size());
  check_sizes(z.size(), out.size());
  table().combine3(a, x.data(), b, y.data(), c, z.data(), out.data(), out.size());
}

double max_abs_diff(std::span<const double> x, std::span<const double> y) {
  check_sizes(x.size(), y.size());
  return table().max_abs_diff(x.data(), y.data(), x.size());
}

double dot(std::span<const double> x, std::span<const double> y) {
  check_sizes(x.size(), y.size());
  return table().dot(x.data(), y.data(), x.size());
}

}  // namespace algebroid::kernels
