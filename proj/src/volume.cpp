#include "psr/volume.hpp"

#include <algorithm>
#include <cmath>

#include "psr/error.hpp"
#include "psr/simd/kernels.hpp"

namespace psr {

const char* to_string(Domain d) {
  switch (d) {
    case Domain::Image: return "image";
    case Domain::KSpace: return "kspace";
    case Domain::Mask: return "mask";
    case Domain::Map: return "map";
  }
  return "unknown";
}

std::string to_string(const Dims& d) {
  return std::to_string(d.nx) + "x" + std::to_string(d.ny) + "x" + std::to_string(d.nt);
}

void check_dims(const Dims& d) {
  if (d.nx == 0 || d.ny == 0 || d.nt == 0) {
    throw DimensionError("volume dims must be >= 1, got " + to_string(d));
  }
}

void require_same_dims(const Dims& a, const Dims& b, const char* what) {
  if (!(a == b)) {
    throw DimensionError(std::string(what) + ": dimension mismatch " + to_string(a) + " vs " +
                         to_string(b));
  }
}

ComplexVolume::ComplexVolume(Dims dims, Domain domain)
    : dims_(dims), domain_(domain), data_((check_dims(dims), dims.size())) {}

ComplexVolume::ComplexVolume(Dims dims, Domain domain, std::vector<cx> data)
    : dims_(dims), domain_(domain), data_(std::move(data)) {
  check_dims(dims);
  if (data_.size() != dims.size()) {
    throw DimensionError("payload length " + std::to_string(data_.size()) + " does not match " +
                         to_string(dims));
  }
}

void ComplexVolume::fill(cx value) { std::fill(data_.begin(), data_.end(), value); }

RealVolume::RealVolume(Dims dims, Domain domain)
    : dims_(dims), domain_(domain), data_((check_dims(dims), dims.size()), 0.0) {}

RealVolume::RealVolume(Dims dims, Domain domain, std::vector<double> data)
    : dims_(dims), domain_(domain), data_(std::move(data)) {
  check_dims(dims);
  if (data_.size() != dims.size()) {
    throw DimensionError("payload length " + std::to_string(data_.size()) + " does not match " +
                         to_string(dims));
  }
}

cx dot(const ComplexVolume& a, const ComplexVolume& b) {
  require_same_dims(a.dims(), b.dims(), "dot");
  return simd::active().dot(a.raw(), b.raw(), a.size());
}

double real_dot(const ComplexVolume& a, const ComplexVolume& b) { return dot(a, b).real(); }

double norm2(const ComplexVolume& a) { return simd::active().norm2(a.raw(), a.size()); }

double norm(const ComplexVolume& a) { return std::sqrt(norm2(a)); }

void axpy(ComplexVolume& y, cx alpha, const ComplexVolume& x) {
  require_same_dims(y.dims(), x.dims(), "axpy");
  simd::active().axpy(y.raw(), alpha, x.raw(), y.size());
}

void scale(ComplexVolume& a, cx s) { simd::active().scale(a.raw(), s, a.size()); }

ComplexVolume operator+(const ComplexVolume& a, const ComplexVolume& b) {
  ComplexVolume out = a;
  axpy(out, 1.0, b);
  return out;
}

ComplexVolume operator-(const ComplexVolume& a, const ComplexVolume& b) {
  require_same_dims(a.dims(), b.dims(), "subtract");
  ComplexVolume out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

ComplexVolume operator*(cx s, const ComplexVolume& a) {
  ComplexVolume out = a;
  scale(out, s);
  return out;
}

void multiply(ComplexVolume& a, const RealVolume& w) {
  require_same_dims(a.dims(), w.dims(), "multiply");
  simd::active().mul_real(a.raw(), w.data().data(), a.size());
}

bool all_finite(const ComplexVolume& a) {
  return std::all_of(a.data().begin(), a.data().end(), [](const cx& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

double max_abs(const ComplexVolume& a) {
  double m = 0.0;
  for (const cx& v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace psr
