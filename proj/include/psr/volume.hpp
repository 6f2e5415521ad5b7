#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace psr {

using cx = std::complex<double>;

/// Domain tags as stored in the PSNT container.
enum class Domain : std::uint8_t { Image = 0, KSpace = 1, Mask = 2, Map = 3 };

const char* to_string(Domain d);

struct Dims {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t nt = 0;

  std::size_t size() const { return nx * ny * nt; }
  std::size_t frame_size() const { return nx * ny; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

std::string to_string(const Dims& d);

/// Throws DimensionError unless every extent is at least one.
void check_dims(const Dims& d);
/// Throws DimensionError when `a != b`; `what` names the operation.
void require_same_dims(const Dims& a, const Dims& b, const char* what);

/// Complex Nx x Ny x Nt array, row-major with the frame index fastest:
/// element (x, y, t) lives at (x * Ny + y) * Nt + t.
class ComplexVolume {
 public:
  ComplexVolume() = default;
  ComplexVolume(Dims dims, Domain domain);
  ComplexVolume(Dims dims, Domain domain, std::vector<cx> data);

  const Dims& dims() const { return dims_; }
  Domain domain() const { return domain_; }
  void set_domain(Domain d) { domain_ = d; }

  std::size_t size() const { return data_.size(); }
  std::size_t index(std::size_t x, std::size_t y, std::size_t t) const {
    return (x * dims_.ny + y) * dims_.nt + t;
  }
  cx& operator()(std::size_t x, std::size_t y, std::size_t t) { return data_[index(x, y, t)]; }
  const cx& operator()(std::size_t x, std::size_t y, std::size_t t) const {
    return data_[index(x, y, t)];
  }
  cx& operator[](std::size_t i) { return data_[i]; }
  const cx& operator[](std::size_t i) const { return data_[i]; }

  std::span<cx> data() { return data_; }
  std::span<const cx> data() const { return data_; }
  cx* raw() { return data_.data(); }
  const cx* raw() const { return data_.data(); }

  /// Zero volume with the same shape and tag.
  ComplexVolume zeros_like() const { return ComplexVolume(dims_, domain_); }
  void fill(cx value);

 private:
  Dims dims_{};
  Domain domain_ = Domain::Image;
  std::vector<cx> data_;
};

/// Real-valued companion used for masks and weight grids.
class RealVolume {
 public:
  RealVolume() = default;
  RealVolume(Dims dims, Domain domain);
  RealVolume(Dims dims, Domain domain, std::vector<double> data);

  const Dims& dims() const { return dims_; }
  Domain domain() const { return domain_; }
  std::size_t size() const { return data_.size(); }
  std::size_t index(std::size_t x, std::size_t y, std::size_t t) const {
    return (x * dims_.ny + y) * dims_.nt + t;
  }
  double& operator()(std::size_t x, std::size_t y, std::size_t t) { return data_[index(x, y, t)]; }
  double operator()(std::size_t x, std::size_t y, std::size_t t) const {
    return data_[index(x, y, t)];
  }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

 private:
  Dims dims_{};
  Domain domain_ = Domain::Mask;
  std::vector<double> data_;
};

// Whole-volume arithmetic. These route through the active SIMD kernel table.

/// <a, b> = sum conj(a) * b
cx dot(const ComplexVolume& a, const ComplexVolume& b);
/// Re <a, b>
double real_dot(const ComplexVolume& a, const ComplexVolume& b);
double norm2(const ComplexVolume& a);  // squared Frobenius norm
double norm(const ComplexVolume& a);
/// y += alpha * x
void axpy(ComplexVolume& y, cx alpha, const ComplexVolume& x);
void scale(ComplexVolume& a, cx s);
ComplexVolume operator+(const ComplexVolume& a, const ComplexVolume& b);
ComplexVolume operator-(const ComplexVolume& a, const ComplexVolume& b);
ComplexVolume operator*(cx s, const ComplexVolume& a);
/// Entrywise product with a real grid of the same dims.
void multiply(ComplexVolume& a, const RealVolume& w);
bool all_finite(const ComplexVolume& a);
/// max |a_i|, 0 for an empty volume.
double max_abs(const ComplexVolume& a);

}  // namespace psr
