#pragma once

// PSNT tensor container:
//   "PSNT" | u16 version (=1) | u8 domain tag | u8 element type | u64 nx, ny, nt
//   followed by the row-major payload. Element type 0 stores each complex as
//   two little-endian f64 (re, im); type 1 stores one little-endian f64.
// Several records may be concatenated in one file (per-coil k-space, filter
// banks).

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <variant>
#include <vector>

#include "psr/volume.hpp"

namespace psr::io {

inline constexpr std::uint16_t kPsntVersion = 1;
inline constexpr std::size_t kPsntHeaderBytes = 32;

enum class ElementType : std::uint8_t { Complex = 0, Real = 1 };

struct PsntHeader {
  Domain domain = Domain::Image;
  ElementType element = ElementType::Complex;
  Dims dims{};
};

using Record = std::variant<ComplexVolume, RealVolume>;

void write(std::ostream& os, const ComplexVolume& v);
void write(std::ostream& os, const RealVolume& v);

/// Reads one record. Throws ValidationError on unknown magic, version, tag,
/// element type, or a truncated payload.
Record read(std::istream& is);
/// Reads records until end of stream; at least one record is required.
std::vector<Record> read_all(std::istream& is);

ComplexVolume as_complex(Record r);
RealVolume as_real(Record r);

void save(const std::filesystem::path& path, const ComplexVolume& v);
void save(const std::filesystem::path& path, const RealVolume& v);
void save_all(const std::filesystem::path& path, const std::vector<ComplexVolume>& vs);
std::vector<Record> load_all(const std::filesystem::path& path);
ComplexVolume load_complex(const std::filesystem::path& path);
RealVolume load_real(const std::filesystem::path& path);
std::vector<ComplexVolume> load_complex_all(const std::filesystem::path& path);

// Little-endian primitives shared with the parameter file format.
void put_u8(std::ostream& os, std::uint8_t v);
void put_u16(std::ostream& os, std::uint16_t v);
void put_u64(std::ostream& os, std::uint64_t v);
void put_f64(std::ostream& os, double v);
std::uint8_t get_u8(std::istream& is);
std::uint16_t get_u16(std::istream& is);
std::uint64_t get_u64(std::istream& is);
double get_f64(std::istream& is);

}  // namespace psr::io
