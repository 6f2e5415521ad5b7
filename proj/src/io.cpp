#include "psr/io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "psr/error.hpp"

namespace psr::io {

namespace {

constexpr std::array<char, 4> kMagic{'P', 'S', 'N', 'T'};
// Guards against absurd allocations from corrupt headers.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 34;

void put_bytes(std::ostream& os, std::uint64_t v, int count) {
  for (int i = 0; i < count; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint64_t get_bytes(std::istream& is, int count) {
  std::uint64_t v = 0;
  for (int i = 0; i < count; ++i) {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) throw ValidationError("PSNT: unexpected end of data");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

void write_header(std::ostream& os, const PsntHeader& h) {
  os.write(kMagic.data(), kMagic.size());
  put_u16(os, kPsntVersion);
  put_u8(os, static_cast<std::uint8_t>(h.domain));
  put_u8(os, static_cast<std::uint8_t>(h.element));
  put_u64(os, h.dims.nx);
  put_u64(os, h.dims.ny);
  put_u64(os, h.dims.nt);
}

PsntHeader read_header(std::istream& is) {
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  if (is.gcount() != 4) throw ValidationError("PSNT: truncated header");
  if (magic != kMagic) throw ValidationError("PSNT: bad magic bytes");
  const std::uint16_t version = get_u16(is);
  if (version != kPsntVersion) {
    throw ValidationError("PSNT: unsupported version " + std::to_string(version));
  }
  const std::uint8_t tag = get_u8(is);
  if (tag > 3) throw ValidationError("PSNT: unknown domain tag " + std::to_string(tag));
  const std::uint8_t element = get_u8(is);
  if (element > 1) throw ValidationError("PSNT: unknown element type " + std::to_string(element));
  PsntHeader h;
  h.domain = static_cast<Domain>(tag);
  h.element = static_cast<ElementType>(element);
  h.dims.nx = get_u64(is);
  h.dims.ny = get_u64(is);
  h.dims.nt = get_u64(is);
  check_dims(h.dims);
  if (h.dims.nx > kMaxElements || h.dims.ny > kMaxElements || h.dims.nt > kMaxElements ||
      h.dims.size() > kMaxElements || h.dims.size() / h.dims.nt / h.dims.ny != h.dims.nx) {
    throw ValidationError("PSNT: implausible dims " + to_string(h.dims));
  }
  return h;
}

}  // namespace

void put_u8(std::ostream& os, std::uint8_t v) { put_bytes(os, v, 1); }
void put_u16(std::ostream& os, std::uint16_t v) { put_bytes(os, v, 2); }
void put_u64(std::ostream& os, std::uint64_t v) { put_bytes(os, v, 8); }
void put_f64(std::ostream& os, double v) { put_bytes(os, std::bit_cast<std::uint64_t>(v), 8); }
std::uint8_t get_u8(std::istream& is) { return static_cast<std::uint8_t>(get_bytes(is, 1)); }
std::uint16_t get_u16(std::istream& is) { return static_cast<std::uint16_t>(get_bytes(is, 2)); }
std::uint64_t get_u64(std::istream& is) { return get_bytes(is, 8); }
double get_f64(std::istream& is) { return std::bit_cast<double>(get_bytes(is, 8)); }

void write(std::ostream& os, const ComplexVolume& v) {
  write_header(os, {v.domain(), ElementType::Complex, v.dims()});
  for (const cx& z : v.data()) {
    put_f64(os, z.real());
    put_f64(os, z.imag());
  }
  if (!os) throw IoError("PSNT: write failed");
}

void write(std::ostream& os, const RealVolume& v) {
  write_header(os, {v.domain(), ElementType::Real, v.dims()});
  for (double x : v.data()) put_f64(os, x);
  if (!os) throw IoError("PSNT: write failed");
}

Record read(std::istream& is) {
  const PsntHeader h = read_header(is);
  if (h.element == ElementType::Complex) {
    std::vector<cx> data(h.dims.size());
    for (cx& z : data) {
      const double re = get_f64(is);
      const double im = get_f64(is);
      z = {re, im};
    }
    return ComplexVolume(h.dims, h.domain, std::move(data));
  }
  std::vector<double> data(h.dims.size());
  for (double& x : data) x = get_f64(is);
  return RealVolume(h.dims, h.domain, std::move(data));
}

std::vector<Record> read_all(std::istream& is) {
  std::vector<Record> out;
  while (is.peek() != std::char_traits<char>::eof()) out.push_back(read(is));
  if (out.empty()) throw ValidationError("PSNT: empty file");
  return out;
}

ComplexVolume as_complex(Record r) {
  if (auto* c = std::get_if<ComplexVolume>(&r)) return std::move(*c);
  throw ValidationError("PSNT: expected a complex record, found a real one");
}

RealVolume as_real(Record r) {
  if (auto* v = std::get_if<RealVolume>(&r)) return std::move(*v);
  throw ValidationError("PSNT: expected a real record, found a complex one");
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return is;
}

}  // namespace

void save(const std::filesystem::path& path, const ComplexVolume& v) {
  auto os = open_out(path);
  write(os, v);
}

void save(const std::filesystem::path& path, const RealVolume& v) {
  auto os = open_out(path);
  write(os, v);
}

void save_all(const std::filesystem::path& path, const std::vector<ComplexVolume>& vs) {
  auto os = open_out(path);
  for (const auto& v : vs) write(os, v);
}

std::vector<Record> load_all(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_all(is);
}

ComplexVolume load_complex(const std::filesystem::path& path) {
  auto records = load_all(path);
  if (records.size() != 1) {
    throw ValidationError(path.string() + ": expected one record, found " +
                          std::to_string(records.size()));
  }
  return as_complex(std::move(records.front()));
}

RealVolume load_real(const std::filesystem::path& path) {
  auto records = load_all(path);
  if (records.size() != 1) {
    throw ValidationError(path.string() + ": expected one record, found " +
                          std::to_string(records.size()));
  }
  return as_real(std::move(records.front()));
}

std::vector<ComplexVolume> load_complex_all(const std::filesystem::path& path) {
  std::vector<ComplexVolume> out;
  for (auto& r : load_all(path)) out.push_back(as_complex(std::move(r)));
  return out;
}

}  // namespace psr::io
