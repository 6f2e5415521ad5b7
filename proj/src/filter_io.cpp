#include "psr/filter_io.hpp"

#include "psr/error.hpp"
#include "psr/io.hpp"

namespace psr {

void save_filters(const std::filesystem::path& path, const FilterBank& filters) {
  const auto taps = filters.ps.taps();
  ComplexVolume t({taps.size(), 1, 1}, Domain::Image, {taps.begin(), taps.end()});
  const SpatialBank& bank = filters.s;
  ComplexVolume s({bank.kx(), bank.ky(), bank.count()}, Domain::KSpace);
  for (std::size_t f = 0; f < bank.count(); ++f) {
    const SpatialFilter& h = bank.filters()[f];
    for (std::size_t p = 0; p < h.kx(); ++p) {
      for (std::size_t q = 0; q < h.ky(); ++q) s(p, q, f) = h(p, q);
    }
  }
  io::save_all(path, {t, s});
}

FilterBank load_filters(const std::filesystem::path& path) {
  auto records = io::load_all(path);
  if (records.size() != 2) {
    throw ValidationError(path.string() + ": filter file needs a temporal and a spatial record");
  }
  ComplexVolume t = io::as_complex(std::move(records[0]));
  ComplexVolume s = io::as_complex(std::move(records[1]));
  if (t.dims().ny != 1 || t.dims().nt != 1) {
    throw ValidationError(path.string() + ": temporal filter record must be (L+1, 1, 1)");
  }
  FilterBank fb;
  fb.ps = TemporalFilter({t.data().begin(), t.data().end()});
  std::vector<SpatialFilter> bank;
  const Dims d = s.dims();
  for (std::size_t f = 0; f < d.nt; ++f) {
    std::vector<cx> taps(d.nx * d.ny);
    for (std::size_t p = 0; p < d.nx; ++p) {
      for (std::size_t q = 0; q < d.ny; ++q) taps[p * d.ny + q] = s(p, q, f);
    }
    bank.emplace_back(d.nx, d.ny, std::move(taps));
  }
  fb.s = SpatialBank(std::move(bank));
  return fb;
}

}  // namespace psr
