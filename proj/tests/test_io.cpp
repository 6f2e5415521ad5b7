#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "psr/error.hpp"
#include "psr/filter_io.hpp"
#include "psr/io.hpp"
#include "psr/ps_model.hpp"
#include "support.hpp"

using namespace psr;

namespace {

std::string bytes_of(const ComplexVolume& v) {
  std::ostringstream os;
  io::write(os, v);
  return os.str();
}

io::Record read_bytes(const std::string& s) {
  std::istringstream is(s);
  return io::read(is);
}

}  // namespace

TEST_CASE("complex and real records round-trip exactly") {
  const ComplexVolume v = test::random_volume({3, 4, 5}, 1, Domain::KSpace);
  const ComplexVolume back = io::as_complex(read_bytes(bytes_of(v)));
  CHECK(back.domain() == Domain::KSpace);
  CHECK(test::bit_equal(back, v));

  RealVolume r({2, 3, 2}, Domain::Mask);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = 0.25 * double(i) - 1.0;
  std::ostringstream os;
  io::write(os, r);
  CHECK(os.str().size() == io::kPsntHeaderBytes + 8 * r.size());
  std::istringstream is(os.str());
  const RealVolume rb = io::as_real(io::read(is));
  CHECK(rb.domain() == Domain::Mask);
  CHECK(std::equal(rb.data().begin(), rb.data().end(), r.data().begin(), r.data().end()));
}

TEST_CASE("header layout is little-endian and fixed size") {
  const ComplexVolume v({2, 1, 3}, Domain::Image);
  const std::string b = bytes_of(v);
  REQUIRE(b.size() == 32 + 16 * 6);
  CHECK(b.substr(0, 4) == "PSNT");
  CHECK(b[4] == 1);
  CHECK(b[5] == 0);
  CHECK(b[6] == 0);
  CHECK(b[7] == 0);
  CHECK(b[8] == 2);
  CHECK(b[16] == 1);
  CHECK(b[24] == 3);
  for (int i : {9, 10, 15, 17, 23, 25, 31}) CHECK(b[i] == 0);
}

TEST_CASE("concatenated records read back in order") {
  std::ostringstream os;
  const ComplexVolume a = test::random_volume({2, 2, 2}, 1), b = test::random_volume({3, 1, 1}, 2);
  io::write(os, a);
  io::write(os, b);
  std::istringstream is(os.str());
  auto all = io::read_all(is);
  REQUIRE(all.size() == 2);
  CHECK(test::bit_equal(io::as_complex(all[0]), a));
  CHECK(test::bit_equal(io::as_complex(all[1]), b));
}

TEST_CASE("malformed input is rejected") {
  const std::string good = bytes_of(test::random_volume({2, 2, 1}, 3));
  auto corrupt = [&](std::size_t at, char value) {
    std::string s = good;
    s[at] = value;
    return s;
  };
  CHECK_THROWS_AS(read_bytes(corrupt(0, 'X')), ValidationError);
  CHECK_THROWS_AS(read_bytes(corrupt(4, 2)), ValidationError);
  CHECK_THROWS_AS(read_bytes(corrupt(6, 4)), ValidationError);
  CHECK_THROWS_AS(read_bytes(corrupt(7, 2)), ValidationError);
  CHECK_THROWS_AS(read_bytes(good.substr(0, good.size() - 1)), ValidationError);
  CHECK_THROWS_AS(read_bytes(good.substr(0, 20)), ValidationError);
  CHECK_THROWS_AS(read_bytes(corrupt(8, 0)), DimensionError);
  CHECK_THROWS_AS(read_bytes(corrupt(15, 0x7f)), ValidationError);
  std::istringstream empty;
  CHECK_THROWS_AS(io::read_all(empty), ValidationError);
  CHECK_THROWS_AS(io::as_real(read_bytes(good)), ValidationError);
}

TEST_CASE("missing files raise I/O errors") {
  CHECK_THROWS_AS(io::load_complex("/nonexistent/dir/x.psnt"), IoError);
  CHECK_THROWS_AS(io::save("/nonexistent/dir/x.psnt", ComplexVolume({1, 1, 1}, Domain::Image)),
                  IoError);
}

TEST_CASE("filter bank files round-trip") {
  const auto dir = std::filesystem::temp_directory_path() / "psr_test_io";
  std::filesystem::create_directories(dir);
  FilterBank fb{TemporalFilter(test::random_taps(4, 5)),
                SpatialBank({SpatialFilter(2, 3, test::random_taps(6, 6)),
                             SpatialFilter(2, 3, test::random_taps(6, 7))})};
  save_filters(dir / "f.psnt", fb);
  const FilterBank back = load_filters(dir / "f.psnt");
  REQUIRE(back.ps.size() == 4);
  for (std::size_t j = 0; j < 4; ++j) CHECK(back.ps[j] == fb.ps[j]);
  REQUIRE(back.s.count() == 2);
  for (std::size_t f = 0; f < 2; ++f)
    for (std::size_t p = 0; p < 2; ++p)
      for (std::size_t q = 0; q < 3; ++q) CHECK(back.s.filters()[f](p, q) == fb.s.filters()[f](p, q));
  io::save(dir / "one.psnt", test::random_volume({4, 1, 1}, 1));
  CHECK_THROWS_AS(load_filters(dir / "one.psnt"), ValidationError);
  std::filesystem::remove_all(dir);
}
