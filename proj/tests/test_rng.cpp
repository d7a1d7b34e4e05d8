#include "liftadmm/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using liftadmm::Philox;

TEST_CASE("philox4x32-10 known-answer vectors") {
  // Reference vectors from the Random123 test suite.
  auto out = Philox::block({0, 0, 0, 0}, {0, 0});
  CHECK(out[0] == 0x6627e8d5u);
  CHECK(out[1] == 0xe169c58du);
  CHECK(out[2] == 0xbc57ac4cu);
  CHECK(out[3] == 0x9b00dbd8u);

  out = Philox::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                      {0xffffffffu, 0xffffffffu});
  CHECK(out[0] == 0x408f276du);
  CHECK(out[1] == 0x41c83b0eu);
  CHECK(out[2] == 0xa20bc7c6u);
  CHECK(out[3] == 0x6d5451fdu);

  out = Philox::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                      {0xa4093822u, 0x299f31d0u});
  CHECK(out[0] == 0xd16cfe09u);
  CHECK(out[1] == 0x94fdccebu);
  CHECK(out[2] == 0x5001e420u);
  CHECK(out[3] == 0x24126ea1u);
}

TEST_CASE("streams are independent and reproducible") {
  Philox a(42, 0), a2(42, 0), b(42, 1);
  std::vector<std::uint64_t> va, va2, vb;
  for (int i = 0; i < 100; ++i) {
    va.push_back(a.next_u64());
    va2.push_back(a2.next_u64());
    vb.push_back(b.next_u64());
  }
  CHECK(va == va2);
  CHECK(va != vb);
}

TEST_CASE("uniform range and moments") {
  Philox rng(7, 3);
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);
  CHECK(std::abs(sum2 / n - 1.0 / 3.0) < 0.005);
}

TEST_CASE("normal moments") {
  Philox rng(11, 5);
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sum2 / n - 1.0) < 0.02);
}

TEST_CASE("mix is deterministic and input-sensitive") {
  CHECK(Philox::mix(1, 2, 3) == Philox::mix(1, 2, 3));
  CHECK(Philox::mix(1, 2, 3) != Philox::mix(1, 3, 2));
  CHECK(Philox::mix(1, 2, 3) != Philox::mix(2, 2, 3));
}
