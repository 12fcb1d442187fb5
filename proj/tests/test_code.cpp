#include <doctest.h>

#include <bit>
#include <cmath>

#include "nashlab/code.hpp"
#include "nashlab/profile.hpp"

using namespace nashlab;

TEST_SUITE("code") {
  const ConstantsProfile prof = ConstantsProfile::desk();

  TEST_CASE("padded block length is a square with side divisible by lcm(ell, 4)") {
    CHECK(padded_block_length(6, 2) == 64);
    CHECK(padded_block_length(16, 2) == 64);
    CHECK(padded_block_length(17, 2) == 144);
    CHECK(padded_block_length(6, 3) == 144);
    for (int n = 1; n < 40; ++n) {
      int m = padded_block_length(n, 2);
      int s = int(std::lround(std::sqrt(double(m))));
      CHECK(s * s == m);
      CHECK(m >= 4 * n);
    }
  }

  TEST_CASE("all-zero half encodes to zero; generation is reproducible") {
    auto a = LinearCode::generate(4, 4, 99);
    auto b = LinearCode::generate(4, 4, 99);
    CHECK(a.m2 == 16);
    CHECK(a.encode_half(0) == 0);
    CHECK(a.rows == b.rows);
    for (std::uint64_t msg = 0; msg < 16; ++msg) CHECK(a.encode_half(msg) == b.encode_half(msg));
    // linearity
    CHECK((a.encode_half(3) ^ a.encode_half(5)) == a.encode_half(6));
  }

  TEST_CASE("certified distance matches brute force") {
    auto c = LinearCode::generate(6, 6, 5, 0.1);
    int best = c.m2;
    for (std::uint64_t msg = 1; msg < 64; ++msg) best = std::min(best, std::popcount(c.encode_half(msg)));
    CHECK(c.distance == best);
    CHECK(c.relative_distance() >= 0.1);
  }

  TEST_CASE("vertex code at n = 6") {
    auto vc = VertexCode::build(6, 2, 7, prof);
    CHECK(vc.m() == 64);
    CHECK(vc.n() == 6);
    CHECK(vc.half.effective_distance >= required_effective_distance(64, prof));
    // v^b = 0 gives a zero second block
    auto cw = vc.encode_full(0b101000);
    for (int c = vc.half.m2; c < vc.m(); ++c) CHECK(cw[c] == 0);
    auto z = vc.encode_full(0);
    for (auto bit : z) CHECK(bit == 0);
    CHECK(vc.min_separation() > 0.1);
  }

  TEST_CASE("nearest_codeword: exact, ambiguous band, bottom") {
    auto vc = VertexCode::build(6, 2, 7, prof);
    const double sh = prof.sqrt_h();
    for (std::uint64_t v : {0u, 5u, 17u, 63u}) {
      auto cw = vc.encode_full(v);
      std::vector<double> y(cw.begin(), cw.end());
      auto r = nearest_codeword(vc, y, 8 * sh, 25 * sh);
      CHECK(r.status == DecodeStatus::kDecoded);
      CHECK(r.message == v);
      CHECK(r.distance == 0.0);
      // shift every coordinate by 10 sqrt(h): inside the ambiguous band
      for (auto& t : y) t += 10 * sh;
      auto a = nearest_codeword(vc, y, 8 * sh, 25 * sh);
      CHECK(a.status == DecodeStatus::kAmbiguous);
      CHECK(a.distance == doctest::Approx(10 * sh));
    }
    // midpoint of two codewords is bottom when the outer radius is below the half distance
    auto c1 = vc.encode_full(1), c2 = vc.encode_full(2);
    std::vector<double> mid(vc.m());
    int ham = 0;
    for (int c = 0; c < vc.m(); ++c) {
      mid[c] = 0.5 * (c1[c] + c2[c]);
      ham += c1[c] != c2[c];
    }
    double half_gap = 0.5 * std::sqrt(double(ham) / vc.m());
    auto r = nearest_codeword(vc, mid, 0.1 * half_gap, 0.9 * half_gap);
    CHECK(r.status == DecodeStatus::kBottom);
    CHECK(r.distance == doctest::Approx(half_gap));
  }

  TEST_CASE("code text round-trips and checks its certificate") {
    auto vc = VertexCode::build(6, 2, 7, prof);
    auto back = read_code(write_code(vc.half));
    CHECK(back.rows == vc.half.rows);
    CHECK(back.distance == vc.half.distance);
    CHECK(back.effective_distance == vc.half.effective_distance);
    std::string text = write_code(vc.half);
    auto pos = text.find("dist=");
    text.replace(pos, 5 + std::to_string(vc.half.distance).size(), "dist=1");
    CHECK_THROWS(read_code(text));
  }

  TEST_CASE("profile validation and snapping") {
    CHECK(prof.violations().empty());
    auto bad = prof;
    bad.delta = bad.h * 10;
    CHECK_FALSE(bad.violations().empty());
    CHECK_THROWS(bad.validate());
    auto back = ConstantsProfile::from_json_text(prof.to_json_text());
    CHECK(back.h == prof.h);
    CHECK(back.delta == prof.delta);
    CHECK(snap_to_grid(0.30000000000004, 1e-13) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(snap_to_grid(5.0, 1e-13) == 2.0);
    CHECK(snap_to_grid(-3.0, 1e-13) == -1.0);
  }
}
