#include <doctest.h>

#include <algorithm>
#include <bit>

#include "nashlab/embed.hpp"
#include "nashlab/lift.hpp"

using namespace nashlab;

namespace {
HostPtr hprime(int n) {
  return replacement_product(multiply_edges(build_double_butterfly(n), default_multiplicity(n)));
}
}  // namespace

TEST_SUITE("lift") {
  TEST_CASE("IP2 truth table") {
    auto g = Gadget::ip2();
    CHECK(g.sigma == 4);
    CHECK(g.symbol_bits() == 2);
    for (int b = 0; b < 4; ++b) CHECK(g(0, b) == 0);  // zero row
    for (int a = 0; a < 4; ++a) CHECK(g(a, a) == std::popcount(unsigned(a)) % 2);
    CHECK(g(1, 3) == 1);
    CHECK(g(3, 3) == 0);
    CHECK(g.preimages(0).size() + g.preimages(1).size() == 16);
  }

  TEST_CASE("encode then decode is the identity") {
    Rng r = make_rng(41, "embedding");
    for (int t = 0; t < 10; ++t) {
      auto x = sample_critical(32, r);
      auto ci = encode_composed(x, Gadget::ip2(), r);
      CHECK(decode_composed(ci) == x);
    }
    auto H = hprime(2);
    auto ci = random_composed(H, Gadget::ip2(), r);
    auto y = decode_composed(ci);
    CHECK(decode_composed(encode_composed(y, Gadget::ip2(), r)) == y);
  }

  TEST_CASE("a vertex without incident edges announces itself") {
    auto H = hprime(2);
    Rng r = make_rng(42, "embedding");
    auto ci = encode_composed(EolInstance::empty(H), Gadget::ip2(), r);
    for (VertexId v = 0; v < H->num_vertices(); v += 37) {
      auto o = run_pi_v(v, ci);
      CHECK(o.S == v);
      CHECK(o.P == v);
    }
  }

  TEST_CASE("Pi_v agrees with direct decoding") {
    Rng r = make_rng(43, "experiments");
    auto H = hprime(2);
    for (int t = 0; t < 300; ++t) {
      auto ci = random_composed(H, Gadget::ip2(), r);
      auto x = decode_composed(ci);
      VertexId v = uniform_below(r, H->num_vertices());
      auto o = run_pi_v(v, ci);
      auto ref = direct_sp(x, v);
      CHECK(o.S == ref.first);
      CHECK(o.P == ref.second);
      CHECK(o.transcript.size() <= max_transcript_cost(*H, ci.gadget));
      CHECK(interpret_transcript(*H, ci.gadget, v, o.transcript) == ref);
    }
    auto C = complete_host(64);
    for (int t = 0; t < 100; ++t) {
      auto ci = random_composed(C, Gadget::ip2(), r);
      auto x = decode_composed(ci);
      VertexId v = uniform_below(r, 64);
      auto o = run_pi_v(v, ci);
      CHECK(std::make_pair(o.S, o.P) == direct_sp(x, v));
    }
  }

  TEST_CASE("transcript cost is constant on H' and grows on the complete host") {
    auto g = Gadget::ip2();
    CHECK(max_transcript_cost(*hprime(8), g) == max_transcript_cost(*hprime(10), g));
    CHECK(max_transcript_cost(*complete_host(64), g) < max_transcript_cost(*complete_host(1024), g));
    // Alice's share is |Sigma| bits per incident edge: 2 bits x degree
    auto H = hprime(2);
    // tree vertices have degree 2 or 3, so at most 6 bits from Alice
    int max_deg = 0;
    for (VertexId v = 0; v < H->num_vertices(); ++v) {
      int deg = H->out_degree(v) + H->in_degree(v);
      max_deg = std::max(max_deg, deg);
      auto alice = transcript_cost(*H, g, v) - 2 * local_index_bits(*H);
      CHECK(alice == std::uint64_t(2 * deg));
    }
    CHECK(max_deg == 3);
    CHECK(max_transcript_cost(*H, g) == 6 + 2 * local_index_bits(*H));
  }

  TEST_CASE("composed text round-trips") {
    Rng r = make_rng(44, "embedding");
    auto ci = random_composed(hprime(2), Gadget::ip2(), r);
    auto back = read_composed(write_composed(ci));
    CHECK(back.alice == ci.alice);
    CHECK(back.bob == ci.bob);
    CHECK(write_composed(back) == write_composed(ci));
  }
}
