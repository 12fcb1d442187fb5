#include <doctest.h>

#include <algorithm>
#include <bit>
#include <set>

#include "nashlab/eol.hpp"
#include "nashlab/embed.hpp"
#include "nashlab/graphs.hpp"

using namespace nashlab;

TEST_SUITE("graphs") {
  TEST_CASE("double butterfly size is 2 N n") {
    CHECK(build_double_butterfly(2)->num_vertices() == 16);
    CHECK(build_double_butterfly(3)->num_vertices() == 48);
  }

  TEST_CASE("every butterfly vertex has two out-neighbours in its step") {
    for (int n : {1, 2, 3}) {
      auto H = build_double_butterfly(n);
      for (VertexId v = 0; v < H->num_vertices(); ++v) {
        CHECK(H->out_degree(v) == 2);
        CHECK(H->in_degree(v) == 2);
      }
    }
  }

  TEST_CASE("step out of layer 2 flips bit 2 of z") {
    // z = 010 at layer 2 -> (010, 3) and (000, 3); layers and bits count from 1 on the left,
    // butterfly_vertex takes 0-based layers
    auto H = build_double_butterfly(3);
    VertexId v = H->butterfly_vertex(0b010, 1);
    std::set<VertexId> got;
    for (const auto& a : H->out_arcs(v)) got.insert(a.other);
    std::set<VertexId> want{H->butterfly_vertex(0b010, 2), H->butterfly_vertex(0b000, 2)};
    CHECK(got == want);
  }

  TEST_CASE("multiply_edges") {
    auto H = build_double_butterfly(2);
    auto H1 = multiply_edges(H, 1);
    CHECK(H1->num_edges() == H->num_edges());
    for (const auto& e : H1->edges()) CHECK(e.slot == 1);
    auto H4 = multiply_edges(H, 4);
    CHECK(H4->num_edges() == 4 * H->num_edges());
    for (VertexId v = 0; v < H4->num_vertices(); ++v) {
      CHECK(H4->out_degree(v) == 8);
      CHECK(H4->in_degree(v) == 8);
    }
    CHECK_THROWS(multiply_edges(H, 0));
  }

  TEST_CASE("replacement product: K layers and label distance") {
    auto Hp = replacement_product(multiply_edges(build_double_butterfly(2), 2));
    // 2 log(2d) + 1 = 5 layers for d = 2
    CHECK(2 * Hp->gadget_bits() + 1 == 5);
    const int c = Hp->label_distance_bound();
    CHECK(c > 0);
    CHECK(c <= 4);
    int worst = 0;
    for (const auto& e : Hp->edges()) worst = std::max(worst, hamming(Hp->label(e.tail), Hp->label(e.head)));
    CHECK(worst <= c);
    // the bound does not grow with n
    auto Hp3 = replacement_product(multiply_edges(build_double_butterfly(3), default_multiplicity(3)));
    CHECK(Hp3->label_distance_bound() == c);
  }

  TEST_CASE("labels round-trip through vertex_of") {
    auto Hp = replacement_product(multiply_edges(build_double_butterfly(2), 2));
    for (VertexId v = 0; v < Hp->num_vertices(); v += 7) CHECK(Hp->vertex_of(Hp->label(v)) == v);
    CHECK(Label::parse("0110").bits == 6);
    CHECK(Label::parse("0110").str() == "0110");
  }

  TEST_CASE("cyclic gray code steps by one bit, including the wrap") {
    for (std::uint64_t L : {2, 6, 10, 20}) {
      for (std::uint64_t i = 0; i < L; ++i) {
        auto a = cyclic_gray(i, L), b = cyclic_gray((i + 1) % L, L);
        CHECK(std::popcount(a ^ b) == 1);
      }
    }
  }
}

TEST_SUITE("graphs") {
  EolInstance path_012() {
    // 1 -> 2 -> 3 in one-based naming
    auto inst = EolInstance::empty(complete_host(4));
    inst.set_edge(0, 1);
    inst.set_edge(1, 2);
    return inst;
  }

  TEST_CASE("check_eol_solution on a single path") {
    auto inst = path_012();
    auto end = check_eol_solution(inst, 2);
    REQUIRE(end.has_value());
    CHECK(end->reason == SolutionReason::kSink);
    CHECK_FALSE(check_eol_solution(inst, 1).has_value());
    CHECK_FALSE(check_eol_solution(inst, 3).has_value());  // isolated
  }

  TEST_CASE("enumerate_solutions: critical, bicritical, empty") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      Rng r = make_rng(s, "instance");
      CHECK(enumerate_solutions(sample_critical(12, r)).size() == 1);
      CHECK(enumerate_solutions(sample_bicritical(12, r)).size() == 3);
    }
    auto empty = EolInstance::empty(complete_host(8));
    auto sols = enumerate_solutions(empty);
    REQUIRE(sols.size() == 1);
    CHECK(sols[0].vertex == 0);
  }

  TEST_CASE("relaxed rules accept in = out = 2, strict rules do not") {
    auto H = build_double_butterfly(2);
    auto inst = EolInstance::empty(H);
    VertexId v = H->butterfly_vertex(1, 1);
    for (auto pos : H->out_edge_positions(v)) inst.indicators[pos] = 1;
    for (auto pos : H->in_edge_positions(v)) inst.indicators[pos] = 1;
    CHECK(degrees(inst, v).in == 2);
    CHECK(degrees(inst, v).out == 2);
    CHECK_FALSE(check_eol_solution(inst, v, SolutionRules::kRelaxed).has_value());
    auto strict = check_eol_solution(inst, v, SolutionRules::kStrict);
    REQUIRE(strict.has_value());
    CHECK(strict->reason == SolutionReason::kDegreeViolation);
  }

  TEST_CASE("instance text round-trips") {
    Rng r = make_rng(3, "instance");
    auto x = sample_critical(16, r);
    auto y = read_instance(write_instance(x));
    CHECK(y.succ == x.succ);
    CHECK(y.pred == x.pred);
    CHECK(write_instance(y) == write_instance(x));

    auto H = build_double_butterfly(2);
    auto e = EolInstance::empty(H);
    e.indicators[3] = 1;
    CHECK(write_instance(read_instance(write_instance(e))) == write_instance(e));
  }
}
