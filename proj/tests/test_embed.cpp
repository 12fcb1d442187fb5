#include <doctest.h>

#include <cmath>
#include <map>

#include "nashlab/embed.hpp"

using namespace nashlab;

TEST_SUITE("embed") {
  TEST_CASE("minimum paths have 2n edges and are reproducible") {
    auto H = build_double_butterfly(2);
    Rng a = make_rng(11, "experiments"), b = make_rng(11, "experiments");
    auto p = sample_min_path(*H, 1, 2, a);
    CHECK(p.size() == 5);
    CHECK(p == sample_min_path(*H, 1, 2, b));
    CHECK(p.front() == H->base_vertex(1));
    CHECK(p.back() == H->base_vertex(2));
    auto H4 = build_double_butterfly(4);
    Rng r = make_rng(12, "experiments");
    for (int t = 0; t < 50; ++t) {
      auto q = sample_min_path(*H4, uniform_below(r, 16), uniform_below(r, 16), r);
      CHECK(q.size() == 9);
    }
  }

  TEST_CASE("middle vertex of a minimum path is uniform") {
    auto H = build_double_butterfly(3);
    Rng r = make_rng(13, "experiments");
    const int trials = 100000;
    std::map<VertexId, int> hist;
    for (int t = 0; t < trials; ++t) hist[sample_min_path(*H, 5, 2, r)[3]]++;
    CHECK(hist.size() == 8);
    const double e = trials / 8.0, sd = std::sqrt(e * (1 - 1.0 / 8));
    for (auto [v, c] : hist) CHECK(std::abs(c - e) <= 3 * sd);
  }

  TEST_CASE("congestion") {
    CHECK(congestion({}) == 0);
    CHECK(congestion({{1, 2, 3}, {4, 5, 6}}) == 1);
    CHECK(congestion({{1, 2, 3}, {1, 2, 3}}) == 2);
  }

  TEST_CASE("a single edge always embeds with congestion 1") {
    auto Hd = multiply_edges(build_double_butterfly(3), 4);
    Rng r = make_rng(14, "embedding");
    for (int t = 0; t < 20; ++t) {
      auto emb = sample_embedding(Hd, {{0, 5}}, r);
      CHECK(emb.ok);
      CHECK(emb.congestion == 1);
      CHECK(disjointness_violations(emb) == 0);
    }
  }

  TEST_CASE("ok embeddings are edge-disjoint and give a critical host instance") {
    auto Hd = multiply_edges(build_double_butterfly(4), default_multiplicity(4));
    Rng r = make_rng(15, "embedding");
    int ok = 0;
    for (int t = 0; t < 30; ++t) {
      auto x = sample_critical(16, r);
      auto emb = sample_embedding(Hd, pointer_edges(x), r);
      if (!emb.ok) continue;
      ++ok;
      CHECK(disjointness_violations(emb) == 0);
      auto y = embedded_instance(emb);
      CHECK(enumerate_solutions(y, SolutionRules::kRelaxed).size() == 1);
    }
    CHECK(ok > 0);
  }

  TEST_CASE("deletion blocks") {
    Rng r = make_rng(16, "instance");
    auto x = sample_critical(6, r);
    auto path = path_from_start(x);
    REQUIRE(path.size() == 6);
    auto sys = deletion_blocks(x);
    CHECK(sys.blocks.size() == 5);
    CHECK(blocks_disjoint(sys));
    // deleting the last edge leaves the old second-to-last vertex as the sink
    auto y = apply_deletion_block(x, 5);
    CHECK(canonical_end(y) == path[4]);
    CHECK_FALSE(check_eol_solution(y, path[5]).has_value());
    // the block is an involution
    auto back = apply_block(y, block_difference(x, y));
    CHECK(back == x);
    CHECK(block_difference(x, y) == sys.blocks[4]);
  }

  TEST_CASE("shortcut on N = 6 splits the path into a bicritical input") {
    Rng r = make_rng(17, "instance");
    auto x = sample_critical(6, r);
    auto path = path_from_start(x);
    auto y = apply_shortcut_block(x, 1);
    auto sols = enumerate_solutions(y);
    CHECK(sols.size() == 3);
    CHECK(blocks_disjoint(shortcut_blocks(x)));
    CHECK(shortcut_blocks(x).blocks.size() == 2);
  }

  TEST_CASE("bicritical samples stay legal at N = 4") {
    for (std::uint64_t s = 0; s < 40; ++s) {
      Rng r = make_rng(s, "instance");
      CHECK(enumerate_solutions(sample_bicritical(4, r)).size() == 3);
    }
  }

  TEST_CASE("block sensitivity counts") {
    for (std::uint64_t N : {6, 10, 50}) {
      Rng r = make_rng(N, "instance");
      auto x = sample_critical(N, r);
      CHECK(block_sensitivity(canonical_solver, x, deletion_blocks(x)) == int(N) - 1);
      CHECK(block_sensitivity(noncanonical_solver, x, shortcut_blocks(x)) == int(N) / 2 - 1);
    }
    Rng r = make_rng(2, "instance");
    auto x = sample_critical(10, r);
    Solver constant = [](const EolInstance&) { return VertexId{3}; };
    CHECK(block_sensitivity(constant, x, deletion_blocks(x)) == 0);
  }

  TEST_CASE("dichotomy experiment") {
    auto c = dichotomy_experiment(canonical_solver, 64, 2000, 21);
    CHECK(c.p_canonical == doctest::Approx(1.0));
    CHECK(c.best_deletion_hit_rate == doctest::Approx(1.0));
    auto nc = dichotomy_experiment(noncanonical_solver, 64, 2000, 22);
    CHECK(nc.p_canonical == doctest::Approx(0.0));
    CHECK(nc.best_shortcut_hit_rate == doctest::Approx(1.0));
    auto coin = dichotomy_experiment(coin_solver, 64, 2000, 23);
    CHECK(coin.best_deletion_hit_rate >= 0.5 - coin.tolerance);
    CHECK(coin.best_shortcut_hit_rate >= 0.5 - coin.tolerance);
  }

  TEST_CASE("coupling failure rate") {
    CHECK(coupling_failure_rate(6, 100, -1, 31) == 0.0);
    CHECK(coupling_failure_rate(6, 100, 0, 32) == 1.0);
    CHECK(coupling_failure_rate(10, 500, 16, 33) <= 0.05);
  }
}
