#include <doctest.h>

#include <cmath>
#include <set>

#include "fixture.hpp"
#include "nashlab/calibration.hpp"
#include "nashlab/locality.hpp"

using namespace nashlab;
using nashlab::testing::six;

TEST_SUITE("locality") {
  TEST_CASE("m = 64, ell = 2: sizes 32, intersections 16") {
    auto fam = build_subset_families(64, 2, 4, 5);
    CHECK(fam.count() == 32);
    CHECK(fam.subset_size() == 32);
    for (int j = 0; j < fam.count(); ++j) {
      CHECK(fam.sigma(j).size() == 32);
      CHECK(fam.tau(j).size() == 32);
      for (int q = 0; q < fam.count(); ++q) CHECK(fam.intersection(j, q).size() == 16);
    }
    auto audit = audit_family(fam);
    CHECK(audit.ok);
    CHECK(audit.pairs_checked == 32 * 32);
  }

  TEST_CASE("sigma is a union of columns, tau a union of rows") {
    auto fam = build_subset_families(144, 3, 2, 6);
    for (int j = 0; j < fam.count(); ++j) {
      for (int idx : fam.sigma(j)) CHECK(fam.in_sigma(j, (idx / 12 + 5) % 12 * 12 + idx % 12));
      for (int idx : fam.tau(j)) CHECK(fam.in_tau(j, idx / 12 * 12 + (idx + 7) % 12));
    }
    CHECK(audit_family(fam).ok);
  }

  TEST_CASE("k = 1 collapses to ell distinct subsets") {
    auto fam = build_subset_families(64, 2, 1, 7);
    std::set<std::vector<int>> distinct;
    for (int j = 0; j < fam.count(); ++j) distinct.insert(fam.sigma(j));
    CHECK(distinct.size() == 2);
  }

  TEST_CASE("bucket membership of a column looks independent across outcomes") {
    auto fam = build_subset_families(1024, 4, 6, 8);
    const int outcomes = fam.outcomes();
    // pairs of columns share a bucket with probability close to 1/ell
    int same = 0, total = 0;
    for (int o = 0; o < outcomes; ++o) {
      same += fam.col_bucket[o * fam.side + 3] == fam.col_bucket[o * fam.side + 17];
      ++total;
    }
    const double p = 1.0 / fam.ell, sd = std::sqrt(p * (1 - p) / total);
    // equal-size buckets make sharing slightly less likely than 1/ell
    CHECK(std::abs(double(same) / total - p) <= 3 * sd + 1.0 / fam.side);
  }

  TEST_CASE("family text round-trips") {
    auto fam = build_subset_families(64, 2, 4, 9);
    auto back = read_family(write_family(fam));
    CHECK(back.col_bucket == fam.col_bucket);
    CHECK(back.row_bucket == fam.row_bucket);
    CHECK(write_family(back) == write_family(fam));
  }

  TEST_CASE("no vertex info inside the picture: default displacement") {
    const auto& s = six();
    auto fam = build_subset_families(64, 2, 4, 10);
    Point x(s.field.dim(), 0.5);
    for (int c = 3 * 64; c < 4 * 64; ++c) x[c] = 0.1;
    auto T = fam.sigma(3);
    auto part = restrict_point(x, 64, T);
    std::array<std::optional<VertexNeighbourhood>, 2> none{};
    int i = 3 * 64 + T[5];
    CHECK(doubly_local_eval(s.code, s.profile, i, x[i], none, T, part) ==
          doctest::Approx(x[i] + s.profile.delta));
    CHECK(s.field.f(x)[i] == doctest::Approx(x[i] + s.profile.delta));
  }

  TEST_CASE("doubly-local agrees with the global field near the path") {
    const auto& s = six();
    const auto& F = s.field;
    auto fam = build_subset_families(64, 2, 4, 11);
    Rng r = make_rng(61, "experiments");
    const double tol = calibration::doubly_local_tolerance(s.profile);
    int agree = 0;
    const int trials = 1500;
    for (int t = 0; t < trials; ++t) {
      Point x = F.chain().point_on(int(uniform_below(r, F.chain().segments().size())), uniform01(r));
      std::normal_distribution<double> nd;
      std::vector<double> u(x.size());
      for (auto& v : u) v = nd(r);
      double sc = 2 * s.profile.h * uniform01(r) / normalized_norm(u);
      for (std::size_t q = 0; q < x.size(); ++q) x[q] = std::clamp(x[q] + sc * u[q], -1.0, 2.0);
      auto T = fam.tau(int(uniform_below(r, fam.count())));
      int i = int(uniform_below(r, 4)) * 64 + T[uniform_below(r, T.size())];
      double local = doubly_local_eval(s.code, s.profile, i, x[i], decode_vertex_info(F, x), T,
                                       restrict_point(x, 64, T));
      agree += std::abs(local - F.f(x)[i]) <= tol;
    }
    CHECK(double(agree) / trials >= calibration::kLocalFrequency);
  }

  TEST_CASE("strict merge rejects unrelated vertices") {
    std::array<std::optional<VertexNeighbourhood>, 2> info{VertexNeighbourhood{3, 4, 2},
                                                            VertexNeighbourhood{9, 10, 8}};
    CHECK_THROWS_AS(merge_vertex_info(info, true), std::invalid_argument);
    CHECK_NOTHROW(merge_vertex_info(info, false));
    std::array<std::optional<VertexNeighbourhood>, 2> adj{VertexNeighbourhood{3, 4, 2},
                                                           VertexNeighbourhood{4, 5, 3}};
    CHECK_NOTHROW(merge_vertex_info(adj, true));
  }

  TEST_CASE("concentration: constant vectors never deviate") {
    auto fam = build_subset_families(64, 2, 4, 12);
    std::vector<double> v(64, 0.37);
    Rng r = make_rng(62, "experiments");
    auto rep = concentration_check(fam, v, 500, 1e-12, r);
    CHECK(rep.exceed == 0);
    CHECK(rep.max_deviation <= 1e-15);
  }

  TEST_CASE("concentration: half-ones vector, m = 1024, ell = 4, k = 6") {
    auto fam = build_subset_families(1024, 4, 6, 13);
    std::vector<double> v(1024);
    Rng r = make_rng(63, "experiments");
    for (auto& x : v) x = uniform01(r) < 0.5 ? 1.0 : 0.0;
    auto rep = concentration_check(fam, v, 5000, 0.1, r);
    CHECK(rep.frequency <= 0.02);
  }

  TEST_CASE("concentration tail does not grow with k") {
    std::vector<double> v(1024);
    Rng r = make_rng(64, "experiments");
    for (auto& x : v) x = uniform01(r) < 0.5 ? 1.0 : 0.0;
    // paired over family seeds: one k = 2 family has only 64 members
    const int seeds = 8, trials = 3000;
    double f2 = 0, f8 = 0;
    for (int s = 0; s < seeds; ++s) {
      auto a2 = build_subset_families(1024, 4, 2, 100 + s), a8 = build_subset_families(1024, 4, 8, 100 + s);
      Rng a = make_rng(65 + s, "experiments"), b = make_rng(65 + s, "experiments");
      f2 += concentration_check(a2, v, trials, 0.05, a).frequency / seeds;
      f8 += concentration_check(a8, v, trials, 0.05, b).frequency / seeds;
    }
    const double slack = 3 * std::sqrt(0.25 / (seeds * trials));
    CHECK(f8 <= f2 + slack);
  }
}
