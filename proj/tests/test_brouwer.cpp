#include <doctest.h>

#include <cmath>

#include "fixture.hpp"
#include "nashlab/calibration.hpp"

using namespace nashlab;
using nashlab::testing::six;

namespace {

int first_edge_segment(const BrouwerChain& ch, SegmentKind kind) {
  for (int k = 0; k < int(ch.segments().size()); ++k)
    if (ch.segments()[k].kind == kind && !ch.segments()[k].end_window &&
        !ch.segments()[k].start_window)
      return k;
  return -1;
}

}  // namespace

TEST_SUITE("brouwer") {
  TEST_CASE("Brouwer vertices of the zero edge have zero codeword blocks") {
    const auto& s = six();
    auto pts = brouwer_vertices(s.code, 0, 0);
    const int m = s.code.m();
    for (const auto& p : pts)
      for (int c = 0; c < 2 * m; ++c) CHECK(p[c] == 0.0);
  }

  TEST_CASE("path sizes: empty instance and a single edge") {
    const auto& s = six();
    auto empty = EolInstance::empty(complete_host(64));
    auto ch = build_brouwer_path(empty, s.code);
    REQUIRE(ch.segments().size() == 1);
    BrouwerField F(empty, s.code, s.profile);
    REQUIRE(F.endpoints().size() == 1);
    CHECK(F.endpoints()[0].vertex == 0);
    Point origin = F.endpoint_point(F.endpoints()[0]);
    for (double v : origin) CHECK(v == 0.0);

    auto one = EolInstance::empty(complete_host(64));
    one.set_edge(0, 5);
    CHECK(build_brouwer_path(one, s.code).segments().size() == 5);
  }

  TEST_CASE("path of the n = 6 instance: 1 + 4 per edge, separated by eta") {
    const auto& s = six();
    auto path = path_from_start(s.inst);
    CHECK(s.field.chain().segments().size() == 1 + 4 * (path.size() - 1));
    auto sep = check_separation(s.field.chain());
    CHECK(sep.min_distance >= s.profile.eta());
  }

  TEST_CASE("segment midpoint: near one segment, tau 1/2, zero distance, g_hat along the segment") {
    const auto& s = six();
    const auto& F = s.field;
    int k = first_edge_segment(F.chain(), SegmentKind::kStep2);
    REQUIRE(k >= 0);
    Point x = F.chain().point_on(k, 0.5);
    auto loc = F.locate(x);
    CHECK(loc.classification == Classification::kNearSegment);
    REQUIRE(loc.taus.size() == 1);
    CHECK(loc.taus[0] == doctest::Approx(0.5));
    CHECK(loc.distance == doctest::Approx(0.0).epsilon(1e-15));
    auto g = F.g_hat(x);
    for (int i = 0; i < F.dim(); ++i)
      CHECK(g[i] == doctest::Approx(s.profile.delta * F.chain().direction(k, i)).epsilon(1e-9));
  }

  TEST_CASE("distance h/3 from a segment mixes direction and pull") {
    const auto& s = six();
    const auto& F = s.field;
    const double h = s.profile.h, delta = s.profile.delta;
    int k = first_edge_segment(F.chain(), SegmentKind::kStep2);
    REQUIRE(k >= 0);
    const int block = F.chain().segments()[k].block;
    Point z = F.chain().point_on(k, 0.5);
    Point x = z;
    // one coordinate outside the segment's block, moved so ||x - z|| = h/3
    int other = block == 2 ? 0 : 2;
    int c = other * F.m() + 3;
    double step = (h / 3) * std::sqrt(double(F.dim()));
    x[c] += (x[c] + step <= 2.0 ? step : -step);
    CHECK(normalized_distance(x, z) == doctest::Approx(h / 3));
    auto g = F.g_hat(x);
    for (int i = 0; i < F.dim(); ++i) {
      double want = (2.0 / 3) * delta * F.chain().direction(k, i) + (1.0 / 3) * delta * (z[i] - x[i]) / h;
      CHECK(g[i] == doctest::Approx(want).epsilon(1e-7).scale(delta));
    }
  }

  TEST_CASE("far inside the picture: default displacement") {
    const auto& s = six();
    const auto& F = s.field;
    const int m = F.m();
    Point x(F.dim(), 0.5);
    for (int c = 3 * m; c < 4 * m; ++c) x[c] = 0.0;
    CHECK(F.locate(x).classification == Classification::kFar);
    auto g = F.g_hat(x);
    for (int c = 0; c < 3 * m; ++c) CHECK(g[c] == 0.0);
    for (int c = 3 * m; c < 4 * m; ++c) CHECK(g[c] == doctest::Approx(s.profile.delta));
  }

  TEST_CASE("x4 above 1/2 is outside the picture") {
    const auto& s = six();
    const auto& F = s.field;
    const int m = F.m();
    Point x(F.dim(), 0.5);
    for (int c = 3 * m; c < 4 * m; ++c) x[c] = 0.7;
    auto cls = F.locate(x).classification;
    CHECK((cls == Classification::kOutsideInterpolated || cls == Classification::kOutsideTop ||
           cls == Classification::kOutsidePicture));
    for (int c = 3 * m; c < 4 * m; ++c) x[c] = 2.0;
    CHECK(F.locate(x).classification == Classification::kOutsideTop);
  }

  TEST_CASE("truncation keeps f inside the cube") {
    const auto& s = six();
    Rng r = make_rng(51, "experiments");
    for (int t = 0; t < 2000; ++t) {
      auto x = random_cube_point(s.field.dim(), r);
      for (double v : s.field.f(x)) {
        CHECK(v >= -1.0);
        CHECK(v <= 2.0);
      }
    }
  }

  TEST_CASE("fixed point above the terminal segment decodes to the unique solution") {
    const auto& s = six();
    REQUIRE(s.field.endpoints().size() == 1);
    auto fp = find_fixed_point(s.field, s.field.endpoints()[0]);
    CHECK(fp.residual <= 1e-12);
    auto sol = decode_fixed_point(s.field, fp.x, calibration::kFixedPointResidual);
    CHECK(sol == s.solution);
  }

  TEST_CASE("non-canonical endpoints of a bicritical input decode to their source and sink") {
    const auto& s = six();
    Rng r = make_rng(3, "instance");
    auto inst = sample_bicritical(64, r);
    auto sols = enumerate_solutions(inst);
    REQUIRE(sols.size() == 3);
    BrouwerField F(inst, s.code, s.profile);
    CHECK(F.endpoints().size() == 3);
    int matched = 0;
    for (const auto& e : F.endpoints()) {
      auto fp = find_fixed_point(F, e);
      CHECK(fp.residual <= calibration::kFixedPointResidual);
      auto sol = decode_fixed_point(F, fp.x, calibration::kFixedPointResidual);
      bool known = std::find(sols.begin(), sols.end(), sol) != sols.end();
      CHECK(known);
      matched += known;
    }
    CHECK(matched == 3);
  }

  TEST_CASE("decode_fixed_point refuses a point with large residual") {
    const auto& s = six();
    Rng r = make_rng(52, "experiments");
    auto x = random_cube_point(s.field.dim(), r);
    CHECK(s.field.residual(x) > s.profile.delta / 4);
    CHECK_THROWS(decode_fixed_point(s.field, x, calibration::kFixedPointResidual));
  }

  TEST_CASE("g is constant along a segment interior") {
    const auto& s = six();
    int k = first_edge_segment(s.field.chain(), SegmentKind::kStep1);
    REQUIRE(k >= 0);
    auto a = s.field.g(s.field.chain().point_on(k, 0.3));
    auto b = s.field.g(s.field.chain().point_on(k, 0.6));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }

  TEST_CASE("Lipschitz sample stays under the frozen bound") {
    const auto& s = six();
    Rng r = make_rng(53, "experiments");
    auto rep = check_lipschitz(s.field, 3000, r, 1000);
    CHECK(rep.lipschitz <= calibration::kLipschitzBound);
    CHECK(rep.boundary_gap <= calibration::kLipschitzBound * 2e-9);
    CHECK(rep.pairs >= 4000);
  }

  TEST_CASE("point text round-trips") {
    const auto& s = six();
    Rng r = make_rng(54, "experiments");
    auto x = random_cube_point(s.field.dim(), r);
    int m = 0;
    auto y = read_point(write_point(x, s.field.m(), s.profile.eps_precision), &m);
    CHECK(m == s.field.m());
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(y[i] - x[i]) <= s.profile.eps_precision);
    CHECK_THROWS(write_point(x, s.field.m() + 1, 1e-13));
  }
}
