#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <set>

#include "fixture.hpp"
#include "nashlab/calibration.hpp"
#include "nashlab/game.hpp"
#include "nashlab/lift.hpp"

using namespace nashlab;
using nashlab::testing::six;

namespace {

struct GameSetup {
  ComposedInstance ci;
  SubsetFamily family;
  ImitationGame game;
  FixedPointResult fp;
  StrategyA A;
  StrategyB B;
};

const GameSetup& setup() {
  static const GameSetup g = [] {
    const auto& s = six();
    Rng er = make_rng(1, "embedding");
    auto ci = encode_composed(s.inst, Gadget::ip2(), er);
    auto fam = build_subset_families(64, 2, 4, derive_seed(1, "family"));
    auto game = build_game(ci, s.code, fam, s.profile);
    auto fp = find_fixed_point(s.field, s.field.endpoints().front());
    auto [A, B] = plant_equilibrium(game, s.field, fp.x, calibration::kFixedPointResidual);
    return GameSetup{ci, fam, game, fp, A, B};
  }();
  return g;
}

BimatrixGame matching_pennies() {
  return {2, 2, {1, -1, -1, 1}, {-1, 1, 1, -1}};
}

MixedStrategy<int> pure(int a) { return {{{a, 1.0}}}; }

}  // namespace

TEST_SUITE("game") {
  TEST_CASE("legal half pairs on the complete host") {
    CHECK(count_legal_pairs(6) == 81);
    CHECK(count_legal_pairs(5) == 81);
    CHECK(count_legal_pairs(4) == 25);
    const auto& spec = setup().game.spec();
    CHECK(legal_half_pair(spec, 1u, 5u));
    CHECK(legal_half_pair(spec, std::nullopt, 5u));
  }

  TEST_CASE("utility_v: matching codeword, bottom, flipped") {
    const auto& g = setup();
    const auto& spec = g.game.spec();
    const std::uint32_t va = 5;
    AliceAction a;
    a.v = {va, std::nullopt};
    BobAction b = g.B.support[0].first;
    const auto& T = spec.tau_sets[b.j];
    auto cw = spec.code.half.encode_half(va);
    for (std::size_t q = 0; q < T.size(); ++q)
      if (T[q] < spec.half_m()) b.x[q] = spec.code.half.bit(cw, T[q]) ? 1.0 : 0.0;
    CHECK(utility_v_alice(spec, a, b, 0) == 1);
    CHECK(utility_v_alice(spec, a, b, 1) == 0);  // bottom
    for (std::size_t q = 0; q < T.size(); ++q)
      if (T[q] < spec.half_m()) b.x[q] = 1.0 - b.x[q];
    CHECK(utility_v_alice(spec, a, b, 0) == -1);
  }

  TEST_CASE("utility_alpha: correct, both bottom, wrong bits") {
    const auto& g = setup();
    const auto& spec = g.game.spec();
    AliceAction a = g.A.support[0].first;
    BobAction b = g.B.support[0].first;
    CHECK(g.game.alice().utility_alpha(a, b, 0) == 1);
    auto wrong = a;
    (*wrong.alpha[0])[0] ^= 1;
    CHECK(g.game.alice().utility_alpha(wrong, b, 0) == 0);
    AliceAction bot = a;
    bot.v[0] = std::nullopt;
    bot.alpha[0] = std::nullopt;
    CHECK(g.game.alice().utility_alpha(bot, b, 0) == 1);
    CHECK(spec.alpha_width() == 2 * spec.pointer_width());
  }

  TEST_CASE("utility_xhat: exact image is 0, worst case is at least -9") {
    const auto& g = setup();
    const auto& bob = g.game.bob();
    AliceAction a = g.A.support[0].first;
    BobAction b = g.B.support[0].first;
    auto img = bob.local_image(a, b.v);
    auto exact = b;
    const auto& S = g.game.spec().sigma_sets[a.j];
    const auto& T = g.game.spec().tau_sets[b.j];
    std::size_t qs = 0;
    for (std::size_t qt = 0; qt < T.size(); ++qt) {
      while (qs < S.size() && S[qs] < T[qt]) ++qs;
      if (qs < S.size() && S[qs] == T[qt])
        for (int bl = 0; bl < 4; ++bl) exact.xhat[bl * T.size() + qt] = img[bl * S.size() + qs];
    }
    CHECK(bob.utility_xhat(a, exact, img) == 0.0);
    auto worst = b;
    for (std::size_t q = 0; q < worst.xhat.size(); ++q) worst.xhat[q] = 2.0;
    auto low = img;
    for (auto& v : low) v = -1.0;
    CHECK(bob.utility_xhat(a, worst, low) >= -9.0);
    CHECK(bob.utility_xhat(a, worst, low) == doctest::Approx(-9.0));
  }

  TEST_CASE("utility_x: identical restrictions and a uniform offset") {
    const auto& g = setup();
    const auto& spec = g.game.spec();
    const double eps = spec.profile.eps_precision;
    AliceAction a = g.A.support[0].first;
    BobAction b = g.B.support[1].first;
    b.xhat = b.x;
    CHECK(utility_x_alice(spec, a, b) == doctest::Approx(0.0).epsilon(1e-20));
    // rebuild Bob's xhat from Alice's values shifted by eps on the intersection
    const auto& S = spec.sigma_sets[a.j];
    const auto& T = spec.tau_sets[b.j];
    for (std::size_t qt = 0; qt < T.size(); ++qt) {
      auto it = std::lower_bound(S.begin(), S.end(), T[qt]);
      if (it == S.end() || *it != T[qt]) continue;
      auto qs = std::size_t(it - S.begin());
      for (int bl = 0; bl < 4; ++bl) b.xhat[bl * T.size() + qt] = a.x[bl * S.size() + qs] + eps;
    }
    CHECK(utility_x_alice(spec, a, b) == doctest::Approx(-eps * eps).epsilon(1e-6));
  }

  TEST_CASE("hide and seek") {
    AliceAction a;
    BobAction b;
    a.j = 3;
    b.J = {1, 3, 5};
    CHECK(utility_hide_seek_bob_J(a, b) == 1);
    CHECK(utility_hide_seek_alice_j(a, b) == -1);
    a.j = 4;
    CHECK(utility_hide_seek_bob_J(a, b) == -1);
    // uniform j against any half-size J
    b.J = {0, 2, 4, 6, 7, 9, 11, 13, 14, 15, 20, 21, 22, 23, 30, 31};
    int total = 0;
    for (int j = 0; j < 32; ++j) {
      a.j = j;
      total += utility_hide_seek_alice_j(a, b);
    }
    CHECK(total == 0);
  }

  TEST_CASE("Alice's payoff at every sub-utility maximum is the weighted sum") {
    const auto& g = setup();
    const auto& p = g.game.spec().profile;
    AliceAction a = g.A.support[0].first;  // j = 0, J = J0
    BobAction b = g.B.support[1].first;    // j = 1, J = J1
    b.xhat.clear();
    {
      const auto& S = g.game.spec().sigma_sets[a.j];
      const auto& T = g.game.spec().tau_sets[b.j];
      for (int bl = 0; bl < 4; ++bl)
        for (int c : T) {
          auto it = std::lower_bound(S.begin(), S.end(), c);
          b.xhat.push_back(it != S.end() && *it == c ? a.x[bl * S.size() + (it - S.begin())] : 0.0);
        }
    }
    REQUIRE(utility_hide_seek_alice_j(a, b) == 1);
    REQUIRE(utility_hide_seek_alice_J(a, b) == 1);
    REQUIRE(utility_v_alice(g.game.spec(), a, b, 0) == 1);
    double want = 2 * p.lambda_v + 2 * p.lambda_alpha + 2 * p.lambda_j;
    CHECK(g.game.alice().total(a, b) == doctest::Approx(want).epsilon(1e-15));
  }

  TEST_CASE("Bob's payoff ignores his symbols away from the decoded vertex") {
    const auto& g = setup();
    const auto& s = six();
    auto ci2 = g.ci;
    const int w = g.game.spec().pointer_width();
    // the planted vertex, its neighbours and the start keep their symbols
    VertexId v = s.solution.vertex;
    std::set<VertexId> keep{v, 0};
    if (auto p = predecessor(s.inst, v)) keep.insert(*p);
    if (auto q = successor(s.inst, v)) keep.insert(*q);
    for (VertexId u = 0; u < 64; ++u)
      if (!keep.count(u))
        for (int c = 0; c < 2 * w; ++c) ci2.bob[2 * u * w + c] ^= 1;
    auto game2 = build_game(ci2, s.code, g.family, s.profile);
    for (std::size_t t = 0; t < 4; ++t) {
      const auto& a = g.A.support[t].first;
      const auto& b = g.B.support[t].first;
      CHECK(game2.bob().total(a, b) == g.game.bob().total(a, b));
    }
  }

  TEST_CASE("bimatrix checkers: coordination, matching pennies, suboptimal support") {
    BimatrixGame coord{2, 2, {1, 0, 0, 1}, {1, 0, 0, 1}};
    CHECK(check_wsne(coord, pure(0), pure(0), 0.0).pass);
    auto mp = matching_pennies();
    MixedStrategy<int> half{{{0, 0.5}, {1, 0.5}}};
    CHECK(check_wsne(mp, half, half, 0.0).pass);
    CHECK(check_ane(mp, half, half, 0.0).pass);
    // row 1 pays 0.3 less than row 0 against column 0
    BimatrixGame g{2, 1, {1.0, 0.7}, {0.0, 0.0}};
    MixedStrategy<int> A{{{0, 0.5}, {1, 0.5}}};
    CHECK_FALSE(check_wsne(g, A, pure(0), 0.29).pass);
    CHECK(check_wsne(g, A, pure(0), 0.31).pass);
  }

  TEST_CASE("ANE is weaker than WSNE and pruning repairs it") {
    const double eps = 1e-3;
    BimatrixGame g{2, 1, {1.0, 0.0}, {0.0, 0.0}};
    // gain eps/2 keeps clear of a rounding tie at exactly eps
    MixedStrategy<int> A{{{0, 1 - eps / 2}, {1, eps / 2}}};
    CHECK(check_ane(g, A, pure(0), eps).pass);
    CHECK_FALSE(check_wsne(g, A, pure(0), eps).pass);
    auto [A2, B2] = prune_ane_to_wsne(g, A, pure(0), eps);
    CHECK(A2.support.size() == 1);
    CHECK(check_wsne(g, A2, B2, 3 * std::sqrt(eps)).pass);
    // a 0-WSNE is left alone
    auto mp = matching_pennies();
    MixedStrategy<int> half{{{0, 0.5}, {1, 0.5}}};
    auto [A3, B3] = prune_ane_to_wsne(mp, half, half, 0.0);
    CHECK(A3.support == half.support);
    CHECK(B3.support == half.support);
    // every support action bad
    CHECK_THROWS(prune_ane_to_wsne(g, pure(1), pure(0), eps));
  }

  TEST_CASE("extract_point: covering mixture, disjoint sigmas, uncovered") {
    const auto& g = setup();
    const auto& s = six();
    auto e = extract_point(g.A, g.family, 64);
    CHECK(e.uncovered == 0);
    for (int i = 0; i < 256; ++i) CHECK(std::abs(e.x[i] - g.fp.x[i]) <= s.profile.eps_precision);
    // sigma_0 and its complement
    int comp = -1;
    for (int j = 1; j < g.family.count() && comp < 0; ++j) {
      auto a = g.family.sigma(0), b = g.family.sigma(j);
      std::vector<int> both;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
      if (both.empty()) comp = j;
    }
    REQUIRE(comp > 0);
    StrategyA two;
    for (const auto& [a, p] : g.A.support)
      if (a.j == 0 || a.j == comp) two.support.emplace_back(a, 0.5);
    auto e2 = extract_point(two, g.family, 64);
    CHECK(e2.uncovered == 0);
    for (int i = 0; i < 256; ++i) CHECK(e2.x[i] == doctest::Approx(e.x[i]).epsilon(1e-14));
    StrategyA one{{{g.A.support[0].first, 1.0}}};
    auto e1 = extract_point(one, g.family, 64);
    CHECK(e1.uncovered == 4 * 32);
    for (int i = 0; i < 256; ++i)
      if (!e1.covered[i]) CHECK(e1.x[i] == 0.0);
  }

  TEST_CASE("planted profile is an eps_plant-WSNE whose x_hat sits on the fixed point") {
    const auto& g = setup();
    const auto& s = six();
    auto rep = check_wsne(g.game, g.A, g.B, calibration::kPlantEpsilon);
    CHECK(rep.pass);
    auto xh = extract_point(g.B, g.family, 64, true);
    CHECK(xh.uncovered == 0);
    CHECK(normalized_distance(xh.x, g.fp.x) <= 10 * s.profile.eps_precision);
    // best responses reach the best values
    CHECK(g.game.value_a(g.game.best_response_a(g.B), g.B) == doctest::Approx(g.game.best_value_a(g.B)));
    CHECK(g.game.value_b(g.game.best_response_b(g.A), g.A) == doctest::Approx(g.game.best_value_b(g.A)));
  }

  TEST_CASE("perturbing one support action raises its regret") {
    const auto& g = setup();
    const auto& s = six();
    auto A2 = g.A;
    for (auto& v : A2.support[0].first.x) v += 10 * std::sqrt(s.profile.eps_brouwer);
    auto before = regrets(g.game, g.A, g.B);
    auto after = regrets(g.game, A2, g.B);
    CHECK(after.regrets_a[0] > before.regrets_a[0] + 1e-13);
  }

  TEST_CASE("verify_reduction decodes the planted profile; non-equilibria are refused") {
    const auto& g = setup();
    const auto& s = six();
    auto rep = verify_reduction(g.game, s.field, g.A, g.B, calibration::kPlantEpsilon,
                                calibration::kResidualK * s.profile.eps_brouwer);
    CHECK(rep.solution == s.solution);
    CHECK(rep.residual_sq <= calibration::kResidualK * s.profile.eps_brouwer);
    auto B2 = g.B;
    for (auto& [b, p] : B2.support) b.J = g.B.support[0].first.J;  // Bob stops mixing J
    CHECK_THROWS(verify_reduction(g.game, s.field, g.A, B2, calibration::kPlantEpsilon,
                                  calibration::kResidualK * s.profile.eps_brouwer));
  }

  TEST_CASE("strategy text round-trips") {
    const auto& g = setup();
    auto A = read_strategy_a(write_strategy(g.A));
    auto B = read_strategy_b(write_strategy(g.B));
    CHECK(A.support == g.A.support);
    CHECK(B.support == g.B.support);
    auto bot = g.A.support[0].first;
    bot.v[1] = std::nullopt;
    bot.alpha[1] = std::nullopt;
    CHECK(parse_alice_action(serialize_action(bot)) == bot);
  }
}
