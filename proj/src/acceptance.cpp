#include "nashlab/acceptance.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "nashlab/brouwer.hpp"
#include "nashlab/calibration.hpp"
#include "nashlab/code.hpp"
#include "nashlab/embed.hpp"
#include "nashlab/eol.hpp"
#include "nashlab/game.hpp"
#include "nashlab/graphs.hpp"
#include "nashlab/lift.hpp"
#include "nashlab/locality.hpp"
#include "nashlab/rng.hpp"

namespace nashlab {

namespace {

constexpr int kN = 6;
constexpr std::uint64_t kCodeSeed = 7;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// The shared n=6 setting for criteria 3-6.
struct Setting {
  EolInstance inst;
  VertexCode code;
  EolSolution solution;
};

Setting make_setting(const AcceptanceOptions& opt) {
  Rng rng = make_rng(opt.seed, "instance");
  EolInstance inst = sample_critical(std::uint64_t{1} << kN, rng);
  auto sols = enumerate_solutions(inst, SolutionRules::kStrict);
  if (sols.size() != 1) throw std::runtime_error("critical sample has " + std::to_string(sols.size()) + " solutions");
  return {inst, VertexCode::build(kN, 2, kCodeSeed, opt.profile), sols.front()};
}

// ---- 1 ----
bool block_counts(const AcceptanceOptions& opt, std::ostringstream& out) {
  bool ok = true;
  for (std::uint64_t N : {6, 10, 50}) {
    Rng rng = make_rng(opt.seed, "instance", N);
    EolInstance x = sample_critical(N, rng);
    int del = block_sensitivity(canonical_solver, x, deletion_blocks(x));
    int cut = block_sensitivity(noncanonical_solver, x, shortcut_blocks(x));
    bool good = del == int(N) - 1 && cut == int(N) / 2 - 1;
    ok = ok && good;
    out << "N=" << N << " del=" << del << " cut=" << cut << "; ";
  }
  return ok;
}

// ---- 2 ----
bool congestion_check(const AcceptanceOptions& opt, std::ostringstream& out) {
  const int n = 10;
  const std::uint64_t Nprime = 2ull * (1ull << n) * n;
  int d = static_cast<int>(std::bit_ceil(static_cast<unsigned>(std::ceil(std::log2(double(Nprime))))));
  auto rep = congestion_simulation(n, d, 500, derive_seed(opt.seed, "experiments", 2));
  out << "d=" << d << " bot=" << rep.bot_rate() << " violations=" << rep.violations
      << " max congestion=" << rep.max_congestion;
  return rep.bot_rate() <= 0.05 && rep.violations == 0;
}

// ---- 3 ----
bool brouwer_soundness(const AcceptanceOptions& opt, std::ostringstream& out) {
  auto s = make_setting(opt);
  BrouwerField field(s.inst, s.code, opt.profile);
  const auto& p = opt.profile;
  Rng rng = make_rng(opt.seed, "experiments", 3);
  std::uint64_t out_of_range = 0, weak = 0, far = 0;
  double min_ratio = 1e300;
  for (int t = 0; t < 100000; ++t) {
    Point x = random_cube_point(field.dim(), rng);
    Point g = field.g(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
      double y = x[i] + g[i];
      if (y < -1.0 || y > 2.0) {
        ++out_of_range;
        break;
      }
    }
    if (field.distance_to_endpoints(x) > 4 * p.sqrt_h()) {
      ++far;
      double r = normalized_norm(g) / p.delta;
      min_ratio = std::min(min_ratio, r);
      if (r < calibration::kDisplacementC1) ++weak;
    }
  }
  auto lip = check_lipschitz(field, 100000, rng, 10000);
  const double gap_bound = calibration::kLipschitzBound * 2e-9;
  out << "range violations=" << out_of_range << " far points=" << far
      << " min |g|/delta=" << fmt("%.4f", min_ratio) << " (c1=" << calibration::kDisplacementC1
      << ") L=" << fmt("%.4f", lip.lipschitz) << " (L0=" << calibration::kLipschitzBound
      << ") boundary gap=" << fmt("%.2e", lip.boundary_gap) << " pairs=" << lip.pairs;
  return out_of_range == 0 && weak == 0 && calibration::kDisplacementC1 >= 0.05 &&
         lip.lipschitz <= calibration::kLipschitzBound && lip.boundary_gap <= gap_bound;
}

// ---- 4 ----
bool fixed_point_correspondence(const AcceptanceOptions& opt, std::ostringstream& out) {
  auto s = make_setting(opt);
  BrouwerField field(s.inst, s.code, opt.profile);
  const auto& p = opt.profile;
  bool ok = !field.endpoints().empty();
  for (const auto& e : field.endpoints()) {
    auto fp = find_fixed_point(field, e);
    bool good = fp.residual <= calibration::kFixedPointResidual;
    try {
      auto sol = decode_fixed_point(field, fp.x, calibration::kFixedPointResidual);
      good = good && sol == s.solution;
      out << "endpoint seg " << e.segment << " residual " << fmt("%.2e", fp.residual) << " -> "
          << sol.vertex << " " << to_string(sol.reason) << "; ";
    } catch (const std::exception& ex) {
      good = false;
      out << "endpoint seg " << e.segment << " failed: " << ex.what() << "; ";
    }
    ok = ok && good;
  }
  Rng rng = make_rng(opt.seed, "experiments", 4);
  std::uint64_t low = 0, far = 0;
  double min_res = 1e300;
  for (int t = 0; t < 1000000; ++t) {
    Point x = random_cube_point(field.dim(), rng);
    if (field.distance_to_endpoints(x) <= 4 * p.sqrt_h()) continue;
    ++far;
    double r = field.residual(x);
    min_res = std::min(min_res, r);
    if (r <= p.delta / 4) ++low;
  }
  out << "far points=" << far << " min residual/delta=" << fmt("%.4f", min_res / p.delta)
      << " below delta/4=" << low;
  return ok && low == 0;
}

// ---- 5 ----
bool doubly_local(const AcceptanceOptions& opt, std::ostringstream& out) {
  auto s = make_setting(opt);
  const auto& p = opt.profile;
  BrouwerField field(s.inst, s.code, p);
  const int m = field.m();
  auto fam = build_subset_families(m, 2, 4, derive_seed(opt.seed, "family"));
  Rng rng = make_rng(opt.seed, "experiments", 5);
  const double tol = calibration::doubly_local_tolerance(p);
  const double eps = 1e-3;
  const int trials = 10000;
  int agree = 0, stable = 0;
  double worst = 0;
  std::normal_distribution<double> nd;
  const auto& segs = field.chain().segments();
  for (int t = 0; t < trials; ++t) {
    // points near the path, where the local evaluator has work to do
    Point x = field.chain().point_on(static_cast<int>(uniform_below(rng, segs.size())), uniform01(rng));
    std::vector<double> u(x.size());
    for (auto& v : u) v = nd(rng);
    double scale = 4 * p.h * uniform01(rng) / normalized_norm(u);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i] + scale * u[i], -1.0, 2.0);
    int j = static_cast<int>(uniform_below(rng, fam.count()));
    auto T = fam.sigma(j);
    int i = static_cast<int>(uniform_below(rng, 4)) * m + T[uniform_below(rng, T.size())];
    auto info = decode_vertex_info(field, x);
    auto part = restrict_point(x, m, T);
    double local = doubly_local_eval(s.code, p, i, x[i], info, T, part);
    double global = field.f(x)[i];
    double err = std::abs(local - global);
    worst = std::max(worst, err);
    if (err <= tol) ++agree;
    auto noisy = part;
    for (auto& v : noisy) v += eps * (2 * uniform01(rng) - 1);
    double xi = x[i] + eps * (2 * uniform01(rng) - 1);
    double moved = doubly_local_eval(s.code, p, i, xi, info, T, noisy);
    if (std::abs(moved - local) <= calibration::kDoublyLocalC * eps) ++stable;
  }
  double fa = double(agree) / trials, fs = double(stable) / trials;
  out << "agreement " << fa << " (tol " << fmt("%.2e", tol) << ", worst " << fmt("%.2e", worst)
      << ") stability " << fs << " (C=" << calibration::kDoublyLocalC << ")";
  return fa >= calibration::kLocalFrequency && fs >= calibration::kLocalFrequency;
}

// ---- 6 ----
bool game_round_trip(const AcceptanceOptions& opt, std::ostringstream& out) {
  auto s = make_setting(opt);
  const auto& p = opt.profile;
  Rng er = make_rng(opt.seed, "embedding");
  auto ci = encode_composed(s.inst, Gadget::ip2(), er);
  BrouwerField field(decode_composed(ci), s.code, p);
  auto fam = build_subset_families(s.code.m(), 2, 4, derive_seed(opt.seed, "family"));
  auto game = build_game(ci, s.code, fam, p);
  auto fp = find_fixed_point(field, field.endpoints().front());
  auto [A, B] = plant_equilibrium(game, field, fp.x, calibration::kFixedPointResidual);
  auto wsne = check_wsne(game, A, B, calibration::kPlantEpsilon);
  double eps_plant = std::max(wsne.max_regret_a, wsne.max_regret_b);
  out << "eps_plant=" << fmt("%.3e", eps_plant) << " (ceiling " << calibration::kPlantEpsilon << ")";
  if (!wsne.pass) return false;
  auto rep = verify_reduction(game, field, A, B, calibration::kPlantEpsilon,
                              calibration::kResidualK * p.eps_brouwer);
  out << " residual^2=" << fmt("%.3e", rep.residual_sq) << " (K eps_B="
      << fmt("%.1e", calibration::kResidualK * p.eps_brouwer) << ") -> " << rep.solution.vertex
      << " " << to_string(rep.solution.reason);
  return rep.solution == s.solution;
}

// ---- 7 ----
MixedStrategy<int> random_mixed(int size, Rng& rng) {
  MixedStrategy<int> S;
  double total = 0;
  std::vector<double> w(size);
  for (auto& v : w) total += (v = uniform01(rng) < 0.3 ? 0.0 : uniform01(rng));
  if (total == 0) {
    w[0] = 1;
    total = 1;
  }
  for (int a = 0; a < size; ++a)
    if (w[a] > 0) S.support.emplace_back(a, w[a] / total);
  // renormalize exactly
  double sum = S.total();
  S.support.back().second += 1.0 - sum;
  return S;
}

BimatrixGame random_bimatrix(int rows, int cols, Rng& rng) {
  BimatrixGame g{rows, cols, std::vector<double>(rows * cols), std::vector<double>(rows * cols)};
  for (auto& v : g.R) v = uniform01(rng);
  for (auto& v : g.C) v = uniform01(rng);
  return g;
}

// Row 0 dominates by 1; eps mass sits on the other rows. Bob is indifferent.
std::pair<BimatrixGame, std::pair<MixedStrategy<int>, MixedStrategy<int>>> ane_not_wsne(
    double eps, int rows) {
  BimatrixGame g{rows, 2, std::vector<double>(rows * 2, 0.0), std::vector<double>(rows * 2, 0.5)};
  for (int b = 0; b < 2; ++b) g.R[b] = 1.0;
  MixedStrategy<int> A, B;
  // eps/2 on the bad rows: a mass of exactly eps ties the ANE check up to rounding
  A.support.emplace_back(0, 1.0 - eps / 2);
  for (int a = 1; a < rows; ++a) A.support.emplace_back(a, eps / 2 / (rows - 1));
  B.support = {{0, 0.5}, {1, 0.5}};
  return {g, {A, B}};
}

bool checker_algebra(const AcceptanceOptions& opt, std::ostringstream& out) {
  Rng rng = make_rng(opt.seed, "experiments", 7);
  int implication_failures = 0, wsne_hits = 0;
  for (int t = 0; t < 1000; ++t) {
    int r = 2 + static_cast<int>(uniform_below(rng, 3)), c = 2 + static_cast<int>(uniform_below(rng, 3));
    auto g = random_bimatrix(r, c, rng);
    auto A = random_mixed(r, rng), B = random_mixed(c, rng);
    auto reg = regrets(g, A, B);
    double tight = std::max(reg.max_regret_a, reg.max_regret_b);
    for (double eps : {tight, tight * uniform01(rng) * 2, uniform01(rng)}) {
      if (!check_wsne(g, A, B, eps).pass) continue;
      ++wsne_hits;
      if (!check_ane(g, A, B, eps).pass) ++implication_failures;
    }
  }
  int family_failures = 0;
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-6}) {
    for (int rows : {2, 3, 5}) {
      auto [g, prof] = ane_not_wsne(eps, rows);
      const auto& [A, B] = prof;
      bool ane = check_ane(g, A, B, eps * 1.0).pass;  // payoff range 1
      bool not_wsne = !check_wsne(g, A, B, eps).pass;
      auto [A2, B2] = prune_ane_to_wsne(g, A, B, eps);
      bool pruned = check_wsne(g, A2, B2, 3 * std::sqrt(eps)).pass;
      if (!(ane && not_wsne && pruned)) ++family_failures;
    }
  }
  // hide-and-seek over every j and a spread of J sets
  auto fam = build_subset_families(64, 2, 4, derive_seed(opt.seed, "family"));
  const int count = fam.count();
  std::vector<std::vector<int>> Js;
  std::vector<int> all(count);
  for (int q = 0; q < count; ++q) all[q] = q;
  Js.emplace_back(all.begin(), all.begin() + count / 2);
  Js.emplace_back(all.begin() + count / 2, all.end());
  for (int t = 0; t < 254; ++t) {
    auto perm = all;
    std::shuffle(perm.begin(), perm.end(), rng);
    perm.resize(count / 2);
    std::sort(perm.begin(), perm.end());
    Js.push_back(perm);
  }
  std::uint64_t pairs = 0, nonzero = 0;
  for (int ja = 0; ja < count; ++ja)
    for (const auto& JA : Js)
      for (int jb = 0; jb < count; ++jb)
        for (const auto& JB : {Js[0], Js[1]}) {
          AliceAction a;
          a.j = ja;
          a.J = JA;
          BobAction b;
          b.j = jb;
          b.J = JB;
          ++pairs;
          if (utility_hide_seek_alice_j(a, b) + utility_hide_seek_bob_J(a, b) != 0 ||
              utility_hide_seek_alice_J(a, b) + utility_hide_seek_bob_j(a, b) != 0)
            ++nonzero;
        }
  out << "WSNE=>ANE failures " << implication_failures << "/" << wsne_hits
      << "; counterexample family failures " << family_failures
      << "; hide-and-seek non-zero-sum pairs " << nonzero << "/" << pairs;
  return implication_failures == 0 && wsne_hits > 0 && family_failures == 0 && nonzero == 0;
}

// ---- 8 ----
bool protocol_cost(const AcceptanceOptions& opt, std::ostringstream& out) {
  std::vector<std::uint64_t> costs;
  for (int n : {6, 8, 10, 12}) {
    auto H = replacement_product(multiply_edges(build_double_butterfly(n), default_multiplicity(n)));
    costs.push_back(max_transcript_cost(*H, Gadget::ip2()));
  }
  bool constant = std::all_of(costs.begin(), costs.end(), [&](auto c) { return c == costs[0]; });
  auto H = replacement_product(multiply_edges(build_double_butterfly(2), default_multiplicity(2)));
  Rng rng = make_rng(opt.seed, "experiments", 8);
  int mismatches = 0;
  for (int t = 0; t < 10000; ++t) {
    auto ci = random_composed(H, Gadget::ip2(), rng);
    auto x = decode_composed(ci);
    VertexId v = uniform_below(rng, H->num_vertices());
    auto pi = run_pi_v(v, ci);
    auto ref = direct_sp(x, v);
    if (pi.S != ref.first || pi.P != ref.second) ++mismatches;
    if (interpret_transcript(*H, ci.gadget, v, pi.transcript) != ref) ++mismatches;
  }
  out << "cost over n=6,8,10,12:";
  for (auto c : costs) out << " " << c;
  out << "; Pi_v mismatches " << mismatches << "/10000";
  return constant && mismatches == 0;
}

// ---- 9 ----
bool family_exactness(const AcceptanceOptions& opt, std::ostringstream& out) {
  struct Cfg {
    int m, ell, k;
  };
  const Cfg cfgs[] = {{64, 2, 2},  {64, 2, 4},  {64, 4, 2},  {64, 4, 4},  {64, 8, 2},
                      {144, 2, 2}, {144, 2, 4}, {144, 3, 2}, {144, 3, 4}, {144, 4, 2},
                      {144, 4, 4}, {144, 6, 2}};
  int failures = 0;
  std::uint64_t pairs = 0;
  for (const auto& c : cfgs) {
    auto fam = build_subset_families(c.m, c.ell, c.k, derive_seed(opt.seed, "family", c.m * 100 + c.ell * 10 + c.k));
    auto a = audit_family(fam);
    pairs += a.pairs_checked;
    if (!a.ok) {
      ++failures;
      out << "m=" << c.m << " l=" << c.ell << " k=" << c.k << ": " << a.first_failure << "; ";
    }
  }
  out << std::size(cfgs) << " families, " << pairs << " intersections checked, " << failures
      << " failing";
  return failures == 0;
}

struct Criterion {
  int id;
  const char* name;
  double budget;
  bool (*body)(const AcceptanceOptions&, std::ostringstream&);
};

const Criterion kCriteria[] = {
    {1, "block-sensitivity-counts", 1.0, block_counts},
    {2, "congestion", 30.0, congestion_check},
    {3, "brouwer-soundness", 300.0, brouwer_soundness},
    {4, "fixed-point-correspondence", 300.0, fixed_point_correspondence},
    {5, "doubly-local-agreement", 120.0, doubly_local},
    {6, "game-round-trip", 600.0, game_round_trip},
    {7, "checker-algebra", 60.0, checker_algebra},
    {8, "protocol-cost", 60.0, protocol_cost},
    {9, "subset-family-exactness", 10.0, family_exactness},
};

}  // namespace

CriterionResult run_criterion(int id, const AcceptanceOptions& opt) {
  for (const auto& c : kCriteria) {
    if (c.id != id) continue;
    CriterionResult r{c.id, c.name, false, "", 0, c.budget};
    std::ostringstream out;
    auto t0 = std::chrono::steady_clock::now();
    try {
      r.pass = c.body(opt, out);
    } catch (const std::exception& e) {
      out << " error: " << e.what();
      r.pass = false;
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.seconds > r.budget_seconds) {
      out << " (over time budget)";
      r.pass = false;
    }
    r.detail = out.str();
    return r;
  }
  throw std::invalid_argument("no acceptance criterion " + std::to_string(id));
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& report) {
  std::vector<CriterionResult> out;
  for (const auto& c : kCriteria) {
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), c.id) == opt.only.end())
      continue;
    out.push_back(run_criterion(c.id, opt));
    if (report) report(out.back());
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  char head[128];
  std::snprintf(head, sizeof head, "%s [%d] %s (%.2fs / %.0fs): ", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.seconds, r.budget_seconds);
  return head + r.detail;
}

}  // namespace nashlab
