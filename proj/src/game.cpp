#include "nashlab/game.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace nashlab {

// ---- bimatrix ---------------------------------------------------------------

double BimatrixGame::value_a(int a, const MixedStrategy<int>& B) const {
  double v = 0;
  for (const auto& [b, p] : B.support) v += p * payoff_a(a, b);
  return v;
}

double BimatrixGame::best_value_a(const MixedStrategy<int>& B) const {
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < rows; ++a) best = std::max(best, value_a(a, B));
  return best;
}

double BimatrixGame::value_b(int b, const MixedStrategy<int>& A) const {
  double v = 0;
  for (const auto& [a, p] : A.support) v += p * payoff_b(a, b);
  return v;
}

double BimatrixGame::best_value_b(const MixedStrategy<int>& A) const {
  double best = -std::numeric_limits<double>::infinity();
  for (int b = 0; b < cols; ++b) best = std::max(best, value_b(b, A));
  return best;
}

// ---- GameSpec and sub-utilities -------------------------------------------------

int GameSpec::pointer_width() const {
  int w = 0;
  while ((std::uint64_t{1} << w) < host->num_vertices() + 1) ++w;
  return w;
}

std::optional<VertexId> GameSpec::joint(const HalfVertex& va, const HalfVertex& vb) const {
  if (!va || !vb) return std::nullopt;
  std::uint64_t bits = (std::uint64_t{*va} << code.nb) | *vb;
  return host->vertex_of(Label{bits, host->label_width()});
}

double GameSpec::inter_norm() const {
  return 4.0 * family.m / (double(family.ell) * family.ell);
}

bool legal_half_pair(const GameSpec& spec, const HalfVertex& v1, const HalfVertex& v2) {
  if (!v1 || !v2 || *v1 == *v2) return true;
  // half-neighbours: on the complete host any two vertices are adjacent
  return spec.host->kind() == HostKind::kCompleteWithPointers;
}

std::uint64_t count_legal_pairs(int n) {
  // complete host: every (half, half) pair plus the bottom shapes
  std::uint64_t h = (std::uint64_t{1} << ((n + 1) / 2)) + 1;
  return h * h;
}

namespace {

bool contains(const std::vector<int>& sorted, int j) {
  return std::binary_search(sorted.begin(), sorted.end(), j);
}

// Positions (in S, in T) of the common members of two sorted index lists.
std::vector<std::pair<int, int>> common(const std::vector<int>& S, const std::vector<int>& T) {
  std::vector<std::pair<int, int>> out;
  std::size_t a = 0, b = 0;
  while (a < S.size() && b < T.size()) {
    if (S[a] < T[b]) ++a;
    else if (S[a] > T[b]) ++b;
    else out.emplace_back(static_cast<int>(a++), static_cast<int>(b++));
  }
  return out;
}

int threshold_test(double sum_sq, int count, const ConstantsProfile& prof) {
  double d = count ? std::sqrt(sum_sq / count) : 0.0;  // empty restriction has norm 0
  return d < 23 * prof.sqrt_h() ? 1 : -1;
}

// U_v for Alice's half va in round r against Bob's x on tau_{jb}.
int uv_alice(const GameSpec& spec, const HalfVertex& va, const BobAction& b, int r) {
  if (!va) return 0;
  const auto& T = spec.tau_sets[b.j];
  const int hm = spec.half_m();
  std::uint64_t cw = spec.code.half.encode_half(*va);
  double s = 0;
  int n = 0;
  for (std::size_t q = 0; q < T.size(); ++q) {
    if (T[q] >= hm) continue;
    double d = b.x[r * T.size() + q] - (spec.code.half.bit(cw, T[q]) ? 1.0 : 0.0);
    s += d * d;
    ++n;
  }
  return threshold_test(s, n, spec.profile);
}

int uv_bob(const GameSpec& spec, const HalfVertex& vb, const AliceAction& a, int r) {
  if (!vb) return 0;
  const auto& S = spec.sigma_sets[a.j];
  const int hm = spec.half_m();
  std::uint64_t cw = spec.code.half.encode_half(*vb);
  double s = 0;
  int n = 0;
  for (std::size_t q = 0; q < S.size(); ++q) {
    if (S[q] < hm) continue;
    double d = a.x[r * S.size() + q] - (spec.code.half.bit(cw, S[q] - hm) ? 1.0 : 0.0);
    s += d * d;
    ++n;
  }
  return threshold_test(s, n, spec.profile);
}

double imitation(const GameSpec& spec, const std::vector<double>& xa, int ja,
                 const std::vector<double>& xb, int jb) {
  const auto& S = spec.sigma_sets[ja];
  const auto& T = spec.tau_sets[jb];
  double s = 0;
  for (auto [qs, qt] : common(S, T))
    for (int bl = 0; bl < 4; ++bl) {
      double d = xa[bl * S.size() + qs] - xb[bl * T.size() + qt];
      s += d * d;
    }
  return -s / spec.inter_norm();
}

void check_action_shape(const GameSpec& spec, const std::vector<double>& x, int j, bool sigma) {
  if (j < 0 || j >= spec.family.count()) throw std::invalid_argument("subset index out of range");
  std::size_t want = 4 * (sigma ? spec.sigma_sets[j].size() : spec.tau_sets[j].size());
  if (x.size() != want) throw std::invalid_argument("partial vector has the wrong length");
}

}  // namespace

int utility_v_alice(const GameSpec& spec, const AliceAction& a, const BobAction& b, int r) {
  return uv_alice(spec, a.v[r], b, r);
}

int utility_v_bob(const GameSpec& spec, const AliceAction& a, const BobAction& b, int r) {
  return uv_bob(spec, b.v[r], a, r);
}

int utility_hide_seek_bob_J(const AliceAction& a, const BobAction& b) {
  return contains(b.J, a.j) ? 1 : -1;
}
int utility_hide_seek_alice_j(const AliceAction& a, const BobAction& b) {
  return -utility_hide_seek_bob_J(a, b);
}
int utility_hide_seek_alice_J(const AliceAction& a, const BobAction& b) {
  return contains(a.J, b.j) ? 1 : -1;
}
int utility_hide_seek_bob_j(const AliceAction& a, const BobAction& b) {
  return -utility_hide_seek_alice_J(a, b);
}

double utility_x_alice(const GameSpec& spec, const AliceAction& a, const BobAction& b) {
  return imitation(spec, a.x, a.j, b.xhat, b.j);
}

double utility_x_bob(const GameSpec& spec, const AliceAction& a, const BobAction& b) {
  return imitation(spec, a.x, a.j, b.x, b.j);
}

// ---- oracles ----------------------------------------------------------------

AliceOracle::AliceOracle(std::shared_ptr<const GameSpec> spec, std::vector<std::uint8_t> alice)
    : spec_(std::move(spec)), alice_(std::move(alice)) {}

std::vector<std::uint8_t> AliceOracle::alpha_at(VertexId v) const {
  const int w = spec_->pointer_width();
  auto begin = alice_.begin() + static_cast<std::ptrdiff_t>(2 * v * w);
  return std::vector<std::uint8_t>(begin, begin + 2 * w);
}

int AliceOracle::utility_alpha(const AliceAction& a, const BobAction& b, int r) const {
  auto v = spec_->joint(a.v[r], b.v[r]);
  if (!v) return a.alpha[r] ? 0 : 1;
  return a.alpha[r] && *a.alpha[r] == alpha_at(*v) ? 1 : 0;
}

double AliceOracle::total(const AliceAction& a, const BobAction& b) const {
  const auto& p = spec_->profile;
  double t = 0;
  for (int r = 0; r < 2; ++r) {
    t += p.lambda_v * utility_v_alice(*spec_, a, b, r);
    t += p.lambda_alpha * utility_alpha(a, b, r);
  }
  t += p.lambda_j * (utility_hide_seek_alice_j(a, b) + utility_hide_seek_alice_J(a, b));
  t += p.lambda_x * utility_x_alice(*spec_, a, b);
  return t;
}

BobOracle::BobOracle(std::shared_ptr<const GameSpec> spec, std::vector<std::uint8_t> bob)
    : spec_(std::move(spec)), bob_(std::move(bob)) {}

std::optional<VertexNeighbourhood> BobOracle::vertex_info(VertexId v,
                                                          const AlphaSymbols& alpha) const {
  const int w = spec_->pointer_width();
  if (!alpha || static_cast<int>(alpha->size()) != 2 * w) return std::nullopt;
  const std::uint64_t N = spec_->host->num_vertices();
  std::uint64_t s = 0, p = 0;
  for (int q = 0; q < 2 * w; ++q) {
    int sym = (*alpha)[q];
    if (sym >= spec_->gadget.sigma) return std::nullopt;
    int bit = spec_->gadget(sym, bob_[2 * v * w + q]);
    if (q < w) s = (s << 1) | bit;
    else p = (p << 1) | bit;
  }
  VertexNeighbourhood nb{v, std::nullopt, std::nullopt};
  if (s < N && s != v) nb.succ = s;
  if (p < N && p != v) nb.pred = p;
  return nb;
}

std::vector<double> BobOracle::local_image(const AliceAction& a,
                                           const std::array<HalfVertex, 2>& vb) const {
  const auto& spec = *spec_;
  const auto& S = spec.sigma_sets.at(a.j);
  std::array<std::optional<VertexNeighbourhood>, 2> info;
  for (int r = 0; r < 2; ++r)
    if (auto v = spec.joint(a.v[r], vb[r])) info[r] = vertex_info(*v, a.alpha[r]);
  // lying alphas can make the two neighbourhoods contradict; drop info until consistent
  std::optional<LocalEvaluator> ev;
  for (int attempt = 0; attempt < 3 && !ev; ++attempt) {
    try {
      ev.emplace(spec.code, spec.profile, info, S, a.x, false);
    } catch (const std::invalid_argument&) {
      if (attempt == 0) info[1].reset();
      else info[0].reset();
    }
  }
  if (!ev) throw std::logic_error("local evaluator failed without vertex info");
  const int m = spec.m();
  std::vector<double> out(4 * S.size());
  for (int bl = 0; bl < 4; ++bl)
    for (std::size_t q = 0; q < S.size(); ++q) {
      std::size_t k = bl * S.size() + q;
      out[k] = ev->f(bl * m + S[q], a.x[k]);
    }
  return out;
}

double BobOracle::utility_xhat(const AliceAction& a, const BobAction& b,
                               const std::vector<double>& image) const {
  return imitation(*spec_, image, a.j, b.xhat, b.j);
}

double BobOracle::utility_xhat(const AliceAction& a, const BobAction& b) const {
  return utility_xhat(a, b, local_image(a, b.v));
}

double BobOracle::total(const AliceAction& a, const BobAction& b,
                        const std::vector<double>& image) const {
  const auto& p = spec_->profile;
  double t = 0;
  for (int r = 0; r < 2; ++r) t += p.lambda_v * utility_v_bob(*spec_, a, b, r);
  t += p.lambda_j * (utility_hide_seek_bob_J(a, b) + utility_hide_seek_bob_j(a, b));
  t += p.lambda_x * utility_x_bob(*spec_, a, b);
  t += p.lambda_x * utility_xhat(a, b, image);
  return t;
}

double BobOracle::total(const AliceAction& a, const BobAction& b) const {
  return total(a, b, local_image(a, b.v));
}

// ---- game -------------------------------------------------------------------

ImitationGame::ImitationGame(std::shared_ptr<const GameSpec> spec, AliceOracle alice,
                             BobOracle bob)
    : spec_(std::move(spec)), alice_(std::move(alice)), bob_(std::move(bob)) {}

double ImitationGame::value_a(const AliceAction& a, const StrategyB& B) const {
  check_action_shape(*spec_, a.x, a.j, true);
  double v = 0;
  for (const auto& [b, p] : B.support) v += p * alice_.total(a, b);
  return v;
}

double ImitationGame::value_b(const BobAction& b, const StrategyA& A) const {
  check_action_shape(*spec_, b.x, b.j, false);
  check_action_shape(*spec_, b.xhat, b.j, false);
  double v = 0;
  for (const auto& [a, p] : A.support) v += p * bob_.total(a, b);
  return v;
}

namespace {

// Per-coordinate moments of a mixed partial vector: weight, sum, sum of squares.
struct Moments {
  std::vector<double> P, S1, S2;
  explicit Moments(int n) : P(n, 0.0), S1(n, 0.0), S2(n, 0.0) {}
  void add(int i, double p, double v) {
    P[i] += p;
    S1[i] += p * v;
    S2[i] += p * v * v;
  }
  double target(int i, double step) const {
    return P[i] > 0 ? snap_to_grid(S1[i] / P[i], step) : 0.0;
  }
  // -sum over [4] x L of E[(value - snapped mean)^2 1{covered}]
  double best(const std::vector<int>& L, int m, double step) const {
    double s = 0;
    for (int bl = 0; bl < 4; ++bl)
      for (int c : L) {
        int i = bl * m + c;
        if (P[i] <= 0) continue;
        double x = target(i, step);
        s += S2[i] - 2 * x * S1[i] + x * x * P[i];
      }
    return -s;
  }
  std::vector<double> fill(const std::vector<int>& L, int m, double step) const {
    std::vector<double> out;
    out.reserve(4 * L.size());
    for (int bl = 0; bl < 4; ++bl)
      for (int c : L) out.push_back(target(bl * m + c, step));
    return out;
  }
};

std::vector<int> top_half(const std::vector<double>& mass) {
  std::vector<int> idx(mass.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return mass[a] > mass[b]; });
  idx.resize(mass.size() / 2);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<HalfVertex> half_options(int bits) {
  std::vector<HalfVertex> out{std::nullopt};
  for (std::uint32_t v = 0; v < (1u << bits); ++v) out.push_back(v);
  return out;
}

}  // namespace

// Alice's problem separates into (v_r, alpha_r) per round, (j, x) and J.
AliceAction ImitationGame::best_response_a(const StrategyB& B) const {
  const auto& spec = *spec_;
  const auto& prof = spec.profile;
  const int m = spec.m(), count = spec.family.count();
  const double step = prof.eps_precision;
  AliceAction best;
  for (int r = 0; r < 2; ++r) {
    double bv = -std::numeric_limits<double>::infinity();
    for (const auto& va : half_options(spec.code.na)) {
      double ev = 0;
      std::map<AlphaSymbols, double> alpha_mass;
      for (const auto& [b, p] : B.support) {
        ev += p * uv_alice(spec, va, b, r);
        auto v = spec.joint(va, b.v[r]);
        alpha_mass[v ? AlphaSymbols(alice_.alpha_at(*v)) : AlphaSymbols()] += p;
      }
      AlphaSymbols alpha;
      double am = -1;
      for (const auto& [al, p] : alpha_mass)
        if (p > am) {
          am = p;
          alpha = al;
        }
      double val = prof.lambda_v * ev + prof.lambda_alpha * am;
      if (val > bv) {
        bv = val;
        best.v[r] = va;
        best.alpha[r] = alpha;
      }
    }
  }
  Moments mom(4 * m);
  std::vector<double> jb_mass(count, 0.0);
  for (const auto& [b, p] : B.support) {
    const auto& T = spec.tau_sets[b.j];
    for (int bl = 0; bl < 4; ++bl)
      for (std::size_t q = 0; q < T.size(); ++q) mom.add(bl * m + T[q], p, b.xhat[bl * T.size() + q]);
    jb_mass[b.j] += p;
  }
  double bj = -std::numeric_limits<double>::infinity();
  for (int ja = 0; ja < count; ++ja) {
    double hs = 0;
    for (const auto& [b, p] : B.support) hs += p * (contains(b.J, ja) ? -1 : 1);
    double val = prof.lambda_j * hs +
                 prof.lambda_x * mom.best(spec.sigma_sets[ja], m, step) / spec.inter_norm();
    if (val > bj) {
      bj = val;
      best.j = ja;
    }
  }
  best.x = mom.fill(spec.sigma_sets[best.j], m, step);
  best.J = top_half(jb_mass);
  return best;
}

double ImitationGame::best_value_a(const StrategyB& B) const {
  return value_a(best_response_a(B), B);
}

struct ImitationGame::BobBest {
  BobAction action;
  double value = 0;
};

ImitationGame::BobBest ImitationGame::solve_b(const StrategyA& A) const {
  const auto& spec = *spec_;
  const auto& prof = spec.profile;
  const int m = spec.m(), count = spec.family.count();
  const double step = prof.eps_precision;

  Moments xmom(4 * m);
  std::vector<double> ja_mass(count, 0.0);
  for (const auto& [a, p] : A.support) {
    check_action_shape(spec, a.x, a.j, true);
    const auto& S = spec.sigma_sets[a.j];
    for (int bl = 0; bl < 4; ++bl)
      for (std::size_t q = 0; q < S.size(); ++q) xmom.add(bl * m + S[q], p, a.x[bl * S.size() + q]);
    ja_mass[a.j] += p;
  }
  // parts that depend on j^b alone
  std::vector<double> jpart(count);
  for (int jb = 0; jb < count; ++jb) {
    double hs = 0;
    for (const auto& [a, p] : A.support) hs += p * (contains(a.J, jb) ? -1 : 1);
    jpart[jb] = prof.lambda_j * hs +
                prof.lambda_x * xmom.best(spec.tau_sets[jb], m, step) / spec.inter_norm();
  }
  // U_v per round and half
  auto halves = half_options(spec.code.nb);
  std::vector<std::array<double, 2>> uv(halves.size());
  for (std::size_t h = 0; h < halves.size(); ++h)
    for (int r = 0; r < 2; ++r) {
      double e = 0;
      for (const auto& [a, p] : A.support) e += p * uv_bob(spec, halves[h], a, r);
      uv[h][r] = prof.lambda_v * e;
    }

  BobBest best;
  best.value = -std::numeric_limits<double>::infinity();
  for (std::size_t h1 = 0; h1 < halves.size(); ++h1)
    for (std::size_t h2 = 0; h2 < halves.size(); ++h2) {
      std::array<HalfVertex, 2> vb{halves[h1], halves[h2]};
      if (!legal_half_pair(spec, vb[0], vb[1])) continue;
      Moments fm(4 * m);
      for (const auto& [a, p] : A.support) {
        auto img = bob_.local_image(a, vb);
        const auto& S = spec.sigma_sets[a.j];
        for (int bl = 0; bl < 4; ++bl)
          for (std::size_t q = 0; q < S.size(); ++q) fm.add(bl * m + S[q], p, img[bl * S.size() + q]);
      }
      double base = uv[h1][0] + uv[h2][1];
      for (int jb = 0; jb < count; ++jb) {
        double val = base + jpart[jb] +
                     prof.lambda_x * fm.best(spec.tau_sets[jb], m, step) / spec.inter_norm();
        if (val > best.value) {
          best.value = val;
          best.action.v = vb;
          best.action.j = jb;
          best.action.xhat = fm.fill(spec.tau_sets[jb], m, step);
        }
      }
    }
  best.action.x = xmom.fill(spec.tau_sets[best.action.j], m, step);
  best.action.J = top_half(ja_mass);
  return best;
}

BobAction ImitationGame::best_response_b(const StrategyA& A) const { return solve_b(A).action; }

double ImitationGame::best_value_b(const StrategyA& A) const {
  return value_b(solve_b(A).action, A);
}

ImitationGame build_game(const ComposedInstance& ci, const VertexCode& code,
                         const SubsetFamily& family, const ConstantsProfile& profile) {
  if (ci.host->kind() != HostKind::kCompleteWithPointers)
    throw std::invalid_argument("the game is built over the complete host with pointers");
  if (code.n() != ci.host->label_width())
    throw std::invalid_argument("code length does not match host label width");
  if (family.m != code.m()) throw std::invalid_argument("family and code disagree on m");
  profile.validate();
  auto spec = std::make_shared<GameSpec>();
  spec->host = ci.host;
  spec->gadget = ci.gadget;
  spec->code = code;
  spec->family = family;
  spec->profile = profile;
  for (int j = 0; j < family.count(); ++j) {
    spec->sigma_sets.push_back(family.sigma(j));
    spec->tau_sets.push_back(family.tau(j));
  }
  std::shared_ptr<const GameSpec> cspec = spec;
  return ImitationGame(cspec, AliceOracle(cspec, ci.alice), BobOracle(cspec, ci.bob));
}

// ---- extraction, planting, verification ---------------------------------------

namespace {

template <class Strategy, class Get>
ExtractedPoint extract_impl(const Strategy& S, int m, Get get) {
  S.validate();
  std::vector<double> sum(4 * m, 0.0), w(4 * m, 0.0);
  for (const auto& [act, p] : S.support) {
    auto [L, x] = get(act);
    for (int bl = 0; bl < 4; ++bl)
      for (std::size_t q = 0; q < L->size(); ++q) {
        int i = bl * m + (*L)[q];
        sum[i] += p * (*x)[bl * L->size() + q];
        w[i] += p;
      }
  }
  ExtractedPoint e;
  e.x.assign(4 * m, 0.0);
  e.covered.assign(4 * m, 0);
  for (int i = 0; i < 4 * m; ++i) {
    if (w[i] > 0) {
      e.x[i] = sum[i] / w[i];
      e.covered[i] = 1;
    } else {
      ++e.uncovered;
    }
  }
  return e;
}

}  // namespace

ExtractedPoint extract_point(const StrategyA& A, const SubsetFamily& family, int m) {
  std::vector<std::vector<int>> sets(family.count());
  return extract_impl(A, m, [&](const AliceAction& a) {
    if (sets.at(a.j).empty()) sets[a.j] = family.sigma(a.j);
    if (a.x.size() != 4 * sets[a.j].size()) throw std::invalid_argument("partial vector length");
    return std::pair{&sets[a.j], &a.x};
  });
}

ExtractedPoint extract_point(const StrategyB& B, const SubsetFamily& family, int m,
                             bool use_xhat) {
  std::vector<std::vector<int>> sets(family.count());
  return extract_impl(B, m, [&](const BobAction& b) {
    if (sets.at(b.j).empty()) sets[b.j] = family.tau(b.j);
    const auto* x = use_xhat ? &b.xhat : &b.x;
    if (x->size() != 4 * sets[b.j].size()) throw std::invalid_argument("partial vector length");
    return std::pair{&sets[b.j], x};
  });
}

std::pair<StrategyA, StrategyB> plant_equilibrium(const ImitationGame& game,
                                                  const BrouwerField& field,
                                                  std::span<const double> xstar,
                                                  double tolerance) {
  const auto& spec = game.spec();
  const int m = spec.m(), count = spec.family.count();
  const double step = spec.profile.eps_precision;
  double res = field.residual(xstar);
  if (res > tolerance) throw std::runtime_error("x* is not a fixed point within tolerance");
  auto info = decode_vertex_info(field, xstar);
  if (!info[0] || !info[1] || info[0]->v != info[1]->v)
    throw std::runtime_error("x* undecodable: blocks 1-2 do not name one vertex");
  VertexId v = info[0]->v;
  std::uint64_t label = spec.host->label(v).bits;
  std::uint32_t va = static_cast<std::uint32_t>(spec.code.half_a(label));
  std::uint32_t vb = static_cast<std::uint32_t>(spec.code.half_b(label));

  std::vector<int> J0(count / 2), J1;
  std::iota(J0.begin(), J0.end(), 0);
  for (int j = count / 2; j < count; ++j) J1.push_back(j);
  auto snapped = [&](const std::vector<int>& L) {
    auto x = restrict_point(xstar, m, L);
    for (auto& y : x) y = snap_to_grid(y, step);
    return x;
  };

  StrategyA A;
  auto alpha = game.alice().alpha_at(v);
  for (int j = 0; j < count; ++j) {
    AliceAction a;
    a.v = {va, va};
    a.j = j;
    a.J = j % 2 == 0 ? J0 : J1;
    a.x = snapped(spec.sigma_sets[j]);
    a.alpha = {alpha, alpha};
    A.support.emplace_back(std::move(a), 1.0 / count);
  }

  // x_hat: Bob's conditional mean of the local images against A
  std::array<HalfVertex, 2> vbs{vb, vb};
  std::vector<double> sum(4 * m, 0.0), w(4 * m, 0.0);
  for (const auto& [a, p] : A.support) {
    auto img = game.bob().local_image(a, vbs);
    const auto& S = spec.sigma_sets[a.j];
    for (int bl = 0; bl < 4; ++bl)
      for (std::size_t q = 0; q < S.size(); ++q) {
        sum[bl * m + S[q]] += p * img[bl * S.size() + q];
        w[bl * m + S[q]] += p;
      }
  }
  StrategyB B;
  for (int j = 0; j < count; ++j) {
    BobAction b;
    b.v = vbs;
    b.j = j;
    b.J = j % 2 == 0 ? J0 : J1;
    const auto& T = spec.tau_sets[j];
    b.x = snapped(T);
    for (int bl = 0; bl < 4; ++bl)
      for (int c : T) {
        int i = bl * m + c;
        b.xhat.push_back(w[i] > 0 ? snap_to_grid(sum[i] / w[i], step) : 0.0);
      }
    B.support.emplace_back(std::move(b), 1.0 / count);
  }
  return {std::move(A), std::move(B)};
}

ReductionReport verify_reduction(const ImitationGame& game, const BrouwerField& field,
                                 const StrategyA& A, const StrategyB& B, double eps,
                                 double residual_sq_bound) {
  ReductionReport rep;
  rep.wsne = check_wsne(game, A, B, eps);
  if (!rep.wsne.pass) {
    std::ostringstream os;
    os << "precondition failed: profile is not an eps-WSNE (max regrets "
       << rep.wsne.max_regret_a << ", " << rep.wsne.max_regret_b << " > " << eps << ")";
    throw std::runtime_error(os.str());
  }
  auto ext = extract_point(B, game.spec().family, game.spec().m(), true);
  rep.uncovered = ext.uncovered;
  rep.residual = field.residual(ext.x);
  rep.residual_sq = rep.residual * rep.residual;
  if (rep.residual_sq > residual_sq_bound) {
    std::ostringstream os;
    os << "residual^2 " << rep.residual_sq << " exceeds bound " << residual_sq_bound;
    throw std::runtime_error(os.str());
  }
  rep.solution = decode_fixed_point(field, ext.x, std::sqrt(residual_sq_bound));
  return rep;
}

// ---- serialization ----------------------------------------------------------

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string half_str(const HalfVertex& v) { return v ? std::to_string(*v) : "_"; }

HalfVertex parse_half(const std::string& s) {
  if (s == "_") return std::nullopt;
  return static_cast<std::uint32_t>(std::stoul(s));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string ints_str(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string reals_str(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
  return s;
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  if (s.empty()) return out;
  for (auto& t : split(s, ',')) out.push_back(std::stoi(t));
  return out;
}

std::vector<double> parse_reals(const std::string& s) {
  std::vector<double> out;
  if (s.empty()) return out;
  for (auto& t : split(s, ',')) out.push_back(std::stod(t));
  return out;
}

std::string alpha_str(const AlphaSymbols& a) {
  if (!a) return "_";
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (auto c : *a) {
    if (c >= 16) throw std::invalid_argument("alpha symbol too large to serialize");
    s += hex[c];
  }
  return s;
}

AlphaSymbols parse_alpha(const std::string& s) {
  if (s == "_") return std::nullopt;
  std::vector<std::uint8_t> out;
  for (char c : s) out.push_back(static_cast<std::uint8_t>(std::stoi(std::string(1, c), nullptr, 16)));
  return out;
}

std::map<std::string, std::string> fields(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw std::runtime_error("bad action field: " + tok);
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return kv;
}

const std::string& need(const std::map<std::string, std::string>& kv, const char* key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw std::runtime_error(std::string("action missing field ") + key);
  return it->second;
}

std::pair<HalfVertex, HalfVertex> parse_pair(const std::string& s) {
  auto p = split(s, ',');
  if (p.size() != 2) throw std::runtime_error("bad vertex pair");
  return {parse_half(p[0]), parse_half(p[1])};
}

template <class S, class Ser>
std::string write_strategy_impl(const S& st, const char* side, Ser ser) {
  std::string out = std::string("strategy v1 side=") + side + "\n";
  for (const auto& [a, p] : st.support) out += "p " + num(p) + " " + ser(a) + "\n";
  return out;
}

template <class Action, class Parse>
MixedStrategy<Action> read_strategy_impl(const std::string& text, const char* side, Parse parse) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (line != std::string("strategy v1 side=") + side)
    throw std::runtime_error("bad strategy header: " + line);
  MixedStrategy<Action> st;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("p ", 0) != 0) throw std::runtime_error("bad strategy line");
    auto sp = line.find(' ', 2);
    if (sp == std::string::npos) throw std::runtime_error("bad strategy line");
    double p = std::stod(line.substr(2, sp - 2));
    st.support.emplace_back(parse(line.substr(sp + 1)), p);
  }
  st.validate();
  return st;
}

}  // namespace

std::string serialize_action(const AliceAction& a) {
  return "v=" + half_str(a.v[0]) + "," + half_str(a.v[1]) + " j=" + std::to_string(a.j) +
         " J=" + ints_str(a.J) + " alpha=" + alpha_str(a.alpha[0]) + "," + alpha_str(a.alpha[1]) +
         " x=" + reals_str(a.x);
}

std::string serialize_action(const BobAction& b) {
  return "v=" + half_str(b.v[0]) + "," + half_str(b.v[1]) + " j=" + std::to_string(b.j) +
         " J=" + ints_str(b.J) + " x=" + reals_str(b.x) + " xh=" + reals_str(b.xhat);
}

AliceAction parse_alice_action(const std::string& text) {
  auto kv = fields(text);
  AliceAction a;
  auto [v1, v2] = parse_pair(need(kv, "v"));
  a.v = {v1, v2};
  a.j = std::stoi(need(kv, "j"));
  a.J = parse_ints(need(kv, "J"));
  auto al = split(need(kv, "alpha"), ',');
  if (al.size() != 2) throw std::runtime_error("bad alpha pair");
  a.alpha = {parse_alpha(al[0]), parse_alpha(al[1])};
  a.x = parse_reals(need(kv, "x"));
  return a;
}

BobAction parse_bob_action(const std::string& text) {
  auto kv = fields(text);
  BobAction b;
  auto [v1, v2] = parse_pair(need(kv, "v"));
  b.v = {v1, v2};
  b.j = std::stoi(need(kv, "j"));
  b.J = parse_ints(need(kv, "J"));
  b.x = parse_reals(need(kv, "x"));
  b.xhat = parse_reals(need(kv, "xh"));
  return b;
}

std::string write_strategy(const StrategyA& A) {
  return write_strategy_impl(A, "A", [](const AliceAction& a) { return serialize_action(a); });
}

std::string write_strategy(const StrategyB& B) {
  return write_strategy_impl(B, "B", [](const BobAction& b) { return serialize_action(b); });
}

StrategyA read_strategy_a(const std::string& text) {
  return read_strategy_impl<AliceAction>(text, "A", parse_alice_action);
}

StrategyB read_strategy_b(const std::string& text) {
  return read_strategy_impl<BobAction>(text, "B", parse_bob_action);
}

}  // namespace nashlab
