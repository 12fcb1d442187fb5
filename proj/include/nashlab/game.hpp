#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nashlab/brouwer.hpp"
#include "nashlab/code.hpp"
#include "nashlab/lift.hpp"
#include "nashlab/locality.hpp"
#include "nashlab/profile.hpp"

namespace nashlab {

// ---- generic mixed strategies and checkers ----------------------------------

template <class Action>
struct MixedStrategy {
  std::vector<std::pair<Action, double>> support;

  double total() const {
    double s = 0;
    for (const auto& [a, p] : support) s += p;
    return s;
  }
  void validate() const {
    if (support.empty()) throw std::invalid_argument("empty strategy");
    for (const auto& [a, p] : support)
      if (!(p >= 0)) throw std::invalid_argument("negative probability");
    if (std::abs(total() - 1.0) > 1e-12) throw std::invalid_argument("strategy is not normalized");
  }
};

struct RegretReport {
  bool pass = false;
  double eps = 0;
  std::vector<double> regrets_a, regrets_b;  // per support action
  double max_regret_a = 0, max_regret_b = 0;
  double gain_a = 0, gain_b = 0;  // expected-deviation gains
};

// Game interface used by the checkers:
//   value_a(a, B), best_value_a(B), value_b(b, A), best_value_b(A).
template <class Game>
RegretReport regrets(const Game& g, const MixedStrategy<typename Game::ActionA>& A,
                     const MixedStrategy<typename Game::ActionB>& B) {
  A.validate();
  B.validate();
  RegretReport r;
  double best_a = g.best_value_a(B), best_b = g.best_value_b(A);
  double exp_a = 0, exp_b = 0;
  for (const auto& [a, p] : A.support) {
    double v = g.value_a(a, B);
    r.regrets_a.push_back(std::max(0.0, best_a - v));
    exp_a += p * v;
  }
  for (const auto& [b, p] : B.support) {
    double v = g.value_b(b, A);
    r.regrets_b.push_back(std::max(0.0, best_b - v));
    exp_b += p * v;
  }
  for (double x : r.regrets_a) r.max_regret_a = std::max(r.max_regret_a, x);
  for (double x : r.regrets_b) r.max_regret_b = std::max(r.max_regret_b, x);
  r.gain_a = std::max(0.0, best_a - exp_a);
  r.gain_b = std::max(0.0, best_b - exp_b);
  return r;
}

template <class Game>
RegretReport check_wsne(const Game& g, const MixedStrategy<typename Game::ActionA>& A,
                        const MixedStrategy<typename Game::ActionB>& B, double eps) {
  RegretReport r = regrets(g, A, B);
  r.eps = eps;
  r.pass = r.max_regret_a <= eps && r.max_regret_b <= eps;
  return r;
}

template <class Game>
RegretReport check_ane(const Game& g, const MixedStrategy<typename Game::ActionA>& A,
                       const MixedStrategy<typename Game::ActionB>& B, double eps) {
  RegretReport r = regrets(g, A, B);
  r.eps = eps;
  r.pass = r.gain_a <= eps && r.gain_b <= eps;
  return r;
}

// Drops every support action that is not (eps + sqrt eps)-optimal, then
// renormalizes. Throws std::runtime_error if a support empties.
template <class Game>
std::pair<MixedStrategy<typename Game::ActionA>, MixedStrategy<typename Game::ActionB>>
prune_ane_to_wsne(const Game& g, const MixedStrategy<typename Game::ActionA>& A,
                  const MixedStrategy<typename Game::ActionB>& B, double eps) {
  RegretReport r = regrets(g, A, B);
  const double cut = eps + std::sqrt(eps);
  auto prune = [&](const auto& S, const std::vector<double>& reg) {
    std::decay_t<decltype(S)> out;
    double mass = 0;
    for (std::size_t i = 0; i < S.support.size(); ++i)
      if (reg[i] <= cut) {
        out.support.push_back(S.support[i]);
        mass += S.support[i].second;
      }
    if (out.support.empty() || mass <= 0)
      throw std::runtime_error("pruning emptied a support; the profile is not an eps-ANE");
    for (auto& [a, p] : out.support) p /= mass;
    return out;
  };
  return {prune(A, r.regrets_a), prune(B, r.regrets_b)};
}

// Plain bimatrix game over action indices.
struct BimatrixGame {
  using ActionA = int;
  using ActionB = int;
  int rows = 0, cols = 0;
  std::vector<double> R, C;  // row-major payoffs for Alice (row) and Bob (column)

  double payoff_a(int a, int b) const { return R[a * cols + b]; }
  double payoff_b(int a, int b) const { return C[a * cols + b]; }
  double value_a(int a, const MixedStrategy<int>& B) const;
  double best_value_a(const MixedStrategy<int>& B) const;
  double value_b(int b, const MixedStrategy<int>& A) const;
  double best_value_b(const MixedStrategy<int>& A) const;
};

// ---- the imitation game -----------------------------------------------------

using HalfVertex = std::optional<std::uint32_t>;  // nullopt is bottom
using AlphaSymbols = std::optional<std::vector<std::uint8_t>>;

struct AliceAction {
  std::array<HalfVertex, 2> v;
  int j = 0;
  std::vector<int> J;      // sorted, size count/2
  std::vector<double> x;   // [4] x sigma_j, block-major
  std::array<AlphaSymbols, 2> alpha;
  bool operator==(const AliceAction&) const = default;
};

struct BobAction {
  std::array<HalfVertex, 2> v;
  int j = 0;
  std::vector<int> J;
  std::vector<double> x;     // [4] x tau_j
  std::vector<double> xhat;  // [4] x tau_j
  bool operator==(const BobAction&) const = default;
};

using StrategyA = MixedStrategy<AliceAction>;
using StrategyB = MixedStrategy<BobAction>;

// Public structure shared by both players: code, families, host, profile.
struct GameSpec {
  HostPtr host;  // complete host with pointers, N = 2^n
  Gadget gadget;
  VertexCode code;
  SubsetFamily family;
  ConstantsProfile profile;
  std::vector<std::vector<int>> sigma_sets, tau_sets;  // cached family members

  int m() const { return code.m(); }
  int half_m() const { return code.half.m2; }
  int pointer_width() const;
  int alpha_width() const { return 2 * pointer_width(); }  // symbols per vertex
  // Joint vertex of two halves, or nullopt when either is bottom.
  std::optional<VertexId> joint(const HalfVertex& va, const HalfVertex& vb) const;
  double inter_norm() const;  // number of coordinates in [4] x (sigma cap tau)
};

// Is (v1, v2) one of the legal shapes? Bottom, equal, or half-neighbours in
// the host. On the complete host every pair is legal.
bool legal_half_pair(const GameSpec& spec, const HalfVertex& v1, const HalfVertex& v2);
std::uint64_t count_legal_pairs(int n);

// Sub-utilities. Each reads only public structure plus the actions.
int utility_v_alice(const GameSpec& spec, const AliceAction& a, const BobAction& b, int r);
int utility_v_bob(const GameSpec& spec, const AliceAction& a, const BobAction& b, int r);
int utility_hide_seek_alice_j(const AliceAction& a, const BobAction& b);  // U_j^A
int utility_hide_seek_bob_J(const AliceAction& a, const BobAction& b);    // U_J^B
int utility_hide_seek_alice_J(const AliceAction& a, const BobAction& b);  // U_J^A
int utility_hide_seek_bob_j(const AliceAction& a, const BobAction& b);    // U_j^B
double utility_x_alice(const GameSpec& spec, const AliceAction& a, const BobAction& b);
double utility_x_bob(const GameSpec& spec, const AliceAction& a, const BobAction& b);

// Alice's payoff oracle: sees only her own symbols.
class AliceOracle {
 public:
  AliceOracle(std::shared_ptr<const GameSpec> spec, std::vector<std::uint8_t> alice_symbols);
  const GameSpec& spec() const { return *spec_; }
  std::vector<std::uint8_t> alpha_at(VertexId v) const;
  int utility_alpha(const AliceAction& a, const BobAction& b, int r) const;
  double total(const AliceAction& a, const BobAction& b) const;

 private:
  std::shared_ptr<const GameSpec> spec_;
  std::vector<std::uint8_t> alice_;
};

// Bob's payoff oracle: sees only his own symbols; learns S/P at a vertex from
// Alice's declared alpha combined with his symbols.
class BobOracle {
 public:
  BobOracle(std::shared_ptr<const GameSpec> spec, std::vector<std::uint8_t> bob_symbols);
  const GameSpec& spec() const { return *spec_; }
  std::optional<VertexNeighbourhood> vertex_info(VertexId v, const AlphaSymbols& alpha) const;
  // f^(a,b) on [4] x sigma_{j(a)}, same layout as a.x.
  std::vector<double> local_image(const AliceAction& a, const std::array<HalfVertex, 2>& vb) const;
  double utility_xhat(const AliceAction& a, const BobAction& b) const;
  double utility_xhat(const AliceAction& a, const BobAction& b,
                      const std::vector<double>& image) const;
  double total(const AliceAction& a, const BobAction& b) const;
  double total(const AliceAction& a, const BobAction& b, const std::vector<double>& image) const;

 private:
  std::shared_ptr<const GameSpec> spec_;
  std::vector<std::uint8_t> bob_;
};

// The two oracles plus exact best responses.
class ImitationGame {
 public:
  using ActionA = AliceAction;
  using ActionB = BobAction;

  ImitationGame(std::shared_ptr<const GameSpec> spec, AliceOracle alice, BobOracle bob);

  const GameSpec& spec() const { return *spec_; }
  const AliceOracle& alice() const { return alice_; }
  const BobOracle& bob() const { return bob_; }

  double value_a(const AliceAction& a, const StrategyB& B) const;
  double value_b(const BobAction& b, const StrategyA& A) const;
  double best_value_a(const StrategyB& B) const;
  double best_value_b(const StrategyA& A) const;
  AliceAction best_response_a(const StrategyB& B) const;
  BobAction best_response_b(const StrategyA& A) const;

 private:
  struct BobBest;
  BobBest solve_b(const StrategyA& A) const;
  std::shared_ptr<const GameSpec> spec_;
  AliceOracle alice_;
  BobOracle bob_;
};

ImitationGame build_game(const ComposedInstance& ci, const VertexCode& code,
                         const SubsetFamily& family, const ConstantsProfile& profile);

struct ExtractedPoint {
  Point x;
  std::vector<std::uint8_t> covered;
  int uncovered = 0;
};
ExtractedPoint extract_point(const StrategyA& A, const SubsetFamily& family, int m);
ExtractedPoint extract_point(const StrategyB& B, const SubsetFamily& family, int m,
                             bool use_xhat);

// Natural candidate profile at a fixed point x*. J components alternate
// between the first half of indices and its complement.
std::pair<StrategyA, StrategyB> plant_equilibrium(const ImitationGame& game,
                                                  const BrouwerField& field,
                                                  std::span<const double> xstar,
                                                  double tolerance);

struct ReductionReport {
  RegretReport wsne;
  double residual = 0;
  double residual_sq = 0;
  EolSolution solution;
  int uncovered = 0;
};
// Requires an eps-WSNE; extracts x_hat from Bob's strategy, measures the
// Brouwer residual and decodes the EoL solution.
ReductionReport verify_reduction(const ImitationGame& game, const BrouwerField& field,
                                 const StrategyA& A, const StrategyB& B, double eps,
                                 double residual_sq_bound);

std::string serialize_action(const AliceAction& a);
std::string serialize_action(const BobAction& b);
AliceAction parse_alice_action(const std::string& text);
BobAction parse_bob_action(const std::string& text);
std::string write_strategy(const StrategyA& A);
std::string write_strategy(const StrategyB& B);
StrategyA read_strategy_a(const std::string& text);
StrategyB read_strategy_b(const std::string& text);

}  // namespace nashlab
