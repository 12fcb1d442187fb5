#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nashlab/eol.hpp"
#include "nashlab/graphs.hpp"
#include "nashlab/rng.hpp"

namespace nashlab {

using BaseEdge = std::pair<std::uint64_t, std::uint64_t>;  // endpoints in [N]
using HostPath = std::vector<VertexId>;                    // 2n+1 butterfly vertices

// Uniform middle vertex w, then the unique F0 path v->w and F1 path w->u.
HostPath sample_min_path(const LabeledHostGraph& H, std::uint64_t v, std::uint64_t u, Rng& rng);

// Max over host vertices of the number of paths touching it.
int congestion(const std::vector<HostPath>& paths);

struct PathEmbedding {
  HostPtr host;  // H^d
  std::vector<BaseEdge> g_edges;
  std::vector<HostPath> paths;
  std::vector<std::vector<int>> slots;  // slot used by each step of each path
  int congestion = 0;
  bool ok = false;
};

PathEmbedding sample_embedding(const HostPtr& Hd, const std::vector<BaseEdge>& g_edges, Rng& rng);
// Indicator instance over H^d induced by an ok embedding.
EolInstance embedded_instance(const PathEmbedding& emb);
// Number of H^d edges used by more than one path step (0 for a valid embedding).
std::uint64_t disjointness_violations(const PathEmbedding& emb);

// Pointer-form distributions over the complete host on [N].
EolInstance sample_critical(std::uint64_t N, Rng& rng);
EolInstance sample_bicritical(std::uint64_t N, Rng& rng);
std::vector<BaseEdge> pointer_edges(const EolInstance& inst);

// Vertices of the path leaving the start, in order.
std::vector<VertexId> path_from_start(const EolInstance& inst);

enum class BlockKind { kDeletion, kShortcut };

struct BlockSystem {
  BlockKind kind = BlockKind::kDeletion;
  std::vector<std::vector<std::uint64_t>> blocks;  // input coordinates
};

EolInstance apply_deletion_block(const EolInstance& x, std::uint64_t i);
EolInstance apply_shortcut_block(const EolInstance& x, std::uint64_t j);
EolInstance apply_block(const EolInstance& x, const std::vector<std::uint64_t>& block);
std::vector<std::uint64_t> block_difference(const EolInstance& a, const EolInstance& b);
BlockSystem deletion_blocks(const EolInstance& critical);
BlockSystem shortcut_blocks(const EolInstance& critical);
bool blocks_disjoint(const BlockSystem& system);
// Indicator coordinates of the image of the i-th edge (1-based) of an embedding.
std::vector<std::uint64_t> embedded_edge_block(const PathEmbedding& emb, std::uint64_t i);

using Solver = std::function<VertexId(const EolInstance&)>;

VertexId canonical_solver(const EolInstance& x);
VertexId noncanonical_solver(const EolInstance& x);
VertexId coin_solver(const EolInstance& x);
Solver solver_by_name(const std::string& name);

int block_sensitivity(const Solver& solver, const EolInstance& x, const BlockSystem& blocks);

struct DichotomyReport {
  double p_canonical = 0;
  double p_canonical_deletion = 0;
  double p_canonical_shortcut = 0;
  double best_deletion_hit_rate = 0;
  double best_shortcut_hit_rate = 0;
  double tolerance = 0;  // 3 / sqrt(trials)
  bool passes = false;
};

DichotomyReport dichotomy_experiment(const Solver& solver, std::uint64_t N, std::uint64_t trials,
                                     std::uint64_t seed);

// d < 0 disables the congestion cap.
double coupling_failure_rate(int n, std::uint64_t trials, int d, std::uint64_t seed);

struct CongestionReport {
  std::uint64_t trials = 0;
  std::uint64_t bot = 0;
  std::uint64_t violations = 0;
  int max_congestion = 0;
  std::vector<std::uint64_t> histogram;  // congestion value -> count
  double bot_rate() const { return trials ? double(bot) / trials : 0.0; }
};

CongestionReport congestion_simulation(int n, int d, std::uint64_t trials, std::uint64_t seed,
                                       bool audit = true);

}  // namespace nashlab
