#include "nashlab/embed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace nashlab {

HostPath sample_min_path(const LabeledHostGraph& H, std::uint64_t v, std::uint64_t u, Rng& rng) {
  if (H.kind() != HostKind::kButterflyDouble && H.kind() != HostKind::kButterflyMultigraph)
    throw std::invalid_argument("sample_min_path needs a butterfly host");
  const int n = H.n();
  const std::uint64_t N = H.base_size();
  if (v >= N || u >= N) throw std::invalid_argument("path endpoints must be in [N]");
  std::uint64_t w = uniform_below(rng, N);
  HostPath path;
  path.reserve(2 * n + 1);
  std::uint64_t z = v;
  path.push_back(H.butterfly_vertex(z, 0));
  for (int layer = 0; layer < 2 * n; ++layer) {
    std::uint64_t target = layer < n ? w : u;
    std::uint64_t bit = std::uint64_t{1} << (n - 1 - layer % n);
    z = (z & ~bit) | (target & bit);
    path.push_back(H.butterfly_vertex(z, layer + 1));
  }
  return path;
}

int congestion(const std::vector<HostPath>& paths) {
  std::vector<VertexId> touched;
  for (const auto& p : paths) {
    std::vector<VertexId> q(p);
    std::sort(q.begin(), q.end());
    q.erase(std::unique(q.begin(), q.end()), q.end());
    touched.insert(touched.end(), q.begin(), q.end());
  }
  std::sort(touched.begin(), touched.end());
  int best = 0;
  for (std::size_t i = 0; i < touched.size();) {
    std::size_t j = i;
    while (j < touched.size() && touched[j] == touched[i]) ++j;
    best = std::max(best, static_cast<int>(j - i));
    i = j;
  }
  return best;
}

PathEmbedding sample_embedding(const HostPtr& Hd, const std::vector<BaseEdge>& g_edges, Rng& rng) {
  if (Hd->kind() != HostKind::kButterflyMultigraph)
    throw std::invalid_argument("sample_embedding needs H^d");
  PathEmbedding emb;
  emb.host = Hd;
  emb.g_edges = g_edges;
  for (const auto& [v, u] : g_edges) emb.paths.push_back(sample_min_path(*Hd, v, u, rng));
  emb.congestion = congestion(emb.paths);
  if (emb.congestion > Hd->d()) return emb;  // bot
  // group path steps by host edge (tail, head); a uniform injection into [d]
  struct Step {
    VertexId tail, head;
    std::size_t path, step;
  };
  std::vector<Step> steps;
  for (std::size_t p = 0; p < emb.paths.size(); ++p)
    for (std::size_t s = 0; s + 1 < emb.paths[p].size(); ++s)
      steps.push_back({emb.paths[p][s], emb.paths[p][s + 1], p, s});
  std::sort(steps.begin(), steps.end(), [](const Step& a, const Step& b) {
    return std::tie(a.tail, a.head, a.path, a.step) < std::tie(b.tail, b.head, b.path, b.step);
  });
  emb.slots.assign(emb.paths.size(), {});
  for (std::size_t p = 0; p < emb.paths.size(); ++p) emb.slots[p].assign(emb.paths[p].size() - 1, 0);
  std::vector<int> slot_pool(Hd->d());
  for (std::size_t i = 0; i < steps.size();) {
    std::size_t j = i;
    while (j < steps.size() && steps[j].tail == steps[i].tail && steps[j].head == steps[i].head) ++j;
    std::iota(slot_pool.begin(), slot_pool.end(), 1);
    std::shuffle(slot_pool.begin(), slot_pool.end(), rng);
    for (std::size_t k = i; k < j; ++k) emb.slots[steps[k].path][steps[k].step] = slot_pool[k - i];
    i = j;
  }
  emb.ok = true;
  return emb;
}

EolInstance embedded_instance(const PathEmbedding& emb) {
  if (!emb.ok) throw std::logic_error("embedding is bot");
  EolInstance inst = EolInstance::empty(emb.host);
  for (std::size_t p = 0; p < emb.paths.size(); ++p)
    for (std::size_t s = 0; s + 1 < emb.paths[p].size(); ++s)
      inst.indicators[emb.host->find_edge(emb.paths[p][s], emb.paths[p][s + 1], emb.slots[p][s])] = 1;
  return inst;
}

std::uint64_t disjointness_violations(const PathEmbedding& emb) {
  if (!emb.ok) return 0;
  std::unordered_set<std::uint64_t> used;
  std::uint64_t bad = 0;
  for (std::size_t p = 0; p < emb.paths.size(); ++p)
    for (std::size_t s = 0; s + 1 < emb.paths[p].size(); ++s) {
      int slot = emb.slots[p][s];
      if (slot < 1 || slot > emb.host->d()) {
        ++bad;
        continue;
      }
      if (!used.insert(emb.host->find_edge(emb.paths[p][s], emb.paths[p][s + 1], slot)).second) ++bad;
    }
  return bad;
}

namespace {

EolInstance chain_instance(std::uint64_t N, const std::vector<std::vector<VertexId>>& chains) {
  EolInstance inst = EolInstance::empty(complete_host(N));
  for (const auto& c : chains)
    for (std::size_t i = 0; i + 1 < c.size(); ++i) inst.set_edge(c[i], c[i + 1]);
  return inst;
}

}  // namespace

EolInstance sample_critical(std::uint64_t N, Rng& rng) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  std::vector<VertexId> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin() + 1, order.end(), rng);
  return chain_instance(N, {order});
}

EolInstance sample_bicritical(std::uint64_t N, Rng& rng) {
  if (N % 2 != 0 || N < 4) throw std::invalid_argument("bicritical sampling needs even N >= 4");
  std::uint64_t ell = 2 * (1 + uniform_below(rng, N / 2 - 1));  // {2,4,...,N-2}
  std::vector<VertexId> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin() + 1, order.end(), rng);
  std::vector<VertexId> first(order.begin(), order.begin() + ell);
  std::vector<VertexId> second(order.begin() + ell, order.end());
  return chain_instance(N, {first, second});
}

std::vector<BaseEdge> pointer_edges(const EolInstance& inst) {
  std::vector<BaseEdge> out;
  for (VertexId v = 0; v < inst.num_vertices(); ++v)
    if (auto u = successor(inst, v)) out.push_back({v, *u});
  return out;
}

std::vector<VertexId> path_from_start(const EolInstance& inst) {
  std::vector<VertexId> path{inst.start()};
  std::unordered_set<VertexId> seen{inst.start()};
  while (auto u = successor(inst, path.back())) {
    if (!seen.insert(*u).second) break;
    path.push_back(*u);
  }
  return path;
}

EolInstance apply_deletion_block(const EolInstance& x, std::uint64_t i) {
  if (!x.pointer_form()) throw std::invalid_argument("deletion on host form needs embedded_edge_block");
  auto path = path_from_start(x);
  if (i < 1 || i >= path.size()) throw std::out_of_range("deletion index out of range");
  EolInstance y = x;
  y.succ[path[i - 1]] = y.null_pointer();
  y.pred[path[i]] = y.null_pointer();
  return y;
}

EolInstance apply_shortcut_block(const EolInstance& x, std::uint64_t j) {
  if (!x.pointer_form()) throw std::invalid_argument("shortcut needs the pointer form");
  auto path = path_from_start(x);
  std::uint64_t N = path.size();
  if (j < 1 || 2 * j >= N || N - j >= N) throw std::out_of_range("shortcut index out of range");
  VertexId v = path[j - 1], u = path[j], v2 = path[N - j - 1], u2 = path[N - j];
  EolInstance y = x;
  y.succ[v] = y.null_pointer();
  y.pred[u] = y.null_pointer();
  y.succ[v2] = y.null_pointer();
  y.pred[u2] = y.null_pointer();
  y.set_edge(v, u2);
  return y;
}

std::vector<std::uint64_t> block_difference(const EolInstance& a, const EolInstance& b) {
  if (a.num_coordinates() != b.num_coordinates()) throw std::invalid_argument("shape mismatch");
  std::vector<std::uint64_t> out;
  if (a.pointer_form()) {
    int w = a.pointer_width();
    for (VertexId v = 0; v < a.num_vertices(); ++v)
      for (int f = 0; f < 2; ++f) {
        std::uint64_t diff = (f ? a.pred[v] ^ b.pred[v] : a.succ[v] ^ b.succ[v]);
        for (int bit = 0; bit < w; ++bit)
          if ((diff >> (w - 1 - bit)) & 1) out.push_back((2 * v + f) * w + bit);
      }
  } else {
    for (std::uint64_t c = 0; c < a.indicators.size(); ++c)
      if (a.indicators[c] != b.indicators[c]) out.push_back(c);
  }
  return out;
}

EolInstance apply_block(const EolInstance& x, const std::vector<std::uint64_t>& block) {
  EolInstance y = x;
  for (auto c : block) y.flip(c);
  return y;
}

BlockSystem deletion_blocks(const EolInstance& critical) {
  BlockSystem sys{BlockKind::kDeletion, {}};
  auto path = path_from_start(critical);
  for (std::uint64_t i = 1; i < path.size(); ++i)
    sys.blocks.push_back(block_difference(critical, apply_deletion_block(critical, i)));
  return sys;
}

BlockSystem shortcut_blocks(const EolInstance& critical) {
  BlockSystem sys{BlockKind::kShortcut, {}};
  auto path = path_from_start(critical);
  for (std::uint64_t j = 1; 2 * j < path.size(); ++j)
    sys.blocks.push_back(block_difference(critical, apply_shortcut_block(critical, j)));
  return sys;
}

bool blocks_disjoint(const BlockSystem& system) {
  std::unordered_set<std::uint64_t> seen;
  for (const auto& b : system.blocks)
    for (auto c : b)
      if (!seen.insert(c).second) return false;
  return true;
}

std::vector<std::uint64_t> embedded_edge_block(const PathEmbedding& emb, std::uint64_t i) {
  if (!emb.ok) throw std::logic_error("embedding is bot");
  if (i < 1 || i > emb.paths.size()) throw std::out_of_range("edge index out of range");
  std::vector<std::uint64_t> out;
  const auto& p = emb.paths[i - 1];
  for (std::size_t s = 0; s + 1 < p.size(); ++s)
    out.push_back(emb.host->find_edge(p[s], p[s + 1], emb.slots[i - 1][s]));
  return out;
}

VertexId canonical_solver(const EolInstance& x) { return canonical_end(x); }

VertexId noncanonical_solver(const EolInstance& x) {
  VertexId canon = canonical_end(x);
  for (const auto& s : enumerate_solutions(x))  // ids of the complete host are label order
    if (s.vertex != canon) return s.vertex;
  return canon;
}

VertexId coin_solver(const EolInstance& x) {
  // the coin is a fixed function of the input so the solver stays deterministic
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (auto v : x.succ) h = (h ^ v) * 0x100000001b3ULL;
  for (auto v : x.pred) h = (h ^ (v + 0x9e37)) * 0x100000001b3ULL;
  for (auto v : x.indicators) h = (h ^ v) * 0x100000001b3ULL;
  h ^= h >> 29;
  return (h & 1) ? canonical_solver(x) : noncanonical_solver(x);
}

Solver solver_by_name(const std::string& name) {
  if (name == "canonical") return canonical_solver;
  if (name == "noncanonical") return noncanonical_solver;
  if (name == "coin") return coin_solver;
  throw std::invalid_argument("unknown solver '" + name + "'");
}

int block_sensitivity(const Solver& solver, const EolInstance& x, const BlockSystem& blocks) {
  auto checked = [&](const EolInstance& y) {
    VertexId v = solver(y);
    if (v >= y.num_vertices()) throw std::runtime_error("solver returned a non-vertex");
    return v;
  };
  VertexId base = checked(x);
  int count = 0;
  for (const auto& b : blocks.blocks)
    if (checked(apply_block(x, b)) != base) ++count;
  return count;
}

DichotomyReport dichotomy_experiment(const Solver& solver, std::uint64_t N, std::uint64_t trials,
                                     std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (N < 4 || N % 2) throw std::invalid_argument("dichotomy needs even N >= 4");
  DichotomyReport r;
  std::uint64_t hit_del = 0, hit_cut = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng = make_rng(seed, "dichotomy", t);
    EolInstance x = sample_critical(N, rng);
    std::uint64_t i = 2 * (1 + uniform_below(rng, N / 2 - 1));
    EolInstance y = apply_deletion_block(x, i);
    if (solver(y) == canonical_end(y)) ++hit_del;
    std::uint64_t j = 1 + uniform_below(rng, N / 2 - 1);
    EolInstance y2 = apply_shortcut_block(x, j);
    if (solver(y2) == canonical_end(y2)) ++hit_cut;
  }
  r.p_canonical_deletion = double(hit_del) / trials;
  r.p_canonical_shortcut = double(hit_cut) / trials;
  r.p_canonical = 0.5 * (r.p_canonical_deletion + r.p_canonical_shortcut);
  std::uint64_t probes = std::min<std::uint64_t>(trials, 64);
  for (std::uint64_t t = 0; t < probes; ++t) {
    Rng rng = make_rng(seed, "dichotomy-probe", t);
    EolInstance x = sample_critical(N, rng);
    auto del = deletion_blocks(x);
    auto cut = shortcut_blocks(x);
    r.best_deletion_hit_rate = std::max(
        r.best_deletion_hit_rate, double(block_sensitivity(solver, x, del)) / del.blocks.size());
    r.best_shortcut_hit_rate = std::max(
        r.best_shortcut_hit_rate, double(block_sensitivity(solver, x, cut)) / cut.blocks.size());
  }
  r.tolerance = 3.0 / std::sqrt(double(trials));
  r.passes = std::max(r.best_deletion_hit_rate, r.best_shortcut_hit_rate) >= 0.5 - r.tolerance;
  return r;
}

double coupling_failure_rate(int n, std::uint64_t trials, int d, std::uint64_t seed) {
  auto H = build_double_butterfly(n);
  std::uint64_t N = H->base_size();
  std::uint64_t failures = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng = make_rng(seed, "coupling", t);
    EolInstance g2 = sample_bicritical(N, rng);
    // the extra edge joins the end of the first path to the head of the second
    VertexId first_end = canonical_end(g2);
    VertexId second_head = 0;
    for (VertexId v = 1; v < N; ++v)
      if (!predecessor(g2, v) && successor(g2, v)) second_head = v;
    std::vector<HostPath> paths;
    for (const auto& [v, u] : pointer_edges(g2)) paths.push_back(sample_min_path(*H, v, u, rng));
    paths.push_back(sample_min_path(*H, first_end, second_head, rng));
    if (d >= 0 && congestion(paths) > d) ++failures;
  }
  return trials ? double(failures) / trials : 0.0;
}

CongestionReport congestion_simulation(int n, int d, std::uint64_t trials, std::uint64_t seed,
                                       bool audit) {
  auto Hd = multiply_edges(build_double_butterfly(n), d);
  if (audit) Hd->edges();
  CongestionReport r;
  r.trials = trials;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng = make_rng(seed, "congestion", t);
    EolInstance g = sample_critical(Hd->base_size(), rng);
    PathEmbedding emb = sample_embedding(Hd, pointer_edges(g), rng);
    r.max_congestion = std::max(r.max_congestion, emb.congestion);
    if (r.histogram.size() <= static_cast<std::size_t>(emb.congestion))
      r.histogram.resize(emb.congestion + 1, 0);
    ++r.histogram[emb.congestion];
    if (!emb.ok) {
      ++r.bot;
      continue;
    }
    if (audit) r.violations += disjointness_violations(emb);
  }
  return r;
}

}  // namespace nashlab
