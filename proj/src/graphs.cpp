#include "nashlab/graphs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace nashlab {

std::string to_string(HostKind kind) {
  switch (kind) {
    case HostKind::kCompleteWithPointers: return "complete-with-pointers";
    case HostKind::kButterflyDouble: return "butterfly-double";
    case HostKind::kButterflyMultigraph: return "butterfly-multigraph";
    case HostKind::kReplacementProduct: return "replacement-product";
  }
  return "?";
}

HostKind host_kind_from_string(const std::string& s) {
  if (s == "complete-with-pointers") return HostKind::kCompleteWithPointers;
  if (s == "butterfly-double") return HostKind::kButterflyDouble;
  if (s == "butterfly-multigraph") return HostKind::kButterflyMultigraph;
  if (s == "replacement-product") return HostKind::kReplacementProduct;
  throw std::invalid_argument("unknown host kind '" + s + "'");
}

std::string Label::str() const {
  std::string s(width, '0');
  for (int i = 0; i < width; ++i)
    if ((bits >> (width - 1 - i)) & 1) s[i] = '1';
  return s;
}

Label Label::parse(const std::string& s) {
  if (s.empty() || s.size() > 64) throw std::invalid_argument("bad label '" + s + "'");
  Label l;
  l.width = static_cast<int>(s.size());
  for (char c : s) {
    if (c != '0' && c != '1') throw std::invalid_argument("bad label '" + s + "'");
    l.bits = (l.bits << 1) | static_cast<std::uint64_t>(c == '1');
  }
  return l;
}

int hamming(const Label& a, const Label& b) {
  return std::popcount(a.bits ^ b.bits) + std::abs(a.width - b.width);
}

int gray_width(std::uint64_t length) {
  int w = 1;
  while ((std::uint64_t{1} << w) < length) ++w;
  return w;
}

std::uint64_t cyclic_gray(std::uint64_t index, std::uint64_t length) {
  if (length % 2 != 0 || index >= length)
    throw std::invalid_argument("cyclic_gray needs even length and index < length");
  int w = gray_width(length);
  std::uint64_t x = index < length / 2 ? index : (std::uint64_t{1} << w) - length + index;
  return x ^ (x >> 1);
}

namespace {

constexpr std::uint64_t kMaxMaterializedEdges = 60'000'000;

std::vector<int> gray_inverse(std::uint64_t length) {
  std::vector<int> inv(std::uint64_t{1} << gray_width(length), -1);
  for (std::uint64_t i = 0; i < length; ++i) inv[cyclic_gray(i, length)] = static_cast<int>(i);
  return inv;
}

}  // namespace

int default_multiplicity(int n) {
  double log_size = std::log2(2.0 * std::ldexp(1.0, n) * n);
  int d = 1;
  while (d < log_size - 1e-12) d *= 2;
  return d;
}

HostPtr build_double_butterfly(int n) {
  if (n < 1 || n > 24) throw std::invalid_argument("butterfly needs 1 <= n <= 24");
  auto g = std::shared_ptr<LabeledHostGraph>(new LabeledHostGraph());
  g->kind_ = HostKind::kButterflyDouble;
  g->n_ = n;
  g->d_ = 1;
  g->base_ = std::uint64_t{1} << n;
  g->layer_bits_ = gray_width(2 * n);
  g->hd_vertices_ = g->base_ * 2 * n;
  g->num_vertices_ = g->hd_vertices_;
  g->label_width_ = n + g->layer_bits_;
  g->layer_of_code_ = gray_inverse(2 * n);
  return g;
}

HostPtr multiply_edges(const HostPtr& h, int d) {
  if (!h || h->kind() != HostKind::kButterflyDouble)
    throw std::invalid_argument("multiply_edges needs a double butterfly");
  if (d < 1) throw std::invalid_argument("multiplicity d must be >= 1");
  auto g = std::shared_ptr<LabeledHostGraph>(new LabeledHostGraph());
  g->kind_ = HostKind::kButterflyMultigraph;
  g->n_ = h->n_;
  g->d_ = d;
  g->base_ = h->base_;
  g->layer_bits_ = h->layer_bits_;
  g->hd_vertices_ = h->hd_vertices_;
  g->num_vertices_ = h->num_vertices_;
  g->label_width_ = h->label_width_;
  g->layer_of_code_ = h->layer_of_code_;
  return g;
}

HostPtr replacement_product(const HostPtr& hd) {
  if (!hd || hd->kind() != HostKind::kButterflyMultigraph)
    throw std::invalid_argument("replacement_product needs a butterfly multigraph");
  int d = hd->d();
  if (!std::has_single_bit(static_cast<unsigned>(2 * d)))
    throw std::invalid_argument("replacement_product needs 2d to be a power of two");
  auto g = std::shared_ptr<LabeledHostGraph>(new LabeledHostGraph());
  g->kind_ = HostKind::kReplacementProduct;
  g->n_ = hd->n_;
  g->d_ = d;
  g->base_ = hd->base_;
  g->layer_bits_ = hd->layer_bits_;
  g->hd_vertices_ = hd->hd_vertices_;
  g->layer_of_code_ = hd->layer_of_code_;
  int delta = std::countr_zero(static_cast<unsigned>(2 * d));
  g->kdelta_ = delta;
  g->klayer_bits_ = gray_width(2 * delta + 2);
  g->klayer_of_code_ = gray_inverse(2 * delta + 2);
  std::uint64_t off = 0;
  for (int layer = 0; layer <= 2 * delta; ++layer) {
    g->koffset_.push_back(off);
    if (layer <= delta)
      off += std::uint64_t{1} << (delta + layer);
    else
      off += std::uint64_t{1} << (2 * delta - (layer - delta));
  }
  g->koffset_.push_back(off);
  g->ksize_ = off;
  g->num_vertices_ = g->hd_vertices_ * g->ksize_;
  g->label_width_ = hd->label_width_ + 2 * delta + g->klayer_bits_;
  if (g->label_width_ > 64) throw std::invalid_argument("labels wider than 64 bits");
  return g;
}

HostPtr complete_host(std::uint64_t N) {
  if (N < 1) throw std::invalid_argument("complete host needs N >= 1");
  auto g = std::shared_ptr<LabeledHostGraph>(new LabeledHostGraph());
  g->kind_ = HostKind::kCompleteWithPointers;
  int w = 1;
  while ((std::uint64_t{1} << w) < N) ++w;
  g->n_ = w;
  g->base_ = N;
  g->num_vertices_ = N;
  g->label_width_ = w;
  return g;
}

HostPtr LabeledHostGraph::make(HostKind kind, int n, int d, std::uint64_t complete_size) {
  switch (kind) {
    case HostKind::kCompleteWithPointers: return complete_host(complete_size);
    case HostKind::kButterflyDouble: return build_double_butterfly(n);
    case HostKind::kButterflyMultigraph: return multiply_edges(build_double_butterfly(n), d);
    case HostKind::kReplacementProduct:
      return replacement_product(multiply_edges(build_double_butterfly(n), d));
  }
  throw std::invalid_argument("unknown host kind");
}

int LabeledHostGraph::degree_bound() const {
  switch (kind_) {
    case HostKind::kCompleteWithPointers: return 1;
    case HostKind::kReplacementProduct: return 2;
    default: return 2 * d_;
  }
}

int LabeledHostGraph::label_distance_bound() const {
  switch (kind_) {
    case HostKind::kCompleteWithPointers: return 0;
    case HostKind::kReplacementProduct: return 4;
    default: return 2;
  }
}

// ---- butterfly part ----

Label LabeledHostGraph::hd_label(VertexId w) const {
  std::uint64_t z = w % base_;
  int layer = static_cast<int>(w / base_);
  return Label{(z << layer_bits_) | cyclic_gray(layer, 2 * n_), n_ + layer_bits_};
}

VertexId LabeledHostGraph::hd_vertex_of(std::uint64_t bits) const {
  std::uint64_t code = bits & ((std::uint64_t{1} << layer_bits_) - 1);
  std::uint64_t z = bits >> layer_bits_;
  int layer = code < layer_of_code_.size() ? layer_of_code_[code] : -1;
  if (layer < 0 || z >= base_) throw std::invalid_argument("label is not a butterfly vertex");
  return static_cast<VertexId>(layer) * base_ + z;
}

std::vector<Arc> LabeledHostGraph::hd_out(VertexId w) const {
  std::uint64_t z = w % base_;
  int layer = static_cast<int>(w / base_);
  int next = (layer + 1) % (2 * n_);
  std::uint64_t flip = std::uint64_t{1} << (n_ - 1 - layer % n_);
  std::vector<Arc> arcs;
  arcs.reserve(2 * d_);
  for (int kind = 0; kind < 2; ++kind) {
    VertexId head = static_cast<VertexId>(next) * base_ + (kind ? z ^ flip : z);
    for (int s = 1; s <= d_; ++s) arcs.push_back({head, s, kind});
  }
  std::sort(arcs.begin(), arcs.end(), [&](const Arc& a, const Arc& b) {
    auto la = hd_label(a.other).bits, lb = hd_label(b.other).bits;
    return la != lb ? la < lb : a.slot < b.slot;
  });
  return arcs;
}

std::vector<Arc> LabeledHostGraph::hd_in(VertexId w) const {
  std::uint64_t z = w % base_;
  int layer = static_cast<int>(w / base_);
  int prev = (layer + 2 * n_ - 1) % (2 * n_);
  std::uint64_t flip = std::uint64_t{1} << (n_ - 1 - prev % n_);
  std::vector<Arc> arcs;
  arcs.reserve(2 * d_);
  for (int kind = 0; kind < 2; ++kind) {
    VertexId tail = static_cast<VertexId>(prev) * base_ + (kind ? z ^ flip : z);
    for (int s = 1; s <= d_; ++s) arcs.push_back({tail, s, kind});
  }
  std::sort(arcs.begin(), arcs.end(), [&](const Arc& a, const Arc& b) {
    auto la = hd_label(a.other).bits, lb = hd_label(b.other).bits;
    return la != lb ? la < lb : a.slot < b.slot;
  });
  return arcs;
}

// ---- gadget K ----
// Layers 0..delta fan out (layer i fixes the low i bits of u), layers
// delta..2 delta fan in (layer delta+i has the low i bits of v cleared).
// Entry port p is (v=p, u=0) on layer 0, exit port p is (v=0, u=p) on the
// last layer. Labels store (v^u, u with the cleared low bits of v masked)
// so that entry p and exit p share the same two strings.

LabeledHostGraph::KVertex LabeledHostGraph::k_decode(std::uint64_t k) const {
  int layer = static_cast<int>(std::upper_bound(koffset_.begin(), koffset_.end(), k) -
                               koffset_.begin()) - 1;
  std::uint64_t idx = k - koffset_[layer];
  KVertex kv;
  kv.layer = layer;
  if (layer <= kdelta_) {
    kv.v = idx >> layer;
    kv.u = idx & ((std::uint64_t{1} << layer) - 1);
  } else {
    int i = layer - kdelta_;
    kv.v = (idx >> kdelta_) << i;
    kv.u = idx & ((std::uint64_t{1} << kdelta_) - 1);
  }
  return kv;
}

std::uint64_t LabeledHostGraph::k_encode(const KVertex& kv) const {
  if (kv.layer <= kdelta_) return koffset_[kv.layer] + (kv.v << kv.layer) + kv.u;
  int i = kv.layer - kdelta_;
  return koffset_[kv.layer] + ((kv.v >> i) << kdelta_) + kv.u;
}

std::uint64_t LabeledHostGraph::k_label_bits(const KVertex& kv) const {
  std::uint64_t a = kv.v ^ kv.u;
  std::uint64_t c = kv.u;
  if (kv.layer > kdelta_) c &= ~((std::uint64_t{1} << (kv.layer - kdelta_)) - 1);
  std::uint64_t code = cyclic_gray(kv.layer, 2 * kdelta_ + 2);
  return (a << (kdelta_ + klayer_bits_)) | (c << klayer_bits_) | code;
}

std::uint64_t LabeledHostGraph::k_port(const Arc& hd_arc) const {
  return static_cast<std::uint64_t>(hd_arc.kind) * d_ + (hd_arc.slot - 1);
}

// ---- public accessors ----

Label LabeledHostGraph::label(VertexId v) const {
  if (v >= num_vertices_) throw std::invalid_argument("vertex id out of range");
  switch (kind_) {
    case HostKind::kCompleteWithPointers: return Label{v, label_width_};
    case HostKind::kButterflyDouble:
    case HostKind::kButterflyMultigraph: return hd_label(v);
    case HostKind::kReplacementProduct: {
      VertexId w = v / ksize_;
      KVertex kv = k_decode(v % ksize_);
      int kw = 2 * kdelta_ + klayer_bits_;
      return Label{(hd_label(w).bits << kw) | k_label_bits(kv), label_width_};
    }
  }
  return {};
}

VertexId LabeledHostGraph::vertex_of(const Label& l) const {
  if (l.width != label_width_) throw std::invalid_argument("label width mismatch");
  switch (kind_) {
    case HostKind::kCompleteWithPointers:
      if (l.bits >= base_) throw std::invalid_argument("label is not a vertex");
      return l.bits;
    case HostKind::kButterflyDouble:
    case HostKind::kButterflyMultigraph: return hd_vertex_of(l.bits);
    case HostKind::kReplacementProduct: {
      int kw = 2 * kdelta_ + klayer_bits_;
      VertexId w = hd_vertex_of(l.bits >> kw);
      std::uint64_t kb = l.bits & ((std::uint64_t{1} << kw) - 1);
      std::uint64_t code = kb & ((std::uint64_t{1} << klayer_bits_) - 1);
      int layer = klayer_of_code_[code];
      if (layer < 0 || layer > 2 * kdelta_) throw std::invalid_argument("label is not a vertex");
      std::uint64_t mask = (std::uint64_t{1} << kdelta_) - 1;
      std::uint64_t c = (kb >> klayer_bits_) & mask;
      std::uint64_t a = (kb >> (klayer_bits_ + kdelta_)) & mask;
      KVertex kv;
      kv.layer = layer;
      if (layer <= kdelta_) {
        kv.u = c;
        kv.v = a ^ c;
        if (kv.u >> layer) throw std::invalid_argument("label is not a vertex");
      } else {
        std::uint64_t low = (std::uint64_t{1} << (layer - kdelta_)) - 1;
        if (c & low) throw std::invalid_argument("label is not a vertex");
        kv.u = (c & ~low) | (a & low);
        kv.v = a ^ kv.u;
      }
      VertexId k = k_encode(kv);
      if (k_label_bits(k_decode(k)) != kb) throw std::invalid_argument("label is not a vertex");
      return w * ksize_ + k;
    }
  }
  return 0;
}

std::vector<Arc> LabeledHostGraph::out_arcs(VertexId v) const {
  if (v >= num_vertices_) throw std::invalid_argument("vertex id out of range");
  switch (kind_) {
    case HostKind::kCompleteWithPointers: return {};
    case HostKind::kButterflyDouble:
    case HostKind::kButterflyMultigraph: return hd_out(v);
    case HostKind::kReplacementProduct: break;
  }
  VertexId w = v / ksize_;
  KVertex kv = k_decode(v % ksize_);
  std::vector<Arc> arcs;
  if (kv.layer < kdelta_) {
    KVertex a{kv.layer + 1, kv.v, kv.u};
    KVertex b{kv.layer + 1, kv.v, kv.u | (std::uint64_t{1} << kv.layer)};
    arcs.push_back({w * ksize_ + k_encode(a), 1, 0});
    arcs.push_back({w * ksize_ + k_encode(b), 1, 0});
  } else if (kv.layer < 2 * kdelta_) {
    int i = kv.layer - kdelta_;
    KVertex a{kv.layer + 1, kv.v & ~(std::uint64_t{1} << i), kv.u};
    arcs.push_back({w * ksize_ + k_encode(a), 1, 0});
  } else {
    std::uint64_t p = kv.u;
    int hkind = static_cast<int>(p / d_);
    int slot = static_cast<int>(p % d_) + 1;
    for (const Arc& a : hd_out(w)) {
      if (a.kind == hkind && a.slot == slot) {
        arcs.push_back({a.other * ksize_ + k_encode(KVertex{0, p, 0}), 1, 0});
        break;
      }
    }
  }
  std::sort(arcs.begin(), arcs.end(),
            [&](const Arc& a, const Arc& b) { return label(a.other) < label(b.other); });
  return arcs;
}

std::vector<Arc> LabeledHostGraph::in_arcs(VertexId v) const {
  if (v >= num_vertices_) throw std::invalid_argument("vertex id out of range");
  switch (kind_) {
    case HostKind::kCompleteWithPointers: return {};
    case HostKind::kButterflyDouble:
    case HostKind::kButterflyMultigraph: return hd_in(v);
    case HostKind::kReplacementProduct: break;
  }
  VertexId w = v / ksize_;
  KVertex kv = k_decode(v % ksize_);
  std::vector<Arc> arcs;
  if (kv.layer == 0) {
    std::uint64_t p = kv.v;
    int hkind = static_cast<int>(p / d_);
    int slot = static_cast<int>(p % d_) + 1;
    for (const Arc& a : hd_in(w)) {
      if (a.kind == hkind && a.slot == slot) {
        arcs.push_back({a.other * ksize_ + k_encode(KVertex{2 * kdelta_, 0, p}), 1, 0});
        break;
      }
    }
  } else if (kv.layer <= kdelta_) {
    int i = kv.layer - 1;
    KVertex a{kv.layer - 1, kv.v, kv.u & ~(std::uint64_t{1} << i)};
    arcs.push_back({w * ksize_ + k_encode(a), 1, 0});
  } else {
    int i = kv.layer - kdelta_ - 1;
    KVertex a{kv.layer - 1, kv.v, kv.u};
    KVertex b{kv.layer - 1, kv.v | (std::uint64_t{1} << i), kv.u};
    arcs.push_back({w * ksize_ + k_encode(a), 1, 0});
    arcs.push_back({w * ksize_ + k_encode(b), 1, 0});
  }
  std::sort(arcs.begin(), arcs.end(),
            [&](const Arc& a, const Arc& b) { return label(a.other) < label(b.other); });
  return arcs;
}

int LabeledHostGraph::out_degree(VertexId v) const {
  switch (kind_) {
    case HostKind::kCompleteWithPointers: return 0;
    case HostKind::kButterflyDouble:
    case HostKind::kButterflyMultigraph: return 2 * d_;
    case HostKind::kReplacementProduct: break;
  }
  std::uint64_t k = v % ksize_;
  if (k < koffset_[kdelta_]) return 2;
  return 1;  // fan-in layers have one internal arc, the exit layer one external arc
}

int LabeledHostGraph::in_degree(VertexId v) const {
  switch (kind_) {
    case HostKind::kCompleteWithPointers: return 0;
    case HostKind::kButterflyDouble:
    case HostKind::kButterflyMultigraph: return 2 * d_;
    case HostKind::kReplacementProduct: break;
  }
  std::uint64_t k = v % ksize_;
  if (k < koffset_[kdelta_ + 1]) return 1;
  return 2;
}

VertexId LabeledHostGraph::base_vertex(std::uint64_t z) const {
  if (z >= base_) throw std::invalid_argument("base vertex out of range");
  if (kind_ == HostKind::kReplacementProduct) return z * ksize_;
  return z;
}

int LabeledHostGraph::layer_of(VertexId v) const {
  if (kind_ != HostKind::kButterflyDouble && kind_ != HostKind::kButterflyMultigraph)
    throw std::logic_error("layer_of needs a butterfly kind");
  return static_cast<int>(v / base_);
}

std::uint64_t LabeledHostGraph::z_of(VertexId v) const {
  if (kind_ != HostKind::kButterflyDouble && kind_ != HostKind::kButterflyMultigraph)
    throw std::logic_error("z_of needs a butterfly kind");
  return v % base_;
}

VertexId LabeledHostGraph::butterfly_vertex(std::uint64_t z, int layer) const {
  return static_cast<VertexId>(layer % (2 * n_)) * base_ + z;
}

std::uint64_t LabeledHostGraph::num_edges() const {
  switch (kind_) {
    case HostKind::kCompleteWithPointers: return 0;
    case HostKind::kButterflyDouble:
    case HostKind::kButterflyMultigraph: return num_vertices_ * 2 * d_;
    case HostKind::kReplacementProduct: break;
  }
  // per copy: two arcs out of each fan-out vertex, one out of every other
  std::uint64_t per_copy = 2 * koffset_[kdelta_] + (ksize_ - koffset_[kdelta_]);
  return per_copy * hd_vertices_;
}

void LabeledHostGraph::build_edges() const {
  std::uint64_t count = num_edges();
  if (count > kMaxMaterializedEdges)
    throw std::length_error("host graph too large to materialize edges");
  std::vector<std::uint64_t> lab(num_vertices_);
  for (VertexId v = 0; v < num_vertices_; ++v) lab[v] = label(v).bits;
  edges_.reserve(count);
  for (VertexId v = 0; v < num_vertices_; ++v)
    for (const Arc& a : out_arcs(v)) edges_.push_back({v, a.other, a.slot});
  std::sort(edges_.begin(), edges_.end(), [&](const HostEdge& a, const HostEdge& b) {
    if (lab[a.tail] != lab[b.tail]) return lab[a.tail] < lab[b.tail];
    if (lab[a.head] != lab[b.head]) return lab[a.head] < lab[b.head];
    return a.slot < b.slot;
  });
  out_start_.assign(num_vertices_ + 1, 0);
  in_start_.assign(num_vertices_ + 1, 0);
  for (const auto& e : edges_) {
    ++out_start_[e.tail + 1];
    ++in_start_[e.head + 1];
  }
  for (VertexId v = 0; v < num_vertices_; ++v) {
    out_start_[v + 1] += out_start_[v];
    in_start_[v + 1] += in_start_[v];
  }
  out_pos_.assign(edges_.size(), 0);
  in_pos_.assign(edges_.size(), 0);
  std::vector<std::uint64_t> ofill(out_start_.begin(), out_start_.end() - 1);
  std::vector<std::uint64_t> ifill(in_start_.begin(), in_start_.end() - 1);
  for (std::uint64_t i = 0; i < edges_.size(); ++i) {
    out_pos_[ofill[edges_[i].tail]++] = i;
    in_pos_[ifill[edges_[i].head]++] = i;
  }
}

const std::vector<HostEdge>& LabeledHostGraph::edges() const {
  std::call_once(edges_once_, [this] { build_edges(); });
  return edges_;
}

std::span<const std::uint64_t> LabeledHostGraph::out_edge_positions(VertexId v) const {
  edges();
  return {out_pos_.data() + out_start_[v], out_start_[v + 1] - out_start_[v]};
}

std::span<const std::uint64_t> LabeledHostGraph::in_edge_positions(VertexId v) const {
  edges();
  return {in_pos_.data() + in_start_[v], in_start_[v + 1] - in_start_[v]};
}

std::uint64_t LabeledHostGraph::find_edge(VertexId tail, VertexId head, int slot) const {
  const auto& es = edges();
  for (std::uint64_t p : out_edge_positions(tail))
    if (es[p].head == head && es[p].slot == slot) return p;
  throw std::invalid_argument("no such host edge");
}

}  // namespace nashlab
