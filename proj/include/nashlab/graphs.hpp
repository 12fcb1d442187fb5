#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace nashlab {

using VertexId = std::uint64_t;

enum class HostKind {
  kCompleteWithPointers,
  kButterflyDouble,
  kButterflyMultigraph,
  kReplacementProduct,
};

std::string to_string(HostKind kind);
HostKind host_kind_from_string(const std::string& s);

// Fixed-width bit string; character 0 is the most significant bit of `bits`.
struct Label {
  std::uint64_t bits = 0;
  int width = 0;

  std::string str() const;
  static Label parse(const std::string& s);
  bool operator==(const Label&) const = default;
  auto operator<=>(const Label& o) const { return bits <=> o.bits; }
};

int hamming(const Label& a, const Label& b);

// Reflected binary Gray code made cyclic for an even length L: the first L/2
// codewords of the reflected code followed by the last L/2. Consecutive
// entries, including the wrap from L-1 to 0, differ in exactly one bit.
int gray_width(std::uint64_t length);
std::uint64_t cyclic_gray(std::uint64_t index, std::uint64_t length);

struct HostEdge {
  VertexId tail = 0;
  VertexId head = 0;
  int slot = 1;
};

// Neighbor seen from one endpoint. `kind` is 0 for a straight butterfly step
// and 1 for a bit-flip step; it is only meaningful for butterfly kinds.
struct Arc {
  VertexId other = 0;
  int slot = 1;
  int kind = 0;
};

class LabeledHostGraph {
 public:
  HostKind kind() const { return kind_; }
  int n() const { return n_; }
  int d() const { return d_; }
  int degree_bound() const;
  std::uint64_t num_vertices() const { return num_vertices_; }
  std::uint64_t base_size() const { return base_; }  // N = 2^n, or N itself for the complete host
  int label_width() const { return label_width_; }

  Label label(VertexId v) const;
  VertexId vertex_of(const Label& l) const;  // throws std::invalid_argument

  // Arcs in canonical local order (by neighbor label, then slot).
  std::vector<Arc> out_arcs(VertexId v) const;
  std::vector<Arc> in_arcs(VertexId v) const;
  int out_degree(VertexId v) const;
  int in_degree(VertexId v) const;

  // The identified first layer [N]. For H' this is the entry port 0 of the
  // gadget copy sitting on the base butterfly vertex.
  VertexId base_vertex(std::uint64_t z) const;
  // Butterfly bookkeeping (butterfly kinds only).
  int layer_of(VertexId v) const;
  std::uint64_t z_of(VertexId v) const;
  VertexId butterfly_vertex(std::uint64_t z, int layer) const;

  // Published bound on label Hamming distance across an edge.
  int label_distance_bound() const;

  // Canonical edge list and per-vertex positions; built on first use. Throws
  // std::length_error when the edge count is beyond desk scale.
  std::uint64_t num_edges() const;
  const std::vector<HostEdge>& edges() const;
  std::span<const std::uint64_t> out_edge_positions(VertexId v) const;
  std::span<const std::uint64_t> in_edge_positions(VertexId v) const;
  std::uint64_t find_edge(VertexId tail, VertexId head, int slot) const;

  // K gadget parameters (replacement product only).
  int gadget_bits() const { return kdelta_; }
  std::uint64_t gadget_size() const { return ksize_; }

  static std::shared_ptr<const LabeledHostGraph> make(HostKind kind, int n, int d,
                                                      std::uint64_t complete_size = 0);

 private:
  LabeledHostGraph() = default;
  friend std::shared_ptr<const LabeledHostGraph> build_double_butterfly(int n);
  friend std::shared_ptr<const LabeledHostGraph> multiply_edges(
      const std::shared_ptr<const LabeledHostGraph>& h, int d);
  friend std::shared_ptr<const LabeledHostGraph> replacement_product(
      const std::shared_ptr<const LabeledHostGraph>& hd);
  friend std::shared_ptr<const LabeledHostGraph> complete_host(std::uint64_t N);

  // butterfly layer of the H^d part
  std::vector<Arc> hd_out(VertexId w) const;
  std::vector<Arc> hd_in(VertexId w) const;
  Label hd_label(VertexId w) const;
  VertexId hd_vertex_of(std::uint64_t bits) const;
  // gadget K
  struct KVertex {
    int layer = 0;
    std::uint64_t v = 0, u = 0;
  };
  KVertex k_decode(std::uint64_t k) const;
  std::uint64_t k_encode(const KVertex& kv) const;
  std::uint64_t k_label_bits(const KVertex& kv) const;
  std::uint64_t k_port(const Arc& hd_arc) const;
  void build_edges() const;

  HostKind kind_ = HostKind::kButterflyDouble;
  int n_ = 0;
  int d_ = 1;
  std::uint64_t base_ = 0;
  std::uint64_t num_vertices_ = 0;
  int label_width_ = 0;
  int layer_bits_ = 0;  // Gray width of the 2n butterfly layers
  std::uint64_t hd_vertices_ = 0;
  int kdelta_ = 0;
  int klayer_bits_ = 0;
  std::uint64_t ksize_ = 0;
  std::vector<std::uint64_t> koffset_;  // first id of each K layer, plus end
  std::vector<int> layer_of_code_;      // inverse of the cyclic Gray code
  std::vector<int> klayer_of_code_;

  mutable std::once_flag edges_once_;
  mutable std::vector<HostEdge> edges_;
  mutable std::vector<std::uint64_t> out_start_, out_pos_, in_start_, in_pos_;
};

using HostPtr = std::shared_ptr<const LabeledHostGraph>;

HostPtr build_double_butterfly(int n);
HostPtr multiply_edges(const HostPtr& h, int d);
HostPtr replacement_product(const HostPtr& hd);
HostPtr complete_host(std::uint64_t N);

// Smallest power of two that is at least log2 of the butterfly size 2*2^n*n.
int default_multiplicity(int n);

}  // namespace nashlab
