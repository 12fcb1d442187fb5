#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nashlab/eol.hpp"
#include "nashlab/rng.hpp"

namespace nashlab {

// Two-party gadget g : Sigma x Sigma -> {0,1}, with Sigma = [sigma].
struct Gadget {
  std::string name;
  int sigma = 0;
  std::vector<std::uint8_t> table;  // row-major, table[a * sigma + b]

  static Gadget ip2();  // inner product mod 2 over {0,1}^2
  int symbol_bits() const;
  int operator()(int a, int b) const { return table[a * sigma + b]; }
  std::vector<std::pair<int, int>> preimages(int bit) const;
};

// Symbols are indexed by the instance's flat input coordinates.
struct ComposedInstance {
  HostPtr host;
  Gadget gadget;
  std::vector<std::uint8_t> alice, bob;
};

EolInstance decode_composed(const ComposedInstance& ci);
// Uniform per-coordinate preimages of x.
ComposedInstance encode_composed(const EolInstance& x, const Gadget& g, Rng& rng);
ComposedInstance random_composed(const HostPtr& host, const Gadget& g, Rng& rng);

struct PiOutcome {
  VertexId S = 0;
  VertexId P = 0;
  std::vector<std::uint8_t> transcript;  // bits
};

// Alice sends her symbols on v's incident coordinates; Bob decodes and
// announces local neighbor indices (host form, 0 = self) or raw pointer
// values (complete host).
PiOutcome run_pi_v(VertexId v, const ComposedInstance& ci);
// (S, P) as a function of v and the transcript alone.
std::pair<VertexId, VertexId> interpret_transcript(const LabeledHostGraph& host, const Gadget& g,
                                                   VertexId v,
                                                   const std::vector<std::uint8_t>& transcript);
// Reference values computed from a decoded instance.
std::pair<VertexId, VertexId> direct_sp(const EolInstance& x, VertexId v);

int local_index_bits(const LabeledHostGraph& host);
std::uint64_t transcript_cost(const LabeledHostGraph& host, const Gadget& g, VertexId v);
std::uint64_t max_transcript_cost(const LabeledHostGraph& host, const Gadget& g);

std::string write_composed(const ComposedInstance& ci);
ComposedInstance read_composed(const std::string& text);

}  // namespace nashlab
