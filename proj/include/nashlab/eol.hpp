#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nashlab/graphs.hpp"

namespace nashlab {

// An End-of-Line input over a host. Host kinds carry one indicator per
// canonical host edge; the complete host carries successor/predecessor
// pointers instead, with all-ones as the null sentinel. The start vertex is
// always id 0, whose label is all zeros.
struct EolInstance {
  HostPtr host;
  std::vector<std::uint8_t> indicators;
  std::vector<std::uint64_t> succ, pred;

  static EolInstance empty(const HostPtr& host);

  bool pointer_form() const { return host->kind() == HostKind::kCompleteWithPointers; }
  VertexId start() const { return 0; }
  std::uint64_t num_vertices() const { return host->num_vertices(); }
  int pointer_width() const;
  std::uint64_t null_pointer() const;

  // Flat input coordinates: indicator bits, or pointer bits with field
  // 2v (succ) / 2v+1 (pred) and bit 0 the most significant.
  std::uint64_t num_coordinates() const;
  bool coordinate(std::uint64_t c) const;
  void flip(std::uint64_t c);

  void set_edge(VertexId v, VertexId u);  // pointer form: succ(v)=u, pred(u)=v
  bool operator==(const EolInstance& o) const {
    return host == o.host && indicators == o.indicators && succ == o.succ && pred == o.pred;
  }
};

struct Degrees {
  int in = 0;
  int out = 0;
};

// Edge (v,u) of G_x. For the pointer form: succ(v)=u and pred(u)=v.
bool has_edge(const EolInstance& inst, VertexId v, VertexId u);
std::optional<VertexId> successor(const EolInstance& inst, VertexId v);
std::optional<VertexId> predecessor(const EolInstance& inst, VertexId v);
Degrees degrees(const EolInstance& inst, VertexId v);

enum class SolutionRules { kStrict, kRelaxed };
enum class SolutionReason { kSpecialNonsource, kSpecialSink, kSource, kSink, kDegreeViolation };

std::string to_string(SolutionReason r);

struct EolSolution {
  VertexId vertex = 0;
  Label label;
  SolutionReason reason = SolutionReason::kSink;
  bool operator==(const EolSolution&) const = default;
};

std::optional<EolSolution> check_eol_solution(const EolInstance& inst, VertexId v,
                                              SolutionRules rules = SolutionRules::kStrict);
std::vector<EolSolution> enumerate_solutions(const EolInstance& inst,
                                             SolutionRules rules = SolutionRules::kStrict);

// End of the path that leaves the start vertex (the start itself when it has
// no successor). Stops if the walk revisits a vertex.
VertexId canonical_end(const EolInstance& inst);

std::string write_instance(const EolInstance& inst);
EolInstance read_instance(const std::string& text);

}  // namespace nashlab
