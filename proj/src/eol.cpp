#include "nashlab/eol.hpp"

#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace nashlab {

EolInstance EolInstance::empty(const HostPtr& host) {
  EolInstance inst;
  inst.host = host;
  if (inst.pointer_form()) {
    inst.succ.assign(host->num_vertices(), inst.null_pointer());
    inst.pred.assign(host->num_vertices(), inst.null_pointer());
  } else {
    inst.indicators.assign(host->num_edges(), 0);
  }
  return inst;
}

int EolInstance::pointer_width() const {
  int w = 1;
  while ((std::uint64_t{1} << w) < host->num_vertices() + 1) ++w;
  return w;
}

std::uint64_t EolInstance::null_pointer() const {
  return (std::uint64_t{1} << pointer_width()) - 1;
}

std::uint64_t EolInstance::num_coordinates() const {
  if (pointer_form()) return 2 * num_vertices() * pointer_width();
  return indicators.size();
}

bool EolInstance::coordinate(std::uint64_t c) const {
  if (!pointer_form()) return indicators.at(c) != 0;
  int w = pointer_width();
  std::uint64_t field = c / w;
  int bit = w - 1 - static_cast<int>(c % w);
  std::uint64_t value = (field % 2 == 0 ? succ : pred).at(field / 2);
  return (value >> bit) & 1;
}

void EolInstance::flip(std::uint64_t c) {
  if (!pointer_form()) {
    indicators.at(c) ^= 1;
    return;
  }
  int w = pointer_width();
  std::uint64_t field = c / w;
  int bit = w - 1 - static_cast<int>(c % w);
  (field % 2 == 0 ? succ : pred).at(field / 2) ^= std::uint64_t{1} << bit;
}

void EolInstance::set_edge(VertexId v, VertexId u) {
  if (!pointer_form()) throw std::logic_error("set_edge needs the pointer form");
  succ.at(v) = u;
  pred.at(u) = v;
}

bool has_edge(const EolInstance& inst, VertexId v, VertexId u) {
  if (inst.pointer_form()) {
    return v < inst.num_vertices() && u < inst.num_vertices() && inst.succ[v] == u &&
           inst.pred[u] == v;
  }
  const auto& es = inst.host->edges();
  for (auto p : inst.host->out_edge_positions(v))
    if (es[p].head == u && inst.indicators[p]) return true;
  return false;
}

std::optional<VertexId> successor(const EolInstance& inst, VertexId v) {
  if (inst.pointer_form()) {
    VertexId u = inst.succ.at(v);
    if (u < inst.num_vertices() && inst.pred[u] == v) return u;
    return std::nullopt;
  }
  const auto& es = inst.host->edges();
  for (auto p : inst.host->out_edge_positions(v))
    if (inst.indicators[p]) return es[p].head;
  return std::nullopt;
}

std::optional<VertexId> predecessor(const EolInstance& inst, VertexId v) {
  if (inst.pointer_form()) {
    VertexId u = inst.pred.at(v);
    if (u < inst.num_vertices() && inst.succ[u] == v) return u;
    return std::nullopt;
  }
  const auto& es = inst.host->edges();
  for (auto p : inst.host->in_edge_positions(v))
    if (inst.indicators[p]) return es[p].tail;
  return std::nullopt;
}

Degrees degrees(const EolInstance& inst, VertexId v) {
  if (v >= inst.num_vertices()) throw std::invalid_argument("unknown vertex");
  Degrees d;
  if (inst.pointer_form()) {
    d.out = successor(inst, v) ? 1 : 0;
    d.in = predecessor(inst, v) ? 1 : 0;
    return d;
  }
  for (auto p : inst.host->out_edge_positions(v)) d.out += inst.indicators[p];
  for (auto p : inst.host->in_edge_positions(v)) d.in += inst.indicators[p];
  return d;
}

std::string to_string(SolutionReason r) {
  switch (r) {
    case SolutionReason::kSpecialNonsource: return "special-nonsource";
    case SolutionReason::kSpecialSink: return "special-sink";
    case SolutionReason::kSource: return "source";
    case SolutionReason::kSink: return "sink";
    case SolutionReason::kDegreeViolation: return "degree-violation";
  }
  return "?";
}

std::optional<EolSolution> check_eol_solution(const EolInstance& inst, VertexId v,
                                              SolutionRules rules) {
  Degrees d = degrees(inst, v);
  // an isolated vertex of a subgraph of H' carries a self-loop
  if (inst.host->kind() == HostKind::kReplacementProduct && d.in == 0 && d.out == 0) {
    d.in = d.out = 1;
  }
  std::optional<SolutionReason> reason;
  bool is_start = v == inst.start();
  if (rules == SolutionRules::kStrict || inst.pointer_form()) {
    if (is_start) {
      if (d.in != 0) reason = SolutionReason::kSpecialNonsource;
      else if (d.out == 0) reason = SolutionReason::kSpecialSink;
      else if (d.out > 1) reason = SolutionReason::kDegreeViolation;
    } else if (d.in == 0 && d.out == 0) {
      // off the line entirely
    } else if (d.in > 1 || d.out > 1) {
      reason = SolutionReason::kDegreeViolation;
    } else if (d.in == 0) {
      reason = SolutionReason::kSource;
    } else if (d.out == 0) {
      reason = SolutionReason::kSink;
    }
  } else {
    int excess = d.out - d.in;
    if (is_start) {
      if (excess < 1) reason = d.in > 0 ? SolutionReason::kSpecialNonsource
                                        : SolutionReason::kSpecialSink;
      else if (excess > 1) reason = SolutionReason::kDegreeViolation;
    } else if (excess > 0) {
      reason = SolutionReason::kSource;
    } else if (excess < 0) {
      reason = SolutionReason::kSink;
    }
  }
  if (!reason) return std::nullopt;
  return EolSolution{v, inst.host->label(v), *reason};
}

std::vector<EolSolution> enumerate_solutions(const EolInstance& inst, SolutionRules rules) {
  std::vector<EolSolution> out;
  for (VertexId v = 0; v < inst.num_vertices(); ++v)
    if (auto s = check_eol_solution(inst, v, rules)) out.push_back(*s);
  return out;
}

VertexId canonical_end(const EolInstance& inst) {
  VertexId v = inst.start();
  std::unordered_set<VertexId> seen{v};
  while (auto u = successor(inst, v)) {
    if (!seen.insert(*u).second) break;
    v = *u;
  }
  return v;
}

namespace {

std::string pointer_text(const EolInstance& inst, std::uint64_t p) {
  if (p == inst.null_pointer()) return "NULL";
  if (p < inst.num_vertices()) return inst.host->label(p).str();
  return "@" + std::to_string(p);  // garbage pointer, not a vertex
}

std::uint64_t parse_pointer(const EolInstance& inst, const std::string& s) {
  if (s == "NULL") return inst.null_pointer();
  if (!s.empty() && s[0] == '@') return std::stoull(s.substr(1));
  return inst.host->vertex_of(Label::parse(s));
}

}  // namespace

std::string write_instance(const EolInstance& inst) {
  std::ostringstream out;
  const auto& h = *inst.host;
  out << "eol v1 kind=" << to_string(h.kind()) << " n=" << h.n();
  if (h.kind() == HostKind::kButterflyMultigraph || h.kind() == HostKind::kReplacementProduct)
    out << " d=" << h.d();
  if (inst.pointer_form()) out << " N=" << h.num_vertices();
  out << "\n";
  if (inst.pointer_form()) {
    for (VertexId v = 0; v < inst.num_vertices(); ++v) {
      out << "succ " << h.label(v).str() << " " << pointer_text(inst, inst.succ[v]) << "\n";
      out << "pred " << h.label(v).str() << " " << pointer_text(inst, inst.pred[v]) << "\n";
    }
  } else {
    const auto& es = h.edges();
    for (std::uint64_t i = 0; i < es.size(); ++i)
      out << "e " << h.label(es[i].tail).str() << " " << h.label(es[i].head).str() << " "
          << es[i].slot << " " << int(inst.indicators[i]) << "\n";
  }
  return out.str();
}

EolInstance read_instance(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty instance file");
  std::istringstream hs(line);
  std::string magic, version, tok;
  hs >> magic >> version;
  if (magic != "eol" || version != "v1") throw std::runtime_error("bad instance header");
  std::string kind;
  int n = 0, d = 1;
  std::uint64_t N = 0;
  while (hs >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw std::runtime_error("bad header token " + tok);
    std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "kind") kind = val;
    else if (key == "n") n = std::stoi(val);
    else if (key == "d") d = std::stoi(val);
    else if (key == "N") N = std::stoull(val);
  }
  EolInstance inst = EolInstance::empty(LabeledHostGraph::make(host_kind_from_string(kind), n, d, N));
  const auto& h = *inst.host;
  std::uint64_t next = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag, a, b;
    ls >> tag >> a >> b;
    if (tag == "succ" || tag == "pred") {
      if (!inst.pointer_form()) throw std::runtime_error("pointer line in host-form file");
      VertexId v = h.vertex_of(Label::parse(a));
      (tag == "succ" ? inst.succ : inst.pred)[v] = parse_pointer(inst, b);
    } else if (tag == "e") {
      int slot = 0, bit = 0;
      ls >> slot >> bit;
      const auto& es = h.edges();
      if (next >= es.size()) throw std::runtime_error("too many edge lines");
      VertexId t = h.vertex_of(Label::parse(a)), u = h.vertex_of(Label::parse(b));
      if (es[next].tail != t || es[next].head != u || es[next].slot != slot)
        throw std::runtime_error("edge lines not in canonical order");
      inst.indicators[next++] = static_cast<std::uint8_t>(bit != 0);
    } else {
      throw std::runtime_error("unknown instance line '" + line + "'");
    }
  }
  if (!inst.pointer_form() && next != inst.indicators.size())
    throw std::runtime_error("instance file has fewer edge lines than host edges");
  return inst;
}

}  // namespace nashlab
