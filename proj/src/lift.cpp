#include "nashlab/lift.hpp"

#include <bit>
#include <sstream>
#include <stdexcept>

namespace nashlab {

Gadget Gadget::ip2() {
  Gadget g;
  g.name = "ip2";
  g.sigma = 4;
  g.table.resize(16);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) g.table[a * 4 + b] = std::popcount(unsigned(a & b)) & 1;
  return g;
}

int Gadget::symbol_bits() const {
  int b = 0;
  while ((1 << b) < sigma) ++b;
  return b;
}

std::vector<std::pair<int, int>> Gadget::preimages(int bit) const {
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < sigma; ++a)
    for (int b = 0; b < sigma; ++b)
      if ((*this)(a, b) == bit) out.push_back({a, b});
  return out;
}

namespace {

int pointer_bits(const LabeledHostGraph& host) {
  int w = 1;
  while ((std::uint64_t{1} << w) < host.num_vertices() + 1) ++w;
  return w;
}

std::vector<std::uint64_t> incident_coordinates(const LabeledHostGraph& host, VertexId v) {
  std::vector<std::uint64_t> coords;
  if (host.kind() == HostKind::kCompleteWithPointers) {
    int w = pointer_bits(host);
    for (int f = 0; f < 2; ++f)
      for (int b = 0; b < w; ++b) coords.push_back((2 * v + f) * w + b);
  } else {
    for (auto p : host.out_edge_positions(v)) coords.push_back(p);
    for (auto p : host.in_edge_positions(v)) coords.push_back(p);
  }
  return coords;
}

void push_bits(std::vector<std::uint8_t>& out, std::uint64_t value, int width) {
  for (int b = width - 1; b >= 0; --b) out.push_back((value >> b) & 1);
}

std::uint64_t read_bits(const std::vector<std::uint8_t>& in, std::size_t& pos, int width) {
  if (pos + width > in.size()) throw std::invalid_argument("transcript too short");
  std::uint64_t v = 0;
  for (int b = 0; b < width; ++b) v = (v << 1) | in[pos++];
  return v;
}

}  // namespace

EolInstance decode_composed(const ComposedInstance& ci) {
  EolInstance x = EolInstance::empty(ci.host);
  if (ci.alice.size() != x.num_coordinates() || ci.bob.size() != x.num_coordinates())
    throw std::invalid_argument("composed input length does not match host coordinates");
  for (std::uint64_t c = 0; c < x.num_coordinates(); ++c)
    if (ci.gadget(ci.alice[c], ci.bob[c]) != static_cast<int>(x.coordinate(c))) x.flip(c);
  return x;
}

ComposedInstance encode_composed(const EolInstance& x, const Gadget& g, Rng& rng) {
  ComposedInstance ci{x.host, g, {}, {}};
  auto pre0 = g.preimages(0), pre1 = g.preimages(1);
  for (std::uint64_t c = 0; c < x.num_coordinates(); ++c) {
    const auto& pre = x.coordinate(c) ? pre1 : pre0;
    auto [a, b] = pre[uniform_below(rng, pre.size())];
    ci.alice.push_back(static_cast<std::uint8_t>(a));
    ci.bob.push_back(static_cast<std::uint8_t>(b));
  }
  return ci;
}

ComposedInstance random_composed(const HostPtr& host, const Gadget& g, Rng& rng) {
  ComposedInstance ci{host, g, {}, {}};
  std::uint64_t count = host->kind() == HostKind::kCompleteWithPointers
                            ? 2 * host->num_vertices() * pointer_bits(*host)
                            : host->num_edges();
  for (std::uint64_t c = 0; c < count; ++c) {
    ci.alice.push_back(static_cast<std::uint8_t>(uniform_below(rng, g.sigma)));
    ci.bob.push_back(static_cast<std::uint8_t>(uniform_below(rng, g.sigma)));
  }
  return ci;
}

int local_index_bits(const LabeledHostGraph& host) {
  int b = 0;
  while ((1 << b) < host.degree_bound() + 1) ++b;
  return b;
}

PiOutcome run_pi_v(VertexId v, const ComposedInstance& ci) {
  const auto& host = *ci.host;
  if (v >= host.num_vertices()) throw std::invalid_argument("unknown vertex");
  PiOutcome out;
  const int sb = ci.gadget.symbol_bits();
  auto coords = incident_coordinates(host, v);
  // Alice's message
  for (auto c : coords) push_bits(out.transcript, ci.alice[c], sb);
  // Bob decodes with his own symbols
  std::vector<int> x;
  for (auto c : coords) x.push_back(ci.gadget(ci.alice[c], ci.bob[c]));
  if (host.kind() == HostKind::kCompleteWithPointers) {
    int w = pointer_bits(host);
    std::uint64_t s = 0, p = 0;
    for (int b = 0; b < w; ++b) s = (s << 1) | x[b];
    for (int b = 0; b < w; ++b) p = (p << 1) | x[w + b];
    push_bits(out.transcript, s, w);
    push_bits(out.transcript, p, w);
  } else {
    int ib = local_index_bits(*ci.host);
    std::size_t outs = ci.host->out_edge_positions(v).size();
    std::uint64_t si = 0, pi = 0;
    for (std::size_t k = 0; k < outs && !si; ++k)
      if (x[k]) si = k + 1;
    for (std::size_t k = outs; k < coords.size() && !pi; ++k)
      if (x[k]) pi = k - outs + 1;
    push_bits(out.transcript, si, ib);
    push_bits(out.transcript, pi, ib);
  }
  auto [S, P] = interpret_transcript(*ci.host, ci.gadget, v, out.transcript);
  out.S = S;
  out.P = P;
  return out;
}

std::pair<VertexId, VertexId> interpret_transcript(const LabeledHostGraph& host, const Gadget& g,
                                                   VertexId v,
                                                   const std::vector<std::uint8_t>& transcript) {
  std::size_t pos = incident_coordinates(host, v).size() * g.symbol_bits();
  if (host.kind() == HostKind::kCompleteWithPointers) {
    int w = pointer_bits(host);
    std::uint64_t s = read_bits(transcript, pos, w), p = read_bits(transcript, pos, w);
    return {s < host.num_vertices() ? s : v, p < host.num_vertices() ? p : v};
  }
  int ib = local_index_bits(host);
  std::uint64_t si = read_bits(transcript, pos, ib), pi = read_bits(transcript, pos, ib);
  const auto& es = host.edges();
  auto outs = host.out_edge_positions(v);
  auto ins = host.in_edge_positions(v);
  VertexId S = si ? es[outs[si - 1]].head : v;
  VertexId P = pi ? es[ins[pi - 1]].tail : v;
  return {S, P};
}

std::pair<VertexId, VertexId> direct_sp(const EolInstance& x, VertexId v) {
  if (x.pointer_form()) {
    VertexId s = x.succ[v], p = x.pred[v];
    return {s < x.num_vertices() ? s : v, p < x.num_vertices() ? p : v};
  }
  const auto& es = x.host->edges();
  VertexId S = v, P = v;
  for (auto q : x.host->out_edge_positions(v))
    if (x.indicators[q]) {
      S = es[q].head;
      break;
    }
  for (auto q : x.host->in_edge_positions(v))
    if (x.indicators[q]) {
      P = es[q].tail;
      break;
    }
  return {S, P};
}

std::uint64_t transcript_cost(const LabeledHostGraph& host, const Gadget& g, VertexId v) {
  if (host.kind() == HostKind::kCompleteWithPointers) {
    int w = pointer_bits(host);
    return 2ull * w * g.symbol_bits() + 2ull * w;
  }
  return std::uint64_t(host.out_degree(v) + host.in_degree(v)) * g.symbol_bits() +
         2ull * local_index_bits(host);
}

std::uint64_t max_transcript_cost(const LabeledHostGraph& host, const Gadget& g) {
  std::uint64_t best = 0;
  for (VertexId v = 0; v < host.num_vertices(); ++v) best = std::max(best, transcript_cost(host, g, v));
  return best;
}

std::string write_composed(const ComposedInstance& ci) {
  std::ostringstream out;
  const auto& h = *ci.host;
  out << "composed v1 gadget=" << ci.gadget.name << " kind=" << to_string(h.kind())
      << " n=" << h.n();
  if (h.kind() == HostKind::kButterflyMultigraph || h.kind() == HostKind::kReplacementProduct)
    out << " d=" << h.d();
  if (h.kind() == HostKind::kCompleteWithPointers) out << " N=" << h.num_vertices();
  out << "\n";
  for (std::size_t c = 0; c < ci.alice.size(); ++c)
    out << "s " << c << " " << int(ci.alice[c]) << " " << int(ci.bob[c]) << "\n";
  return out.str();
}

ComposedInstance read_composed(const std::string& text) {
  std::istringstream in(text);
  std::string line, magic, version, tok;
  std::getline(in, line);
  std::istringstream hs(line);
  hs >> magic >> version;
  if (magic != "composed" || version != "v1") throw std::runtime_error("bad composed header");
  std::string gadget = "ip2", kind = "complete-with-pointers";
  int n = 1, d = 1;
  std::uint64_t N = 0;
  while (hs >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "gadget") gadget = val;
    else if (key == "kind") kind = val;
    else if (key == "n") n = std::stoi(val);
    else if (key == "d") d = std::stoi(val);
    else if (key == "N") N = std::stoull(val);
  }
  if (gadget != "ip2") throw std::runtime_error("unsupported gadget " + gadget);
  ComposedInstance ci{LabeledHostGraph::make(host_kind_from_string(kind), n, d, N), Gadget::ip2(), {}, {}};
  std::uint64_t count = EolInstance::empty(ci.host).num_coordinates();
  ci.alice.assign(count, 0);
  ci.bob.assign(count, 0);
  std::uint64_t seen = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    std::uint64_t idx;
    int a, b;
    ls >> tag >> idx >> a >> b;
    if (tag != "s" || idx >= count) throw std::runtime_error("bad composed line '" + line + "'");
    ci.alice[idx] = static_cast<std::uint8_t>(a);
    ci.bob[idx] = static_cast<std::uint8_t>(b);
    ++seen;
  }
  if (seen != count) throw std::runtime_error("composed file is missing symbols");
  return ci;
}

}  // namespace nashlab
