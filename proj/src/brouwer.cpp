#include "nashlab/brouwer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace nashlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSlack = 1e-12;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

double normalized_norm(std::span<const double> v) {
  if (v.empty()) return 0;
  double s = 0;
  for (double a : v) s += a * a;
  return std::sqrt(s / v.size());
}

double normalized_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("length mismatch");
  if (a.empty()) return 0;
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / a.size());
}

// ---- chain ------------------------------------------------------------------

int BrouwerChain::add_word(const VertexCode& code, VertexId v) {
  int w = word_of(v);
  if (w >= 0) return w;
  words_.push_back(code.encode_full(v));
  word_vertex_.push_back(v);
  incident_.emplace_back();
  return static_cast<int>(words_.size()) - 1;
}

int BrouwerChain::word_of(VertexId v) const {
  for (std::size_t i = 0; i < word_vertex_.size(); ++i)
    if (word_vertex_[i] == v) return static_cast<int>(i);
  return -1;
}

BrouwerChain::BrouwerChain(const VertexCode& code, const std::vector<VertexNeighbourhood>& known)
    : m_(code.m()) {
  std::map<VertexId, const VertexNeighbourhood*> info;
  for (const auto& k : known)
    if (!info.emplace(k.v, &k).second) throw std::invalid_argument("vertex listed twice");

  std::vector<std::pair<VertexId, VertexId>> edges;
  std::map<VertexId, VertexId> out, in;
  auto add_edge = [&](VertexId a, VertexId b) {
    if (b == 0 || a == b) return;  // edges into the start are not drawn
    auto o = out.find(a);
    auto i = in.find(b);
    if (o != out.end() || i != in.end()) {
      if (o != out.end() && o->second == b) return;
      throw std::invalid_argument("inconsistent neighbourhoods: vertex with two out or in edges");
    }
    out[a] = b;
    in[b] = a;
    edges.emplace_back(a, b);
  };
  for (const auto& k : known) {
    if (k.succ) add_edge(k.v, *k.succ);
    if (k.pred) add_edge(*k.pred, k.v);
  }
  std::sort(edges.begin(), edges.end());

  add_word(code, 0);
  for (auto [a, b] : edges) {
    add_word(code, a);
    add_word(code, b);
  }

  BrouwerSegment first;
  first.s = {-1, -1, 0.0, 2.0};
  first.t = {-1, -1, 0.0, 0.0};
  first.kind = SegmentKind::kFirst;
  first.block = 3;
  first.length = 1.0;
  segments_.push_back(first);

  std::map<std::pair<VertexId, VertexId>, int> base_of;
  for (auto [a, b] : edges) {
    int wa = word_of(a), wb = word_of(b);
    int ham = 0;
    for (int c = 0; c < m_; ++c) ham += words_[wa][c] != words_[wb][c];
    double lc = std::sqrt(double(ham) / (4.0 * m_));
    PointSpec x1{wa, wa, 0, 0}, x2{wa, wb, 0, 0}, x3{wa, wb, 1, 0}, x4{wb, wb, 1, 0},
        x5{wb, wb, 0, 0};
    int base = static_cast<int>(segments_.size());
    base_of[{a, b}] = base;
    const PointSpec pts[5] = {x1, x2, x3, x4, x5};
    const int blocks[4] = {1, 2, 0, 2};
    const double lens[4] = {lc, 0.5, lc, 0.5};
    const SegmentKind kinds[4] = {SegmentKind::kStep1, SegmentKind::kStep2, SegmentKind::kStep3,
                                  SegmentKind::kStep4};
    for (int q = 0; q < 4; ++q) {
      BrouwerSegment sg;
      sg.s = pts[q];
      sg.t = pts[q + 1];
      sg.kind = kinds[q];
      sg.tail = a;
      sg.head = b;
      sg.block = blocks[q];
      sg.length = lens[q];
      if (q > 0) sg.prev = base + q - 1;
      if (q < 3) sg.next = base + q + 1;
      segments_.push_back(sg);
    }
    incident_[wa].insert(incident_[wa].end(), {base, base + 1, base + 2, base + 3});
    incident_[wb].insert(incident_[wb].end(), {base, base + 1, base + 2, base + 3});
  }

  auto first_of_out = [&](VertexId v) -> int {
    auto o = out.find(v);
    return o == out.end() ? -1 : base_of.at({v, o->second});
  };
  // first segment
  if (int nx = first_of_out(0); nx >= 0) {
    segments_[0].next = nx;
  } else if (info.count(0)) {
    segments_[0].end_window = true;
  } else {
    segments_[0].open_end = true;
  }
  for (auto [a, b] : edges) {
    int base = base_of.at({a, b});
    BrouwerSegment& s1 = segments_[base];
    BrouwerSegment& s4 = segments_[base + 3];
    if (a == 0) {
      s1.prev = 0;
    } else if (auto i = in.find(a); i != in.end()) {
      s1.prev = base_of.at({i->second, a}) + 3;
    } else if (info.count(a)) {
      s1.start_window = true;
    } else {
      s1.open_start = true;
    }
    if (int nx = first_of_out(b); nx >= 0) {
      s4.next = nx;
    } else if (info.count(b)) {
      s4.end_window = true;
    } else {
      s4.open_end = true;
    }
  }
}

double BrouwerChain::value(const PointSpec& p, int coord) const {
  int b = coord / m_, c = coord % m_;
  switch (b) {
    case 0: return p.w1 < 0 ? 0.0 : words_[p.w1][c];
    case 1: return p.w2 < 0 ? 0.0 : words_[p.w2][c];
    case 2: return p.b3;
    default: return p.b4;
  }
}

Point BrouwerChain::point(const PointSpec& p) const {
  Point x(dim());
  for (int i = 0; i < dim(); ++i) x[i] = value(p, i);
  return x;
}

Point BrouwerChain::point_on(int segment, double tau) const {
  const auto& sg = segments_.at(segment);
  Point x(dim());
  for (int i = 0; i < dim(); ++i) {
    double s = value(sg.s, i);
    x[i] = s + tau * (value(sg.t, i) - s);
  }
  return x;
}

double BrouwerChain::direction(int segment, int coord) const {
  const auto& sg = segments_[segment];
  if (coord / m_ != sg.block) return 0;
  return (value(sg.t, coord) - value(sg.s, coord)) / sg.length;
}

std::array<Point, 5> brouwer_vertices(const VertexCode& code, VertexId u, VertexId v) {
  auto eu = code.encode_full(u), ev = code.encode_full(v);
  int m = code.m();
  auto make = [&](const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b,
                  double b3) {
    Point x(4 * m, 0.0);
    for (int c = 0; c < m; ++c) {
      x[c] = a[c];
      x[m + c] = b[c];
      x[2 * m + c] = b3;
    }
    return x;
  };
  return {make(eu, eu, 0), make(eu, ev, 0), make(eu, ev, 1), make(ev, ev, 1), make(ev, ev, 0)};
}

BrouwerChain build_brouwer_path(const EolInstance& inst, const VertexCode& code) {
  if (code.n() != inst.host->label_width())
    throw std::invalid_argument("code length does not match host label width");
  std::vector<VertexNeighbourhood> known;
  known.reserve(inst.num_vertices());
  for (VertexId v = 0; v < inst.num_vertices(); ++v)
    known.push_back({v, successor(inst, v), predecessor(inst, v)});
  return BrouwerChain(code, known);
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::kFar: return "far";
    case Classification::kNearSegment: return "near-one-segment";
    case Classification::kNearCorner: return "near-corner";
    case Classification::kNearEndpoint: return "near-endpoint";
    case Classification::kOutsidePicture: return "outside-picture";
    case Classification::kOutsideTop: return "outside-top";
    case Classification::kOutsideInterpolated: return "outside-interpolated";
  }
  return "?";
}

// ---- evaluation core --------------------------------------------------------

namespace {

struct SegStats {
  double tau = 0, arc = 0, dist = kInf;
};

SegStats seg_stats(const BrouwerChain& ch, int k, const CoordView& v) {
  const auto& sg = ch.segments()[k];
  int m = ch.m();
  double A = 0, B = 0, C = 0;
  for (std::size_t q = 0; q < v.coords.size(); ++q) {
    int c = v.coords[q];
    double s = ch.value(sg.s, c);
    double dt = (c / m == sg.block) ? ch.value(sg.t, c) - s : 0.0;
    double dx = v.x[q] - s;
    A += dx * dx;
    B += dx * dt;
    C += dt * dt;
  }
  double n = static_cast<double>(v.coords.size());
  SegStats st;
  // ratio estimator; on the full view C/n is exactly length^2
  st.tau = C > 0 ? B / C : 0.0;
  st.arc = st.tau * sg.length;
  st.dist = std::sqrt(std::max(0.0, (A - 2 * st.tau * B + st.tau * st.tau * C) / n));
  return st;
}

double z_value(const BrouwerChain& ch, const std::vector<ZTerm>& z, int coord) {
  double v = 0;
  for (const auto& t : z) {
    const auto& sg = ch.segments()[t.segment];
    double s = ch.value(sg.s, coord);
    v += t.coef * (s + t.tau * (ch.value(sg.t, coord) - s));
  }
  return v;
}

double z_distance(const BrouwerChain& ch, const std::vector<ZTerm>& z, const CoordView& v) {
  double s = 0;
  for (std::size_t q = 0; q < v.coords.size(); ++q) {
    double d = v.x[q] - z_value(ch, z, v.coords[q]);
    s += d * d;
  }
  return std::sqrt(s / v.coords.size());
}

// Distance-anchored field around a line: anchors at 0, h, 2h, 3h.
Blend line_blend(const std::vector<std::pair<int, double>>& dirs, std::vector<ZTerm> z, double r,
                 double delta, double h) {
  double rho = r / h;
  double a_dir = 0, a_zx = 0, a_def = 0;
  if (rho <= 1) {
    a_dir = delta * (1 - rho);
    a_zx = delta * rho / h;
  } else if (rho <= 2) {
    a_zx = delta * (2 - rho) / h;
    a_dir = -delta * (rho - 1);
  } else if (rho <= 3) {
    a_dir = -delta * (3 - rho);
    a_def = delta * (rho - 2);
  } else {
    a_def = delta;
  }
  Blend b;
  for (auto [k, w] : dirs)
    if (a_dir != 0) b.dirs.emplace_back(k, w * a_dir);
  b.z = std::move(z);
  b.c_zx = a_zx;
  b.c_def = a_def;
  return b;
}

Blend scale_towards_default(Blend b, double lambda, double delta) {
  for (auto& d : b.dirs) d.second *= lambda;
  b.c_zx *= lambda;
  b.c_def = lambda * b.c_def + (1 - lambda) * delta;
  return b;
}

Blend default_blend(double delta) {
  Blend b;
  b.c_def = delta;
  return b;
}

}  // namespace

double blend_component(const BrouwerChain& ch, const Blend& b, int coord, double x_i) {
  double g = 0;
  for (auto [k, w] : b.dirs) g += w * ch.direction(k, coord);
  if (b.c_zx != 0) g += b.c_zx * (z_value(ch, b.z, coord) - x_i);
  if (coord / ch.m() == 3) g += b.c_def;
  return g;
}

Evaluation evaluate_region(const BrouwerChain& ch, std::span<const int> candidates,
                           const CoordView& view, const ConstantsProfile& prof) {
  const double h = prof.h, delta = prof.delta, sh = std::sqrt(h);
  const int m = ch.m();
  Evaluation ev;
  auto& loc = ev.location;

  double s4 = 0;
  int n4 = 0;
  for (std::size_t q = 0; q < view.coords.size(); ++q)
    if (view.coords[q] / m == 3) {
      s4 += view.x[q];
      ++n4;
    }
  if (n4 == 0) throw std::invalid_argument("view has no special-direction coordinates");
  loc.x4_mean = s4 / n4;

  if (loc.x4_mean >= 0.5) {
    // outside the picture: blend the boundary field with the top field
    SegStats st = seg_stats(ch, 0, view);
    double rho = st.dist / h;
    std::vector<ZTerm> z{{0, st.tau, 1.0}};
    Blend lb = line_blend({{0, 1.0}}, z, st.dist, delta, h);
    double t_dir = 0, t_zx = 0;
    if (rho <= 1) {
      t_dir = delta * (1 - rho);
      t_zx = delta * rho / h;
    } else {
      t_zx = delta / st.dist;
    }
    double w = clamp01((2 - loc.x4_mean) / 1.5);
    double l_dir = lb.dirs.empty() ? 0.0 : lb.dirs[0].second;
    Blend b;
    double dir = w * l_dir + (1 - w) * t_dir;
    if (dir != 0) b.dirs.emplace_back(0, dir);
    b.z = z;
    b.c_zx = w * lb.c_zx + (1 - w) * t_zx;
    b.c_def = w * lb.c_def;
    loc.classification = w >= 1   ? Classification::kOutsidePicture
                         : w <= 0 ? Classification::kOutsideTop
                                  : Classification::kOutsideInterpolated;
    loc.segments = {0};
    loc.taus = {st.tau};
    loc.z = z;
    loc.distance = st.dist;
    loc.outside_weight = w;
    ev.blend = std::move(b);
    return ev;
  }

  struct Cand {
    Classification cls;
    std::vector<int> segs;
    std::vector<double> taus;
    std::vector<ZTerm> z;
    std::vector<std::pair<int, double>> dirs;
    double dist = kInf;
    double lambda = 1;
    double psi = -1;
  };
  Cand best;
  auto offer = [&](Cand c) {
    if (c.dist < 3 * h && c.dist < best.dist) best = std::move(c);
  };

  std::map<int, SegStats> cache;
  auto stats = [&](int k) -> const SegStats& {
    auto it = cache.find(k);
    if (it == cache.end()) it = cache.emplace(k, seg_stats(ch, k, view)).first;
    return it->second;
  };

  for (int k : candidates) {
    const auto& sg = ch.segments()[k];
    const SegStats st = stats(k);
    const double L = sg.length;
    double lo = (sg.prev >= 0 || sg.start_window) ? sh : -kInf;
    double hi = (sg.next >= 0 || sg.end_window) ? L - sh : kInf;
    std::vector<ZTerm> z{{k, st.tau, 1.0}};
    if (st.arc >= lo - kSlack && st.arc <= hi + kSlack)
      offer({Classification::kNearSegment, {k}, {st.tau}, z, {{k, 1.0}}, st.dist, 1.0, -1});
    if (sg.start_window && st.arc < sh)
      offer({Classification::kNearEndpoint, {k}, {st.tau}, z, {{k, 1.0}}, st.dist,
             clamp01(st.arc / sh), -1});
    if (sg.end_window && st.arc > L - sh)
      offer({Classification::kNearEndpoint, {k}, {st.tau}, z, {{k, 1.0}}, st.dist,
             clamp01((L - st.arc) / sh), -1});
    if (sg.next >= 0 && st.arc > L - sh) {
      const auto& sn = ch.segments()[sg.next];
      const SegStats st2 = stats(sg.next);
      double d1 = st.arc - (L - sh);
      double d2 = sh - st2.arc;
      if (d2 >= 0 && d1 + d2 > 0) {
        double psi = d2 / (d1 + d2);
        std::vector<ZTerm> zc{{k, 1 - sh / L, psi}, {sg.next, sh / sn.length, 1 - psi}};
        double dist = z_distance(ch, zc, view);
        offer({Classification::kNearCorner, {k, sg.next}, {st.tau, st2.tau}, zc,
               {{k, psi}, {sg.next, 1 - psi}}, dist, 1.0, psi});
      }
    }
  }

  if (best.dist == kInf) {
    loc.classification = Classification::kFar;
    ev.blend = default_blend(delta);
    return ev;
  }
  Blend b = line_blend(best.dirs, best.z, best.dist, delta, h);
  if (best.lambda < 1) b = scale_towards_default(std::move(b), best.lambda, delta);
  loc.classification = best.cls;
  loc.segments = best.segs;
  loc.taus = best.taus;
  loc.z = best.z;
  loc.psi = best.psi;
  loc.distance = best.dist;
  loc.window = best.lambda;
  ev.blend = std::move(b);
  return ev;
}

// ---- field ------------------------------------------------------------------

BrouwerField::BrouwerField(EolInstance inst, VertexCode code, ConstantsProfile profile)
    : inst_(std::move(inst)),
      code_(std::move(code)),
      profile_(std::move(profile)),
      chain_(build_brouwer_path(inst_, code_)) {
  profile_.validate();
  all_coords_.resize(chain_.dim());
  std::iota(all_coords_.begin(), all_coords_.end(), 0);
  const auto& segs = chain_.segments();
  for (int k = 0; k < static_cast<int>(segs.size()); ++k) {
    const auto& sg = segs[k];
    if (sg.start_window) {
      Endpoint e{k, false, sg.tail, check_eol_solution(inst_, sg.tail)};
      endpoints_.push_back(e);
    }
    if (sg.end_window) {
      Endpoint e;
      e.segment = k;
      e.at_end = true;
      e.vertex = sg.kind == SegmentKind::kFirst ? 0 : sg.head;
      VertexId sol = e.vertex;
      // the dropped edge into the start makes the start the solution
      if (sg.kind != SegmentKind::kFirst) {
        auto s = successor(inst_, sg.head);
        if (s && *s == 0) sol = 0;
      }
      e.solution = check_eol_solution(inst_, sol);
      endpoints_.push_back(e);
    }
  }
}

std::vector<int> BrouwerField::candidates(std::span<const double> x) const {
  const int m = chain_.m();
  const double sh = profile_.sqrt_h();
  const double reach = sh + 3 * profile_.h + 1e-9;  // max distance of influence from a segment
  std::vector<int> out{0};
  if (chain_.segments()[0].next >= 0) out.push_back(chain_.segments()[0].next);
  double e4 = 0;
  for (int c = 0; c < m; ++c) e4 += x[3 * m + c] * x[3 * m + c];
  e4 = std::sqrt(e4 / (4.0 * m));
  if (e4 > reach) return out;

  const int W = static_cast<int>(chain_.word_vertices().size());
  std::vector<double> d1(W), d2(W);
  double min1 = kInf, min2 = kInf;
  for (int w = 0; w < W; ++w) {
    const auto& word = chain_.word(w);
    double a = 0, b = 0;
    for (int c = 0; c < m; ++c) {
      double u = x[c] - word[c], v = x[m + c] - word[c];
      a += u * u;
      b += v * v;
    }
    d1[w] = std::sqrt(a / m);
    d2[w] = std::sqrt(b / m);
    min1 = std::min(min1, d1[w]);
    min2 = std::min(min2, d2[w]);
  }
  const double band = 4 * (2 * reach) + kSlack;  // block norm is twice the full norm
  for (int w = 0; w < W; ++w) {
    if (d1[w] > min1 + band && d2[w] > min2 + band) continue;
    for (int k : chain_.incident(w)) {
      out.push_back(k);
      const auto& sg = chain_.segments()[k];
      if (sg.prev >= 0) out.push_back(sg.prev);
      if (sg.next >= 0) out.push_back(sg.next);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Evaluation BrouwerField::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) throw std::invalid_argument("point dimension mismatch");
  auto cand = candidates(x);
  return evaluate_region(chain_, cand, CoordView{all_coords_, x}, profile_);
}

GeometryLocation BrouwerField::locate(std::span<const double> x) const {
  return evaluate(x).location;
}

Point BrouwerField::z_of(const GeometryLocation& loc) const {
  Point z(dim(), 0.0);
  for (int i = 0; i < dim(); ++i) z[i] = z_value(chain_, loc.z, i);
  return z;
}

Point BrouwerField::g_hat(std::span<const double> x) const {
  auto ev = evaluate(x);
  Point g(dim());
  for (int i = 0; i < dim(); ++i) g[i] = blend_component(chain_, ev.blend, i, x[i]);
  return g;
}

Point BrouwerField::g(std::span<const double> x) const {
  Point gh = g_hat(x);
  for (int i = 0; i < dim(); ++i) gh[i] = std::clamp(x[i] + gh[i], -1.0, 2.0) - x[i];
  return gh;
}

Point BrouwerField::f(std::span<const double> x) const {
  Point gh = g_hat(x);
  for (int i = 0; i < dim(); ++i) gh[i] = std::clamp(x[i] + gh[i], -1.0, 2.0);
  return gh;
}

double BrouwerField::residual(std::span<const double> x) const { return normalized_norm(g(x)); }

double BrouwerField::truncated_fraction(std::span<const double> x) const {
  Point gh = g_hat(x);
  int cut = 0;
  for (int i = 0; i < dim(); ++i) {
    double y = x[i] + gh[i];
    if (y < -1.0 || y > 2.0) ++cut;
  }
  return double(cut) / dim();
}

Point BrouwerField::endpoint_point(const Endpoint& e) const {
  const auto& sg = chain_.segments().at(e.segment);
  return chain_.point(e.at_end ? sg.t : sg.s);
}

double BrouwerField::distance_to_endpoints(std::span<const double> x) const {
  double best = kInf;
  for (const auto& e : endpoints_) {
    const auto& sg = chain_.segments()[e.segment];
    const PointSpec& p = e.at_end ? sg.t : sg.s;
    double s = 0;
    for (int i = 0; i < dim(); ++i) {
      double d = x[i] - chain_.value(p, i);
      s += d * d;
    }
    best = std::min(best, std::sqrt(s / dim()));
  }
  return best;
}

Point BrouwerField::fixed_point_seed(const Endpoint& e) const {
  const auto& sg = chain_.segments().at(e.segment);
  const double sh = profile_.sqrt_h();
  double arc = e.at_end ? sg.length - sh / 3 : sh / 3;
  Point x = chain_.point_on(e.segment, arc / sg.length);
  // sit h above the segment along the special direction (unit vector 2*e4)
  if (sg.block != 3)
    for (int c = 0; c < m(); ++c) x[3 * m() + c] += 2 * profile_.h;
  return x;
}

// ---- checks -----------------------------------------------------------------

double segment_distance(const BrouwerChain& ch, int a, int b) {
  const auto& A = ch.segments()[a];
  const auto& B = ch.segments()[b];
  const int n = ch.dim();
  // f(al, be) = |w + al d1 - be d2|^2 with w = s1 - s2
  double dd1 = 0, dd2 = 0, d12 = 0, wd1 = 0, wd2 = 0, ww = 0;
  for (int i = 0; i < n; ++i) {
    double s1 = ch.value(A.s, i), s2 = ch.value(B.s, i);
    double d1 = ch.value(A.t, i) - s1, d2 = ch.value(B.t, i) - s2;
    double w = s1 - s2;
    dd1 += d1 * d1;
    dd2 += d2 * d2;
    d12 += d1 * d2;
    wd1 += w * d1;
    wd2 += w * d2;
    ww += w * w;
  }
  auto val = [&](double al, double be) {
    return ww + al * al * dd1 + be * be * dd2 + 2 * al * wd1 - 2 * be * wd2 - 2 * al * be * d12;
  };
  double best = kInf;
  // edges of the unit square, optimizing the free variable
  for (double al : {0.0, 1.0}) {
    double be = dd2 > 0 ? std::clamp((wd2 + al * d12) / dd2, 0.0, 1.0) : 0.0;
    best = std::min(best, val(al, be));
  }
  for (double be : {0.0, 1.0}) {
    double al = dd1 > 0 ? std::clamp((be * d12 - wd1) / dd1, 0.0, 1.0) : 0.0;
    best = std::min(best, val(al, be));
  }
  double det = dd1 * dd2 - d12 * d12;
  if (det > 1e-15) {
    double al = (d12 * wd2 - dd2 * wd1) / det;
    double be = (dd1 * wd2 - d12 * wd1) / det;
    if (al >= 0 && al <= 1 && be >= 0 && be <= 1) best = std::min(best, val(al, be));
  }
  return std::sqrt(std::max(0.0, best) / n);
}

SeparationReport check_separation(const BrouwerChain& ch) {
  SeparationReport r;
  r.min_distance = kInf;
  const auto& segs = ch.segments();
  for (int a = 0; a < static_cast<int>(segs.size()); ++a)
    for (int b = a + 1; b < static_cast<int>(segs.size()); ++b) {
      if (segs[a].next == b || segs[b].next == a) continue;
      ++r.pairs;
      double d = segment_distance(ch, a, b);
      if (d < r.min_distance) {
        r.min_distance = d;
        r.seg_a = a;
        r.seg_b = b;
      }
    }
  return r;
}

Point random_cube_point(int dim, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  Point x(dim);
  for (auto& v : x) v = u(rng);
  return x;
}

namespace {

Point random_unit(int dim, Rng& rng) {
  std::normal_distribution<double> nd;
  Point u(dim);
  for (auto& v : u) v = nd(rng);
  double n = normalized_norm(u);
  for (auto& v : u) v /= n;
  return u;
}

// Random unit vector orthogonal to the segment direction.
Point random_perp(const BrouwerChain& ch, int seg, Rng& rng) {
  Point u = random_unit(ch.dim(), rng);
  double dot = 0;
  for (int i = 0; i < ch.dim(); ++i) dot += u[i] * ch.direction(seg, i);
  dot /= ch.dim();
  for (int i = 0; i < ch.dim(); ++i) u[i] -= dot * ch.direction(seg, i);
  double n = normalized_norm(u);
  for (auto& v : u) v /= n;
  return u;
}

void clamp_cube(Point& x) {
  for (auto& v : x) v = std::clamp(v, -1.0, 2.0);
}

}  // namespace

LipschitzReport check_lipschitz(const BrouwerField& field, int samples, Rng& rng,
                                int boundary_samples) {
  if (samples < 1) throw std::invalid_argument("sample count must be positive");
  if (boundary_samples < 0) boundary_samples = std::max(1, samples / 10);
  const auto& ch = field.chain();
  const int dim = field.dim(), m = field.m();
  const double h = field.profile().h, sh = field.profile().sqrt_h();
  const int nseg = static_cast<int>(ch.segments().size());
  LipschitzReport rep;

  auto measure = [&](const Point& x, const Point& y) {
    double dxy = normalized_distance(x, y);
    if (dxy <= 0) return;
    Point gx = field.g(x), gy = field.g(y);
    double dg = normalized_distance(gx, gy);
    rep.lipschitz = std::max(rep.lipschitz, dg / dxy);
    for (int i = 0; i < dim; ++i) {
      double den = std::max(std::abs(x[i] - y[i]), dxy);
      rep.coordinatewise = std::max(rep.coordinatewise, std::abs(gx[i] - gy[i]) / den);
    }
    ++rep.pairs;
  };
  auto partner = [&](const Point& x, double scale) {
    Point u = random_unit(dim, rng);
    Point y = x;
    for (int i = 0; i < dim; ++i) y[i] += scale * u[i];
    clamp_cube(y);
    return y;
  };
  std::uniform_real_distribution<double> U(0.0, 1.0);

  for (int s = 0; s < samples; ++s) {
    int type = static_cast<int>(uniform_below(rng, 4));
    Point x;
    double scale = 1e-3 * h;
    if (type == 0) {
      x = random_cube_point(dim, rng);
      scale = std::pow(10.0, -7 + 6 * U(rng));
    } else {
      int k = static_cast<int>(uniform_below(rng, nseg));
      const auto& sg = ch.segments()[k];
      double arc;
      if (type == 1) {
        arc = U(rng) * sg.length;
      } else if (type == 2) {
        arc = sg.length - sh * (1.2 * U(rng));  // corner or end window
      } else {
        arc = sh * (1.2 * U(rng));  // start window or incoming corner
      }
      x = ch.point_on(k, arc / sg.length);
      Point p = random_perp(ch, k, rng);
      double r = (type == 1) ? h * (1 + static_cast<int>(uniform_below(rng, 3))) *
                                   (1 + 0.02 * (U(rng) - 0.5))
                             : 3.5 * h * U(rng);
      for (int i = 0; i < dim; ++i) x[i] += r * p[i];
      clamp_cube(x);
    }
    measure(x, partner(x, scale));
  }

  // straddle the picture boundary
  const auto& first = ch.segments()[0];
  (void)first;
  for (int s = 0; s < boundary_samples; ++s) {
    Point x;
    if (s % 2 == 0) {
      x = random_cube_point(dim, rng);
      for (int c = 0; c < m; ++c) x[3 * m + c] = U(rng);
    } else {
      x = ch.point_on(0, 0.75);  // x4 = 1/2 on the first segment
      Point p = random_perp(ch, 0, rng);
      double r = 4 * h * U(rng);
      for (int i = 0; i < dim; ++i) x[i] += r * p[i];
    }
    double mean = 0;
    for (int c = 0; c < m; ++c) mean += x[3 * m + c];
    mean /= m;
    for (int c = 0; c < m; ++c) x[3 * m + c] += 0.5 - 1e-9 - mean;
    Point y = x;
    for (int c = 0; c < m; ++c) y[3 * m + c] += 2e-9;
    double gap = normalized_distance(field.g(x), field.g(y));
    rep.boundary_gap = std::max(rep.boundary_gap, gap);
    measure(x, y);
  }
  return rep;
}

FixedPointResult find_fixed_point(const BrouwerField& field, const Endpoint& e) {
  const auto& ch = field.chain();
  const int dim = field.dim(), m = field.m();
  const auto& sg = ch.segments().at(e.segment);
  std::vector<Point> basis;
  Point d(dim);
  for (int i = 0; i < dim; ++i) d[i] = ch.direction(e.segment, i);
  basis.push_back(d);
  if (sg.block != 3) {
    Point u(dim, 0.0);
    for (int c = 0; c < m; ++c) u[3 * m + c] = 2.0;
    basis.push_back(u);
  }
  const int k = static_cast<int>(basis.size());
  const Point x0 = field.fixed_point_seed(e);

  auto at = [&](const std::vector<double>& th) {
    Point x = x0;
    for (int a = 0; a < k; ++a)
      for (int i = 0; i < dim; ++i) x[i] += th[a] * basis[a][i];
    return x;
  };
  auto proj = [&](const std::vector<double>& th) {
    Point g = field.g(at(th));
    std::vector<double> r(k, 0.0);
    for (int a = 0; a < k; ++a) {
      for (int i = 0; i < dim; ++i) r[a] += g[i] * basis[a][i];
      r[a] /= dim;
    }
    return r;
  };
  auto norm = [](const std::vector<double>& r) {
    double s = 0;
    for (double v : r) s += v * v;
    return std::sqrt(s);
  };

  std::vector<double> th(k, 0.0);
  auto r = proj(th);
  int it = 0;
  const double step = 1e-9;
  for (; it < 100 && norm(r) > 1e-18; ++it) {
    // finite-difference Jacobian
    std::vector<std::vector<double>> J(k, std::vector<double>(k));
    for (int b = 0; b < k; ++b) {
      auto tp = th, tm = th;
      tp[b] += step;
      tm[b] -= step;
      auto rp = proj(tp), rm = proj(tm);
      for (int a = 0; a < k; ++a) J[a][b] = (rp[a] - rm[a]) / (2 * step);
    }
    std::vector<double> dth(k);
    if (k == 1) {
      if (J[0][0] == 0) break;
      dth[0] = -r[0] / J[0][0];
    } else {
      double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
      if (det == 0) break;
      dth[0] = (-r[0] * J[1][1] + r[1] * J[0][1]) / det;
      dth[1] = (-r[1] * J[0][0] + r[0] * J[1][0]) / det;
    }
    double t = 1.0, n0 = norm(r);
    std::vector<double> cand;
    std::vector<double> rc;
    for (;;) {
      cand = th;
      for (int a = 0; a < k; ++a) cand[a] += t * dth[a];
      rc = proj(cand);
      if (norm(rc) < n0 || t < 1e-6) break;
      t /= 2;
    }
    if (norm(rc) >= n0) break;
    th = cand;
    r = rc;
  }
  FixedPointResult res;
  res.x = at(th);
  res.residual = field.residual(res.x);
  res.iterations = it;
  return res;
}

EolSolution decode_fixed_point(const BrouwerField& field, std::span<const double> x,
                               double tolerance) {
  if (static_cast<int>(x.size()) != field.dim())
    throw std::invalid_argument("point dimension mismatch");
  double res = field.residual(x);
  if (res > tolerance) {
    std::ostringstream os;
    os << "residual " << res << " exceeds tolerance " << tolerance;
    throw std::runtime_error(os.str());
  }
  const int m = field.m();
  const double sh = field.profile().sqrt_h();
  auto r1 = nearest_codeword(field.code(), x.subspan(0, m), 8 * sh, 25 * sh);
  auto r2 = nearest_codeword(field.code(), x.subspan(m, m), 8 * sh, 25 * sh);
  if (r1.status != DecodeStatus::kDecoded || r2.status != DecodeStatus::kDecoded ||
      r1.message != r2.message)
    throw std::runtime_error("decoding ambiguous: blocks 1-2 do not name a single vertex");
  const auto& host = *field.instance().host;
  VertexId v = host.vertex_of(Label{r1.message, host.label_width()});
  auto loc = field.locate(x);
  if (loc.classification != Classification::kNearEndpoint)
    throw std::runtime_error("fixed point is not at a path endpoint (" +
                             to_string(loc.classification) + ")");
  for (const auto& e : field.endpoints()) {
    if (e.segment != loc.segments.at(0)) continue;
    if (e.vertex != v) throw std::runtime_error("decoded vertex disagrees with path endpoint");
    if (!e.solution) throw std::runtime_error("path endpoint is not an EoL solution");
    auto again = check_eol_solution(field.instance(), e.solution->vertex);
    if (!again || !(*again == *e.solution)) throw std::runtime_error("solution failed recheck");
    return *again;
  }
  throw std::runtime_error("no path endpoint on the located segment");
}

std::string write_point(const Point& x, int m, double grid_step) {
  if (static_cast<int>(x.size()) != 4 * m) throw std::invalid_argument("point dimension mismatch");
  std::string out = "point v1 m=" + std::to_string(m) + "\n";
  char buf[64];
  for (double v : x) {
    std::snprintf(buf, sizeof buf, "%.17g\n", snap_to_grid(v, grid_step));
    out += buf;
  }
  return out;
}

Point read_point(const std::string& text, int* m_out) {
  std::istringstream in(text);
  std::string magic, version, mtok;
  in >> magic >> version >> mtok;
  if (magic != "point" || version != "v1" || mtok.rfind("m=", 0) != 0)
    throw std::runtime_error("bad point header");
  int m = std::stoi(mtok.substr(2));
  if (m <= 0) throw std::runtime_error("bad point dimension");
  Point x(4 * m);
  for (auto& v : x)
    if (!(in >> v)) throw std::runtime_error("point file truncated");
  std::string extra;
  if (in >> extra) throw std::runtime_error("trailing data in point file");
  if (m_out) *m_out = m;
  return x;
}

}  // namespace nashlab
