#include "nashlab/locality.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace nashlab {

namespace {

bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

int ipow(int b, int e) {
  long long r = 1;
  for (int i = 0; i < e; ++i) {
    r *= b;
    if (r > (1LL << 30)) throw std::invalid_argument("family too large");
  }
  return static_cast<int>(r);
}

// Bucket of every column for one outcome.
void hash_buckets(int side, int ell, int k, int p, Rng& rng, std::uint8_t* out) {
  std::vector<std::uint64_t> coef(k);
  for (auto& a : coef) a = uniform_below(rng, p);
  std::vector<std::pair<std::uint64_t, int>> keyed(side);
  for (int c = 0; c < side; ++c) {
    std::uint64_t v = 0;
    for (int i = k - 1; i >= 0; --i) v = (v * c + coef[i]) % p;  // Horner
    keyed[c] = {v, c};
  }
  std::sort(keyed.begin(), keyed.end());
  for (int r = 0; r < side; ++r) out[keyed[r].second] = static_cast<std::uint8_t>(r * ell / side);
}

}  // namespace

int SubsetFamily::outcomes() const { return ipow(ell, k); }
int SubsetFamily::count() const { return outcomes() * ell; }

bool SubsetFamily::in_sigma(int j, int index) const {
  int o = j / ell, b = j % ell;
  return col_bucket[static_cast<std::size_t>(o) * side + index % side] == b;
}

bool SubsetFamily::in_tau(int j, int index) const {
  int o = j / ell, b = j % ell;
  return row_bucket[static_cast<std::size_t>(o) * side + index / side] == b;
}

std::vector<int> SubsetFamily::sigma(int j) const {
  if (j < 0 || j >= count()) throw std::out_of_range("subset index");
  std::vector<int> out;
  out.reserve(subset_size());
  for (int i = 0; i < m; ++i)
    if (in_sigma(j, i)) out.push_back(i);
  return out;
}

std::vector<int> SubsetFamily::tau(int j) const {
  if (j < 0 || j >= count()) throw std::out_of_range("subset index");
  std::vector<int> out;
  out.reserve(subset_size());
  for (int i = 0; i < m; ++i)
    if (in_tau(j, i)) out.push_back(i);
  return out;
}

std::vector<int> SubsetFamily::intersection(int sj, int tj) const {
  std::vector<int> out;
  for (int i = 0; i < m; ++i)
    if (in_sigma(sj, i) && in_tau(tj, i)) out.push_back(i);
  return out;
}

SubsetFamily build_subset_families(int m, int ell, int k, std::uint64_t seed) {
  int side = static_cast<int>(std::lround(std::sqrt(double(m))));
  if (m <= 0 || side * side != m) throw std::invalid_argument("m must be a perfect square");
  if (ell < 1 || side % ell != 0) throw std::invalid_argument("ell must divide sqrt(m)");
  if (ell > 255) throw std::invalid_argument("ell too large");
  if (k < 1) throw std::invalid_argument("k must be positive");
  SubsetFamily fam;
  fam.m = m;
  fam.side = side;
  fam.ell = ell;
  fam.k = k;
  fam.seed = seed;
  fam.prime = std::max(2, side);
  while (!is_prime(fam.prime)) ++fam.prime;
  int outcomes = fam.outcomes();
  fam.col_bucket.resize(static_cast<std::size_t>(outcomes) * side);
  fam.row_bucket.resize(static_cast<std::size_t>(outcomes) * side);
  for (int o = 0; o < outcomes; ++o) {
    Rng rs = make_rng(seed, "sigma", o);
    hash_buckets(side, ell, k, fam.prime, rs, &fam.col_bucket[std::size_t(o) * side]);
    Rng rt = make_rng(seed, "tau", o);
    hash_buckets(side, ell, k, fam.prime, rt, &fam.row_bucket[std::size_t(o) * side]);
  }
  return fam;
}

std::string write_family(const SubsetFamily& fam) {
  std::ostringstream out;
  out << "subsets v1 m=" << fam.m << " l=" << fam.ell << " k=" << fam.k << " seed=" << fam.seed
      << "\n";
  for (int which = 0; which < 2; ++which)
    for (int j = 0; j < fam.count(); ++j) {
      out << (which == 0 ? "sigma " : "tau ") << j;
      for (int i : (which == 0 ? fam.sigma(j) : fam.tau(j))) out << ' ' << i;
      out << '\n';
    }
  return out.str();
}

SubsetFamily read_family(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::istringstream hs(line);
  std::string magic, version, tok;
  hs >> magic >> version;
  if (magic != "subsets" || version != "v1") throw std::runtime_error("bad subsets header");
  std::map<std::string, std::string> kv;
  while (hs >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw std::runtime_error("bad subsets header field");
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  for (const char* key : {"m", "l", "k", "seed"})
    if (!kv.count(key)) throw std::runtime_error(std::string("subsets header missing ") + key);
  SubsetFamily fam;
  fam.m = std::stoi(kv["m"]);
  fam.ell = std::stoi(kv["l"]);
  fam.k = std::stoi(kv["k"]);
  fam.seed = std::stoull(kv["seed"]);
  fam.side = static_cast<int>(std::lround(std::sqrt(double(fam.m))));
  if (fam.side * fam.side != fam.m || fam.ell < 1 || fam.side % fam.ell)
    throw std::runtime_error("subsets header inconsistent");
  fam.prime = std::max(2, fam.side);
  while (!is_prime(fam.prime)) ++fam.prime;
  std::size_t cells = std::size_t(fam.outcomes()) * fam.side;
  fam.col_bucket.assign(cells, 0xff);
  fam.row_bucket.assign(cells, 0xff);
  std::uint64_t lines = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string kind;
    int j;
    ls >> kind >> j;
    if ((kind != "sigma" && kind != "tau") || !ls || j < 0 || j >= fam.count())
      throw std::runtime_error("bad subsets line: " + line);
    bool sig = kind == "sigma";
    auto& table = sig ? fam.col_bucket : fam.row_bucket;
    int o = j / fam.ell, b = j % fam.ell, idx, n = 0;
    while (ls >> idx) {
      if (idx < 0 || idx >= fam.m) throw std::runtime_error("subset index out of range");
      int cell = sig ? idx % fam.side : idx / fam.side;
      auto& slot = table[std::size_t(o) * fam.side + cell];
      if (slot != 0xff && slot != b) throw std::runtime_error("subsets are not line unions");
      slot = static_cast<std::uint8_t>(b);
      ++n;
    }
    if (n != fam.subset_size()) throw std::runtime_error("subset has wrong cardinality");
    ++lines;
  }
  if (lines != 2 * std::uint64_t(fam.count())) throw std::runtime_error("subsets file truncated");
  for (auto t : {&fam.col_bucket, &fam.row_bucket})
    for (auto v : *t)
      if (v == 0xff) throw std::runtime_error("subsets do not cover every line");
  return fam;
}

FamilyAudit audit_family(const SubsetFamily& fam) {
  FamilyAudit a;
  const int want = fam.m / fam.ell, want2 = fam.m / (fam.ell * fam.ell);
  auto fail = [&](const std::string& msg) {
    if (a.ok) a.first_failure = msg;
    a.ok = false;
  };
  std::vector<std::vector<int>> S(fam.count()), T(fam.count());
  for (int j = 0; j < fam.count(); ++j) {
    S[j] = fam.sigma(j);
    T[j] = fam.tau(j);
    if (static_cast<int>(S[j].size()) != want) fail("sigma " + std::to_string(j) + " size");
    if (static_cast<int>(T[j].size()) != want) fail("tau " + std::to_string(j) + " size");
    a.subsets_checked += 2;
  }
  std::vector<int> tmp;
  for (int i = 0; i < fam.count(); ++i)
    for (int j = 0; j < fam.count(); ++j) {
      tmp.clear();
      std::set_intersection(S[i].begin(), S[i].end(), T[j].begin(), T[j].end(),
                            std::back_inserter(tmp));
      if (static_cast<int>(tmp.size()) != want2)
        fail("intersection sigma " + std::to_string(i) + " tau " + std::to_string(j));
      ++a.pairs_checked;
    }
  return a;
}

// ---- doubly-local evaluation -----------------------------------------------

std::vector<VertexNeighbourhood> merge_vertex_info(
    const std::array<std::optional<VertexNeighbourhood>, 2>& info, bool strict) {
  std::vector<VertexNeighbourhood> known;
  if (info[0]) known.push_back(*info[0]);
  if (info[1]) {
    if (info[0] && info[0]->v == info[1]->v) {
      if (info[0]->succ != info[1]->succ || info[0]->pred != info[1]->pred)
        throw std::invalid_argument("vertex info disagrees for the same vertex");
    } else {
      if (info[0] && strict) {
        const auto& a = *info[0];
        const auto& b = *info[1];
        bool adjacent = (a.succ && *a.succ == b.v) || (a.pred && *a.pred == b.v) ||
                        (b.succ && *b.succ == a.v) || (b.pred && *b.pred == a.v);
        if (!adjacent) throw std::invalid_argument("decoded vertices are neither identical nor adjacent");
      }
      known.push_back(*info[1]);
    }
  }
  return known;
}

namespace {

std::vector<int> view_coords(int m, std::span<const int> T) {
  std::vector<int> c;
  c.reserve(4 * T.size());
  for (int b = 0; b < 4; ++b)
    for (int t : T) {
      if (t < 0 || t >= m) throw std::invalid_argument("subset index out of range");
      c.push_back(b * m + t);
    }
  return c;
}

}  // namespace

LocalEvaluator::LocalEvaluator(const VertexCode& code, const ConstantsProfile& profile,
                               const std::array<std::optional<VertexNeighbourhood>, 2>& info,
                               std::span<const int> T, std::span<const double> partial,
                               bool strict)
    : chain_(code, merge_vertex_info(info, strict)) {
  if (T.empty()) throw std::invalid_argument("empty coordinate subset");
  if (partial.size() != 4 * T.size()) throw std::invalid_argument("partial vector must have length 4|T|");
  auto coords = view_coords(code.m(), T);
  std::vector<int> cand(chain_.segments().size());
  std::iota(cand.begin(), cand.end(), 0);
  eval_ = evaluate_region(chain_, cand, CoordView{coords, partial}, profile);
}

double LocalEvaluator::g_hat(int i, double x_i) const {
  if (i < 0 || i >= chain_.dim()) throw std::out_of_range("coordinate index");
  return blend_component(chain_, eval_.blend, i, x_i);
}

double LocalEvaluator::f(int i, double x_i) const {
  return std::clamp(x_i + g_hat(i, x_i), -1.0, 2.0);
}

double doubly_local_eval(const VertexCode& code, const ConstantsProfile& profile, int i,
                         double x_i, const std::array<std::optional<VertexNeighbourhood>, 2>& info,
                         std::span<const int> T, std::span<const double> partial) {
  return LocalEvaluator(code, profile, info, T, partial).f(i, x_i);
}

std::array<std::optional<VertexNeighbourhood>, 2> decode_vertex_info(const BrouwerField& field,
                                                                     std::span<const double> x) {
  const int m = field.m();
  const double sh = field.profile().sqrt_h();
  const auto& inst = field.instance();
  std::array<std::optional<VertexNeighbourhood>, 2> info;
  for (int r = 0; r < 2; ++r) {
    auto d = nearest_codeword(field.code(), x.subspan(r * m, m), 8 * sh, 25 * sh);
    if (d.status != DecodeStatus::kDecoded) continue;
    VertexId v = inst.host->vertex_of(Label{d.message, inst.host->label_width()});
    info[r] = VertexNeighbourhood{v, successor(inst, v), predecessor(inst, v)};
  }
  return info;
}

std::vector<double> restrict_point(std::span<const double> x, int m, std::span<const int> T) {
  if (static_cast<int>(x.size()) != 4 * m) throw std::invalid_argument("point dimension mismatch");
  std::vector<double> out;
  out.reserve(4 * T.size());
  for (int b = 0; b < 4; ++b)
    for (int t : T) out.push_back(x[b * m + t]);
  return out;
}

ConcentrationReport concentration_check(const SubsetFamily& fam, std::span<const double> values,
                                        std::uint64_t trials, double threshold, Rng& rng,
                                        bool use_tau) {
  if (static_cast<int>(values.size()) != fam.m) throw std::invalid_argument("values must have length m");
  ConcentrationReport r;
  r.trials = trials;
  r.mean = std::accumulate(values.begin(), values.end(), 0.0) / fam.m;
  for (std::uint64_t t = 0; t < trials; ++t) {
    int j = static_cast<int>(uniform_below(rng, fam.count()));
    double s = 0;
    int n = 0;
    for (int i = 0; i < fam.m; ++i)
      if (use_tau ? fam.in_tau(j, i) : fam.in_sigma(j, i)) {
        s += values[i];
        ++n;
      }
    double dev = std::abs(s / n - r.mean);
    r.max_deviation = std::max(r.max_deviation, dev);
    if (dev > threshold) ++r.exceed;
  }
  r.frequency = trials ? double(r.exceed) / trials : 0.0;
  return r;
}

}  // namespace nashlab
