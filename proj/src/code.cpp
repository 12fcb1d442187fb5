#include "nashlab/code.hpp"

#include <bit>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "nashlab/rng.hpp"

namespace nashlab {

std::uint64_t LinearCode::encode_half(std::uint64_t message) const {
  if (n2 < 64 && (message >> n2)) throw std::invalid_argument("message longer than n/2 bits");
  std::uint64_t c = 0;
  for (int i = 0; i < n2; ++i)
    if ((message >> i) & 1) c ^= rows[i];
  return c;
}

int certify_min_weight(const std::vector<std::uint64_t>& rows, int message_bits) {
  if (message_bits == 0) return std::numeric_limits<int>::max();
  // Gray-code walk: one row xor per message
  std::uint64_t c = 0;
  int best = std::numeric_limits<int>::max();
  std::uint64_t total = std::uint64_t{1} << message_bits;
  for (std::uint64_t i = 1; i < total; ++i) {
    c ^= rows[std::countr_zero(i)];
    best = std::min(best, std::popcount(c));
  }
  return best;
}

LinearCode LinearCode::generate(int n2, int real_bits, std::uint64_t seed, double min_relative,
                                int min_effective) {
  if (n2 < 1 || 4 * n2 > 64 || real_bits > n2 || real_bits < 0)
    throw std::invalid_argument("code needs 1 <= n2 <= 16 and real_bits <= n2");
  LinearCode code;
  code.n2 = n2;
  code.m2 = 4 * n2;
  code.real_bits = real_bits;
  code.seed = seed;
  const std::uint64_t mask = code.m2 == 64 ? ~0ULL : (std::uint64_t{1} << code.m2) - 1;
  for (std::uint64_t attempt = 0; attempt < 100000; ++attempt) {
    Rng rng = make_rng(seed, "code", attempt);
    code.rows.assign(n2, 0);
    for (auto& r : code.rows) r = rng() & mask;
    code.effective_distance = certify_min_weight(code.rows, real_bits);
    if (code.effective_distance < min_effective) continue;
    code.distance = certify_min_weight(code.rows, n2);
    if (code.distance >= min_relative * code.m2) return code;
  }
  throw std::runtime_error("no code met the distance targets");
}

int padded_block_length(int n, int ell) {
  if (n < 1 || ell < 1) throw std::invalid_argument("n and ell must be positive");
  int step = std::lcm(ell, 4);
  for (int s = step;; s += step)
    if (s * s >= 4 * n) return s * s;
}

std::vector<std::uint8_t> VertexCode::encode_full(std::uint64_t label) const {
  if (label >> n()) throw std::invalid_argument("label longer than n bits");
  std::vector<std::uint8_t> out(m());
  std::uint64_t a = half.encode_half(half_a(label)), b = half.encode_half(half_b(label));
  for (int c = 0; c < half.m2; ++c) {
    out[c] = half.bit(a, c);
    out[half.m2 + c] = half.bit(b, c);
  }
  return out;
}

double VertexCode::min_separation() const {
  return std::sqrt(double(half.effective_distance) / m());
}

int required_effective_distance(int m, const ConstantsProfile& profile) {
  // codewords of distinct vertices must sit further apart than the inner and
  // outer bands combined, plus the eta margin
  double need = 33 * profile.sqrt_h() + profile.eta();
  return static_cast<int>(std::floor(need * need * m)) + 1;
}

VertexCode VertexCode::build(int n, int ell, std::uint64_t seed, const ConstantsProfile& profile,
                             int na) {
  if (na < 0) na = n / 2;
  int nb = n - na;
  int m = padded_block_length(std::max(n, 2 * std::max(na, nb)), ell);
  int n2 = m / 8;
  VertexCode vc;
  vc.na = na;
  vc.nb = nb;
  vc.half = LinearCode::generate(n2, std::max(na, nb), seed, 0.1,
                                 required_effective_distance(m, profile));
  return vc;
}

namespace {

double half_distance_sq(const LinearCode& code, std::uint64_t cw, const double* y) {
  double s = 0;
  for (int c = 0; c < code.m2; ++c) {
    double d = y[c] - (code.bit(cw, c) ? 1.0 : 0.0);
    s += d * d;
  }
  return s;
}

DecodeResult classify(std::uint64_t msg, double dist, double inner, double outer) {
  DecodeResult r;
  r.message = msg;
  r.distance = dist;
  if (dist < inner) r.status = DecodeStatus::kDecoded;
  else if (dist > outer) r.status = DecodeStatus::kBottom;
  else r.status = DecodeStatus::kAmbiguous;
  return r;
}

}  // namespace

DecodeResult nearest_half(const LinearCode& code, std::span<const double> y, int message_bits,
                          double inner, double outer) {
  if (static_cast<int>(y.size()) != code.m2) throw std::invalid_argument("vector length mismatch");
  if (!(inner < outer)) throw std::invalid_argument("inner radius must be below outer radius");
  double best = std::numeric_limits<double>::infinity();
  std::uint64_t arg = 0;
  for (std::uint64_t msg = 0; msg < (std::uint64_t{1} << message_bits); ++msg) {
    double d = half_distance_sq(code, code.encode_half(msg), y.data());
    if (d < best) {
      best = d;
      arg = msg;
    }
  }
  return classify(arg, std::sqrt(best / code.m2), inner, outer);
}

DecodeResult nearest_codeword(const VertexCode& vc, std::span<const double> y, double inner,
                              double outer) {
  if (static_cast<int>(y.size()) == vc.half.m2)
    return nearest_half(vc.half, y, std::max(vc.na, vc.nb), inner, outer);
  if (static_cast<int>(y.size()) != vc.m()) throw std::invalid_argument("vector length mismatch");
  if (!(inner < outer)) throw std::invalid_argument("inner radius must be below outer radius");
  // the squared distance splits over the halves, so each half decodes alone
  auto best_half = [&](const double* yy, int bits, std::uint64_t& arg) {
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t msg = 0; msg < (std::uint64_t{1} << bits); ++msg) {
      double d = half_distance_sq(vc.half, vc.half.encode_half(msg), yy);
      if (d < best) {
        best = d;
        arg = msg;
      }
    }
    return best;
  };
  std::uint64_t a = 0, b = 0;
  double da = best_half(y.data(), vc.na, a);
  double db = best_half(y.data() + vc.half.m2, vc.nb, b);
  return classify((a << vc.nb) | b, std::sqrt((da + db) / vc.m()), inner, outer);
}

std::string write_code(const LinearCode& code) {
  std::ostringstream out;
  out << "code v1 n2=" << code.n2 << " m2=" << code.m2 << " dist=" << code.distance
      << " seed=" << code.seed << " real=" << code.real_bits << "\n";
  int digits = (code.m2 + 3) / 4;
  for (auto r : code.rows) out << std::hex << std::setw(digits) << std::setfill('0') << r << "\n";
  return out.str();
}

LinearCode read_code(const std::string& text) {
  std::istringstream in(text);
  std::string line, magic, version, tok;
  std::getline(in, line);
  std::istringstream hs(line);
  hs >> magic >> version;
  if (magic != "code" || version != "v1") throw std::runtime_error("bad code header");
  LinearCode code;
  int dist = -1;
  while (hs >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "n2") code.n2 = std::stoi(val);
    else if (key == "m2") code.m2 = std::stoi(val);
    else if (key == "dist") dist = std::stoi(val);
    else if (key == "seed") code.seed = std::stoull(val);
    else if (key == "real") code.real_bits = std::stoi(val);
  }
  while (std::getline(in, line))
    if (!line.empty()) code.rows.push_back(std::stoull(line, nullptr, 16));
  if (static_cast<int>(code.rows.size()) != code.n2) throw std::runtime_error("code row count mismatch");
  code.distance = certify_min_weight(code.rows, code.n2);
  code.effective_distance = certify_min_weight(code.rows, code.real_bits);
  if (code.distance != dist) throw std::runtime_error("stored distance certificate does not match");
  return code;
}

}  // namespace nashlab
