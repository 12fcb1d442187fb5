#include "nashlab/profile.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace nashlab {

std::vector<std::string> ConstantsProfile::violations() const {
  std::vector<std::string> out;
  const double chain[] = {eps_nash, eps_precision, eps_uniform, eps_brouwer,
                          delta,    h,             1.0};
  const char* names[] = {"eps_nash", "eps_precision", "eps_uniform",
                         "eps_brouwer", "delta", "h", "1"};
  for (int i = 0; i < 6; ++i) {
    if (!(chain[i] > 0)) out.push_back(std::string(names[i]) + " must be positive");
    // ratio checked with a relative slack so exact powers of ten pass
    if (chain[i] * 10.0 > chain[i + 1] * (1 + 1e-9))
      out.push_back(std::string(names[i]) + " * 10 > " + names[i + 1]);
  }
  if (eps_brouwer * 10.0 > delta * delta * (1 + 1e-9))
    out.push_back("eps_brouwer not << delta^2");
  if (eps_brouwer * 10.0 > h * (1 + 1e-9)) out.push_back("eps_brouwer not << h");
  if (!(lambda_v > 0 && lambda_alpha > 0 && lambda_j > 0 && lambda_x > 0))
    out.push_back("lambda weights must be positive");
  if (!(lambda_v / 2 > eps_nash + std::max(lambda_alpha, 9 * lambda_x)))
    out.push_back("lambda_v/2 <= eps_nash + max(lambda_alpha, 9 lambda_x)");
  // decoding bands 8 sqrt(h) and 25 sqrt(h) must fit inside a unit block
  if (33 * sqrt_h() + eta() >= 1.0) out.push_back("h too large for decoding bands");
  return out;
}

void ConstantsProfile::validate() const {
  auto v = violations();
  if (v.empty()) return;
  std::string msg = "invalid constants profile '" + name + "':";
  for (auto& s : v) msg += " [" + s + "]";
  throw std::invalid_argument(msg);
}

ConstantsProfile ConstantsProfile::desk() { return ConstantsProfile{}; }

ConstantsProfile ConstantsProfile::from_json_text(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  ConstantsProfile p;
  p.name = j.value("name", p.name);
  p.eps_nash = j.at("eps_nash").get<double>();
  p.eps_precision = j.at("eps_precision").get<double>();
  p.eps_uniform = j.at("eps_uniform").get<double>();
  p.eps_brouwer = j.at("eps_brouwer").get<double>();
  p.delta = j.at("delta").get<double>();
  p.h = j.at("h").get<double>();
  p.lambda_v = j.at("lambda_v").get<double>();
  p.lambda_alpha = j.at("lambda_alpha").get<double>();
  p.lambda_j = j.at("lambda_j").get<double>();
  p.lambda_x = j.at("lambda_x").get<double>();
  p.validate();
  return p;
}

ConstantsProfile ConstantsProfile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string ConstantsProfile::to_json_text() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["eps_nash"] = eps_nash;
  j["eps_precision"] = eps_precision;
  j["eps_uniform"] = eps_uniform;
  j["eps_brouwer"] = eps_brouwer;
  j["delta"] = delta;
  j["h"] = h;
  j["lambda_v"] = lambda_v;
  j["lambda_alpha"] = lambda_alpha;
  j["lambda_j"] = lambda_j;
  j["lambda_x"] = lambda_x;
  return j.dump(2) + "\n";
}

double snap_to_grid(double value, double step) {
  double v = std::min(2.0, std::max(-1.0, value));
  double s = std::nearbyint(v / step) * step;
  return std::min(2.0, std::max(-1.0, s));
}

}  // namespace nashlab
