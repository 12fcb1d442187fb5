#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace nashlab {

// Small-constant hierarchy plus the payoff weights. Loaded from JSON and
// checked on load; construct directly only in tests.
struct ConstantsProfile {
  std::string name = "desk";
  double eps_nash = 1e-14;
  double eps_precision = 1e-13;
  double eps_uniform = 1e-12;
  double eps_brouwer = 1e-11;
  double delta = 1e-5;
  double h = 1e-4;
  double lambda_v = 1e-1;
  double lambda_alpha = 1e-3;
  double lambda_j = 1e-1;
  double lambda_x = 1e-3;

  double eta() const { return 2.0 * std::sqrt(h); }
  double sqrt_h() const { return std::sqrt(h); }

  // Human-readable list of violated constraints; empty when valid.
  std::vector<std::string> violations() const;
  void validate() const;  // throws std::invalid_argument

  static ConstantsProfile desk();
  static ConstantsProfile from_json_text(const std::string& text);
  static ConstantsProfile load(const std::string& path);
  std::string to_json_text() const;
};

// Snap to the precision grid and clamp into the cube range [-1,2].
double snap_to_grid(double value, double step);

}  // namespace nashlab
