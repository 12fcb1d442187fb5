#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nashlab/brouwer.hpp"
#include "nashlab/code.hpp"
#include "nashlab/profile.hpp"
#include "nashlab/rng.hpp"

namespace nashlab {

// sigma_j / tau_j for j = outcome * ell + bucket. Coordinates of [m] sit on a
// row-major side x side grid (index = row * side + col); sigma subsets are
// unions of columns, tau subsets unions of rows.
struct SubsetFamily {
  int m = 0;
  int side = 0;
  int ell = 0;
  int k = 0;
  std::uint64_t seed = 0;
  int prime = 0;
  std::vector<std::uint8_t> col_bucket;  // [outcome * side + col]
  std::vector<std::uint8_t> row_bucket;  // [outcome * side + row]

  int outcomes() const;  // ell^k
  int count() const;     // ell^(k+1)
  int subset_size() const { return m / ell; }

  bool in_sigma(int j, int index) const;
  bool in_tau(int j, int index) const;
  std::vector<int> sigma(int j) const;  // sorted
  std::vector<int> tau(int j) const;    // sorted
  std::vector<int> intersection(int sigma_j, int tau_j) const;
};

// k-wise independent hashing of the side columns (rows) into ell equal
// buckets: a random degree-(k-1) polynomial over F_p per outcome, then the
// columns are ranked by hash value (ties by column) and cut into ell runs.
SubsetFamily build_subset_families(int m, int ell, int k, std::uint64_t seed);

std::string write_family(const SubsetFamily& fam);
SubsetFamily read_family(const std::string& text);

struct FamilyAudit {
  bool ok = true;
  std::uint64_t subsets_checked = 0;
  std::uint64_t pairs_checked = 0;
  std::string first_failure;
};
// Exhaustive cardinality and bichromatic-intersection check.
FamilyAudit audit_family(const SubsetFamily& fam);

// f_i estimated from x_i, the values of x on [4] x T and what is known about
// the (at most two) decoded vertices. Partial values are block-major:
// partial[b * |T| + q] is x at coordinate b*m + T[q].
class LocalEvaluator {
 public:
  LocalEvaluator(const VertexCode& code, const ConstantsProfile& profile,
                 const std::array<std::optional<VertexNeighbourhood>, 2>& info,
                 std::span<const int> T, std::span<const double> partial, bool strict = true);

  double g_hat(int i, double x_i) const;
  double f(int i, double x_i) const;  // truncated into [-1,2]
  const GeometryLocation& location() const { return eval_.location; }
  const BrouwerChain& chain() const { return chain_; }

 private:
  BrouwerChain chain_;
  Evaluation eval_;
};

// Known vertices implied by the info pair; when strict, throws
// std::invalid_argument if the two are neither identical nor adjacent.
std::vector<VertexNeighbourhood> merge_vertex_info(
    const std::array<std::optional<VertexNeighbourhood>, 2>& info, bool strict = true);

double doubly_local_eval(const VertexCode& code, const ConstantsProfile& profile, int i,
                         double x_i, const std::array<std::optional<VertexNeighbourhood>, 2>& info,
                         std::span<const int> T, std::span<const double> partial);

// Vertex info the players would hold at x: blocks 1 and 2 decoded with the
// 8 sqrt(h) / 25 sqrt(h) bands, each decoded vertex with its neighbours.
std::array<std::optional<VertexNeighbourhood>, 2> decode_vertex_info(const BrouwerField& field,
                                                                     std::span<const double> x);

// Restriction of a full point to [4] x T in the evaluator's layout.
std::vector<double> restrict_point(std::span<const double> x, int m, std::span<const int> T);

struct ConcentrationReport {
  std::uint64_t trials = 0;
  std::uint64_t exceed = 0;
  double frequency = 0;
  double max_deviation = 0;
  double mean = 0;
};
// Samples random sigma members (tau when use_tau) and counts subsample means
// that deviate from the full mean by more than `threshold` (absolute).
ConcentrationReport concentration_check(const SubsetFamily& fam, std::span<const double> values,
                                        std::uint64_t trials, double threshold, Rng& rng,
                                        bool use_tau = false);

}  // namespace nashlab
