#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nashlab/code.hpp"
#include "nashlab/eol.hpp"
#include "nashlab/profile.hpp"
#include "nashlab/rng.hpp"

namespace nashlab {

// Points live in [-1,2]^{4m}, stored block-major: coordinate b*m + c is
// position c of block b. Blocks 0,1 carry codewords, block 2 the
// compute-vs-copy bit, block 3 the special direction.
using Point = std::vector<double>;

// Norm averaged over coordinates, so the all-ones vector has norm 1.
double normalized_norm(std::span<const double> v);
double normalized_distance(std::span<const double> a, std::span<const double> b);

// Compact description of a Brouwer vertex: codeword indices for blocks 0,1
// (-1 is the zero block) and constants for blocks 2,3.
struct PointSpec {
  int w1 = -1;
  int w2 = -1;
  double b3 = 0;
  double b4 = 0;
  bool operator==(const PointSpec&) const = default;
};

enum class SegmentKind { kFirst, kStep1, kStep2, kStep3, kStep4 };

struct BrouwerSegment {
  PointSpec s, t;
  SegmentKind kind = SegmentKind::kFirst;
  VertexId tail = 0, head = 0;  // edge (tail -> head); unused for the first segment
  int block = 3;                // the only block where s and t differ
  double length = 0;            // normalized
  int prev = -1, next = -1;
  bool start_window = false;  // path starts here
  bool end_window = false;    // path ends here
  bool open_start = false;    // neighbour unknown (local chains only)
  bool open_end = false;
};

// What is known about one vertex: itself and its edge-agreeing neighbours.
struct VertexNeighbourhood {
  VertexId v = 0;
  std::optional<VertexId> succ, pred;
};

// The Brouwer segments induced by a set of known vertices. With every vertex
// known this is the full path system; the doubly-local evaluator builds one
// from at most two vertices. Edges into the start are dropped.
class BrouwerChain {
 public:
  BrouwerChain(const VertexCode& code, const std::vector<VertexNeighbourhood>& known);

  int m() const { return m_; }
  int dim() const { return 4 * m_; }
  const std::vector<BrouwerSegment>& segments() const { return segments_; }
  const std::vector<VertexId>& word_vertices() const { return word_vertex_; }
  const std::vector<std::uint8_t>& word(int w) const { return words_[w]; }
  int word_of(VertexId v) const;  // -1 if the vertex has no codeword here
  // Segments whose edge touches the given word's vertex.
  const std::vector<int>& incident(int w) const { return incident_[w]; }

  double value(const PointSpec& p, int coord) const;
  Point point(const PointSpec& p) const;
  Point point_on(int segment, double tau) const;
  // Unit direction entry (t_i - s_i)/length.
  double direction(int segment, int coord) const;

 private:
  int add_word(const VertexCode& code, VertexId v);

  int m_ = 0;
  std::vector<BrouwerSegment> segments_;
  std::vector<std::vector<std::uint8_t>> words_;
  std::vector<VertexId> word_vertex_;
  std::vector<std::vector<int>> incident_;
};

// x^1..x^5 for the edge (u -> v).
std::array<Point, 5> brouwer_vertices(const VertexCode& code, VertexId u, VertexId v);

// Full path system of an instance: first segment, then four per edge.
BrouwerChain build_brouwer_path(const EolInstance& inst, const VertexCode& code);

enum class Classification {
  kFar,
  kNearSegment,
  kNearCorner,
  kNearEndpoint,
  kOutsidePicture,  // on the boundary x4 = 1/2
  kOutsideTop,
  kOutsideInterpolated,
};
std::string to_string(Classification c);

// z as a combination of points on segments.
struct ZTerm {
  int segment = 0;
  double tau = 0;
  double coef = 1;
};

struct GeometryLocation {
  Classification classification = Classification::kFar;
  std::vector<int> segments;  // active segments
  std::vector<double> taus;   // parameter along each active segment
  std::vector<ZTerm> z;
  double psi = -1;              // corner weight, -1 when unused
  double distance = -1;         // ||x - z||, -1 when no z
  double window = 1;            // endpoint blend weight of the line field
  double outside_weight = -1;   // weight of the boundary field outside the picture
  double x4_mean = 0;
};

// g_hat = sum dirs + c_zx (z - x) + c_def (0,0,0,1); all factors of delta included.
struct Blend {
  std::vector<std::pair<int, double>> dirs;  // (segment, coefficient on unit direction)
  std::vector<ZTerm> z;
  double c_zx = 0;
  double c_def = 0;
};

// A subset of coordinates with the values of x there. The full view lists
// all 4m coordinates.
struct CoordView {
  std::span<const int> coords;
  std::span<const double> x;
};

struct Evaluation {
  GeometryLocation location;
  Blend blend;
};

// Shared evaluation core: classify x (seen through the view) against the
// candidate segments and return the displacement blend. Estimates from a
// partial view use ratio estimators for tau.
Evaluation evaluate_region(const BrouwerChain& chain, std::span<const int> candidates,
                           const CoordView& view, const ConstantsProfile& profile);

// g_hat_i before truncation.
double blend_component(const BrouwerChain& chain, const Blend& blend, int coord, double x_i);

struct Endpoint {
  int segment = 0;
  bool at_end = true;
  VertexId vertex = 0;            // vertex whose codewords sit at the endpoint
  std::optional<EolSolution> solution;
};

class BrouwerField {
 public:
  BrouwerField(EolInstance inst, VertexCode code, ConstantsProfile profile);

  const EolInstance& instance() const { return inst_; }
  const VertexCode& code() const { return code_; }
  const ConstantsProfile& profile() const { return profile_; }
  const BrouwerChain& chain() const { return chain_; }
  int m() const { return chain_.m(); }
  int dim() const { return chain_.dim(); }

  std::vector<int> candidates(std::span<const double> x) const;
  Evaluation evaluate(std::span<const double> x) const;
  GeometryLocation locate(std::span<const double> x) const;
  Point z_of(const GeometryLocation& loc) const;
  Point g_hat(std::span<const double> x) const;
  Point g(std::span<const double> x) const;  // truncated so x + g stays in the cube
  Point f(std::span<const double> x) const;
  double residual(std::span<const double> x) const;  // ||g(x)||
  // Fraction of coordinates where truncation changed g_hat.
  double truncated_fraction(std::span<const double> x) const;

  const std::vector<Endpoint>& endpoints() const { return endpoints_; }
  Point endpoint_point(const Endpoint& e) const;
  double distance_to_endpoints(std::span<const double> x) const;
  // Analytic cancellation locus next to an endpoint.
  Point fixed_point_seed(const Endpoint& e) const;

 private:
  EolInstance inst_;
  VertexCode code_;
  ConstantsProfile profile_;
  BrouwerChain chain_;
  std::vector<int> all_coords_;
  std::vector<Endpoint> endpoints_;
};

struct SeparationReport {
  double min_distance = 0;  // over non-consecutive segment pairs
  int seg_a = -1, seg_b = -1;
  std::uint64_t pairs = 0;
};
double segment_distance(const BrouwerChain& chain, int a, int b);
SeparationReport check_separation(const BrouwerChain& chain);

struct LipschitzReport {
  double lipschitz = 0;       // max ||g(x)-g(y)|| / ||x-y||
  double coordinatewise = 0;  // max |g_i(x)-g_i(y)| / max(|x_i-y_i|, ||x-y||)
  double boundary_gap = 0;    // max ||g(x)-g(y)|| across x4 = 1/2 +- 1e-9
  std::uint64_t pairs = 0;
};
// Global random pairs plus pairs straddling the distance anchors, corner and
// window edges and the picture boundary.
LipschitzReport check_lipschitz(const BrouwerField& field, int samples, Rng& rng,
                                int boundary_samples = -1);

struct FixedPointResult {
  Point x;
  double residual = 0;
  int iterations = 0;
};
// Damped Newton in the plane of the endpoint's segment and special direction.
FixedPointResult find_fixed_point(const BrouwerField& field, const Endpoint& e);

// Throws std::runtime_error when the residual exceeds tolerance or decoding
// does not land on a verified solution.
EolSolution decode_fixed_point(const BrouwerField& field, std::span<const double> x,
                               double tolerance);

Point random_cube_point(int dim, Rng& rng);

std::string write_point(const Point& x, int m, double grid_step);
Point read_point(const std::string& text, int* m_out = nullptr);

}  // namespace nashlab
