#include "nashlab/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nashlab/brouwer.hpp"
#include "nashlab/calibration.hpp"
#include "nashlab/code.hpp"
#include "nashlab/embed.hpp"
#include "nashlab/eol.hpp"
#include "nashlab/game.hpp"
#include "nashlab/graphs.hpp"
#include "nashlab/lift.hpp"
#include "nashlab/locality.hpp"
#include "nashlab/rng.hpp"

namespace nashlab {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr))
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string read_text_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

ConstantsProfile resolve_profile(const std::string& name_or_path) {
  if (name_or_path.empty() || name_or_path == "desk") {
    fs::path p = fs::path(NASHLAB_PROFILE_DIR) / "desk.json";
    return fs::exists(p) ? ConstantsProfile::load(p.string()) : ConstantsProfile::desk();
  }
  if (fs::exists(name_or_path)) return ConstantsProfile::load(name_or_path);
  fs::path p = fs::path(NASHLAB_PROFILE_DIR) / (name_or_path + ".json");
  if (fs::exists(p)) return ConstantsProfile::load(p.string());
  throw std::invalid_argument("unknown profile '" + name_or_path + "'");
}

void PipelineConfig::validate() const {
  if (n < 2 || n > 12) throw std::invalid_argument("n must lie in [2, 12]");
  if (d < 1) throw std::invalid_argument("d must be positive");
  if (ell < 2) throw std::invalid_argument("ell must be at least 2");
  if (k < 1) throw std::invalid_argument("k must be positive");
  if (out_dir.empty()) throw std::invalid_argument("output directory is empty");
  std::set<std::string> seen;
  for (const auto& s : stages) {
    if (std::find(pipeline_stages().begin(), pipeline_stages().end(), s) == pipeline_stages().end())
      throw std::invalid_argument("unknown stage '" + s + "'");
    if (!seen.insert(s).second) throw std::invalid_argument("stage '" + s + "' listed twice");
  }
  if (stages.empty()) throw std::invalid_argument("empty stage list");
  int m = padded_block_length(n, ell);
  int side = static_cast<int>(std::lround(std::sqrt(double(m))));
  if (side * side != m || side % ell != 0)
    throw std::invalid_argument("padded m is not a square with side divisible by ell");
  resolve_profile(profile).validate();
}

namespace {

struct ArtifactName {
  const char* name;
  const char* file;
};
// Fixed order; the manifest follows it.
constexpr ArtifactName kArtifacts[] = {
    {"instance", "instance.eol"},       {"composed", "composed.txt"},
    {"code", "code.txt"},               {"family", "family.txt"},
    {"fixed_point", "fixed_point.txt"}, {"strategy_a", "strategy_a.txt"},
    {"strategy_b", "strategy_b.txt"},
};

const char* file_of(const std::string& name) {
  for (const auto& a : kArtifacts)
    if (name == a.name) return a.file;
  throw std::logic_error("no artifact " + name);
}

class Run {
 public:
  explicit Run(const PipelineConfig& c) : cfg_(c), prof_(resolve_profile(c.profile)) {}

  bool runs(const std::string& stage) const {
    return std::find(cfg_.stages.begin(), cfg_.stages.end(), stage) != cfg_.stages.end();
  }

  std::string input(const std::string& stage, const std::string& artifact) const {
    fs::path p = cfg_.out_dir / file_of(artifact);
    if (!fs::exists(p))
      throw PipelineError(stage, "missing input " + artifact + " (" + p.string() + ")");
    return read_text_file(p);
  }
  void output(const std::string& artifact, const std::string& text) const {
    write_text_file(cfg_.out_dir / file_of(artifact), text);
  }

  template <class F>
  void stage(const std::string& name, F&& body) {
    if (!runs(name)) return;
    try {
      body();
    } catch (const PipelineError&) {
      throw;
    } catch (const std::exception& e) {
      throw PipelineError(name, e.what());
    }
  }

  void go() {
    const std::uint64_t seed = cfg_.seed;
    const std::uint64_t N = std::uint64_t{1} << cfg_.n;

    stage("instance", [&] {
      Rng rng = make_rng(seed, "instance");
      EolInstance inst = sample_critical(N, rng);
      output("instance", write_instance(inst));
      // audit: the same path embedded into the butterfly multigraph
      Rng er = make_rng(seed, "embedding", 1);
      auto Hd = multiply_edges(build_double_butterfly(cfg_.n), cfg_.d);
      auto emb = sample_embedding(Hd, pointer_edges(inst), er);
      summary_["embedding"] = {{"ok", emb.ok},
                               {"congestion", emb.congestion},
                               {"violations", emb.ok ? disjointness_violations(emb) : 0}};
    });

    stage("lift", [&] {
      EolInstance inst = read_instance(input("lift", "instance"));
      Rng rng = make_rng(seed, "embedding");
      output("composed", write_composed(encode_composed(inst, Gadget::ip2(), rng)));
    });

    stage("code", [&] {
      auto code = VertexCode::build(cfg_.n, cfg_.ell, derive_seed(seed, "code"), prof_);
      output("code", write_code(code.half));
    });

    stage("family", [&] {
      VertexCode code = load_code("family");
      auto fam = build_subset_families(code.m(), cfg_.ell, cfg_.k, derive_seed(seed, "family"));
      auto audit = audit_family(fam);
      if (!audit.ok) throw std::runtime_error("family audit failed: " + audit.first_failure);
      output("family", write_family(fam));
    });

    stage("brouwer", [&] {
      EolInstance inst = read_instance(input("brouwer", "instance"));
      VertexCode code = load_code("brouwer");
      BrouwerField field(inst, code, prof_);
      if (field.endpoints().empty()) throw std::runtime_error("path has no endpoint");
      // the endpoint of the canonical path comes first
      auto fp = find_fixed_point(field, field.endpoints().front());
      if (fp.residual > calibration::kFixedPointResidual)
        throw std::runtime_error("fixed-point search stalled at residual " +
                                 std::to_string(fp.residual));
      std::string text = write_point(fp.x, code.m(), prof_.eps_precision);
      Point snapped = read_point(text);
      auto sol = decode_fixed_point(field, snapped, calibration::kFixedPointResidual);
      output("fixed_point", text);
      summary_["fixed_point"] = {{"residual", field.residual(snapped)},
                                 {"iterations", fp.iterations},
                                 {"vertex", sol.vertex},
                                 {"reason", to_string(sol.reason)}};
    });

    stage("game", [&] {
      auto ci = read_composed(input("game", "composed"));
      VertexCode code = load_code("game");
      auto fam = read_family(input("game", "family"));
      Point x = read_point(input("game", "fixed_point"));
      auto game = build_game(ci, code, fam, prof_);
      BrouwerField field(decode_composed(ci), code, prof_);
      auto [A, B] = plant_equilibrium(game, field, x, calibration::kFixedPointResidual);
      output("strategy_a", write_strategy(A));
      output("strategy_b", write_strategy(B));
    });

    stage("verify", [&] {
      auto ci = read_composed(input("verify", "composed"));
      VertexCode code = load_code("verify");
      auto fam = read_family(input("verify", "family"));
      auto A = read_strategy_a(input("verify", "strategy_a"));
      auto B = read_strategy_b(input("verify", "strategy_b"));
      auto game = build_game(ci, code, fam, prof_);
      EolInstance inst = decode_composed(ci);
      BrouwerField field(inst, code, prof_);
      auto rep = verify_reduction(game, field, A, B, calibration::kPlantEpsilon,
                                  calibration::kResidualK * prof_.eps_brouwer);
      auto sols = enumerate_solutions(inst, SolutionRules::kStrict);
      bool known = std::find(sols.begin(), sols.end(), rep.solution) != sols.end();
      if (!known) throw std::runtime_error("decoded vertex is not a solution of the instance");
      summary_["verify"] = {{"max_regret_a", rep.wsne.max_regret_a},
                            {"max_regret_b", rep.wsne.max_regret_b},
                            {"residual_sq", rep.residual_sq},
                            {"uncovered", rep.uncovered},
                            {"vertex", rep.solution.vertex},
                            {"reason", to_string(rep.solution.reason)}};
    });
  }

  PipelineManifest manifest() const {
    PipelineManifest man;
    ordered_json j;
    j["schema"] = "nashlab-manifest v1";
    j["config"] = {{"n", cfg_.n},       {"d", cfg_.d},         {"ell", cfg_.ell},
                   {"k", cfg_.k},       {"profile", prof_.name}, {"seed", cfg_.seed},
                   {"stages", cfg_.stages}};
    j["artifacts"] = ordered_json::array();
    for (const auto& a : kArtifacts) {
      fs::path p = cfg_.out_dir / a.file;
      if (!fs::exists(p)) continue;
      std::string text = read_text_file(p);
      ArtifactEntry e{a.name, a.file, sha256_hex(text), text.size()};
      j["artifacts"].push_back(
          {{"name", e.name}, {"file", e.file}, {"sha256", e.sha256}, {"bytes", e.bytes}});
      man.artifacts.push_back(std::move(e));
    }
    j["summary"] = summary_;
    man.json = j.dump(2) + "\n";
    return man;
  }

 private:
  VertexCode load_code(const std::string& stage) const {
    VertexCode vc;
    vc.half = read_code(input(stage, "code"));
    vc.na = cfg_.n / 2;
    vc.nb = cfg_.n - vc.na;
    if (vc.half.real_bits < std::max(vc.na, vc.nb))
      throw std::runtime_error("code has too few message bits for n");
    return vc;
  }

  const PipelineConfig& cfg_;
  ConstantsProfile prof_;
  ordered_json summary_ = ordered_json::object();
};

}  // namespace

PipelineManifest run_pipeline(const PipelineConfig& config) {
  config.validate();
  fs::create_directories(config.out_dir);
  Run run(config);
  run.go();
  auto man = run.manifest();
  write_text_file(config.out_dir / "manifest.json", man.json);
  return man;
}

}  // namespace nashlab
