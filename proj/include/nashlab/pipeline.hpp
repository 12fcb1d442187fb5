#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nashlab/profile.hpp"

namespace nashlab {

// Stages run in this order; each reads its inputs from the output directory
// when the producing stage is not part of the run.
inline const std::vector<std::string>& pipeline_stages() {
  static const std::vector<std::string> s{"instance", "lift",  "code",  "family",
                                          "brouwer",  "game",  "verify"};
  return s;
}

struct PipelineConfig {
  int n = 6;    // log2 of the vertex count on the complete host
  int d = 16;   // edge multiplicity for the butterfly embedding audit
  int ell = 2;
  int k = 4;
  std::string profile = "desk";  // name under the profile dir, or a path
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "nashlab-out";
  std::vector<std::string> stages = pipeline_stages();

  void validate() const;  // throws std::invalid_argument
};

// Aborted stage: what() reads "stage <name>: <cause>".
class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string stage, const std::string& cause)
      : std::runtime_error("stage " + stage + ": " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct ArtifactEntry {
  std::string name;
  std::string file;
  std::string sha256;
  std::uint64_t bytes = 0;
};

struct PipelineManifest {
  std::vector<ArtifactEntry> artifacts;
  std::string json;  // the text written to manifest.json
};

PipelineManifest run_pipeline(const PipelineConfig& config);

// Named profile from the profile directory, or a JSON file path.
ConstantsProfile resolve_profile(const std::string& name_or_path);

std::string sha256_hex(const std::string& bytes);
std::string read_text_file(const std::filesystem::path& p);
void write_text_file(const std::filesystem::path& p, const std::string& text);

}  // namespace nashlab
