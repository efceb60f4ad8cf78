#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "omniflow/hs.hpp"
#include "omniflow/metrics.hpp"
#include "omniflow/renderer.hpp"
#include "omniflow/scene.hpp"

namespace omniflow {

struct DatasetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fixed dataset layout: <root>/<sequence>/frame_%04d.png, mask_%04d.png and
// flow_%04d.flo (one flow per consecutive frame pair), plus sequence.cfg and
// manifest.txt.
std::string frame_file_name(int index);
std::string mask_file_name(int index);
std::string flow_file_name(int index);
inline constexpr const char* kSequenceConfigName = "sequence.cfg";
inline constexpr const char* kManifestName = "manifest.txt";

uint64_t fnv1a64(const void* data, size_t n);
uint64_t fnv1a64_file(const std::filesystem::path& path);

struct ManifestEntry {
  std::string name;
  uint64_t size = 0;
  uint64_t hash = 0;  // fnv-1a 64 over the file bytes
};

struct Manifest {
  std::string sequence;
  int frame_count = 0;
  std::vector<ManifestEntry> files;

  std::string serialize() const;
  static Manifest parse(const std::string& text);
  static Manifest load(const std::filesystem::path& dataset_dir);
  void save(const std::filesystem::path& dataset_dir) const;

  /// Rehashes every listed file; throws DatasetError on any mismatch.
  void verify(const std::filesystem::path& dataset_dir) const;
};

/// Renders the whole sequence into <out_root>/<spec.name>/ and writes the
/// config and manifest. Returns the dataset directory.
std::filesystem::path generate_sequence(const SequenceSpec& spec,
                                        const std::filesystem::path& out_root);

/// Runs the Horn-Schunck baseline over every consecutive frame pair of a
/// generated dataset, writing flow_%04d.flo files into out_dir. The solve
/// domain is the image circle of the dataset camera. `progress(done, total)`
/// is invoked after each pair when provided.
void estimate_dataset(const std::filesystem::path& dataset_dir,
                      const std::filesystem::path& out_dir, const HSParams& params = {},
                      const std::function<void(int, int)>& progress = {});

struct MethodFlows {
  std::string method;
  std::filesystem::path flow_dir;
};

struct MethodEvaluation {
  std::string method;
  EvalRow mean;                       // per-frame metrics averaged
  std::vector<FrameMetrics> frames;   // indexed by frame pair
};

struct DatasetEvaluation {
  std::string experiment;
  std::vector<MethodEvaluation> methods;
};

/// Evaluates one or more flow directories against the dataset ground truth.
/// The foreground mask of the earlier frame splits Fl into fg/bg.
DatasetEvaluation evaluate_dataset(const std::filesystem::path& dataset_dir,
                                   const std::vector<MethodFlows>& methods,
                                   const OutlierRule& rule = {});

Grid<uint8_t> read_mask_png(const std::filesystem::path& path);
void write_mask_png(const Grid<uint8_t>& mask, const std::filesystem::path& path);

}  // namespace omniflow
