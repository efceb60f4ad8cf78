#include "omniflow/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace omniflow {

namespace fs = std::filesystem;

namespace {

std::string indexed_name(const char* stem, const char* ext, int index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%04d.%s", stem, index, ext);
  return buf;
}

}  // namespace

std::string frame_file_name(int index) { return indexed_name("frame", "png", index); }
std::string mask_file_name(int index) { return indexed_name("mask", "png", index); }
std::string flow_file_name(int index) { return indexed_name("flow", "flo", index); }

uint64_t fnv1a64(const void* data, size_t n) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  uint64_t hash = 14695981039346656037ull;
  for (size_t i = 0; i < n; ++i) {
    hash ^= bytes[i];
    hash *= 1099511628211ull;
  }
  return hash;
}

uint64_t fnv1a64_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open for hashing: " + path.string());
  uint64_t hash = 14695981039346656037ull;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const auto got = static_cast<size_t>(in.gcount());
    for (size_t i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 1099511628211ull;
    }
  }
  return hash;
}

std::string Manifest::serialize() const {
  std::ostringstream out;
  out << "omniflow-manifest 1\n";
  out << "sequence " << sequence << "\n";
  out << "frames " << frame_count << "\n";
  for (const ManifestEntry& f : files) {
    char line[512];
    std::snprintf(line, sizeof(line), "file %s %llu %016llx\n", f.name.c_str(),
                  static_cast<unsigned long long>(f.size),
                  static_cast<unsigned long long>(f.hash));
    out << line;
  }
  return out.str();
}

Manifest Manifest::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Manifest m;
  if (!std::getline(in, line) || line != "omniflow-manifest 1")
    throw DatasetError("manifest: unrecognized header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string tag;
    fields >> tag;
    if (tag == "sequence") {
      fields >> m.sequence;
    } else if (tag == "frames") {
      fields >> m.frame_count;
    } else if (tag == "file") {
      ManifestEntry e;
      std::string hash_hex;
      fields >> e.name >> e.size >> hash_hex;
      if (fields.fail() || e.name.empty() || hash_hex.size() != 16)
        throw DatasetError("manifest: malformed file line: " + line);
      e.hash = std::stoull(hash_hex, nullptr, 16);
      m.files.push_back(std::move(e));
    } else {
      throw DatasetError("manifest: unknown line: " + line);
    }
  }
  if (m.sequence.empty() || m.frame_count < 2)
    throw DatasetError("manifest: missing sequence name or frame count");
  return m;
}

Manifest Manifest::load(const fs::path& dataset_dir) {
  const fs::path path = dataset_dir / kManifestName;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open manifest: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void Manifest::save(const fs::path& dataset_dir) const {
  const fs::path path = dataset_dir / kManifestName;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetError("cannot write manifest: " + path.string());
  out << serialize();
  if (!out) throw DatasetError("failed writing manifest: " + path.string());
}

void Manifest::verify(const fs::path& dataset_dir) const {
  for (const ManifestEntry& f : files) {
    const fs::path path = dataset_dir / f.name;
    std::error_code ec;
    const uint64_t size = fs::file_size(path, ec);
    if (ec) throw DatasetError("manifest verify: missing file " + path.string());
    if (size != f.size)
      throw DatasetError("manifest verify: size mismatch for " + path.string());
    if (fnv1a64_file(path) != f.hash)
      throw DatasetError("manifest verify: hash mismatch for " + path.string());
  }
}

Grid<uint8_t> read_mask_png(const fs::path& path) {
  const Image8 img = read_png(path);
  Grid<uint8_t> mask(img.width, img.height, 0);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      mask.at(x, y) = img.pixel(x, y)[0] ? 255 : 0;
  return mask;
}

void write_mask_png(const Grid<uint8_t>& mask, const fs::path& path) {
  Image8 img(mask.width(), mask.height(), 1);
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      img.pixel(x, y)[0] = mask.at(x, y);
  write_png(img, path);
}

fs::path generate_sequence(const SequenceSpec& spec, const fs::path& out_root) {
  spec.validate();
  const fs::path dir = out_root / spec.name;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DatasetError("cannot create dataset directory: " + dir.string());

  Manifest manifest;
  manifest.sequence = spec.name;
  manifest.frame_count = spec.frame_count;
  auto add = [&manifest, &dir](const std::string& name) {
    manifest.files.push_back({name, fs::file_size(dir / name), fnv1a64_file(dir / name)});
  };

  for (int frame = 0; frame < spec.frame_count; ++frame) {
    const FrameRender render = render_frame(spec, frame);
    write_png(render.image, dir / frame_file_name(frame));
    write_mask_png(render.fg_mask, dir / mask_file_name(frame));
  }
  for (int frame = 0; frame + 1 < spec.frame_count; ++frame)
    write_flo(ground_truth_flow(spec, frame), dir / flow_file_name(frame));
  sequence_to_config(spec).save(dir / kSequenceConfigName);

  for (int frame = 0; frame < spec.frame_count; ++frame) {
    add(frame_file_name(frame));
    add(mask_file_name(frame));
  }
  for (int frame = 0; frame + 1 < spec.frame_count; ++frame) add(flow_file_name(frame));
  add(kSequenceConfigName);
  manifest.save(dir);
  return dir;
}

void estimate_dataset(const fs::path& dataset_dir, const fs::path& out_dir,
                      const HSParams& params, const std::function<void(int, int)>& progress) {
  params.validate();
  const Manifest manifest = Manifest::load(dataset_dir);
  const SequenceSpec spec = sequence_from_config(Config::load(dataset_dir / kSequenceConfigName));
  const Grid<uint8_t> domain = spec.camera.image_circle_mask();

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw DatasetError("cannot create output directory: " + out_dir.string());

  const int pairs = manifest.frame_count - 1;
  Grid<float> current = luma_from_rgb(read_png(dataset_dir / frame_file_name(0)));
  for (int frame = 0; frame < pairs; ++frame) {
    Grid<float> next = luma_from_rgb(read_png(dataset_dir / frame_file_name(frame + 1)));
    const HSResult result = hs_estimate(current, next, domain, params);
    write_flo(result.flow, out_dir / flow_file_name(frame));
    current = std::move(next);
    if (progress) progress(frame + 1, pairs);
  }
}

DatasetEvaluation evaluate_dataset(const fs::path& dataset_dir,
                                   const std::vector<MethodFlows>& methods,
                                   const OutlierRule& rule) {
  if (methods.empty()) throw MetricsError("evaluate: no flow directories given");
  const Manifest manifest = Manifest::load(dataset_dir);
  DatasetEvaluation eval;
  eval.experiment = manifest.sequence;

  for (const MethodFlows& m : methods) {
    if (m.method.empty()) throw MetricsError("evaluate: method name must not be empty");
    MethodEvaluation out;
    out.method = m.method;
    for (int frame = 0; frame + 1 < manifest.frame_count; ++frame) {
      const FlowField truth = read_flo(dataset_dir / flow_file_name(frame));
      const FlowField estimate = read_flo(m.flow_dir / flow_file_name(frame));
      const Grid<uint8_t> fg = read_mask_png(dataset_dir / mask_file_name(frame));
      out.frames.push_back(evaluate_flow(estimate, truth, fg, rule));
    }
    out.mean = mean_row(eval.experiment, m.method, out.frames);
    eval.methods.push_back(std::move(out));
  }
  return eval;
}

}  // namespace omniflow
