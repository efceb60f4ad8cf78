#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "omniflow/dataset.hpp"
#include "omniflow/kernels.hpp"

namespace fs = std::filesystem;
using namespace omniflow;

namespace {

constexpr const char* kFramesCsvHeader =
    "experiment,method,frame,aae_deg,aepe_px,fl_bg_pct,fl_fg_pct,fl_all_pct";

std::string format_metric(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string format_metric(const std::optional<double>& v) {
  return v ? format_metric(*v) : std::string();
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetError("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw DatasetError("failed writing: " + path.string());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open for reading: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct GenerateArgs {
  std::vector<std::string> names;
  std::vector<std::string> config_files;
  std::string out_dir;
  bool all = false;
};

int cmd_generate(const GenerateArgs& args) {
  std::vector<SequenceSpec> specs;
  std::vector<std::string> names = args.names;
  if (args.all) {
    const auto builtin = builtin_sequence_names();
    names.insert(names.end(), builtin.begin(), builtin.end());
  }
  for (const std::string& name : names) specs.push_back(builtin_sequence(name));
  for (const std::string& file : args.config_files)
    specs.push_back(sequence_from_config(Config::load(file)));
  if (specs.empty())
    throw std::invalid_argument("generate: give sequence names, --config files or --all");

  for (const SequenceSpec& spec : specs) {
    const fs::path dir = generate_sequence(spec, args.out_dir);
    std::cout << "generated " << spec.name << " (" << spec.frame_count << " frames) -> "
              << dir.string() << "\n";
  }
  return 0;
}

struct EstimateArgs {
  std::string dataset;
  std::string out_dir;
  HSParams params;
};

int cmd_estimate(const EstimateArgs& args) {
  estimate_dataset(args.dataset, args.out_dir, args.params, [](int done, int total) {
    std::cerr << "estimated pair " << done << "/" << total << "\n";
  });
  std::cout << "estimates written to " << args.out_dir << "\n";
  return 0;
}

std::vector<MethodFlows> parse_method_flows(const std::vector<std::string>& raw) {
  std::vector<MethodFlows> methods;
  for (const std::string& item : raw) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
      throw std::invalid_argument("--flows expects method=directory, got '" + item + "'");
    methods.push_back({item.substr(0, eq), fs::path(item.substr(eq + 1))});
  }
  return methods;
}

struct EvaluateArgs {
  std::string dataset;
  std::vector<std::string> flows;
  std::string csv_out;
  std::string frames_csv_out;
  bool kitti_relative = false;
};

std::string frames_csv(const DatasetEvaluation& eval) {
  std::ostringstream out;
  out << kFramesCsvHeader << "\n";
  for (const MethodEvaluation& m : eval.methods) {
    for (size_t i = 0; i < m.frames.size(); ++i) {
      const FrameMetrics& f = m.frames[i];
      out << eval.experiment << "," << m.method << "," << i << "," << format_metric(f.aae_deg)
          << "," << format_metric(f.aepe_px) << "," << format_metric(f.fl_bg_pct) << ","
          << format_metric(f.fl_fg_pct) << "," << format_metric(f.fl_all_pct) << "\n";
    }
  }
  return out.str();
}

int cmd_evaluate(const EvaluateArgs& args) {
  OutlierRule rule;
  rule.kitti_relative = args.kitti_relative;
  const DatasetEvaluation eval =
      evaluate_dataset(args.dataset, parse_method_flows(args.flows), rule);

  EvalReport report;
  for (const MethodEvaluation& m : eval.methods) report.add_row(m.mean);
  std::cout << report.to_text_table();
  if (!args.csv_out.empty()) write_text_file(args.csv_out, report.to_csv());
  if (!args.frames_csv_out.empty()) write_text_file(args.frames_csv_out, frames_csv(eval));
  return 0;
}

struct VisualizeArgs {
  std::string input;
  std::string out_dir;
  double max_magnitude = 0.0;  // 0 means per-file normalization
};

int cmd_visualize(const VisualizeArgs& args) {
  std::vector<fs::path> inputs;
  const fs::path in(args.input);
  if (fs::is_directory(in)) {
    for (const auto& entry : fs::directory_iterator(in))
      if (entry.is_regular_file() && entry.path().extension() == ".flo")
        inputs.push_back(entry.path());
    std::sort(inputs.begin(), inputs.end());
    if (inputs.empty())
      throw std::invalid_argument("visualize: no .flo files in " + in.string());
  } else {
    inputs.push_back(in);
  }

  std::error_code ec;
  fs::create_directories(args.out_dir, ec);
  if (ec) throw DatasetError("cannot create output directory: " + args.out_dir);

  std::optional<double> maxmag;
  if (args.max_magnitude != 0.0) {
    if (!(args.max_magnitude > 0.0))
      throw std::invalid_argument("visualize: --max-mag must be positive");
    maxmag = args.max_magnitude;
  }
  for (const fs::path& file : inputs) {
    const FlowField flow = read_flo(file);
    const fs::path out = fs::path(args.out_dir) / (file.stem().string() + ".png");
    write_png(flow_to_color(flow, maxmag), out);
    std::cout << "wrote " << out.string() << "\n";
  }
  return 0;
}

struct ReportArgs {
  std::string csv_in;
  std::string csv_out;
};

int cmd_report(const ReportArgs& args) {
  const EvalReport report = EvalReport::from_csv(read_text_file(args.csv_in));
  std::cout << report.to_text_table();
  for (const std::string& experiment : report.experiments()) {
    const BestFlags best = report.best_in_experiment(experiment);
    std::cout << "best " << experiment << ": aae=" << best.best_aae_method
              << " aepe=" << best.best_aepe_method << "\n";
  }
  if (!args.csv_out.empty()) write_text_file(args.csv_out, report.to_csv());
  return 0;
}

template <typename F>
int run_guarded(F&& body) {
  try {
    return body();
  } catch (const FloError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ImageIoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const DatasetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthetic omnidirectional optical-flow dataset and evaluation toolkit"};
  app.require_subcommand(1);
  std::string kernel = "auto";
  app.add_option("--kernel", kernel, "compute kernels: auto, scalar, avx2")
      ->capture_default_str();

  GenerateArgs gen_args;
  auto* gen = app.add_subcommand("generate", "render sequences with ground-truth flow");
  gen->add_option("names", gen_args.names, "built-in sequence names, e.g. linec-1 spiral-4-flat");
  gen->add_option("--out", gen_args.out_dir, "output root directory")->required();
  gen->add_option("--config", gen_args.config_files, "sequence config file(s)");
  gen->add_flag("--all", gen_args.all, "render all built-in sequences");

  EstimateArgs est_args;
  auto* est = app.add_subcommand("estimate", "run the Horn-Schunck baseline over a dataset");
  est->add_option("--dataset", est_args.dataset, "generated dataset directory")->required();
  est->add_option("--out", est_args.out_dir, "directory for estimated .flo files")->required();
  est->add_option("--alpha", est_args.params.alpha, "smoothness weight")->capture_default_str();
  est->add_option("--iterations", est_args.params.iterations, "Jacobi sweeps per warp")
      ->capture_default_str();
  est->add_option("--levels", est_args.params.pyramid_levels, "pyramid levels")
      ->capture_default_str();
  est->add_option("--warps", est_args.params.warps_per_level, "warps per level")
      ->capture_default_str();

  EvaluateArgs eval_args;
  auto* eval = app.add_subcommand("evaluate", "score flow directories against ground truth");
  eval->add_option("--dataset", eval_args.dataset, "generated dataset directory")->required();
  eval->add_option("--flows", eval_args.flows, "method=directory (repeatable)")->required();
  eval->add_option("--csv", eval_args.csv_out, "write the summary csv here");
  eval->add_option("--frames-csv", eval_args.frames_csv_out, "write per-frame metrics here");
  eval->add_flag("--kitti-relative", eval_args.kitti_relative,
                 "also require epe > 5% of ground-truth magnitude for outliers");

  VisualizeArgs vis_args;
  auto* vis = app.add_subcommand("visualize", "render .flo files as color-wheel PNGs");
  vis->add_option("input", vis_args.input, ".flo file or directory of .flo files")->required();
  vis->add_option("--out", vis_args.out_dir, "output directory")->required();
  vis->add_option("--max-mag", vis_args.max_magnitude,
                  "fixed magnitude normalization (default: per file)");

  ReportArgs rep_args;
  auto* rep = app.add_subcommand("report", "format an evaluation csv as a table");
  rep->add_option("--csv-in", rep_args.csv_in, "summary csv produced by evaluate")->required();
  rep->add_option("--csv-out", rep_args.csv_out, "re-emit the csv here");

  auto* list = app.add_subcommand("list", "print the built-in sequence names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  return run_guarded([&]() -> int {
    kernels::select_kernels(kernel);
    if (gen->parsed()) return cmd_generate(gen_args);
    if (est->parsed()) return cmd_estimate(est_args);
    if (eval->parsed()) return cmd_evaluate(eval_args);
    if (vis->parsed()) return cmd_visualize(vis_args);
    if (rep->parsed()) return cmd_report(rep_args);
    if (list->parsed()) {
      for (const std::string& name : builtin_sequence_names()) std::cout << name << "\n";
      return 0;
    }
    throw std::logic_error("no subcommand dispatched");
  });
}
