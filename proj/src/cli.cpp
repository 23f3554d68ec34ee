#include "laser_tools/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>

#include "CLI11.hpp"
#include "laser_tools/errors.hpp"
#include "laser_tools/io.hpp"
#include "laser_tools/merger.hpp"
#include "laser_tools/raycast.hpp"
#include "laser_tools/virtualizer.hpp"

namespace laser_tools::cli {

namespace fs = std::filesystem;

namespace {

struct Invocation {
  std::string config_path;
  std::string output;
  std::vector<std::string> inputs;
  std::string scene_path;
  bool stream = false;
  int verbosity = 0;
};

struct Diagnostics {
  std::ostream& err;
  int verbosity;

  void warn(const std::string& msg) const { err << "warning: " << msg << "\n"; }
  void info(const std::string& msg) const {
    if (verbosity >= 1) err << msg << "\n";
  }
};

std::string describe(const DropStats& s) {
  return "accepted=" + std::to_string(s.accepted) + " dropped_bearing=" + std::to_string(s.bearing) +
         " dropped_range_low=" + std::to_string(s.range_low) + " dropped_range_high=" + std::to_string(s.range_high) +
         " dropped_height=" + std::to_string(s.height);
}

// Paths in a config file are relative to the file itself.
fs::path relative_to(const std::string& config_path, const std::string& p) {
  const fs::path path(p);
  if (path.is_absolute()) return path;
  return fs::path(config_path).parent_path() / path;
}

io::Config load_config(const Invocation& inv) {
  if (inv.config_path.empty()) throw ConfigError("--config is required");
  return io::read_config(inv.config_path);
}

// Writes every output to a temporary first; nothing is renamed into place unless all writes
// succeeded.
class StagedOutputs {
 public:
  void add(fs::path path, std::string text) { files_.push_back({std::move(path), std::move(text)}); }

  void commit() {
    std::vector<fs::path> temps;
    try {
      for (const auto& f : files_) {
        fs::path tmp = f.path;
        tmp += ".staged";
        io::write_text_atomic(tmp, f.text);
        temps.push_back(tmp);
      }
    } catch (...) {
      for (const auto& t : temps) {
        std::error_code ignored;
        fs::remove(t, ignored);
      }
      throw;
    }
    for (std::size_t i = 0; i < files_.size(); ++i) {
      std::error_code ec;
      fs::rename(temps[i], files_[i].path, ec);
      if (ec) throw IoError("cannot move output into place at '" + files_[i].path.string() + "': " + ec.message());
    }
  }

 private:
  struct File {
    fs::path path;
    std::string text;
  };
  std::vector<File> files_;
};

fs::path per_frame_path(const fs::path& base, const FrameId& frame) {
  const std::string ext = base.has_extension() ? base.extension().string() : ".json";
  return base.parent_path() / (base.stem().string() + "_" + frame.str() + ext);
}

// ---- merge -----------------------------------------------------------------------------------

int run_merge_files(const Invocation& inv, const io::Config& cfg, std::ostream& out, const Diagnostics& diag) {
  const io::MergeSection& m = *cfg.merge;
  std::vector<fs::path> paths;
  if (!inv.inputs.empty()) {
    if (inv.inputs.size() != m.config.inputs.size()) {
      throw ConfigError("config lists " + std::to_string(m.config.inputs.size()) + " inputs but " +
                        std::to_string(inv.inputs.size()) + " scan files were given");
    }
    paths.assign(inv.inputs.begin(), inv.inputs.end());
  } else {
    for (const auto& p : m.config.inputs) paths.push_back(relative_to(inv.config_path, p));
  }

  std::vector<LaserScan> scans;
  for (const auto& p : paths) scans.push_back(io::read_scan(p));

  const MergeResult result = merge_scans(scans, cfg.tree, m.config);
  diag.info("merge: " + describe(result.stats) + " skipped_beams=" + std::to_string(result.skipped_beams));

  const std::string scan_text = io::format_scan(result.scan) + "\n";
  StagedOutputs outputs;
  if (!inv.output.empty()) {
    outputs.add(inv.output, scan_text);
  } else if (!m.scan_output.empty()) {
    outputs.add(relative_to(inv.config_path, m.scan_output), scan_text);
  } else {
    out << scan_text << std::flush;
  }
  if (result.cloud) outputs.add(relative_to(inv.config_path, m.cloud_output), io::format_cloud_pcd(*result.cloud));
  outputs.commit();
  return kOk;
}

// Blank-line delimited group of records; `terminated` is false for a batch cut off by end of input.
struct Batch {
  std::vector<std::string> records;
  std::size_t first_line = 0;
  bool terminated = false;
};

std::optional<Batch> next_batch(std::istream& in, std::size_t& line_no) {
  Batch batch;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const bool blank = std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
    if (blank) {
      if (batch.records.empty()) continue;
      batch.terminated = true;
      return batch;
    }
    if (batch.records.empty()) batch.first_line = line_no;
    batch.records.push_back(line);
  }
  if (batch.records.empty()) return std::nullopt;
  return batch;
}

template <typename Process>
int stream_loop(std::istream& in, std::ostream& out, const Diagnostics& diag, std::size_t records_per_batch,
                Process process) {
  std::size_t line_no = 0;
  std::size_t index = 0;
  std::size_t succeeded = 0;
  while (auto batch = next_batch(in, line_no)) {
    ++index;
    const std::string label = "batch " + std::to_string(index) + " (line " + std::to_string(batch->first_line) + ")";
    if (!batch->terminated && batch->records.size() != records_per_batch) {
      diag.warn(label + ": incomplete batch at end of input, no output");
      break;
    }
    if (batch->records.size() != records_per_batch) {
      diag.warn(label + ": expected " + std::to_string(records_per_batch) + " records, got " +
                std::to_string(batch->records.size()) + "; skipped");
      continue;
    }
    try {
      out << process(*batch, label) << "\n" << std::flush;
      ++succeeded;
    } catch (const ParseError& e) {
      diag.warn(label + ": " + e.what() + "; skipped");
    } catch (const FrameError& e) {
      diag.warn(label + ": " + e.what() + "; skipped");
    } catch (const std::invalid_argument& e) {
      diag.warn(label + ": " + e.what() + "; skipped");
    }
  }
  if (succeeded == 0) {
    diag.warn("no batch was processed");
    return kNoBatches;
  }
  diag.info("stream: " + std::to_string(succeeded) + " of " + std::to_string(index) + " batches processed");
  return kOk;
}

int run_merge_stream(const io::Config& cfg, std::istream& in, std::ostream& out, const Diagnostics& diag) {
  const io::MergeSection& m = *cfg.merge;
  if (m.config.emit_cloud) diag.info("stream: debug cloud output is not produced in stream mode");
  MergeConfig mc = m.config;
  mc.emit_cloud = false;
  return stream_loop(in, out, diag, mc.inputs.size(), [&](const Batch& batch, const std::string& label) {
    std::vector<LaserScan> scans;
    for (std::size_t k = 0; k < batch.records.size(); ++k) {
      io::ScanRecord rec = io::parse_scan_record(batch.records[k], label + " record " + std::to_string(k + 1));
      if (rec.source && *rec.source != mc.inputs[k]) {
        throw ParseError("record " + std::to_string(k + 1) + " has source '" + *rec.source + "', expected '" +
                         mc.inputs[k] + "'");
      }
      scans.push_back(std::move(rec.scan));
    }
    const MergeResult result = merge_scans(scans, cfg.tree, mc);
    diag.info(label + ": " + describe(result.stats));
    return io::format_scan(result.scan);
  });
}

int run_merge(const Invocation& inv, std::istream& in, std::ostream& out, const Diagnostics& diag) {
  const io::Config cfg = load_config(inv);
  if (!cfg.merge) throw ConfigError(inv.config_path + ": no [merge] section");
  return inv.stream ? run_merge_stream(cfg, in, out, diag) : run_merge_files(inv, cfg, out, diag);
}

// ---- virtualize ------------------------------------------------------------------------------

int run_virtualize(const Invocation& inv, std::istream& in, std::ostream& out, const Diagnostics& diag) {
  const io::Config cfg = load_config(inv);
  if (!cfg.virtualize) throw ConfigError(inv.config_path + ": no [virtualize] section");
  const io::VirtualizeSection& v = *cfg.virtualize;

  if (inv.stream) {
    return stream_loop(in, out, diag, 1, [&](const Batch& batch, const std::string& label) {
      const PointCloud3 cloud = io::parse_cloud_json(batch.records.front(), label);
      std::string record = "{\"scans\":[";
      const auto scans = virtualize(cloud, cfg.tree, v.config);
      for (std::size_t k = 0; k < scans.size(); ++k) {
        if (k) record += ',';
        record += io::format_scan(scans[k].scan);
      }
      return record + "]}";
    });
  }

  if (inv.inputs.size() > 1) throw ConfigError("virtualize takes a single cloud file");
  fs::path cloud_path;
  if (!inv.inputs.empty()) {
    cloud_path = inv.inputs.front();
  } else if (!v.cloud_input.empty()) {
    cloud_path = relative_to(inv.config_path, v.cloud_input);
  } else {
    throw ConfigError("virtualize.cloud_input: missing and no cloud file given");
  }
  const PointCloud3 cloud = io::read_cloud(cloud_path);
  const auto scans = virtualize(cloud, cfg.tree, v.config);
  for (const auto& s : scans) diag.info("virtualize " + s.frame.str() + ": " + describe(s.stats));

  fs::path target;
  if (!inv.output.empty()) {
    target = inv.output;
  } else if (!v.scan_output.empty()) {
    target = relative_to(inv.config_path, v.scan_output);
  }

  if (target.empty()) {
    for (const auto& s : scans) out << io::format_scan(s.scan) << "\n";
    out << std::flush;
    return kOk;
  }
  StagedOutputs outputs;
  if (v.config.combined_output) {
    std::string text;
    for (const auto& s : scans) text += io::format_scan(s.scan) + "\n";
    outputs.add(target, text);
  } else {
    for (const auto& s : scans) outputs.add(per_frame_path(target, s.frame), io::format_scan(s.scan) + "\n");
  }
  outputs.commit();
  return kOk;
}

// ---- gen-scene -------------------------------------------------------------------------------

int run_gen_scene(const Invocation& inv, const Diagnostics& diag) {
  if (inv.scene_path.empty()) throw ConfigError("--scene is required");
  if (inv.output.empty()) throw ConfigError("-o/--output directory is required");
  const io::SceneFile scene = io::read_scene(inv.scene_path);
  if (scene.sensors.empty()) diag.warn(inv.scene_path + ": no sensors, nothing to generate");

  const fs::path dir(inv.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

  StagedOutputs outputs;
  for (const auto& s : scene.sensors) {
    if (s.cloud) {
      const PointCloud3 cloud = raycast_cloud(scene.scene, s.pose, s.geometry, s.elevations, s.frame);
      diag.info("gen-scene " + s.frame.str() + ": " + std::to_string(cloud.size()) + " points");
      outputs.add(dir / (s.frame.str() + ".pcd"), io::format_cloud_pcd(cloud));
    } else {
      const LaserScan scan = raycast_scan(scene.scene, s.pose, s.geometry, s.frame);
      outputs.add(dir / (s.frame.str() + ".json"), io::format_scan(scan) + "\n");
    }
  }
  outputs.commit();
  return kOk;
}

// ---- check-config ----------------------------------------------------------------------------

int run_check_config(const Invocation& inv, const Diagnostics& diag) {
  const io::Config cfg = load_config(inv);
  if (!cfg.merge && !cfg.virtualize) throw ConfigError(inv.config_path + ": neither [merge] nor [virtualize] present");

  if (cfg.merge) {
    const io::MergeSection& m = *cfg.merge;
    for (const auto& input : m.config.inputs) {
      const fs::path p = relative_to(inv.config_path, input);
      if (!fs::exists(p)) {
        diag.info("check-config: input '" + input + "' not found, its frame is checked at merge time");
        continue;
      }
      cfg.tree.lookup(io::read_scan(p).frame(), m.config.destination_frame);
    }
  }
  if (cfg.virtualize) {
    const io::VirtualizeSection& v = *cfg.virtualize;
    for (const FrameId& f : v.config.virtual_frames) cfg.tree.lookup(v.config.base_frame, f);
    if (!v.cloud_input.empty()) {
      const fs::path p = relative_to(inv.config_path, v.cloud_input);
      if (fs::exists(p)) cfg.tree.lookup(io::read_cloud(p).frame(), v.config.base_frame);
    }
  }
  diag.err << inv.config_path << ": ok\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Merge planar laser scans and derive virtual scans from point clouds", "laser_tools"};
  app.require_subcommand(1);

  Invocation inv;
  const auto common = [&](CLI::App* sub, bool with_config) {
    if (with_config) sub->add_option("--config", inv.config_path, "Configuration file")->required();
    sub->add_flag("-v,--verbose", "Print diagnostics (repeatable)");
  };

  CLI::App* merge = app.add_subcommand("merge", "Merge scans into one scan in the destination frame");
  common(merge, true);
  auto* merge_inputs = merge->add_option("scans", inv.inputs, "Input scan files, one per configured input");
  auto* merge_stream = merge->add_flag("--stream", inv.stream, "Read batches of scan records from stdin");
  merge_stream->excludes(merge_inputs);
  merge->add_option("-o,--output", inv.output, "Merged scan file");

  CLI::App* virt = app.add_subcommand("virtualize", "Generate virtual scans from a point cloud");
  common(virt, true);
  auto* virt_input = virt->add_option("cloud", inv.inputs, "Input cloud (ASCII PCD)");
  auto* virt_stream = virt->add_flag("--stream", inv.stream, "Read cloud records from stdin");
  virt_stream->excludes(virt_input);
  virt->add_option("-o,--output", inv.output, "Output file (combined) or base name for per-frame files");

  CLI::App* gen = app.add_subcommand("gen-scene", "Raycast the sensors of a scene file");
  common(gen, false);
  gen->add_option("--scene", inv.scene_path, "Scene file")->required();
  gen->add_option("-o,--output", inv.output, "Output directory")->required();

  CLI::App* check = app.add_subcommand("check-config", "Validate a configuration and its transform tree");
  common(check, true);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  // Each subcommand owns its own -v; only the parsed one counts.
  for (const CLI::App* sub : {merge, virt, gen, check}) {
    if (sub->parsed()) inv.verbosity = static_cast<int>(sub->count("--verbose"));
  }
  const Diagnostics diag{err, inv.verbosity};
  try {
    if (merge->parsed()) return run_merge(inv, in, out, diag);
    if (virt->parsed()) return run_virtualize(inv, in, out, diag);
    if (gen->parsed()) return run_gen_scene(inv, diag);
    return run_check_config(inv, diag);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIoError;
  } catch (const ParseError& e) {
    err << "input error: " << e.what() << "\n";
    return kIoError;
  } catch (const FrameError& e) {
    err << "frame error: " << e.what() << "\n";
    return kFrameError;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace laser_tools::cli
