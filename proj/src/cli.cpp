#include "cobb/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

#include "cobb/error.hpp"
#include "cobb/mask_io.hpp"
#include "cobb/render.hpp"
#include "cobb/stats.hpp"

namespace cobb::cli {
namespace {

void report_error(std::ostream& err, const std::string& context, const std::exception& e) {
  if (const auto* ce = dynamic_cast<const Error*>(&e)) {
    err << "error [" << ce->stage() << "]" << (context.empty() ? "" : " " + context) << ": " << ce->what() << '\n';
  } else {
    err << "error" << (context.empty() ? "" : " " + context) << ": " << e.what() << '\n';
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Unreadable, "cli", "cannot write " + path.string());
  out << text;
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  write_text(path, std::string(bytes.begin(), bytes.end()));
}

bool is_mask_file(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".pgm";
}

}  // namespace

std::string case_json_text(const CaseResult& result) { return to_json(result).dump(2) + "\n"; }

int cmd_measure(const MeasureOptions& opts, const PipelineConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const SpineMask mask = load_mask(opts.mask);
    const CaseResult result = measure_image(mask, config);
    const std::string text = case_json_text(result);
    if (opts.json) write_text(*opts.json, text);
    else out << text;
    if (opts.svg) write_text(*opts.svg, render_svg(result));
    if (opts.png) {
      const GrayImage base = opts.image ? load_gray_image(*opts.image) : to_gray(mask);
      write_bytes(*opts.png, render_overlay(result, base, OverlayFormat::Png));
    }
    if (opts.centerline_csv) {
      const CroppedMask cropped = crop_to_roi(validate_mask(mask, config.min_area).mask);
      const auto normalized = normalize_centerline(extract_centerline(cropped.mask), config.normalized_length);
      write_centerline_csv(normalized, result.curve, *opts.centerline_csv);
    }
    return kExitOk;
  } catch (const std::exception& e) {
    report_error(err, opts.mask.string(), e);
    return kExitInput;
  }
}

int cmd_batch(const BatchOptions& opts, const PipelineConfig& config, std::ostream& out, std::ostream& err) {
  std::vector<std::filesystem::path> files;
  try {
    if (!std::filesystem::is_directory(opts.dir)) {
      throw Error(ErrorCode::Unreadable, "cli", opts.dir.string() + " is not a directory");
    }
    for (const auto& entry : std::filesystem::directory_iterator(opts.dir)) {
      if (entry.is_regular_file() && is_mask_file(entry.path())) files.push_back(entry.path());
    }
    std::filesystem::create_directories(opts.out);
  } catch (const std::exception& e) {
    report_error(err, "", e);
    return kExitInput;
  }
  std::sort(files.begin(), files.end());

  struct Outcome {
    std::string case_id;
    std::optional<CaseResult> result;
    std::string error;
  };
  std::vector<Outcome> outcomes(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      auto& o = outcomes[i];
      o.case_id = files[i].stem().string();
      try {
        o.result = measure_image(load_mask(files[i]), config);
        write_text(opts.out / (o.case_id + ".json"), case_json_text(*o.result));
        if (opts.overlays) write_text(opts.out / (o.case_id + ".svg"), render_svg(*o.result));
      } catch (const std::exception& e) {
        std::ostringstream msg;
        report_error(msg, files[i].filename().string(), e);
        o.error = msg.str();
      }
    }
  };
  const unsigned n_threads =
      std::max(1u, std::min<unsigned>(opts.threads ? opts.threads : std::thread::hardware_concurrency(),
                                      static_cast<unsigned>(std::max<std::size_t>(files.size(), 1))));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::sort(outcomes.begin(), outcomes.end(), [](const Outcome& a, const Outcome& b) { return a.case_id < b.case_id; });
  std::string table = "case_id,main_angle_deg,grade\n";
  std::size_t failures = 0;
  for (const auto& o : outcomes) {
    if (o.result) {
      table += o.case_id + "," + nlohmann::json(o.result->main_angle_deg).dump() + "," +
               std::to_string(o.result->grade.level) + "\n";
    } else {
      ++failures;
      err << o.error;
    }
  }
  try {
    write_text(opts.table.value_or(opts.out / "summary.csv"), table);
  } catch (const std::exception& e) {
    report_error(err, "", e);
    return kExitInput;
  }
  out << "processed " << outcomes.size() << " case(s), " << failures << " failed\n";
  return failures ? kExitPartial : kExitOk;
}

int cmd_stats(const StatsOptions& opts, const PipelineConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const ReaderTable table = load_reader_table(opts.readers);
    const AgreementReport report = build_agreement_report(table, config);
    const std::string summary = format_summary(report);
    if (opts.report) write_text(*opts.report, to_json(report).dump(2) + "\n");
    if (opts.summary) write_text(*opts.summary, summary);
    out << summary;
    return kExitOk;
  } catch (const std::exception& e) {
    report_error(err, opts.readers.string(), e);
    return kExitInput;
  }
}

int cmd_synth(const SynthOptions& opts, const PipelineConfig& config, std::ostream& out, std::ostream& err) {
  try {
    std::vector<SynthParams> specs = opts.grid ? synth_test_grid() : std::vector<SynthParams>{opts.params};
    std::filesystem::create_directories(opts.out);
    for (const auto& p : specs) {
      const SynthCase sc = generate(p, opts.seed, config);
      save_mask_png(sc.mask, opts.out / (p.name + ".png"));
      write_text(opts.out / (p.name + ".oracle.json"), to_json(sc.oracle, p).dump(2) + "\n");
    }
    out << "wrote " << specs.size() << " synthetic case(s) to " << opts.out.string() << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    report_error(err, "", e);
    return kExitInput;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cobb angle measurement from binary spine masks"};
  app.require_subcommand(1);

  // Shared pipeline options; flags override the config file.
  std::string config_path;
  std::map<std::string, std::string> overrides;
  auto add_pipeline_options = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value config file");
    for (const auto& [flag, key] : std::vector<std::pair<std::string, std::string>>{
             {"--tolerance", "tolerance_fraction"},
             {"--max-degree", "max_degree"},
             {"--normalized-length", "normalized_length"},
             {"--max-interval", "max_interval"},
             {"--grid-step", "grid_step"},
             {"--min-area", "min_area"},
             {"--seed", "seed"}}) {
      sub->add_option_function<std::string>(
          flag, [&overrides, key = key](const std::string& v) { overrides[key] = v; }, "overrides " + key);
    }
  };

  MeasureOptions measure;
  auto* m = app.add_subcommand("measure", "measure one mask");
  m->add_option("mask", measure.mask, "mask image (PNG or PGM)")->required();
  m->add_option("--image", measure.image, "original image used as the PNG overlay base");
  m->add_option("--json", measure.json, "write the case result JSON here (default stdout)");
  m->add_option("--svg", measure.svg, "write an SVG overlay");
  m->add_option("--png", measure.png, "write a PNG overlay");
  m->add_option("--centerline-csv", measure.centerline_csv, "debug dump of t, x_raw, f(t)");
  add_pipeline_options(m);

  BatchOptions batch;
  auto* b = app.add_subcommand("batch", "measure every mask in a directory");
  b->add_option("dir", batch.dir, "directory of masks")->required();
  b->add_option("--out", batch.out, "output directory for per-case JSON")->required();
  b->add_option("--table", batch.table, "summary CSV path (default <out>/summary.csv)");
  b->add_flag("--overlays", batch.overlays, "also write <case>.svg overlays");
  b->add_option("--threads", batch.threads, "worker threads (default: hardware concurrency)");
  add_pipeline_options(b);

  StatsOptions stats;
  auto* s = app.add_subcommand("stats", "agreement statistics for a reader table");
  s->add_option("readers", stats.readers, "CSV: case_id,<reader>...[,dl]")->required();
  s->add_option("--report", stats.report, "write the JSON report here");
  s->add_option("--summary", stats.summary, "also write the text summary here");
  add_pipeline_options(s);

  SynthOptions synth;
  std::string family = "sinusoid";
  auto* y = app.add_subcommand("synth", "generate synthetic masks with oracle angles");
  y->add_option("--family", family, "line | arc | sinusoid | double_sinusoid");
  y->add_option("--name", synth.params.name);
  y->add_option("--amplitude", synth.params.amplitude);
  y->add_option("--period", synth.params.period);
  y->add_option("--phase", synth.params.phase);
  y->add_option("--slope", synth.params.slope);
  y->add_option("--radius", synth.params.radius);
  y->add_option("--amplitude2", synth.params.amplitude2);
  y->add_option("--period2", synth.params.period2);
  y->add_option("--phase2", synth.params.phase2);
  y->add_option("--half-width", synth.params.half_width);
  y->add_option("--length", synth.params.spine_length, "spine length in rows");
  y->add_option("--width", synth.params.width, "raster width (default: fit the band)");
  y->add_option("--height", synth.params.height);
  y->add_option("--noise", synth.params.noise_px, "std-dev of per-row centre jitter, px");
  y->add_flag("--grid", synth.grid, "emit the full 36-case test grid");
  y->add_option("--out", synth.out, "output directory");
  add_pipeline_options(y);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitInput;
  }

  PipelineConfig config;
  try {
    if (!config_path.empty()) config = load_config(config_path);
    for (const auto& [key, value] : overrides) apply_setting(config, key, value);
    config.validate();
    if (*y) synth.params.family = parse_curve_family(family);
  } catch (const std::exception& e) {
    report_error(err, "", e);
    return kExitInput;
  }

  if (*m) return cmd_measure(measure, config, out, err);
  if (*b) return cmd_batch(batch, config, out, err);
  if (*s) return cmd_stats(stats, config, out, err);
  if (*y) {
    synth.seed = config.seed;
    return cmd_synth(synth, config, out, err);
  }
  return kExitInput;
}

}  // namespace cobb::cli
