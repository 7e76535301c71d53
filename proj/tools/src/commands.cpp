// SPDX-License-Identifier: Apache-2.0
#include "linetrace/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "linetrace/cli/teleop.hpp"
#include "linetrace/error.hpp"
#include "linetrace/imaging/png_io.hpp"
#include "linetrace/models/architectures.hpp"
#include "linetrace/plot/raster_plot.hpp"
#include "linetrace/sim/collect.hpp"
#include "linetrace/sim/occlusion.hpp"
#include "linetrace/sim/survey.hpp"
#include "linetrace/threshold/gini_tree.hpp"
#include "linetrace/util/rng.hpp"

namespace linetrace::cli {

namespace fs = std::filesystem;
using nlohmann::json;

sim::TrackWorld resolve_world(const std::string& spec) {
  const std::string prefix = "preset:";
  if (spec.rfind(prefix, 0) == 0) {
    const std::string name = spec.substr(prefix.size());
    if (name == "oval") return sim::presets::oval();
    if (name == "s_curve") return sim::presets::s_curve();
    if (name == "test_loop") return sim::presets::test_loop();
    throw ConfigError("unknown world preset '" + name + "' (oval, s_curve, test_loop)");
  }
  if (!fs::exists(spec)) throw NotFoundError("world file not found: " + spec);
  return sim::load_world(spec);
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("config file not found: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  json doc;
  try {
    doc = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), 0, "", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError(path.string(), 0, "", "expected a JSON object");
  RunConfig cfg;
  if (doc.contains("sim")) cfg.sim = sim::sim_config_from_json(doc["sim"].dump(), path.string() + ":sim");
  if (doc.contains("train")) {
    const json& t = doc["train"];
    auto num = [&](const char* key, double fallback) {
      if (!t.contains(key)) return fallback;
      if (!t[key].is_number()) throw ParseError(path.string(), 0, std::string("train.") + key, "expected a number");
      return t[key].get<double>();
    };
    cfg.train.epochs = static_cast<int>(num("epochs", cfg.train.epochs));
    cfg.train.batch_size = static_cast<std::size_t>(num("batch_size", static_cast<double>(cfg.train.batch_size)));
    cfg.train.learning_rate = num("learning_rate", cfg.train.learning_rate);
    cfg.train.accuracy_delta = num("accuracy_delta", cfg.train.accuracy_delta);
  }
  return cfg;
}

namespace {

struct Common {
  std::uint64_t seed = 0;
  fs::path out = ".";
  fs::path config;
};

RunConfig run_config(const Common& c) { return c.config.empty() ? RunConfig{} : load_run_config(c.config); }

fs::path prepare_out(const Common& c) {
  fs::create_directories(c.out);
  return c.out;
}

threshold::HsvThreshold world_threshold(const fs::path& dir, const sim::TrackWorld& world) {
  return threshold::load_threshold(threshold::threshold_path(dir, world.color));
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(precision) << v;
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

dataset::DemoSet read_all(const std::vector<std::string>& paths) {
  dataset::DemoSet all;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    dataset::DemoSet s = dataset::read_csv(paths[i]);
    if (i == 0) all = std::move(s);
    else all.append(s);
  }
  return all;
}

std::string metrics_header() { return "split,samples,accuracy,loss,mae_linear,mae_angular,rmse_linear,rmse_angular\n"; }

std::string metrics_row(const std::string& name, const models::MetricReport& m) {
  return name + "," + std::to_string(m.samples) + "," + fmt(m.accuracy, 6) + "," + fmt(m.loss, 6) + "," +
         fmt(m.mae_linear, 6) + "," + fmt(m.mae_angular, 6) + "," + fmt(m.rmse_linear, 6) + "," +
         fmt(m.rmse_angular, 6) + "\n";
}

// ---- train-threshold ------------------------------------------------------

struct ThresholdArgs {
  std::string pixels;
  std::string color;
  int max_depth = 2;
};

int cmd_train_threshold(const Common& c, const ThresholdArgs& a, std::ostream& out, std::ostream& err) {
  const threshold::LabeledPixelSet set = threshold::read_pixel_csv(a.pixels);
  const std::size_t line = set.count(threshold::Label::Line), other = set.count(threshold::Label::NonLine);
  if (line == 0 || other == 0) {
    err << "error: " << a.pixels << " has a single class (" << line << " line, " << other
        << " non-line pixels); a threshold needs both\n";
    return 1;
  }
  const threshold::DecisionTree tree = threshold::fit_tree(set, a.max_depth);
  const threshold::HsvThreshold thr = threshold::to_threshold(tree, a.color);
  const double acc = threshold::evaluate(tree, set);
  const fs::path path = threshold::threshold_path(prepare_out(c), a.color);
  threshold::save_threshold(thr, path);
  out << "pixels: " << set.size() << " (" << line << " line)\n"
      << "tree depth: " << tree.depth() << "\n"
      << "accuracy: " << fmt(acc, 4) << "\n"
      << "threshold: " << path.string() << "\n";
  return 0;
}

// ---- survey ---------------------------------------------------------------

struct SurveyArgs {
  std::string world;
  sim::SurveyOptions opt;
  std::string output;
};

int cmd_survey(const Common& c, SurveyArgs a, std::ostream& out, std::ostream&) {
  const RunConfig cfg = run_config(c);
  const sim::TrackWorld world = resolve_world(a.world);
  a.opt.seed = c.seed;
  const auto set = sim::survey_pixels(world, cfg.sim, a.opt);
  const fs::path path = a.output.empty() ? prepare_out(c) / (world.color + ".pixels.csv") : fs::path(a.output);
  threshold::write_pixel_csv(set, path);
  out << "pixels: " << set.size() << " (" << set.count(threshold::Label::Line) << " line) -> " << path.string() << "\n";
  return 0;
}

// ---- collect --------------------------------------------------------------

struct CollectArgs {
  std::vector<std::string> worlds;
  std::string threshold_dir;
  sim::CollectOptions opt;
  std::string output;
};

int cmd_collect(const Common& c, CollectArgs a, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = run_config(c);
  const fs::path dir = a.threshold_dir.empty() ? c.out : fs::path(a.threshold_dir);
  dataset::DemoSet all;
  all.provenance = dataset::Provenance::Oracle;
  for (std::size_t i = 0; i < a.worlds.size(); ++i) {
    const sim::TrackWorld world = resolve_world(a.worlds[i]);
    const threshold::HsvThreshold thr = world_threshold(dir, world);
    sim::CollectOptions opt = a.opt;
    opt.seed = mix64(c.seed + i);
    const sim::Collection col = sim::collect_demos(world, cfg.sim, thr, opt);
    for (std::size_t r = 0; r < col.rounds.size(); ++r)
      if (col.rounds[r].off_track)
        err << "warning: " << world.name << " round " << r + 1 << " left the track after "
            << col.rounds[r].records << " frames; keeping the partial round\n";
    out << world.name << ": " << col.demos.size() << " records in " << col.rounds.size() << " rounds\n";
    all.append(col.demos);
  }
  const fs::path path = a.output.empty() ? prepare_out(c) / "demos.csv" : fs::path(a.output);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  dataset::write_csv(all, path);
  out << "records: " << all.size() << " -> " << path.string() << "\n";
  return 0;
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::vector<std::string> data;
  std::string model = "mlp";
  std::string name;
  bool no_augment = false;
  std::optional<int> epochs;
  std::optional<std::size_t> batch_size;
  std::optional<double> lr;
  std::optional<double> delta;
};

int cmd_train(const Common& c, const TrainArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig cfg = run_config(c);
  if (a.epochs) cfg.train.epochs = *a.epochs;
  if (a.batch_size) cfg.train.batch_size = *a.batch_size;
  if (a.lr) cfg.train.learning_rate = *a.lr;
  if (a.delta) cfg.train.accuracy_delta = *a.delta;
  cfg.train.seed = c.seed;
  cfg.train.validate();

  const models::Architecture arch = models::parse_architecture(a.model);
  dataset::DemoSet data = read_all(a.data);
  if (data.size() < 100) {
    err << "error: training needs at least 100 records, got " << data.size() << "\n";
    return 1;
  }
  if (!a.no_augment) data = dataset::mirror_augment(data);
  const dataset::Splits sp = dataset::split(data, {0.72, 0.20, 0.08, c.seed});
  err << "records: " << data.size() << (a.no_augment ? "" : " (mirrored)") << ", split train/test/val "
      << sp.train.size() << "/" << sp.test.size() << "/" << sp.val.size() << "\n";

  nn::Network net = models::build(arch, c.seed);
  err << "model: " << models::architecture_name(arch) << "\n";
  for (const auto& row : models::architecture_table(net)) err << "  " << std::left << std::setw(22) << row.layer << nn::to_string(row.output) << "\n";
  err << "parameters: " << net.parameter_count() << "\n";

  const models::TrainHistory hist = models::train(net, sp.train, sp.val, cfg.train, [&](const models::EpochRecord& e) {
    err << "epoch " << e.epoch << "/" << cfg.train.epochs << " train_loss " << fmt(e.train_loss, 6) << " val_loss "
        << fmt(e.val_loss, 6) << "\n";
  });

  const fs::path dir = prepare_out(c);
  const std::string stem = a.name.empty() ? models::architecture_name(arch) : a.name;
  net.save(dir / (stem + ".ltnn"));
  hist.write_csv(dir / (stem + ".history.csv"));

  plot::LineChart chart{stem + " loss", "epoch", "MSE", {}};
  plot::Series tr{"training", {}, {}, plot::kBlue}, va{"validation", {}, {}, plot::kOrange};
  for (const auto& e : hist.epochs) {
    tr.x.push_back(e.epoch);
    tr.y.push_back(e.train_loss);
    va.x.push_back(e.epoch);
    va.y.push_back(e.val_loss);
  }
  chart.series = {tr, va};
  imaging::write_png(plot::render_line_chart(chart), dir / (stem + ".loss.png"));

  std::string table = metrics_header();
  for (const auto& [name, set] : {std::pair<std::string, const dataset::DemoSet*>{"train", &sp.train},
                                  {"val", &sp.val},
                                  {"test", &sp.test}})
    if (!set->empty()) table += metrics_row(name, models::evaluate(net, *set, cfg.train.accuracy_delta));
  write_text(dir / (stem + ".metrics.csv"), table);
  out << table;
  out << "model: " << (dir / (stem + ".ltnn")).string() << "\n";
  return 0;
}

// ---- eval -----------------------------------------------------------------

struct EvalArgs {
  std::string model_file;
  std::vector<std::string> data;
  double delta = 0.1;
};

int cmd_eval(const Common& c, const EvalArgs& a, std::ostream& out, std::ostream&) {
  nn::Network net = nn::Network::load(fs::path(a.model_file));
  const dataset::DemoSet data = read_all(a.data);
  const models::MetricReport m = models::evaluate(net, data, a.delta);
  const std::string table = metrics_header() + metrics_row("all", m);
  write_text(prepare_out(c) / "eval.csv", table);
  out << table;
  return 0;
}

// ---- compare --------------------------------------------------------------

struct CompareArgs {
  std::string world;
  std::vector<std::string> model_files;
  std::string reference = "oracle";
  std::vector<double> lighting{1.0};
  std::optional<std::size_t> frames;
  std::string threshold_dir;
};

std::string lighting_tag(double l) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "l%.2f", l);
  return buf;
}

int cmd_compare(const Common& c, const CompareArgs& a, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = run_config(c);
  const sim::TrackWorld world = resolve_world(a.world);
  const fs::path tdir = a.threshold_dir.empty() ? c.out : fs::path(a.threshold_dir);
  const threshold::HsvThreshold thr = world_threshold(tdir, world);
  const fs::path dir = prepare_out(c);

  sim::EpisodeTrace ref;
  if (a.reference == "oracle") {
    sim::OracleDriver oracle(cfg.sim.oracle);
    sim::EpisodeOptions eo;
    eo.frames = a.frames.value_or(600);
    eo.stop_on_completion = true;
    ref = sim::run_episode(world, oracle, cfg.sim, eo);
    if (ref.off_track) err << "warning: the oracle left the track; comparing over " << ref.frames.size() << " frames\n";
  } else {
    ref = sim::read_trace_csv(a.reference);
    if (a.frames && *a.frames != ref.frames.size())
      throw ShapeError("length mismatch: reference trace has " + std::to_string(ref.frames.size()) +
                       " frames, --frames asks for " + std::to_string(*a.frames));
  }
  sim::write_trace_csv(ref, dir / "reference_trace.csv");

  std::string table = "model,lighting,frames,mae_linear,mae_angular\n";
  std::vector<plot::LineChart> panels;
  std::vector<double> tx;
  for (const auto& f : ref.frames) tx.push_back(f.t);
  out << std::left << std::setw(28) << "model" << std::setw(10) << "linear" << "angular\n";
  for (const auto& mf : a.model_files) {
    nn::Network net = nn::Network::load(fs::path(mf));
    const std::string stem = fs::path(mf).stem().string();
    for (double lam : a.lighting) {
      const sim::TrackWorld lit = world.with_lighting(lam);
      sim::ModelDriver driver(net, thr, cfg.sim.blur);
      const sim::EpisodeTrace tr = sim::replay_open_loop(lit, ref, driver, cfg.sim);
      const sim::TraceComparison cmp = sim::compare_traces(tr, ref);
      sim::write_trace_csv(tr, dir / ("trace_" + stem + "_" + lighting_tag(lam) + ".csv"));
      table += stem + "," + fmt(lam, 2) + "," + std::to_string(cmp.frames) + "," + fmt(cmp.mae_linear, 6) + "," +
               fmt(cmp.mae_angular, 6) + "\n";
      const std::string label = stem + (lam < 1.0 ? " (low light " + fmt(lam, 2) + ")" : "");
      out << std::left << std::setw(28) << label << std::setw(10) << fmt(cmp.mae_linear, 3) << fmt(cmp.mae_angular, 3)
          << "\n";
      for (int comp = 0; comp < 2; ++comp) {
        plot::Series rs{"reference", tx, {}, plot::kBlue}, ms{stem, tx, {}, plot::kOrange};
        for (std::size_t i = 0; i < ref.frames.size(); ++i) {
          const auto rd = ref.frames[i].decision(), md = tr.frames[i].decision();
          rs.y.push_back(comp == 0 ? rd.linear : rd.angular);
          ms.y.push_back(comp == 0 ? md.linear : md.angular);
        }
        panels.push_back({label + (comp == 0 ? " linear" : " angular"), "t (s)", comp == 0 ? "v" : "w", {rs, ms}});
      }
    }
  }
  write_text(dir / "compare.csv", table);
  if (!panels.empty()) imaging::write_png(plot::render_panels(panels, 2), dir / "compare.png");
  return 0;
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string world;
  std::string driver = "oracle";
  std::string model_file;
  std::string threshold_dir;
  std::size_t frames = 600;
  std::optional<double> lighting;
  double linear = 1.0;
  double angular = 0.0;
  std::vector<double> occlude;  // blocked, open
  bool sweep = false;
  bool stop_on_completion = false;
  std::string dump_frames;
  std::string output;
};

int cmd_simulate(const Common& c, const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = run_config(c);
  sim::TrackWorld world = resolve_world(a.world);
  if (a.lighting) world = world.with_lighting(*a.lighting);
  if (!a.occlude.empty()) {
    if (a.occlude.size() != 2) throw ConfigError("--occlude-curves takes BLOCKED OPEN lengths in metres");
    world = sim::occlusion_scenario(world, sim::block_curves(world, a.occlude[0], a.occlude[1]), cfg.sim.camera);
    err << "occluders: " << world.occluders.size() << " rectangles, sweep passed\n";
  } else if (a.sweep && !world.occluders.empty()) {
    const auto plan = world.occluders;
    world = sim::occlusion_scenario(world.with_occluders({}), plan, cfg.sim.camera);
    err << "sweep passed for " << plan.size() << " occluders\n";
  }

  std::unique_ptr<sim::Driver> driver;
  std::optional<nn::Network> net;
  if (a.driver == "oracle") {
    driver = std::make_unique<sim::OracleDriver>(cfg.sim.oracle);
  } else if (a.driver == "model") {
    if (a.model_file.empty()) throw ConfigError("--driver model needs --model-file");
    net.emplace(nn::Network::load(fs::path(a.model_file)));
    const fs::path tdir = a.threshold_dir.empty() ? c.out : fs::path(a.threshold_dir);
    driver = std::make_unique<sim::ModelDriver>(*net, world_threshold(tdir, world), cfg.sim.blur);
  } else if (a.driver == "constant") {
    driver = std::make_unique<sim::CommandDriver>(sim::DriveCommand{a.linear, a.angular});
  } else {
    throw ConfigError("unknown driver '" + a.driver + "' (oracle, model, constant)");
  }

  const fs::path dir = prepare_out(c);
  sim::EpisodeOptions eo;
  eo.frames = a.frames;
  eo.stop_on_completion = a.stop_on_completion;
  if (!a.dump_frames.empty()) {
    fs::create_directories(a.dump_frames);
    eo.render_every_frame = true;
    eo.on_frame = [&](const sim::EpisodeRunner::Step& st) {
      if (st.frame.empty()) return;
      char name[32];
      std::snprintf(name, sizeof name, "frame_%05zu.png", st.record.frame);
      imaging::write_png(st.frame, fs::path(a.dump_frames) / name);
    };
  }
  const sim::EpisodeTrace trace = sim::run_episode(world, *driver, cfg.sim, eo);
  const fs::path path = a.output.empty() ? dir / "trace.csv" : fs::path(a.output);
  sim::write_trace_csv(trace, path);
  out << "world: " << world.name << " lighting " << fmt(world.lighting, 2) << "\n"
      << "frames: " << trace.frames.size() << "\n"
      << "completed: " << (trace.completed ? "yes" : "no") << "\n"
      << "off_track: " << (trace.off_track ? "yes" : "no") << "\n"
      << "progress_m: " << fmt(trace.progress, 3) << "\n"
      << "mean_xtrack_m: " << fmt(trace.mean_xtrack(), 5) << "\n"
      << "max_xtrack_m: " << fmt(trace.max_xtrack(), 5) << "\n"
      << "trace: " << path.string() << "\n";
  if (trace.off_track) err << "warning: robot left the track at frame " << trace.frames.back().frame << "\n";
  return 0;
}

// ---- heatmap --------------------------------------------------------------

struct HeatmapArgs {
  std::vector<std::string> data;
  std::string component = "angular";
  std::size_t bins = 21;
  std::size_t index_bins = 0;
};

int cmd_heatmap(const Common& c, const HeatmapArgs& a, std::ostream& out, std::ostream&) {
  const dataset::DemoSet data = read_all(a.data);
  const fs::path dir = prepare_out(c);
  std::vector<dataset::Component> comps;
  if (a.component == "both") comps = {dataset::Component::Linear, dataset::Component::Angular};
  else comps = {dataset::parse_component(a.component)};
  for (const auto comp : comps) {
    const std::string name = comp == dataset::Component::Linear ? "linear" : "angular";
    const dataset::Heatmap h = dataset::heatmap(data, comp, a.bins, a.index_bins);
    std::string csv = "value_bin,value_lo,value_hi";
    for (std::size_t j = 0; j < h.index_bins; ++j) csv += ",idx_" + std::to_string(j);
    csv += "\n";
    plot::HeatmapChart chart{name + " velocity distribution", "record index (fraction)", name, {}, 0.0, 1.0, 1.0, -1.0};
    // Rows drawn top to bottom from +1 down to -1.
    for (std::size_t r = h.value_bins; r-- > 0;) {
      std::vector<double> row;
      for (std::size_t j = 0; j < h.index_bins; ++j) row.push_back(static_cast<double>(h.at(r, j)));
      chart.cells.push_back(row);
    }
    for (std::size_t r = 0; r < h.value_bins; ++r) {
      const double lo = -1.0 + 2.0 * static_cast<double>(r) / h.value_bins, hi = lo + 2.0 / h.value_bins;
      csv += std::to_string(r) + "," + fmt(lo, 4) + "," + fmt(hi, 4);
      for (std::size_t j = 0; j < h.index_bins; ++j) csv += "," + std::to_string(h.at(r, j));
      csv += "\n";
    }
    write_text(dir / ("heatmap_" + name + ".csv"), csv);
    imaging::write_png(plot::render_heatmap(chart), dir / ("heatmap_" + name + ".png"));
    out << name << ": " << h.total() << " records -> " << (dir / ("heatmap_" + name + ".csv")).string() << "\n";
  }
  return 0;
}

// ---- serve ----------------------------------------------------------------

struct ServeArgs {
  std::string world;
  std::string threshold_dir;
  ServeOptions opt;
  std::string static_dir;
};

int cmd_serve(const Common& c, ServeArgs a, std::ostream&, std::ostream& err) {
  const RunConfig cfg = run_config(c);
  const sim::TrackWorld world = resolve_world(a.world);
  const fs::path tdir = a.threshold_dir.empty() ? c.out : fs::path(a.threshold_dir);
  std::optional<threshold::HsvThreshold> thr;
  try {
    thr = world_threshold(tdir, world);
  } catch (const NotFoundError& e) {
    err << "warning: " << e.what() << "; recording is disabled\n";
  }
  TeleopSession session(world, cfg.sim, thr);
  a.opt.out_dir = prepare_out(c);
  if (!a.static_dir.empty()) a.opt.static_dir = a.static_dir;
  serve_teleop(session, a.opt, err);
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Camera-based line following: thresholds, demonstrations, models, simulation"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--seed", common.seed, "Seed for every random choice")->default_val(0);
  app.add_option("--out", common.out, "Output directory (created if absent)")->default_val(".");
  app.add_option("--config", common.config, "JSON config with \"sim\" and \"train\" sections");

  ThresholdArgs ta;
  auto* s_thr = app.add_subcommand("train-threshold", "Fit the HSV decision tree on labeled pixels");
  s_thr->add_option("--pixels", ta.pixels, "CSV with h,s,v,label")->required();
  s_thr->add_option("--color", ta.color, "Track color name")->required();
  s_thr->add_option("--max-depth", ta.max_depth)->default_val(2)->check(CLI::Range(1, 8));

  SurveyArgs sa;
  auto* s_sur = app.add_subcommand("survey", "Label pixels from rendered frames for threshold training");
  s_sur->add_option("--world", sa.world, "World JSON or preset:NAME")->required();
  s_sur->add_option("--images", sa.opt.images)->default_val(20);
  s_sur->add_option("--pixels-per-image", sa.opt.pixels_per_image)->default_val(4000);
  s_sur->add_option("--lighting-min", sa.opt.lighting_min)->default_val(0.35);
  s_sur->add_option("--lighting-max", sa.opt.lighting_max)->default_val(1.0);
  s_sur->add_option("--output", sa.output, "Pixel CSV path (default <out>/<color>.pixels.csv)");

  CollectArgs ca;
  auto* s_col = app.add_subcommand("collect", "Record oracle demonstrations as a DemoSet CSV");
  s_col->add_option("--world", ca.worlds, "World JSON or preset:NAME (repeatable)")->required();
  s_col->add_option("--threshold-dir", ca.threshold_dir, "Directory with <color>.threshold.json (default --out)");
  s_col->add_option("--frames", ca.opt.frames, "Frames per round")->default_val(600);
  s_col->add_option("--rounds", ca.opt.rounds)->default_val(1)->check(CLI::PositiveNumber);
  s_col->add_option("--exec-noise", ca.opt.exec_noise, "Angular disturbance stddev")->default_val(0.25);
  s_col->add_flag("--vary", ca.opt.vary, "Jitter the camera footprint between rounds");
  s_col->add_option("--output", ca.output, "CSV path (default <out>/demos.csv)");

  TrainArgs tra;
  auto* s_train = app.add_subcommand("train", "Train a velocity regressor");
  s_train->add_option("--data", tra.data, "DemoSet CSV (repeatable)")->required();
  s_train->add_option("--model", tra.model, "mlp or cnn1d")->default_val("mlp");
  s_train->add_option("--name", tra.name, "Output file stem (default: model name)");
  s_train->add_flag("--no-augment", tra.no_augment, "Skip mirror augmentation");
  s_train->add_option("--epochs", tra.epochs);
  s_train->add_option("--batch-size", tra.batch_size);
  s_train->add_option("--lr", tra.lr);
  s_train->add_option("--delta", tra.delta, "Tolerance of the accuracy metric");

  EvalArgs ea;
  auto* s_eval = app.add_subcommand("eval", "Report metrics of a model on a DemoSet");
  s_eval->add_option("--model-file", ea.model_file)->required();
  s_eval->add_option("--data", ea.data)->required();
  s_eval->add_option("--delta", ea.delta)->default_val(0.1);

  CompareArgs cpa;
  auto* s_cmp = app.add_subcommand("compare", "Model vs reference velocity MAE over the reference's frames");
  s_cmp->add_option("--world", cpa.world)->required();
  s_cmp->add_option("--model-file", cpa.model_files, "Model file (repeatable)")->required();
  s_cmp->add_option("--reference", cpa.reference, "oracle or a trace CSV")->default_val("oracle");
  s_cmp->add_option("--lighting", cpa.lighting, "Lighting scalar (repeatable)")->default_val(std::vector<double>{1.0});
  s_cmp->add_option("--frames", cpa.frames, "Oracle reference length / expected trace length");
  s_cmp->add_option("--threshold-dir", cpa.threshold_dir);

  SimulateArgs sma;
  auto* s_sim = app.add_subcommand("simulate", "Closed-loop episode with a trace CSV");
  s_sim->add_option("--world", sma.world)->required();
  s_sim->add_option("--driver", sma.driver, "oracle, model or constant")->default_val("oracle");
  s_sim->add_option("--model-file", sma.model_file);
  s_sim->add_option("--threshold-dir", sma.threshold_dir);
  s_sim->add_option("--frames", sma.frames)->default_val(600);
  s_sim->add_option("--lighting", sma.lighting);
  s_sim->add_option("--linear", sma.linear, "Constant driver command")->default_val(1.0);
  s_sim->add_option("--angular", sma.angular, "Constant driver command")->default_val(0.0);
  s_sim->add_option("--occlude-curves", sma.occlude, "BLOCKED OPEN: alternate occluded stretches on curves")
      ->expected(2);
  s_sim->add_flag("--sweep", sma.sweep, "Validate the world's occluders with the visibility sweep");
  s_sim->add_flag("--stop-on-completion", sma.stop_on_completion);
  s_sim->add_option("--dump-frames", sma.dump_frames, "Directory for per-frame PNGs");
  s_sim->add_option("--output", sma.output, "Trace CSV path (default <out>/trace.csv)");

  HeatmapArgs ha;
  auto* s_heat = app.add_subcommand("heatmap", "Velocity label distribution grid");
  s_heat->add_option("--data", ha.data)->required();
  s_heat->add_option("--component", ha.component, "linear, angular or both")->default_val("angular");
  s_heat->add_option("--bins", ha.bins)->default_val(21)->check(CLI::PositiveNumber);
  s_heat->add_option("--index-bins", ha.index_bins, "Columns over record index (0 = same as --bins)")->default_val(0);

  ServeArgs sva;
  auto* s_srv = app.add_subcommand("serve", "Teleoperation service (HTTP + WebSocket /teleop)");
  s_srv->add_option("--world", sva.world)->required();
  s_srv->add_option("--threshold-dir", sva.threshold_dir);
  s_srv->add_option("--address", sva.opt.address)->default_val("127.0.0.1");
  s_srv->add_option("--port", sva.opt.port)->default_val(8080);
  s_srv->add_option("--duration", sva.opt.duration, "Seconds to serve, 0 = until interrupted")->default_val(0.0);
  s_srv->add_option("--static", sva.static_dir, "Directory of UI assets served at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (*s_thr) return cmd_train_threshold(common, ta, out, err);
    if (*s_sur) return cmd_survey(common, sa, out, err);
    if (*s_col) return cmd_collect(common, ca, out, err);
    if (*s_train) return cmd_train(common, tra, out, err);
    if (*s_eval) return cmd_eval(common, ea, out, err);
    if (*s_cmp) return cmd_compare(common, cpa, out, err);
    if (*s_sim) return cmd_simulate(common, sma, out, err);
    if (*s_heat) return cmd_heatmap(common, ha, out, err);
    if (*s_srv) return cmd_serve(common, sva, out, err);
  } catch (const sim::OcclusionRejected& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace linetrace::cli
