// Copyright 2026 The nerfplan Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nerfplan/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nerfplan/core.hpp"
#include "nerfplan/json_io.hpp"
#include "nerfplan/log.hpp"
#include "nerfplan/parallel.hpp"
#include "nerfplan/profiler.hpp"
#include "nerfplan/raster.hpp"
#include "nerfplan/rng.hpp"
#include "nerfplan/segmentation.hpp"
#include "nerfplan/selector.hpp"
#include "nerfplan/simharness.hpp"

namespace nerfplan {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Raised for flag combinations CLI11 cannot express; exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SegmentArgs {
  std::string images_dir;
  std::string out_dir;
  std::string scene;
  std::string threshold = "auto";
  double energy = kDefaultEnergyFraction;
  std::string canvas;
  std::string out;
};

struct SamplePlanArgs {
  std::string scene;
  std::string out;
  double step_multiplier = 2.0;
};

struct ProfileArgs {
  std::string scene;
  std::string samples;
  std::string out;
};

struct BudgetArgs {
  std::string device;
  std::optional<double> budget_mb;
};

struct PlanArgs {
  std::string profiles;
  std::string out;
  BudgetArgs budget;
  double unit_mb = 1.0;
  std::string solver = "dp";
  bool strict_filter = false;
};

struct SimulateArgs {
  std::uint64_t seed = 0;
  int objects = 5;
  int scenes = 1;
  std::string profile = "random";
  std::string solvers = "dp,fairness,greedy,oracle";
  BudgetArgs budget;
  double noise_size = 1.0;
  double noise_quality = 0.005;
  double misspecified = 0.0;
  double unit_mb = 1.0;
  double step_multiplier = 2.0;
  bool timing = false;
  std::string out;
};

struct ReportArgs {
  std::string results;
  std::string out;
};

void add_budget_flags(CLI::App* cmd, BudgetArgs& b) {
  cmd->add_option("--device", b.device, "Device preset: iphone13 (240 MB) or pixel4 (150 MB)");
  cmd->add_option("--budget-mb", b.budget_mb, "Memory budget in MB")
      ->check(CLI::PositiveNumber);
}

// Exactly one of --device / --budget-mb unless `optional` allows neither.
std::vector<DeviceBudget> resolve_budgets(const BudgetArgs& b, bool allow_none) {
  const bool has_device = !b.device.empty();
  if (has_device && b.budget_mb) {
    throw UsageError("--device and --budget-mb are mutually exclusive");
  }
  if (has_device) {
    auto preset = DeviceBudget::preset(b.device);
    if (!preset) throw UsageError("--device: unknown preset '" + b.device + "'");
    return {*preset};
  }
  if (b.budget_mb) {
    return {DeviceBudget::make("custom", *b.budget_mb)};
  }
  if (!allow_none) throw UsageError("one of --device or --budget-mb is required");
  return {*DeviceBudget::preset("pixel4"), *DeviceBudget::preset("iphone13")};
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

SceneDescriptor load_scene(const fs::path& path) {
  SceneDescriptor scene = read_json_file(path).get<SceneDescriptor>();
  const ValidationReport report = validate_scene(scene);
  if (!report.ok()) {
    std::string msg = "invalid scene '" + path.string() + "':";
    for (const auto& v : report.violations) msg += " " + v + ";";
    throw Error(ErrorCode::kInvalidInput, msg);
  }
  return scene;
}

// ---- segment -------------------------------------------------------------

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void run_segment(const SegmentArgs& a, std::ostream& out) {
  ThresholdMode mode = ThresholdMode::auto_min();
  if (a.threshold != "auto") {
    try {
      std::size_t used = 0;
      const double alpha = std::stod(a.threshold, &used);
      if (used != a.threshold.size()) throw std::invalid_argument("trailing");
      mode = ThresholdMode::fixed(alpha);
    } catch (const std::exception&) {
      throw UsageError("--threshold: expected 'auto' or a number, got '" +
                       a.threshold + "'");
    }
  }
  std::optional<std::pair<int, int>> canvas;
  if (!a.canvas.empty()) {
    int w = 0;
    int h = 0;
    char x = 0;
    std::istringstream in(a.canvas);
    if (!(in >> w >> x >> h) || x != 'x' || w < 1 || h < 1 || !in.eof()) {
      throw UsageError("--canvas: expected WxH, got '" + a.canvas + "'");
    }
    canvas = std::pair{w, h};
  }

  std::optional<std::vector<std::string>> known;
  if (!a.scene.empty()) {
    std::vector<std::string> ids;
    for (const auto& o : load_scene(a.scene).objects) ids.push_back(o.id);
    known = ids;
  }

  // <image_id>.ppm|pgm and <image_id>.<object_id>.mask.pgm, in name order.
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(a.images_dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::map<std::string, ImageMasks> images;
  std::vector<std::pair<fs::path, std::string>> mask_files;
  for (const auto& path : files) {
    const std::string name = path.filename().string();
    if (ends_with(name, ".mask.pgm")) {
      mask_files.emplace_back(path, name.substr(0, name.size() - 9));
    } else if (ends_with(name, ".ppm") || ends_with(name, ".pgm")) {
      const std::string id = name.substr(0, name.size() - 4);
      if (id.find('.') != std::string::npos) {
        throw Error(ErrorCode::kInvalidInput,
                    "image id '" + id + "' must not contain '.'");
      }
      images[id] = ImageMasks{id, read_pnm(path), {}};
    }
  }
  for (const auto& [path, stem] : mask_files) {
    const auto dot = stem.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == stem.size()) {
      throw Error(ErrorCode::kInvalidInput,
                  "mask file '" + path.filename().string() +
                      "' is not <image_id>.<object_id>.mask.pgm");
    }
    const std::string image_id = stem.substr(0, dot);
    auto it = images.find(image_id);
    if (it == images.end()) {
      throw Error(ErrorCode::kInvalidInput,
                  "mask '" + path.filename().string() + "' has no image");
    }
    it->second.masks.push_back(read_mask(path, stem.substr(dot + 1), image_id));
  }
  std::vector<ImageMasks> batch;
  for (auto& [id, entry] : images) batch.push_back(std::move(entry));

  const unsigned threads = configured_threads();
  const auto scores =
      max_frequency_per_object(batch, known, a.energy, threads);
  const FrequencyReport report = select_by_threshold(scores, mode);

  const fs::path out_dir(a.out_dir);
  fs::create_directories(out_dir);
  struct CropJob {
    const ImageMasks* image;
    const ObjectMask* mask;
    std::string rel_path;
  };
  std::vector<CropJob> jobs;
  for (const auto& id : report.selected) {
    for (const auto& entry : batch) {
      for (const auto& mask : entry.masks) {
        if (mask.object_id != id) continue;
        const char* ext = entry.image.channels() == 3 ? ".ppm" : ".pgm";
        jobs.push_back({&entry, &mask,
                        (fs::path("crops") / id / (entry.image_id + ext)).generic_string()});
      }
    }
  }
  for (const auto& job : jobs) {
    fs::create_directories((out_dir / job.rel_path).parent_path());
  }
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    const auto& job = jobs[i];
    const int w = canvas ? canvas->first : job.image->image.width();
    const int h = canvas ? canvas->second : job.image->image.height();
    write_file_atomic(out_dir / job.rel_path,
                      encode_pnm(crop_and_scale(job.image->image, *job.mask, w, h)));
  });

  json doc = report;
  doc["energy_fraction"] = a.energy;
  doc["crops"] = json::array();
  for (const auto& job : jobs) {
    doc["crops"].push_back({{"object_id", job.mask->object_id},
                            {"image_id", job.image->image_id},
                            {"path", job.rel_path}});
  }
  const fs::path dest = a.out.empty() ? out_dir / "segments.json" : fs::path(a.out);
  write_file_atomic(dest, dump_json(doc));
  log::info("segment: " + std::to_string(report.selected.size()) +
            " dedicated objects, " + std::to_string(report.background.size()) +
            " in background; wrote " + dest.string());
  (void)out;
}

// ---- sample-plan / profile -------------------------------------------------

void run_sample_plan(const SamplePlanArgs& a) {
  const SceneDescriptor scene = load_scene(a.scene);
  json plans = json::array();
  for (const auto& object : scene.objects) {
    plans.push_back(sampling_plan(object.space(), a.step_multiplier));
  }
  write_file_atomic(a.out, dump_json(json{{"step_multiplier", a.step_multiplier},
                                          {"plans", plans}}));
}

void run_profile(const ProfileArgs& a) {
  const SceneDescriptor scene = load_scene(a.scene);
  std::map<std::string, std::vector<SampleObservation>> extra;
  if (!a.samples.empty()) {
    const json doc = read_json_file(a.samples);
    for (const auto& o : doc.at("objects")) {
      extra[o.at("id").get<std::string>()] =
          o.at("samples").get<std::vector<SampleObservation>>();
    }
    for (const auto& [id, unused] : extra) {
      const bool found = std::any_of(scene.objects.begin(), scene.objects.end(),
                                     [&](const SceneObject& o) { return o.id == id; });
      if (!found) {
        throw Error(ErrorCode::kUnknownObject,
                    "samples reference unknown object '" + id + "'");
      }
    }
  }
  std::vector<ProfileModel> models(scene.objects.size());
  parallel_for(scene.objects.size(), configured_threads(), [&](std::size_t i) {
    const SceneObject& object = scene.objects[i];
    auto it = extra.find(object.id);
    const auto& samples = it != extra.end() ? it->second : object.samples;
    models[i] = fit_profile(object.space(), samples);
  });
  json profiles = json::array();
  for (std::size_t i = 0; i < models.size(); ++i) {
    json p = models[i];
    p["space"] = scene.objects[i].space();
    profiles.push_back(std::move(p));
  }
  write_file_atomic(a.out, dump_json(json{{"profiles", profiles}}));
}

// ---- plan ------------------------------------------------------------------

std::string plan_table(const AllocationPlan& plan) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-16s %6s %6s %10s %8s %12s\n", "object", "g",
                "p", "size_mb", "quality", "cumulative");
  out << line;
  double cumulative = 0.0;
  for (const auto& e : plan.entries()) {
    cumulative += e.predicted_size_mb;
    std::snprintf(line, sizeof(line), "%-16s %6d %6d %10.3f %8.4f %12.3f\n",
                  e.object_id.c_str(), e.config.g, e.config.p, e.predicted_size_mb,
                  e.predicted_quality, cumulative);
    out << line;
  }
  std::snprintf(line, sizeof(line), "total %.3f MB of %.3f MB, quality %.4f (%s)\n",
                plan.total_size_mb(), plan.budget_mb(), plan.total_quality(),
                solver_name(plan.solver()).c_str());
  out << line;
  return out.str();
}

void run_plan(const PlanArgs& a, std::ostream& out, json& error_context) {
  const DeviceBudget budget = resolve_budgets(a.budget, false).front();
  SolverKind solver;
  try {
    solver = parse_solver(a.solver);
  } catch (const Error&) {
    throw UsageError("--solver: unknown solver '" + a.solver + "'");
  }
  error_context["budget_mb"] = budget.capacity_mb;
  error_context["device"] = budget.name;

  const json doc = read_json_file(a.profiles);
  PlanningProblem problem;
  problem.budget_mb = budget.capacity_mb;
  problem.unit_mb = a.unit_mb;
  for (const auto& entry : doc.at("profiles")) {
    const ProfileModel model = entry.get<ProfileModel>();
    ConfigSpace space = entry.at("space").get<ConfigSpace>();
    space = space.is_product()
                ? ConfigSpace::product(model.object_id, space.g_values(), space.p_values())
                : ConfigSpace::enumerated(model.object_id, space.pairs());
    problem.objects.push_back(candidates_from_profile(model, space));
  }
  PlanOptions options;
  options.strict_filter = a.strict_filter;
  const AllocationPlan plan = plan_allocation(problem, solver, options);
  write_file_atomic(a.out, dump_json(json(plan)));
  out << plan_table(plan);
}

// ---- simulate / report -----------------------------------------------------

std::set<SolverKind> parse_solver_set(const std::string& list) {
  std::set<SolverKind> out;
  std::istringstream in(list);
  std::string name;
  while (std::getline(in, name, ',')) {
    try {
      out.insert(parse_solver(name));
    } catch (const Error&) {
      throw UsageError("--solvers: unknown solver '" + name + "'");
    }
  }
  if (out.empty()) throw UsageError("--solvers: empty list");
  return out;
}

void run_simulate(const SimulateArgs& a) {
  SimulationConfig config;
  config.master_seed = a.seed;
  config.n_scenes = a.scenes;
  config.n_objects = a.objects;
  try {
    config.profile = parse_profile(a.profile);
  } catch (const Error&) {
    throw UsageError("--profile: unknown profile '" + a.profile + "'");
  }
  config.budgets = resolve_budgets(a.budget, true);
  config.solvers = parse_solver_set(a.solvers);
  config.scene.noise_sd_size_mb = a.noise_size;
  config.scene.noise_sd_quality = a.noise_quality;
  config.scene.cross_term = a.misspecified;
  config.experiment.unit_mb = a.unit_mb;
  config.experiment.step_multiplier = a.step_multiplier;
  config.threads = configured_threads();

  const auto results = run_simulation(config);
  write_file_atomic(a.out, write_results_csv(to_rows(results, a.timing)));

  json budgets = json::array();
  for (const auto& b : config.budgets) budgets.push_back(b);
  json solvers = json::array();
  for (auto s : config.solvers) solvers.push_back(solver_name(s));
  const json meta{{"rng", std::string(Rng::kAlgorithm)},
                  {"master_seed", a.seed},
                  {"scenes", a.scenes},
                  {"objects", a.objects},
                  {"profile", a.profile},
                  {"budgets", budgets},
                  {"solvers", solvers},
                  {"noise_sd_size_mb", a.noise_size},
                  {"noise_sd_quality", a.noise_quality},
                  {"cross_term", a.misspecified},
                  {"unit_mb", a.unit_mb},
                  {"step_multiplier", a.step_multiplier},
                  {"timing", a.timing}};
  write_file_atomic(a.out + ".meta.json", dump_json(meta));
  log::info("simulate: wrote " + std::to_string(results.size()) + " experiments to " +
            a.out);
}

void run_report(const ReportArgs& a, std::ostream& out) {
  const auto rows = parse_results_csv(read_text_file(a.results));
  const std::string csv = write_summary_csv(summarize(rows));
  if (a.out.empty()) {
    out << csv;
  } else {
    write_file_atomic(a.out, csv);
  }
}

void write_error(std::ostream& err, std::string_view code, const std::string& message,
                 const json& context) {
  json e = context.is_object() ? context : json::object();
  e["error"] = code;
  e["message"] = message;
  err << e.dump() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"nerfplan: detail scoring, profiling and budgeted configuration "
               "selection for multi-object baked scenes",
               "nerfplan"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every verb");
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "Logging on stderr: quiet, info or debug")
      ->check(CLI::IsMember({"quiet", "info", "debug"}));

  SegmentArgs seg;
  auto* segment = app.add_subcommand(
      "segment", "Score object detail, apply the threshold rule and write crops");
  segment->add_option("--images", seg.images_dir,
                      "Directory of <image>.ppm|pgm and <image>.<object>.mask.pgm")
      ->required()
      ->check(CLI::ExistingDirectory);
  segment->add_option("--out-dir", seg.out_dir, "Directory for crops and segments.json")
      ->required();
  segment->add_option("--scene", seg.scene,
                      "scene.json listing the known objects (optional)");
  segment->add_option("--threshold", seg.threshold,
                      "'auto' (lowest max frequency) or a fixed cutoff in cycles/pixel")
      ->capture_default_str();
  segment->add_option("--energy", seg.energy,
                      "Spectral energy fraction defining the detail frequency")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  segment->add_option("--canvas", seg.canvas,
                      "Crop canvas WxH (default: each image's own size)");
  segment->add_option("--out", seg.out, "Report path (default: <out-dir>/segments.json)");

  SamplePlanArgs sp;
  auto* sample_plan_cmd =
      app.add_subcommand("sample-plan", "Write the variable-step sampling plan per object");
  sample_plan_cmd->add_option("--scene", sp.scene, "scene.json")
      ->required()
      ->check(CLI::ExistingFile);
  sample_plan_cmd->add_option("--out", sp.out, "Output JSON")->required();
  sample_plan_cmd
      ->add_option("--step-multiplier", sp.step_multiplier,
                   "g advances by this multiple of the previous g")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  ProfileArgs pa;
  auto* profile = app.add_subcommand("profile", "Fit size and quality models per object");
  profile->add_option("--scene", pa.scene, "scene.json (spaces and optional samples)")
      ->required()
      ->check(CLI::ExistingFile);
  profile->add_option("--samples", pa.samples,
                      "samples.json overriding the scene's embedded samples")
      ->check(CLI::ExistingFile);
  profile->add_option("--out", pa.out, "Output profiles.json")->required();

  PlanArgs pl;
  auto* plan = app.add_subcommand("plan", "Select one configuration per object under a budget");
  plan->add_option("--profiles", pl.profiles, "profiles.json")
      ->required()
      ->check(CLI::ExistingFile);
  plan->add_option("--out", pl.out, "Output plan.json")->required();
  add_budget_flags(plan, pl.budget);
  plan->add_option("--unit-mb", pl.unit_mb, "Size quantization unit in MB")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  plan->add_option("--solver", pl.solver, "dp, fairness, greedy or oracle")
      ->capture_default_str();
  plan->add_flag("--strict-filter", pl.strict_filter,
                 "Also drop configurations exactly at the feasibility bound");

  SimulateArgs sim;
  auto* simulate =
      app.add_subcommand("simulate", "Run seeded synthetic end-to-end experiments");
  simulate->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  simulate->add_option("--objects", sim.objects, "Objects per scene")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--scenes", sim.scenes, "Number of scenes")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--profile", sim.profile, "low, high, mixed or random")
      ->capture_default_str();
  simulate->add_option("--solvers", sim.solvers, "Comma-separated solver list")
      ->capture_default_str();
  add_budget_flags(simulate, sim.budget);
  simulate->add_option("--noise-size", sim.noise_size, "Size noise sd in MB")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  simulate->add_option("--noise-quality", sim.noise_quality, "Quality noise sd")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  simulate->add_option("--misspecified", sim.misspecified,
                       "Coefficient of a g*p term added to the true size surface")
      ->capture_default_str();
  simulate->add_option("--unit-mb", sim.unit_mb, "Size quantization unit in MB")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--step-multiplier", sim.step_multiplier,
                       "Sampling-plan g step multiplier")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_flag("--timing", sim.timing,
                     "Record wall_time_ms (makes the CSV run-dependent)");
  simulate->add_option("--out", sim.out, "Output results.csv")->required();

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "Summarize a results.csv per solver");
  report->add_option("--results", rep.results, "results.csv")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_option("--out", rep.out, "Output summary CSV (default: stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  log::set_level(log_level == "quiet"   ? log::Level::kQuiet
                 : log_level == "debug" ? log::Level::kDebug
                                        : log::Level::kInfo);
  json error_context = json::object();
  try {
    if (*segment) run_segment(seg, out);
    if (*sample_plan_cmd) run_sample_plan(sp);
    if (*profile) run_profile(pa);
    if (*plan) run_plan(pl, out, error_context);
    if (*simulate) run_simulate(sim);
    if (*report) run_report(rep, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    write_error(err, error_code_name(e.code()), e.what(), error_context);
    return 1;
  } catch (const json::exception& e) {
    write_error(err, error_code_name(ErrorCode::kInvalidInput), e.what(), error_context);
    return 1;
  } catch (const fs::filesystem_error& e) {
    write_error(err, error_code_name(ErrorCode::kIo), e.what(), error_context);
    return 1;
  }
  return 0;
}

}  // namespace nerfplan
