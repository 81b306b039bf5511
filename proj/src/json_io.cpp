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

#include "nerfplan/json_io.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

namespace nerfplan {

using nlohmann::json;

void to_json(json& j, const ConfigPair& c) { j = json{{"g", c.g}, {"p", c.p}}; }

void from_json(const json& j, ConfigPair& c) {
  c.g = j.at("g").get<int>();
  c.p = j.at("p").get<int>();
}

void to_json(json& j, const ConfigSpace& space) {
  j = json{{"g_values", space.g_values()}, {"p_values", space.p_values()}};
  if (!space.is_product()) j["pairs"] = space.pairs();
}

void from_json(const json& j, ConfigSpace& space) {
  const std::string id = j.value("object_id", std::string{});
  if (j.contains("pairs")) {
    space = ConfigSpace::enumerated(id, j.at("pairs").get<std::vector<ConfigPair>>());
  } else {
    space = ConfigSpace::product(id, j.at("g_values").get<std::vector<int>>(),
                                 j.at("p_values").get<std::vector<int>>());
  }
}

void to_json(json& j, const DeviceBudget& budget) {
  j = json{{"name", budget.name}, {"capacity_mb", budget.capacity_mb}};
}

void from_json(const json& j, DeviceBudget& budget) {
  budget.name = j.at("name").get<std::string>();
  budget.capacity_mb = j.at("capacity_mb").get<double>();
}

void to_json(json& j, const SampleObservation& s) {
  j = json{{"g", s.config.g},
           {"p", s.config.p},
           {"size_mb", s.size_mb},
           {"quality", s.quality}};
}

void from_json(const json& j, SampleObservation& s) {
  s.config.g = j.at("g").get<int>();
  s.config.p = j.at("p").get<int>();
  s.size_mb = j.at("size_mb").get<double>();
  if (s.size_mb < 0.0) {
    throw Error(ErrorCode::kInvalidInput, "sample size_mb must be >= 0");
  }
  std::ostringstream where;
  where << "sample (g=" << s.config.g << ", p=" << s.config.p << ")";
  s.quality = clamp_quality(j.at("quality").get<double>(), where.str());
}

void to_json(json& j, const PlanEntry& e) {
  j = json{{"object_id", e.object_id},
           {"config", e.config},
           {"predicted_size_mb", e.predicted_size_mb},
           {"predicted_quality", e.predicted_quality}};
}

void from_json(const json& j, PlanEntry& e) {
  e.object_id = j.at("object_id").get<std::string>();
  e.config = j.at("config").get<ConfigPair>();
  e.predicted_size_mb = j.at("predicted_size_mb").get<double>();
  e.predicted_quality = j.at("predicted_quality").get<double>();
}

void to_json(json& j, const AllocationPlan& plan) {
  j = json{{"entries", plan.entries()},
           {"total_size_mb", plan.total_size_mb()},
           {"total_quality", plan.total_quality()},
           {"budget_mb", plan.budget_mb()},
           {"solver", solver_name(plan.solver())}};
}

void from_json(const json& j, AllocationPlan& plan) {
  plan = AllocationPlan(j.at("entries").get<std::vector<PlanEntry>>(),
                        j.at("budget_mb").get<double>(),
                        parse_solver(j.at("solver").get<std::string>()));
}

void to_json(json& j, const SceneObject& o) {
  j = json{{"id", o.id},
           {"space", {{"g_values", o.g_values}, {"p_values", o.p_values}}}};
  if (!o.samples.empty()) j["samples"] = o.samples;
}

void from_json(const json& j, SceneObject& o) {
  o.id = j.at("id").get<std::string>();
  const json& space = j.at("space");
  o.g_values = space.at("g_values").get<std::vector<int>>();
  o.p_values = space.at("p_values").get<std::vector<int>>();
  o.samples.clear();
  if (j.contains("samples")) {
    o.samples = j.at("samples").get<std::vector<SampleObservation>>();
  }
}

void to_json(json& j, const SceneDescriptor& scene) {
  j = json{{"objects", scene.objects}, {"budget", scene.budget}};
}

void from_json(const json& j, SceneDescriptor& scene) {
  scene.objects = j.at("objects").get<std::vector<SceneObject>>();
  scene.budget = j.at("budget").get<DeviceBudget>();
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidInput,
                "malformed JSON in '" + path.string() + "': " + e.what());
  }
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::kIo, "cannot write '" + tmp.string() + "'");
    }
    out << contents;
    out.flush();
    if (!out) {
      throw Error(ErrorCode::kIo, "short write to '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot rename onto '" + path.string() + "'");
  }
}

}  // namespace nerfplan
