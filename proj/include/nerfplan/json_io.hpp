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

#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "nerfplan/core.hpp"

namespace nerfplan {

void to_json(nlohmann::json& j, const ConfigPair& c);
void from_json(const nlohmann::json& j, ConfigPair& c);

void to_json(nlohmann::json& j, const ConfigSpace& space);
void from_json(const nlohmann::json& j, ConfigSpace& space);

void to_json(nlohmann::json& j, const DeviceBudget& budget);
void from_json(const nlohmann::json& j, DeviceBudget& budget);

// Quality outside [0, 1] is clamped with a warning on decode.
void to_json(nlohmann::json& j, const SampleObservation& s);
void from_json(const nlohmann::json& j, SampleObservation& s);

void to_json(nlohmann::json& j, const PlanEntry& e);
void from_json(const nlohmann::json& j, PlanEntry& e);

// Totals in the input are ignored and recomputed from the entries.
void to_json(nlohmann::json& j, const AllocationPlan& plan);
void from_json(const nlohmann::json& j, AllocationPlan& plan);

void to_json(nlohmann::json& j, const SceneObject& o);
void from_json(const nlohmann::json& j, SceneObject& o);

void to_json(nlohmann::json& j, const SceneDescriptor& scene);
void from_json(const nlohmann::json& j, SceneDescriptor& scene);

// Wraps nlohmann parse/type errors as kInvalidInput and I/O failures as kIo.
nlohmann::json read_json_file(const std::filesystem::path& path);

// Pretty-printed with two-space indent and a trailing newline.
std::string dump_json(const nlohmann::json& j);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents);

}  // namespace nerfplan
