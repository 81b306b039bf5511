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

#include "nerfplan/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace nerfplan::log {
namespace {

std::atomic<Level> g_level{Level::kInfo};
std::mutex g_mutex;

void emit(const char* tag, std::string_view message) {
  std::lock_guard<std::mutex> lock(g_mutex);
  std::cerr << "[" << tag << "] " << message << '\n';
}

}  // namespace

void set_level(Level level) { g_level = level; }
Level level() { return g_level; }

void info(std::string_view message) {
  if (g_level >= Level::kInfo) emit("info", message);
}

// Warnings are shown at every level except quiet.
void warn(std::string_view message) {
  if (g_level >= Level::kInfo) emit("warn", message);
}

void debug(std::string_view message) {
  if (g_level >= Level::kDebug) emit("debug", message);
}

}  // namespace nerfplan::log
