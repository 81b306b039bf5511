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

#include <cstddef>
#include <functional>

namespace nerfplan {

// Worker count from NERFPLAN_THREADS (0 or unset = hardware concurrency).
unsigned configured_threads();

// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
// visited exactly once; callers write into pre-sized slots so the result
// order does not depend on scheduling. If bodies throw, the exception from
// the lowest failing index is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace nerfplan
