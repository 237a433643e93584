/*
Copyright 2026 The ROARS Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <functional>

#include "roars/instance.hpp"

// Data-parallel kernels. Each OpenMP kernel has a serial reference with the
// same signature; tests assert the two agree bit for bit.
namespace roars::parallel {

/// Worker count: ROARS_THREADS if set (>= 1), else the OpenMP default.
int worker_count();

VisibilityTable visibility_table_serial(const Scenario &s);
VisibilityTable visibility_table_omp(const Scenario &s);

/// Calls body(i) for i in [0, n). Each index must write only its own
/// output slot so the result is independent of the thread count.
void for_each_index_serial(int n, const std::function<void(int)> &body);
void for_each_index_omp(int n, const std::function<void(int)> &body);

} // namespace roars::parallel
