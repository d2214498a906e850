// Copyright 2026 The cavsim Authors
//
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

#include <cstdint>
#include <random>

namespace cavsim {

uint64_t splitmix64(uint64_t x);

// Seed for work item `index`, independent of how items are scheduled.
uint64_t derive_seed(uint64_t seed, uint64_t index);

using Rng = std::mt19937_64;

inline Rng make_rng(uint64_t seed, uint64_t index = 0) { return Rng(derive_seed(seed, index)); }

}  // namespace cavsim
