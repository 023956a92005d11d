// Copyright 2026 The sgl Authors
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

#include "sgl/circuit.hpp"
#include "sgl/ensemble.hpp"
#include "sgl/errors.hpp"
#include "sgl/gap.hpp"
#include "sgl/harness.hpp"
#include "sgl/kassabov.hpp"
#include "sgl/linalg.hpp"
#include "sgl/parallel.hpp"
#include "sgl/partition.hpp"
#include "sgl/permutation.hpp"
#include "sgl/quantum.hpp"
#include "sgl/rng.hpp"
