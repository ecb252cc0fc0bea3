// Copyright 2026 The optdt Authors.
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

#include "optdt/bench.hpp"
#include "optdt/error.hpp"
#include "optdt/export.hpp"
#include "optdt/generator.hpp"
#include "optdt/graph.hpp"
#include "optdt/limits.hpp"
#include "optdt/lp.hpp"
#include "optdt/pipeline.hpp"
#include "optdt/rewarding.hpp"
#include "optdt/scenario_io.hpp"
#include "optdt/state.hpp"
#include "optdt/tree.hpp"
#include "optdt/version.hpp"
