// Copyright 2026 The zeno-dyn Authors
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

#include "zeno/bacon_shor.hpp"
#include "zeno/channel.hpp"
#include "zeno/effective.hpp"
#include "zeno/errors.hpp"
#include "zeno/fixed_point.hpp"
#include "zeno/io.hpp"
#include "zeno/operator_core.hpp"
#include "zeno/pauli.hpp"
#include "zeno/structure.hpp"
#include "zeno/tolerances.hpp"
#include "zeno/zeno_sim.hpp"
