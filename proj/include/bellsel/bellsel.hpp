// Copyright 2026 The bellsel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "bellsel/analysis.hpp"
#include "bellsel/classical_forks.hpp"
#include "bellsel/common.hpp"
#include "bellsel/ensemble.hpp"
#include "bellsel/ensemble_io.hpp"
#include "bellsel/experiments.hpp"
#include "bellsel/quantum_core.hpp"
#include "bellsel/report_io.hpp"
#include "bellsel/rng.hpp"
#include "bellsel/toy_models.hpp"
