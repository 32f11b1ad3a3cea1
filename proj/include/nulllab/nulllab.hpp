// Copyright 2026 The nulllab Authors
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

#ifndef NULLLAB_NULLLAB_HPP
#define NULLLAB_NULLLAB_HPP

#include "nulllab/common.hpp"
#include "nulllab/dsl.hpp"
#include "nulllab/engine.hpp"
#include "nulllab/io.hpp"
#include "nulllab/measurement.hpp"
#include "nulllab/operators.hpp"
#include "nulllab/qstate.hpp"
#include "nulllab/random.hpp"
#include "nulllab/scenarios.hpp"

#endif  // NULLLAB_NULLLAB_HPP
