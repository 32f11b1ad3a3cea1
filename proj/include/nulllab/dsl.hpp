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

#ifndef NULLLAB_DSL_HPP
#define NULLLAB_DSL_HPP

#include "nulllab/dsl/ast.hpp"
#include "nulllab/dsl/lexer.hpp"
#include "nulllab/dsl/parser.hpp"
#include "nulllab/dsl/printer.hpp"
#include "nulllab/dsl/semantics.hpp"

#endif  // NULLLAB_DSL_HPP
