//------------------------------------------------------------------------------
// Copyright 2026 The autotune authors
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
//------------------------------------------------------------------------------
#ifndef AUTOTUNE_AUTOTUNE_HPP
#define AUTOTUNE_AUTOTUNE_HPP

#include <autotune/csv.hpp>
#include <autotune/error.hpp>
#include <autotune/harness.hpp>
#include <autotune/params.hpp>
#include <autotune/pool.hpp>
#include <autotune/simplex.hpp>
#include <autotune/tuner.hpp>
#include <autotune/workloads.hpp>

#endif // AUTOTUNE_AUTOTUNE_HPP
