/*
 * Copyright 2026 The HybridML Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef HYBRIDML_HYBRIDML_HPP_
#define HYBRIDML_HYBRIDML_HPP_

#include "hybridml/cli.hpp"
#include "hybridml/csv.hpp"
#include "hybridml/dataframe.hpp"
#include "hybridml/errors.hpp"
#include "hybridml/featgen.hpp"
#include "hybridml/learners.hpp"
#include "hybridml/metrics.hpp"
#include "hybridml/parallel.hpp"
#include "hybridml/pipeline.hpp"
#include "hybridml/random.hpp"
#include "hybridml/regpath.hpp"
#include "hybridml/simgen.hpp"
#include "hybridml/trees.hpp"
#include "hybridml/tuner.hpp"

#endif  // HYBRIDML_HYBRIDML_HPP_
