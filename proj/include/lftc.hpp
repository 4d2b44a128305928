// Copyright 2026 The lftc Authors
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


// Convenience header pulling in the whole library.

#pragma once

#include "lftc/bundle.hpp"
#include "lftc/classifier.hpp"
#include "lftc/common.hpp"
#include "lftc/compression.hpp"
#include "lftc/corpus.hpp"
#include "lftc/cr.hpp"
#include "lftc/csv.hpp"
#include "lftc/mcc.hpp"
#include "lftc/parallel.hpp"
#include "lftc/random.hpp"
#include "lftc/reference_lz.hpp"
#include "lftc/report.hpp"
#include "lftc/runner.hpp"
#include "lftc/synthetic.hpp"
