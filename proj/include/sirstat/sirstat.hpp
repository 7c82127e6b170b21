// Copyright 2026 The sirstat Authors
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

#include "sirstat/bayes.hpp"
#include "sirstat/csv.hpp"
#include "sirstat/epiestim.hpp"
#include "sirstat/error.hpp"
#include "sirstat/estimators.hpp"
#include "sirstat/hetero.hpp"
#include "sirstat/mechanistic.hpp"
#include "sirstat/montecarlo.hpp"
#include "sirstat/numerics.hpp"
#include "sirstat/parallel.hpp"
#include "sirstat/repro.hpp"
#include "sirstat/reproduction.hpp"
#include "sirstat/rng.hpp"
#include "sirstat/sir.hpp"
