// Copyright 2026 The sslab Authors
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

#include "sslab/attack.hpp"
#include "sslab/config.hpp"
#include "sslab/csv.hpp"
#include "sslab/embedder.hpp"
#include "sslab/extractor.hpp"
#include "sslab/game_solver.hpp"
#include "sslab/haar.hpp"
#include "sslab/harness.hpp"
#include "sslab/numeric.hpp"
#include "sslab/oracle.hpp"
#include "sslab/pgm.hpp"
#include "sslab/rng.hpp"
#include "sslab/signal_model.hpp"
