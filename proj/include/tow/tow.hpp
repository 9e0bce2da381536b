// Copyright 2026 The tow Authors.
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

#include "tow/closed_form.hpp"
#include "tow/continuum.hpp"
#include "tow/dpp.hpp"
#include "tow/errors.hpp"
#include "tow/game_sim.hpp"
#include "tow/graph.hpp"
#include "tow/verification.hpp"
