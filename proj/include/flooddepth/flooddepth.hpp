// Copyright 2026 The FloodDepth Authors.
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

#include "flooddepth/augment.hpp"
#include "flooddepth/bbox.hpp"
#include "flooddepth/config.hpp"
#include "flooddepth/error.hpp"
#include "flooddepth/geo.hpp"
#include "flooddepth/geometry.hpp"
#include "flooddepth/io.hpp"
#include "flooddepth/metrics.hpp"
#include "flooddepth/pairing_registry.hpp"
#include "flooddepth/pipeline.hpp"
#include "flooddepth/records.hpp"
#include "flooddepth/report.hpp"
#include "flooddepth/rng.hpp"
#include "flooddepth/scene_selection.hpp"
#include "flooddepth/synthetic.hpp"
