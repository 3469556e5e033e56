// Copyright 2026 The qhead Authors
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

/**
 * @file qhead.hpp
 * Umbrella header.
 */
#pragma once

#include "qhead/ansatz.hpp"
#include "qhead/baselines.hpp"
#include "qhead/checkpoint.hpp"
#include "qhead/config.hpp"
#include "qhead/datasets.hpp"
#include "qhead/energy.hpp"
#include "qhead/errors.hpp"
#include "qhead/experiment.hpp"
#include "qhead/grad.hpp"
#include "qhead/head.hpp"
#include "qhead/model.hpp"
#include "qhead/nn.hpp"
#include "qhead/noise.hpp"
#include "qhead/parallel.hpp"
#include "qhead/random.hpp"
#include "qhead/simcore.hpp"
#include "qhead/trainer.hpp"
