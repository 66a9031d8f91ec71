// SPDX-License-Identifier: Apache-2.0
//
// slnrbf - statistical SLNR-based beamforming for full-dimensional massive MIMO
// Copyright (C) 2026 The slnrbf authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#pragma once

#include "slnrbf/beamformer.hpp"
#include "slnrbf/channel.hpp"
#include "slnrbf/closed_form.hpp"
#include "slnrbf/harness.hpp"
#include "slnrbf/metrics.hpp"
#include "slnrbf/numerics.hpp"
#include "slnrbf/optimizers.hpp"
#include "slnrbf/qcqp.hpp"
#include "slnrbf/surrogates.hpp"
