// Copyright 2026 The WS-RAM Authors.
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

#ifndef WSRAM_WSRAM_HPP
#define WSRAM_WSRAM_HPP

#include <wsram/errors.hpp>
#include <wsram/rng.hpp>

#include <wsram/diffnet/distributions.hpp>
#include <wsram/diffnet/finite_difference.hpp>
#include <wsram/diffnet/layers.hpp>
#include <wsram/diffnet/parameter_vector.hpp>

#include <wsram/env/image.hpp>
#include <wsram/env/mnist.hpp>
#include <wsram/env/toy_world.hpp>

#include <wsram/model/attention_network.hpp>
#include <wsram/model/classify.hpp>
#include <wsram/model/tabular_model.hpp>
#include <wsram/model/trajectory.hpp>

#include <wsram/estimators/estimators.hpp>
#include <wsram/estimators/importance_weights.hpp>
#include <wsram/estimators/variance_probe.hpp>

#include <wsram/oracle/enumeration.hpp>
#include <wsram/oracle/identity_suite.hpp>

#include <wsram/training/adam.hpp>
#include <wsram/training/checkpoint.hpp>
#include <wsram/training/config.hpp>
#include <wsram/training/diagnostics.hpp>
#include <wsram/training/experiment.hpp>
#include <wsram/training/exploration.hpp>
#include <wsram/training/metrics.hpp>
#include <wsram/training/trainer.hpp>

#endif  // WSRAM_WSRAM_HPP
