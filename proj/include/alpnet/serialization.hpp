// Copyright 2026 The alpnet Authors
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

#ifndef ALPNET_SERIALIZATION_HPP_
#define ALPNET_SERIALIZATION_HPP_

#include <json.hpp>

#include "alpnet/alp.hpp"
#include "alpnet/encoder.hpp"
#include "alpnet/superpixel.hpp"
#include "alpnet/train.hpp"
#include "alpnet/transforms.hpp"
#include "alpnet/volume.hpp"

namespace alpnet {

// JSON round-trips for the config structs embedded in run configs,
// checkpoints and reports.
void to_json(nlohmann::json& j, const SuperpixelConfig& c);
void from_json(const nlohmann::json& j, SuperpixelConfig& c);

void to_json(nlohmann::json& j, const TransformConfig& c);
void from_json(const nlohmann::json& j, TransformConfig& c);

void to_json(nlohmann::json& j, const AlpConfig& c);
void from_json(const nlohmann::json& j, AlpConfig& c);

void to_json(nlohmann::json& j, const LossConfig& c);
void from_json(const nlohmann::json& j, LossConfig& c);

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

void to_json(nlohmann::json& j, const EncoderSpec& c);
void from_json(const nlohmann::json& j, EncoderSpec& c);

void to_json(nlohmann::json& j, const PreprocessOptions& c);
void from_json(const nlohmann::json& j, PreprocessOptions& c);

}  // namespace alpnet

#endif  // ALPNET_SERIALIZATION_HPP_
