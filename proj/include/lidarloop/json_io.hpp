// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0
//
// JSON (de)serialization for descriptors and detector models, matching the
// on-disk formats of the dataset cache and trained model files.

#pragma once

#include <json.hpp>
#include <string>

#include "lidarloop/descriptor.hpp"
#include "lidarloop/detector.hpp"

namespace lidarloop {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json spec_to_json(const HistogramSpec& spec);
HistogramSpec spec_from_json(const nlohmann::json& j);

nlohmann::json descriptor_to_json(const Descriptor& d);
Descriptor descriptor_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const DetectorModel& model);
DetectorModel model_from_json(const nlohmann::json& j);

void save_model(const DetectorModel& model, const std::string& path);
DetectorModel load_model(const std::string& path);

}  // namespace lidarloop
