// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0

#include "lidarloop/json_io.hpp"

#include <fstream>

#include "lidarloop/error.hpp"

namespace lidarloop {

using nlohmann::json;

json spec_to_json(const HistogramSpec& spec) {
  return json{{"bins", spec.bin_widths}, {"r_max", spec.r_max}};
}

HistogramSpec spec_from_json(const json& j) {
  HistogramSpec spec;
  const auto& bins = j.at("bins");
  require(bins.size() == static_cast<std::size_t>(kNumHistograms),
          ErrorCode::format, "spec: expected 9 bin widths");
  for (int k = 0; k < kNumHistograms; ++k) spec.bin_widths[k] = bins[k];
  spec.r_max = j.at("r_max");
  spec.validate();
  return spec;
}

json descriptor_to_json(const Descriptor& d) {
  json type2 = json::array();
  for (const auto& hist : d.type2) type2.push_back(hist);
  return json{{"type1", d.type1}, {"type2", type2}, {"spec", spec_to_json(d.spec)}};
}

Descriptor descriptor_from_json(const json& j) {
  Descriptor d;
  d.spec = spec_from_json(j.at("spec"));
  const auto& t1 = j.at("type1");
  require(t1.size() == static_cast<std::size_t>(kNumType1Features),
          ErrorCode::format, "descriptor: expected 32 type-I entries");
  for (int i = 0; i < kNumType1Features; ++i) d.type1[i] = t1[i];
  const auto& t2 = j.at("type2");
  require(t2.size() == static_cast<std::size_t>(kNumHistograms),
          ErrorCode::format, "descriptor: expected 9 histograms");
  for (int k = 0; k < kNumHistograms; ++k) {
    d.type2[k] = t2[k].get<std::vector<std::uint32_t>>();
    require(d.type2[k].size() == d.spec.histogram_dim(k), ErrorCode::format,
            "descriptor: histogram dimension mismatch");
  }
  return d;
}

json model_to_json(const DetectorModel& model) {
  json stumps = json::array();
  for (const DecisionStump& s : model.stumps)
    stumps.push_back(json{{"feature", s.feature},
                          {"threshold", s.threshold},
                          {"polarity", s.polarity},
                          {"alpha", s.alpha}});
  return json{{"version", kModelFormatVersion},
              {"T", model.rounds},
              {"stumps", stumps},
              {"p_min", model.p_min},
              {"spec_fingerprint", model.spec_fingerprint}};
}

DetectorModel model_from_json(const json& j) {
  require(j.at("version").get<int>() == kModelFormatVersion, ErrorCode::format,
          "model: unsupported format version");
  DetectorModel model;
  model.rounds = j.at("T");
  model.p_min = j.at("p_min");
  model.spec_fingerprint = j.at("spec_fingerprint");
  for (const auto& s : j.at("stumps")) {
    DecisionStump stump;
    stump.feature = s.at("feature");
    stump.threshold = s.at("threshold");
    stump.polarity = s.at("polarity");
    stump.alpha = s.at("alpha");
    require(stump.feature >= 0 && stump.feature < kComparisonDim,
            ErrorCode::format, "model: stump feature index out of range");
    require(stump.polarity == 1 || stump.polarity == -1, ErrorCode::format,
            "model: stump polarity must be +/-1");
    model.stumps.push_back(stump);
  }
  return model;
}

void save_model(const DetectorModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path);
  out << model_to_json(model).dump(2) << '\n';
  if (!out) fail(ErrorCode::io, "write failed on " + path);
}

DetectorModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::format, path + ": " + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const json::exception& e) {
    fail(ErrorCode::format, path + ": " + e.what());
  }
}

}  // namespace lidarloop
