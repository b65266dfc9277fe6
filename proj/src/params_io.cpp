// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0

#include "lidarloop/params_io.hpp"

#include "lidarloop/error.hpp"

namespace lidarloop {

HistogramSpec spec_from_config(const Config& cfg) {
  HistogramSpec spec;
  if (auto bins = cfg.get_double_list("descriptor.bins")) {
    require(bins->size() == static_cast<std::size_t>(kNumHistograms),
            ErrorCode::invalid_argument, "descriptor.bins: expected 9 widths");
    for (int k = 0; k < kNumHistograms; ++k) spec.bin_widths[k] = (*bins)[k];
  }
  spec.r_max = cfg.get_double_or("descriptor.r_max", spec.r_max);
  spec.validate();
  return spec;
}

RegistrationParams registration_params_from_config(const Config& cfg) {
  RegistrationParams p;
  p.filter.voxel_size = cfg.get_double_or("registration.voxel_size", p.filter.voxel_size);
  p.filter.z_lim = cfg.get_double_or("registration.z_lim", p.filter.z_lim);
  p.filter.i_lim = cfg.get_double_or("registration.i_lim", p.filter.i_lim);
  p.filter.r_lim = cfg.get_double_or("registration.r_lim", p.filter.r_lim);
  p.filter.n_p_max = static_cast<std::size_t>(
      cfg.get_int_or("registration.n_p_max", static_cast<std::int64_t>(p.filter.n_p_max)));
  p.normal_radius = cfg.get_double_or("registration.normal_radius", p.normal_radius);
  p.fpfh_radius = cfg.get_double_or("registration.fpfh_radius", p.fpfh_radius);
  if (auto radii = cfg.get_double_list("registration.persistence_radii"))
    p.persistence_radii = *radii;
  p.persistence_gamma =
      cfg.get_double_or("registration.persistence_gamma", p.persistence_gamma);
  p.ransac_iterations = static_cast<int>(
      cfg.get_int_or("registration.ransac_iterations", p.ransac_iterations));
  p.ransac_inlier_distance = cfg.get_double_or(
      "registration.ransac_inlier_distance", p.ransac_inlier_distance);
  p.icp_max_iterations = static_cast<int>(
      cfg.get_int_or("registration.icp_max_iterations", p.icp_max_iterations));
  p.icp_convergence_eps =
      cfg.get_double_or("registration.icp_convergence_eps", p.icp_convergence_eps);
  p.icp_max_correspondence_distance =
      cfg.get_double_or("registration.icp_max_correspondence_distance",
                        p.icp_max_correspondence_distance);
  p.n_p_min = static_cast<std::size_t>(
      cfg.get_int_or("registration.n_p_min", static_cast<std::int64_t>(p.n_p_min)));
  p.n_inliers = static_cast<int>(cfg.get_int_or("registration.n_inliers", p.n_inliers));
  p.t_max = cfg.get_double_or("registration.t_max", p.t_max);
  p.seed = static_cast<std::uint64_t>(cfg.get_int_or("registration.seed", 0));
  p.filter.seed = p.seed;
  p.validate();
  return p;
}

SearchConfig search_config_from_config(const Config& cfg) {
  SearchConfig c;
  c.r_min = cfg.get_double_or("loopsearch.r_min", c.r_min);
  c.beta = cfg.get_double_or("loopsearch.beta", c.beta);
  c.p_min = cfg.get_double_or("loopsearch.p_min", c.p_min);
  c.n_v = static_cast<int>(cfg.get_int_or("loopsearch.n_v", c.n_v));
  c.n_n_max = static_cast<std::size_t>(
      cfg.get_int_or("loopsearch.n_n_max", static_cast<std::int64_t>(c.n_n_max)));
  c.alpha_min = cfg.get_double_or("loopsearch.alpha_min", c.alpha_min);
  c.n_ms = static_cast<int>(cfg.get_int_or("loopsearch.n_ms", c.n_ms));
  c.r_ms = cfg.get_double_or("loopsearch.r_ms", c.r_ms);
  c.n_start = static_cast<int>(cfg.get_int_or("loopsearch.n_start", c.n_start));
  c.n_buffer = static_cast<int>(cfg.get_int_or("loopsearch.n_buffer", c.n_buffer));
  c.seed = static_cast<std::uint64_t>(cfg.get_int_or("loopsearch.seed", 0));
  c.validate();
  return c;
}

ReplayOptions replay_options_from_config(const Config& cfg) {
  ReplayOptions o;
  o.search = search_config_from_config(cfg);
  o.registration = registration_params_from_config(cfg);
  o.optimize_on_loop = cfg.get_bool_or("replay.optimize", o.optimize_on_loop);
  o.optimize_max_iterations = static_cast<int>(
      cfg.get_int_or("replay.optimize_max_iterations", o.optimize_max_iterations));
  o.optimize_tolerance =
      cfg.get_double_or("replay.optimize_tolerance", o.optimize_tolerance);
  o.odom_sigma_xy = cfg.get_double_or("replay.odom_sigma_xy", o.odom_sigma_xy);
  o.dump_nodes_csv = cfg.get_string_or("replay.dump_nodes", "");
  o.dump_edges_csv = cfg.get_string_or("replay.dump_edges", "");
  return o;
}

SynthConfig synth_config_from_config(const Config& cfg) {
  SynthConfig c;
  c.side = cfg.get_double_or("synth.side", c.side);
  c.spacing = cfg.get_double_or("synth.spacing", c.spacing);
  c.laps = static_cast<int>(cfg.get_int_or("synth.laps", c.laps));
  c.lateral_jitter = cfg.get_double_or("synth.lateral_jitter", c.lateral_jitter);
  c.sessions = static_cast<int>(cfg.get_int_or("synth.sessions", c.sessions));
  c.session_start_fraction =
      cfg.get_double_or("synth.session_start_fraction", c.session_start_fraction);
  c.session_overlap = cfg.get_double_or("synth.session_overlap", c.session_overlap);
  c.odom_sigma_xy = cfg.get_double_or("synth.odom_sigma_xy", c.odom_sigma_xy);
  c.odom_sigma_theta =
      cfg.get_double_or("synth.odom_sigma_theta", c.odom_sigma_theta);
  c.odom_yaw_bias = cfg.get_double_or("synth.odom_yaw_bias", c.odom_yaw_bias);
  c.n_boxes = static_cast<int>(cfg.get_int_or("synth.n_boxes", c.n_boxes));
  c.n_pillars = static_cast<int>(cfg.get_int_or("synth.n_pillars", c.n_pillars));
  c.clearance = cfg.get_double_or("synth.clearance", c.clearance);
  c.margin = cfg.get_double_or("synth.margin", c.margin);
  c.sensor_height = cfg.get_double_or("synth.sensor_height", c.sensor_height);
  c.beams = static_cast<int>(cfg.get_int_or("synth.beams", c.beams));
  c.azimuth_steps =
      static_cast<int>(cfg.get_int_or("synth.azimuth_steps", c.azimuth_steps));
  c.max_range = cfg.get_double_or("synth.max_range", c.max_range);
  c.range_noise = cfg.get_double_or("synth.range_noise", c.range_noise);
  c.ground_intensity =
      cfg.get_double_or("synth.ground_intensity", c.ground_intensity);
  c.validate();
  return c;
}

}  // namespace lidarloop
