// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0
//
// Mapping between the plain-text configuration and the typed parameter
// structs. Missing keys keep the struct defaults.

#pragma once

#include "lidarloop/config.hpp"
#include "lidarloop/descriptor.hpp"
#include "lidarloop/loopsearch.hpp"
#include "lidarloop/registration.hpp"
#include "lidarloop/replay.hpp"
#include "lidarloop/synth.hpp"

namespace lidarloop {

// [descriptor] bins, r_max
HistogramSpec spec_from_config(const Config& cfg);

// [registration] voxel_size, z_lim, i_lim, r_lim, n_p_max, normal_radius,
// fpfh_radius, persistence_radii, persistence_gamma, ransac_iterations,
// ransac_inlier_distance, icp_max_iterations, icp_convergence_eps,
// icp_max_correspondence_distance, n_p_min, n_inliers, t_max, seed
RegistrationParams registration_params_from_config(const Config& cfg);

// [loopsearch] r_min, beta, p_min, n_v, n_n_max, alpha_min, n_ms, r_ms,
// n_start, n_buffer, seed
SearchConfig search_config_from_config(const Config& cfg);

// [replay] optimize, optimize_max_iterations, optimize_tolerance,
// odom_sigma_xy, dump_nodes, dump_edges — plus the two sections above.
ReplayOptions replay_options_from_config(const Config& cfg);

// [synth] side, spacing, laps, lateral_jitter, sessions,
// session_start_fraction, session_overlap, odom_sigma_xy, odom_sigma_theta,
// odom_yaw_bias, n_boxes, n_pillars, clearance, margin, sensor_height,
// beams, azimuth_steps, max_range, range_noise, ground_intensity
SynthConfig synth_config_from_config(const Config& cfg);

}  // namespace lidarloop
