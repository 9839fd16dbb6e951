// Copyright The rismc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>
#include <json.hpp>
#include "config.hpp"

namespace rismc
{

enum class SweepAxis
{
  TransmitPowerDbm,
  NAntennas,
  UsersPerGroup,
  RisElements,
};

enum class Scheme
{
  Bd,
  Mtzf,
  BdRandom,
  MtzfRandom,
};

std::string_view axis_name(SweepAxis axis);
std::string_view scheme_name(Scheme scheme);
// Throws ConfigError on unknown names.
SweepAxis parse_axis(std::string_view name);
Scheme parse_scheme(std::string_view name);

struct Preset
{
  std::string name;
  std::string description;
  Position3D bs;
  std::vector<Position3D> group_centers;
  double ris_height = 5.0;
  // Each RIS sits this far beyond its group center, on the ray from the BS.
  double ris_offset = 10.0;
};

const std::vector<Preset> &presets();
// Throws ConfigError when the name is unknown.
const Preset &find_preset(std::string_view name);

// BS, group centers and RIS positions of the first `groups` entries of a preset.
Geometry preset_geometry(const Preset &preset, int groups);

struct Scenario
{
  std::string name;
  std::string preset = "fig2-like-g4";
  SystemConfig base;
  SweepAxis axis = SweepAxis::TransmitPowerDbm;
  std::vector<double> values{20.0, 25.0, 30.0, 35.0, 40.0};
  std::vector<Scheme> schemes{Scheme::Bd, Scheme::Mtzf, Scheme::BdRandom, Scheme::MtzfRandom};
  int trials = 200;
  std::uint64_t seed = 1;
  // The source document, with seed/trials overrides applied; echoed in results.
  nlohmann::json source;

  void set_seed(std::uint64_t s);
  void set_trials(int n);
};

// Parses a scenario document. Throws ParseError on malformed JSON and
// ConfigError on schema or invariant violations.
Scenario parse_scenario(const std::string &text);
Scenario load_scenario_file(const std::string &path);

// The system configuration at one sweep value.
SystemConfig config_at(const Scenario &scenario, double value);

// Checks every sweep point; throws ConfigError naming the first violation.
void validate_scenario(const Scenario &scenario);

}  // namespace rismc
