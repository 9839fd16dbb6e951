// Copyright The rismc Authors
// SPDX-License-Identifier: Apache-2.0

#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include "errors.hpp"

namespace rismc
{

using nlohmann::json;

namespace
{

[[noreturn]] void bad(const std::string &path, const std::string &what)
{
  throw ConfigError(path + ": " + what);
}

void expect_object(const json &j, const std::string &path)
{
  if (!j.is_object()) bad(path, "expected an object");
}

void expect_keys(const json &j, const std::string &path, std::initializer_list<const char *> keys)
{
  expect_object(j, path);
  for (const auto &item : j.items())
  {
    if (std::none_of(keys.begin(), keys.end(), [&](const char *k) { return item.key() == k; }))
    {
      bad(path, "unknown key \"" + item.key() + "\"");
    }
  }
}

std::string join(const std::string &path, const std::string &key)
{
  return path.empty() ? key : path + "." + key;
}

double get_number(const json &j, const std::string &path)
{
  if (j.is_string())
  {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

int get_int(const json &j, const std::string &path)
{
  if (!j.is_number_integer()) bad(path, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    bad(path, "integer out of range");
  return static_cast<int>(v);
}

bool get_bool(const json &j, const std::string &path)
{
  if (!j.is_boolean()) bad(path, "expected true or false");
  return j.get<bool>();
}

std::string get_string(const json &j, const std::string &path)
{
  if (!j.is_string()) bad(path, "expected a string");
  return j.get<std::string>();
}

template <typename F>
void maybe(const json &obj, const std::string &path, const char *key, F &&apply)
{
  if (obj.contains(key)) apply(obj.at(key), join(path, key));
}

std::vector<double> get_numbers(const json &j, const std::string &path, std::size_t min_size,
                                std::size_t max_size)
{
  if (!j.is_array() || j.size() < min_size || j.size() > max_size)
  {
    std::ostringstream os;
    os << "expected an array of " << min_size;
    if (max_size != min_size) os << " to " << max_size;
    os << " numbers";
    bad(path, os.str());
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i)
  {
    out.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Position3D get_position(const json &j, const std::string &path, bool allow_xy)
{
  const std::vector<double> v = get_numbers(j, path, allow_xy ? 2 : 3, 3);
  return {v[0], v[1], v.size() > 2 ? v[2] : 0.0};
}

std::vector<Position3D> get_positions(const json &j, const std::string &path, bool allow_xy)
{
  if (!j.is_array()) bad(path, "expected an array of positions");
  std::vector<Position3D> out;
  for (std::size_t i = 0; i < j.size(); ++i)
  {
    out.push_back(get_position(j[i], path + "[" + std::to_string(i) + "]", allow_xy));
  }
  return out;
}

UpaShape get_shape(const json &j, const std::string &path)
{
  if (!j.is_array() || j.size() != 2) bad(path, "expected [n_ver, n_hor]");
  return {get_int(j[0], path + "[0]"), get_int(j[1], path + "[1]")};
}

bool is_shape(const json &j)
{
  return j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number();
}

void parse_link(const json &j, const std::string &path, LinkParams &link)
{
  expect_keys(j, path, {"path_loss_exponent", "rician_factor_db", "nlos_paths"});
  maybe(j, path, "path_loss_exponent",
        [&](const json &v, const std::string &p) { link.path_loss_exponent = get_number(v, p); });
  maybe(j, path, "rician_factor_db",
        [&](const json &v, const std::string &p) { link.rician_factor = db_to_linear(get_number(v, p)); });
  maybe(j, path, "nlos_paths",
        [&](const json &v, const std::string &p) { link.num_nlos_paths = get_int(v, p); });
}

void parse_channel(const json &j, ChannelParams &channel)
{
  const std::string path = "channel";
  expect_keys(j, path, {"reference_loss_db", "angular_spread_deg", "direct", "reflect", "bs_ris"});
  LinkParams *links[] = {&channel.direct, &channel.reflect, &channel.bs_ris};
  maybe(j, path, "reference_loss_db", [&](const json &v, const std::string &p) {
    const double mu0 = db_to_linear(get_number(v, p));
    for (LinkParams *l : links) l->reference_loss = mu0;
  });
  maybe(j, path, "angular_spread_deg", [&](const json &v, const std::string &p) {
    expect_keys(v, p, {"vertical", "horizontal"});
    maybe(v, p, "vertical", [&](const json &x, const std::string &q) {
      for (LinkParams *l : links) l->spread_ver = get_number(x, q) * M_PI / 180.0;
    });
    maybe(v, p, "horizontal", [&](const json &x, const std::string &q) {
      for (LinkParams *l : links) l->spread_hor = get_number(x, q) * M_PI / 180.0;
    });
  });
  maybe(j, path, "direct", [&](const json &v, const std::string &p) { parse_link(v, p, channel.direct); });
  maybe(j, path, "reflect", [&](const json &v, const std::string &p) { parse_link(v, p, channel.reflect); });
  maybe(j, path, "bs_ris", [&](const json &v, const std::string &p) { parse_link(v, p, channel.bs_ris); });
}

void parse_algorithms(const json &j, SystemConfig &c)
{
  const std::string path = "algorithms";
  expect_keys(j, path, {"bd", "mtzf", "sdr"});
  maybe(j, path, "bd", [&](const json &v, const std::string &p) {
    expect_keys(v, p, {"max_iterations", "rate_tolerance", "phase_init", "rank_tolerance",
                       "keep_incumbent"});
    maybe(v, p, "max_iterations", [&](const json &x, const std::string &q) { c.bd.max_iterations = get_int(x, q); });
    maybe(v, p, "rate_tolerance", [&](const json &x, const std::string &q) { c.bd.rate_tolerance = get_number(x, q); });
    maybe(v, p, "rank_tolerance", [&](const json &x, const std::string &q) { c.bd.rank_tolerance = get_number(x, q); });
    maybe(v, p, "keep_incumbent", [&](const json &x, const std::string &q) { c.bd.keep_incumbent = get_bool(x, q); });
    maybe(v, p, "phase_init", [&](const json &x, const std::string &q) {
      const std::string s = get_string(x, q);
      if (s == "zero") c.bd.phase_init = PhaseInit::Zero;
      else if (s == "random") c.bd.phase_init = PhaseInit::Random;
      else bad(q, "expected \"zero\" or \"random\"");
    });
  });
  maybe(j, path, "mtzf", [&](const json &v, const std::string &p) {
    expect_keys(v, p, {"max_iterations", "norm_tolerance", "sweep_order", "eigen_tolerance"});
    maybe(v, p, "max_iterations", [&](const json &x, const std::string &q) { c.mtzf.max_iterations = get_int(x, q); });
    maybe(v, p, "norm_tolerance", [&](const json &x, const std::string &q) { c.mtzf.norm_tolerance = get_number(x, q); });
    maybe(v, p, "eigen_tolerance", [&](const json &x, const std::string &q) { c.mtzf.eigen_tolerance = get_number(x, q); });
    maybe(v, p, "sweep_order", [&](const json &x, const std::string &q) {
      const std::string s = get_string(x, q);
      if (s == "gauss-seidel") c.mtzf.sweep_order = SweepOrder::GaussSeidel;
      else if (s == "jacobi") c.mtzf.sweep_order = SweepOrder::Jacobi;
      else bad(q, "expected \"gauss-seidel\" or \"jacobi\"");
    });
  });
  maybe(j, path, "sdr", [&](const json &v, const std::string &p) {
    expect_keys(v, p, {"method", "max_iterations", "tolerance", "residual_tolerance",
                       "supergradient_iterations", "step_size", "projection_iterations",
                       "randomizations"});
    SdrSettings &s = c.sdr;
    maybe(v, p, "method", [&](const json &x, const std::string &q) {
      const std::string m = get_string(x, q);
      if (m == "interior-point") s.method = SdrMethod::InteriorPoint;
      else if (m == "supergradient") s.method = SdrMethod::Supergradient;
      else bad(q, "expected \"interior-point\" or \"supergradient\"");
    });
    maybe(v, p, "max_iterations", [&](const json &x, const std::string &q) { s.max_iterations = get_int(x, q); });
    maybe(v, p, "tolerance", [&](const json &x, const std::string &q) { s.tolerance = get_number(x, q); });
    maybe(v, p, "residual_tolerance", [&](const json &x, const std::string &q) { s.residual_tolerance = get_number(x, q); });
    maybe(v, p, "supergradient_iterations", [&](const json &x, const std::string &q) { s.supergradient_iterations = get_int(x, q); });
    maybe(v, p, "step_size", [&](const json &x, const std::string &q) { s.step_size = get_number(x, q); });
    maybe(v, p, "projection_iterations", [&](const json &x, const std::string &q) { s.projection_iterations = get_int(x, q); });
    maybe(v, p, "randomizations", [&](const json &x, const std::string &q) { s.randomizations = get_int(x, q); });
  });
}

void parse_system(const json &j, SystemConfig &c)
{
  const std::string path = "system";
  expect_keys(j, path, {"bs_array", "num_groups", "users_per_group", "ris_array",
                        "transmit_power_dbm", "noise_power_dbm", "noise_power_dbm_per_user"});
  maybe(j, path, "bs_array", [&](const json &v, const std::string &p) { c.bs_shape = get_shape(v, p); });

  int groups = 3;
  maybe(j, path, "num_groups", [&](const json &v, const std::string &p) { groups = get_int(v, p); });
  if (j.contains("users_per_group") && j.at("users_per_group").is_array())
  {
    const json &v = j.at("users_per_group");
    c.users_per_group.clear();
    for (std::size_t i = 0; i < v.size(); ++i)
    {
      c.users_per_group.push_back(get_int(v[i], "system.users_per_group[" + std::to_string(i) + "]"));
    }
    if (j.contains("num_groups") && groups != static_cast<int>(v.size()))
      bad("system.users_per_group", "length differs from num_groups");
    groups = static_cast<int>(v.size());
  }
  else
  {
    int k = 4;
    maybe(j, path, "users_per_group", [&](const json &v, const std::string &p) { k = get_int(v, p); });
    if (groups < 0) bad("system.num_groups", "must be >= 0");
    c.users_per_group.assign(groups, k);
  }

  c.ris_shapes.assign(groups, UpaShape{8, 3});
  maybe(j, path, "ris_array", [&](const json &v, const std::string &p) {
    if (is_shape(v))
    {
      c.ris_shapes.assign(groups, get_shape(v, p));
      return;
    }
    if (!v.is_array() || static_cast<int>(v.size()) != groups)
      bad(p, "expected [n_ver, n_hor] or one such pair per group");
    for (int g = 0; g < groups; ++g) c.ris_shapes[g] = get_shape(v[g], p + "[" + std::to_string(g) + "]");
  });
  maybe(j, path, "transmit_power_dbm",
        [&](const json &v, const std::string &p) { c.total_power = dbm_to_watts(get_number(v, p)); });
  maybe(j, path, "noise_power_dbm",
        [&](const json &v, const std::string &p) { c.noise_power = dbm_to_watts(get_number(v, p)); });
  maybe(j, path, "noise_power_dbm_per_user", [&](const json &v, const std::string &p) {
    if (!v.is_array()) bad(p, "expected one array of values per group");
    c.noise_override.clear();
    for (std::size_t g = 0; g < v.size(); ++g)
    {
      std::vector<double> dbm = get_numbers(v[g], p + "[" + std::to_string(g) + "]", 0, 1 << 20);
      for (double &x : dbm) x = dbm_to_watts(x);
      c.noise_override.push_back(std::move(dbm));
    }
  });
}

void parse_geometry(const json *j, const Preset &preset, int groups, Geometry &geo)
{
  const std::string path = "geometry";
  Preset p = preset;
  bool explicit_ris = false;
  if (j)
  {
    expect_keys(*j, path, {"bs_position", "group_centers", "ris_positions", "ris_height",
                           "ris_offset", "user_height", "user_radius"});
    maybe(*j, path, "bs_position", [&](const json &v, const std::string &q) { p.bs = get_position(v, q, false); });
    maybe(*j, path, "group_centers",
          [&](const json &v, const std::string &q) { p.group_centers = get_positions(v, q, true); });
    maybe(*j, path, "ris_height", [&](const json &v, const std::string &q) { p.ris_height = get_number(v, q); });
    maybe(*j, path, "ris_offset", [&](const json &v, const std::string &q) { p.ris_offset = get_number(v, q); });
    maybe(*j, path, "user_height", [&](const json &v, const std::string &q) { geo.user_height = get_number(v, q); });
    maybe(*j, path, "user_radius", [&](const json &v, const std::string &q) { geo.user_radius = get_number(v, q); });
    explicit_ris = j->contains("ris_positions");
  }
  if (static_cast<int>(p.group_centers.size()) < groups)
  {
    std::ostringstream os;
    os << groups << " groups requested but only " << p.group_centers.size()
       << " group centers available (preset \"" << preset.name << "\")";
    bad(path, os.str());
  }
  const Geometry derived = preset_geometry(p, groups);
  geo.bs = derived.bs;
  geo.group_centers = derived.group_centers;
  geo.ris = derived.ris;
  if (explicit_ris)
  {
    geo.ris = get_positions(j->at("ris_positions"), "geometry.ris_positions", false);
    if (static_cast<int>(geo.ris.size()) < groups) bad("geometry.ris_positions", "one position per group required");
    geo.ris.resize(groups);
  }
}

std::vector<Scheme> parse_schemes(const json &j)
{
  if (!j.is_array() || j.empty()) bad("schemes", "expected a non-empty array of scheme names");
  std::vector<Scheme> out;
  for (std::size_t i = 0; i < j.size(); ++i)
  {
    const Scheme s = parse_scheme(get_string(j[i], "schemes[" + std::to_string(i) + "]"));
    if (std::find(out.begin(), out.end(), s) != out.end()) bad("schemes", "duplicate scheme");
    out.push_back(s);
  }
  return out;
}

bool integral(double v) { return std::isfinite(v) && v == std::floor(v); }

}  // namespace

std::string_view axis_name(SweepAxis axis)
{
  switch (axis)
  {
  case SweepAxis::TransmitPowerDbm: return "transmit_power_dbm";
  case SweepAxis::NAntennas: return "n_antennas";
  case SweepAxis::UsersPerGroup: return "users_per_group";
  case SweepAxis::RisElements: return "ris_elements";
  }
  return "unknown";
}

std::string_view scheme_name(Scheme scheme)
{
  switch (scheme)
  {
  case Scheme::Bd: return "bd";
  case Scheme::Mtzf: return "mtzf";
  case Scheme::BdRandom: return "bd-random";
  case Scheme::MtzfRandom: return "mtzf-random";
  }
  return "unknown";
}

SweepAxis parse_axis(std::string_view name)
{
  for (SweepAxis a : {SweepAxis::TransmitPowerDbm, SweepAxis::NAntennas, SweepAxis::UsersPerGroup,
                      SweepAxis::RisElements})
  {
    if (axis_name(a) == name) return a;
  }
  throw ConfigError("sweep.axis: unknown axis \"" + std::string(name) + "\"");
}

Scheme parse_scheme(std::string_view name)
{
  for (Scheme s : {Scheme::Bd, Scheme::Mtzf, Scheme::BdRandom, Scheme::MtzfRandom})
  {
    if (scheme_name(s) == name) return s;
  }
  throw ConfigError("schemes: unknown scheme \"" + std::string(name) + "\"");
}

const std::vector<Preset> &presets()
{
  static const std::vector<Preset> list = {
      {"fig2-like-g4",
       "BS at the origin, four group centers 70-100 m away in the first quadrant and beyond; "
       "an RIS 10 m past each center at 5 m height",
       {0.0, 0.0, 15.0},
       {{70.0, 70.0, 0.0}, {90.0, 20.0, 0.0}, {20.0, 90.0, 0.0}, {-40.0, 80.0, 0.0}}},
      {"fig9a-like-g3",
       "BS at the origin, three group centers 100 m away spread over a quarter circle; "
       "an RIS 10 m past each center at 5 m height",
       {0.0, 0.0, 15.0},
       {{100.0, 0.0, 0.0}, {70.7, 70.7, 0.0}, {0.0, 100.0, 0.0}}},
  };
  return list;
}

const Preset &find_preset(std::string_view name)
{
  for (const Preset &p : presets())
  {
    if (p.name == name) return p;
  }
  throw ConfigError("geometry_preset: unknown preset \"" + std::string(name) + "\"");
}

Geometry preset_geometry(const Preset &preset, int groups)
{
  Geometry geo;
  geo.bs = preset.bs;
  for (int g = 0; g < groups && g < static_cast<int>(preset.group_centers.size()); ++g)
  {
    const Position3D &c = preset.group_centers[g];
    geo.group_centers.push_back(c);
    const double dx = c.x - preset.bs.x;
    const double dy = c.y - preset.bs.y;
    const double d = std::hypot(dx, dy);
    const double s = d > 0.0 ? preset.ris_offset / d : 0.0;
    geo.ris.push_back({c.x + s * dx, c.y + s * dy, preset.ris_height});
  }
  return geo;
}

void Scenario::set_seed(std::uint64_t s)
{
  seed = s;
  source["seed"] = s;
}

void Scenario::set_trials(int n)
{
  if (n < 1) throw ConfigError("trials: must be >= 1");
  trials = n;
  source["trials"] = n;
}

Scenario parse_scenario(const std::string &text)
{
  json doc;
  try
  {
    doc = json::parse(text);
  }
  catch (const json::parse_error &e)
  {
    throw ParseError(std::string("malformed scenario JSON: ") + e.what());
  }
  expect_keys(doc, "scenario", {"schema_version", "name", "geometry_preset", "geometry", "system",
                                "channel", "algorithms", "sweep", "schemes", "trials", "seed"});
  Scenario sc;
  sc.source = doc;
  maybe(doc, "", "schema_version", [&](const json &v, const std::string &p) {
    if (get_int(v, p) != 1) bad(p, "unsupported schema version (expected 1)");
  });
  maybe(doc, "", "name", [&](const json &v, const std::string &p) { sc.name = get_string(v, p); });
  maybe(doc, "", "geometry_preset", [&](const json &v, const std::string &p) { sc.preset = get_string(v, p); });
  const Preset &preset = find_preset(sc.preset);

  parse_system(doc.contains("system") ? doc.at("system") : json::object(), sc.base);
  parse_geometry(doc.contains("geometry") ? &doc.at("geometry") : nullptr, preset,
                 sc.base.num_groups(), sc.base.geometry);
  maybe(doc, "", "channel", [&](const json &v, const std::string &) { parse_channel(v, sc.base.channel); });
  maybe(doc, "", "algorithms", [&](const json &v, const std::string &) { parse_algorithms(v, sc.base); });
  maybe(doc, "", "sweep", [&](const json &v, const std::string &p) {
    expect_keys(v, p, {"axis", "values"});
    maybe(v, p, "axis", [&](const json &x, const std::string &q) { sc.axis = parse_axis(get_string(x, q)); });
    maybe(v, p, "values", [&](const json &x, const std::string &q) {
      sc.values = get_numbers(x, q, 1, std::numeric_limits<std::size_t>::max());
    });
  });
  maybe(doc, "", "schemes", [&](const json &v, const std::string &) { sc.schemes = parse_schemes(v); });
  maybe(doc, "", "trials", [&](const json &v, const std::string &p) { sc.trials = get_int(v, p); });
  maybe(doc, "", "seed", [&](const json &v, const std::string &p) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      bad(p, "expected a non-negative integer");
    sc.seed = v.get<std::uint64_t>();
  });
  validate_scenario(sc);
  return sc;
}

Scenario load_scenario_file(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario file \"" + path + "\"");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_scenario(os.str());
}

SystemConfig config_at(const Scenario &scenario, double value)
{
  SystemConfig c = scenario.base;
  const std::string path = "sweep.values";
  switch (scenario.axis)
  {
  case SweepAxis::TransmitPowerDbm:
    c.total_power = dbm_to_watts(value);
    break;
  case SweepAxis::NAntennas: {
    if (!integral(value) || value < 1) bad(path, "n_antennas values must be positive integers");
    const int n = static_cast<int>(value);
    if (n % c.bs_shape.n_hor != 0)
    {
      std::ostringstream os;
      os << "N=" << n << " is not a multiple of the BS horizontal size " << c.bs_shape.n_hor;
      bad(path, os.str());
    }
    c.bs_shape.n_ver = n / c.bs_shape.n_hor;
    break;
  }
  case SweepAxis::UsersPerGroup:
    if (!integral(value) || value < 1) bad(path, "users_per_group values must be positive integers");
    if (!c.noise_override.empty()) bad(path, "per-user noise cannot be combined with a users_per_group sweep");
    std::fill(c.users_per_group.begin(), c.users_per_group.end(), static_cast<int>(value));
    break;
  case SweepAxis::RisElements:
    if (!integral(value) || value < 1) bad(path, "ris_elements values must be positive integers");
    for (UpaShape &s : c.ris_shapes)
    {
      const int m = static_cast<int>(value);
      if (m % s.n_ver != 0)
      {
        std::ostringstream os;
        os << "M=" << m << " is not a multiple of the RIS vertical size " << s.n_ver;
        bad(path, os.str());
      }
      s.n_hor = m / s.n_ver;
    }
    break;
  }
  return c;
}

void validate_scenario(const Scenario &scenario)
{
  if (scenario.trials < 1) bad("trials", "must be >= 1");
  if (scenario.values.empty()) bad("sweep.values", "must not be empty");
  for (std::size_t i = 1; i < scenario.values.size(); ++i)
  {
    if (!(scenario.values[i] > scenario.values[i - 1])) bad("sweep.values", "must be strictly increasing");
  }
  if (scenario.schemes.empty()) bad("schemes", "must not be empty");
  for (double v : scenario.values)
  {
    validate(config_at(scenario, v));
  }
}

}  // namespace rismc
