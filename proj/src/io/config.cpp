#include "platoon/io/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>

namespace platoon::io {

namespace detail {

struct Field {
  std::string section;
  std::string key;
  std::function<void(Scenario&, const std::string&)> set;
  std::function<std::string(const Scenario&)> get;
  std::string name() const { return section + "." + key; }
};

[[noreturn]] inline void bad_value(const std::string& field, const std::string& expected, const std::string& got) {
  throw ConfigError(field + ": expected " + expected + " but got '" + got + "'");
}

inline double to_double(const std::string& field, const std::string& s) {
  auto v = parse_double(s);
  if (!v || !std::isfinite(*v)) bad_value(field, "a finite number", s);
  return *v;
}

inline long long to_integer(const std::string& field, const std::string& s) {
  auto v = parse_int(s);
  if (!v) bad_value(field, "an integer", s);
  return *v;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

template <class T>
Field real(std::string section, std::string key, T Scenario::*part, double T::*member) {
  const std::string name = section + "." + key;
  return {std::move(section), std::move(key),
          [=](Scenario& s, const std::string& v) { s.*part.*member = to_double(name, v); },
          [=](const Scenario& s) { return format_double(s.*part.*member); }};
}

template <class T, class I>
Field integer(std::string section, std::string key, T Scenario::*part, I T::*member) {
  const std::string name = section + "." + key;
  return {std::move(section), std::move(key),
          [=](Scenario& s, const std::string& v) {
            const long long x = to_integer(name, v);
            if constexpr (std::is_unsigned_v<I>) {
              if (x < 0) bad_value(name, "a non-negative integer", v);
            }
            s.*part.*member = static_cast<I>(x);
          },
          [=](const Scenario& s) { return std::to_string(s.*part.*member); }};
}

inline std::string format_ratio(const WeightRatio& r) { return format_double(r.first) + "/" + format_double(r.second); }

inline const std::vector<Field>& schema() {
  using S = Scenario;
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    f.push_back(real("world", "lane_length_m", &S::world, &traffic::WorldConfig::lane_length));
    f.push_back(real("world", "speed_limit_mps", &S::world, &traffic::WorldConfig::speed_limit));
    f.push_back(real("world", "hourly_volume_vph", &S::world, &traffic::WorldConfig::hourly_volume));
    f.push_back(real("world", "preload_min_s", &S::world, &traffic::WorldConfig::preload_min));
    f.push_back(real("world", "preload_max_s", &S::world, &traffic::WorldConfig::preload_max));
    f.push_back(integer("world", "platoon_size", &S::world, &traffic::WorldConfig::platoon_size));
    f.push_back(real("world", "dt_s", &S::world, &traffic::WorldConfig::dt));
    f.push_back(real("world", "vehicle_length_m", &S::world, &traffic::WorldConfig::vehicle_length));
    f.push_back(real("world", "accel_min_mps2", &S::world, &traffic::WorldConfig::accel_min));
    f.push_back(real("world", "accel_max_mps2", &S::world, &traffic::WorldConfig::accel_max));
    f.push_back(real("world", "exit_zone_m", &S::world, &traffic::WorldConfig::exit_zone));
    f.push_back({"world", "horizon_s", [](S& s, const std::string& v) { s.horizon_s = to_double("world.horizon_s", v); },
                 [](const S& s) { return format_double(s.horizon_s); }});

    f.push_back(real("idm", "max_accel_mps2", &S::idm, &traffic::IdmParams::max_accel));
    f.push_back(real("idm", "desired_speed_mps", &S::idm, &traffic::IdmParams::desired_speed));
    f.push_back(real("idm", "min_gap_m", &S::idm, &traffic::IdmParams::min_gap));
    f.push_back(real("idm", "time_headway_s", &S::idm, &traffic::IdmParams::time_headway));
    f.push_back(real("idm", "comfort_decel_mps2", &S::idm, &traffic::IdmParams::comfort_decel));
    f.push_back(real("idm", "delta", &S::idm, &traffic::IdmParams::delta));

    f.push_back(integer("signal", "phase_count", &S::signal, &SignalSettings::phase_count));
    f.push_back(real("signal", "green_s", &S::signal, &SignalSettings::green_s));
    f.push_back(real("signal", "yellow_s", &S::signal, &SignalSettings::yellow_s));
    f.push_back(real("signal", "offset_s", &S::signal, &SignalSettings::offset_s));
    f.push_back(integer("signal", "approach_phase", &S::signal, &SignalSettings::approach_phase));

    f.push_back(real("energy", "mass_kg", &S::ev, &energy::EvParams::mass));
    f.push_back(real("energy", "frontal_area_m2", &S::ev, &energy::EvParams::frontal_area));
    f.push_back(real("energy", "drag_coeff", &S::ev, &energy::EvParams::drag_coeff));
    f.push_back(real("energy", "roll_coeff", &S::ev, &energy::EvParams::roll_coeff));
    f.push_back(real("energy", "air_density_kgpm3", &S::ev, &energy::EvParams::air_density));
    f.push_back(real("energy", "propulsion_eff", &S::ev, &energy::EvParams::propulsion_eff));
    f.push_back(real("energy", "recuperation_eff", &S::ev, &energy::EvParams::recuperation_eff));
    f.push_back(real("energy", "aux_power_w", &S::ev, &energy::EvParams::aux_power));

    f.push_back(real("reward", "omega1", &S::reward, &env::RewardConfig::omega1));
    f.push_back(real("reward", "omega2", &S::reward, &env::RewardConfig::omega2));
    f.push_back({"reward", "mode",
                 [](S& s, const std::string& v) {
                   if (v == "episodic") s.reward.mode = env::RewardMode::EpisodicDelayed;
                   else if (v == "distributed") s.reward.mode = env::RewardMode::Distributed;
                   else bad_value("reward.mode", "'episodic' or 'distributed'", v);
                 },
                 [](const S& s) { return env::to_string(s.reward.mode); }});

    f.push_back(real("observation", "chi_x_m", &S::leader, &env::LeaderDefaults::range));
    f.push_back(real("observation", "chi_v_mps", &S::leader, &env::LeaderDefaults::speed_diff));
    f.push_back(real("observation", "chi_a_mps2", &S::leader, &env::LeaderDefaults::accel_diff));

    f.push_back(real("ars", "step_size", &S::ars, &ars::ArsConfig::step_size));
    f.push_back(integer("ars", "directions", &S::ars, &ars::ArsConfig::directions));
    f.push_back(real("ars", "noise_std", &S::ars, &ars::ArsConfig::noise_std));
    f.push_back(integer("ars", "top_directions", &S::ars, &ars::ArsConfig::top_directions));
    f.push_back(integer("ars", "iterations", &S::ars, &ars::ArsConfig::iterations));
    f.push_back(integer("ars", "eval_interval", &S::ars, &ars::ArsConfig::eval_interval));
    f.push_back(integer("ars", "eval_episodes", &S::ars, &ars::ArsConfig::eval_episodes));
    f.push_back(integer("ars", "seed", &S::ars, &ars::ArsConfig::seed));

    f.push_back(integer("eval", "episodes", &S::eval, &EvalSettings::episodes));
    f.push_back(integer("eval", "seed", &S::eval, &EvalSettings::seed));
    f.push_back({"eval", "glosa_min_speed_mps",
                 [](S& s, const std::string& v) { s.eval.glosa.min_speed = to_double("eval.glosa_min_speed_mps", v); },
                 [](const S& s) { return format_double(s.eval.glosa.min_speed); }});
    f.push_back({"eval", "stop_speed_mps",
                 [](S& s, const std::string& v) {
                   s.eval.stop_rule.speed_threshold = to_double("eval.stop_speed_mps", v);
                 },
                 [](const S& s) { return format_double(s.eval.stop_rule.speed_threshold); }});
    f.push_back({"eval", "stop_min_steps",
                 [](S& s, const std::string& v) {
                   s.eval.stop_rule.min_steps = static_cast<int>(to_integer("eval.stop_min_steps", v));
                 },
                 [](const S& s) { return std::to_string(s.eval.stop_rule.min_steps); }});

    f.push_back(integer("experiment", "agents_per_mode", &S::experiment, &ExperimentSettings::agents_per_mode));
    f.push_back(integer("experiment", "episodes_per_agent", &S::experiment, &ExperimentSettings::episodes_per_agent));
    f.push_back(integer("experiment", "size_episodes", &S::experiment, &ExperimentSettings::size_episodes));
    f.push_back({"experiment", "sizes",
                 [](S& s, const std::string& v) {
                   s.experiment.sizes.clear();
                   for (const auto& item : split_list(v))
                     s.experiment.sizes.push_back(static_cast<int>(to_integer("experiment.sizes", item)));
                 },
                 [](const S& s) {
                   std::string out;
                   for (int n : s.experiment.sizes) out += (out.empty() ? "" : ",") + std::to_string(n);
                   return out;
                 }});
    f.push_back({"experiment", "weight_ratios",
                 [](S& s, const std::string& v) {
                   s.experiment.weight_ratios.clear();
                   for (const auto& item : split_list(v)) {
                     const auto slash = item.find('/');
                     if (slash == std::string::npos) bad_value("experiment.weight_ratios", "ratios like 6/1", item);
                     s.experiment.weight_ratios.emplace_back(
                         to_double("experiment.weight_ratios", item.substr(0, slash)),
                         to_double("experiment.weight_ratios", item.substr(slash + 1)));
                   }
                 },
                 [](const S& s) {
                   std::string out;
                   for (const auto& r : s.experiment.weight_ratios) out += (out.empty() ? "" : ",") + format_ratio(r);
                   return out;
                 }});
    return f;
  }();
  return fields;
}

inline const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& f : schema())
    if (f.section == section && f.key == key) return &f;
  return nullptr;
}

}  // namespace detail

void apply_override(Scenario& s, const std::string& dotted, const std::string& value) {
  const auto dot = dotted.find('.');
  const auto* f = dot == std::string::npos ? nullptr : detail::find_field(dotted.substr(0, dot), dotted.substr(dot + 1));
  if (!f) throw ConfigError("unknown config key '" + dotted + "'");
  f->set(s, value);
}

Scenario parse_scenario(std::istream& in, Scenario base) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config: key '" + section + "' must appear inside a [section]");
    for (const auto& [key, value] : body) {
      const auto* f = detail::find_field(section, key);
      if (!f) throw ConfigError("unknown config key '" + section + "." + key + "'");
      f->set(base, value.data());
    }
  }
  return base;
}

Scenario load_scenario(const std::string& path, Scenario base) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  return parse_scenario(f, std::move(base));
}

std::string format_scenario(const Scenario& s) {
  std::ostringstream out;
  std::string section;
  for (const auto& f : detail::schema()) {
    if (f.section != section) {
      out << (section.empty() ? "" : "\n") << '[' << f.section << "]\n";
      section = f.section;
    }
    out << f.key << " = " << f.get(s) << '\n';
  }
  return out.str();
}

std::map<std::string, std::map<std::string, std::string>> scenario_entries(const Scenario& s) {
  std::map<std::string, std::map<std::string, std::string>> m;
  for (const auto& f : detail::schema()) m[f.section][f.key] = f.get(s);
  return m;
}

}  // namespace platoon::io
