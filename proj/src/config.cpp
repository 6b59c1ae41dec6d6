#include "morphoflow/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "morphoflow/errors.hpp"

namespace morphoflow {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

const char* shape_name(BumpShape s) {
  return s == BumpShape::symmetric_bump ? "symmetric_bump" : "plateau_bump";
}

struct Field {
  std::function<void(SimulationConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const SimulationConfig&)> get;
};

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(key + ": expected a number, got '" + v + "'", 0);
  return out;
}

enum class Range { any, positive, nonnegative };

template <typename Get>
Field real(Get member, Range range) {
  return {[member, range](SimulationConfig& c, const std::string& key, const std::string& v) {
            const double x = to_double(key, v);
            if (range == Range::positive && !(x > 0.0))
              throw ConfigError(key + " must be positive, got " + v, 0);
            if (range == Range::nonnegative && !(x >= 0.0))
              throw ConfigError(key + " must be non-negative, got " + v, 0);
            member(c) = x;
          },
          [member](const SimulationConfig& c) {
            SimulationConfig copy = c;
            return format_double(member(copy));
          }};
}

template <typename Get>
Field count(Get member, std::size_t min_value) {
  return {[member, min_value](SimulationConfig& c, const std::string& key, const std::string& v) {
            long long x = 0;
            const auto* end = v.data() + v.size();
            auto [ptr, ec] = std::from_chars(v.data(), end, x);
            if (ec != std::errc() || ptr != end) throw ConfigError(key + ": expected an integer, got '" + v + "'", 0);
            if (x < static_cast<long long>(min_value))
              throw ConfigError(key + " must be at least " + std::to_string(min_value), 0);
            member(c) = static_cast<std::size_t>(x);
          },
          [member](const SimulationConfig& c) {
            SimulationConfig copy = c;
            return std::to_string(member(copy));
          }};
}

template <typename Get>
Field shape(Get member) {
  return {[member](SimulationConfig& c, const std::string& key, const std::string& v) {
            if (v == "symmetric_bump") member(c) = BumpShape::symmetric_bump;
            else if (v == "plateau_bump") member(c) = BumpShape::plateau_bump;
            else throw ConfigError(key + ": expected symmetric_bump or plateau_bump, got '" + v + "'", 0);
          },
          [member](const SimulationConfig& c) {
            SimulationConfig copy = c;
            return std::string(shape_name(member(copy)));
          }};
}

#define MF_REF(expr) [](SimulationConfig& c) -> auto& { return expr; }

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"solver.omega", real(MF_REF(c.omega), Range::positive)},
      {"kernel.sigma", real(MF_REF(c.kernel.sigma), Range::positive)},
      {"elastic.lambda", real(MF_REF(c.elastic.lambda), Range::nonnegative)},
      {"elastic.mu", real(MF_REF(c.elastic.mu), Range::positive)},
      {"diffusion.rx", real(MF_REF(c.diffusion.rx), Range::positive)},
      {"diffusion.ry", real(MF_REF(c.diffusion.ry), Range::positive)},
      {"reaction.pmin", real(MF_REF(c.reaction.p_min), Range::any)},
      {"reaction.pmax", real(MF_REF(c.reaction.p_max), Range::any)},
      {"reaction.height", real(MF_REF(c.reaction.height), Range::nonnegative)},
      {"reaction.shape", shape(MF_REF(c.reaction.shape))},
      {"yank.pmin", real(MF_REF(c.yank.p_min), Range::any)},
      {"yank.pmax", real(MF_REF(c.yank.p_max), Range::any)},
      {"yank.height", real(MF_REF(c.yank.height), Range::nonnegative)},
      {"yank.shape", shape(MF_REF(c.yank.shape))},
      {"time.dt", real(MF_REF(c.dt), Range::positive)},
      {"time.T", real(MF_REF(c.T), Range::positive)},
      {"coupling.inner_iters", count(MF_REF(c.inner_iters), 0)},
      {"mesh.semi_a", real(MF_REF(c.mesh.semi_a), Range::positive)},
      {"mesh.semi_b", real(MF_REF(c.mesh.semi_b), Range::positive)},
      {"mesh.edge", real(MF_REF(c.mesh.edge), Range::positive)},
      {"potential.cx", real(MF_REF(c.potential.center.x()), Range::any)},
      {"potential.cy", real(MF_REF(c.potential.center.y()), Range::any)},
      {"potential.radius", real(MF_REF(c.potential.radius), Range::positive)},
      {"potential.height", real(MF_REF(c.potential.height), Range::nonnegative)},
      {"varifold.sigma", real(MF_REF(c.varifold.sigma_w), Range::positive)},
      {"output.dir",
       {[](SimulationConfig& c, const std::string& key, const std::string& v) {
          if (v.empty()) throw ConfigError(key + " must not be empty", 0);
          c.output.dir = v;
        },
        [](const SimulationConfig& c) { return c.output.dir; }}},
      {"output.every", count(MF_REF(c.output.every), 1)},
  };
  return table;
}

#undef MF_REF

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, f] : fields()) keys.push_back(k);
  return keys;
}

SimulationConfig parse_config(std::istream& in) {
  std::map<std::string, const Field*> lookup;
  for (const auto& [k, f] : fields()) lookup[k] = &f;

  SimulationConfig cfg;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + line + "'", lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = lookup.find(key);
    if (it == lookup.end()) throw ConfigError("unknown key '" + key + "'", lineno);
    if (value.empty()) throw ConfigError(key + ": missing value", lineno);
    try {
      it->second->set(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), lineno);
    }
  }
  try {
    cfg.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what(), 0);
  }
  return cfg;
}

SimulationConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", 0);
  return parse_config(in);
}

SimulationConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

void write_config(std::ostream& out, const SimulationConfig& config) {
  for (const auto& [k, f] : fields()) out << k << " = " << f.get(config) << '\n';
}

std::string config_to_string(const SimulationConfig& config) {
  std::ostringstream ss;
  write_config(ss, config);
  return ss.str();
}

}  // namespace morphoflow
