#include "nilflow/config.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "nilflow/errors.hpp"

namespace nilflow {

namespace {

constexpr const char* kGolden = "1, 1.6180339887498949";

KeySpec req(std::string name, ValueType type) { return {std::move(name), type, "", true}; }
KeySpec opt(std::string name, ValueType type, std::string fallback) {
  return {std::move(name), type, std::move(fallback), false};
}

using V = ValueType;

std::vector<KeySpec> with_common(std::vector<KeySpec> keys) {
  keys.push_back(opt("output_dir", V::Text, ""));
  return keys;
}

std::vector<KeySpec> action_keys(std::vector<KeySpec> extra) {
  std::vector<KeySpec> keys{opt("alpha", V::RealList, kGolden), opt("beta", V::RealList, "1"),
                            opt("mu", V::Real, "0")};
  keys.insert(keys.end(), extra.begin(), extra.end());
  return with_common(std::move(keys));
}

const std::map<std::string, std::vector<KeySpec>>& schemas() {
  static const std::map<std::string, std::vector<KeySpec>> table = {
      {"witness", with_common({req("alpha", V::RealList), opt("gamma", V::Real, "1"),
                               opt("K", V::Int, "100"), opt("kind", V::Text, "linear-form")})},
      {"solve-coboundary",
       action_keys({opt("K", V::Int, "32"), opt("N", V::Int, "10"), opt("M", V::Int, "64"),
                    opt("samples", V::Int, "50"), opt("seed", V::Int, "1"), opt("decay", V::Real, "0.5"),
                    opt("r", V::Real, "1"), opt("tol", V::Real, "1e-9")})},
      {"split", action_keys({opt("K", V::Int, "32"), opt("N", V::Int, "20"), opt("M", V::Int, "64"),
                             opt("samples", V::Int, "50"), opt("seed", V::Int, "1"),
                             opt("decay", V::Real, "0.5"), opt("r", V::Real, "1"),
                             opt("tol", V::Real, "1e-9"), opt("method", V::Text, "direct")})},
      {"spectrum", action_keys({opt("n", V::Int, "1"), opt("M", V::Int, "64")})},
      {"gh-report", action_keys({opt("N", V::Int, "20"), opt("M", V::Int, "64"), opt("K", V::Int, "100"),
                                 opt("gamma", V::Real, "1")})},
      {"kernel-dim", action_keys({opt("N", V::Int, "20"), opt("M", V::Int, "64"), opt("K", V::Int, "20"),
                                  opt("tol", V::Real, "1e-6")})},
      {"constant-cohomology", with_common({opt("algebra", V::Text, ""), opt("alpha", V::RealList, kGolden),
                                           opt("beta", V::RealList, "1"), opt("mu", V::RealList, "0")})},
      {"kam", with_common({opt("omega", V::RealList, kGolden), opt("eps", V::Real, "1e-3"),
                           opt("K", V::Int, "64"), opt("max_iter", V::Int, "12"),
                           opt("floor", V::Real, "1e-12"), opt("verify_grid", V::Int, "256"),
                           opt("witness_K", V::Int, "100")})},
      {"rigidity-step",
       action_keys({opt("perturbation_file", V::Text, ""), opt("cutoff", V::Real, "-1"),
                    opt("eps", V::RealList, "1e-4, 3.1622776601683794e-4, 1e-3, 3.1622776601683794e-3, 1e-2"),
                    opt("samples", V::Int, "1"), opt("seed", V::Int, "1"), opt("band", V::Int, "3"),
                    opt("threshold", V::Real, "0.1"), opt("r", V::Real, "0")})},
      {"cg-decay", with_common({opt("s", V::Real, "0"), opt("k", V::Real, "2"), opt("N", V::Int, "20"),
                                opt("K", V::Int, "8"), opt("M", V::Int, "32"), opt("samples", V::Int, "30"),
                                opt("seed", V::Int, "1"), opt("decay", V::Real, "0.5")})},
  };
  return table;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_int(const std::string& s, long long& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_real(const std::string& s, double& out) {
  if (s.empty()) return false;
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    double num = 0.0;
    double den = 0.0;
    if (!parse_real(s.substr(0, slash), num) || !parse_real(s.substr(slash + 1), den) || den == 0.0) {
      return false;
    }
    out = num / den;
    return true;
  }
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

const KeySpec* find_key(const std::vector<KeySpec>& schema, const std::string& key) {
  auto it = std::find_if(schema.begin(), schema.end(), [&](const KeySpec& k) { return k.name == key; });
  return it == schema.end() ? nullptr : &*it;
}

void check_type(const KeySpec& spec, const std::string& value, int line) {
  auto fail = [&](const char* what) {
    throw ParseError(ErrorCode::TypeError, line, spec.name + " = " + value + ": expected " + what);
  };
  switch (spec.type) {
    case ValueType::Int: {
      long long x = 0;
      if (!parse_int(value, x)) fail("an integer");
      break;
    }
    case ValueType::Real: {
      double x = 0.0;
      if (!parse_real(value, x)) fail("a number");
      break;
    }
    case ValueType::RealList: {
      const auto items = split_list(value);
      if (items.empty()) fail("a comma-separated list of numbers");
      for (const auto& item : items) {
        double x = 0.0;
        if (!parse_real(item, x)) fail("a comma-separated list of numbers");
      }
      break;
    }
    case ValueType::Text:
      break;
  }
}

void fill_defaults(ExperimentConfig& config, int last_line) {
  for (const auto& spec : config_schema(config.subcommand)) {
    if (config.has(spec.name)) continue;
    if (spec.required) {
      throw ParseError(ErrorCode::MissingKey, last_line,
                       "missing required key '" + spec.name + "' for " + config.subcommand);
    }
    config.set(spec.name, spec.fallback);
  }
}

}  // namespace

const std::vector<KeySpec>& config_schema(const std::string& subcommand) {
  const auto& table = schemas();
  auto it = table.find(subcommand);
  if (it == table.end()) throw Error(ErrorCode::InvalidArgument, "unknown subcommand '" + subcommand + "'");
  return it->second;
}

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = {
      "witness", "solve-coboundary", "split", "spectrum", "gh-report",
      "kernel-dim", "constant-cohomology", "kam", "rigidity-step", "cg-decay"};
  return names;
}

long long ExperimentConfig::get_int(const std::string& key) const {
  long long x = 0;
  if (!parse_int(get_text(key), x)) throw Error(ErrorCode::TypeError, key + " is not an integer");
  return x;
}

double ExperimentConfig::get_real(const std::string& key) const {
  double x = 0.0;
  if (!parse_real(get_text(key), x)) throw Error(ErrorCode::TypeError, key + " is not a number");
  return x;
}

const std::string& ExperimentConfig::get_text(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorCode::MissingKey, "missing key '" + key + "'");
  return it->second;
}

std::vector<double> ExperimentConfig::get_reals(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : get_tokens(key)) {
    double x = 0.0;
    if (!parse_real(item, x)) throw Error(ErrorCode::TypeError, key + " has a non-numeric entry");
    out.push_back(x);
  }
  return out;
}

std::vector<std::string> ExperimentConfig::get_tokens(const std::string& key) const {
  return split_list(get_text(key));
}

void ExperimentConfig::set(const std::string& key, const std::string& value, int line) {
  const auto& schema = config_schema(subcommand);
  const KeySpec* spec = find_key(schema, key);
  if (spec == nullptr) {
    throw ParseError(ErrorCode::UnknownKey, line, "unknown key '" + key + "' for " + subcommand);
  }
  const std::string v = trim(value);
  check_type(*spec, v, line);
  values_[key] = v;
}

ExperimentConfig parse_config(std::string_view text, const std::string& subcommand,
                              const ConfigOverrides& overrides) {
  struct Entry {
    std::string key;
    std::string value;
    int line;
  };
  std::vector<Entry> entries;
  std::string from_file;
  int from_file_line = 0;
  int line_no = 0;
  std::stringstream ss{std::string(text)};
  std::string raw;
  while (std::getline(ss, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(ErrorCode::ParseError, line_no, "expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(ErrorCode::ParseError, line_no, "empty key");
    if (key == "subcommand") {
      from_file = value;
      from_file_line = line_no;
      continue;
    }
    entries.push_back({key, value, line_no});
  }

  ExperimentConfig config;
  if (!subcommand.empty() && !from_file.empty() && subcommand != from_file) {
    throw ParseError(ErrorCode::ParseError, from_file_line,
                     "config is for '" + from_file + "', not '" + subcommand + "'");
  }
  config.subcommand = subcommand.empty() ? from_file : subcommand;
  if (config.subcommand.empty()) throw ParseError(ErrorCode::MissingKey, 0, "no subcommand given");
  const auto& names = subcommand_names();
  if (std::find(names.begin(), names.end(), config.subcommand) == names.end()) {
    throw ParseError(ErrorCode::ParseError, from_file_line, "unknown subcommand '" + config.subcommand + "'");
  }
  for (const auto& e : entries) {
    if (config.has(e.key)) throw ParseError(ErrorCode::ParseError, e.line, "duplicate key '" + e.key + "'");
    config.set(e.key, e.value, e.line);
  }
  for (const auto& [key, value] : overrides) config.set(key, value);
  fill_defaults(config, line_no);
  return config;
}

std::string serialize(const ExperimentConfig& config) {
  std::ostringstream os;
  os << "subcommand = " << config.subcommand << '\n';
  for (const auto& spec : config_schema(config.subcommand)) {
    os << spec.name << " = " << config.get_text(spec.name) << '\n';
  }
  return os.str();
}

}  // namespace nilflow
