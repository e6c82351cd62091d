#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nilflow {

/// RealList entries are decimals or fractions p/q, comma separated.
enum class ValueType { Int, Real, Text, RealList };

struct KeySpec {
  std::string name;
  ValueType type = ValueType::Text;
  /// Default in text form; ignored when required.
  std::string fallback;
  bool required = false;
};

/// Keys accepted by a subcommand, in serialization order. Throws
/// InvalidArgument for an unknown subcommand.
const std::vector<KeySpec>& config_schema(const std::string& subcommand);

const std::vector<std::string>& subcommand_names();

/// Typed key-value configuration of one run. Values are kept as validated
/// text so that serialize reproduces them exactly.
class ExperimentConfig {
 public:
  std::string subcommand;

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  long long get_int(const std::string& key) const;
  double get_real(const std::string& key) const;
  const std::string& get_text(const std::string& key) const;
  std::vector<double> get_reals(const std::string& key) const;
  /// List entries as written, for exact rational parsing.
  std::vector<std::string> get_tokens(const std::string& key) const;

  /// Type-checks against the schema; line is reported in errors (0 when the
  /// value did not come from a file).
  void set(const std::string& key, const std::string& value, int line = 0);

  const std::map<std::string, std::string>& values() const { return values_; }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

 private:
  std::map<std::string, std::string> values_;
};

/// `key = value` lines with `#` comments. The subcommand comes from a
/// `subcommand = <name>` line or from the argument; if both are present they
/// must agree. Defaults are filled in. Errors are ParseError with code
/// UnknownKey, MissingKey, TypeError or ParseError and the offending line.
/// Overrides (line 0) replace file values before defaults are filled in.
using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;
ExperimentConfig parse_config(std::string_view text, const std::string& subcommand = "",
                              const ConfigOverrides& overrides = {});

/// Every key of the schema, one per line, after `subcommand = <name>`.
std::string serialize(const ExperimentConfig& config);

}  // namespace nilflow
