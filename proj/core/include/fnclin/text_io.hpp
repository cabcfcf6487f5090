#pragma once

// Plain-text formats shared by every file the tools read or write: INI-style
// sections with `key = value` lines, `#` comments, and repeatable section
// names ([tg] may appear once per unit).

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fnclin/system_model.hpp"

namespace fnclin {

struct TextSection {
  std::string name;
  std::vector<std::pair<std::string, std::string>> entries;
  int line = 0;

  std::optional<std::string> find(std::string_view key) const;
  const std::string& require(std::string_view key) const;
  double require_double(std::string_view key) const;
  std::vector<double> require_doubles(std::string_view key) const;
};

/// Parses the section format. Text before the first section header lands in a
/// section with an empty name.
std::vector<TextSection> parse_sections(std::istream& in);

/// Shortest decimal representation that reads back to the same double.
std::string format_double(double value);

double parse_double(std::string_view text);
long long parse_integer(std::string_view text);
std::vector<double> parse_doubles(std::string_view text);

std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

SystemModel read_system_model(std::istream& in);
SystemModel load_system_model(const std::filesystem::path& path);
void write_system_model(std::ostream& out, const SystemModel& model);

/// Scenario file: one [scenario] section with tg_on, res_participates
/// (space-separated 0/1) and res_power_mw.
CommitmentScenario read_scenario(std::istream& in);
CommitmentScenario load_scenario(const std::filesystem::path& path);
void write_scenario(std::ostream& out, const CommitmentScenario& scenario);

}  // namespace fnclin
