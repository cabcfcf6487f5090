#include "fnclin/text_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "fnclin/errors.hpp"

namespace fnclin {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string context(const TextSection& sec, std::string_view key) {
  return "[" + sec.name + "] (line " + std::to_string(sec.line) + ") key '" +
         std::string(key) + "'";
}

}  // namespace

std::optional<std::string> TextSection::find(std::string_view key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return v;
  return std::nullopt;
}

const std::string& TextSection::require(std::string_view key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return v;
  throw ValidationError("missing " + context(*this, key));
}

double TextSection::require_double(std::string_view key) const {
  try {
    return parse_double(require(key));
  } catch (const ValidationError& e) {
    throw ValidationError(context(*this, key) + ": " + e.what());
  }
}

std::vector<double> TextSection::require_doubles(std::string_view key) const {
  try {
    return parse_doubles(require(key));
  } catch (const ValidationError& e) {
    throw ValidationError(context(*this, key) + ": " + e.what());
  }
}

std::vector<TextSection> parse_sections(std::istream& in) {
  std::vector<TextSection> sections(1);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ValidationError("line " + std::to_string(line_no) + ": unterminated section header");
      TextSection sec;
      sec.name = std::string(trim(line.substr(1, line.size() - 2)));
      sec.line = line_no;
      sections.push_back(std::move(sec));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ValidationError("line " + std::to_string(line_no) + ": expected 'key = value'");
    sections.back().entries.emplace_back(std::string(trim(line.substr(0, eq))),
                                         std::string(trim(line.substr(eq + 1))));
  }
  if (sections.front().entries.empty()) sections.erase(sections.begin());
  return sections;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw ValidationError("not a number: '" + std::string(text) + "'");
  return v;
}

long long parse_integer(std::string_view text) {
  text = trim(text);
  long long v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw ValidationError("not an integer: '" + std::string(text) + "'");
  return v;
}

std::vector<double> parse_doubles(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto start = text.find_first_not_of(" \t,", pos);
    if (start == std::string_view::npos) break;
    auto end = text.find_first_of(" \t,", start);
    if (end == std::string_view::npos) end = text.size();
    out.push_back(parse_double(text.substr(start, end - start)));
    pos = end;
  }
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

SystemModel read_system_model(std::istream& in) {
  const auto sections = parse_sections(in);
  std::vector<TgParams> tgs;
  std::vector<ResParams> ress;
  std::vector<OtherInertiaDevice> others;
  const TextSection* system = nullptr;
  for (const auto& sec : sections) {
    if (sec.name == "system") {
      if (system) throw ValidationError("duplicate [system] section");
      system = &sec;
    } else if (sec.name == "tg") {
      TgParams g;
      g.t_reheat = sec.require_double("t_reheat");
      g.t_governor = sec.require_double("t_governor");
      g.t_turbine = sec.require_double("t_turbine");
      g.hp_fraction = sec.require_double("hp_fraction");
      g.droop = sec.require_double("droop");
      g.inertia = sec.require_double("inertia");
      g.capacity_mva = sec.require_double("capacity_mva");
      g.deadband = sec.find("deadband") ? sec.require_double("deadband") : 0.0;
      tgs.push_back(g);
    } else if (sec.name == "res") {
      ResParams r;
      r.t_converter = sec.require_double("t_converter");
      r.droop = sec.require_double("droop");
      r.inertia = sec.require_double("inertia");
      r.capacity_mw = sec.require_double("capacity_mw");
      ress.push_back(r);
    } else if (sec.name == "other") {
      others.push_back({sec.require_double("capacity_mva"), sec.require_double("inertia")});
    } else {
      throw ValidationError("unknown section [" + sec.name + "] at line " +
                            std::to_string(sec.line));
    }
  }
  if (!system) throw ValidationError("missing [system] section");
  const double f_base = system->find("f_base_hz") ? system->require_double("f_base_hz") : 50.0;
  return build_system(std::move(tgs), std::move(ress), std::move(others),
                      system->require_double("damping"), system->require_double("s_base_mva"),
                      f_base);
}

SystemModel load_system_model(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_system_model(in);
}

void write_system_model(std::ostream& out, const SystemModel& m) {
  out << "[system]\n"
      << "damping = " << format_double(m.damping()) << '\n'
      << "s_base_mva = " << format_double(m.s_base_mva()) << '\n'
      << "f_base_hz = " << format_double(m.f_base_hz()) << '\n';
  for (const auto& g : m.tgs()) {
    out << "\n[tg]\n"
        << "t_reheat = " << format_double(g.t_reheat) << '\n'
        << "t_governor = " << format_double(g.t_governor) << '\n'
        << "t_turbine = " << format_double(g.t_turbine) << '\n'
        << "hp_fraction = " << format_double(g.hp_fraction) << '\n'
        << "droop = " << format_double(g.droop) << '\n'
        << "inertia = " << format_double(g.inertia) << '\n'
        << "capacity_mva = " << format_double(g.capacity_mva) << '\n'
        << "deadband = " << format_double(g.deadband) << '\n';
  }
  for (const auto& r : m.ress()) {
    out << "\n[res]\n"
        << "t_converter = " << format_double(r.t_converter) << '\n'
        << "droop = " << format_double(r.droop) << '\n'
        << "inertia = " << format_double(r.inertia) << '\n'
        << "capacity_mw = " << format_double(r.capacity_mw) << '\n';
  }
  for (const auto& e : m.others()) {
    out << "\n[other]\n"
        << "capacity_mva = " << format_double(e.capacity_mva) << '\n'
        << "inertia = " << format_double(e.inertia) << '\n';
  }
}

namespace {

std::vector<std::uint8_t> to_bits(const std::vector<double>& values, std::string_view key) {
  std::vector<std::uint8_t> bits;
  bits.reserve(values.size());
  for (double v : values) {
    if (v != 0.0 && v != 1.0)
      throw ValidationError("scenario key '" + std::string(key) + "' must hold 0/1 values");
    bits.push_back(v == 1.0 ? 1 : 0);
  }
  return bits;
}

}  // namespace

CommitmentScenario read_scenario(std::istream& in) {
  const auto sections = parse_sections(in);
  for (const auto& sec : sections) {
    if (sec.name != "scenario") continue;
    CommitmentScenario s;
    s.tg_on = to_bits(sec.require_doubles("tg_on"), "tg_on");
    const auto part = sec.find("res_participates");
    s.res_participates = part ? to_bits(parse_doubles(*part), "res_participates")
                              : std::vector<std::uint8_t>{};
    const auto power = sec.find("res_power_mw");
    s.res_power_mw = power ? parse_doubles(*power) : std::vector<double>{};
    return s;
  }
  throw ValidationError("missing [scenario] section");
}

CommitmentScenario load_scenario(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_scenario(in);
}

void write_scenario(std::ostream& out, const CommitmentScenario& s) {
  out << "[scenario]\ntg_on =";
  for (auto b : s.tg_on) out << ' ' << int(b);
  out << "\nres_participates =";
  for (auto b : s.res_participates) out << ' ' << int(b);
  out << "\nres_power_mw =";
  for (double p : s.res_power_mw) out << ' ' << format_double(p);
  out << '\n';
}

}  // namespace fnclin
