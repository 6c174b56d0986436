#include "cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <numbers>
#include <regex>
#include <sstream>

#include "spinlink/errors.hpp"

namespace spinlink::cli {

namespace {

constexpr int kMaxMemoryModes = 5;

struct Entry {
  std::string value;
  int line = 0;
};

struct Section {
  std::string name;
  int line = 0;
  std::map<std::string, Entry> entries;
  std::vector<std::string> order;
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

// Drops a trailing `# comment` that is not inside quotes.
std::string strip_comment(std::string_view line) {
  char quote = 0;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#' || c == ';') {
      return std::string(line.substr(0, k));
    }
  }
  return std::string(line);
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Plain number, or [sign][number*]pi[/number].
std::optional<double> parse_angle(const std::string& s) {
  if (auto v = parse_number(s)) return v;
  static const std::regex pattern(
      R"(^([+-])?\s*(?:([0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)\s*\*\s*)?pi\s*(?:/\s*([0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?))?$)");
  std::smatch m;
  if (!std::regex_match(s, m, pattern)) return std::nullopt;
  double v = std::numbers::pi;
  if (m[2].matched) v *= std::strtod(m[2].str().c_str(), nullptr);
  if (m[3].matched) {
    const double d = std::strtod(m[3].str().c_str(), nullptr);
    if (d == 0.0) return std::nullopt;
    v /= d;
  }
  if (m[1].matched && m[1].str() == "-") v = -v;
  return v;
}

std::string format_number(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

// Reads the keys of one section against a fixed schema, collecting errors.
class SectionReader {
 public:
  SectionReader(const Section* section, std::string path, std::vector<ConfigIssue>& errors,
                std::ostringstream& echo)
      : section_(section), path_(std::move(path)), errors_(errors), echo_(echo) {}

  double real(const std::string& key, double fallback, const std::function<bool(double)>& ok,
              const char* requirement, bool angle = false) {
    const Entry* e = find(key);
    if (!e) {
      emit_default(key, format_number(fallback));
      return fallback;
    }
    const auto v = angle ? parse_angle(e->value) : parse_number(e->value);
    if (!v) {
      error(*e, key + ": expected a number, got '" + e->value + "'");
      return fallback;
    }
    if (!ok(*v)) {
      error(*e, key + " = " + e->value + " is out of range (" + requirement + ")");
      return fallback;
    }
    emit(key, format_number(*v));
    return *v;
  }

  int integer(const std::string& key, int fallback, int lo, int hi) {
    const Entry* e = find(key);
    if (!e) {
      emit_default(key, std::to_string(fallback));
      return fallback;
    }
    const auto v = parse_number(e->value);
    if (!v || *v != std::floor(*v)) {
      error(*e, key + ": expected an integer, got '" + e->value + "'");
      return fallback;
    }
    if (*v < lo || *v > hi) {
      error(*e, key + " = " + e->value + " is out of range (" + std::to_string(lo) + " to " +
                    std::to_string(hi) + ")");
      return fallback;
    }
    emit(key, e->value);
    return static_cast<int>(*v);
  }

  bool boolean(const std::string& key, bool fallback) {
    const Entry* e = find(key);
    if (!e) {
      emit_default(key, fallback ? "true" : "false");
      return fallback;
    }
    if (e->value == "true" || e->value == "false") {
      emit(key, e->value);
      return e->value == "true";
    }
    error(*e, key + ": expected true or false, got '" + e->value + "'");
    return fallback;
  }

  Polarization polarization(const std::string& key) {
    const Entry* e = find(key);
    if (!e) {
      emit_default(key, "normal");
      return Polarization::normal;
    }
    if (e->value == "normal" || e->value == "reversed") {
      emit(key, e->value);
      return e->value == "normal" ? Polarization::normal : Polarization::reversed;
    }
    error(*e, key + ": expected normal or reversed, got '" + e->value + "'");
    return Polarization::normal;
  }

  /// Reports every key that no schema entry consumed.
  void finish() {
    if (!section_) return;
    for (const auto& key : section_->order) {
      if (std::find(consumed_.begin(), consumed_.end(), key) == consumed_.end()) {
        error(section_->entries.at(key), "unknown key '" + key + "' in [" + section_->name + "]");
      }
    }
  }

 private:
  const Entry* find(const std::string& key) {
    consumed_.push_back(key);
    if (!section_) return nullptr;
    const auto it = section_->entries.find(key);
    return it == section_->entries.end() ? nullptr : &it->second;
  }
  void emit(const std::string& key, const std::string& value) { echo_ << key << " = " << value << '\n'; }
  void emit_default(const std::string& key, const std::string& value) {
    echo_ << key << " = " << value << "  # default\n";
  }
  void error(const Entry& e, std::string message) {
    errors_.push_back({path_, e.line, std::move(message)});
  }

  const Section* section_;
  std::string path_;
  std::vector<ConfigIssue>& errors_;
  std::ostringstream& echo_;
  std::vector<std::string> consumed_;
};

const auto positive = [](double v) { return v > 0.0; };
const auto non_negative = [](double v) { return v >= 0.0; };
const auto any_finite = [](double) { return true; };
const auto unit_interval = [](double v) { return v > 0.0 && v <= 1.0; };

// Splits "a.b.c" on dots.
std::vector<std::string> split_name(const std::string& name) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(name);
  while (std::getline(in, part, '.')) parts.push_back(trim(part));
  return parts;
}

std::optional<int> parse_channel_id(const std::string& s) {
  if (s == "0" || s == "1" || s == "2") return s[0] - '0';
  return std::nullopt;
}

}  // namespace

std::string ConfigIssue::str() const {
  std::ostringstream out;
  out << path;
  if (line > 0) out << ':' << line;
  out << ": " << message;
  return out.str();
}

ConfigReport parse_config(std::string_view text, const std::string& path) {
  ConfigReport report;
  auto& errors = report.errors;

  std::vector<Section> sections;
  std::map<std::string, std::size_t> section_index;
  Section* current = nullptr;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back({path, line_no, "malformed section header '" + line + "'"});
        current = nullptr;
        continue;
      }
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (section_index.count(name)) {
        errors.push_back({path, line_no,
                          "duplicate section [" + name + "] (first at line " +
                              std::to_string(sections[section_index[name]].line) + ")"});
        current = nullptr;
        continue;
      }
      section_index[name] = sections.size();
      sections.push_back({name, line_no, {}, {}});
      current = &sections.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back({path, line_no, "expected `key = value`, got '" + line + "'"});
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    if (!current) {
      errors.push_back({path, line_no, "key '" + key + "' outside of any valid section"});
      continue;
    }
    if (key.empty() || value.empty()) {
      errors.push_back({path, line_no, "expected `key = value`, got '" + line + "'"});
      continue;
    }
    if (current->entries.count(key)) {
      errors.push_back({path, line_no, "duplicate key '" + key + "' in [" + current->name + "]"});
      continue;
    }
    current->entries[key] = {value, line_no};
    current->order.push_back(key);
  }

  // Classify sections.
  const Section* reservoir_section = nullptr;
  const Section* transport_section = nullptr;
  std::map<int, const Section*> channel_sections;
  std::vector<std::pair<std::pair<int, int>, const Section*>> edge_sections;
  for (const auto& s : sections) {
    const auto parts = split_name(s.name);
    if (s.name == "reservoir") {
      reservoir_section = &s;
    } else if (s.name == "transport") {
      transport_section = &s;
    } else if (parts.size() == 2 && parts[0] == "channel") {
      const auto id = parse_channel_id(parts[1]);
      if (!id) {
        errors.push_back({path, s.line, "channel id must be 0, 1 or 2 in [" + s.name + "]"});
      } else if (channel_sections.count(*id)) {
        errors.push_back({path, s.line, "channel " + parts[1] + " is defined twice"});
      } else {
        channel_sections[*id] = &s;
      }
    } else if (parts.size() == 3 && parts[0] == "edge") {
      const auto a = parse_channel_id(parts[1]);
      const auto b = parse_channel_id(parts[2]);
      if (!a || !b || *a == *b) {
        errors.push_back({path, s.line, "edge section must name two distinct channel ids: [" + s.name + "]"});
      } else {
        edge_sections.push_back({{std::min(*a, *b), std::max(*a, *b)}, &s});
      }
    } else {
      errors.push_back({path, s.line, "unknown section [" + s.name + "]"});
    }
  }
  if (!reservoir_section) {
    errors.push_back({path, 0, "missing required section [reservoir]"});
  }
  if (channel_sections.empty()) {
    errors.push_back({path, 0, "missing required section [channel.<id>] (at least one channel)"});
  }

  std::ostringstream echo;
  RunConfig config;

  echo << "[reservoir]\n";
  {
    SectionReader r(reservoir_section, path, errors, echo);
    auto& res = config.reservoir;
    res.spin_decay = r.real("gamma_s_hz", 1.0 / 30e-3, positive, "> 0");
    res.exchange_rate = r.real("gamma_c_hz", 0.1 * res.spin_decay, positive, "> 0");
    res.optical_decay = r.real("gamma_opt_hz", 1.0 / 20e-9, positive, "> 0");
    res.two_photon_detuning =
        2.0 * std::numbers::pi * r.real("delta_b_hz", 0.0, any_finite, "finite");
    res.larmor_frequency = 2.0 * std::numbers::pi * r.real("larmor_hz", 352e3, positive, "> 0");
    res.memory_modes = r.integer("memory_modes", 1, 0, kMaxMemoryModes);
    r.finish();
  }

  for (const auto& [id, section] : channel_sections) {
    echo << "\n[channel." << id << "]\n";
    SectionReader r(section, path, errors, echo);
    ChannelConfig c;
    c.id = id;
    c.control_phase = r.real("control_phase_rad", 0.0, any_finite, "finite", true);
    c.probe_phase = r.real("probe_phase_rad", 0.0, any_finite, "finite", true);
    c.control_rabi = r.real("control_rabi_hz", 1e7, positive, "> 0");
    c.probe_rabi = r.real("probe_rabi_hz", 4e6, non_negative, ">= 0");
    c.probe_on = r.boolean("probe_on", true);
    c.polarization = r.polarization("polarization");
    r.finish();
    config.channels.push_back(c);
  }

  echo << "\n[transport]\n";
  {
    SectionReader r(transport_section, path, errors, echo);
    config.transport.visibility = r.real("visibility", 1.0, unit_interval, "0 < v <= 1");
    config.transport.floor_fraction = r.real("floor_fraction", 1.0 / 79.4, positive, "> 0");
    config.transport.peak_transmission =
        r.real("peak_transmission", 1.0, unit_interval, "0 < T0 <= 1");
    r.finish();
  }

  for (const auto& [pair, section] : edge_sections) {
    echo << "\n[edge." << pair.first << '.' << pair.second << "]\n";
    SectionReader r(section, path, errors, echo);
    const double rate = r.real("gamma_c_hz", config.reservoir.exchange_rate, non_negative, ">= 0");
    r.finish();
    if (!channel_sections.count(pair.first) || !channel_sections.count(pair.second)) {
      errors.push_back({path, section->line, "[" + section->name + "] names a channel that is not configured"});
    }
    config.reservoir.edge_rates[pair] = rate;
  }

  report.normalized = echo.str();
  std::stable_sort(errors.begin(), errors.end(),
                   [](const ConfigIssue& a, const ConfigIssue& b) { return a.line < b.line; });
  if (!errors.empty()) return report;

  try {
    report.warnings = validate(config.reservoir);
    build_network(config.channels, config.reservoir);
  } catch (const std::exception& e) {
    errors.push_back({path, 0, e.what()});
    return report;
  }
  report.config = std::move(config);
  return report;
}

ConfigReport validate_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ConfigReport report;
    report.errors.push_back({path.string(), 0, "cannot read config file"});
    return report;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

}  // namespace spinlink::cli
