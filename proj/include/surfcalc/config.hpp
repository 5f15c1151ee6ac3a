#pragma once

// Surface specification files.
//
//   # comment
//   [surface]
//   type = garabedian          # torus | revolution | garabedian
//   s = 0.8                    # garabedian only
//   major_radius = 3           # torus only
//   minor_radius = 1           # torus only
//
//   [axis]                     # garabedian: r0(v), z0(v) as "k cos sin" rows
//   r0 0 4.8 0
//   r0 1 0.1 0
//   z0 1 0   0.1
//
//   [profile]                  # revolution: r(u), z(u) as "k cos sin" rows
//   r 0 3 0
//   r 1 1 0
//   z 1 0 1
//
//   [deltas]                   # garabedian: "m n value" rows
//   1 0 4.5
//
//   [stretch]                  # garabedian, optional
//   a0 = 1
//   a1 = 0.01

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "surfcalc/geometry.hpp"

namespace surfcalc {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& what)
      : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : "") +
                           ": " + what),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

template <class T>
bool parse_number(std::string_view word, T& out) {
  if (!word.empty() && word.front() == '+') word.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), out);
  return ec == std::errc() && ptr == word.data() + word.size();
}

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

/// Parses a surface specification. `source` names the input in error messages.
inline SurfaceSpec parse_surface_config(std::istream& in,
                                        const std::string& source = "<config>") {
  std::string section;
  std::map<std::string, std::pair<std::string, int>> surface_keys, stretch_keys;
  TrigSeries axis_r, axis_z, profile_r, profile_z;
  std::vector<DeltaCoefficient> deltas;
  std::map<std::string, int> section_line;

  auto fail = [&](int line, const std::string& what) {
    throw ConfigError(source, line, what);
  };
  auto number = [&](std::string_view word, int line, auto& out) {
    if (!detail::parse_number(word, out)) {
      fail(line, "expected a number, got '" + std::string(word) + "'");
    }
  };

  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = detail::trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      section = std::string(detail::trim(line.substr(1, line.size() - 2)));
      if (section != "surface" && section != "axis" && section != "profile" &&
          section != "deltas" && section != "stretch") {
        fail(line_no, "unknown section [" + section + "]");
      }
      if (section_line.count(section)) fail(line_no, "duplicate section [" + section + "]");
      section_line[section] = line_no;
      continue;
    }
    if (section.empty()) fail(line_no, "entry outside of any section");

    if (section == "surface" || section == "stretch") {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
      const std::string key(detail::trim(line.substr(0, eq)));
      const std::string value(detail::trim(line.substr(eq + 1)));
      if (key.empty() || value.empty()) fail(line_no, "expected 'key = value'");
      auto& keys = section == "surface" ? surface_keys : stretch_keys;
      if (keys.count(key)) fail(line_no, "duplicate key '" + key + "'");
      keys[key] = {value, line_no};
      continue;
    }

    const auto words = detail::split_words(line);
    if (section == "deltas") {
      if (words.size() != 3) fail(line_no, "expected 'm n value'");
      DeltaCoefficient d;
      number(words[0], line_no, d.m);
      number(words[1], line_no, d.n);
      number(words[2], line_no, d.value);
      for (const auto& e : deltas) {
        if (e.m == d.m && e.n == d.n) fail(line_no, "duplicate Delta coefficient");
      }
      deltas.push_back(d);
      continue;
    }
    // [axis] and [profile]: "name k cos sin"
    if (words.size() != 4) fail(line_no, "expected 'name harmonic cos sin'");
    TrigTerm term;
    number(words[1], line_no, term.harmonic);
    number(words[2], line_no, term.cos_coeff);
    number(words[3], line_no, term.sin_coeff);
    if (term.harmonic < 0) fail(line_no, "harmonic must be >= 0");
    TrigSeries* target = nullptr;
    if (section == "axis") {
      if (words[0] == "r0") target = &axis_r;
      if (words[0] == "z0") target = &axis_z;
    } else {
      if (words[0] == "r") target = &profile_r;
      if (words[0] == "z") target = &profile_z;
    }
    if (!target) fail(line_no, "unknown series '" + std::string(words[0]) + "'");
    target->terms.push_back(term);
  }

  auto take = [&](std::map<std::string, std::pair<std::string, int>>& keys,
                  const std::string& key, double& out, bool required) {
    const auto it = keys.find(key);
    if (it == keys.end()) {
      if (required) fail(0, "missing key '" + key + "'");
      return;
    }
    number(std::string_view(it->second.first), it->second.second, out);
    keys.erase(it);
  };
  auto reject_leftovers = [&](const std::map<std::string, std::pair<std::string, int>>& keys) {
    if (!keys.empty()) {
      fail(keys.begin()->second.second, "unknown key '" + keys.begin()->first + "'");
    }
  };
  auto forbid = [&](const char* name, const std::string& type) {
    if (const auto it = section_line.find(name); it != section_line.end()) {
      fail(it->second, std::string("section [") + name + "] does not apply to type " + type);
    }
  };

  const auto type_it = surface_keys.find("type");
  if (type_it == surface_keys.end()) fail(0, "missing [surface] key 'type'");
  const std::string type = type_it->second.first;
  const int type_line = type_it->second.second;
  surface_keys.erase(type_it);

  SurfaceSpec spec;
  if (type == "torus") {
    forbid("axis", type);
    forbid("profile", type);
    forbid("deltas", type);
    forbid("stretch", type);
    TorusOfRevolution t;
    take(surface_keys, "major_radius", t.major_radius, false);
    take(surface_keys, "minor_radius", t.minor_radius, false);
    reject_leftovers(surface_keys);
    spec = t;
  } else if (type == "revolution") {
    forbid("axis", type);
    forbid("deltas", type);
    forbid("stretch", type);
    reject_leftovers(surface_keys);
    spec = SurfaceOfRevolution{profile_r, profile_z};
  } else if (type == "garabedian") {
    forbid("profile", type);
    GarabedianStellarator st;
    st.axis_r = axis_r;
    st.axis_z = axis_z;
    st.deltas = deltas;
    take(surface_keys, "s", st.s, true);
    take(stretch_keys, "a0", st.stretch.a0, false);
    take(stretch_keys, "a1", st.stretch.a1, false);
    reject_leftovers(surface_keys);
    reject_leftovers(stretch_keys);
    if (st.axis_r.terms.empty()) fail(0, "garabedian surface needs [axis] r0 terms");
    spec = st;
  } else {
    fail(type_line, "unknown surface type '" + type + "'");
  }

  try {
    validate(spec);
  } catch (const std::invalid_argument& e) {
    fail(0, e.what());
  }
  return spec;
}

inline SurfaceSpec parse_surface_config(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  return parse_surface_config(in, source);
}

inline SurfaceSpec load_surface_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open file");
  return parse_surface_config(in, path);
}

/// Writes `spec` in the format read by parse_surface_config, with every
/// number at 17 significant digits.
inline void write_surface_config(std::ostream& out, const SurfaceSpec& spec) {
  using detail::format_double;
  auto series = [&](const char* name, const TrigSeries& s) {
    for (const auto& t : s.terms) {
      out << name << ' ' << t.harmonic << ' ' << format_double(t.cos_coeff) << ' '
          << format_double(t.sin_coeff) << '\n';
    }
  };
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        out << "[surface]\n";
        if constexpr (std::is_same_v<T, TorusOfRevolution>) {
          out << "type = torus\n"
              << "major_radius = " << format_double(s.major_radius) << '\n'
              << "minor_radius = " << format_double(s.minor_radius) << '\n';
        } else if constexpr (std::is_same_v<T, SurfaceOfRevolution>) {
          out << "type = revolution\n\n[profile]\n";
          series("r", s.r);
          series("z", s.z);
        } else {
          out << "type = garabedian\n"
              << "s = " << format_double(s.s) << "\n\n[axis]\n";
          series("r0", s.axis_r);
          series("z0", s.axis_z);
          out << "\n[deltas]\n";
          for (const auto& d : s.deltas) {
            out << d.m << ' ' << d.n << ' ' << format_double(d.value) << '\n';
          }
          out << "\n[stretch]\n"
              << "a0 = " << format_double(s.stretch.a0) << '\n'
              << "a1 = " << format_double(s.stretch.a1) << '\n';
        }
      },
      spec);
}

}  // namespace surfcalc
