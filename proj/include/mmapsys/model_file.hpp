#pragma once

// Model file format, one directive per line, '#' starts a comment:
//
//   scalar NAME VALUE          n, R, n1, d1, omega0, B, C, H, F, G, fcr, fmi, fnu
//   flag NAME VALUE            pm on|off, vacation exp|erlang2
//   vector NAME LEN            followed by one line of LEN numbers
//   matrix NAME ROWS COLS      followed by ROWS lines of COLS numbers, row-major
//
// Vectors: alpha Tr0 Tnr0 gamma eta omega D0 Wr0 Wnr0 beta1 beta2 vacation_params c0 cd cr1 cr2
// Matrices: T L M W damage S1 S2

#include <fstream>
#include <functional>
#include <istream>
#include <locale>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mmapsys/config.hpp"

namespace mmapsys {

namespace detail {

struct ParsedModel {
  std::string file;
  std::map<std::string, std::pair<double, int>> scalars;
  std::map<std::string, std::pair<std::string, int>> flags;
  std::map<std::string, std::pair<Matrix, int>> matrices;  // vectors stored as 1 x n

  [[noreturn]] void fail(int line, const std::string& what) const { throw ParseError(file, line, what); }

  int line_of(const std::string& name) const {
    if (auto it = matrices.find(name); it != matrices.end()) return it->second.second;
    if (auto it = scalars.find(name); it != scalars.end()) return it->second.second;
    if (auto it = flags.find(name); it != flags.end()) return it->second.second;
    return 0;
  }

  double scalar(const std::string& name) const {
    auto it = scalars.find(name);
    if (it == scalars.end()) fail(0, "missing scalar '" + name + "'");
    return it->second.first;
  }
  int integer(const std::string& name) const {
    const double v = scalar(name);
    if (v != static_cast<int>(v)) fail(line_of(name), "'" + name + "' must be an integer");
    return static_cast<int>(v);
  }
  const std::string& flag(const std::string& name) const {
    auto it = flags.find(name);
    if (it == flags.end()) fail(0, "missing flag '" + name + "'");
    return it->second.first;
  }
  Matrix matrix(const std::string& name) const {
    auto it = matrices.find(name);
    if (it == matrices.end()) fail(0, "missing matrix '" + name + "'");
    return it->second.first;
  }
  Vector vector(const std::string& name) const {
    const Matrix m = matrix(name);
    if (m.rows() != 1) fail(line_of(name), "'" + name + "' must be a vector");
    return m.row(0).transpose();
  }
  RowVector row(const std::string& name) const { return vector(name).transpose(); }
};

inline std::vector<std::string> tokens(const std::string& line) {
  std::istringstream is(line);
  is.imbue(std::locale::classic());
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) {
    if (tok[0] == '#') break;
    out.push_back(tok);
  }
  return out;
}

inline double number(const ParsedModel& pm, int line, const std::string& tok) {
  std::istringstream is(tok);
  is.imbue(std::locale::classic());
  double v = 0;
  if (!(is >> v) || !is.eof()) pm.fail(line, "not a number: '" + tok + "'");
  return v;
}

inline ParsedModel parse_directives(std::istream& in, const std::string& file) {
  ParsedModel pm;
  pm.file = file;
  std::string raw;
  int lineno = 0;
  auto next_values = [&](size_t expected, const std::string& name) {
    while (std::getline(in, raw)) {
      ++lineno;
      auto t = tokens(raw);
      if (t.empty()) continue;
      if (t.size() != expected) {
        pm.fail(lineno, "'" + name + "': expected " + std::to_string(expected) + " values, got " +
                            std::to_string(t.size()));
      }
      std::vector<double> v;
      for (const auto& s : t) v.push_back(number(pm, lineno, s));
      return v;
    }
    pm.fail(lineno, "'" + name + "': unexpected end of file");
  };
  while (std::getline(in, raw)) {
    ++lineno;
    auto t = tokens(raw);
    if (t.empty()) continue;
    const std::string& kind = t[0];
    auto need = [&](size_t n) {
      if (t.size() != n) pm.fail(lineno, "'" + kind + "' takes " + std::to_string(n - 1) + " arguments");
    };
    auto dims = [&](const std::string& tok) {
      const double v = number(pm, lineno, tok);
      if (v < 1 || v != static_cast<int>(v)) pm.fail(lineno, "bad dimension '" + tok + "'");
      return static_cast<Index>(v);
    };
    if (kind == "scalar") {
      need(3);
      pm.scalars[t[1]] = {number(pm, lineno, t[2]), lineno};
    } else if (kind == "flag") {
      need(3);
      pm.flags[t[1]] = {t[2], lineno};
    } else if (kind == "vector") {
      need(3);
      const int decl = lineno;
      const Index n = dims(t[2]);
      const auto v = next_values(static_cast<size_t>(n), t[1]);
      Matrix m(1, n);
      for (Index j = 0; j < n; ++j) m(0, j) = v[static_cast<size_t>(j)];
      pm.matrices[t[1]] = {m, decl};
    } else if (kind == "matrix") {
      need(4);
      const int decl = lineno;
      const Index r = dims(t[2]), c = dims(t[3]);
      Matrix m(r, c);
      for (Index i = 0; i < r; ++i) {
        const auto v = next_values(static_cast<size_t>(c), t[1]);
        for (Index j = 0; j < c; ++j) m(i, j) = v[static_cast<size_t>(j)];
      }
      pm.matrices[t[1]] = {m, decl};
    } else {
      pm.fail(lineno, "unknown directive '" + kind + "'");
    }
  }
  return pm;
}

}  // namespace detail

/// Parses and validates a model; every failure is reported with the file and line it concerns.
inline ModelConfig parse_model(std::istream& in, const std::string& file = "<model>") {
  const detail::ParsedModel p = detail::parse_directives(in, file);
  // Runs `f`, attributing any library error to the line where `name` was declared.
  auto at = [&](const std::string& name, auto&& f) {
    try {
      return f();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(file, p.line_of(name), e.what());
    }
  };
  ModelConfig c;
  OnlineUnitSpec& u = c.unit;
  u.internal = at("T", [&] { return PhDistribution(p.row("alpha"), p.matrix("T"), "internal"); });
  u.Tr0 = p.vector("Tr0");
  u.Tnr0 = p.vector("Tnr0");
  u.shock = at("L", [&] { return PhDistribution(p.row("gamma"), p.matrix("L"), "shock"); });
  u.omega0 = p.scalar("omega0");
  u.W = p.matrix("W");
  u.Wr0 = p.vector("Wr0");
  u.Wnr0 = p.vector("Wnr0");
  u.damage_init = p.row("omega");
  u.damage_matrix = p.matrix("damage");
  u.damage_exit = p.vector("D0");
  u.inspection = at("M", [&] { return PhDistribution(p.row("eta"), p.matrix("M"), "inspection"); });
  u.n1 = p.integer("n1");
  u.d1 = p.integer("d1");
  c.repair1 = at("S1", [&] { return PhDistribution(p.row("beta1"), p.matrix("S1"), "corrective"); });
  c.repair2 = at("S2", [&] { return PhDistribution(p.row("beta2"), p.matrix("S2"), "preventive"); });
  c.family = at("vacation", [&] { return parse_family(p.flag("vacation")); });
  at("vacation_params", [&] {
    c.set_vacation(p.vector("vacation_params"));
    return 0;
  });
  c.n = p.integer("n");
  c.R = p.integer("R");
  const std::string pm = p.flag("pm");
  if (pm != "on" && pm != "off") p.fail(p.line_of("pm"), "pm must be 'on' or 'off'");
  c.pm = pm == "on";
  auto& k = c.costs;
  k.B = p.scalar("B");
  k.C = p.scalar("C");
  k.H = p.scalar("H");
  k.F = p.scalar("F");
  k.G = p.scalar("G");
  k.fcr = p.scalar("fcr");
  k.fmi = p.scalar("fmi");
  k.fnu = p.scalar("fnu");
  k.c0 = p.vector("c0");
  k.cd = p.vector("cd");
  k.cr1 = p.vector("cr1");
  k.cr2 = p.vector("cr2");
  try {
    c.validate();
  } catch (const Error& e) {
    // Point at the first declared item the message names.
    const std::string msg = e.what();
    int line = 0;
    for (const char* name : {"Tr0", "Tnr0", "Wr0", "Wnr0", "W", "omega0", "damage_init", "damage_matrix", "D0",
                             "n1", "d1", "R", "n", "c0", "cd", "cr1", "cr2"}) {
      if (msg.find(name) == std::string::npos) continue;
      std::string key = name;
      if (key == "damage_init") key = "omega";
      if (key == "damage_matrix") key = "damage";
      if ((line = p.line_of(key)) != 0) break;
    }
    if (line == 0) line = p.line_of("T");
    throw ParseError(file, line, msg);
  }
  return c;
}

inline ModelConfig load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open model file");
  return parse_model(in, path);
}

}  // namespace mmapsys
