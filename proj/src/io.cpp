#include "rgsde/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "rgsde/error.hpp"

namespace rgsde {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_field(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    fail(ErrorKind::Io, "scenario csv line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ScenarioPath canonicalize(ScenarioPath path) {
  for (std::size_t i = 0; i < path.dB.size(); ++i) path.dB[i] = path.B[i + 1] - path.B[i];
  return path;
}

std::string scenario_csv(const ScenarioPath& path) {
  std::string out = "t,B,QV,theta_sq\n";
  const std::size_t n = path.n_steps();
  for (std::size_t i = 0; i <= n; ++i) {
    out += format_real(path.grid.nodes[i]);
    out += ',';
    out += format_real(path.B[i]);
    out += ',';
    out += format_real(path.QV[i]);
    out += ',';
    if (i < n) out += format_real(path.theta_sq[i]);
    out += '\n';
  }
  return out;
}

ScenarioPath parse_scenario_csv(const std::string& text, const TimeGrid& grid) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line) || line != "t,B,QV,theta_sq")
    fail(ErrorKind::Io, "scenario csv: missing header 't,B,QV,theta_sq'");
  ScenarioPath p;
  p.grid = grid;
  const std::size_t n = grid.n_steps;
  std::size_t row = 0;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 4 || row > n)
      fail(ErrorKind::Io, "scenario csv line " + std::to_string(row + 2) + ": malformed row");
    p.B.push_back(parse_field(f[1], row + 2));
    p.QV.push_back(parse_field(f[2], row + 2));
    if (row < n) p.theta_sq.push_back(parse_field(f[3], row + 2));
    else if (!f[3].empty())
      fail(ErrorKind::Io, "scenario csv: theta_sq must be blank on the last node");
    ++row;
  }
  if (row != n + 1) fail(ErrorKind::Io, "scenario csv: row count does not match the grid");
  p.dB.resize(n);
  p.dQV.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    p.dB[i] = p.B[i + 1] - p.B[i];
    p.dQV[i] = p.theta_sq[i] * grid.dt;
  }
  return p;
}

std::string solution_csv(const ScenarioPath& path, const SolveResult& result) {
  std::string out = "t,X,K,S,B,QV\n";
  const auto& X = result.solution.X;
  for (std::size_t i = 0; i < X.size(); ++i) {
    for (double v : {path.grid.nodes[i], X[i], result.solution.K[i], result.S[i], path.B[i],
                     path.QV[i]}) {
      out += format_real(v);
      out += ',';
    }
    out.back() = '\n';
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
    out << content;
    if (!out) fail(ErrorKind::Io, "write failed for '" + path + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::Io, "cannot write '" + path + "': " + ec.message());
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace rgsde
