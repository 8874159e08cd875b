#include "csh/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "csh/config.hpp"

namespace csh {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

template <class T>
void put(std::ostream& o, T v) {
  o.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in, const fs::path& p) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw IoError(p.string() + ": truncated snapshot");
  return v;
}

SnapshotHeader read_header(std::istream& in, const fs::path& path) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "CSHW", 4) != 0) throw IoError(path.string() + ": not a snapshot file");
  SnapshotHeader h;
  h.version = get<std::uint32_t>(in, path);
  if (h.version != kSnapshotVersion) throw IoError(path.string() + ": unsupported snapshot version");
  h.n = static_cast<int>(get<std::uint32_t>(in, path));
  h.L = get<double>(in, path);
  h.t = get<double>(in, path);
  h.p = get<double>(in, path);
  return h;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void write_snapshot(const fs::path& path, const FieldState& s) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw IoError(path.string() + ": cannot open for writing");
  const Grid2D& g = s.grid();
  o.write("CSHW", 4);
  put<std::uint32_t>(o, kSnapshotVersion);
  put<std::uint32_t>(o, static_cast<std::uint32_t>(g.n()));
  put<double>(o, g.L());
  put<double>(o, s.t);
  put<double>(o, s.p);
  std::vector<double> plane(g.size());
  for (const ComplexField* f : {&s.phi, &s.psi}) {
    for (int part = 0; part < 2; ++part) {
      for (std::size_t k = 0; k < plane.size(); ++k) plane[k] = part == 0 ? (*f)[k].real() : (*f)[k].imag();
      o.write(reinterpret_cast<const char*>(plane.data()), static_cast<std::streamsize>(plane.size() * sizeof(double)));
    }
  }
  if (!o) throw IoError(path.string() + ": write failed");
}

SnapshotHeader read_snapshot_header(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open");
  return read_header(in, path);
}

FieldState read_snapshot(const fs::path& path, GridPtr g) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open");
  const SnapshotHeader h = read_header(in, path);
  if (!g || g->n() != h.n || g->L() != h.L) g = make_grid(h.n, h.L);
  FieldState s = make_state(g, h.p, h.t);
  std::vector<double> re(g->size()), im(g->size());
  for (ComplexField* f : {&s.phi, &s.psi}) {
    in.read(reinterpret_cast<char*>(re.data()), static_cast<std::streamsize>(re.size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(im.data()), static_cast<std::streamsize>(im.size() * sizeof(double)));
    if (!in) throw IoError(path.string() + ": truncated snapshot");
    for (std::size_t k = 0; k < re.size(); ++k) (*f)[k] = cplx(re[k], im[k]);
  }
  return s;
}

std::string snapshot_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%06d.bin", step);
  return buf;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool CsvTable::has(const std::string& name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

std::vector<double> CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw IoError("csv: no column '" + name + "'");
  const std::size_t c = static_cast<std::size_t>(it - header.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(c < r.size() ? r[c] : std::numeric_limits<double>::quiet_NaN());
  return out;
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open");
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty csv");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split(line)) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      row.push_back(end != cell.c_str() && *end == '\0' ? v : std::numeric_limits<double>::quiet_NaN());
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw IoError(path.string() + ": cannot open for writing");
  o << content;
  if (!o) throw IoError(path.string() + ": write failed");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

nlohmann::json read_json(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

RunArchive::RunArchive(fs::path dir) : dir_(std::move(dir)) {
  const fs::path mp = dir_ / "manifest.json";
  if (!fs::exists(mp)) throw IoError(dir_.string() + ": no manifest.json; not a run directory");
  manifest_ = read_json(mp);
  if (!manifest_.contains("config")) throw IoError(mp.string() + ": manifest has no config");
  config_ = run_config_from_json(manifest_["config"]);
  grid_ = make_grid(config_.n, config_.L);

  const fs::path sd = dir_ / "snapshots";
  if (fs::is_directory(sd)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(sd))
      if (e.path().extension() == ".bin") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const SnapshotHeader h = read_snapshot_header(f);
      const std::string stem = f.stem().string();
      Snapshot s;
      s.step = std::stoi(stem.substr(stem.find('_') + 1));
      s.t = h.t;
      s.path = f;
      snaps_.push_back(s);
    }
  }
  if (fs::exists(dir_ / "diagnostics.csv")) diag_ = read_csv(dir_ / "diagnostics.csv");
  if (fs::exists(dir_ / "null_series.csv")) null_ = read_csv(dir_ / "null_series.csv");
}

std::string RunArchive::status() const { return manifest_.value("status", std::string("unknown")); }

EvolutionOptions RunArchive::evolution() const {
  EvolutionOptions o;
  o.flat = config_.flat;
  o.nonlinear = config_.nonlinear;
  return o;
}

std::vector<RunArchive::Snapshot> RunArchive::snapshots_in(double t_a, double t_b) const {
  const double tol = 1e-9 * std::max(1.0, std::abs(t_b));
  std::vector<Snapshot> out;
  for (const auto& s : snaps_)
    if (s.t >= t_a - tol && s.t <= t_b + tol) out.push_back(s);
  if (out.empty() || std::abs(out.front().t - t_a) > tol || std::abs(out.back().t - t_b) > tol)
    throw DomainError("no stored snapshots at both t = " + format_double(t_a) + " and t = " + format_double(t_b) +
                      " in " + dir_.string());
  return out;
}

FieldState RunArchive::load(const Snapshot& s) const { return read_snapshot(s.path, grid_); }

}  // namespace csh
