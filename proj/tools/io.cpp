#include "io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "steklov/error.hpp"

namespace steklov::io {

namespace {

std::ofstream open_output(const std::string& path, std::ios::openmode mode = std::ios::out | std::ios::trunc) {
  std::ofstream out(path, mode);
  if (!out) throw Error(ErrorCode::DomainError, "cannot open output file " + path);
  return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty()) parts.push_back(cur);
  }
  return parts;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw Error(ErrorCode::DomainError, "not a number: '" + s + "'");
  return v;
}

}  // namespace

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, value >>= 4) s[static_cast<std::size_t>(i)] = digits[value & 0xf];
  return s;
}

json RunManifest::reproducible() const {
  return json{{"schema", kManifestSchema},
              {"command", command},
              {"inputs", inputs},
              {"tolerances", tolerances},
              {"tool_version", tool_version},
              {"determinism", "seedless; outputs depend only on this manifest"}};
}

json RunManifest::full() const {
  json j = reproducible();
  j["hash"] = hash_hex();
  j["runtime"] = runtime;
  return j;
}

std::uint64_t RunManifest::hash() const { return fnv1a(reproducible().dump()); }

std::string RunManifest::hash_hex() const { return hex64(hash()); }

json document(const char* schema, const RunManifest& manifest, json payload) {
  json doc = json::object();
  doc["schema"] = schema;
  doc["manifest_hash"] = manifest.hash_hex();
  doc["manifest"] = manifest.reproducible();
  for (auto& [key, value] : payload.items()) doc[key] = value;
  return doc;
}

void write_json(const std::string& path, const json& doc) {
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
}

void append_jsonl(const std::string& path, const json& line) {
  auto out = open_output(path, std::ios::out | std::ios::app);
  out << line.dump() << '\n';
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

void write_csv(std::ostream& out, const CsvTable& table, const RunManifest& manifest) {
  const std::string h = manifest.hash_hex();
  for (const auto& name : table.header) out << name << ',';
  out << "manifest_hash\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw Error(ErrorCode::DomainError, "csv row width mismatch");
    for (const auto& cell : row) out << cell << ',';
    out << h << '\n';
  }
}

void write_csv(const std::string& path, const CsvTable& table, const RunManifest& manifest) {
  auto out = open_output(path);
  write_csv(out, table, manifest);
}

void write_obj(std::ostream& out, const TriangleMesh& mesh, const RunManifest& manifest) {
  out << "# steklov-lab " << manifest.tool_version << " manifest_hash " << manifest.hash_hex() << '\n';
  const int dims = static_cast<int>(std::min<Eigen::Index>(3, mesh.vertices.cols()));
  for (Eigen::Index i = 0; i < mesh.vertices.rows(); ++i) {
    out << 'v';
    for (int c = 0; c < 3; ++c) out << ' ' << format_double(c < dims ? mesh.vertices(i, c) + 0.0 : 0.0);
    out << '\n';
  }
  for (const auto& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

void write_obj(const std::string& path, const TriangleMesh& mesh, const RunManifest& manifest) {
  auto out = open_output(path);
  write_obj(out, mesh, manifest);
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m, const RunManifest& manifest) {
  CsvTable table;
  for (Eigen::Index j = 0; j < m.cols(); ++j) table.header.push_back("c" + std::to_string(j));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<std::string> row;
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(format_double(m(i, j)));
    table.rows.push_back(std::move(row));
  }
  write_csv(path, table, manifest);
}

json to_json(const CircleDomain& domain) {
  json holes = json::array();
  for (const auto& h : domain.holes) holes.push_back({{"cx", h.center.real()}, {"cy", h.center.imag()}, {"r", h.radius}});
  return {{"holes", holes}};
}

json to_json(const BoundaryDensity& density) {
  json comps = json::array();
  for (const auto& c : density.log_coeffs) comps.push_back(std::vector<double>(c.data(), c.data() + c.size()));
  return {{"log_density", comps}};
}

json to_json(const CircleDomain& domain, const BoundaryDensity& density) {
  json j = to_json(domain);
  j["log_density"] = to_json(density)["log_density"];
  return j;
}

Configuration configuration_from_json(const json& j) {
  Configuration c;
  try {
    for (const auto& h : j.at("holes")) {
      c.domain.holes.push_back(Hole{{h.at("cx").get<double>(), h.at("cy").get<double>()}, h.at("r").get<double>()});
    }
    validate(c.domain);
    if (!j.contains("log_density")) {
      c.density = BoundaryDensity::uniform(c.domain.components());
      return c;
    }
    for (const auto& comp : j.at("log_density")) {
      const auto v = comp.get<std::vector<double>>();
      if (v.empty() || v.size() % 2 == 0) throw Error(ErrorCode::DomainError, "log_density rows need 2d + 1 entries");
      c.density.log_coeffs.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::DomainError, std::string("malformed configuration: ") + e.what());
  }
  if (c.density.components() != c.domain.components()) {
    throw Error(ErrorCode::DomainError, "log_density needs one row per boundary component");
  }
  return c;
}

Configuration read_configuration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::DomainError, "cannot read " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::DomainError, "invalid JSON in " + path + ": " + e.what());
  }
  // maximize output nests the configuration
  return configuration_from_json(j.contains("configuration") ? j.at("configuration") : j);
}

json to_json(const SteklovSpectrum& spectrum) {
  const auto& ev = spectrum.eigenvalues;
  return {{"eigenvalues", std::vector<double>(ev.data(), ev.data() + ev.size())},
          {"clusters", spectrum.clusters},
          {"degree", spectrum.degree},
          {"quadrature_points", spectrum.quadrature_points},
          {"dropped", spectrum.dropped},
          {"boundary_length", spectrum.boundary_length},
          {"sigma1L", spectrum.size() > 1 ? spectrum.sigma1L() : 0.0}};
}

json to_json(const closedform::ClosedFormSpectrum& spectrum) {
  json entries = json::array();
  for (const auto& e : spectrum.entries) {
    entries.push_back({{"eigenvalue", e.eigenvalue},
                       {"mode", e.mode},
                       {"branch", closedform::to_string(e.branch)},
                       {"multiplicity", e.multiplicity}});
  }
  return {{"entries", entries}, {"expanded", spectrum.expanded()}};
}

json to_json(const FormReport& report) {
  json residuals = json::object();
  for (const auto& [name, value] : report.identity_residuals) residuals[name] = value;
  return {{"area", report.area},
          {"boundary_length", report.boundary_length},
          {"energy", report.energy},
          {"identity_residuals", residuals}};
}

CircleDomain parse_holes(const std::string& text) {
  CircleDomain d;
  for (const auto& spec : split(text, ';')) {
    const auto f = split(spec, ',');
    if (f.size() != 3) throw Error(ErrorCode::DomainError, "hole must be cx,cy,r: '" + spec + "'");
    d.holes.push_back(Hole{{parse_double(f[0]), parse_double(f[1])}, parse_double(f[2])});
  }
  return d;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& s : split(text, ',')) {
    int v = 0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) throw Error(ErrorCode::DomainError, "not an integer: '" + s + "'");
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorCode::DomainError, "empty integer list");
  return out;
}

}  // namespace steklov::io
