#pragma once

// Serialization for the command-line front end: run manifests, versioned
// JSON documents, CSV tables and OBJ meshes. Every emitted file carries the
// FNV-1a hash of the manifest that produced it.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "steklov/closedform.hpp"
#include "steklov/domain.hpp"
#include "steklov/dtn.hpp"
#include "steklov/surfaces.hpp"

namespace steklov::io {

using nlohmann::json;

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kManifestSchema = "steklov-lab/manifest/1";
inline constexpr const char* kSpectrumSchema = "steklov-lab/spectrum/1";
inline constexpr const char* kClosedFormSchema = "steklov-lab/closedform/1";
inline constexpr const char* kMaximizeSchema = "steklov-lab/maximize/1";
inline constexpr const char* kSurfaceReportSchema = "steklov-lab/surface-report/1";
inline constexpr const char* kDbarReportSchema = "steklov-lab/dbar-report/1";
inline constexpr const char* kTraceSchema = "steklov-lab/trace/1";

/// Inputs and tolerances determine the outputs; runtime facts (timing,
/// thread count) are recorded alongside but excluded from the hash.
struct RunManifest {
  std::string command;
  json inputs = json::object();
  json tolerances = json::object();
  std::string tool_version = kToolVersion;
  json runtime = json::object();

  /// Hashed part: schema, command, inputs, tolerances, version.
  json reproducible() const;
  /// reproducible() plus hash and runtime.
  json full() const;
  std::uint64_t hash() const;
  std::string hash_hex() const;
};

std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t value);

/// Adds schema, manifest_hash and manifest fields to a payload.
json document(const char* schema, const RunManifest& manifest, json payload);

/// Pretty-printed with a trailing newline.
void write_json(const std::string& path, const json& doc);
/// One compact line appended to the file.
void append_jsonl(const std::string& path, const json& line);

/// Header row first; a manifest_hash column is appended to every row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
void write_csv(std::ostream& out, const CsvTable& table, const RunManifest& manifest);
void write_csv(const std::string& path, const CsvTable& table, const RunManifest& manifest);

/// Shortest round-trip decimal form.
std::string format_double(double value);

/// Vertices then 1-based faces. Points in R^4 are projected to their first
/// three coordinates.
void write_obj(std::ostream& out, const TriangleMesh& mesh, const RunManifest& manifest);
void write_obj(const std::string& path, const TriangleMesh& mesh, const RunManifest& manifest);

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m, const RunManifest& manifest);

/// {"holes": [{"cx": .., "cy": .., "r": ..}, ...]}
json to_json(const CircleDomain& domain);
/// {"log_density": [[c0, a1, b1, ...], ...]}
json to_json(const BoundaryDensity& density);
/// Both objects merged, the form read back by read_configuration.
json to_json(const CircleDomain& domain, const BoundaryDensity& density);
json to_json(const SteklovSpectrum& spectrum);
json to_json(const closedform::ClosedFormSpectrum& spectrum);
json to_json(const FormReport& report);

struct Configuration {
  CircleDomain domain;
  BoundaryDensity density;
};
/// Reads holes and log_density from a JSON object; a missing log_density
/// means lambda = 1 on every circle. Validates the domain.
Configuration configuration_from_json(const json& j);
Configuration read_configuration(const std::string& path);

/// Parses "cx,cy,r;cx,cy,r;..." into holes.
CircleDomain parse_holes(const std::string& text);
/// Parses "2,3,4" into integers.
std::vector<int> parse_int_list(const std::string& text);

}  // namespace steklov::io
