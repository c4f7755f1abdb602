// steklov-lab: Steklov spectra, sigma_1 L maximization, and free boundary
// minimal surface checks from the command line.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure, 64 unknown
// command or flag. STEKLOV_LAB_THREADS caps sweep concurrency.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "io.hpp"
#include "steklov/closedform.hpp"
#include "steklov/dbar.hpp"
#include "steklov/dtn.hpp"
#include "steklov/error.hpp"
#include "steklov/maximizer.hpp"
#include "steklov/surfaces.hpp"

namespace {

using namespace steklov;
using io::json;

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitUsage = 64;

int thread_limit() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("STEKLOV_LAB_THREADS");
  if (env == nullptr || *env == '\0') return static_cast<int>(hw);
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw Error(ErrorCode::DomainError, "STEKLOV_LAB_THREADS must be a positive integer");
  return static_cast<int>(v);
}

// Writes the document to `out` when given, otherwise to stdout; appends the
// full manifest to `manifest_log` when given.
void emit(const json& doc, const std::string& out, const io::RunManifest& manifest, const std::string& manifest_log) {
  if (out.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    io::write_json(out, doc);
  }
  if (!manifest_log.empty()) io::append_jsonl(manifest_log, manifest.full());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct SurfaceArgs {
  std::string which = "critical-catenoid";
  std::optional<double> T;
  int nt = 64;
  int ntheta = 128;
  bool finite_differences = false;

  void add_to(CLI::App* cmd, const char* nt_help, const char* ntheta_help) {
    cmd->add_option("--which", which, "critical-catenoid | critical-moebius | catenoid | moebius | disk")
        ->check(CLI::IsMember({"critical-catenoid", "critical-moebius", "catenoid", "moebius", "disk"}))
        ->capture_default_str();
    cmd->add_option("--T", T, "half-length for catenoid / moebius");
    cmd->add_option("--nt", nt, nt_help)->capture_default_str();
    cmd->add_option("--ntheta", ntheta, ntheta_help)->capture_default_str();
  }

  json to_json() const {
    json j{{"which", which}, {"nt", nt}, {"ntheta", ntheta}, {"finite_differences", finite_differences}};
    j["T"] = T ? json(*T) : json(nullptr);
    return j;
  }

  ParametricSurface build() const {
    ParametricSurface s;
    if (which == "critical-catenoid") {
      s = critical_catenoid();
    } else if (which == "critical-moebius") {
      s = critical_moebius();
    } else if (which == "disk") {
      s = flat_disk();
    } else {
      if (!T || !(*T > 0.0)) throw Error(ErrorCode::DomainError, "--which " + which + " needs --T > 0");
      s = which == "catenoid" ? catenoid(*T) : moebius_band(*T);
    }
    if (nt < 4 || ntheta < 8) throw Error(ErrorCode::DomainError, "grid too coarse");
    s.grid = SurfaceGrid{nt, ntheta};
    return finite_differences ? with_finite_differences(s) : s;
  }
};

// ---- spectrum ---------------------------------------------------------------

struct SpectrumArgs {
  bool disk = false;
  std::optional<double> annulus;
  std::string holes;
  std::string config;
  std::string density = "uniform";
  double eps = 0.0;
  int modes = 16;
  int eigs = 8;
  double cluster_tol = kClusterTol;
  double pivot_tol = kPivotTol;
  std::string out, csv, matrices;
};

json run_spectrum(const SpectrumArgs& a, io::RunManifest& m) {
  const int sources = (a.disk ? 1 : 0) + (a.annulus ? 1 : 0) + (a.holes.empty() ? 0 : 1) + (a.config.empty() ? 0 : 1);
  if (sources > 1) throw Error(ErrorCode::DomainError, "choose one of --disk, --annulus, --holes, --config");
  CircleDomain domain = CircleDomain::disk();
  if (a.annulus) domain = CircleDomain::concentric_annulus(*a.annulus);
  if (!a.holes.empty()) domain = io::parse_holes(a.holes);
  std::optional<BoundaryDensity> given;
  if (!a.config.empty()) {
    io::Configuration c = io::read_configuration(a.config);
    domain = c.domain;
    given = c.density;
  }
  validate(domain);

  m.command = "spectrum";
  const BoundaryDensity density = given                      ? *given
                                  : a.density == "matched" ? matched_cylinder_density(domain)
                                                           : BoundaryDensity::uniform(domain.components());
  m.inputs = {{"configuration", io::to_json(domain, density)}, {"eps", a.eps}, {"modes", a.modes}, {"eigs", a.eigs}};
  m.tolerances = {{"cluster_tol", a.cluster_tol}, {"pivot_tol", a.pivot_tol}};

  SteklovSolver solver(domain, a.modes, SpectrumOptions{a.cluster_tol, a.pivot_tol});
  BoundaryMeasureSamples measure = sample(domain, density, solver.basis().quadrature_points());
  if (a.eps > 0.0) measure = heat_smooth(domain, measure, a.eps);
  const SteklovSpectrum spec = solver.solve(measure, a.eigs);

  json mult = json::array();
  for (std::size_t c = 1; c < spec.clusters.size(); ++c) {
    const int i = spec.clusters[c].front();
    const MultiplicityReport r = multiplicity_check(spec, i, 0, true);
    mult.push_back({{"index", i}, {"cluster_size", r.cluster_size}, {"bound", r.bound}, {"ok", r.ok}});
  }
  json payload = io::to_json(spec);
  payload["multiplicity"] = mult;

  if (!a.csv.empty()) {
    io::CsvTable t{{"index", "eigenvalue", "cluster"}, {}};
    for (int i = 0; i < spec.size(); ++i) {
      t.rows.push_back({std::to_string(i), io::format_double(spec.eigenvalues(i)),
                        std::to_string(spec.cluster_index(i))});
    }
    io::write_csv(a.csv, t, m);
  }
  if (!a.matrices.empty()) {
    const EigenSystemMatrices sys = solver.matrices(measure);
    io::write_matrix_csv(a.matrices + "_A.csv", sys.A, m);
    io::write_matrix_csv(a.matrices + "_B.csv", sys.B, m);
  }
  return io::document(io::kSpectrumSchema, m, payload);
}

// ---- closedform -------------------------------------------------------------

struct ClosedFormArgs {
  std::string topology = "annulus";
  std::optional<double> T;
  double fT = 1.0;
  int nmax = 8;
  std::string out;
};

json run_closedform(const ClosedFormArgs& a, io::RunManifest& m) {
  using namespace closedform;
  const Topology topo = a.topology == "moebius" ? Topology::Moebius : Topology::Annulus;
  const double T = a.T ? *a.T : critical_parameter(topo);
  m.command = "closedform";
  m.inputs = {{"topology", a.topology}, {"T", T}, {"fT", a.fT}, {"nmax", a.nmax}};
  const ClosedFormSpectrum spec = spectrum(RotSymSurface{topo, T, a.fT}, a.nmax);
  json payload = io::to_json(spec);
  payload["topology"] = to_string(topo);
  payload["T"] = T;
  payload["fT"] = a.fT;
  payload["sigma1L"] = rotsym_sigma1L(topo, T);
  payload["critical_parameter"] = critical_parameter(topo);
  payload["critical_sigma1L"] = critical_sigma1L(topo);
  return io::document(io::kClosedFormSchema, m, payload);
}

// ---- maximize / sweep ---------------------------------------------------------

struct MaximizeArgs {
  int k = 2;
  std::string symmetry = "cyclic";
  int budget = ConfigurationOptions{}.budget;
  int degree = ConfigurationOptions{}.polish.degree;
  int density_degree = ConfigurationOptions{}.polish.density_degree;
  double resolution_tol = AscentOptions{}.resolution_tol;
  int certificate_grid = 64;
  std::string out, trace;
};

ConfigurationOptions configuration_options(const std::string& symmetry, int budget, int degree, int density_degree,
                                           double resolution_tol) {
  ConfigurationOptions opt;
  opt.symmetry = symmetry == "none" ? Symmetry::None : Symmetry::Cyclic;
  opt.budget = budget;
  opt.polish.degree = degree;
  opt.polish.density_degree = density_degree;
  opt.polish.resolution_tol = resolution_tol;
  opt.probe.resolution_tol = resolution_tol;
  return opt;
}

json schedule_json(const ConfigurationOptions& opt) {
  return {{"probe", {{"degree", opt.probe.degree}, {"eps", opt.probe.eps_schedule}, {"max_iters", opt.probe.max_iters}}},
          {"polish", {{"degree", opt.polish.degree}, {"eps", opt.polish.eps_schedule}, {"max_iters", opt.polish.max_iters}}}};
}

json run_maximize(const MaximizeArgs& a, io::RunManifest& m) {
  if (a.k < 1) throw Error(ErrorCode::DomainError, "--k must be at least 1");
  if (a.budget < 1) throw Error(ErrorCode::DomainError, "--budget must be positive");
  const ConfigurationOptions opt =
      configuration_options(a.symmetry, a.budget, a.degree, a.density_degree, a.resolution_tol);
  m.command = "maximize";
  m.inputs = {{"k", a.k}, {"symmetry", a.symmetry}, {"budget", a.budget}, {"schedule", schedule_json(opt)},
              {"certificate_grid", a.certificate_grid}};
  m.tolerances = {{"resolution_tol", a.resolution_tol}, {"rel_improvement", opt.polish.rel_improvement},
                  {"simplex_tol", opt.simplex_tol}};
  const std::string hash = m.hash_hex();

  int probe = 0;
  auto on_probe = [&](const TracePoint& p) {
    if (a.trace.empty()) return;
    io::append_jsonl(a.trace, {{"schema", io::kTraceSchema}, {"manifest_hash", hash}, {"stage", "probe"},
                               {"probe", probe++}, {"eps", p.eps}, {"value", p.value}});
  };
  const ConfigurationResult r = optimize_configuration(a.k, opt, on_probe);
  if (!a.trace.empty()) {
    for (const auto& p : r.polished.trace) {
      io::append_jsonl(a.trace, {{"schema", io::kTraceSchema}, {"manifest_hash", hash}, {"stage", "polish"},
                                 {"iteration", p.iteration}, {"eps", p.eps}, {"value", p.value}});
    }
  }

  HarmonicBasis basis(r.domain, opt.polish.degree);
  const Certificate cert = extremality_certificate(
      basis, sample(r.domain, r.density, basis.quadrature_points()), r.polished.eigenspace, a.certificate_grid);
  SteklovSolver finer(r.domain, opt.polish.degree + 8);
  const double recheck = finer.solve(sample(r.domain, r.density, finer.basis().quadrature_points())).sigma1L();

  return io::document(io::kMaximizeSchema, m,
                      {{"k", a.k},
                       {"value", r.value},
                       {"value_degree_plus_8", recheck},
                       {"eps", r.polished.eps},
                       {"configuration", io::to_json(r.domain, r.density)},
                       {"eigensolves", r.eigensolves},
                       {"probes", r.probes},
                       {"budget_exhausted", r.budget_exhausted},
                       {"unresolved", r.polished.unresolved},
                       {"certificate",
                        {{"n", cert.n},
                         {"residual_boundary", cert.residual_boundary},
                         {"residual_conformal", cert.residual_conformal},
                         {"eigenspace_too_small", cert.eigenspace_too_small}}}});
}

struct SweepArgs {
  std::string ks = "2,3,4";
  std::string symmetry = "cyclic";
  int budget = ConfigurationOptions{}.budget;
  int degree = ConfigurationOptions{}.polish.degree;
  std::string out, json_out;
};

io::CsvTable run_sweep(const SweepArgs& a, io::RunManifest& m, int threads) {
  const std::vector<int> ks = io::parse_int_list(a.ks);
  for (int k : ks) {
    if (k < 1) throw Error(ErrorCode::DomainError, "every k must be at least 1");
  }
  if (a.budget < 1) throw Error(ErrorCode::DomainError, "--budget must be positive");
  const ConfigurationOptions opt =
      configuration_options(a.symmetry, a.budget, a.degree, ConfigurationOptions{}.polish.density_degree,
                            AscentOptions{}.resolution_tol);
  m.command = "sweep";
  m.inputs = {{"k", ks}, {"symmetry", a.symmetry}, {"budget", a.budget}, {"schedule", schedule_json(opt)}};
  m.tolerances = {{"resolution_tol", opt.polish.resolution_tol}, {"simplex_tol", opt.simplex_tol}};
  const std::vector<SweepEntry> entries = sweep_k(ks, opt, threads);

  io::CsvTable t{{"k", "value", "budget_exhausted", "eigensolves", "probes"}, {}};
  for (const auto& e : entries) {
    t.rows.push_back({std::to_string(e.k), io::format_double(e.value), e.budget_exhausted ? "true" : "false",
                      std::to_string(e.result.eigensolves), std::to_string(e.result.probes)});
  }
  if (!a.json_out.empty()) {
    json rows = json::array();
    for (const auto& e : entries) {
      rows.push_back({{"k", e.k}, {"value", e.value}, {"budget_exhausted", e.budget_exhausted},
                      {"configuration", io::to_json(e.result.domain, e.result.density)}});
    }
    io::write_json(a.json_out, io::document(io::kMaximizeSchema, m, {{"entries", rows}}));
  }
  return t;
}

// ---- surface verify / export-obj ----------------------------------------------

json run_surface_verify(const SurfaceArgs& a, double tol, io::RunManifest& m) {
  m.command = "surface verify";
  m.inputs = a.to_json();
  m.tolerances = {{"pass_tol", tol}};
  const ParametricSurface s = a.build();
  const FormReport report = verify_minimal_free_boundary(s);
  const FormReport al = area_length_report(s);

  double worst = 0.0;
  for (const auto& [name, value] : report.identity_residuals) worst = std::max(worst, value);
  json index = json::array();
  for (int c = 0; c < s.n; ++c) {
    const IndexIdentity id = index_identity(s, Eigen::VectorXd::Unit(s.n, c));
    index.push_back({{"direction", c}, {"S", id.S}, {"mass", id.mass}, {"boundary_formula", id.boundary_formula},
                     {"relative_residual", id.relative_residual}});
  }
  json payload = io::to_json(report);
  payload["topology"] = to_string(s.topology);
  payload["T"] = s.T;
  payload["ambient_dimension"] = s.n;
  // The coordinates are Steklov eigenfunctions with eigenvalue 1, so sigma_1 L is L.
  payload["sigma1L"] = report.boundary_length;
  payload["two_area_minus_length"] = al.identity_residuals.at("two_area_minus_length");
  payload["index_identity"] = index;
  payload["max_residual"] = worst;
  payload["passed"] = worst <= tol;
  return io::document(io::kSurfaceReportSchema, m, payload);
}

// ---- dbar demo --------------------------------------------------------------

struct DbarArgs {
  std::optional<double> T;
  int nt = 128;
  int ntheta = 128;
  std::string out;
};

json run_dbar_demo(const DbarArgs& a, io::RunManifest& m) {
  const ParametricSurface s = a.T ? catenoid(*a.T) : critical_catenoid();
  m.command = "dbar demo";
  m.inputs = {{"T", s.T}, {"nt", a.nt}, {"ntheta", a.ntheta}};
  m.tolerances = {{"kernel_tol", 1e-8}, {"solvability_tol", 1e-8}};
  const DbarGrid grid{a.nt, a.ntheta};
  const ConformalFieldSpace C = conformal_field_space(s);

  json elements = json::array();
  for (int j = 0; j < C.kernel_dimension(); ++j) {
    const Eigen::Vector4d c = C.kernel.col(j);
    const ScalarField psi = C.element(c);
    const ConformalVariation v = build_conformal_variation(s, psi, grid);
    const AreaEnergyReport ae = verify_area_energy(s, psi, v.Y);
    elements.push_back({{"coefficients", std::vector<double>(c.data(), c.data() + 4)},
                        {"residual_angle", v.residual_angle},
                        {"residual_length", v.residual_length},
                        {"boundary_tangency", v.boundary_tangency},
                        {"dbar_residual", v.dbar.dbar_residual},
                        {"boundary_residual", v.dbar.boundary_residual},
                        {"tail_norm", v.dbar.tail_norm},
                        {"boundary_conditioning", v.dbar.boundary_conditioning},
                        {"Q", ae.Q},
                        {"S", ae.S},
                        {"area_energy_residual", ae.residual}});
  }
  json support;
  try {
    build_conformal_variation(s, C.basis[3], grid);
    support = {{"solvable", true}};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Unsolvable) throw;
    support = {{"solvable", false}, {"reason", e.what()}};
  }
  return io::document(io::kDbarReportSchema, m,
                      {{"constraints", std::vector<double>(C.constraints.data(), C.constraints.data() + 4)},
                       {"gram_min_eigenvalue", C.gram_min_eigenvalue},
                       {"dimension", C.dimension},
                       {"kernel_dimension", C.kernel_dimension()},
                       {"elements", elements},
                       {"support_function", support}});
}

int run(int argc, char** argv) {
  CLI::App app{"steklov-lab: Steklov spectra, sigma_1 L maximization and free boundary minimal surfaces"};
  app.set_version_flag("--version", std::string(io::kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();
  std::string manifest_log;
  app.add_option("--manifest", manifest_log, "append the full run manifest (with timing) to this JSONL file");

  SpectrumArgs sp;
  auto* cmd_spectrum = app.add_subcommand("spectrum", "discrete Dirichlet-to-Neumann spectrum of a circle domain");
  cmd_spectrum->add_flag("--disk", sp.disk, "unit disk (default)");
  cmd_spectrum->add_option("--annulus", sp.annulus, "concentric annulus with inner radius RHO");
  cmd_spectrum->add_option("--holes", sp.holes, "holes as 'cx,cy,r;cx,cy,r'");
  cmd_spectrum->add_option("--config", sp.config, "domain and log density JSON (e.g. a maximize output)");
  cmd_spectrum->add_option("--density", sp.density, "uniform (lambda = 1) or matched (dtheta on every circle)")
      ->check(CLI::IsMember({"uniform", "matched"}))
      ->capture_default_str();
  cmd_spectrum->add_option("--eps", sp.eps, "heat smoothing time, 0 for none")->capture_default_str();
  cmd_spectrum->add_option("--modes", sp.modes, "harmonic basis degree M")->capture_default_str();
  cmd_spectrum->add_option("--eigs", sp.eigs, "eigenvalues to report, counting sigma_0")->capture_default_str();
  cmd_spectrum->add_option("--cluster-tol", sp.cluster_tol, "relative gap joining a cluster")->capture_default_str();
  cmd_spectrum->add_option("--pivot-tol", sp.pivot_tol, "mass pivot threshold")->capture_default_str();
  cmd_spectrum->add_option("--out", sp.out, "JSON output (stdout if omitted)");
  cmd_spectrum->add_option("--csv", sp.csv, "eigenvalue table as CSV");
  cmd_spectrum->add_option("--matrices", sp.matrices, "write PREFIX_A.csv and PREFIX_B.csv");

  ClosedFormArgs cf;
  auto* cmd_closed = app.add_subcommand("closedform", "closed-form spectra of rotationally symmetric metrics");
  cmd_closed->add_option("--topology", cf.topology, "annulus or moebius")
      ->check(CLI::IsMember({"annulus", "moebius"}))
      ->capture_default_str();
  cmd_closed->add_option("--T", cf.T, "half-length (default: the critical parameter)");
  cmd_closed->add_option("--fT", cf.fT, "boundary value of the conformal factor")->capture_default_str();
  cmd_closed->add_option("--nmax", cf.nmax, "largest Fourier mode")->capture_default_str();
  cmd_closed->add_option("--out", cf.out, "JSON output (stdout if omitted)");

  MaximizeArgs mx;
  auto* cmd_max = app.add_subcommand("maximize", "maximize sigma_1 L over densities and circle-domain moduli");
  cmd_max->add_option("--k", mx.k, "boundary components")->capture_default_str();
  cmd_max->add_option("--symmetry", mx.symmetry, "cyclic or none")
      ->check(CLI::IsMember({"cyclic", "none"}))
      ->capture_default_str();
  cmd_max->add_option("--budget", mx.budget, "eigensolves spent on probes")->capture_default_str();
  cmd_max->add_option("--degree", mx.degree, "basis degree of the polish stage")->capture_default_str();
  cmd_max->add_option("--density-degree", mx.density_degree, "Fourier degree of log density")->capture_default_str();
  cmd_max->add_option("--resolution-tol", mx.resolution_tol, "largest accepted eigenfunction boundary residual")
      ->capture_default_str();
  cmd_max->add_option("--certificate-grid", mx.certificate_grid, "polar grid for the conformality residual")
      ->capture_default_str();
  cmd_max->add_option("--out", mx.out, "JSON output (stdout if omitted)");
  cmd_max->add_option("--trace", mx.trace, "append per-probe and per-iteration values as JSONL");

  SweepArgs sw;
  auto* cmd_sweep = app.add_subcommand("sweep", "maximize for several k, possibly concurrently");
  cmd_sweep->add_option("--k", sw.ks, "comma separated list")->capture_default_str();
  cmd_sweep->add_option("--symmetry", sw.symmetry, "cyclic or none")
      ->check(CLI::IsMember({"cyclic", "none"}))
      ->capture_default_str();
  cmd_sweep->add_option("--budget", sw.budget, "eigensolves per entry")->capture_default_str();
  cmd_sweep->add_option("--degree", sw.degree, "basis degree of the polish stage")->capture_default_str();
  cmd_sweep->add_option("--out", sw.out, "CSV output (stdout if omitted)");
  cmd_sweep->add_option("--json", sw.json_out, "also write domains and densities as JSON");

  SurfaceArgs sv;
  double verify_tol = 1e-8;
  auto* cmd_surface = app.add_subcommand("surface", "explicit free boundary minimal surfaces");
  cmd_surface->require_subcommand(1);
  auto* cmd_verify = cmd_surface->add_subcommand("verify", "residuals of the free boundary identities");
  sv.add_to(cmd_verify, "Gauss-Legendre nodes per t panel", "trapezoid points in theta");
  cmd_verify->add_flag("--fd", sv.finite_differences, "replace analytic derivatives by finite differences");
  cmd_verify->add_option("--tol", verify_tol, "residual threshold for the passed field")->capture_default_str();
  std::string verify_out;
  cmd_verify->add_option("--out", verify_out, "JSON output (stdout if omitted)");

  DbarArgs db;
  auto* cmd_dbar = app.add_subcommand("dbar", "conformal vector fields on the critical catenoid");
  cmd_dbar->require_subcommand(1);
  auto* cmd_demo = cmd_dbar->add_subcommand("demo", "build conformal variations for a basis of C_1");
  cmd_demo->add_option("--T", db.T, "catenoid half-length (default: critical)");
  cmd_demo->add_option("--nt", db.nt, "Chebyshev order in t")->capture_default_str();
  cmd_demo->add_option("--ntheta", db.ntheta, "points in theta")->capture_default_str();
  cmd_demo->add_option("--out", db.out, "JSON output (stdout if omitted)");

  SurfaceArgs ob;
  ob.nt = 32;
  ob.ntheta = 64;
  std::string obj_out;
  auto* cmd_obj = app.add_subcommand("export-obj", "triangulated surface as Wavefront OBJ");
  ob.add_to(cmd_obj, "mesh rows in t", "mesh columns in theta");
  cmd_obj->add_option("--out", obj_out, "OBJ output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ValidationError& e) {
    app.exit(e);
    return kExitValidation;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const auto t0 = std::chrono::steady_clock::now();
  io::RunManifest m;
  const int threads = thread_limit();
  auto finish = [&](const json& doc, const std::string& out) {
    m.runtime = {{"elapsed_seconds", seconds_since(t0)}, {"threads", threads}};
    emit(doc, out, m, manifest_log);
  };

  if (cmd_spectrum->parsed()) {
    finish(run_spectrum(sp, m), sp.out);
  } else if (cmd_closed->parsed()) {
    finish(run_closedform(cf, m), cf.out);
  } else if (cmd_max->parsed()) {
    finish(run_maximize(mx, m), mx.out);
  } else if (cmd_sweep->parsed()) {
    const io::CsvTable t = run_sweep(sw, m, threads);
    if (sw.out.empty()) {
      io::write_csv(std::cout, t, m);
    } else {
      io::write_csv(sw.out, t, m);
    }
    m.runtime = {{"elapsed_seconds", seconds_since(t0)}, {"threads", threads}};
    if (!manifest_log.empty()) io::append_jsonl(manifest_log, m.full());
  } else if (cmd_verify->parsed()) {
    finish(run_surface_verify(sv, verify_tol, m), verify_out);
  } else if (cmd_demo->parsed()) {
    finish(run_dbar_demo(db, m), db.out);
  } else if (cmd_obj->parsed()) {
    m.command = "export-obj";
    m.inputs = ob.to_json();
    const ParametricSurface s = ob.build();
    io::write_obj(obj_out, triangulate(s, ob.nt, ob.ntheta), m);
    m.runtime = {{"elapsed_seconds", seconds_since(t0)}, {"threads", threads}};
    if (!manifest_log.empty()) io::append_jsonl(manifest_log, m.full());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const steklov::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return steklov::is_validation_error(e.code()) ? kExitValidation : kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}
