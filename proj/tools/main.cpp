// Command line front end: builds module experiment configurations from flags,
// runs them, and writes JSON (plus CSV for convergence tables) reports.
// Exit codes: 0 success, 1 numerical failure or failed hard check, 2 config
// error.  Single-threaded runs with equal configs produce byte-identical
// reports; wall-clock timings are only embedded on request because they break
// that reproducibility.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wdirac/diracmap.hpp"
#include "wdirac/dirac.hpp"
#include "wdirac/hodge.hpp"
#include "wdirac/mesh.hpp"
#include "wdirac/mollify.hpp"
#include "wdirac/norms.hpp"
#include "wdirac/report.hpp"
#include "wdirac/rng.hpp"
#include "wdirac/spectra.hpp"
#include "wdirac/whitney.hpp"

namespace {

using wdirac::Json;
using wdirac::require;

struct CommonOpts {
  int n = 1;
  int m = 4;
  std::vector<int> m_list;
  std::vector<double> lengths;
  std::uint64_t seed = 7;
  int threads = 1;
  std::string json_path;
  bool timings = false;
};

wdirac::Lattice make_lattice(const CommonOpts& o, int m) {
  require(o.n >= 1 && o.n <= 3, "n must be 1, 2 or 3");
  wdirac::Lattice lat;
  lat.dim = o.n;
  lat.subdivisions = m;
  if (!o.lengths.empty()) {
    require(int(o.lengths.size()) == o.n, "lengths: give exactly one value per axis");
    for (int a = 0; a < o.n; ++a) lat.lengths[std::size_t(a)] = o.lengths[std::size_t(a)];
  }
  lat.validate();
  return lat;
}

Json lengths_json(const wdirac::Lattice& lat) {
  Json arr = Json::array();
  for (int a = 0; a < lat.dim; ++a) arr.push_back(lat.lengths[std::size_t(a)]);
  return arr;
}

// Scalar function catalog, version 1. Entries:
//   const:c        constant c
//   cos:k1[,k2,k3] cos(2 pi sum_a k_a x_a / L_a), integer frequencies
//   prod:k1[,..]   product over axes of cos(2 pi k_a x_a / L_a)
// No expression parsing by design; reports echo the canonical entry name.
struct CatalogField {
  std::string echo;
  std::function<double(const std::array<double, 3>&)> fn;
};

std::vector<int> parse_int_list(const std::string& args, const char* what) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= args.size()) {
    const std::size_t comma = std::min(args.find(',', pos), args.size());
    const std::string tok = args.substr(pos, comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(tok, &used));
      require(used == tok.size(), what);
    } catch (const std::exception&) {
      require(false, what);
    }
    pos = comma + 1;
  }
  return out;
}

CatalogField make_catalog_field(const std::string& name, const wdirac::Lattice& lat) {
  CatalogField out;
  if (name.empty()) return out;
  const std::size_t colon = name.find(':');
  require(colon != std::string::npos,
          "catalog: expected name:args with name const, cos or prod");
  const std::string kind = name.substr(0, colon);
  const std::string args = name.substr(colon + 1);
  constexpr double kTwoPi = 6.283185307179586476925286766559;

  if (kind == "const") {
    double c = 0.0;
    try {
      std::size_t used = 0;
      c = std::stod(args, &used);
      require(used == args.size(), "catalog: const takes one number");
    } catch (const std::exception&) {
      require(false, "catalog: const takes one number");
    }
    out.fn = [c](const std::array<double, 3>&) { return c; };
    out.echo = "const:" + wdirac::format_double(c);
    return out;
  }

  require(kind == "cos" || kind == "prod",
          "catalog: unknown entry; use const:c, cos:k or prod:k");
  const std::vector<int> given = parse_int_list(args, "catalog: frequencies must be integers");
  require(!given.empty() && int(given.size()) <= lat.dim,
          "catalog: give 1..n integer frequencies");
  std::array<int, 3> k{0, 0, 0};
  for (std::size_t a = 0; a < given.size(); ++a) k[a] = given[a];
  const std::array<double, 3> lengths = lat.lengths;
  const int dim = lat.dim;

  if (kind == "cos") {
    out.fn = [k, lengths, dim, kTwoPi](const std::array<double, 3>& x) {
      double phase = 0.0;
      for (int a = 0; a < dim; ++a) phase += k[std::size_t(a)] * x[std::size_t(a)] / lengths[std::size_t(a)];
      return std::cos(kTwoPi * phase);
    };
  } else {
    out.fn = [k, lengths, dim, kTwoPi](const std::array<double, 3>& x) {
      double v = 1.0;
      for (int a = 0; a < dim; ++a)
        v *= std::cos(kTwoPi * k[std::size_t(a)] * x[std::size_t(a)] / lengths[std::size_t(a)]);
      return v;
    };
  }
  out.echo = kind + ":";
  for (int a = 0; a < dim; ++a) {
    if (a) out.echo += ',';
    out.echo += std::to_string(k[std::size_t(a)]);
  }
  return out;
}

// shared tail: optional timing, write or print, exit code
int finish(const CommonOpts& o, Json& report, const std::string& summary, double seconds,
           bool pass = true) {
  if (o.timings) report["elapsed_seconds"] = seconds;
  const std::string text = wdirac::render_json(report);
  std::cout << summary << "\n";
  if (!o.json_path.empty())
    wdirac::write_text_file(o.json_path, text);
  else
    std::cout << text;
  return pass ? 0 : 1;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

int cmd_mesh_info(const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const wdirac::Lattice lat = make_lattice(o, o.m);
  const auto mesh = wdirac::PeriodicMesh::build(lat);

  Json config;
  config["n"] = o.n;
  config["m"] = o.m;
  config["lengths"] = lengths_json(lat);
  Json r = wdirac::report_envelope("mesh info", config);

  Json counts = Json::array();
  for (int k = 0; k <= o.n; ++k) counts.push_back(mesh->count(k));
  r["simplex_counts"] = counts;
  r["width"] = mesh->width();
  r["min_cell_width"] = mesh->min_cell_width();
  r["total_volume"] = mesh->total_volume();
  r["euler_characteristic"] = mesh->euler_characteristic();

  std::string summary = "mesh: n=" + std::to_string(o.n) + " m=" + std::to_string(o.m) +
                        " simplices=";
  for (int k = 0; k <= o.n; ++k)
    summary += (k ? "/" : "") + std::to_string(mesh->count(k));
  summary += " width=" + wdirac::format_double(mesh->width());
  return finish(o, r, summary, seconds_since(t0));
}

int cmd_eig(const CommonOpts& o, int count, double mass, double shift,
            const std::string& potential) {
  const auto t0 = std::chrono::steady_clock::now();
  const wdirac::Lattice lat = make_lattice(o, o.m);
  const auto rc = wdirac::DeRhamComplex::build(wdirac::PeriodicMesh::build(lat));

  const CatalogField pot = make_catalog_field(potential, lat);
  wdirac::PerturbationSpec spec;
  spec.mass = mass;
  spec.shift = shift;
  spec.potential = pot.fn;
  spec.validate(rc->mesh());

  const wdirac::BlockOperator a = wdirac::assemble_dirac_form(*rc);
  const wdirac::BlockOperator m_op = wdirac::graded_mass(*rc);
  const wdirac::BlockOperator op = wdirac::perturbed_operator(a, m_op, spec);
  const wdirac::EigenSolution sol = wdirac::generalized_symmetric_eig(op.matrix, m_op.matrix);

  const int total = int(sol.eigenvalues.size());
  require(count >= 1 && count <= total, "count must lie in 1..total dof count");

  // the `count` eigenvalues nearest zero form a window in the ascending list
  int best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int start = 0; start + count <= total; ++start) {
    const double cost = std::max(std::abs(sol.eigenvalues[std::size_t(start)]),
                                 std::abs(sol.eigenvalues[std::size_t(start + count - 1)]));
    if (cost < best_cost) {
      best_cost = cost;
      best = start;
    }
  }

  wdirac::Vector window(std::size_t(count), 0.0);
  double residual_max = 0.0;
  for (int i = 0; i < count; ++i) {
    window[std::size_t(i)] = sol.eigenvalues[std::size_t(best + i)];
    residual_max = std::max(residual_max, sol.residuals[std::size_t(best + i)]);
  }

  Json config;
  config["n"] = o.n;
  config["m"] = o.m;
  config["lengths"] = lengths_json(lat);
  config["count"] = count;
  config["mass"] = mass;
  config["shift"] = shift;
  config["potential"] = pot.echo;
  Json r = wdirac::report_envelope("eig", config);
  r["total_dofs"] = total;
  r["eigenvalues"] = window;
  Json clusters = Json::array();
  for (const wdirac::SpectrumLine& line : wdirac::cluster_spectrum(window)) {
    Json c;
    c["value"] = line.value;
    c["multiplicity"] = line.multiplicity;
    clusters.push_back(c);
  }
  r["clusters"] = clusters;
  r["residual_max"] = residual_max;

  std::string summary = "eig: n=" + std::to_string(o.n) + " m=" + std::to_string(o.m) + ":";
  for (double v : window) summary += " " + wdirac::format_double(v);
  return finish(o, r, summary, seconds_since(t0));
}

int cmd_converge(const CommonOpts& o, const std::vector<double>& targets, double mass,
                 const std::string& csv_path) {
  const auto t0 = std::chrono::steady_clock::now();
  require(!targets.empty(), "converge: target list must not be empty");
  require(o.m_list.size() >= 3, "converge: need at least three mesh sizes");

  std::vector<wdirac::Lattice> lattices;
  for (int m : o.m_list) lattices.push_back(make_lattice(o, m));

  wdirac::PerturbationSpec spec;
  spec.mass = mass;
  const std::vector<wdirac::ConvergenceReport> reports =
      wdirac::eigenvalue_convergence(lattices, spec, targets);

  Json config;
  config["n"] = o.n;
  config["m_list"] = o.m_list;
  config["lengths"] = lengths_json(lattices.front());
  config["targets"] = targets;
  config["mass"] = mass;
  Json r = wdirac::report_envelope("converge", config);

  Json items = Json::array();
  std::vector<std::vector<double>> csv_rows;
  std::string summary = "converge:";
  for (const wdirac::ConvergenceReport& rep : reports) {
    Json item;
    item["target"] = rep.target;
    item["oracle_multiplicity"] = rep.oracle_multiplicity;
    Json rows = Json::array();
    for (const wdirac::ConvergenceRow& row : rep.rows) {
      Json jr;
      jr["m"] = row.subdivisions;
      jr["h"] = row.h;
      jr["value"] = row.value;
      jr["error"] = row.error;
      rows.push_back(jr);
      csv_rows.push_back({rep.target, double(row.subdivisions), row.h, row.value, row.error,
                          rep.slope});
    }
    item["rows"] = rows;
    item["slope"] = rep.slope;
    item["r_squared"] = rep.r2;
    item["ambiguous"] = rep.ambiguous;
    items.push_back(item);
    summary += " target " + wdirac::format_double(rep.target) + " slope " +
               wdirac::format_double(rep.slope) + " final_error " +
               wdirac::format_double(rep.rows.back().error) + ";";
  }
  r["targets"] = items;

  if (!csv_path.empty())
    wdirac::write_text_file(
        csv_path, wdirac::render_csv({"target", "m", "h", "value", "error", "slope"}, csv_rows));
  return finish(o, r, summary, seconds_since(t0));
}

int cmd_hodge(const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const wdirac::Lattice lat = make_lattice(o, o.m);
  const auto rc = wdirac::DeRhamComplex::build(wdirac::PeriodicMesh::build(lat));
  wdirac::HodgeTools tools(rc);
  wdirac::SplitMix64 rng(o.seed);

  Json config;
  config["n"] = o.n;
  config["m"] = o.m;
  config["lengths"] = lengths_json(lat);
  config["seed"] = o.seed;
  Json r = wdirac::report_envelope("hodge", config);

  Json degrees = Json::array();
  double worst_residual = 0.0;
  std::string dims;
  for (int k = 0; k <= o.n; ++k) {
    wdirac::Cochain u;
    u.degree = k;
    u.values.resize(std::size_t(rc->dof_count(k)));
    for (double& v : u.values) v = rng.normal();
    const wdirac::HodgeDecomposition dec = tools.decompose(u);

    Json d;
    d["degree"] = k;
    d["dofs"] = rc->dof_count(k);
    d["harmonic_dim"] = tools.harmonic(k).dimension();
    d["expected_harmonic_dim"] = wdirac::binomial(o.n, k);
    d["identity_residual"] = dec.identity_residual;
    d["max_cross_inner"] = dec.max_cross_inner;
    d["coexact_kernel_residual"] = dec.coexact_kernel_residual;
    d["stability_ratio"] = dec.stability_ratio;
    d["exact_norm"] = rc->l2_norm(dec.exact);
    d["coexact_norm"] = rc->l2_norm(dec.coexact);
    d["harmonic_norm"] = rc->l2_norm(dec.harmonic);
    degrees.push_back(d);

    worst_residual = std::max({worst_residual, dec.identity_residual, dec.max_cross_inner,
                               dec.coexact_kernel_residual});
    dims += (k ? "/" : "") + std::to_string(tools.harmonic(k).dimension());
  }
  r["degrees"] = degrees;

  const std::string summary = "hodge: harmonic dims " + dims + " worst residual " +
                              wdirac::format_double(worst_residual);
  return finish(o, r, summary, seconds_since(t0));
}

Json seminorm_json(const wdirac::SeminormReport& rep) {
  Json j;
  j["id"] = rep.id;
  j["dim"] = rep.dim;
  j["s"] = rep.s;
  j["s_prime"] = rep.s_prime;
  j["samples"] = rep.samples;
  j["seed"] = rep.seed;
  Json meshes = Json::array();
  for (const wdirac::MeshRatioStats& ms : rep.meshes) {
    Json m;
    m["m"] = ms.subdivisions;
    m["width"] = ms.width;
    m["min_ratio"] = ms.min_ratio;
    m["max_ratio"] = ms.max_ratio;
    meshes.push_back(m);
  }
  j["meshes"] = meshes;
  j["fitted_exponent"] = rep.fitted_exponent;
  j["r_squared"] = rep.r_squared;
  j["target_exponent"] = rep.target_exponent;
  j["notes"] = rep.notes;
  return j;
}

int cmd_norms(const CommonOpts& o, const std::string& suite, double s, double s_prime,
              int samples, const std::string& field_name) {
  const auto t0 = std::chrono::steady_clock::now();
  require(!o.m_list.empty(), "norms: give at least one mesh size via --m-list");
  const wdirac::Lattice base = make_lattice(o, o.m_list.front());

  Json config;
  config["n"] = o.n;
  config["m_list"] = o.m_list;
  config["lengths"] = lengths_json(base);
  config["suite"] = suite;
  config["s"] = s;
  config["s_prime"] = s_prime;
  config["samples"] = samples;
  config["seed"] = o.seed;
  Json r = wdirac::report_envelope("norms", config);
  std::string summary;

  if (suite == "equivalence") {
    const wdirac::SeminormReport rep =
        wdirac::equivalence_experiment(base, o.m_list, samples, o.seed);
    r["report"] = seminorm_json(rep);
    summary = "norms equivalence: exponent " + wdirac::format_double(rep.fitted_exponent) +
              " (target " + wdirac::format_double(rep.target_exponent) + ")";
  } else if (suite == "inverse") {
    const std::vector<wdirac::SeminormReport> reps =
        wdirac::inverse_inequality_suite(base, o.m_list, s, s_prime, samples, o.seed);
    Json arr = Json::array();
    summary = "norms inverse:";
    for (const wdirac::SeminormReport& rep : reps) {
      arr.push_back(seminorm_json(rep));
      summary += " " + rep.id + " " + wdirac::format_double(rep.fitted_exponent) + ";";
    }
    r["reports"] = arr;
  } else if (suite == "slobodetskij") {
    const std::string fname = field_name.empty() ? "cos:1" : field_name;
    config["field"] = fname;
    r["config"] = config;  // refresh echo with the resolved field
    wdirac::SlobodetskijSpec spec;
    spec.s = s;
    Json rows = Json::array();
    summary = "norms slobodetskij:";
    for (int m : o.m_list) {
      const wdirac::Lattice lat = make_lattice(o, m);
      const auto rc = wdirac::DeRhamComplex::build(wdirac::PeriodicMesh::build(lat));
      const CatalogField field = make_catalog_field(fname, lat);
      const wdirac::Cochain u =
          rc->interpolate(wdirac::scalar_form(o.n, field.fn), 7);
      const wdirac::SeminormValue sv = wdirac::slobodetskij(*rc, u, spec);
      Json row;
      row["m"] = m;
      row["width"] = rc->width();
      row["value"] = sv.value;
      row["error_bound"] = sv.error_bound;
      rows.push_back(row);
      summary += " m=" + std::to_string(m) + " " + wdirac::format_double(sv.value) + "+-" +
                 wdirac::format_double(sv.error_bound) + ";";
    }
    r["rows"] = rows;
  } else {
    require(false, "norms: suite must be equivalence, inverse or slobodetskij");
  }
  return finish(o, r, summary, seconds_since(t0));
}

int cmd_mollify(const CommonOpts& o, const std::string& suite, double eps, int q, int order,
                const std::string& field_name, double s_prime) {
  const auto t0 = std::chrono::steady_clock::now();
  require(!o.m_list.empty(), "mollify: give at least one mesh size via --m-list");
  const wdirac::Lattice base = make_lattice(o, o.m_list.front());
  const wdirac::Mollifier mol = wdirac::make_mollifier(o.n, q, eps);

  Json config;
  config["n"] = o.n;
  config["m_list"] = o.m_list;
  config["lengths"] = lengths_json(base);
  config["suite"] = suite;
  config["eps"] = eps;
  config["q"] = q;
  config["quad_order"] = order;
  Json r = wdirac::report_envelope("mollify", config);
  std::string summary;

  if (suite == "projector") {
    const std::vector<wdirac::StabilityReport> reps =
        wdirac::stability_experiment(base, o.m_list, mol, order);
    Json rows = Json::array();
    double drift = 0.0;
    for (const wdirac::StabilityReport& rep : reps) {
      Json row;
      row["m"] = rep.subdivisions;
      row["width"] = rep.width;
      row["condition"] = rep.condition;
      row["l2_norm"] = rep.l2_norm;
      row["equiv_min"] = rep.equiv_min;
      row["equiv_max"] = rep.equiv_max;
      rows.push_back(row);
      for (std::size_t k = 0; k < rep.l2_norm.size(); ++k)
        drift = std::max(drift, rep.l2_norm[k] / reps.front().l2_norm[k]);
    }
    r["rows"] = rows;
    r["l2_norm_drift"] = drift;
    summary = "mollify projector: l2 norm drift " + wdirac::format_double(drift);
  } else if (suite == "rates") {
    const std::string fname = field_name.empty() ? "cos:1" : field_name;
    config["field"] = fname;
    config["s_prime"] = s_prime;
    r["config"] = config;
    const CatalogField field = make_catalog_field(fname, base);
    const wdirac::ProjectorRates rates = wdirac::rate_experiment(
        base, o.m_list, wdirac::scalar_form(o.n, field.fn), mol, order, s_prime);
    r["widths"] = rates.widths;
    r["projector_error"] = rates.projector_error;
    r["smoothed_interp_error"] = rates.smoothed_interp_error;
    r["projector_order"] = rates.projector_order;
    r["smoothed_interp_order"] = rates.smoothed_interp_order;
    if (!rates.fractional_error.empty()) {
      r["fractional_error"] = rates.fractional_error;
      r["fractional_order"] = rates.fractional_order;
      r["fractional_s"] = rates.fractional_s;
    }
    summary = "mollify rates: projector order " + wdirac::format_double(rates.projector_order) +
              " interp order " + wdirac::format_double(rates.smoothed_interp_order);
  } else {
    require(false, "mollify: suite must be projector or rates");
  }
  return finish(o, r, summary, seconds_since(t0));
}

Json algebra_json(const wdirac::AlgebraReport& rep) {
  Json j;
  j["seed"] = rep.seed;
  j["trials"] = rep.trials;
  Json checks = Json::array();
  for (const wdirac::IdentityCheck& c : rep.checks) {
    Json e;
    e["name"] = c.name;
    e["deviation"] = c.deviation;
    e["tolerance"] = c.tolerance;
    e["pass"] = c.pass;
    checks.push_back(e);
  }
  j["checks"] = checks;
  j["max_deviation"] = rep.max_deviation;
  j["pass"] = rep.pass;
  return j;
}

int cmd_algebra(const CommonOpts& o, int trials) {
  const auto t0 = std::chrono::steady_clock::now();
  std::array<double, 3> lengths{1.0, 1.0, 1.0};
  if (!o.lengths.empty()) {
    require(o.lengths.size() == 3, "algebra-check: lengths needs three values");
    for (int a = 0; a < 3; ++a) lengths[std::size_t(a)] = o.lengths[std::size_t(a)];
  }

  const wdirac::AlgebraReport quat = wdirac::check_quaternion_algebra(o.seed, trials);
  const wdirac::AlgebraReport sym = wdirac::check_symbol_identities(o.seed, trials);

  const std::vector<std::pair<std::array<int, 3>, double>> modes = {
      {{1, 0, 0}, 0.0}, {{0, 0, 0}, 0.0}, {{0, 0, 0}, 1.0}, {{1, 2, 2}, 0.0}};
  Json bridges = Json::array();
  bool bridges_pass = true;
  for (const auto& [mode, mass] : modes) {
    const wdirac::BridgeReport br = wdirac::oracle_bridge(mode, lengths, mass);
    Json b;
    b["mode"] = mode;
    b["mass"] = mass;
    b["frequency_norm"] = br.frequency_norm;
    b["symbol_eigenvalues"] = br.symbol_eigenvalues;
    b["max_deviation"] = br.max_deviation;
    b["shell_multiplicity"] = br.shell_multiplicity;
    b["pass"] = br.pass;
    bridges.push_back(b);
    bridges_pass = bridges_pass && br.pass;
  }

  Json config;
  config["seed"] = o.seed;
  config["trials"] = trials;
  config["lengths"] = lengths;
  Json r = wdirac::report_envelope("algebra-check", config);
  r["quaternion"] = algebra_json(quat);
  r["symbol"] = algebra_json(sym);
  r["bridges"] = bridges;
  const bool pass = quat.pass && sym.pass && bridges_pass;
  r["pass"] = pass;

  const double maxdev = std::max(quat.max_deviation, sym.max_deviation);
  const std::string summary = std::string("algebra-check: ") + (pass ? "PASS" : "FAIL") +
                              " (max identity deviation " + wdirac::format_double(maxdev) + ")";
  return finish(o, r, summary, seconds_since(t0), pass);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Whitney-form Hodge-Dirac toolkit on flat periodic tori"};
  app.require_subcommand(1);

  CommonOpts o;
  int count = 8;
  double mass = 0.0;
  double shift = 0.0;
  std::string potential;
  std::vector<double> targets;
  std::string csv_path;
  std::string suite;
  double s = 0.3;
  double s_prime = 0.4;
  int samples = 40;
  double eps = 0.25;
  int q = 3;
  int order = 7;
  std::string field_name;
  int trials = 100;

  auto add_common = [&](CLI::App* cmd, bool with_m, bool with_mlist) {
    cmd->add_option("--n", o.n, "torus dimension (1..3)");
    if (with_m) cmd->add_option("--m", o.m, "subdivisions per axis (>= 3)");
    if (with_mlist)
      cmd->add_option("--m-list", o.m_list, "subdivision sequence")->delimiter(',');
    cmd->add_option("--lengths", o.lengths, "torus edge lengths, one per axis")->delimiter(',');
    cmd->add_option("--seed", o.seed, "random seed echoed into the report");
    cmd->add_option("--threads", o.threads, "worker threads; 1 gives byte-stable reports");
    cmd->add_option("--json", o.json_path, "write the JSON report to this path");
    cmd->add_flag("--timings", o.timings,
                  "embed wall-clock timings (breaks byte reproducibility)");
  };

  CLI::App* mesh_cmd = app.add_subcommand("mesh", "mesh inspection");
  mesh_cmd->require_subcommand(1);
  CLI::App* mesh_info = mesh_cmd->add_subcommand("info", "simplex counts and mesh widths");
  add_common(mesh_info, true, false);

  CLI::App* eig_cmd = app.add_subcommand("eig", "discrete Dirac spectrum near zero");
  add_common(eig_cmd, true, false);
  eig_cmd->add_option("--count", count, "number of eigenvalues nearest zero");
  eig_cmd->add_option("--mass", mass, "parity mass term");
  eig_cmd->add_option("--shift", shift, "constant spectral shift");
  eig_cmd->add_option("--potential", potential, "scalar potential catalog entry");

  CLI::App* conv_cmd = app.add_subcommand("converge", "eigenvalue convergence table");
  add_common(conv_cmd, false, true);
  conv_cmd->add_option("--targets", targets, "oracle eigenvalues to track")->delimiter(',');
  conv_cmd->add_option("--mass", mass, "parity mass term");
  conv_cmd->add_option("--csv", csv_path, "write the table as CSV to this path");

  CLI::App* hodge_cmd = app.add_subcommand("hodge", "decomposition of random cochains");
  add_common(hodge_cmd, true, false);

  CLI::App* norms_cmd = app.add_subcommand("norms", "seminorm ratio experiments");
  add_common(norms_cmd, false, true);
  norms_cmd->add_option("--suite", suite, "equivalence, inverse or slobodetskij")->required();
  norms_cmd->add_option("--s", s, "fractional order in (0, 1/2)");
  norms_cmd->add_option("--s-prime", s_prime, "second fractional order, s < s' < 1/2");
  norms_cmd->add_option("--samples", samples, "random samples per mesh");
  norms_cmd->add_option("--field", field_name, "catalog field for the slobodetskij rows");

  CLI::App* mol_cmd = app.add_subcommand("mollify", "smoothed projector experiments");
  add_common(mol_cmd, false, true);
  mol_cmd->add_option("--suite", suite, "projector or rates")->required();
  mol_cmd->add_option("--eps", eps, "smoothing radius as a fraction of the min cell width");
  mol_cmd->add_option("--q", q, "bump smoothness exponent");
  mol_cmd->add_option("--order", order, "quadrature order for the smoothing integrals");
  mol_cmd->add_option("--field", field_name, "catalog field for the rate suite");
  mol_cmd->add_option("--s-prime", s_prime, "fractional order for the rate suite");

  CLI::App* alg_cmd = app.add_subcommand("algebra-check", "quaternion and symbol identities");
  add_common(alg_cmd, false, false);
  alg_cmd->add_option("--trials", trials, "random trials per identity");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    require(o.threads >= 1, "threads must be >= 1");
    // experiments below run serially; --threads is accepted for forward
    // compatibility and echoed, and 1 is always reproducible
    if (mesh_cmd->parsed()) return cmd_mesh_info(o);
    if (eig_cmd->parsed()) return cmd_eig(o, count, mass, shift, potential);
    if (conv_cmd->parsed()) return cmd_converge(o, targets, mass, csv_path);
    if (hodge_cmd->parsed()) return cmd_hodge(o);
    if (norms_cmd->parsed()) return cmd_norms(o, suite, s, s_prime, samples, field_name);
    if (mol_cmd->parsed()) return cmd_mollify(o, suite, eps, q, order, field_name, s_prime);
    if (alg_cmd->parsed()) return cmd_algebra(o, trials);
    std::cerr << "config error: no command selected\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  }
}
