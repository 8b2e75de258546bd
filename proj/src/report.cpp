#include "qhm/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace qhm {

namespace {

using nlohmann::json;

Regime regime_of_name(const std::string& s) {
  if (s == "unitary") return Regime::UnitaryMetric;
  if (s == "krein") return Regime::KreinPseudoMetric;
  if (s == "complex") return Regime::ComplexSpectrum;
  if (s == "singular") return Regime::SingularMetric;
  throw Error(Err::BadConfig, "unknown regime name: " + s);
}

bool known_command(const std::string& c) {
  return c == "spectrum" || c == "scan" || c == "boundary" || c == "ep-probe" ||
         c == "evolve" || c == "verify";
}

// Deterministic start state: uniform amplitudes, unit Euclidean norm.
CVec default_state(int dim) {
  return CVec(dim, cplx(1.0 / std::sqrt(double(dim)), 0.0));
}

json report_to_json(const ScanReport& rep) {
  json obj;
  obj["model"] = rep.model_id;
  obj["rho"] = rep.rho;
  obj["tol"] = rep.tol;
  obj["tol_t"] = rep.tol_t;
  obj["t"] = rep.t_grid;
  json pts = json::array();
  for (const RegimePoint& p : rep.points) {
    json e = json::array();
    for (const cplx& z : p.eigenvalues) e.push_back({z.real(), z.imag()});
    pts.push_back({{"regime", regime_name(p.regime)}, {"eigs", e}});
  }
  obj["points"] = pts;
  json bs = json::array();
  for (const Boundary& b : rep.boundaries)
    bs.push_back({{"t", b.t}, {"from", regime_name(b.from)}, {"to", regime_name(b.to)}});
  obj["boundaries"] = bs;
  return obj;
}

ScanReport report_from_json(const json& obj) {
  ScanReport rep;
  rep.model_id = obj.at("model").get<std::string>();
  rep.rho = obj.at("rho").get<int>();
  rep.tol = obj.at("tol").get<double>();
  rep.tol_t = obj.at("tol_t").get<double>();
  rep.t_grid = obj.at("t").get<std::vector<double>>();
  for (const json& p : obj.at("points")) {
    RegimePoint pt;
    pt.regime = regime_of_name(p.at("regime").get<std::string>());
    for (const json& e : p.at("eigs"))
      pt.eigenvalues.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
    rep.points.push_back(std::move(pt));
  }
  for (const json& b : obj.at("boundaries")) {
    Boundary bd;
    bd.t = b.at("t").get<double>();
    bd.from = regime_of_name(b.at("from").get<std::string>());
    bd.to = regime_of_name(b.at("to").get<std::string>());
    rep.boundaries.push_back(bd);
  }
  return rep;
}

int boundary_grid_points(const RunConfig& cfg) {
  const double span = cfg.t_max - cfg.t_min;
  return std::max(2, 1 + int(std::floor(span / cfg.t_step + 1e-9)));
}

}  // namespace

void validate_config(const RunConfig& cfg) {
  if (!known_command(cfg.command))
    throw Error(Err::BadConfig, "unknown command: " + cfg.command);
  if (cfg.format != "csv" && cfg.format != "json")
    throw Error(Err::BadConfig, "format must be csv or json");
  if (!(cfg.tol > 0.0) || !(cfg.tol_t > 0.0))
    throw Error(Err::BadConfig, "tolerances must be positive");
  if (cfg.threads < 1) throw Error(Err::BadConfig, "threads must be at least 1");
  if (cfg.figure < 0 || cfg.figure > 3)
    throw Error(Err::BadConfig, "figure must be 1, 2 or 3");
  if (cfg.command == "verify") return;  // model-independent

  const ToyModel& m = model_by_id(cfg.model_id);
  if (!cfg.kappa.empty()) {
    if (int(cfg.kappa.size()) != m.dim)
      throw Error(Err::BadConfig, "kappa needs one weight per level");
    for (double k : cfg.kappa)
      if (!(k > 0.0)) throw Error(Err::BadConfig, "kappa weights must be positive");
  }

  const bool gridded =
      cfg.command == "spectrum" || cfg.command == "boundary" ||
      (cfg.command == "scan" && cfg.figure == 0);
  if (gridded) {
    if (!(cfg.t_step > 0.0)) throw Error(Err::BadConfig, "t-step must be positive");
    if (cfg.command == "boundary" ? !(cfg.t_min < cfg.t_max) : !(cfg.t_min <= cfg.t_max))
      throw Error(Err::BadConfig, "empty t range");
  }
  if (cfg.command == "boundary" || (cfg.command == "scan" && cfg.figure == 0) ||
      cfg.command == "evolve") {
    if (cfg.rhos.empty()) throw Error(Err::BadConfig, "rho list is empty");
    for (int r : cfg.rhos)
      if (r < 0) throw Error(Err::BadConfig, "rho must be nonnegative");
  }
  if (cfg.command == "ep-probe" && !(cfg.radius > 0.0))
    throw Error(Err::BadConfig, "probe radius must be positive");
  if (cfg.command == "evolve") {
    if (cfg.steps < 1) throw Error(Err::BadConfig, "steps must be at least 1");
    if (cfg.stationary ? !(cfg.horizon > 0.0) : !(cfg.t0 < cfg.t1))
      throw Error(Err::BadConfig, "empty evolution window");
  }
}

std::vector<double> t_grid_of(const RunConfig& cfg) {
  const double span = cfg.t_max - cfg.t_min;
  const int n = 1 + int(std::floor(span / cfg.t_step + 1e-9));
  std::vector<double> g(size_t(std::max(n, 1)));
  for (size_t k = 0; k < g.size(); ++k) g[k] = cfg.t_min + cfg.t_step * double(k);
  return g;
}

std::string format_sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string csv_of_scan(const std::vector<ScanReport>& reports) {
  int dim = 0;
  for (const ScanReport& rep : reports)
    if (!rep.points.empty()) dim = int(rep.points.front().eigenvalues.size());
  std::string out = "model,rho,t,regime";
  for (int k = 1; k <= dim; ++k) {
    out += ",eig" + std::to_string(k) + "_re";
    out += ",eig" + std::to_string(k) + "_im";
  }
  out += '\n';
  for (const ScanReport& rep : reports) {
    for (size_t i = 0; i < rep.t_grid.size(); ++i) {
      out += rep.model_id;
      out += ',' + std::to_string(rep.rho);
      out += ',' + format_sci(rep.t_grid[i]);
      out += ',';
      out += regime_name(rep.points[i].regime);
      for (const cplx& e : rep.points[i].eigenvalues) {
        out += ',' + format_sci(e.real());
        out += ',' + format_sci(e.imag());
      }
      out += '\n';
    }
  }
  return out;
}

std::string json_of_scan(const ScanReport& report) {
  return report_to_json(report).dump(2) + "\n";
}

ScanReport scan_of_json(const std::string& text) {
  return report_from_json(json::parse(text));
}

FigureTrace figure_trace(int figure, double tol, int threads) {
  FigureTrace tr;
  tr.figure = figure;
  double t_min = 0.0, step = 0.0;
  int n = 0;
  bool rescaled = false;
  switch (figure) {
    case 1:  // full two-level interpolation ladder across both boundaries
      tr.model_id = "two";
      tr.rhos = {0, 1, 2, 3, 4};
      t_min = 0.01, step = 0.01, n = 500;
      rescaled = true;
      break;
    case 2:  // baseline four-level metric, raw spectrum on the unitary window
      tr.model_id = "four";
      tr.rhos = {0};
      t_min = 0.001, step = 0.001, n = 1000;
      break;
    case 3:  // top branch pair of the four-level interpolations
      tr.model_id = "four";
      tr.rhos = {1, 2, 3};
      t_min = 0.01, step = 0.01, n = 150;
      rescaled = true;
      break;
    default:
      throw Error(Err::BadConfig, "figure must be 1, 2 or 3");
  }
  const ToyModel& m = model_by_id(tr.model_id);
  tr.t.resize(size_t(n));
  for (int k = 0; k < n; ++k) tr.t[size_t(k)] = t_min + step * double(k);

  const int branches = figure == 3 ? 2 : m.dim;
  const int lo = m.dim - branches;  // offset into the sorted spectrum
  for (int rho : tr.rhos) {
    for (int b = 0; b < branches; ++b)
      tr.value_columns.push_back("rho" + std::to_string(rho) + "_lam" +
                                 std::to_string(lo + b + 1));
    tr.regime_columns.push_back("rho" + std::to_string(rho) + "_regime");
  }
  tr.values.assign(tr.rhos.size() * size_t(branches), std::vector<double>(size_t(n)));
  tr.regimes.assign(tr.rhos.size(), std::vector<std::string>(size_t(n)));

  // Same worker pattern as scan_model: grid points claimed by index, results
  // written to disjoint slots, so the trace is identical for any thread count.
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    try {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= size_t(n)) return;
        for (size_t r = 0; r < tr.rhos.size(); ++r) {
          RegimePoint p = classify_point(m, tr.rhos[r], tr.t[i], tol);
          for (int b = 0; b < branches; ++b)
            tr.values[r * size_t(branches) + size_t(b)][i] =
                p.eigenvalues[size_t(lo + b)].real();
          tr.regimes[r][i] = regime_name(p.regime);
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  const int nthreads = std::clamp(threads, 1, 64);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < nthreads; ++k) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  tr.rescale.assign(tr.rhos.size(), 1.0);
  if (rescaled) {
    for (size_t r = 0; r < tr.rhos.size(); ++r) {
      const double top = tr.values[r * size_t(branches) + size_t(branches - 1)][0];
      tr.rescale[r] = 1.0 / top;
      for (int b = 0; b < branches; ++b)
        for (double& v : tr.values[r * size_t(branches) + size_t(b)]) v *= tr.rescale[r];
    }
  }
  return tr;
}

std::string csv_of_figure(const FigureTrace& trace) {
  std::string out = "t";
  for (const std::string& c : trace.value_columns) out += ',' + c;
  for (const std::string& c : trace.regime_columns) out += ',' + c;
  out += '\n';
  for (size_t i = 0; i < trace.t.size(); ++i) {
    out += format_sci(trace.t[i]);
    for (const auto& col : trace.values) out += ',' + format_sci(col[i]);
    for (const auto& col : trace.regimes) {
      out += ',';
      out += col[i];
    }
    out += '\n';
  }
  return out;
}

std::vector<VerifyCheck> run_verify_suite(bool inject_identity_metric, double tol_cap) {
  std::vector<VerifyCheck> checks;
  auto add = [&checks](const std::string& name, double residual, double tolerance) {
    checks.push_back({name, residual <= tolerance, residual, tolerance});
  };
  const double t = 0.5;

  {
    const Matrix theta =
        inject_identity_metric ? Matrix::identity(2) : theta0_2(t);
    add("two_level_intertwining", quasi_hermiticity_residual(h2(t), theta), 1e-10);
  }
  add("four_level_intertwining", quasi_hermiticity_residual(h4(t), theta0_4(t)), 1e-10);

  {
    AdjointBasis basis = adjoint_basis(h2(t));
    std::vector<double> kappa = calibrate_kappa(basis, theta0_2(t));
    const Matrix prod = metric_rho(theta0_2(t), h2(t), 2);
    const Matrix spec = metric_rho_spectral(basis, kappa, 2);
    add("two_level_rho_routes",
        (prod - spec).frobenius_norm() / prod.frobenius_norm(), 1e-10);
  }
  {
    AdjointBasis basis = adjoint_basis(h4(t));
    std::vector<double> kappa = calibrate_kappa(basis, theta0_4(t));
    const Matrix prod = metric_rho(theta0_4(t), h4(t), 1);
    const Matrix spec = metric_rho_spectral(basis, kappa, 1);
    add("four_level_rho_routes",
        (prod - spec).frobenius_norm() / prod.frobenius_norm(), 1e-10);
  }

  {
    double worst = 0.0;
    for (int rho = 0; rho <= 4; ++rho) {
      RegimePoint p = classify_point(two_level(), rho, t);
      auto [a, b] = theta_rho_2_eigenvalues(rho, t);
      if (a.real() > b.real()) std::swap(a, b);
      worst = std::max(worst, std::abs(p.eigenvalues[0] - a));
      worst = std::max(worst, std::abs(p.eigenvalues[1] - b));
    }
    add("two_level_metric_eigenvalues", worst, 1e-9);
  }

  {
    const Matrix hh = hermitize(h2(t), theta0_2(t));
    EigenDecomposition d = eig_hermitian(hh, 1e-8);
    const std::vector<double> exact = energies_2(t);
    double worst = 0.0;
    for (size_t k = 0; k < exact.size(); ++k)
      worst = std::max(worst, std::abs(d.eigenvalues[k] - exact[k]));
    add("hermitized_spectrum", worst, 1e-9);
  }

  {
    double min_ratio = 1.0;
    for (const ToyModel* m : {&two_level(), &four_level()}) {
      for (double ts : {0.2, 0.5, 0.8}) {
        EigenDecomposition d = eig_hermitian(m->metric0(ts), 1e-8);
        min_ratio = std::min(min_ratio, d.eigenvalues.front().real() /
                                            d.eigenvalues.back().real());
      }
    }
    add("metric_positive_window", std::max(0.0, -min_ratio), 0.0);
  }

  add("stationary_norm_drift",
      propagate_stationary(h2(t), theta0_2(t), default_state(2), 100.0, 400).drift,
      1e-8);
  add("nonstationary_norm_drift",
      propagate_nonstationary(two_level(), 0, default_state(2), 0.3, 0.8, 500).drift,
      1e-6);

  add("boundary_rho0",
      std::abs(first_unitary_exit(boundary_scan(two_level(), 0, 0.5, 1.5)) - 1.0),
      1e-8);

  add("ep_rank_collapse",
      std::abs(numeric_rank(theta0_2(0.0)) - 1) +
          std::abs(numeric_rank(theta0_4(0.0)) - 1),
      0.0);
  {
    Matrix nil = h2(0.0) - Matrix::identity(2) * cplx(2.0);
    add("ep_nilpotent_block", (nil * nil).max_abs(), 0.0);
  }

  if (tol_cap > 0.0) {
    for (VerifyCheck& c : checks) {
      c.tolerance = std::min(c.tolerance, tol_cap);
      c.pass = c.residual <= c.tolerance;
    }
  }
  return checks;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out) {
  const ToyModel& m = model_by_id(cfg.model_id);
  const std::vector<double> grid = t_grid_of(cfg);
  if (cfg.format == "json") {
    json obj;
    obj["model"] = m.id;
    obj["t"] = grid;
    json rows = json::array();
    for (double t : grid) rows.push_back(m.energies(t));
    obj["energies"] = rows;
    out << obj.dump(2) << "\n";
    return 0;
  }
  std::string csv = "t";
  for (int k = 1; k <= m.dim; ++k) csv += ",E" + std::to_string(k);
  csv += '\n';
  for (double t : grid) {
    csv += format_sci(t);
    for (double e : m.energies(t)) csv += ',' + format_sci(e);
    csv += '\n';
  }
  out << csv;
  return 0;
}

int cmd_metric_scan(const RunConfig& cfg, std::ostream& out) {
  if (cfg.figure != 0) {
    FigureTrace tr = figure_trace(cfg.figure, cfg.tol, cfg.threads);
    if (cfg.format == "csv") {
      out << csv_of_figure(tr);
    } else {
      json obj;
      obj["figure"] = tr.figure;
      obj["model"] = tr.model_id;
      obj["rhos"] = tr.rhos;
      obj["rescale"] = tr.rescale;
      obj["t"] = tr.t;
      json vals;
      for (size_t c = 0; c < tr.value_columns.size(); ++c)
        vals[tr.value_columns[c]] = tr.values[c];
      obj["values"] = vals;
      json regs;
      for (size_t c = 0; c < tr.regime_columns.size(); ++c)
        regs[tr.regime_columns[c]] = tr.regimes[c];
      obj["regimes"] = regs;
      out << obj.dump(2) << "\n";
    }
    return 0;
  }

  const ToyModel& m = model_by_id(cfg.model_id);
  const std::vector<double> grid = t_grid_of(cfg);
  std::vector<ScanReport> reports;
  for (int rho : cfg.rhos)
    reports.push_back(
        scan_model(m, rho, grid, cfg.tol, cfg.tol_t, cfg.threads, cfg.kappa));
  if (cfg.format == "csv") {
    out << csv_of_scan(reports);
  } else {
    json arr = json::array();
    for (const ScanReport& rep : reports) arr.push_back(report_to_json(rep));
    out << arr.dump(2) << "\n";
  }
  return 0;
}

int cmd_boundary(const RunConfig& cfg, std::ostream& out) {
  const ToyModel& m = model_by_id(cfg.model_id);
  const int grid_points = boundary_grid_points(cfg);
  json t_rho, transitions;
  for (int rho : cfg.rhos) {
    const std::vector<Boundary> bs = boundary_scan(
        m, rho, cfg.t_min, cfg.t_max, cfg.tol_t, grid_points, cfg.tol, cfg.kappa);
    const double exit_t = first_unitary_exit(bs, cfg.tol_t);
    const std::string key = std::to_string(rho);
    if (std::isnan(exit_t))
      t_rho[key] = nullptr;
    else
      t_rho[key] = exit_t;
    json list = json::array();
    for (const Boundary& b : bs)
      list.push_back(
          {{"t", b.t}, {"from", regime_name(b.from)}, {"to", regime_name(b.to)}});
    transitions[key] = list;
  }
  if (cfg.format == "json") {
    json obj;
    obj["model"] = m.id;
    obj["tol_t"] = cfg.tol_t;
    obj["t_rho"] = t_rho;
    obj["transitions"] = transitions;
    out << obj.dump(2) << "\n";
  } else {
    std::string csv = "rho,t_exit\n";
    for (int rho : cfg.rhos) {
      const json& v = t_rho[std::to_string(rho)];
      csv += std::to_string(rho);
      csv += ',';
      if (!v.is_null()) csv += format_sci(v.get<double>());
      csv += '\n';
    }
    out << csv;
  }
  return 0;
}

int cmd_ep_probe(const RunConfig& cfg, std::ostream& out) {
  const ToyModel& m = model_by_id(cfg.model_id);
  const EpReport rep = ep_probe(m, cfg.t_center, cfg.radius, cfg.tol);
  if (cfg.format == "json") {
    json obj;
    obj["model"] = m.id;
    obj["t_center"] = cfg.t_center;
    obj["radius"] = cfg.radius;
    obj["t_ep"] = rep.t_ep;
    obj["min_gap"] = rep.min_gap;
    obj["eigvec_condition"] = rep.eigvec_condition;
    obj["metric_rank"] = rep.metric_rank;
    obj["flagged"] = rep.flagged;
    out << obj.dump(2) << "\n";
  } else {
    std::string csv = "t_ep,min_gap,eigvec_condition,metric_rank,flagged\n";
    csv += format_sci(rep.t_ep) + ',' + format_sci(rep.min_gap) + ',' +
           format_sci(rep.eigvec_condition) + ',' + std::to_string(rep.metric_rank) +
           ',' + (rep.flagged ? "true" : "false") + '\n';
    out << csv;
  }
  return 0;
}

int cmd_evolve(const RunConfig& cfg, std::ostream& out) {
  const ToyModel& m = model_by_id(cfg.model_id);
  const int rho = cfg.rhos.front();
  const CVec psi0 = default_state(m.dim);
  PropagationRecord rec;
  if (cfg.stationary) {
    rec = propagate_stationary(m.hamiltonian(cfg.t_fixed), scan_theta(m, rho, cfg.t_fixed),
                               psi0, cfg.horizon, cfg.steps);
  } else {
    rec = propagate_nonstationary(m, rho, psi0, cfg.t0, cfg.t1, cfg.steps);
  }
  if (cfg.format == "json") {
    json obj;
    obj["model"] = m.id;
    obj["rho"] = rho;
    obj["stationary"] = cfg.stationary;
    obj["drift"] = rec.drift;
    obj["times"] = rec.times;
    obj["norms"] = rec.physical_norms;
    out << obj.dump(2) << "\n";
    return 0;
  }
  std::string csv = "time,norm";
  for (int k = 1; k <= m.dim; ++k) {
    csv += ",psi" + std::to_string(k) + "_re";
    csv += ",psi" + std::to_string(k) + "_im";
  }
  csv += '\n';
  for (size_t i = 0; i < rec.times.size(); ++i) {
    csv += format_sci(rec.times[i]);
    csv += ',' + format_sci(rec.physical_norms[i]);
    for (const cplx& z : rec.states[i]) {
      csv += ',' + format_sci(z.real());
      csv += ',' + format_sci(z.imag());
    }
    csv += '\n';
  }
  out << csv;
  return 0;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const double cap = cfg.tol_overridden ? cfg.tol : 0.0;
  const std::vector<VerifyCheck> checks =
      run_verify_suite(cfg.inject_identity_metric, cap);
  bool all = true;
  for (const VerifyCheck& c : checks) all = all && c.pass;
  if (cfg.format == "json") {
    json list = json::array();
    for (const VerifyCheck& c : checks)
      list.push_back({{"name", c.name},
                      {"pass", c.pass},
                      {"residual", c.residual},
                      {"tolerance", c.tolerance}});
    json obj;
    obj["all_pass"] = all;
    obj["checks"] = list;
    out << obj.dump(2) << "\n";
  } else {
    std::string csv = "name,pass,residual,tolerance\n";
    for (const VerifyCheck& c : checks)
      csv += c.name + ',' + (c.pass ? "true" : "false") + ',' +
             format_sci(c.residual) + ',' + format_sci(c.tolerance) + '\n';
    out << csv;
  }
  return all ? 0 : 1;
}

int run_command(const RunConfig& cfg, std::ostream& fallback, std::ostream& err) {
  try {
    validate_config(cfg);
    std::ostringstream buffer;
    int code = 0;
    if (cfg.command == "spectrum")
      code = cmd_spectrum(cfg, buffer);
    else if (cfg.command == "scan")
      code = cmd_metric_scan(cfg, buffer);
    else if (cfg.command == "boundary")
      code = cmd_boundary(cfg, buffer);
    else if (cfg.command == "ep-probe")
      code = cmd_ep_probe(cfg, buffer);
    else if (cfg.command == "evolve")
      code = cmd_evolve(cfg, buffer);
    else
      code = cmd_verify(cfg, buffer);

    if (cfg.out_path.empty()) {
      fallback << buffer.str();
    } else {
      std::ofstream file(cfg.out_path, std::ios::binary);
      if (!file) {
        err << "error: cannot open output path: " << cfg.out_path << "\n";
        return 1;
      }
      file << buffer.str();
    }
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind == Err::BadConfig ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qhm
