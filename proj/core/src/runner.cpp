#include "qcfb/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "qcfb/coefficients.hpp"
#include "qcfb/errors.hpp"
#include "qcfb/fock.hpp"
#include "qcfb/observables.hpp"
#include "qcfb/validation_oracle.hpp"

namespace qcfb::netlist {

using json = nlohmann::ordered_json;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// short form for the human summary
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Matrix mode_state(const InitialState& s, int dim) {
  switch (s.kind) {
    case InitialState::Kind::Vacuum:
      return projector(fock_ket(dim, 0));
    case InitialState::Kind::Fock:
      return projector(fock_ket(dim, s.n));
    case InitialState::Kind::Coherent:
      return projector(coherent_ket(dim, s.alpha));
    case InitialState::Kind::Thermal:
      return thermal_state(dim, s.nbar);
  }
  return {};
}

struct Table {
  std::string task;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string write_table(const Table& tab, const std::string& hash, const RunOptions& opts) {
  std::ostringstream os;
  std::string name;
  if (opts.format == Format::Csv) {
    name = tab.task + ".csv";
    os << "# qcfb " << tab.task << " manifest_hash=" << hash << "\n";
    for (std::size_t i = 0; i < tab.columns.size(); ++i) os << (i ? "," : "") << tab.columns[i];
    os << "\n";
    for (const auto& row : tab.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << num(row[i]);
      os << "\n";
    }
  } else {
    name = tab.task + ".json";
    json j;
    j["task"] = tab.task;
    j["manifest_hash"] = hash;
    j["columns"] = tab.columns;
    json rows = json::array();
    for (const auto& row : tab.rows) {
      json r = json::array();
      for (double v : row) r.push_back(std::isnan(v) ? json(nullptr) : json(v));
      rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    os << j.dump(1) << "\n";
  }
  std::ofstream f(opts.out_dir / name, std::ios::binary);
  f << os.str();
  if (!f) throw Error("cannot write " + (opts.out_dir / name).string());
  return name;
}

std::vector<double> linspace(double hi, int n) {
  std::vector<double> g(n);
  for (int k = 0; k < n; ++k) g[k] = hi * k / (n - 1);
  return g;
}

std::string dual(double omega) {
  return fmt(omega) + " rad/us = " + fmt(rad_per_us_to_mhz_over_2pi(omega)) + " MHz/2pi";
}

std::string dual(Complex c) {
  if (std::abs(c.imag()) <= 1e-14 * std::abs(c.real())) return dual(c.real());
  return "(" + fmt(c.real()) + ", " + fmt(c.imag()) + ") rad/us = (" + fmt(rad_per_us_to_mhz_over_2pi(c.real())) +
         ", " + fmt(rad_per_us_to_mhz_over_2pi(c.imag())) + ") MHz/2pi";
}

std::string monomial_text(const OperatorExpr& x, const Monomial& m) {
  if (m.is_identity()) return "1";
  std::string s = OperatorExpr::term(x.registry(), m, 1.0).to_string();
  return s.substr(s.find('*') + 1);
}

void describe_model(const EffectiveModel& m, std::ostream& os) {
  os << "effective model\n  H_eff:\n";
  for (const auto& [mono, c] : m.H_eff.terms()) os << "    " << monomial_text(m.H_eff, mono) << "  " << dual(c) << "\n";
  if (m.H_eff.is_zero()) os << "    0\n";
  os << "  channels: " << m.channels.size() << "\n";
  for (const auto& ch : m.channels) {
    os << "    rate x" << fmt(ch.rate_prefactor) << "  ";
    if (const auto* s = std::get_if<SqueezedBath>(&ch.bath))
      os << "squeezed N=" << fmt(s->N) << " M=(" << fmt(s->M.real()) << ", " << fmt(s->M.imag()) << ")";
    else
      os << "vacuum";
    os << "  L = " << ch.op.to_string() << "  [sqrt(rad/us)]\n";
  }
}

// gamma if x = sqrt(gamma) * n on a single mode
std::optional<std::pair<std::size_t, double>> number_rate(const OperatorExpr& x) {
  if (x.size() != 1) return std::nullopt;
  const auto& [m, c] = *x.terms().begin();
  for (std::size_t i = 0; i < m.num_modes(); ++i)
    if (m[i].creation == 1 && m[i].annihilation == 1 && m.degree() == 2) return std::make_pair(i, std::norm(c));
  return std::nullopt;
}

template <class F>
auto in_task(const std::string& task, Location loc, F&& f) {
  const std::string where = to_string(loc) + ": task " + task + ": ";
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ValidationError(where + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(where + e.what());
  }
}

}  // namespace

Matrix initial_density(const Resolved& r) {
  const auto& reg = *r.registry;
  const std::size_t obs = reg.index(r.run.observe);
  Matrix rho;
  for (std::size_t i = 0; i < reg.size(); ++i) {
    const int d = reg.mode(i).truncation;
    Matrix m = i == obs ? mode_state(r.run.initial, d) : projector(fock_ket(d, 0));
    rho = i == 0 ? m : kron(rho, m);
  }
  return rho;
}

Trajectory evolve(const Resolved& r, const Liouvillian& liou, const IntegratorOptions& opts) {
  Trajectory tr;
  tr.t = linspace(r.run.t_max, r.run.n_points);
  Integrator integ(opts);
  tr.states = integ.integrate(liou, DensityMatrix(initial_density(r)), tr.t);
  tr.stats = integ.stats();
  tr.max_leak.assign(r.registry->size(), 0.0);
  for (const auto& s : tr.states) {
    const auto leak = truncation_leak(s.matrix(), *r.registry);
    for (std::size_t i = 0; i < leak.size(); ++i) tr.max_leak[i] = std::max(tr.max_leak[i], leak[i]);
  }
  return tr;
}

Stationary stationary(const Liouvillian& liou) {
  SteadyStateInfo info;
  DensityMatrix rho = steady_state(liou, {}, &info);
  return {std::move(rho), info};
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return 2;
  if (dynamic_cast<const ValidationError*>(&e)) return 3;
  if (dynamic_cast<const NumericalError*>(&e)) return 4;
  return 1;
}

std::vector<std::string> run(const Netlist& n, const RunOptions& opts) {
  const std::string canonical = print(n);
  const std::string hash = fnv1a_hex(canonical);
  const Resolved r = resolve(n);
  const auto& reg = *r.registry;
  const RunConfig& rc = r.run;
  const std::size_t obs = reg.index(rc.observe);
  std::filesystem::create_directories(opts.out_dir);

  std::vector<std::string> artifacts;
  std::ostringstream sum;
  json manifest;
  {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char ts[32];
    std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    manifest["timestamp"] = ts;
  }
  manifest["netlist"] = opts.netlist_path;
  manifest["manifest_hash"] = hash;
  manifest["seed"] = opts.seed;
  manifest["tasks"] = rc.tasks;

  json modes = json::array();
  for (const auto& m : reg.modes()) modes.push_back({{"label", m.label}, {"truncation", m.truncation}});
  manifest["modes"] = modes;
  json loops = json::array();
  for (const auto& l : r.loops) {
    const auto& s = l.spec;
    loops.push_back({{"id", l.id},
                     {"theta", s.theta},
                     {"L", s.L.to_string()},
                     {"L_f", s.L_f.to_string()},
                     {"G0", s.amp.G0()},
                     {"r0", s.amp.r0()},
                     {"kappa_rad_per_us", l.from_gain ? json(nullptr) : json(s.amp.kappa())},
                     {"xi_rad_per_us", l.from_gain ? json(nullptr) : json(s.amp.xi())},
                     {"N", s.amp.N()},
                     {"M", s.amp.M()},
                     {"A_sqrt_rad_per_us", s.A},
                     {"phi", s.phi}});
  }
  manifest["loops"] = loops;
  manifest["plant_H"] = r.plant_H.to_string();
  manifest["run"] = {{"t_max_us", rc.t_max},       {"n_points", rc.n_points},
                     {"observe", rc.observe},      {"compensate_linear", rc.compensate_linear},
                     {"high_gain", rc.high_gain},  {"tau_max_us", rc.tau_max},
                     {"tau_points", rc.tau_points}};

  sum << "qcfb run  manifest_hash " << hash << "\n";
  sum << "modes:";
  for (const auto& m : reg.modes()) sum << " " << m.label << "(" << m.truncation << ")";
  sum << "\nobserved mode: " << rc.observe << "\n\n";

  const EffectiveModel model = r.model();
  describe_model(model, sum);
  manifest["effective_model"] = {{"H_eff", model.H_eff.to_string()}, {"channels", model.channels.size()}};

  auto wants = [&](std::string_view t) { return std::find(rc.tasks.begin(), rc.tasks.end(), t) != rc.tasks.end(); };
  const bool dynamics = wants("evolve") || wants("fano") || wants("nongauss") || wants("steady") || wants("g2");
  std::optional<Liouvillian> liou;
  if (dynamics) liou = in_task("build", rc.loc, [&] { return build_liouvillian(model, reg); });

  if (wants("evolve") || wants("fano") || wants("nongauss")) {
    const Trajectory tr = in_task("evolve", rc.loc, [&] { return evolve(r, *liou); });
    const auto& st = tr.stats;
    manifest["integrator"] = {{"accepted", st.accepted},
                              {"rejected", st.rejected},
                              {"evaluations", st.evaluations},
                              {"h_smallest_us", st.h_smallest},
                              {"h_largest_us", st.h_largest},
                              {"max_trace_drift", st.max_trace_drift},
                              {"min_eigenvalue", st.min_eigenvalue},
                              {"max_hermiticity_error", st.max_hermiticity_error},
                              {"clipped_outputs", st.clipped_outputs}};
    json leak = json::object();
    for (std::size_t i = 0; i < reg.size(); ++i) {
      leak[reg.mode(i).label] = tr.max_leak[i];
      if (tr.max_leak[i] > 1e-6)
        spdlog::warn("mode '{}' reaches truncation leak {:.3g}; raise its truncation", reg.mode(i).label,
                     tr.max_leak[i]);
    }
    manifest["truncation_leak"] = leak;
    sum << "\ntrajectory: " << tr.t.size() << " points to t = " << fmt(rc.t_max) << " us\n";
    sum << "  integrator: " << st.accepted << " accepted, " << st.rejected << " rejected steps; max |tr-1| "
        << fmt(st.max_trace_drift) << "; min eigenvalue " << fmt(st.min_eigenvalue) << "\n";
    for (std::size_t i = 0; i < reg.size(); ++i)
      sum << "  max truncation leak " << reg.mode(i).label << ": " << fmt(tr.max_leak[i]) << "\n";

    if (wants("evolve")) {
      Table tab{"evolve", {"t_us"}, {}};
      for (const auto& m : reg.modes()) tab.columns.push_back("n_" + m.label);
      tab.columns.insert(tab.columns.end(), {"trace_error", "min_eigenvalue"});
      for (const auto& m : reg.modes()) tab.columns.push_back("leak_" + m.label);
      for (std::size_t k = 0; k < tr.t.size(); ++k) {
        const Matrix& rho = tr.states[k].matrix();
        std::vector<double> row{tr.t[k]};
        for (std::size_t i = 0; i < reg.size(); ++i) row.push_back(mean_photon_number(rho, reg, i));
        row.push_back(tr.states[k].trace_error());
        row.push_back(tr.states[k].min_eigenvalue());
        for (double l : truncation_leak(rho, reg)) row.push_back(l);
        tab.rows.push_back(std::move(row));
      }
      artifacts.push_back(write_table(tab, hash, opts));
    }
    if (wants("fano")) {
      Table tab{"fano", {"t_us", "n", "fano"}, {}};
      double fmin = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < tr.t.size(); ++k) {
        const auto f = fano_factor(tr.states[k].matrix(), reg, obs);
        const double v = f.value_or(std::numeric_limits<double>::quiet_NaN());
        if (f) fmin = std::min(fmin, *f);
        tab.rows.push_back({tr.t[k], mean_photon_number(tr.states[k].matrix(), reg, obs), v});
      }
      const auto last = fano_factor(tr.states.back().matrix(), reg, obs);
      sum << "task fano: F(t_max) = " << (last ? fmt(*last) : "undefined (<n> = 0)") << ", min over trajectory "
          << fmt(fmin) << "\n";
      artifacts.push_back(write_table(tab, hash, opts));
    }
    if (wants("nongauss")) {
      Table tab{"nongauss", {"t_us", "delta"}, {}};
      double peak = -1, t_peak = 0;
      for (std::size_t k = 0; k < tr.t.size(); ++k) {
        const double d = non_gaussianity(tr.states[k].matrix(), reg, obs);
        if (d > peak) {
          peak = d;
          t_peak = tr.t[k];
        }
        tab.rows.push_back({tr.t[k], d});
      }
      sum << "task nongauss: peak delta " << fmt(peak) << " at t = " << fmt(t_peak) << " us\n";
      manifest["nongauss_peak"] = {{"delta", peak}, {"t_us", t_peak}};
      artifacts.push_back(write_table(tab, hash, opts));
    }
  }

  std::optional<Stationary> ss;
  if (wants("steady") || wants("g2")) {
    ss = in_task("steady", rc.loc, [&] { return stationary(*liou); });
    const Matrix& rho = ss->rho.matrix();
    const auto f = fano_factor(rho, reg, obs);
    const double nbar = mean_photon_number(rho, reg, obs);
    const double d = non_gaussianity(rho, reg, obs);
    const auto leak = truncation_leak(rho, reg);
    sum << "\nsteady state (" << (ss->info.dense ? "dense" : "sparse") << " solver, residual "
        << fmt(ss->info.residual) << "):\n  <n> = " << fmt(nbar) << "\n  F = " << (f ? fmt(*f) : "undefined")
        << "\n  delta = " << fmt(d) << "\n";
    json leakj = json::object();
    for (std::size_t i = 0; i < reg.size(); ++i) leakj[reg.mode(i).label] = leak[i];
    manifest["steady_state"] = {{"n", nbar},
                                {"fano", f ? json(*f) : json(nullptr)},
                                {"delta", d},
                                {"residual", ss->info.residual},
                                {"gap", ss->info.gap},
                                {"truncation_leak", leakj}};
  }
  if (wants("g2")) {
    const auto tau = linspace(rc.tau_max, rc.tau_points);
    const auto g = in_task("g2", rc.loc, [&] { return g2(*liou, ss->rho, reg, obs, tau); });
    Table tab{"g2", {"tau_us", "tau_over_tau_star", "g2"}, {}};
    bool anti = false;
    for (std::size_t k = 0; k < tau.size(); ++k) {
      tab.rows.push_back({tau[k], tau[k] / kTauStar, g[k]});
      if (k > 0 && g[k] > g[0]) anti = true;
    }
    sum << "task g2: g2(0) = " << fmt(g[0]) << ", g2(tau) > g2(0) somewhere: " << (anti ? "yes" : "no") << "\n";
    manifest["g2"] = {{"g2_0", g[0]}, {"antibunching", anti}};
    artifacts.push_back(write_table(tab, hash, opts));
  }

  if (wants("kerr-coeffs")) {
    Table tab{"kerr_coeffs", {"name", "rad_per_us", "MHz_over_2pi"}, {}};
    std::vector<std::string> names;
    auto add = [&](const std::string& name, double omega) {
      names.push_back(name);
      tab.rows.push_back({static_cast<double>(tab.rows.size()), omega, rad_per_us_to_mhz_over_2pi(omega)});
    };
    sum << "\ntask kerr-coeffs:\n";
    for (const auto& l : r.loops) {
      const auto& s = l.spec;
      const auto L = number_rate(s.L), Lf = number_rate(s.L_f);
      if (!L || !Lf) {
        sum << "  loop " << l.id << ": L and L_f are not of the form sqrt(gamma) n, skipped\n";
        continue;
      }
      const double G0 = s.amp.G0();
      const auto hg = in_task("kerr-coeffs", l.loc, [&] { return high_gain_limit(s); });
      if (L->first == Lf->first) {
        const std::size_t m = L->first;
        const std::string lab = reg.mode(m).label;
        const double gamma = L->second;
        const auto kc = kerr_coefficients(G0, gamma, s.A);
        const double omega = number_polynomial(r.plant_H, m).size() > 1 ? number_polynomial(r.plant_H, m)[1].real() : 0.0;
        const auto poly = number_polynomial(hg.H_eff, m);
        const double c1 = poly.size() > 1 ? poly[1].real() : 0.0, c2 = poly.size() > 2 ? poly[2].real() : 0.0;
        sum << "  loop " << l.id << " (Kerr on " << lab << "), gamma = " << dual(gamma) << ", G0 = " << fmt(G0)
            << "\n    closed form: chi = " << dual(kc.chi) << "\n                 delta = " << dual(kc.delta)
            << "\n                 omega_a - delta = " << dual(omega - kc.delta)
            << "\n    high-gain pipeline, H_eff = c1 N + c2 N^2 + ...:\n                 c2 = " << dual(c2)
            << "\n                 c1 = " << dual(c1) << "\n";
        add(l.id + ".chi", kc.chi);
        add(l.id + ".delta", kc.delta);
        add(l.id + ".omega_minus_delta", omega - kc.delta);
        add(l.id + ".pipeline_N2", c2);
        add(l.id + ".pipeline_N", c1);
      } else {
        const double ga = L->second, gb = Lf->second;
        const double chi = cross_kerr_coefficient(G0, ga, gb);
        Monomial mono(reg.size());
        mono[L->first] = {1, 1};
        mono[Lf->first] = {1, 1};
        const double pipe = hg.H_eff.coefficient(mono).real();
        sum << "  loop " << l.id << " (cross-Kerr " << reg.mode(L->first).label << "-" << reg.mode(Lf->first).label
            << "), G0 = " << fmt(G0) << "\n    closed form: chi_ab = " << dual(chi)
            << "\n    high-gain pipeline N_a N_b coefficient = " << dual(pipe) << "\n";
        add(l.id + ".chi_ab", chi);
        add(l.id + ".pipeline_NaNb", pipe);
      }
    }
    // the name column is textual; write it by hand
    std::ostringstream os;
    std::string file;
    if (opts.format == Format::Csv) {
      file = "kerr_coeffs.csv";
      os << "# qcfb kerr-coeffs manifest_hash=" << hash << "\nname,rad_per_us,MHz_over_2pi\n";
      for (std::size_t k = 0; k < names.size(); ++k)
        os << names[k] << "," << num(tab.rows[k][1]) << "," << num(tab.rows[k][2]) << "\n";
    } else {
      file = "kerr_coeffs.json";
      json j{{"task", "kerr-coeffs"}, {"manifest_hash", hash}, {"columns", tab.columns}};
      json rows = json::array();
      for (std::size_t k = 0; k < names.size(); ++k) rows.push_back({names[k], tab.rows[k][1], tab.rows[k][2]});
      j["rows"] = rows;
      os << j.dump(1) << "\n";
    }
    std::ofstream(opts.out_dir / file, std::ios::binary) << os.str();
    artifacts.push_back(file);
  }

  if (wants("quartic-coeffs")) {
    const auto& q = *r.quartic;
    const auto& c = q.coeffs;
    sum << "\ntask quartic-coeffs (mode " << q.mode << "):\n"
        << "  chi1 = " << dual(c.chi1) << "\n  chi2 = " << dual(c.chi2) << "\n  chi3 = " << dual(c.chi3)
        << "\n  chi4 = " << dual(c.chi4) << "\n  G2 = " << fmt(c.G2) << "\n  A2 = " << fmt(c.A2)
        << " sqrt(rad/us), A2^2 = " << dual(c.A2 * c.A2) << "\n";
    std::ostringstream os;
    os << "# qcfb quartic-coeffs manifest_hash=" << hash << "\nname,rad_per_us,MHz_over_2pi\n";
    const std::pair<const char*, double> rows[] = {{"chi1", c.chi1}, {"chi2", c.chi2}, {"chi3", c.chi3}, {"chi4", c.chi4}};
    json jrows = json::array();
    for (const auto& [name, v] : rows) {
      os << name << "," << num(v) << "," << num(rad_per_us_to_mhz_over_2pi(v)) << "\n";
      jrows.push_back({name, v, rad_per_us_to_mhz_over_2pi(v)});
    }
    std::string file = "quartic_coeffs.csv";
    std::string body = os.str();
    if (opts.format == Format::Json) {
      file = "quartic_coeffs.json";
      json j{{"task", "quartic-coeffs"},
             {"manifest_hash", hash},
             {"columns", {"name", "rad_per_us", "MHz_over_2pi"}},
             {"rows", jrows}};
      body = j.dump(1) + "\n";
    }
    std::ofstream(opts.out_dir / file, std::ios::binary) << body;
    artifacts.push_back(file);
  }

  if (wants("oracle-sweep")) {
    const auto& l = r.loops.front();
    const std::string plant = reg.mode(0).label;
    auto ext = ModeRegistry::create({{plant, rc.plant_truncation}, {l.spec.amp_mode, rc.amp_truncation}});
    FeedbackLoopSpec s = l.spec;
    s.plant_H = remap(s.plant_H, ext);
    s.L = remap(s.L, ext);
    s.L_f = remap(s.L_f, ext);
    OracleConfig cfg;
    cfg.plant_truncation = rc.plant_truncation;
    cfg.amp_truncation = rc.amp_truncation;
    cfg.plant_initial = mode_state(rc.initial, rc.plant_truncation);
    cfg.leak_threshold = rc.leak_threshold;
    const auto table = in_task("oracle-sweep", l.loc,
                               [&] { return elimination_error(s, rc.gamma_ref, rc.kappa_ratios, rc.t_probe, cfg); });
    Table tab{"oracle", {"kappa_over_gamma", "trace_distance"}, {}};
    sum << "\ntask oracle-sweep: r0 = " << fmt(s.amp.r0()) << ", gamma_ref = " << dual(rc.gamma_ref)
        << ", t_probe = " << fmt(rc.t_probe) << " us\n";
    json rows = json::array();
    for (const auto& [ratio, td] : table.rows) {
      tab.rows.push_back({ratio, td});
      sum << "  kappa/gamma = " << fmt(ratio) << "  trace distance " << fmt(td) << "\n";
      rows.push_back({ratio, td});
    }
    sum << "  verdict: " << table.verdict << "\n";
    manifest["oracle"] = {{"rows", rows}, {"verdict", table.verdict}};
    artifacts.push_back(write_table(tab, hash, opts));
  }

  manifest["artifacts"] = artifacts;
  std::ofstream(opts.out_dir / "summary.txt", std::ios::binary) << sum.str();
  std::ofstream(opts.out_dir / "manifest.json", std::ios::binary) << manifest.dump(2) << "\n";
  std::ofstream(opts.out_dir / "netlist.canonical", std::ios::binary) << canonical;
  artifacts.insert(artifacts.begin(), {"summary.txt", "manifest.json", "netlist.canonical"});
  return artifacts;
}

}  // namespace qcfb::netlist
