#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "dnilab/checks.hpp"
#include "dnilab/ou_noise.hpp"
#include "dnilab/parallel.hpp"
#include "dnilab/protocol.hpp"
#include "output.hpp"

namespace dnilab::cli {

namespace {

using models::EvolutionEngine;
using qmath::ComplexMatrix;

constexpr double kProbabilityTol = 1e-9;
constexpr double kDniAngleTol = 1e-6;
constexpr double kKDetection = 1e-13;

struct GridPoint {
  double t;
  double tau;
};

std::vector<GridPoint> grid_points(const SweepConfig& c) {
  std::vector<GridPoint> points;
  const auto ts = c.t.values();
  if (!c.tau) {
    for (double t : ts) points.push_back({t, t});
    return points;
  }
  const auto taus = c.tau->values();
  for (double t : ts)
    for (double tau : taus) points.push_back({t, tau});
  return points;
}

/// Engine plus the worker split: stochastic engines parallelize internally.
struct Runner {
  std::unique_ptr<EvolutionEngine> engine;
  std::size_t outer_threads;

  explicit Runner(const SweepConfig& c) {
    const bool mc = c.model.kind == "ou_monte_carlo";
    engine = make_engine(c.model, c.mc_samples, c.seed, mc ? c.threads : 1);
    outer_threads = mc ? 1 : c.threads;
  }

  template <class T, class Fn>
  std::vector<T> map(std::size_t count, Fn&& fn) const {
    std::vector<T> out(count);
    parallel_for(count, outer_threads, [&](std::size_t i) { out[i] = fn(i); });
    return out;
  }
};

class Violations {
 public:
  void add(const std::string& what) {
    std::lock_guard lock(mutex_);
    list_.push_back(what);
  }
  std::vector<std::string> take() {
    std::sort(list_.begin(), list_.end());
    list_.erase(std::unique(list_.begin(), list_.end()), list_.end());
    return std::move(list_);
  }

 private:
  std::mutex mutex_;
  std::vector<std::string> list_;
};

std::string point_label(const GridPoint& p) {
  return "(t=" + format_number(p.t) + ", tau=" + format_number(p.tau) + ")";
}

protocol::Scheme make_scheme(const EvolutionEngine& engine, const SweepConfig& c,
                             const GridPoint& p, const ComplexMatrix& rho0) {
  if (c.y.dni) {
    return protocol::dni_scheme(engine, p.t, p.tau, c.x.direction, c.z.direction, meas::kXAxis,
                                rho0, kDniAngleTol)
        .scheme;
  }
  return protocol::Scheme::make(p.t, p.tau, c.x.direction, c.y.direction, c.z.direction, rho0);
}

void check_total(double total, const std::string& what, const GridPoint& p, Violations& v) {
  if (!std::isfinite(total) || std::abs(total - 1.0) > kProbabilityTol) {
    v.add(what + " does not sum to 1 at " + point_label(p) + ": " + format_number(total));
  }
}

Json echo(const SweepConfig& c) {
  Json e = c.effective;
  e.erase("threads");
  e.erase("out");
  return e;
}

Json summary_base(const std::string& command, const SweepConfig& c, const EvolutionEngine& engine,
                  std::size_t points) {
  Json s;
  s["command"] = command;
  s["config"] = echo(c);
  s["config_hash"] = config_hash(c.effective);
  s["engine"] = engine.describe();
  s["points"] = points;
  s["tolerances"] = {{"tol", c.tol},
                     {"probability_sum", kProbabilityTol},
                     {"p3_clamp", 1e-12},
                     {"dni_basis_angle", kDniAngleTol}};
  return s;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void set_param(ModelConfig& m, const std::string& name, double value) {
  if (name == "chi") m.chi = value;
  else if (name == "g") m.g = value;
  else if (name == "gamma") m.gamma = value;
  else m.tau_c = value;
}

}  // namespace

RunOutput run_coherence(const SweepConfig& c) {
  Runner runner(c);
  const auto& engine = *runner.engine;
  const auto spec = model_spec(c.model);
  const auto ts = c.t.values();
  const bool stochastic = engine.is_stochastic();
  Violations violations;

  std::vector<models::CoherenceEstimate> numeric(ts.size());
  if (const auto* mc = dynamic_cast<const models::OUMonteCarloEngine*>(&engine)) {
    numeric = mc->coherence(ts);
  } else {
    ComplexMatrix plus(2, 2);
    plus.setConstant(0.5);
    numeric = runner.map<models::CoherenceEstimate>(ts.size(), [&](std::size_t i) {
      const ComplexMatrix rho = engine.evolve_system(plus, ts[i]);
      const double trace = rho.trace().real();
      if (std::abs(trace - 1.0) > kProbabilityTol) {
        violations.add("trace not preserved at t=" + format_number(ts[i]));
      }
      return models::CoherenceEstimate{2.0 * rho(0, 1).real(), 0.0};
    });
  }

  CsvWriter csv(config_hash(c.effective));
  std::vector<std::string> cols{"t", "d_analytic", "d_numeric", "abs_diff"};
  if (stochastic) cols.push_back("standard_error");
  csv.header(cols);
  double max_diff = 0.0;
  double max_sigma = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double analytic = engine.analytic_coherence(ts[i]).value_or(models::analytic_d(spec, ts[i]));
    const double d = numeric[i].mean;
    const double diff = std::abs(d - analytic);
    if (!std::isfinite(d) || std::abs(d) > 1.0 + kProbabilityTol) {
      violations.add("coherence out of range at t=" + format_number(ts[i]));
    }
    max_diff = std::max(max_diff, diff);
    std::vector<double> row{ts[i], analytic, d, diff};
    if (stochastic) {
      row.push_back(numeric[i].standard_error);
      if (numeric[i].standard_error > 0.0) {
        max_sigma = std::max(max_sigma, diff / numeric[i].standard_error);
      }
    }
    csv.row(row);
  }

  Json s = summary_base("coherence", c, engine, ts.size());
  s["max_abs_diff"] = max_diff;
  if (stochastic) s["max_abs_diff_in_standard_errors"] = max_sigma;

  RunOutput out;
  out.files = {{"coherence.csv", csv.str()}, {"coherence.json", dump(s)}};
  out.violations = violations.take();
  return out;
}

RunOutput run_invasiveness(const SweepConfig& c) {
  Runner runner(c);
  const auto& engine = *runner.engine;
  const auto points = grid_points(c);
  const auto rho0 = initial_state(c);
  Violations violations;

  struct Row {
    double theta, phi, value;
  };
  const auto rows = runner.map<Row>(points.size(), [&](std::size_t i) {
    const auto scheme = make_scheme(engine, c, points[i], rho0);
    const auto p3 = protocol::p3(engine, scheme);
    const auto p2 = protocol::p2(engine, scheme, protocol::TimePair::zero_t_tau);
    check_total(p3.total(), "P3", points[i], violations);
    check_total(p2.total(), "P2", points[i], violations);
    if (p3.clamped) violations.add("negative P3 entry at " + point_label(points[i]));
    const auto dir = scheme.obs_y.axis;
    return Row{dir.theta, dir.phi, protocol::invasiveness(protocol::marginal_zx(p3), p2)};
  });

  CsvWriter csv(config_hash(c.effective));
  csv.header({"t", "tau", "theta", "phi", "I"});
  double max_i = -1.0;
  std::size_t argmax = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    csv.row({points[i].t, points[i].tau, rows[i].theta, rows[i].phi, rows[i].value});
    if (rows[i].value > max_i) {
      max_i = rows[i].value;
      argmax = i;
    }
  }

  Json s = summary_base("invasiveness", c, engine, points.size());
  s["max_I"] = max_i;
  s["max_I_at"] = {{"t", points[argmax].t}, {"tau", points[argmax].tau}};

  RunOutput out;
  out.files = {{"invasiveness.csv", csv.str()}, {"invasiveness.json", dump(s)}};
  out.violations = violations.take();
  return out;
}

double max_equal_time_k(const models::ModelSpec& model, double t_max) {
  if (!(t_max > 0.0)) return protocol::lgi_decay(model, 0.0, 0.0);
  const auto k = [&](double t) { return protocol::lgi_decay(model, t, t); };
  constexpr std::size_t kGrid = 4000;
  const double t_min = t_max * 1e-7;
  const double ratio = std::log(t_max / t_min);
  std::vector<double> ts(kGrid);
  for (std::size_t i = 0; i < kGrid; ++i) {
    ts[i] = t_min * std::exp(ratio * static_cast<double>(i) / static_cast<double>(kGrid - 1));
  }
  ts.back() = t_max;
  std::size_t best = 0;
  double best_k = k(ts[0]);
  for (std::size_t i = 1; i < kGrid; ++i) {
    const double v = k(ts[i]);
    if (v > best_k) {
      best_k = v;
      best = i;
    }
  }
  const double a = ts[best > 0 ? best - 1 : 0];
  const double b = ts[std::min(best + 1, kGrid - 1)];
  if (b > a) {
    const auto [t_star, neg_k] = boost::math::tools::brent_find_minima(
        [&](double t) { return -k(t); }, a, b, std::numeric_limits<double>::digits / 2);
    (void)t_star;
    best_k = std::max(best_k, -neg_k);
  }
  return std::max(best_k, k(0.0));
}

ThresholdScan threshold_scan(const ModelConfig& model, const ScanConfig& scan, double t_max) {
  ModelConfig m = model;
  if (scan.n) m.n = *scan.n;
  const auto violated = [&](double value) {
    set_param(m, scan.param, value);
    return max_equal_time_k(model_spec(m), t_max) > 1.0 + kKDetection;
  };

  ThresholdScan r;
  r.n = m.n;
  constexpr std::size_t kProbes = 41;
  bool seen = false;
  r.monotone = true;
  for (std::size_t i = 0; i < kProbes; ++i) {
    const double v = scan.lo + (scan.hi - scan.lo) * static_cast<double>(i) / (kProbes - 1);
    const bool flag = violated(v);
    if (seen && !flag) r.monotone = false;
    seen = seen || flag;
  }

  double lo = scan.lo;
  double hi = scan.hi;
  if (violated(lo)) {
    r.status = "violated_at_lo";
    r.estimate = lo;
  } else if (!violated(hi)) {
    r.status = "not_violated_at_hi";
    r.estimate = hi;
  } else {
    for (std::size_t i = 0; i < scan.iterations; ++i) {
      const double mid = 0.5 * (lo + hi);
      (violated(mid) ? hi : lo) = mid;
    }
    r.status = "found";
    r.estimate = hi;
  }
  r.bracket_lo = lo;
  r.bracket_hi = hi;
  return r;
}

RunOutput run_lgi(const SweepConfig& c) {
  Runner runner(c);
  const auto& engine = *runner.engine;
  const auto spec = model_spec(c.model);
  const auto points = grid_points(c);
  const auto rho0 = initial_state(c);
  Violations violations;

  struct Row {
    double k, k_decay;
  };
  const auto rows = runner.map<Row>(points.size(), [&](std::size_t i) {
    const auto scheme = make_scheme(engine, c, points[i], rho0);
    for (auto pair : {protocol::TimePair::zero_t, protocol::TimePair::t_t_tau,
                      protocol::TimePair::zero_t_tau}) {
      check_total(protocol::p2(engine, scheme, pair).total(), "P2 " + protocol::to_string(pair),
                  points[i], violations);
    }
    const auto lgi = protocol::lgi_from_engine(engine, scheme);
    return Row{lgi.k, protocol::lgi_decay(spec, points[i].t, points[i].tau)};
  });

  CsvWriter csv(config_hash(c.effective));
  csv.header({"t", "tau", "K", "K_decay"});
  double max_k = -std::numeric_limits<double>::infinity();
  std::size_t argmax = 0;
  std::size_t violated = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    csv.row({points[i].t, points[i].tau, rows[i].k, rows[i].k_decay});
    if (rows[i].k > max_k) {
      max_k = rows[i].k;
      argmax = i;
    }
    if (protocol::lgi_value(rows[i].k, 0.0, 0.0, c.tol).violated) ++violated;
  }

  Json s = summary_base("lgi", c, engine, points.size());
  s["max_K"] = max_k;
  s["max_K_at"] = {{"t", points[argmax].t}, {"tau", points[argmax].tau}};
  s["violated_points"] = violated;
  if (c.scan) {
    const auto r = threshold_scan(c.model, *c.scan, c.t.stop);
    s["threshold_scan"] = {{"param", c.scan->param},
                           {"n", r.n},
                           {"status", r.status},
                           {"estimate", r.estimate},
                           {"bracket", {r.bracket_lo, r.bracket_hi}},
                           {"monotone", r.monotone},
                           {"criterion", "max_t K(t,t) > 1 + 1e-13 from the closed-form decay"}};
  }

  RunOutput out;
  out.files = {{"lgi.csv", csv.str()}, {"lgi.json", dump(s)}};
  out.violations = violations.take();
  return out;
}

RunOutput run_p3_dump(const SweepConfig& c) {
  Runner runner(c);
  const auto& engine = *runner.engine;
  const auto points = grid_points(c);
  const auto rho0 = initial_state(c);
  Violations violations;

  struct Row {
    double theta, phi;
    protocol::JointDist3 p3;
  };
  const auto rows = runner.map<Row>(points.size(), [&](std::size_t i) {
    const auto scheme = make_scheme(engine, c, points[i], rho0);
    auto p3 = protocol::p3(engine, scheme);
    check_total(p3.total(), "P3", points[i], violations);
    if (p3.clamped) violations.add("negative P3 entry at " + point_label(points[i]));
    return Row{scheme.obs_y.axis.theta, scheme.obs_y.axis.phi, p3};
  });

  CsvWriter csv(config_hash(c.effective));
  csv.header({"t", "tau", "theta", "phi", "z", "y", "x", "p", "standard_error"});
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (auto z : meas::kOutcomes)
      for (auto y : meas::kOutcomes)
        for (auto x : meas::kOutcomes) {
          const auto k = protocol::JointDist3::index(z, y, x);
          csv.row({points[i].t, points[i].tau, rows[i].theta, rows[i].phi,
                   static_cast<double>(meas::sign(z)), static_cast<double>(meas::sign(y)),
                   static_cast<double>(meas::sign(x)), rows[i].p3.p[k],
                   rows[i].p3.standard_error[k]});
        }
  }

  Json s = summary_base("p3-dump", c, engine, points.size());
  RunOutput out;
  out.files = {{"p3.csv", csv.str()}, {"p3.json", dump(s)}};
  out.violations = violations.take();
  return out;
}

RunOutput run_checks(const SweepConfig& c) {
  Runner runner(c);
  const auto& engine = *runner.engine;
  const auto points = grid_points(c);
  const auto rho0 = initial_state(c);
  const auto* bipartite = dynamic_cast<const models::BipartiteEngine*>(&engine);
  const auto test_states = checks::default_test_states();
  const auto pauli = checks::pauli_test_states();
  Violations violations;

  struct Row {
    double factorization = 0.0, invasiveness = 0.0, propagator = 0.0, superclassicality = 0.0,
           discord = 0.0, cp = 0.0, trace = 0.0;
  };
  const auto rows = runner.map<Row>(points.size(), [&](std::size_t i) {
    const auto& p = points[i];
    Row r;
    const auto scheme = make_scheme(engine, c, p, rho0);
    r.factorization = protocol::markov_factorization_distance(engine, scheme).distance;
    r.invasiveness = protocol::invasiveness(engine, scheme);
    if (bipartite) {
      r.propagator = checks::markov_propagator_condition(*bipartite, p.t, p.tau);
      r.superclassicality = checks::superclassicality_deviation(*bipartite, test_states, p.t, p.tau);
      for (const auto& rho : pauli) {
        r.discord = std::max(r.discord, checks::discord_condition_norm(*bipartite, rho, p.t));
      }
    }
    for (double t : {p.t, p.t + p.tau}) {
      const auto report = checks::channel_report(engine, t);
      r.cp = std::max(r.cp, -report.min_choi_eigenvalue);
      r.trace = std::max(r.trace, report.trace_error);
    }
    return r;
  });

  Row worst;
  for (const auto& r : rows) {
    worst.factorization = std::max(worst.factorization, r.factorization);
    worst.invasiveness = std::max(worst.invasiveness, r.invasiveness);
    worst.propagator = std::max(worst.propagator, r.propagator);
    worst.superclassicality = std::max(worst.superclassicality, r.superclassicality);
    worst.discord = std::max(worst.discord, r.discord);
    worst.cp = std::max(worst.cp, r.cp);
    worst.trace = std::max(worst.trace, r.trace);
  }
  worst.cp = std::max(worst.cp, 0.0);

  Json list = Json::array();
  const auto add = [&](const std::string& name, double value) {
    list.push_back({{"name", name},
                    {"max_deviation", value},
                    {"pass", value <= c.tol},
                    {"tolerance", c.tol}});
  };
  add("factorization_distance", worst.factorization);
  add("invasiveness", worst.invasiveness);
  if (bipartite) {
    add("propagator_condition", worst.propagator);
    add("superclassicality", worst.superclassicality);
    add("discord_condition", worst.discord);
  }
  add("complete_positivity", worst.cp);
  add("trace_preservation", worst.trace);
  if (worst.cp > c.tol) violations.add("reconstructed propagator is not completely positive");
  if (worst.trace > c.tol) violations.add("reconstructed propagator is not trace preserving");

  Json s = summary_base("checks", c, engine, points.size());
  s["checks"] = list;
  if (!bipartite) {
    s["skipped"] = {"propagator_condition", "superclassicality", "discord_condition"};
  }

  RunOutput out;
  out.files = {{"checks.json", dump(s)}};
  out.violations = violations.take();
  return out;
}

std::string csv_to_svg(const std::string& csv_text, const std::string& x_column,
                       const std::vector<std::string>& y_columns) {
  std::istringstream in(csv_text);
  std::string line;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  const auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) parts.push_back(cell);
    return parts;
  };
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header.empty()) {
      header = split(line);
      continue;
    }
    std::vector<double> row;
    for (const auto& cell : split(line)) row.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(row);
  }
  const auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw UsageError("svg: no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t xi = column(x_column);
  std::vector<std::size_t> yi;
  for (const auto& y : y_columns) yi.push_back(column(y));
  if (rows.empty()) throw UsageError("svg: no data rows");

  double x0 = rows[0][xi], x1 = x0, y0 = rows[0][yi[0]], y1 = y0;
  for (const auto& r : rows) {
    x0 = std::min(x0, r[xi]);
    x1 = std::max(x1, r[xi]);
    for (auto k : yi) {
      y0 = std::min(y0, r[k]);
      y1 = std::max(y1, r[k]);
    }
  }
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + 1.0;

  constexpr double kW = 640, kH = 400, kPad = 50;
  const auto px = [&](double x) { return kPad + (x - x0) / (x1 - x0) * (kW - 2 * kPad); };
  const auto py = [&](double y) { return kH - kPad - (y - y0) / (y1 - y0) * (kH - 2 * kPad); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\">\n";
  svg += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  svg += "<polyline fill=\"none\" stroke=\"black\" points=\"50,50 50,350 590,350\"/>\n";
  svg += "<text x=\"50\" y=\"370\" font-size=\"12\">" + format_number(x0) + "</text>\n";
  svg += "<text x=\"560\" y=\"370\" font-size=\"12\">" + format_number(x1) + "</text>\n";
  svg += "<text x=\"5\" y=\"354\" font-size=\"12\">" + format_number(y0) + "</text>\n";
  svg += "<text x=\"5\" y=\"54\" font-size=\"12\">" + format_number(y1) + "</text>\n";
  svg += "<text x=\"300\" y=\"390\" font-size=\"12\">" + x_column + "</text>\n";
  for (std::size_t s = 0; s < yi.size(); ++s) {
    const char* color = colors[s % 5];
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" points=\"";
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r) svg += ' ';
      svg += format_number(std::round(px(rows[r][xi]) * 100) / 100) + "," +
             format_number(std::round(py(rows[r][yi[s]]) * 100) / 100);
    }
    svg += "\"/>\n";
    svg += "<text x=\"" + format_number(kW - 120) + "\" y=\"" + format_number(20 + 14.0 * s) +
           "\" font-size=\"12\" fill=\"" + color + "\">" + y_columns[s] + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace dnilab::cli
