#include "stacost/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "stacost/jaynes_cummings.hpp"
#include "stacost/landau_zener.hpp"
#include "stacost/oc_optimizer.hpp"
#include "stacost/oscillator.hpp"
#include "stacost/parallel.hpp"

namespace stacost {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::map<std::string, std::vector<std::string>>& model_protocols() {
  static const std::map<std::string, std::vector<std::string>> table{
      {"lz", {"bare", "cd", "lcd", "bob", "oc", "cd-optimal"}},
      {"oscillator", {"bare", "cd", "lcd", "ie"}},
      {"jc", {"bare", "cd", "lcd"}},
  };
  return table;
}

std::vector<std::string> default_protocols(const std::string& model) {
  if (model == "lz") return {"bare", "cd", "lcd", "bob"};
  return model_protocols().at(model);
}

/// Reads keys of one JSON object and rejects the ones nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw std::invalid_argument(where() + "expected an object");
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <class T>
  void get(const std::string& key, T& out) {
    const json* v = find(key);
    if (!v) return;
    if constexpr (std::is_arithmetic_v<T> && !std::is_same_v<T, bool>) {
      if (!v->is_number()) throw std::invalid_argument(where() + key + ": expected a number");
    }
    try {
      out = v->get<T>();
    } catch (const json::exception& e) {
      throw std::invalid_argument(where() + key + ": " + e.what());
    }
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key()))
        throw std::invalid_argument("unknown config key '" + path_ + item.key() + "'");
  }

  std::string where() const { return path_.empty() ? "config: " : path_; }
  const std::string& path() const { return path_; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

DurationGrid grid_from_json(const json& j) {
  DurationGrid g;
  if (j.is_array()) {
    for (const auto& v : j) {
      if (!v.is_number()) throw std::invalid_argument("scan: durations must be numbers");
      g.values.push_back(v.get<double>());
    }
    return g;
  }
  ObjectReader r(j, "scan.");
  r.get("from", g.from);
  r.get("to", g.to);
  r.get("points", g.points);
  std::string spacing = "log";
  r.get("spacing", spacing);
  if (spacing != "log" && spacing != "linear")
    throw std::invalid_argument("scan.spacing must be 'log' or 'linear'");
  g.log_spacing = spacing == "log";
  r.finish();
  return g;
}

json grid_to_json(const DurationGrid& g) {
  if (!g.values.empty() || g.points <= 0) return g.values;
  return {{"from", g.from}, {"to", g.to}, {"points", g.points},
          {"spacing", g.log_spacing ? "log" : "linear"}};
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string duration_label(double tau) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", tau);
  return std::string("tau_") + buf;
}

std::vector<double> uniform_times(double duration, std::size_t points) {
  points = std::max<std::size_t>(points, 2);
  std::vector<double> t(points);
  for (std::size_t i = 0; i < points; ++i)
    t[i] = duration * static_cast<double>(i) / static_cast<double>(points - 1);
  t.back() = duration;
  return t;
}

bool has(const std::vector<std::string>& list, const std::string& item) {
  return std::find(list.begin(), list.end(), item) != list.end();
}

/// CSV with a metadata comment line and a header row; numbers are printed with %.12g.
class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& meta, const std::vector<std::string>& header)
      : out_(path) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out_ << "# " << meta << '\n';
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

struct RunContext {
  const ExperimentConfig& cfg;
  fs::path dir;
  std::string meta;
  RunReport report;

  CsvWriter csv(const std::string& name, const std::vector<std::string>& header) {
    report.files.push_back(dir / name);
    return CsvWriter(dir / name, meta, header);
  }
  void fail(std::string cell, std::string message) {
    report.failures.push_back({std::move(cell), std::move(message)});
  }
};

json nan_to_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---------------------------------------------------------------- Landau-Zener

LzConfig lz_config(const ExperimentConfig& cfg, double duration) {
  LzConfig c;
  c.gap = cfg.lz.gap;
  c.g0 = cfg.lz.g0;
  c.g1 = cfg.lz.g1;
  c.duration = duration;
  return c;
}

Ramp lz_optimal_ramp(const ExperimentConfig& cfg, double duration) {
  return optimal_cd_ramp(cfg.lz.gap, cfg.lz.g0, cfg.lz.g1, duration, cfg.lz.epsilon,
                         cfg.lz.steepness);
}

void run_lz_model(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const LzConfig base = lz_config(cfg, 1.0);
  const double qsl = qsl_time(base);
  json& summary = ctx.report.summary;
  summary["qsl_time"] = qsl;

  std::optional<BobKicks> bob;
  if (has(cfg.protocols, "bob")) {
    bob = optimize_bob_kicks(lz_config(cfg, qsl), cfg.lz.bob_amplitude);
    const Ramp ramp = bob->ramp();
    summary["bob"] = {{"phi1", bob->phi1},
                      {"phi2", bob->phi2},
                      {"duration", bob->duration},
                      {"fidelity", bob->fidelity},
                      {"success", bob->success},
                      {"cost", integrated_cost(lz_bare(cfg.lz.gap, ramp), 20000)},
                      {"kick_cost", bob_kick_cost(cfg.lz.gap, ramp)}};
  }

  std::vector<std::pair<std::string, double>> trajectories;
  if (cfg.trajectory_at_qsl) trajectories.emplace_back("tau_qsl", qsl);
  for (double tau : cfg.trajectory_durations) trajectories.emplace_back(duration_label(tau), tau);

  for (const auto& [label, tau] : trajectories) {
    const LzConfig c = lz_config(cfg, tau);
    const Ramp quintic = c.quintic_ramp();
    const std::vector<double> times = uniform_times(tau, cfg.record_points);
    std::vector<std::string> names;
    std::vector<PauliSchedule> schedules;
    std::vector<QubitTrajectory> trajs;
    json& entry = summary["trajectories"][label];
    entry["duration"] = tau;
    for (const std::string& p : cfg.protocols) {
      if (p == "oc") continue;
      std::optional<Ramp> ramp;
      PauliSchedule reference = lz_bare(c.gap, quintic);
      if (p == "bob") {
        if (!bob || std::abs(tau - bob->duration) > 1e-9 * bob->duration) {
          ctx.fail("lz/" + label + "/bob", "bang-off-bang runs at the speed-limit time only");
          continue;
        }
        ramp = bob->ramp();
      } else if (p == "cd-optimal") {
        ramp = lz_optimal_ramp(cfg, tau);
        reference = lz_bare(c.gap, *ramp);
      } else {
        ramp = quintic;
      }
      const LzProtocol proto = p == "cd-optimal" ? LzProtocol::cd : lz_protocol_from_string(p);
      const PauliSchedule schedule =
          lz_schedule(proto == LzProtocol::bob ? LzProtocol::bare : proto, c.gap, *ramp);
      try {
        trajs.push_back(sample_trajectory(schedule, c.initial_state(), times, cfg.steps, reference));
      } catch (const std::exception& e) {
        ctx.fail("lz/" + label + "/" + p, e.what());
        continue;
      }
      names.push_back(p);
      schedules.push_back(schedule);
      entry["final_fidelity"][p] = fidelity(c.target_state(), trajs.back().final_state());
      entry["cost"][p] = integrated_cost(schedule, 20000);
    }
    if (names.empty()) continue;

    std::vector<std::string> header{"t"};
    header.insert(header.end(), names.begin(), names.end());
    auto fid = ctx.csv("lz_fidelity_" + label + ".csv", header);
    auto rate = ctx.csv("lz_cost_rate_" + label + ".csv", header);
    for (std::size_t i = 0; i < times.size(); ++i) {
      std::vector<double> f{times[i]}, r{times[i]};
      for (const auto& tr : trajs) {
        f.push_back(tr.fidelity[i]);
        r.push_back(tr.cost_rate[i]);
      }
      fid.row(f);
      rate.row(r);
    }
    std::vector<std::string> spec_header{"t"};
    for (const auto& n : names) {
      spec_header.push_back(n + "_minus");
      spec_header.push_back(n + "_plus");
    }
    auto spectra = ctx.csv("lz_spectra_" + label + ".csv", spec_header);
    for (double t : times) {
      std::vector<double> row{t};
      for (const auto& s : schedules) {
        const PauliCoefficients k = s(t);
        const double half = 0.5 * std::sqrt(k.x * k.x + k.y * k.y + k.z * k.z);
        row.push_back(k.identity - half);
        row.push_back(k.identity + half);
      }
      spectra.row(row);
    }
  }

  if (!cfg.scan.empty()) {
    const std::vector<double> taus = cfg.scan.resolve();
    std::vector<ScanSeries> series;
    for (const std::string& p : cfg.protocols) {
      if (p == "cd" || p == "lcd" || p == "bare") {
        const LzProtocol proto = lz_protocol_from_string(p);
        series.push_back({p, proto, [&cfg](double tau) { return lz_config(cfg, tau).quintic_ramp(); }});
      } else if (p == "cd-optimal") {
        series.push_back({p, LzProtocol::cd, [&cfg](double tau) { return lz_optimal_ramp(cfg, tau); }});
      }
    }
    if (!series.empty()) {
      const CostTable table = cost_scan(cfg.lz.gap, taus, series, cfg.threads);
      std::vector<std::string> header{"tau"};
      header.insert(header.end(), table.columns.begin(), table.columns.end());
      auto out = ctx.csv("lz_cost_scan.csv", header);
      for (std::size_t i = 0; i < taus.size(); ++i) {
        std::vector<double> row{taus[i]};
        row.insert(row.end(), table.costs[i].begin(), table.costs[i].end());
        out.row(row);
      }
    }
    if (has(cfg.protocols, "cd") && has(cfg.protocols, "lcd")) {
      json cross;
      LzConfig doubled = base;
      doubled.gap *= cfg.lz.gap_factor;
      const auto a = cd_lcd_crossover(base, taus);
      const auto b = cd_lcd_crossover(doubled, taus);
      cross["gap"] = base.gap;
      cross["tau"] = a ? json(*a) : json(nullptr);
      cross["scaled_gap"] = doubled.gap;
      cross["scaled_tau"] = b ? json(*b) : json(nullptr);
      summary["crossover"] = cross;
      if (!a) ctx.fail("lz/crossover", "no CD/LCD crossover inside the scan grid");
    }
  }

  if (has(cfg.protocols, "oc") && !cfg.lz.oc_durations.empty()) {
    const auto& taus = cfg.lz.oc_durations;
    std::vector<std::optional<OcResult>> results(taus.size());
    std::vector<std::string> errors(taus.size());
    OcProblem problem;
    problem.lz = base;
    problem.n_max = cfg.lz.oc_n_max;
    problem.gamma = cfg.lz.oc_gamma;
    problem.max_evaluations = cfg.lz.oc_max_evaluations;
    problem.seed = cfg.seed;
    parallel_for(taus.size(), cfg.threads, [&](std::size_t i) {
      OcProblem p = problem;
      p.lz.duration = taus[i];
      try {
        results[i] = optimize(p);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    });
    auto table = ctx.csv("lz_oc.csv", {"tau", "q", "C", "objective", "evaluations", "reached_target"});
    json records = json::array();
    for (std::size_t i = 0; i < taus.size(); ++i) {
      if (!results[i]) {
        ctx.fail("lz/oc/" + duration_label(taus[i]), errors[i]);
        continue;
      }
      const OcResult& r = *results[i];
      table.row({taus[i], r.q, r.cost, r.objective, static_cast<double>(r.evaluations),
                 r.reached_target ? 1.0 : 0.0});
      OcProblem p = problem;
      p.lz.duration = taus[i];
      records.push_back(to_json(p, r));
      const std::string name = "lz_oc_trace_" + duration_label(taus[i]) + ".csv";
      ctx.report.files.push_back(ctx.dir / name);
      std::ofstream trace(ctx.dir / name);
      trace << "# " << ctx.meta << '\n';
      write_trace_csv(trace, r);
      if (!r.reached_target) {
        std::ostringstream msg;
        msg << "infidelity " << r.q << " above target " << problem.q_target;
        ctx.fail("lz/oc/" + duration_label(taus[i]), msg.str());
      }
    }
    summary["oc"] = records;
  }
}

// ---------------------------------------------------------------- oscillator

void run_oscillator_model(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const OscillatorSettings& s = cfg.oscillator;
  json& summary = ctx.report.summary;
  summary["cd_min_valid_duration"] = cd_min_valid_duration(s.omega0, s.omega1);
  summary["adiabatic_cost_limit"] =
      0.25 * (s.omega0 + s.omega1) / std::tanh(s.beta * s.omega0 / 2.0);

  for (double tau : cfg.trajectory_durations) {
    const std::string label = duration_label(tau);
    const FrequencySchedule sched = FrequencySchedule::quintic(s.omega0, s.omega1, tau);
    const QstarSeries q = qstar_series(sched);
    std::vector<std::string> header{"t"};
    std::vector<const std::vector<double>*> cols;
    for (const std::string& p : cfg.protocols) {
      header.push_back(p);
      cols.push_back(p == "bare" ? &q.bare : p == "cd" ? &q.cd : p == "lcd" ? &q.lcd : &q.ie);
      if (!cols.back()->empty() && std::isnan(cols.back()->back()))
        ctx.fail("oscillator/" + label + "/" + p, "protocol invalid at this duration");
    }
    const std::size_t n = q.times.size();
    const std::size_t stride = std::max<std::size_t>(1, (n - 1) / (cfg.record_points - 1));
    auto out = ctx.csv("osc_qstar_" + label + ".csv", header);
    for (std::size_t i = 0; i < n; i += stride) {
      std::vector<double> row{q.times[i]};
      for (const auto* c : cols) row.push_back((*c)[i]);
      out.row(row);
    }
    if ((n - 1) % stride != 0) {
      std::vector<double> row{q.times.back()};
      for (const auto* c : cols) row.push_back(c->back());
      out.row(row);
    }
    json& entry = summary["trajectories"][label];
    for (std::size_t k = 0; k < cols.size(); ++k)
      entry["final_qstar"][header[k + 1]] = nan_to_null(cols[k]->back());
  }

  if (!cfg.scan.empty()) {
    const std::vector<double> taus = cfg.scan.resolve();
    const auto& protocols = cfg.protocols;
    const std::size_t cols = protocols.size();
    std::vector<double> costs(taus.size() * cols, std::nan(""));
    std::vector<std::string> errors(taus.size() * cols);
    parallel_for(taus.size() * cols, cfg.threads, [&](std::size_t k) {
      const double tau = taus[k / cols];
      const FrequencySchedule sched = FrequencySchedule::quintic(s.omega0, s.omega1, tau);
      try {
        const OscillatorCost c =
            oscillator_cost(sched, osc_protocol_from_string(protocols[k % cols]), s.beta);
        if (c.valid) {
          costs[k] = c.cost;
        } else {
          std::ostringstream msg;
          msg << "squared local frequency not positive";
          if (c.violation_time) msg << " at t = " << *c.violation_time;
          errors[k] = msg.str();
        }
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    });
    std::vector<std::string> header{"tau"};
    header.insert(header.end(), protocols.begin(), protocols.end());
    auto out = ctx.csv("osc_cost_scan.csv", header);
    for (std::size_t i = 0; i < taus.size(); ++i) {
      std::vector<double> row{taus[i]};
      for (std::size_t j = 0; j < cols; ++j) {
        row.push_back(costs[i * cols + j]);
        if (!errors[i * cols + j].empty())
          ctx.fail("oscillator/" + duration_label(taus[i]) + "/" + protocols[j], errors[i * cols + j]);
      }
      out.row(row);
    }
  }
}

// ---------------------------------------------------------------- Jaynes-Cummings

JcConfig jc_config(const ExperimentConfig& cfg, double duration, double alpha) {
  JcConfig c;
  c.cavity = cfg.jc.cavity;
  c.detuning = cfg.jc.detuning;
  c.g0 = cfg.jc.g0;
  c.g1 = cfg.jc.g1;
  c.duration = duration;
  c.cutoff = cfg.jc.cutoff;
  c.alpha = alpha;
  return c;
}

void run_jc_model(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  json& summary = ctx.report.summary;
  const bool coherent = cfg.jc.alpha != 0.0;
  summary["photon_tail"] = coherent_tail(cfg.jc.alpha, cfg.jc.cutoff);

  EnsembleOptions opts;
  opts.steps = cfg.steps;
  opts.record_points = cfg.record_points;
  opts.threads = cfg.threads;
  opts.cost_mode = cfg.jc.direct_sum_cost ? EnsembleCostMode::direct_sum : EnsembleCostMode::weighted;

  for (double tau : cfg.trajectory_durations) {
    const std::string label = duration_label(tau);
    for (const bool field : {false, true}) {
      if (field && !coherent) continue;
      const JcConfig c = jc_config(cfg, tau, field ? cfg.jc.alpha : 0.0);
      const Ramp ramp = c.quintic_ramp();
      const std::string kind = field ? "coherent" : "vacuum";
      std::vector<std::string> header{"t"};
      std::vector<EnsembleResult> runs;
      for (const std::string& p : cfg.protocols) {
        try {
          runs.push_back(ensemble_run(c, ramp, jc_protocol_from_string(p), opts));
        } catch (const std::exception& e) {
          ctx.fail("jc/" + label + "/" + kind + "/" + p, e.what());
          continue;
        }
        header.push_back(p);
        json& entry = summary["trajectories"][label][kind];
        entry["final_fidelity"][p] = runs.back().final_fidelity;
        entry["cost"][p] = runs.back().cost;
      }
      if (runs.empty()) continue;
      auto out = ctx.csv("jc_fidelity_" + kind + "_" + label + ".csv", header);
      for (std::size_t i = 0; i < runs.front().times.size(); ++i) {
        std::vector<double> row{runs.front().times[i]};
        for (const auto& r : runs) row.push_back(r.fidelity[i]);
        out.row(row);
      }
    }
  }

  if (!cfg.scan.empty() && has(cfg.protocols, "cd") && has(cfg.protocols, "lcd")) {
    const std::vector<double> taus = cfg.scan.resolve();
    const JcConfig vac = jc_config(cfg, 1.0, 0.0);
    const auto rows = jc_cost_scan(vac, taus, 0, cfg.threads);
    auto out = ctx.csv("jc_cost_scan_vacuum.csv", {"tau", "cd", "lcd"});
    for (const auto& r : rows) out.row({r.duration, r.cd, r.lcd});
    const auto cross = locate_crossover(
        [&](double tau) {
          const auto r = jc_cost_scan(vac, {tau}, 0, 1);
          return r[0].cd - r[0].lcd;
        },
        taus);
    summary["crossover"] = cross ? json(*cross) : json(nullptr);
    if (!cross) ctx.fail("jc/crossover", "no CD/LCD crossover inside the scan grid");

    if (coherent) {
      const JcConfig field = jc_config(cfg, 1.0, cfg.jc.alpha);
      const double tail = coherent_tail(field.alpha, field.cutoff);
      if (tail > opts.max_tail) {
        std::ostringstream msg;
        msg << "photon-number tail " << tail << " beyond the cutoff; increase the cutoff";
        ctx.fail("jc/coherent_scan", msg.str());
      } else {
        const auto crow = jc_ensemble_cost_scan(field, taus, cfg.threads);
        auto cout = ctx.csv("jc_cost_scan_coherent.csv", {"tau", "cd", "lcd"});
        for (const auto& r : crow) cout.row({r.duration, r.cd, r.lcd});
      }
    }
  }
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::vector<double> DurationGrid::resolve() const {
  if (!values.empty()) return values;
  if (points <= 0) return {};
  if (points == 1) return {from};
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double u = static_cast<double>(i) / (points - 1);
    out[i] = log_spacing ? from * std::pow(to / from, u) : from + (to - from) * u;
  }
  out.back() = to;
  return out;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  ObjectReader r(j, "");
  r.get("name", cfg.name);
  r.get("model", cfg.model);
  if (!model_protocols().count(cfg.model))
    throw std::invalid_argument("config: model must be one of lz, oscillator, jc");
  r.get("protocols", cfg.protocols);
  if (cfg.protocols.empty()) cfg.protocols = default_protocols(cfg.model);
  if (const json* t = r.find("trajectory_durations")) {
    if (!t->is_array()) throw std::invalid_argument("trajectory_durations must be a list");
    for (const auto& v : *t) {
      if (v.is_string() && v.get<std::string>() == "qsl")
        cfg.trajectory_at_qsl = true;
      else if (v.is_number())
        cfg.trajectory_durations.push_back(v.get<double>());
      else
        throw std::invalid_argument("trajectory_durations: expected numbers or \"qsl\"");
    }
  }
  if (const json* s = r.find("scan")) cfg.scan = grid_from_json(*s);
  r.get("seed", cfg.seed);
  r.get("threads", cfg.threads);
  r.get("steps", cfg.steps);
  r.get("record_points", cfg.record_points);
  if (const json* lz = r.find("lz")) {
    ObjectReader l(*lz, "lz.");
    l.get("gap", cfg.lz.gap);
    l.get("g0", cfg.lz.g0);
    l.get("g1", cfg.lz.g1);
    l.get("epsilon", cfg.lz.epsilon);
    l.get("steepness", cfg.lz.steepness);
    l.get("bob_amplitude", cfg.lz.bob_amplitude);
    l.get("gap_factor", cfg.lz.gap_factor);
    if (const json* oc = l.find("oc")) {
      ObjectReader o(*oc, "lz.oc.");
      o.get("durations", cfg.lz.oc_durations);
      o.get("n_max", cfg.lz.oc_n_max);
      o.get("gamma", cfg.lz.oc_gamma);
      o.get("max_evaluations", cfg.lz.oc_max_evaluations);
      o.finish();
    }
    l.finish();
  }
  if (const json* osc = r.find("oscillator")) {
    ObjectReader o(*osc, "oscillator.");
    o.get("omega0", cfg.oscillator.omega0);
    o.get("omega1", cfg.oscillator.omega1);
    o.get("beta", cfg.oscillator.beta);
    o.finish();
  }
  if (const json* jc = r.find("jc")) {
    ObjectReader o(*jc, "jc.");
    o.get("cavity", cfg.jc.cavity);
    o.get("detuning", cfg.jc.detuning);
    o.get("g0", cfg.jc.g0);
    o.get("g1", cfg.jc.g1);
    o.get("alpha", cfg.jc.alpha);
    o.get("cutoff", cfg.jc.cutoff);
    std::string mode = "weighted";
    o.get("cost_mode", mode);
    if (mode != "weighted" && mode != "direct_sum")
      throw std::invalid_argument("jc.cost_mode must be 'weighted' or 'direct_sum'");
    cfg.jc.direct_sum_cost = mode == "direct_sum";
    o.finish();
  }
  r.finish();
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const ExperimentConfig& cfg) {
  json traj = json::array();
  if (cfg.trajectory_at_qsl) traj.push_back("qsl");
  for (double t : cfg.trajectory_durations) traj.push_back(t);
  return {
      {"name", cfg.name},
      {"model", cfg.model},
      {"protocols", cfg.protocols},
      {"trajectory_durations", traj},
      {"scan", grid_to_json(cfg.scan)},
      {"seed", cfg.seed},
      {"threads", cfg.threads},
      {"steps", cfg.steps},
      {"record_points", cfg.record_points},
      {"lz",
       {{"gap", cfg.lz.gap},
        {"g0", cfg.lz.g0},
        {"g1", cfg.lz.g1},
        {"epsilon", cfg.lz.epsilon},
        {"steepness", cfg.lz.steepness},
        {"bob_amplitude", cfg.lz.bob_amplitude},
        {"gap_factor", cfg.lz.gap_factor},
        {"oc",
         {{"durations", cfg.lz.oc_durations},
          {"n_max", cfg.lz.oc_n_max},
          {"gamma", cfg.lz.oc_gamma},
          {"max_evaluations", cfg.lz.oc_max_evaluations}}}}},
      {"oscillator",
       {{"omega0", cfg.oscillator.omega0},
        {"omega1", cfg.oscillator.omega1},
        {"beta", cfg.oscillator.beta}}},
      {"jc",
       {{"cavity", cfg.jc.cavity},
        {"detuning", cfg.jc.detuning},
        {"g0", cfg.jc.g0},
        {"g1", cfg.jc.g1},
        {"alpha", cfg.jc.alpha},
        {"cutoff", cfg.jc.cutoff},
        {"cost_mode", cfg.jc.direct_sum_cost ? "direct_sum" : "weighted"}}},
  };
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  json j = config_to_json(cfg);
  j.erase("threads");
  return fnv1a(j.dump());
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> preset_names() { return {"fig1", "fig3", "fig4", "fig5"}; }

std::string preset_description(const std::string& name) {
  if (name == "fig1") return "Landau-Zener fidelity, cost rate and spectra at the speed limit and tau = 0.1";
  if (name == "fig3") return "Landau-Zener cost versus duration with the optimised ramp, BOB and OC points";
  if (name == "fig4") return "oscillator adiabaticity at tau = 1.6, 2.5 and the cost scan";
  if (name == "fig5") return "Jaynes-Cummings fidelity at tau = 10 and vacuum/coherent cost scans";
  throw std::invalid_argument("unknown preset '" + name + "'");
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig cfg;
  cfg.name = name;
  if (name == "fig1") {
    cfg.model = "lz";
    cfg.protocols = {"bare", "cd", "lcd", "bob"};
    cfg.trajectory_at_qsl = true;
    cfg.trajectory_durations = {0.1};
  } else if (name == "fig3") {
    cfg.model = "lz";
    cfg.protocols = {"cd", "lcd", "cd-optimal", "bob", "oc"};
    cfg.scan = {{}, 0.1, 100.0, 41, true};
    cfg.lz.oc_durations = {25.0, 50.0, 100.0};
  } else if (name == "fig4") {
    cfg.model = "oscillator";
    cfg.protocols = {"bare", "cd", "lcd", "ie"};
    cfg.trajectory_durations = {1.6, 2.5};
    cfg.scan = {{}, 1.6, 50.0, 40, true};
  } else if (name == "fig5") {
    cfg.model = "jc";
    cfg.protocols = {"bare", "cd", "lcd"};
    cfg.trajectory_durations = {10.0};
    cfg.scan = {{}, 1.0, 40.0, 40, false};
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  return cfg;
}

ValidationReport validate(const ExperimentConfig& cfg) {
  ValidationReport rep;
  auto issue = [&](const std::string& s) { rep.errors.push_back(s); };
  auto physics = [&](const std::string& s) { rep.warnings.push_back(s); };
  const auto models = model_protocols();
  const auto it = models.find(cfg.model);
  if (it == models.end()) {
    issue("unknown model '" + cfg.model + "'");
    return rep;
  }
  for (const auto& p : cfg.protocols)
    if (!has(it->second, p)) issue("protocol '" + p + "' is not available for model " + cfg.model);
  if (cfg.steps < 16) issue("steps must be at least 16");
  if (cfg.record_points < 2) issue("record_points must be at least 2");
  if (cfg.threads < 1) issue("threads must be at least 1");

  std::vector<double> durations = cfg.trajectory_durations;
  if (!cfg.scan.values.empty() || cfg.scan.points > 0) {
    if (cfg.scan.values.empty() && (!(cfg.scan.from > 0.0) || !(cfg.scan.to > cfg.scan.from)))
      issue("scan range must satisfy 0 < from < to");
    else
      for (double t : cfg.scan.resolve()) durations.push_back(t);
  }
  for (double t : durations)
    if (!(t > 0.0)) issue("duration " + format_number(t) + " must be positive");
  if (!rep.errors.empty()) return rep;

  if (cfg.model == "lz") {
    if (cfg.lz.gap == 0.0) issue("lz.gap must be non-zero");
    if (cfg.lz.g0 == cfg.lz.g1) issue("lz.g0 and lz.g1 must differ");
    if (!rep.errors.empty()) return rep;
    const double qsl = qsl_time(lz_config(cfg, 1.0));
    if (has(cfg.protocols, "oc")) {
      for (double t : cfg.lz.oc_durations)
        if (!(t > qsl))
          physics("oc duration " + format_number(t) + " does not exceed the speed-limit time " +
                format_number(qsl));
      if (!(cfg.lz.oc_gamma > 0.0)) issue("lz.oc.gamma must be positive");
      if (cfg.lz.oc_n_max < 1) issue("lz.oc.n_max must be at least 1");
    }
    if (has(cfg.protocols, "bob") && !(cfg.lz.bob_amplitude > 0.0))
      issue("lz.bob_amplitude must be positive");
    if (has(cfg.protocols, "cd-optimal") && cfg.lz.g1 != -cfg.lz.g0)
      issue("cd-optimal needs a symmetric sweep g1 = -g0");
  } else if (cfg.model == "oscillator") {
    const auto& s = cfg.oscillator;
    if (!(s.omega0 > 0.0) || !(s.omega1 > 0.0)) issue("oscillator frequencies must be positive");
    if (!(s.beta > 0.0)) issue("oscillator.beta must be positive");
    if (!rep.errors.empty()) return rep;
    for (double t : durations) {
      const FrequencySchedule sched = FrequencySchedule::quintic(s.omega0, s.omega1, t);
      if (has(cfg.protocols, "cd"))
        if (const auto v = cd_violation_time(sched))
          physics("cd invalid at tau = " + format_number(t) + ": trap inversion at t = " +
                format_number(*v));
      if (has(cfg.protocols, "lcd")) {
        for (int i = 0; i <= 4000; ++i) {
          const double ti = t * i / 4000.0;
          if (!(lcd_squared_frequency(sched, ti) > 0.0)) {
            physics("lcd invalid at tau = " + format_number(t) +
                  ": squared frequency not positive at t = " + format_number(ti));
            break;
          }
        }
      }
    }
  } else {
    const auto& s = cfg.jc;
    if (s.cutoff < 0) issue("jc.cutoff must be non-negative");
    if (s.detuning == 0.0) issue("jc.detuning must be non-zero");
    if (!rep.errors.empty()) return rep;
    const double tail = coherent_tail(s.alpha, s.cutoff);
    if (tail > 1e-12)
      physics("photon-number tail " + format_number(tail) + " beyond cutoff " +
            std::to_string(s.cutoff) + " exceeds 1e-12; increase the cutoff");
  }
  return rep;
}

RunReport run_experiment(const ExperimentConfig& cfg, const fs::path& out_dir) {
  const ValidationReport check = validate(cfg);
  if (!check.errors.empty()) throw std::invalid_argument(check.errors.front());

  fs::create_directories(out_dir);
  const std::string hash = hash_hex(config_hash(cfg));
  RunContext ctx{cfg, out_dir, "stacost name=" + cfg.name + " model=" + cfg.model +
                                   " config_hash=" + hash,
                 {}};
  ctx.report.summary = {{"name", cfg.name},
                        {"model", cfg.model},
                        {"config_hash", hash},
                        {"config", config_to_json(cfg)}};
  ctx.report.summary["config"].erase("threads");

  if (cfg.model == "lz")
    run_lz_model(ctx);
  else if (cfg.model == "oscillator")
    run_oscillator_model(ctx);
  else
    run_jc_model(ctx);

  json files = json::array();
  for (const auto& f : ctx.report.files) files.push_back(f.filename().string());
  json failures = json::array();
  for (const auto& f : ctx.report.failures)
    failures.push_back({{"cell", f.cell}, {"message", f.message}});
  ctx.report.summary["files"] = files;
  ctx.report.summary["failures"] = failures;

  const fs::path summary_path = out_dir / "summary.json";
  std::ofstream out(summary_path);
  if (!out) throw std::runtime_error("cannot write " + summary_path.string());
  out << ctx.report.summary.dump(2) << '\n';
  ctx.report.files.push_back(summary_path);
  return ctx.report;
}

}  // namespace stacost
