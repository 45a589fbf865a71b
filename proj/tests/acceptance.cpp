// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "stacost/experiment.hpp"
#include "stacost/jaynes_cummings.hpp"
#include "stacost/landau_zener.hpp"
#include "stacost/oscillator.hpp"

using namespace stacost;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

class Detail {
 public:
  template <class T>
  Detail& operator<<(const T& v) {
    s_ << v;
    return *this;
  }
  std::string str() const { return s_.str(); }

 private:
  std::ostringstream s_;
};

std::vector<double> log_grid(double from, double to, int points) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i)
    g[i] = from * std::pow(to / from, static_cast<double>(i) / (points - 1));
  return g;
}

LzConfig lz_at(double tau) {
  LzConfig c;
  c.duration = tau;
  return c;
}

double lz_cost(LzProtocol p, const Ramp& r) { return integrated_cost(lz_schedule(p, 0.1, r), 20000); }

std::map<std::string, std::string> read_csvs(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".csv") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    out[e.path().filename().string()] = s.str();
  }
  return out;
}

// ---------------------------------------------------------------- criteria

Verdict qsl_criterion() {
  const double tau = qsl_time(lz_at(1.0));
  Detail d;
  d << "tau_qsl = " << tau << " (expected 22.14 within 1%)";
  return {std::abs(tau / 22.14 - 1.0) <= 0.01, d.str()};
}

Verdict fidelity_criterion() {
  double worst = 1.0;
  std::string where;
  auto note = [&](double f, const std::string& label) {
    if (f < worst) {
      worst = f;
      where = label;
    }
  };
  const double qsl = qsl_time(lz_at(1.0));
  for (double tau : {0.1, 22.14, qsl}) {
    const LzConfig c = lz_at(tau);
    for (auto p : {LzProtocol::cd, LzProtocol::lcd})
      note(run_lz(p, c, c.quintic_ramp()).final_fidelity, "lz " + to_string(p));
  }
  for (double alpha : {0.0, 2.0}) {
    JcConfig c;
    c.duration = 10.0;
    c.alpha = alpha;
    for (auto p : {JcProtocol::cd, JcProtocol::lcd})
      note(ensemble_run(c, c.quintic_ramp(), p).final_fidelity,
           "jc " + to_string(p) + (alpha == 0.0 ? " vacuum" : " coherent"));
  }
  Detail d;
  d << "lowest final fidelity 1 - " << (1.0 - worst) << " (" << where << "), need >= 1 - 1e-8";
  return {worst >= 1.0 - 1e-8, d.str()};
}

Verdict bob_criterion() {
  const BobKicks b = optimize_bob_kicks(lz_at(1.0), 100.0);
  Detail d;
  d << "F = " << b.fidelity << " at tau = " << b.duration << " (phi1 = " << b.phi1
    << ", phi2 = " << b.phi2 << "), need >= 0.999";
  return {b.fidelity >= 0.999, d.str()};
}

Verdict hierarchy_criterion() {
  bool ok = true;
  for (double tau : log_grid(0.1, 1.0, 10)) {
    const Ramp r = lz_at(tau).quintic_ramp();
    ok = ok && lz_cost(LzProtocol::cd, r) < lz_cost(LzProtocol::lcd, r);
  }
  for (double tau : {50.0, 60.0, 75.0, 100.0}) {
    const Ramp r = lz_at(tau).quintic_ramp();
    ok = ok && lz_cost(LzProtocol::lcd, r) < lz_cost(LzProtocol::cd, r);
  }
  const std::vector<double> grid = log_grid(0.1, 100.0, 41);
  LzConfig base;
  LzConfig doubled;
  doubled.gap = 0.2;
  const auto a = cd_lcd_crossover(base, grid);
  const auto b = cd_lcd_crossover(doubled, grid);
  Detail d;
  d << "ordering " << (ok ? "holds" : "violated") << "; crossover "
    << (a ? std::to_string(*a) : "none") << " -> " << (b ? std::to_string(*b) : "none")
    << " with doubled gap";
  return {ok && a && b && *b < *a, d.str()};
}

Verdict optimal_ramp_criterion() {
  const auto ramp = [](double tau) { return optimal_cd_ramp(0.1, -0.2, 0.2, tau, 0.1, 40.0); };
  int dominated = 0;
  const std::vector<double> grid = log_grid(0.1, 100.0, 41);
  for (double tau : grid)
    if (lz_cost(LzProtocol::cd, ramp(tau)) <= lz_cost(LzProtocol::cd, lz_at(tau).quintic_ramp()))
      ++dominated;
  const double short_limit = 2.0 * std::atan(2.0) / std::sqrt(2.0);
  const double short_scaled = lz_cost(LzProtocol::cd, ramp(0.1)) * 0.1;
  const double long_cost = lz_cost(LzProtocol::cd, ramp(100.0));
  const double long_limit = adiabatic_cost(0.1, ramp(100.0));
  const double short_err = std::abs(short_scaled / short_limit - 1.0);
  const double long_err = std::abs(long_cost / long_limit - 1.0);
  Detail d;
  d << dominated << "/" << grid.size() << " durations with C <= quintic; C*tau(0.1) = "
    << short_scaled << " vs " << short_limit << " (" << 100 * short_err << "%, need 5%); C(100) = "
    << long_cost << " vs " << long_limit << " (" << 100 * long_err << "%, need 2%)";
  return {dominated == static_cast<int>(grid.size()) && short_err <= 0.05 && long_err <= 0.02,
          d.str()};
}

Verdict oc_criterion(const fs::path& fig3) {
  std::ifstream in(fig3 / "summary.json");
  if (!in) return {false, "no fig3 summary"};
  const json s = json::parse(in);
  if (!s.contains("oc") || s["oc"].size() != 3) return {false, "fig3 summary lacks three OC records"};
  std::vector<double> costs;
  bool converged = true;
  Detail d;
  for (const auto& r : s["oc"]) {
    const double q = r["q"].get<double>();
    const double c = r["C"].get<double>();
    converged = converged && q <= 1e-7;
    costs.push_back(c);
    d << "tau " << r["tau"].get<double>() << ": q = " << q << ", C = " << c << "; ";
  }
  const double lo = *std::min_element(costs.begin(), costs.end());
  const double hi = *std::max_element(costs.begin(), costs.end());
  const double bob = s["bob"]["cost"].get<double>();
  const double spread = hi / lo - 1.0;
  double bob_gap = 0.0;
  for (double c : costs) bob_gap = std::max(bob_gap, std::abs(c / bob - 1.0));
  d << "spread " << 100 * spread << "%, largest deviation from BOB cost " << bob << " is "
    << 100 * bob_gap << "% (need q <= 1e-7 and both within 20%)";
  return {converged && spread <= 0.2 && bob_gap <= 0.2, d.str()};
}

Verdict validity_edge_criterion() {
  const double edge = cd_min_valid_duration(1.0, 10.0);
  Detail d;
  d << "minimal valid duration " << edge << " (expected 1.52 within 2%)";
  return {std::abs(edge / 1.52 - 1.0) <= 0.02, d.str()};
}

Verdict oscillator_criterion() {
  const double beta = 3.0;
  bool order = true, ends = true;
  double worst_end = 0.0;
  Detail d;
  for (double tau : {1.6, 2.5}) {
    const FrequencySchedule s = FrequencySchedule::quintic(1.0, 10.0, tau);
    const OscillatorCost ie = oscillator_cost(s, OscProtocol::ie, beta);
    const OscillatorCost lcd = oscillator_cost(s, OscProtocol::lcd, beta);
    order = order && lcd.valid && ie.cost <= lcd.cost;
    const bool cd_valid = !cd_violation_time(s);
    if (cd_valid) {
      const OscillatorCost cd = oscillator_cost(s, OscProtocol::cd, beta);
      order = order && ie.cost <= cd.cost;
      worst_end = std::max(worst_end, std::abs(cd.final_qstar - 1.0));
    }
    worst_end = std::max({worst_end, std::abs(ie.final_qstar - 1.0), std::abs(lcd.final_qstar - 1.0)});
    d << "tau " << tau << ": IE " << ie.cost << ", LCD " << lcd.cost << "; ";
  }
  ends = worst_end <= 1e-6;
  const double limit = 2.75 / std::tanh(1.5);
  double worst_limit = 0.0;
  for (auto p : {OscProtocol::cd, OscProtocol::lcd, OscProtocol::ie}) {
    const double c = oscillator_cost(FrequencySchedule::quintic(1.0, 10.0, 50.0), p, beta).cost;
    worst_limit = std::max(worst_limit, std::abs(c / limit - 1.0));
  }
  d << "max |Q*(tau) - 1| = " << worst_end << "; at tau 50 within " << 100 * worst_limit
    << "% of " << limit;
  return {order && ends && worst_limit <= 0.01, d.str()};
}

Verdict jc_criterion() {
  JcConfig c;
  std::vector<double> taus;
  for (int i = 1; i <= 40; ++i) taus.push_back(i);
  const auto cross = locate_crossover(
      [&](double tau) {
        const auto r = jc_cost_scan(c, {tau});
        return r[0].cd - r[0].lcd;
      },
      taus, 1e-3);
  JcConfig coherent = c;
  coherent.alpha = 2.0;
  const auto vac = jc_cost_scan(c, taus);
  const auto coh = jc_ensemble_cost_scan(coherent, taus);
  bool exceeds = true;
  for (std::size_t i = 0; i < taus.size(); ++i)
    exceeds = exceeds && coh[i].cd > vac[i].cd && coh[i].lcd > vac[i].lcd;
  Detail d;
  d << "crossover " << (cross ? std::to_string(*cross) : "none")
    << " (need [13.6, 20.4]); coherent cost above vacuum at every tau: " << (exceeds ? "yes" : "no");
  return {cross && *cross >= 13.6 && *cross <= 20.4 && exceeds, d.str()};
}

Verdict oracle_criterion() {
  double decomposition = 0.0;
  for (double tau : log_grid(0.1, 100.0, 9)) {
    for (const Ramp& r : {lz_at(tau).quintic_ramp(), optimal_cd_ramp(0.1, -0.2, 0.2, tau)}) {
      const double direct = lz_cost(LzProtocol::cd, r);
      decomposition = std::max(decomposition, std::abs(decomposition_cost(0.1, r) / direct - 1.0));
    }
  }
  double coefficient = 0.0;
  JcConfig jc;
  jc.duration = 10.0;
  const Ramp jr = jc.quintic_ramp();
  for (int n = 0; n <= 40; n += 5)
    for (int k = 0; k <= 50; ++k) {
      const RampSample g = jr.sample(10.0 * k / 50.0);
      coefficient = std::max(coefficient, std::abs(jc_cd_coefficient(jc.detuning, g, n) -
                                                   mixing_angle_rate(jc.detuning, g, n)));
    }
  double husimi = 0.0, wronskian = 0.0;
  for (double tau : {0.5, 1.6, 2.5, 10.0}) {
    const FrequencySchedule s = FrequencySchedule::quintic(1.0, 10.0, tau);
    OscillatorSolution sol = classical_solutions(s);
    ermakov_solve(s, sol);
    wronskian = std::max(wronskian, sol.max_wronskian_drift());
    for (std::size_t i = 0; i < sol.times.size(); ++i) {
      const double w = s(sol.times[i]).omega;
      const double b = sol.b[i], bd = sol.b_dot[i];
      const double via_b = (bd * bd + w * w * b * b + 1.0 / (b * b)) / (2.0 * w);
      husimi = std::max(husimi, std::abs(husimi_qstar(s, sol, i) / via_b - 1.0));
    }
  }
  Detail d;
  d << "(a) " << decomposition << " (b) " << coefficient << " (c) " << husimi << " (d) "
    << wronskian;
  return {decomposition <= 1e-6 && coefficient <= 1e-12 && husimi <= 1e-6 && wronskian < 1e-8,
          d.str()};
}

Verdict determinism_criterion(const fs::path& a, const fs::path& b) {
  int compared = 0;
  std::vector<std::string> differing;
  for (const auto& name : preset_names()) {
    const auto ta = read_csvs(a / name), tb = read_csvs(b / name);
    if (ta.empty() || ta != tb) differing.push_back(name);
    compared += static_cast<int>(ta.size());
  }
  Detail d;
  d << compared << " CSV files compared across two runs of every preset";
  for (const auto& n : differing) d << "; " << n << " differs";
  return {differing.empty(), d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "stacost_acceptance";
  fs::remove_all(root);
  const auto start = std::chrono::steady_clock::now();

  for (const char* run : {"run_a", "run_b"})
    for (const auto& name : preset_names()) {
      const auto t0 = std::chrono::steady_clock::now();
      run_experiment(preset(name), root / run / name);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::fprintf(stderr, "preset %s (%s) done in %.1f s\n", name.c_str(), run, secs);
    }

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"speed-limit time", qsl_criterion},
      {"perfect-fidelity protocols", fidelity_criterion},
      {"bang-off-bang at the speed limit", bob_criterion},
      {"two-level cost hierarchy and crossover", hierarchy_criterion},
      {"optimised counterdiabatic ramp", optimal_ramp_criterion},
      {"optimal-control plateau", [&] { return oc_criterion(root / "run_a" / "fig3"); }},
      {"oscillator validity edge", validity_edge_criterion},
      {"oscillator protocol ordering", oscillator_criterion},
      {"cavity crossover and coherent cost", jc_criterion},
      {"oracle equivalences", oracle_criterion},
      {"determinism", [&] { return determinism_criterion(root / "run_a", root / "run_b"); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::printf("%s %zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str());
    std::fflush(stdout);
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%zu criteria, %d failed, %.0f s\n", criteria.size(), failed, total);
  return failed == 0 ? 0 : 1;
}
