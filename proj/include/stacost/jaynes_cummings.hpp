#pragma once

#include <string>
#include <vector>

#include "stacost/ramp.hpp"
#include "stacost/two_level.hpp"

namespace stacost {

enum class JcProtocol { bare, cd, lcd };
std::string to_string(JcProtocol p);
JcProtocol jc_protocol_from_string(const std::string& name);

struct JcConfig {
  double cavity = 1.0;     // omega
  double detuning = 0.1;   // delta = omega_A - omega
  double g0 = 0.0;
  double g1 = 0.2;
  double duration = 10.0;
  int cutoff = 40;         // highest photon number n kept
  double alpha = 0.0;      // coherent amplitude; 0 is the vacuum

  void validate() const;
  Ramp quintic_ramp() const { return poly_smooth_ramp(g0, g1 - g0, duration); }
};

/// One excitation block over {|e,n>, |g,n+1>}, rotated so that it reads as a Landau-Zener
/// sweep with gap -> delta and g -> -Omega_R.
struct JcBlock {
  int photons = 0;
  PauliSchedule schedule;
  double identity_shift = 0.0;  // (2n + 1) omega / 2, excluded from costs
};

/// n-photon Rabi frequency 2 g sqrt(n + 1).
double rabi_frequency(double g, int n);

JcBlock jc_block(const JcConfig& cfg, const Ramp& ramp, int n);
JcBlock jc_cd_block(const JcConfig& cfg, const Ramp& ramp, int n);
JcBlock jc_lcd_block(const JcConfig& cfg, const Ramp& ramp, int n);
JcBlock jc_protocol_block(JcProtocol protocol, const JcConfig& cfg, const Ramp& ramp, int n);

/// sigma_y operator coefficient g' sqrt(n+1) delta / (delta^2 + 4 (n+1) g^2) of the CD block.
double jc_cd_coefficient(double detuning, const RampSample& g, int n);
/// d/dt of theta_n = arctan(Omega_R / delta) / 2, by the chain rule on the mixing angle.
double mixing_angle_rate(double detuning, const RampSample& g, int n);

/// Poisson weights e^{-|a|^2} |a|^{2n} / n! for n = 0..N.
std::vector<double> coherent_weights(double alpha, int cutoff);
/// Probability beyond the cutoff, summed term by term (no cancellation).
double coherent_tail(double alpha, int cutoff);

enum class EnsembleCostMode { weighted, direct_sum };

struct EnsembleResult {
  std::vector<double> times;
  std::vector<double> fidelity;       // population-weighted, per time
  double final_fidelity = 0.0;
  double cost = 0.0;
  std::vector<double> weights;        // p_n, n = 0..N
  std::vector<double> block_costs;    // C_n
  std::vector<double> block_fidelity; // F_n(tau)
  /// Amplitudes of the assembled final state: block n holds (|e,n>, |g,n+1>) components
  /// scaled by sqrt(p_n) in the rotated dressed frame.
  std::vector<QubitState> final_blocks;
};

struct EnsembleOptions {
  std::size_t steps = 10000;
  std::size_t record_points = 401;   // fidelity series resolution
  EnsembleCostMode cost_mode = EnsembleCostMode::weighted;
  double max_tail = 1e-12;
  int threads = 1;
};

/// Propagates every block from its instantaneous ground state; fidelity and cost combine
/// per-block values with the photon-number weights.
EnsembleResult ensemble_run(const JcConfig& cfg, const Ramp& ramp, JcProtocol protocol,
                            const EnsembleOptions& options = {});

struct JcCostRow {
  double duration = 0.0;
  double cd = 0.0;
  double lcd = 0.0;
};

/// Block-cost scan (identity excluded) for a single photon sector n.
std::vector<JcCostRow> jc_cost_scan(const JcConfig& cfg, const std::vector<double>& durations,
                                    int n = 0, int threads = 1);
/// Ensemble-weighted cost scan for the configured initial field.
std::vector<JcCostRow> jc_ensemble_cost_scan(const JcConfig& cfg,
                                             const std::vector<double>& durations,
                                             int threads = 1);

}  // namespace stacost
