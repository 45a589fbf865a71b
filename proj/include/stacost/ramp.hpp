#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace stacost {

/// Value and first two derivatives of a scalar schedule at one instant.
struct RampSample {
  double value = 0.0;
  double deriv1 = 0.0;
  double deriv2 = 0.0;
};

enum class RampKind { polynomial, bob, fourier, tan_optimal, tanh_optimal, blended };

std::string to_string(RampKind kind);

/// Closed interval of a ramp on which it is either smooth or constant.
struct RampPiece {
  double begin = 0.0;
  double end = 0.0;
  bool constant = false;
};

/// g0 + g_delta (10 s^3 - 15 s^4 + 6 s^5): flat first and second derivative at both ends.
struct PolynomialRamp {
  double g0 = 0.0;
  double g_delta = 0.0;
};

/// Rectangular kicks +g_Q on [0, phi1/g_Q) and -g_Q on (tau - phi2/g_Q, tau], zero between.
struct BobPulse {
  double amplitude = 100.0;
  double phi1 = 0.0;
  double phi2 = 0.0;
};

struct FourierTerm {
  double amplitude = 0.0;
  double phase = 0.0;
};

/// Linear ramp g0 -> -g0 plus sum_n a_n sin(n pi s + phi_n).
struct FourierRamp {
  double g0 = 0.0;
  std::vector<FourierTerm> terms;
  // cached cos/sin of the phases, filled by the factory
  std::vector<double> cos_phase;
  std::vector<double> sin_phase;
};

/// gap * tan(k s + u0): minimises the counterdiabatic norm in the fast limit.
struct TanRamp {
  double gap = 0.0;
  double g0 = 0.0;
  double g1 = 0.0;
  double slope = 0.0;   // k = c1 * gap
  double offset = 0.0;  // u0 = arctan(g0 / gap)
};

/// -g0 [tanh(m s - m) + tanh(m s)]: near-delta transitions at both ends.
struct TanhRamp {
  double g0 = 0.0;
  double steepness = 40.0;
};

class Ramp;

/// f(tau) g_A(s) + (1 - f(tau)) g_NA(s) with f = (2/pi) arctan(epsilon tau).
struct BlendedRamp {
  std::shared_ptr<const Ramp> adiabatic;
  std::shared_ptr<const Ramp> nonadiabatic;
  double epsilon = 0.1;
  double weight = 0.0;
};

/// Immutable scalar control schedule on [0, duration].
class Ramp {
 public:
  using Shape =
      std::variant<PolynomialRamp, BobPulse, FourierRamp, TanRamp, TanhRamp, BlendedRamp>;

  Ramp(double duration, Shape shape);

  double duration() const { return duration_; }
  RampKind kind() const;
  const Shape& shape() const { return shape_; }

  double value(double t) const { return sample(t).value; }
  double deriv1(double t) const { return sample(t).deriv1; }
  double deriv2(double t) const { return sample(t).deriv2; }
  RampSample sample(double t) const;

  /// Derivatives with respect to the scaled time s = t / duration.
  RampSample sample_scaled(double s) const;

  /// Smooth / constant pieces covering [0, duration]; one smooth piece except for BOB.
  std::vector<RampPiece> pieces() const;

  /// True when deriv1 and deriv2 vanish at both endpoints.
  bool has_flat_endpoints(double tol = 1e-12) const;

 private:
  double duration_;
  Shape shape_;
};

Ramp poly_smooth_ramp(double g0, double g_delta, double duration);
Ramp bob_pulse(double amplitude, double duration, double phi1, double phi2);
Ramp oc_fourier_ramp(double g0, double duration, std::vector<FourierTerm> terms);
Ramp cd_na_ramp(double gap, double g0, double g1, double duration = 1.0);
Ramp cd_a_ramp(double g0, double steepness = 40.0, double duration = 1.0);
Ramp cd_blended_ramp(const Ramp& adiabatic, const Ramp& nonadiabatic, double epsilon,
                     double duration);

/// Checked variant of cd_a_ramp for callers that state both boundary values.
Ramp cd_a_ramp_for(double g0, double g1, double steepness = 40.0, double duration = 1.0);

/// Blending schedule (2/pi) arctan(epsilon tau).
double blend_weight(double epsilon, double duration);

/// The cost-optimised counterdiabatic ramp used throughout: tanh/tan blend at epsilon.
Ramp optimal_cd_ramp(double gap, double g0, double g1, double duration, double epsilon = 0.1,
                     double steepness = 40.0);

nlohmann::json ramp_to_json(const Ramp& ramp);
Ramp ramp_from_json(const nlohmann::json& j);

}  // namespace stacost
