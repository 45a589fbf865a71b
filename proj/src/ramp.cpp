#include "stacost/ramp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stacost {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

RampSample eval(const PolynomialRamp& p, double s) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  return {p.g0 + p.g_delta * s3 * (10.0 - 15.0 * s + 6.0 * s2),
          p.g_delta * 30.0 * s2 * (1.0 - s) * (1.0 - s),
          p.g_delta * (60.0 * s - 180.0 * s2 + 120.0 * s3)};
}

RampSample eval(const FourierRamp& p, double s) {
  RampSample out{p.g0 - 2.0 * p.g0 * s, -2.0 * p.g0, 0.0};
  // sin/cos(n pi s) by complex rotation
  const double c1 = std::cos(std::numbers::pi * s);
  const double s1 = std::sin(std::numbers::pi * s);
  double cn = c1;
  double sn = s1;
  for (std::size_t i = 0; i < p.terms.size(); ++i) {
    const double n_pi = static_cast<double>(i + 1) * std::numbers::pi;
    const double a = p.terms[i].amplitude;
    const double sin_arg = sn * p.cos_phase[i] + cn * p.sin_phase[i];
    const double cos_arg = cn * p.cos_phase[i] - sn * p.sin_phase[i];
    out.value += a * sin_arg;
    out.deriv1 += a * n_pi * cos_arg;
    out.deriv2 -= a * n_pi * n_pi * sin_arg;
    const double next_c = cn * c1 - sn * s1;
    sn = sn * c1 + cn * s1;
    cn = next_c;
  }
  return out;
}

RampSample eval(const TanRamp& p, double s) {
  if (p.slope == 0.0) return {p.g0, 0.0, 0.0};
  const double u = p.slope * s + p.offset;
  const double tu = std::tan(u);
  const double sec2 = 1.0 + tu * tu;
  return {p.gap * tu, p.gap * p.slope * sec2, 2.0 * p.gap * p.slope * p.slope * sec2 * tu};
}

RampSample eval(const TanhRamp& p, double s) {
  const double m = p.steepness;
  const double ta = std::tanh(m * s - m);
  const double tb = std::tanh(m * s);
  const double sa = 1.0 - ta * ta;
  const double sb = 1.0 - tb * tb;
  return {-p.g0 * (ta + tb), -p.g0 * m * (sa + sb), 2.0 * p.g0 * m * m * (sa * ta + sb * tb)};
}

RampSample eval(const BlendedRamp& p, double s) {
  const RampSample a = p.adiabatic->sample_scaled(s);
  const RampSample na = p.nonadiabatic->sample_scaled(s);
  const double f = p.weight;
  return {f * a.value + (1.0 - f) * na.value, f * a.deriv1 + (1.0 - f) * na.deriv1,
          f * a.deriv2 + (1.0 - f) * na.deriv2};
}

void require_duration(double duration) {
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw std::invalid_argument("ramp duration must be positive and finite");
}

}  // namespace

std::string to_string(RampKind kind) {
  switch (kind) {
    case RampKind::polynomial: return "polynomial";
    case RampKind::bob: return "bob";
    case RampKind::fourier: return "fourier";
    case RampKind::tan_optimal: return "tan-optimal";
    case RampKind::tanh_optimal: return "tanh-optimal";
    case RampKind::blended: return "blended";
  }
  return "unknown";
}

Ramp::Ramp(double duration, Shape shape) : duration_(duration), shape_(std::move(shape)) {
  require_duration(duration);
  if (auto* f = std::get_if<FourierRamp>(&shape_); f && f->cos_phase.size() != f->terms.size()) {
    f->cos_phase.clear();
    f->sin_phase.clear();
    for (const auto& term : f->terms) {
      f->cos_phase.push_back(std::cos(term.phase));
      f->sin_phase.push_back(std::sin(term.phase));
    }
  }
}

RampKind Ramp::kind() const {
  return std::visit(overloaded{[](const PolynomialRamp&) { return RampKind::polynomial; },
                               [](const BobPulse&) { return RampKind::bob; },
                               [](const FourierRamp&) { return RampKind::fourier; },
                               [](const TanRamp&) { return RampKind::tan_optimal; },
                               [](const TanhRamp&) { return RampKind::tanh_optimal; },
                               [](const BlendedRamp&) { return RampKind::blended; }},
                    shape_);
}

RampSample Ramp::sample_scaled(double s) const {
  if (const auto* bob = std::get_if<BobPulse>(&shape_)) {
    const double t = s * duration_;
    const double t1 = bob->phi1 / bob->amplitude;
    const double t2 = duration_ - bob->phi2 / bob->amplitude;
    if (t < t1) return {bob->amplitude, 0.0, 0.0};
    if (t > t2) return {-bob->amplitude, 0.0, 0.0};
    return {0.0, 0.0, 0.0};
  }
  return std::visit(overloaded{[](const BobPulse&) { return RampSample{}; },
                               [s](const auto& p) { return eval(p, s); }},
                    shape_);
}

RampSample Ramp::sample(double t) const {
  RampSample r = sample_scaled(t / duration_);
  r.deriv1 /= duration_;
  r.deriv2 /= duration_ * duration_;
  return r;
}

std::vector<RampPiece> Ramp::pieces() const {
  if (const auto* bob = std::get_if<BobPulse>(&shape_)) {
    const double t1 = bob->phi1 / bob->amplitude;
    const double t2 = duration_ - bob->phi2 / bob->amplitude;
    std::vector<RampPiece> out;
    if (t1 > 0.0) out.push_back({0.0, t1, true});
    out.push_back({t1, t2, true});
    if (t2 < duration_) out.push_back({t2, duration_, true});
    return out;
  }
  return {{0.0, duration_, false}};
}

bool Ramp::has_flat_endpoints(double tol) const {
  const RampSample a = sample_scaled(0.0);
  const RampSample b = sample_scaled(1.0);
  return std::abs(a.deriv1) <= tol && std::abs(a.deriv2) <= tol && std::abs(b.deriv1) <= tol &&
         std::abs(b.deriv2) <= tol;
}

Ramp poly_smooth_ramp(double g0, double g_delta, double duration) {
  require_duration(duration);
  return Ramp(duration, PolynomialRamp{g0, g_delta});
}

Ramp bob_pulse(double amplitude, double duration, double phi1, double phi2) {
  require_duration(duration);
  if (!(amplitude > 0.0)) throw std::invalid_argument("bob_pulse: amplitude must be positive");
  if (phi1 < 0.0 || phi2 < 0.0) throw std::invalid_argument("bob_pulse: kick angles must be >= 0");
  if (phi1 / amplitude >= duration / 2.0 || phi2 / amplitude >= duration / 2.0)
    throw std::invalid_argument("bob_pulse: kicks would overlap (phi / g_Q >= tau / 2)");
  return Ramp(duration, BobPulse{amplitude, phi1, phi2});
}

Ramp oc_fourier_ramp(double g0, double duration, std::vector<FourierTerm> terms) {
  require_duration(duration);
  return Ramp(duration, FourierRamp{g0, std::move(terms), {}, {}});
}

Ramp cd_na_ramp(double gap, double g0, double g1, double duration) {
  if (gap == 0.0) throw std::invalid_argument("cd_na_ramp: gap must be non-zero");
  TanRamp p;
  p.gap = gap;
  p.g0 = g0;
  p.g1 = g1;
  p.offset = std::atan(g0 / gap);
  p.slope = std::atan(g1 / gap) - p.offset;
  return Ramp(duration, p);
}

Ramp cd_a_ramp(double g0, double steepness, double duration) {
  if (!(steepness > 0.0)) throw std::invalid_argument("cd_a_ramp: steepness must be positive");
  return Ramp(duration, TanhRamp{g0, steepness});
}

Ramp cd_a_ramp_for(double g0, double g1, double steepness, double duration) {
  if (std::abs(g1 + g0) > 1e-12 * std::max(1.0, std::abs(g0)))
    throw std::invalid_argument("cd_a_ramp: the tanh form requires g1 == -g0");
  return cd_a_ramp(g0, steepness, duration);
}

double blend_weight(double epsilon, double duration) {
  return 2.0 / std::numbers::pi * std::atan(epsilon * duration);
}

Ramp cd_blended_ramp(const Ramp& adiabatic, const Ramp& nonadiabatic, double epsilon,
                     double duration) {
  require_duration(duration);
  const RampSample a0 = adiabatic.sample_scaled(0.0);
  const RampSample a1 = adiabatic.sample_scaled(1.0);
  const RampSample n0 = nonadiabatic.sample_scaled(0.0);
  const RampSample n1 = nonadiabatic.sample_scaled(1.0);
  const double scale = std::max({1.0, std::abs(n0.value), std::abs(n1.value)});
  if (std::abs(a0.value - n0.value) > 1e-9 * scale || std::abs(a1.value - n1.value) > 1e-9 * scale)
    throw std::invalid_argument("cd_blended_ramp: component ramps have different boundary values");
  BlendedRamp p{std::make_shared<const Ramp>(adiabatic), std::make_shared<const Ramp>(nonadiabatic),
                epsilon, blend_weight(epsilon, duration)};
  return Ramp(duration, std::move(p));
}

Ramp optimal_cd_ramp(double gap, double g0, double g1, double duration, double epsilon,
                     double steepness) {
  return cd_blended_ramp(cd_a_ramp_for(g0, g1, steepness), cd_na_ramp(gap, g0, g1), epsilon,
                         duration);
}

nlohmann::json ramp_to_json(const Ramp& ramp) {
  nlohmann::json j;
  j["kind"] = to_string(ramp.kind());
  j["duration"] = ramp.duration();
  std::visit(overloaded{[&](const PolynomialRamp& p) {
                          j["g0"] = p.g0;
                          j["g_delta"] = p.g_delta;
                        },
                        [&](const BobPulse& p) {
                          j["amplitude"] = p.amplitude;
                          j["phi1"] = p.phi1;
                          j["phi2"] = p.phi2;
                        },
                        [&](const FourierRamp& p) {
                          j["g0"] = p.g0;
                          auto terms = nlohmann::json::array();
                          for (const auto& t : p.terms) terms.push_back({t.amplitude, t.phase});
                          j["terms"] = terms;
                        },
                        [&](const TanRamp& p) {
                          j["gap"] = p.gap;
                          j["g0"] = p.g0;
                          j["g1"] = p.g1;
                        },
                        [&](const TanhRamp& p) {
                          j["g0"] = p.g0;
                          j["steepness"] = p.steepness;
                        },
                        [&](const BlendedRamp& p) {
                          j["epsilon"] = p.epsilon;
                          j["adiabatic"] = ramp_to_json(*p.adiabatic);
                          j["nonadiabatic"] = ramp_to_json(*p.nonadiabatic);
                        }},
             ramp.shape());
  return j;
}

Ramp ramp_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const double duration = j.value("duration", 1.0);
  if (kind == "polynomial")
    return poly_smooth_ramp(j.at("g0").get<double>(), j.at("g_delta").get<double>(), duration);
  if (kind == "bob")
    return bob_pulse(j.at("amplitude").get<double>(), duration, j.at("phi1").get<double>(),
                     j.at("phi2").get<double>());
  if (kind == "fourier") {
    std::vector<FourierTerm> terms;
    for (const auto& t : j.value("terms", nlohmann::json::array()))
      terms.push_back({t.at(0).get<double>(), t.at(1).get<double>()});
    return oc_fourier_ramp(j.at("g0").get<double>(), duration, std::move(terms));
  }
  if (kind == "tan-optimal")
    return cd_na_ramp(j.at("gap").get<double>(), j.at("g0").get<double>(),
                      j.at("g1").get<double>(), duration);
  if (kind == "tanh-optimal")
    return cd_a_ramp(j.at("g0").get<double>(), j.value("steepness", 40.0), duration);
  if (kind == "blended")
    return cd_blended_ramp(ramp_from_json(j.at("adiabatic")), ramp_from_json(j.at("nonadiabatic")),
                           j.value("epsilon", 0.1), duration);
  throw std::invalid_argument("unknown ramp kind '" + kind + "'");
}

}  // namespace stacost
