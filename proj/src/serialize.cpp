#include "wavefront/serialize.hpp"

#include <string>

#include "wavefront/error.hpp"

namespace wavefront {

using nlohmann::json;

json to_json(const StructureReport& r) {
  json j;
  j["kappa"] = r.kappa;
  j["x_M"] = r.x_M ? json(*r.x_M) : json(nullptr);
  j["a0_minus"] = r.a0_minus;
  j["a0_plus"] = r.a0_plus;
  j["gamma"] = r.gamma;
  j["zeta1"] = r.zeta1;
  j["zeta2"] = r.zeta2;
  j["zeta_star"] = r.zeta_star;
  j["zeta_star_upper"] = r.zeta_star_upper;
  j["schwarzian_negative"] = r.schwarzian_negative;
  j["schwarzian_reliable"] = r.schwarzian_reliable;
  j["hypotheses"] = r.hypotheses.labels();
  j["notes"] = r.notes;
  return j;
}

json to_json(const MinimalSpeed& m) { return {{"z0", m.z0}, {"epsilon0", m.epsilon0}, {"c_star", m.c_star}}; }

json to_json(const SpeedInterval& s) {
  json upper{{"type", std::string(to_string(s.upper))}};
  if (s.upper == UpperKind::Finite) upper["value"] = s.upper_value;
  return {{"c_star", s.c_star},
          {"upper", upper},
          {"gamma", s.gamma},
          {"threshold", s.threshold},
          {"xi_at_c_star", s.xi_at_c_star}};
}

json to_json(const RootCount& r) {
  json j{{"n_right", r.n_right}, {"has_imaginary_axis_root", r.has_imaginary_axis_root}};
  j["dominant"] = r.dominant ? json{{"re", r.dominant->real()}, {"im", r.dominant->imag()}} : json(nullptr);
  return j;
}

json to_json(const AsymptoticsReport& a) {
  return {{"fitted_rate", a.fitted_rate},   {"target_rate", a.target_rate}, {"target_index", a.target_index},
          {"relative_gap", a.relative_gap}, {"r_squared", a.r_squared},     {"window", {a.window_begin, a.window_end}},
          {"passed", a.passed}};
}

json to_json(const TailReport& t) {
  return {{"predicted", std::string(to_string(t.predicted))},
          {"observed", std::string(to_string(t.observed))},
          {"crossings", t.crossings},
          {"consistent", t.consistent}};
}

json profile_summary(const WaveProfile& w) {
  return {{"c", w.c},
          {"h", w.h},
          {"epsilon", w.epsilon},
          {"lambda", w.lambda},
          {"mu", w.mu},
          {"lambda1", w.lambda1},
          {"lambda2", w.lambda2},
          {"kappa", w.kappa},
          {"delta", w.delta},
          {"t_begin", w.x.t0},
          {"t_end", w.x.t_end()},
          {"dt", w.x.dt},
          {"nodes", w.x.size()},
          {"left_tail", {{"amplitude", w.x.left.amplitude}, {"rate", w.x.left.rate}}},
          {"right_tail", w.x.right.constant},
          {"residual_sup", w.residual_sup},
          {"iteration_residual", w.iteration_residual},
          {"iterations", w.iterations},
          {"converged", w.converged},
          {"omega", w.omega},
          {"warnings", w.warnings}};
}

json sim_summary(const SimResult& r) {
  return {{"speed_estimate", r.speed_estimate ? json(*r.speed_estimate) : json(nullptr)},
          {"r_squared", r.r_squared},
          {"mass_nonneg", r.mass_nonneg},
          {"min_u", r.min_u},
          {"max_u", r.max_u},
          {"steps", r.steps},
          {"level", r.level},
          {"front_samples", r.front_positions.size()}};
}

SimConfig sim_config_from_json(const json& j) {
  try {
    SimConfig c;
    if (j.contains("g")) c.g = BirthFunction::parse(j.at("g").get<std::string>());
    c.h = j.value("h", c.h);
    c.length = j.value("length", c.length);
    c.nx = j.value("nx", c.nx);
    c.dt = j.value("dt", c.dt);
    c.t_end = j.value("t_end", c.t_end);
    if (j.contains("level")) c.level = j.at("level").get<double>();
    c.track_interval = j.value("track_interval", c.track_interval);
    c.frame_interval = j.value("frame_interval", c.frame_interval);
    if (j.contains("initial")) {
      const json& ini = j.at("initial");
      const std::string kind = ini.value("kind", std::string("step"));
      if (kind == "step") {
        c.initial.kind = InitialData::Kind::Step;
      } else if (kind == "bump") {
        c.initial.kind = InitialData::Kind::Bump;
      } else {
        throw Error(ErrorKind::ParseError, "unknown initial kind '" + kind + "'");
      }
      c.initial.height = ini.value("height", c.initial.height);
      c.initial.width = ini.value("width", c.initial.width);
    }
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("simulation config: ") + e.what());
  }
}

}  // namespace wavefront
