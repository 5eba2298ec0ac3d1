#pragma once

// JSON views of the result types. Field names follow the C++ members.

#include <json.hpp>

#include "wavefront/birthfn.hpp"
#include "wavefront/charroots.hpp"
#include "wavefront/pdesim.hpp"
#include "wavefront/profile.hpp"
#include "wavefront/speeds.hpp"

namespace wavefront {

nlohmann::json to_json(const StructureReport& r);
nlohmann::json to_json(const MinimalSpeed& m);
nlohmann::json to_json(const SpeedInterval& s);
nlohmann::json to_json(const RootCount& r);
nlohmann::json to_json(const AsymptoticsReport& a);
nlohmann::json to_json(const TailReport& t);

/// Profile metadata without the mesh values.
nlohmann::json profile_summary(const WaveProfile& w);

/// Everything but the front positions.
nlohmann::json sim_summary(const SimResult& r);

/// Reads a simulation config. Keys: g (spec string), h, length, nx, dt,
/// t_end, level, track_interval, frame_interval and
/// initial {kind: "step"|"bump", height, width}. Missing keys keep defaults.
SimConfig sim_config_from_json(const nlohmann::json& j);

}  // namespace wavefront
