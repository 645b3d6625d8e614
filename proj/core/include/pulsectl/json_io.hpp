// SPDX-License-Identifier: Apache-2.0
//
// JSON (de)serialisation of the public data types. Readers accept partial
// objects (absent fields keep their defaults) and reject unknown keys.

#pragma once

#include <initializer_list>
#include <string>

#include <nlohmann/json.hpp>

#include "pulsectl/model.hpp"
#include "pulsectl/oracle.hpp"
#include "pulsectl/pde_sim.hpp"
#include "pulsectl/regions.hpp"
#include "pulsectl/spectral.hpp"

namespace pulsectl {

using json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "pulsectl/1";

/// Throws InvalidParameter when j is not an object or has a key outside `allowed`.
void require_known_keys(const json& j, std::initializer_list<const char*> allowed,
                        const std::string& what);

void to_json(json& j, const ModelParams& p);
void from_json(const json& j, ModelParams& p);

void to_json(json& j, const PowerLawModel& m);
void from_json(const json& j, PowerLawModel& m);

void to_json(json& j, const Rect& r);
void to_json(json& j, const SpectrumReport& r);

void to_json(json& j, const GainSearchResult& g);
void to_json(json& j, const RegionCell& c);
void to_json(json& j, const Polyline& p);

void to_json(json& j, const SimConfig& c);
void from_json(const json& j, SimConfig& c);
/// Summary only; the time series goes to CSV.
void to_json(json& j, const SimTrace& t);

void to_json(json& j, const IdentityCheck& c);

/// Complex numbers as [re, im].
json complex_to_json(cplx z);

}  // namespace pulsectl
