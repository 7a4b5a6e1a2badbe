// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

#include "aircomp/experiment.hpp"

namespace aircomp::detail {

nlohmann::json config_json(const ExperimentConfig& cfg);

}  // namespace aircomp::detail
