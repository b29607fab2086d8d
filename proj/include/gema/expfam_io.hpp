#pragma once

#include <string>

#include "json.hpp"

#include "gema/expfam.hpp"

namespace gema::expfam {

/*
 * Family descriptors:
 *   {"kind": "categorical", "atoms": K, "gauge_fixed": false}
 *   {"kind": "finite", "weights": [...], "carrier": [...], "statistics": [[F(x_0)], ...]}
 * weights default to ones and carrier to zeros. ParseError on malformed input.
 */
ExponentialFamily family_from_json(const nlohmann::json& doc);

nlohmann::ordered_json family_to_json(const ExponentialFamily& fam);

/// Reads and parses a descriptor file.
ExponentialFamily load_family(const std::string& path);

}  // namespace gema::expfam
