#pragma once

#include <string>

#include "json.hpp"

#include "gema/kvn.hpp"

namespace gema::kvn {

/*
 * JSON: {"cell_volume": v, "points": [[x, ...], ...], "values": [[re, im], ...]}.
 * CSV: one row per cell, columns x_1..x_k, re, im, cell_volume, with an
 * optional header line. All cells must share one cell_volume.
 */
WaveFunction wavefunction_from_json(const nlohmann::json& doc);
nlohmann::ordered_json wavefunction_to_json(const WaveFunction& psi);
WaveFunction wavefunction_from_csv(const std::string& text);
std::string wavefunction_to_csv(const WaveFunction& psi);

/// Dispatches on the extension: .csv is CSV, anything else JSON.
WaveFunction load_wavefunction(const std::string& path);

/// {"alpha", "beta", "mass", "charge", "F0", "grid_spacing", "magnetization_offset", "vector_potential"}; all optional.
LGParams params_from_json(const nlohmann::json& doc);
nlohmann::ordered_json params_to_json(const LGParams& p);
LGParams load_params(const std::string& path);

}  // namespace gema::kvn
