#pragma once

// File formats. Complex numbers are [re, im] arrays; array position j holds
// mode n = j + 1. Doubles are written with 17 significant digits, so a
// write/parse cycle reproduces every finite value bit for bit.
//
//   potential: {"order": N, "p": [[re, im], ...], "q": [...]}
//   spectral:  {"order": N, "s_plus": [...], "s_minus": [...]}
//
// Unknown keys are ignored, so the output of `forward` is valid input for
// `inverse`.

#include <string>

#include "json.hpp"
#include "pencil/characterize.hpp"
#include "pencil/series.hpp"

namespace pencil::io {

using Json = nlohmann::ordered_json;

/// "%.17g"; DomainError for NaN or infinity.
std::string format_double(double v);

/// Compact single-line JSON with doubles formatted by format_double.
std::string dump(const Json& doc);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

Potential parse_potential(const Json& doc);
SpectralData parse_spectral(const Json& doc);

Json complex_to_json(cplx z);
Json complex_array(std::span<const cplx> values);
Json potential_to_json(const Potential& pot);
Json spectral_to_json(const SpectralData& s);
Json grid_to_json(const GridSpec& g);

/// Header `re_z,im_z,re_D,im_D,abs_D`, rows with Im outer and Re inner.
std::string determinant_csv(const characterize::DeterminantGrid& grid);

}  // namespace pencil::io
