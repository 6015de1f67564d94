#pragma once

#include <iosfwd>
#include <string>

#include "curlgap/ground_state.hpp"
#include "curlgap/grid.hpp"
#include "curlgap/spectrum_assembly.hpp"
#include "curlgap/spectrum_set.hpp"

namespace curlgap::io {

// Shortest round-trip-safe text for a double ("%.17g").
std::string format_double(double x);

// CSV "r,x3,u" with one row per node in index order (r outer, x3 inner).
void write_field_csv(std::ostream& out, const Field& u);
// Grid metadata {"r_max", "z_half", "nr", "nz"}.
std::string grid_sidecar_json(const CylGrid& grid);
CylGrid grid_from_sidecar_json(const std::string& text);
// Reads values back; row coordinates must match the grid to 1e-12.
Field read_field_csv(std::istream& in, const CylGrid& grid);

// {"energy", "el_residual", "nehari_residuals", "nontrivial", "iterations", "starts", ...}
std::string result_json(const GroundStateResult& r);

// {"query_point", "margin", "chain": null | {"values": [...], "names": [...], "holds": [...]}}
std::string certificate_json(const GapCertificate& c);

}  // namespace curlgap::io
