#include "curlgap/io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "curlgap/errors.hpp"

namespace curlgap {

using nlohmann::json;

std::string to_json(const SpectrumSet& s) {
  json j;
  j["points"] = s.points();
  j["intervals"] = json::array();
  for (const auto& iv : s.intervals()) j["intervals"].push_back({iv.lo, iv.hi});
  j["tail"] = s.tail() ? json(*s.tail()) : json(nullptr);
  return j.dump();
}

SpectrumSet spectrum_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    std::vector<double> points = j.at("points").get<std::vector<double>>();
    std::vector<Interval> ivs;
    for (const auto& iv : j.at("intervals")) {
      if (!iv.is_array() || iv.size() != 2) throw PreconditionError("spectrum JSON: intervals must be [lo, hi] pairs");
      ivs.push_back({iv[0].get<double>(), iv[1].get<double>()});
    }
    std::optional<double> tail;
    if (!j.at("tail").is_null()) tail = j.at("tail").get<double>();
    return SpectrumSet(std::move(points), std::move(ivs), tail);
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("spectrum JSON: ") + e.what());
  }
}

namespace io {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_field_csv(std::ostream& out, const Field& u) {
  const auto& g = u.grid();
  out << "r,x3,u\n";
  for (std::size_t i = 0; i < g.nr(); ++i) {
    for (std::size_t j = 0; j < g.nz(); ++j) {
      out << format_double(g.r(i)) << ',' << format_double(g.z(j)) << ',' << format_double(u(i, j)) << '\n';
    }
  }
}

std::string grid_sidecar_json(const CylGrid& grid) {
  json j;
  j["r_max"] = grid.r_max();
  j["z_half"] = grid.z_half();
  j["nr"] = grid.nr();
  j["nz"] = grid.nz();
  return j.dump(2);
}

CylGrid grid_from_sidecar_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    return CylGrid(j.at("r_max").get<double>(), j.at("z_half").get<double>(), j.at("nr").get<std::size_t>(),
                   j.at("nz").get<std::size_t>());
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("grid sidecar JSON: ") + e.what());
  }
}

Field read_field_csv(std::istream& in, const CylGrid& grid) {
  std::string line;
  if (!std::getline(in, line) || line != "r,x3,u") throw PreconditionError("field CSV: missing header r,x3,u");
  Field u(grid);
  for (std::size_t i = 0; i < grid.nr(); ++i) {
    for (std::size_t j = 0; j < grid.nz(); ++j) {
      if (!std::getline(in, line)) throw PreconditionError("field CSV: too few rows");
      std::istringstream row(line);
      std::string a;
      std::string b;
      std::string c;
      if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c)) {
        throw PreconditionError("field CSV: malformed row");
      }
      const double r = std::stod(a);
      const double z = std::stod(b);
      if (std::abs(r - grid.r(i)) > 1e-12 * std::max(1.0, grid.r_max()) ||
          std::abs(z - grid.z(j)) > 1e-12 * std::max(1.0, grid.z_half())) {
        throw GridMismatchError("field CSV: row coordinates do not match the grid");
      }
      u(i, j) = std::stod(c);
    }
  }
  return u;
}

std::string result_json(const GroundStateResult& r) {
  json j;
  j["energy"] = r.energy;
  j["el_residual"] = r.el_residual;
  j["scale"] = r.scale;
  j["nehari_residuals"] = {r.nehari_residuals[0], r.nehari_residuals[1]};
  j["nehari_identity"] = r.nehari_identity;
  j["nontrivial"] = r.nontrivial;
  j["iterations"] = r.iterations;
  j["starts"] = r.starts;
  j["start_energies"] = r.start_energies;
  return j.dump(2);
}

std::string certificate_json(const GapCertificate& c) {
  json j;
  j["query_point"] = c.query_point;
  j["margin"] = c.margin;
  if (c.chain) {
    json ch;
    ch["values"] = c.chain->values;
    ch["names"] = std::vector<std::string>(GapChain::kNames.begin(), GapChain::kNames.end());
    ch["holds"] = c.chain->holds;
    j["chain"] = ch;
  } else {
    j["chain"] = nullptr;
  }
  return j.dump(2);
}

}  // namespace io
}  // namespace curlgap
