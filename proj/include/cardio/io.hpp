#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "cardio/mesh.hpp"
#include "cardio/monodomain.hpp"

namespace cardio {

// Probe CSV: optional "# generated ..." line, optional "# probes ..." line,
// header "time,v_p1,...", one row per recorded step, full-precision
// scientific values so the file re-parses to the in-memory traces exactly.
void write_probe_csv(std::ostream& os, const ProbeSeries& probes, bool with_timestamp);
ProbeSeries read_probe_csv(std::istream& is);

// Legacy VTK ASCII unstructured grid (cell type 5). Extra point-data arrays
// (bidomain u_i/u_e) are appended after v when provided.
struct VtkPointData {
    std::string name;
    std::span<const double> values;
};

void write_vtk_snapshot(std::ostream& os, const Mesh& mesh, std::span<const double> v,
                        std::span<const VtkPointData> extra, bool with_timestamp,
                        const std::string& title = "snapshot");

void write_mesh_vtk(std::ostream& os, const Mesh& mesh, bool with_timestamp);

std::string format_full(double x);  // %.16e

}  // namespace cardio
