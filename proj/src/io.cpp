#include "cardio/io.hpp"

#include <chrono>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cardio {

std::string format_full(double x) {
    // full-precision scientific notation; 17 significant digits round-trip
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

namespace {

std::string timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[64];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

void write_probe_csv(std::ostream& os, const ProbeSeries& probes, bool with_timestamp) {
    if (with_timestamp) os << "# generated " << timestamp_now() << "\n";
    os << "# probes";
    for (std::size_t k = 0; k < probes.points.size(); ++k) {
        os << " (" << format_full(probes.points[k].x) << "," << format_full(probes.points[k].y)
           << ")->node" << probes.node_indices[k];
    }
    os << "\n";
    os << "time";
    for (std::size_t k = 0; k < probes.values.size(); ++k) os << ",v_p" << (k + 1);
    os << "\n";
    for (std::size_t row = 0; row < probes.times.size(); ++row) {
        os << format_full(probes.times[row]);
        for (const auto& trace : probes.values) os << "," << format_full(trace[row]);
        os << "\n";
    }
}

ProbeSeries read_probe_csv(std::istream& is) {
    ProbeSeries series;
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            std::size_t columns = 0;
            for (char c : line) columns += c == ',';
            series.values.resize(columns);
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        if (!std::getline(ss, cell, ',')) continue;
        series.times.push_back(std::stod(cell));
        for (auto& trace : series.values) {
            if (!std::getline(ss, cell, ',')) {
                throw std::runtime_error("read_probe_csv: short row");
            }
            trace.push_back(std::stod(cell));
        }
    }
    if (!header_seen) throw std::runtime_error("read_probe_csv: missing header");
    return series;
}

void write_vtk_snapshot(std::ostream& os, const Mesh& mesh, std::span<const double> v,
                        std::span<const VtkPointData> extra, bool with_timestamp,
                        const std::string& title) {
    os << "# vtk DataFile Version 3.0\n";
    os << title;
    if (with_timestamp) os << " generated " << timestamp_now();
    os << "\n";
    os << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << mesh.node_count() << " double\n";
    for (const Vec2& p : mesh.nodes) {
        os << format_full(p.x) << " " << format_full(p.y) << " 0\n";
    }
    os << "CELLS " << mesh.triangle_count() << " " << 4 * mesh.triangle_count() << "\n";
    for (const auto& t : mesh.triangles) {
        os << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    }
    os << "CELL_TYPES " << mesh.triangle_count() << "\n";
    for (int e = 0; e < mesh.triangle_count(); ++e) os << "5\n";

    if (!v.empty() || !extra.empty()) {
        os << "POINT_DATA " << mesh.node_count() << "\n";
    }
    auto write_array = [&](const std::string& name, std::span<const double> values) {
        os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (double x : values) os << format_full(x) << "\n";
    };
    if (!v.empty()) write_array("v", v);
    for (const VtkPointData& array : extra) write_array(array.name, array.values);
}

void write_mesh_vtk(std::ostream& os, const Mesh& mesh, bool with_timestamp) {
    write_vtk_snapshot(os, mesh, {}, {}, with_timestamp, "mesh");
}

}  // namespace cardio
