#include "cardio/mesh.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cardio {

Mesh build_structured_mesh(double a, double b, int n) {
    if (n < 1) {
        throw std::invalid_argument("build_structured_mesh: n must be >= 1, got " +
                                    std::to_string(n));
    }
    if (!(a < b)) {
        throw std::invalid_argument("build_structured_mesh: requires a < b, got a=" +
                                    std::to_string(a) + " b=" + std::to_string(b));
    }

    Mesh mesh;
    mesh.a = a;
    mesh.b = b;
    mesh.n = n;

    const double h = (b - a) / n;
    mesh.nodes.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
    for (int row = 0; row <= n; ++row) {
        // exact endpoint so the domain bounds are hit bit-for-bit
        const double y = (row == n) ? b : a + row * h;
        for (int col = 0; col <= n; ++col) {
            const double x = (col == n) ? b : a + col * h;
            mesh.nodes.push_back({x, y});
        }
    }

    mesh.triangles.reserve(static_cast<std::size_t>(2) * n * n);
    for (int row = 0; row < n; ++row) {
        for (int col = 0; col < n; ++col) {
            const int bl = mesh.node_index(row, col);
            const int br = bl + 1;
            const int tl = mesh.node_index(row + 1, col);
            const int tr = tl + 1;
            // split along bl -> tr, both triangles counterclockwise
            mesh.triangles.push_back({bl, br, tr});
            mesh.triangles.push_back({bl, tr, tl});
        }
    }
    return mesh;
}

ElementGeometry element_geometry(const Mesh& mesh, int e) {
    if (e < 0 || e >= mesh.triangle_count()) {
        throw std::out_of_range("element_geometry: triangle index " + std::to_string(e) +
                                " out of range (have " +
                                std::to_string(mesh.triangle_count()) + ")");
    }
    const auto& t = mesh.triangles[static_cast<std::size_t>(e)];
    const Vec2 p0 = mesh.nodes[static_cast<std::size_t>(t[0])];
    const Vec2 p1 = mesh.nodes[static_cast<std::size_t>(t[1])];
    const Vec2 p2 = mesh.nodes[static_cast<std::size_t>(t[2])];

    const double two_area = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
    if (!(two_area > 0.0)) {
        throw std::runtime_error("element_geometry: non-positive signed area in element " +
                                 std::to_string(e));
    }

    ElementGeometry g;
    g.area = 0.5 * two_area;
    g.grad[0] = {(p1.y - p2.y) / two_area, (p2.x - p1.x) / two_area};
    g.grad[1] = {(p2.y - p0.y) / two_area, (p0.x - p2.x) / two_area};
    g.grad[2] = {(p0.y - p1.y) / two_area, (p1.x - p0.x) / two_area};
    return g;
}

int locate_node(const Mesh& mesh, Vec2 p, double tol) {
    const double eps = 1e-12 * (mesh.b - mesh.a);
    if (p.x < mesh.a - eps || p.x > mesh.b + eps || p.y < mesh.a - eps ||
        p.y > mesh.b + eps) {
        throw std::invalid_argument("locate_node: point (" + std::to_string(p.x) + ", " +
                                    std::to_string(p.y) + ") outside domain bounds");
    }
    const double h = mesh.spacing();
    auto clamp_idx = [&](double coord) {
        int i = static_cast<int>(std::lround((coord - mesh.a) / h));
        if (i < 0) i = 0;
        if (i > mesh.n) i = mesh.n;
        return i;
    };
    const int col = clamp_idx(p.x);
    const int row = clamp_idx(p.y);
    const int idx = mesh.node_index(row, col);
    const double d = norm(mesh.nodes[static_cast<std::size_t>(idx)] - p);
    if (d > tol) {
        throw std::runtime_error("locate_node: nearest node is " + std::to_string(d) +
                                 " away, tolerance " + std::to_string(tol));
    }
    return idx;
}

}  // namespace cardio
