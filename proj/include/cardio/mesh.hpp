#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace cardio {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

// Structured triangulation of the square [a,b]^2 with n subdivisions per
// axis. Nodes are ordered lexicographically by (row, column), row-major;
// every cell is split along its bottom-left -> top-right diagonal, so the
// mesh is reproducible bit-for-bit. Immutable after construction.
struct Mesh {
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> triangles;  // counterclockwise
    double a = 0.0;
    double b = 0.0;
    int n = 0;  // subdivisions per axis

    int node_count() const { return static_cast<int>(nodes.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }
    double spacing() const { return (b - a) / n; }
    int node_index(int row, int col) const { return row * (n + 1) + col; }
};

Mesh build_structured_mesh(double a, double b, int n);

// Area and the constant P1 basis gradients of one element.
struct ElementGeometry {
    double area = 0.0;
    std::array<Vec2, 3> grad{};
};

ElementGeometry element_geometry(const Mesh& mesh, int e);

// Index of the node nearest to p; throws if p is outside the domain or the
// nearest node is farther than tol.
int locate_node(const Mesh& mesh, Vec2 p, double tol);

}  // namespace cardio
