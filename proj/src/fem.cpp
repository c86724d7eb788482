#include "cardio/fem.hpp"

#include <cmath>
#include <stdexcept>

namespace cardio {

Tensor2 ConductivityField::tensor_at(Vec2 x) const {
    const double theta = angle_at(x);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    // sigma_l * a_l a_l^T + sigma_t * a_t a_t^T with a_t perpendicular to a_l
    return {sigma_l * c * c + sigma_t * s * s, (sigma_l - sigma_t) * c * s,
            sigma_l * s * s + sigma_t * c * c};
}

ConductivityField ConductivityField::scaled(double factor) const {
    ConductivityField f = *this;
    f.sigma_l *= factor;
    f.sigma_t *= factor;
    return f;
}

ConductivityField ConductivityField::monodomain_reduced() const {
    return scaled(lambda_ratio / (1.0 + lambda_ratio));
}

void ConductivityField::validate() const {
    if (!(sigma_l > 0.0) || !(sigma_t > 0.0)) {
        throw std::invalid_argument("ConductivityField: conductivities must be positive");
    }
}

SparseSymMatrix assemble_mass(const Mesh& mesh) {
    SparseSymMatrix::Builder builder(mesh.node_count());
    for (int e = 0; e < mesh.triangle_count(); ++e) {
        const auto& t = mesh.triangles[static_cast<std::size_t>(e)];
        const double area = element_geometry(mesh, e).area;
        const double off = area / 12.0;
        const double diag = area / 6.0;
        for (int r = 0; r < 3; ++r) {
            for (int s = 0; s < 3; ++s) {
                builder.add(t[static_cast<std::size_t>(r)], t[static_cast<std::size_t>(s)],
                            r == s ? diag : off);
            }
        }
    }
    return builder.finalize();
}

std::vector<double> lumped_mass(const Mesh& mesh) {
    std::vector<double> d(static_cast<std::size_t>(mesh.node_count()), 0.0);
    for (int e = 0; e < mesh.triangle_count(); ++e) {
        const auto& t = mesh.triangles[static_cast<std::size_t>(e)];
        const double third = element_geometry(mesh, e).area / 3.0;
        for (int r = 0; r < 3; ++r) d[static_cast<std::size_t>(t[static_cast<std::size_t>(r)])] += third;
    }
    return d;
}

SparseSymMatrix assemble_stiffness(const Mesh& mesh, const ConductivityField& field) {
    field.validate();
    SparseSymMatrix::Builder builder(mesh.node_count());
    for (int e = 0; e < mesh.triangle_count(); ++e) {
        const auto& t = mesh.triangles[static_cast<std::size_t>(e)];
        const ElementGeometry g = element_geometry(mesh, e);
        const Vec2 centroid = (1.0 / 3.0) * (mesh.nodes[static_cast<std::size_t>(t[0])] +
                                             mesh.nodes[static_cast<std::size_t>(t[1])] +
                                             mesh.nodes[static_cast<std::size_t>(t[2])]);
        const Tensor2 d = field.tensor_at(centroid);

        // k_rs = area * grad_r . (D grad_s); computed for r <= s and mirrored
        // so the assembled matrix is symmetric bit-for-bit
        double k[3][3];
        for (int r = 0; r < 3; ++r) {
            const Vec2 dg = {d.xx * g.grad[static_cast<std::size_t>(r)].x +
                                 d.xy * g.grad[static_cast<std::size_t>(r)].y,
                             d.xy * g.grad[static_cast<std::size_t>(r)].x +
                                 d.yy * g.grad[static_cast<std::size_t>(r)].y};
            for (int s = r; s < 3; ++s) {
                k[r][s] = g.area * dot(g.grad[static_cast<std::size_t>(s)], dg);
            }
        }
        for (int r = 0; r < 3; ++r) {
            for (int s = 0; s < 3; ++s) {
                const double v = (r <= s) ? k[r][s] : k[s][r];
                builder.add(t[static_cast<std::size_t>(r)], t[static_cast<std::size_t>(s)], v);
            }
        }
    }
    return builder.finalize();
}

}  // namespace cardio
