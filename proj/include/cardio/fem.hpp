#pragma once

#include <functional>
#include <vector>

#include "cardio/mesh.hpp"
#include "cardio/sparse.hpp"

namespace cardio {

// Symmetric 2x2 tensor.
struct Tensor2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;
};

// Anisotropic conductivity: sigma_l along the fiber direction a_l(x) (angle
// in radians), sigma_t across it. Produced tensors have eigenvalues exactly
// {sigma_l, sigma_t}. lambda_ratio is the extra-to-intracellular ratio used
// by the monodomain reduction sigma -> lambda*sigma/(1+lambda).
struct ConductivityField {
    double sigma_l = 1.2e-3;
    double sigma_t = 2.5562e-4;
    double lambda_ratio = 1.0;
    std::function<double(Vec2)> fiber_angle;  // empty -> constant 0

    double angle_at(Vec2 x) const { return fiber_angle ? fiber_angle(x) : 0.0; }
    Tensor2 tensor_at(Vec2 x) const;

    ConductivityField scaled(double factor) const;
    ConductivityField monodomain_reduced() const;

    bool is_zero() const { return sigma_l == 0.0 && sigma_t == 0.0; }
    void validate() const;  // sigma_l > 0 and sigma_t > 0
};

// Consistent P1 mass matrix, m_rs = sum_E int_E zeta_r zeta_s. SPD; entries
// sum to the domain area.
SparseSymMatrix assemble_mass(const Mesh& mesh);

// Row-sum lumped mass diagonal.
std::vector<double> lumped_mass(const Mesh& mesh);

// P1 stiffness a_rs = sum_E int_E grad(zeta_r)^T D grad(zeta_s) with D
// evaluated at the element centroid (exact for constant coefficients).
// Symmetric positive semidefinite with the constants in the null space
// (homogeneous Neumann). Rejects non-positive conductivities.
SparseSymMatrix assemble_stiffness(const Mesh& mesh, const ConductivityField& field);

}  // namespace cardio
