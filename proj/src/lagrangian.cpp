#include "ibfsi/lagrangian.hpp"

#include "ibfsi/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace ibfsi {

namespace {

// Q1 shape functions on [-1,1]^2, corners ordered CCW from (-1,-1)
constexpr double kCorner[4][2] = {{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}};

Vec2 shape_grad_local(int a, double xi, double eta) {
    return {0.25 * kCorner[a][0] * (1.0 + kCorner[a][1] * eta),
            0.25 * kCorner[a][1] * (1.0 + kCorner[a][0] * xi)};
}

Mat2 ref_jacobian(const LagrangianMesh& mesh, int element, double xi, double eta) {
    Mat2 J{};
    for (int a = 0; a < 4; ++a) {
        const Vec2 X = mesh.nodes[mesh.elements[element][a]];
        const Vec2 g = shape_grad_local(a, xi, eta);
        J = J + outer(X, g);
    }
    return J;
}

} // namespace

void LagrangianMesh::compute_weights() {
    weights.assign(nodes.size(), 0.0);
    if (type == ElementType::Quad4) {
        for (int e = 0; e < element_count(); ++e)
            for (int a = 0; a < 4; ++a) {
                const double detJ = ref_jacobian(*this, e, kCorner[a][0], kCorner[a][1]).det();
                weights[elements[e][a]] += detJ;
            }
    } else {
        for (int e = 0; e < element_count(); ++e) {
            const Vec2 d = nodes[elements[e][1]] - nodes[elements[e][0]];
            const double len = d.norm();
            weights[elements[e][0]] += 0.5 * len;
            weights[elements[e][1]] += 0.5 * len;
        }
    }
}

double LagrangianMesh::total_measure() const {
    if (reference_measure > 0.0) return reference_measure;
    double total = 0.0;
    if (type == ElementType::Quad4) {
        // 2x2 Gauss, exact for the bilinear Jacobian determinant
        const double gp = 1.0 / std::sqrt(3.0);
        for (int e = 0; e < element_count(); ++e)
            for (double sx : {-gp, gp})
                for (double sy : {-gp, gp}) total += ref_jacobian(*this, e, sx, sy).det();
    } else {
        for (int e = 0; e < element_count(); ++e)
            total += (nodes[elements[e][1]] - nodes[elements[e][0]]).norm();
    }
    return total;
}

void LagrangianMesh::validate() const {
    if (nodes.empty() || elements.empty()) throw MeshError("mesh has no nodes or elements");
    if (weights.size() != nodes.size()) throw MeshError("mesh weights not computed");
    std::vector<int> touch(nodes.size(), 0);
    const int npe = type == ElementType::Quad4 ? 4 : 2;
    for (int e = 0; e < element_count(); ++e) {
        for (int a = 0; a < npe; ++a) {
            const int n = elements[e][a];
            if (n < 0 || n >= node_count()) throw MeshError("element references missing node");
            ++touch[n];
        }
        if (type == ElementType::Quad4) {
            for (int a = 0; a < 4; ++a)
                if (ref_jacobian(*this, e, kCorner[a][0], kCorner[a][1]).det() <= 0.0)
                    throw MeshError("element " + std::to_string(e) +
                                    " has non-positive reference area");
        } else if ((nodes[elements[e][1]] - nodes[elements[e][0]]).norm() <= 0.0) {
            throw MeshError("element " + std::to_string(e) + " has zero length");
        }
    }
    for (size_t n = 0; n < touch.size(); ++n)
        if (touch[n] == 0) throw MeshError("node " + std::to_string(n) + " is unreferenced");
    double wsum = 0.0;
    for (double w : weights) wsum += w;
    const double total = total_measure();
    if (std::fabs(wsum - total) > 1e-12 * std::fabs(total))
        throw MeshError("nodal weights do not sum to the reference measure");
}

LagrangianMesh LagrangianMesh::from_mapping(int ex, int ey,
                                            const std::function<Vec2(double, double)>& map) {
    LagrangianMesh m;
    m.type = ElementType::Quad4;
    m.nodes.reserve(static_cast<size_t>(ex + 1) * (ey + 1));
    for (int j = 0; j <= ey; ++j)
        for (int i = 0; i <= ex; ++i)
            m.nodes.push_back(map(static_cast<double>(i) / ex, static_cast<double>(j) / ey));
    auto id = [&](int i, int j) { return j * (ex + 1) + i; };
    for (int j = 0; j < ey; ++j)
        for (int i = 0; i < ex; ++i)
            m.elements.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    m.compute_weights();
    return m;
}

LagrangianMesh LagrangianMesh::rectangle(Vec2 lo, Vec2 hi, int ex, int ey) {
    return from_mapping(ex, ey, [&](double s, double t) {
        return Vec2{lo.x + (hi.x - lo.x) * s, lo.y + (hi.y - lo.y) * t};
    });
}

LagrangianMesh LagrangianMesh::circle_fiber(Vec2 center, double radius, int m) {
    LagrangianMesh mesh;
    mesh.type = ElementType::Segment2;
    mesh.closed_fiber = true;
    mesh.nodes.reserve(m);
    const double dtheta = 2.0 * 3.14159265358979323846 / m;
    for (int l = 0; l < m; ++l) {
        const double th = l * dtheta;
        mesh.nodes.push_back({center.x + radius * std::cos(th), center.y + radius * std::sin(th)});
    }
    for (int l = 0; l < m; ++l) mesh.elements.push_back({l, (l + 1) % m, 0, 0});
    // uniform reference arclength spacing
    mesh.reference_measure = 2.0 * 3.14159265358979323846 * radius;
    mesh.weights.assign(m, mesh.reference_measure / m);
    return mesh;
}

LagrangianMesh LagrangianMesh::line_fiber(Vec2 a, Vec2 b, int m) {
    LagrangianMesh mesh;
    mesh.type = ElementType::Segment2;
    mesh.closed_fiber = false;
    for (int l = 0; l < m; ++l) {
        const double s = static_cast<double>(l) / (m - 1);
        mesh.nodes.push_back(a + (b - a) * s);
    }
    for (int l = 0; l + 1 < m; ++l) mesh.elements.push_back({l, l + 1, 0, 0});
    mesh.compute_weights();
    return mesh;
}

LagrangianMesh LagrangianMesh::cooks_trapezoid(Vec2 offset, double side, int m) {
    const double s = side / 48.0;
    const Vec2 A{0.0, 0.0}, B{48.0 * s, 44.0 * s}, C{48.0 * s, 60.0 * s}, D{0.0, 44.0 * s};
    return from_mapping(m, m, [&](double sx, double sy) {
        const Vec2 p = A * ((1 - sx) * (1 - sy)) + B * (sx * (1 - sy)) + C * (sx * sy) +
                       D * ((1 - sx) * sy);
        return p + offset;
    });
}

LagrangianState LagrangianState::reference(const LagrangianMesh& mesh) {
    LagrangianState st;
    st.positions = mesh.nodes;
    st.velocities.assign(mesh.nodes.size(), Vec2{});
    st.forces.assign(mesh.nodes.size(), Vec2{});
    return st;
}

double Material::kappa_stab() const {
    if (nu_stab == -1.0) return 0.0;
    return 2.0 * G * (1.0 + nu_stab) / (3.0 * (1.0 - 2.0 * nu_stab));
}

void Material::validate() const {
    if (G <= 0.0) throw ConfigError("material stiffness must be positive");
    if (nu_stab < -1.0 || nu_stab >= 0.5)
        throw ConfigError("nu_stab must lie in [-1, 0.5)");
}

namespace {

void require_invertible(double J) {
    if (J <= 0.0)
        throw InvertedElementError("element inverted: det F = " + std::to_string(J), -1, J);
}

} // namespace

double strain_energy(const Material& mat, const Mat2& F) {
    const double J = F.det();
    require_invertible(J);
    const double kappa = mat.kappa_stab();
    const double logJ = std::log(J);
    double W = 0.0;
    switch (mat.law) {
    case MaterialLaw::NeoHookean: {
        const double I1 = (F.transpose() * F).trace() + 1.0; // plane-strain embedding
        if (mat.modified_invariants)
            W = 0.5 * mat.G * (std::pow(J, -2.0 / 3.0) * I1 - 3.0);
        else if (mat.deviatoric_only)
            W = 0.5 * mat.G * (I1 - 3.0);
        else
            W = 0.5 * mat.G * (I1 - 3.0) - mat.G * logJ;
        break;
    }
    case MaterialLaw::SaintVenantKirchhoff: {
        const Mat2 C = F.transpose() * F;
        const Mat2 E = (C - Mat2::identity()) * 0.5;
        const double trE = E.trace();
        const double EE = E.a11 * E.a11 + E.a12 * E.a12 + E.a21 * E.a21 + E.a22 * E.a22;
        W = 0.5 * mat.lambda * trE * trE + mat.G * EE;
        break;
    }
    case MaterialLaw::MembraneSpring:
        throw InvalidArgumentError("membrane springs have no continuum energy density");
    }
    if (kappa > 0.0) W += 0.5 * kappa * logJ * logJ;
    return W;
}

Mat2 first_pk_stress(const Material& mat, const Mat2& F) {
    const double J = F.det();
    require_invertible(J);
    const double kappa = mat.kappa_stab();
    const Mat2 FinvT = F.inverse().transpose();
    Mat2 P{};
    switch (mat.law) {
    case MaterialLaw::NeoHookean: {
        if (mat.modified_invariants) {
            const double I1 = (F.transpose() * F).trace() + 1.0;
            P = (F - FinvT * (I1 / 3.0)) * (mat.G * std::pow(J, -2.0 / 3.0));
        } else if (mat.deviatoric_only) {
            P = F * mat.G;
        } else {
            P = (F - FinvT) * mat.G;
        }
        break;
    }
    case MaterialLaw::SaintVenantKirchhoff: {
        const Mat2 C = F.transpose() * F;
        const Mat2 E = (C - Mat2::identity()) * 0.5;
        const Mat2 S = Mat2::identity() * (mat.lambda * E.trace()) + E * (2.0 * mat.G);
        P = F * S;
        break;
    }
    case MaterialLaw::MembraneSpring:
        throw InvalidArgumentError("membrane springs have no continuum stress");
    }
    if (kappa > 0.0) P = P + FinvT * (kappa * std::log(J));
    return P;
}

Mat2 deformation_gradient(const LagrangianMesh& mesh, const LagrangianState& state, int element,
                          Vec2 local) {
    if (mesh.type != ElementType::Quad4)
        throw InvalidArgumentError("deformation gradient requires solid elements");
    const Mat2 Jref = ref_jacobian(mesh, element, local.x, local.y);
    const double detJ = Jref.det();
    if (detJ == 0.0)
        throw MeshError("degenerate reference element " + std::to_string(element));
    const Mat2 JinvT = Jref.inverse().transpose();
    Mat2 F{};
    for (int a = 0; a < 4; ++a) {
        const Vec2 g = JinvT * shape_grad_local(a, local.x, local.y);
        F = F + outer(state.positions[mesh.elements[element][a]], g);
    }
    return F;
}

void elastic_nodal_forces(const LagrangianMesh& mesh, LagrangianState& state,
                          const Material& mat) {
    const int M = mesh.node_count();
    state.forces.assign(M, Vec2{});

    if (mesh.type == ElementType::Segment2) {
        if (mat.law != MaterialLaw::MembraneSpring)
            throw InvalidArgumentError("fiber meshes require the membrane spring law");
        if (!mesh.closed_fiber)
            throw InvalidArgumentError("membrane spring forces need a closed fiber");
        const double ds = mesh.weights[0];
        const double inv_ds2 = 1.0 / (ds * ds);
        for (int l = 0; l < M; ++l) {
            const Vec2& prev = state.positions[(l + M - 1) % M];
            const Vec2& cur = state.positions[l];
            const Vec2& next = state.positions[(l + 1) % M];
            state.forces[l] = (prev + next - cur * 2.0) * (mat.G * inv_ds2);
        }
        return;
    }

    for (int e = 0; e < mesh.element_count(); ++e) {
        for (int q = 0; q < 4; ++q) {
            const double xi = kCorner[q][0], eta = kCorner[q][1];
            const Mat2 Jref = ref_jacobian(mesh, e, xi, eta);
            const double wq = Jref.det();
            const Mat2 JinvT = Jref.inverse().transpose();
            Mat2 F{};
            for (int a = 0; a < 4; ++a) {
                const Vec2 g = JinvT * shape_grad_local(a, xi, eta);
                F = F + outer(state.positions[mesh.elements[e][a]], g);
            }
            Mat2 P;
            try {
                P = first_pk_stress(mat, F);
            } catch (const InvertedElementError& err) {
                throw InvertedElementError("element " + std::to_string(e) +
                                               " inverted during force assembly",
                                           e, err.jacobian());
            }
            for (int a = 0; a < 4; ++a) {
                const Vec2 g = JinvT * shape_grad_local(a, xi, eta);
                state.forces[mesh.elements[e][a]] -= (P * g) * wq;
            }
        }
    }
    for (int l = 0; l < M; ++l) state.forces[l] = state.forces[l] / mesh.weights[l];
}

void TetherParams::validate() const {
    if (kappa < 0.0 || eta < 0.0) throw ConfigError("tether penalties must be nonnegative");
    if (kappa == 0.0 && eta == 0.0) throw ConfigError("tether needs kappa or eta nonzero");
}

void tether_nodal_forces(const LagrangianMesh& mesh, const LagrangianState& state,
                         const TetherParams& tp, double t, std::span<Vec2> out) {
    for (int l = 0; l < mesh.node_count(); ++l) {
        const Vec2 X = mesh.nodes[l];
        const Vec2 psi = tp.target_position ? tp.target_position(X, t) : X;
        const Vec2 V = tp.target_velocity ? tp.target_velocity(X, t) : Vec2{};
        out[l] = (psi - state.positions[l]) * tp.kappa + (V - state.velocities[l]) * tp.eta;
    }
}

std::vector<double> element_jacobians(const LagrangianMesh& mesh, const LagrangianState& state) {
    std::vector<double> J(mesh.element_count());
    for (int e = 0; e < mesh.element_count(); ++e)
        J[e] = deformation_gradient(mesh, state, e, {0.0, 0.0}).det();
    return J;
}

double jacobian_l2_error(const LagrangianMesh& mesh, const LagrangianState& state) {
    const std::vector<double> J = element_jacobians(mesh, state);
    double num = 0.0, den = 0.0;
    for (int e = 0; e < mesh.element_count(); ++e) {
        // element reference area from the centroid Jacobian (exact for bilinear)
        const double area = 4.0 * ref_jacobian(mesh, e, 0.0, 0.0).det();
        num += area * (J[e] - 1.0) * (J[e] - 1.0);
        den += area;
    }
    return std::sqrt(num / den);
}

double tracer_area(std::span<const Vec2> polygon) {
    if (polygon.size() < 3)
        throw InvalidArgumentError("polygon area needs at least 3 points");
    double acc = 0.0;
    const size_t n = polygon.size();
    for (size_t k = 0; k < n; ++k) {
        const Vec2& a = polygon[k];
        const Vec2& b = polygon[(k + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    return 0.5 * std::fabs(acc);
}

void write_mesh(const LagrangianMesh& mesh, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw IoError("cannot open " + path + " for writing");
    std::fprintf(fp, "IBFSI-MESH 1\n%s %s\n", mesh.type == ElementType::Quad4 ? "quad" : "segment",
                 mesh.closed_fiber ? "closed" : "open");
    std::fprintf(fp, "%d\n", mesh.node_count());
    for (const Vec2& n : mesh.nodes) std::fprintf(fp, "%.17g %.17g\n", n.x, n.y);
    std::fprintf(fp, "%d\n", mesh.element_count());
    const int npe = mesh.type == ElementType::Quad4 ? 4 : 2;
    for (const auto& e : mesh.elements) {
        for (int a = 0; a < npe; ++a) std::fprintf(fp, "%d%c", e[a], a + 1 == npe ? '\n' : ' ');
    }
    std::fclose(fp);
}

LagrangianMesh read_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string magic, version, type, closed;
    in >> magic >> version >> type >> closed;
    if (magic != "IBFSI-MESH" || version != "1") throw IoError("not a mesh file: " + path);
    LagrangianMesh mesh;
    if (type == "quad")
        mesh.type = ElementType::Quad4;
    else if (type == "segment")
        mesh.type = ElementType::Segment2;
    else
        throw IoError("unknown element type: " + type);
    mesh.closed_fiber = closed == "closed";
    int M = 0;
    in >> M;
    if (M <= 0) throw IoError("bad node count");
    mesh.nodes.resize(M);
    for (auto& n : mesh.nodes)
        if (!(in >> n.x >> n.y)) throw IoError("truncated node list");
    int E = 0;
    in >> E;
    if (E <= 0) throw IoError("bad element count");
    mesh.elements.assign(E, {0, 0, 0, 0});
    const int npe = mesh.type == ElementType::Quad4 ? 4 : 2;
    for (auto& e : mesh.elements)
        for (int a = 0; a < npe; ++a)
            if (!(in >> e[a])) throw IoError("truncated element list");
    mesh.compute_weights();
    mesh.validate();
    return mesh;
}

} // namespace ibfsi
