#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "capflow/errors.hpp"
#include "capflow/vec.hpp"

namespace capflow {

/// Sampled field data on a regular grid over `box`, trilinear interpolation.
/// Storage is component-fastest, then x-fastest:
///   index = comp + 3*(ix + nx*(iy + ny*iz)).
struct GridData {
    std::uint32_t nx = 0, ny = 0, nz = 0;
    Box3 box{};
    std::vector<double> values;  // 3 * nx * ny * nz

    Vec3 node(std::uint32_t ix, std::uint32_t iy, std::uint32_t iz) const;
    Vec3 at(std::uint32_t ix, std::uint32_t iy, std::uint32_t iz) const;
};

/// Immutable smooth 3D vector field: analytic presets, user callables, or
/// gridded samples.  Evaluation is deterministic; all accessors are pure and
/// safe to call concurrently.
class VectorField {
  public:
    enum class Kind { Constant, Shear, Rotation, Abc, GaussianCurl, Custom, Grid };

    // -- catalog presets ------------------------------------------------
    static VectorField constant(double U);                 // u = U e1
    static VectorField constant_vec(const Vec3& u);        // u = const vector
    static VectorField shear();                            // u = (x2, 0, 0)
    static VectorField rotation(const Vec3& omega0);       // u = omega0 x x
    static VectorField abc(double A, double B, double C);  // ABC flow
    /// u = curl(g a) = grad(g) x a with g(x) = exp(-|x - c|^2 / (2 w^2)).
    static VectorField gaussian_curl(const Vec3& amplitude, double width, const Vec3& center = {});

    /// Arbitrary analytic field; if no gradient callable is supplied the
    /// gradient falls back to central differences with step fd_step.
    static VectorField from_callable(std::function<Vec3(const Vec3&)> value,
                                     std::function<Mat3(const Vec3&)> gradient = nullptr,
                                     bool divergence_free = false, double fd_step = 1e-6);

    static VectorField from_grid(GridData grid, double fd_step_rel = 1e-4);

    /// Build a preset by catalog name with a parameter map.
    static VectorField make(const std::string& name, const std::map<std::string, double>& params);

    Vec3 value(const Vec3& x) const;
    Mat3 gradient(const Vec3& x) const;
    Vec3 curl(const Vec3& x) const { return curl_of_gradient(gradient(x)); }

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    bool divergence_free() const { return divergence_free_; }
    bool has_lipschitz() const { return lipschitz_ >= 0.0; }
    double lipschitz() const { return lipschitz_; }
    bool compact_decay() const { return compact_decay_; }
    const Box3* domain() const { return grid_ ? &grid_->box : nullptr; }
    const std::map<std::string, double>& parameters() const { return params_; }

  private:
    VectorField() = default;

    Kind kind_ = Kind::Constant;
    std::string name_ = "constant";
    std::map<std::string, double> params_;
    Vec3 v0_{};          // Constant
    Vec3 omega_{};       // Rotation
    double pa_ = 1.0, pb_ = 1.0, pc_ = 1.0;  // Abc
    Vec3 amp_{};         // GaussianCurl
    double width_ = 1.0;
    Vec3 gc_center_{};
    std::function<Vec3(const Vec3&)> fn_;
    std::function<Mat3(const Vec3&)> grad_fn_;
    std::shared_ptr<const GridData> grid_;
    double fd_step_ = 1e-6;
    bool divergence_free_ = false;
    bool compact_decay_ = false;
    double lipschitz_ = -1.0;  // negative: unknown

    Vec3 grid_value(const Vec3& x) const;
};

/// Catalog entry metadata; the catalog names every built-in preset.
struct FieldCatalogEntry {
    std::string name;
    std::map<std::string, double> parameters;
    bool divergence_free = false;
    bool compact_decay = false;
    bool known_lipschitz = false;
};

const std::vector<FieldCatalogEntry>& field_catalog();

// -- VF3D binary grid file ----------------------------------------------
// magic "VF3D", u32 nx, ny, nz, f64 xmin, xmax, ymin, ymax, zmin, zmax,
// then 3*nx*ny*nz little-endian f64, component-fastest then x-fastest.
void save_vf3d(const std::string& path, const GridData& grid);
GridData load_vf3d(const std::string& path);

/// Sample an analytic field onto a regular grid (node values, inclusive of
/// box faces).
GridData sample_to_grid(const VectorField& field, std::uint32_t nx, std::uint32_t ny,
                        std::uint32_t nz, const Box3& box);

/// Flow map of the field: fixed-step classical 4th-order one-step method.
/// Phi_s(x) uses ceil(|s| / step) equal steps.
class FlowMap {
  public:
    FlowMap(VectorField field, double step);

    const VectorField& field() const { return field_; }
    double step() const { return step_; }

    Vec3 flow(const Vec3& x, double s) const;

    /// Flow with the variational (Jacobian) matrix integrated alongside:
    /// dJ/ds = grad u(Phi) * J, J(0) = I.
    std::pair<Vec3, Mat3> flow_with_jacobian(const Vec3& x, double s) const;

    /// Trajectory samples Phi_{j*h}(x) for j = 0..n (sign of h selects the
    /// direction); used by the streamwise averages.
    std::vector<Vec3> trajectory(const Vec3& x, double h, int n) const;

  private:
    VectorField field_;
    double step_;

    Vec3 rk4_step(const Vec3& x, double h) const;
};

}  // namespace capflow
