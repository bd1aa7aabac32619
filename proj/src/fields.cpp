#include "capflow/fields.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace capflow {

namespace {

// Gaussian envelope g(x) = exp(-|x - c|^2 / (2 w^2)) and derivatives.
double gauss_env(const Vec3& d, double w) { return std::exp(-norm2(d) / (2.0 * w * w)); }

Vec3 gauss_grad(const Vec3& d, double w) {
    const double g = gauss_env(d, w);
    return d * (-g / (w * w));
}

Mat3 gauss_hessian(const Vec3& d, double w) {
    const double g = gauss_env(d, w);
    const double iw2 = 1.0 / (w * w);
    Mat3 h;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            h(i, j) = g * (d[i] * d[j] * iw2 * iw2 - (i == j ? iw2 : 0.0));
    return h;
}

}  // namespace

Vec3 GridData::node(std::uint32_t ix, std::uint32_t iy, std::uint32_t iz) const {
    const Vec3 e = box.extent();
    return {box.lo.x + e.x * (nx > 1 ? double(ix) / (nx - 1) : 0.0),
            box.lo.y + e.y * (ny > 1 ? double(iy) / (ny - 1) : 0.0),
            box.lo.z + e.z * (nz > 1 ? double(iz) / (nz - 1) : 0.0)};
}

Vec3 GridData::at(std::uint32_t ix, std::uint32_t iy, std::uint32_t iz) const {
    const std::size_t base = 3 * (ix + std::size_t(nx) * (iy + std::size_t(ny) * iz));
    return {values[base], values[base + 1], values[base + 2]};
}

VectorField VectorField::constant(double U) {
    VectorField f = constant_vec({U, 0.0, 0.0});
    f.params_ = {{"U", U}};
    return f;
}

VectorField VectorField::constant_vec(const Vec3& u) {
    VectorField f;
    f.kind_ = Kind::Constant;
    f.name_ = "constant";
    f.v0_ = u;
    f.divergence_free_ = true;
    f.lipschitz_ = 0.0;
    return f;
}

VectorField VectorField::shear() {
    VectorField f;
    f.kind_ = Kind::Shear;
    f.name_ = "shear";
    f.divergence_free_ = true;
    f.lipschitz_ = 1.0;
    return f;
}

VectorField VectorField::rotation(const Vec3& omega0) {
    VectorField f;
    f.kind_ = Kind::Rotation;
    f.name_ = "rotation";
    f.omega_ = omega0;
    f.params_ = {{"wx", omega0.x}, {"wy", omega0.y}, {"wz", omega0.z}};
    f.divergence_free_ = true;
    f.lipschitz_ = norm(omega0);
    return f;
}

VectorField VectorField::abc(double A, double B, double C) {
    VectorField f;
    f.kind_ = Kind::Abc;
    f.name_ = "abc";
    f.pa_ = A;
    f.pb_ = B;
    f.pc_ = C;
    f.params_ = {{"A", A}, {"B", B}, {"C", C}};
    f.divergence_free_ = true;
    f.lipschitz_ = std::sqrt(3.0) * std::max({std::abs(A), std::abs(B), std::abs(C)});
    return f;
}

VectorField VectorField::gaussian_curl(const Vec3& amplitude, double width, const Vec3& center) {
    if (!(width > 0.0)) throw std::invalid_argument("gaussian_curl: width must be positive");
    VectorField f;
    f.kind_ = Kind::GaussianCurl;
    f.name_ = "gaussian_curl";
    f.amp_ = amplitude;
    f.width_ = width;
    f.gc_center_ = center;
    f.params_ = {{"ax", amplitude.x}, {"ay", amplitude.y}, {"az", amplitude.z},
                 {"width", width},    {"cx", center.x},    {"cy", center.y},
                 {"cz", center.z}};
    f.divergence_free_ = true;
    f.compact_decay_ = true;
    // |grad u| <= |a| * sup|Hess g|; sup over the Gaussian is (1/w^2) at peak
    // curvature directions, padded by the off-diagonal growth.
    f.lipschitz_ = 2.0 * norm(amplitude) / (width * width);
    return f;
}

VectorField VectorField::from_callable(std::function<Vec3(const Vec3&)> value,
                                       std::function<Mat3(const Vec3&)> gradient,
                                       bool divergence_free, double fd_step) {
    VectorField f;
    f.kind_ = Kind::Custom;
    f.name_ = "custom";
    f.fn_ = std::move(value);
    f.grad_fn_ = std::move(gradient);
    f.divergence_free_ = divergence_free;
    f.fd_step_ = fd_step;
    return f;
}

VectorField VectorField::from_grid(GridData grid, double fd_step_rel) {
    if (grid.nx < 2 || grid.ny < 2 || grid.nz < 2)
        throw std::invalid_argument("from_grid: need at least 2 nodes per axis");
    if (grid.values.size() != 3u * grid.nx * grid.ny * grid.nz)
        throw std::invalid_argument("from_grid: value array size mismatch");
    VectorField f;
    f.kind_ = Kind::Grid;
    f.name_ = "grid";
    f.fd_step_ = fd_step_rel * grid.box.diameter();
    f.grid_ = std::make_shared<const GridData>(std::move(grid));
    return f;
}

VectorField VectorField::make(const std::string& name, const std::map<std::string, double>& p) {
    auto get = [&](const char* key, double dflt) {
        auto it = p.find(key);
        return it == p.end() ? dflt : it->second;
    };
    if (name == "constant") return constant(get("U", 1.0));
    if (name == "shear") return shear();
    if (name == "rotation") return rotation({get("wx", 0.0), get("wy", 0.0), get("wz", 1.0)});
    if (name == "abc") return abc(get("A", 1.0), get("B", 1.0), get("C", 1.0));
    if (name == "gaussian_curl")
        return gaussian_curl({get("ax", 0.0), get("ay", 0.0), get("az", 1.0)}, get("width", 1.0),
                             {get("cx", 0.0), get("cy", 0.0), get("cz", 0.0)});
    throw std::invalid_argument("unknown field preset: " + name);
}

const std::vector<FieldCatalogEntry>& field_catalog() {
    static const std::vector<FieldCatalogEntry> catalog = {
        {"constant", {{"U", 1.0}}, true, false, true},
        {"shear", {}, true, false, true},
        {"rotation", {{"wx", 0.0}, {"wy", 0.0}, {"wz", 1.0}}, true, false, true},
        {"abc", {{"A", 1.0}, {"B", 1.0}, {"C", 1.0}}, true, false, true},
        {"gaussian_curl", {{"az", 1.0}, {"width", 1.0}}, true, true, true},
    };
    return catalog;
}

Vec3 VectorField::grid_value(const Vec3& x) const {
    const GridData& g = *grid_;
    if (!g.box.contains(x))
        throw DomainError("grid field evaluated outside its bounding box");
    const Vec3 e = g.box.extent();
    auto locate = [](double s, double lo, double ext, std::uint32_t n, std::uint32_t& i, double& t) {
        double u = (s - lo) / ext * (n - 1);
        // Snap to the nearest node when within rounding distance so node
        // evaluations reproduce stored samples bit-exactly.
        double r = std::round(u);
        if (std::abs(u - r) < 1e-9 && r >= 0.0 && r <= double(n - 1)) u = r;
        double fl = std::floor(u);
        if (fl > double(n - 2)) fl = double(n - 2);
        if (fl < 0.0) fl = 0.0;
        i = static_cast<std::uint32_t>(fl);
        t = u - fl;
    };
    std::uint32_t ix, iy, iz;
    double tx, ty, tz;
    locate(x.x, g.box.lo.x, e.x, g.nx, ix, tx);
    locate(x.y, g.box.lo.y, e.y, g.ny, iy, ty);
    locate(x.z, g.box.lo.z, e.z, g.nz, iz, tz);
    Vec3 acc{};
    for (int dz = 0; dz < 2; ++dz)
        for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx) {
                const double w = (dx ? tx : 1.0 - tx) * (dy ? ty : 1.0 - ty) * (dz ? tz : 1.0 - tz);
                if (w != 0.0) acc += w * g.at(ix + dx, iy + dy, iz + dz);
            }
    return acc;
}

Vec3 VectorField::value(const Vec3& x) const {
    switch (kind_) {
        case Kind::Constant:
            return v0_;
        case Kind::Shear:
            return {x.y, 0.0, 0.0};
        case Kind::Rotation:
            return cross(omega_, x);
        case Kind::Abc:
            return {pa_ * std::sin(x.z) + pc_ * std::cos(x.y),
                    pb_ * std::sin(x.x) + pa_ * std::cos(x.z),
                    pc_ * std::sin(x.y) + pb_ * std::cos(x.x)};
        case Kind::GaussianCurl:
            return cross(gauss_grad(x - gc_center_, width_), amp_);
        case Kind::Custom:
            return fn_(x);
        case Kind::Grid:
            return grid_value(x);
    }
    return {};
}

Mat3 VectorField::gradient(const Vec3& x) const {
    switch (kind_) {
        case Kind::Constant:
            return Mat3::zero();
        case Kind::Shear: {
            Mat3 m;
            m(0, 1) = 1.0;
            return m;
        }
        case Kind::Rotation: {
            // grad of omega x x is the antisymmetric matrix [omega]_x.
            Mat3 m;
            m(0, 1) = -omega_.z;
            m(0, 2) = omega_.y;
            m(1, 0) = omega_.z;
            m(1, 2) = -omega_.x;
            m(2, 0) = -omega_.y;
            m(2, 1) = omega_.x;
            return m;
        }
        case Kind::Abc: {
            Mat3 m;
            m(0, 1) = -pc_ * std::sin(x.y);
            m(0, 2) = pa_ * std::cos(x.z);
            m(1, 0) = pb_ * std::cos(x.x);
            m(1, 2) = -pa_ * std::sin(x.z);
            m(2, 0) = -pb_ * std::sin(x.x);
            m(2, 1) = pc_ * std::cos(x.y);
            return m;
        }
        case Kind::GaussianCurl: {
            // u_i = eps_ijk (d_j g) a_k  =>  du_i/dx_l = eps_ijk H_jl a_k,
            // i.e. row i of grad u is (column l of H) crossed with a.
            const Mat3 h = gauss_hessian(x - gc_center_, width_);
            Mat3 m;
            for (int l = 0; l < 3; ++l) {
                const Vec3 hcol{h(0, l), h(1, l), h(2, l)};
                const Vec3 col = cross(hcol, amp_);
                m(0, l) = col.x;
                m(1, l) = col.y;
                m(2, l) = col.z;
            }
            return m;
        }
        case Kind::Custom:
            if (grad_fn_) return grad_fn_(x);
            break;
        case Kind::Grid:
            break;
    }
    // Central finite differences; one-sided next to a grid boundary.
    const double h = fd_step_;
    Mat3 m;
    for (int j = 0; j < 3; ++j) {
        Vec3 dp = x, dm = x;
        dp[j] += h;
        dm[j] -= h;
        double denom = 2.0 * h;
        if (kind_ == Kind::Grid) {
            const Box3& box = grid_->box;
            const bool okp = box.contains(dp), okm = box.contains(dm);
            if (!okp && !okm) throw DomainError("grid too small for finite differences");
            if (!okp) { dp = x; denom = h; }
            if (!okm) { dm = x; denom = h; }
        }
        const Vec3 vp = value(dp);
        const Vec3 vm = value(dm);
        const Vec3 col = (vp - vm) / denom;
        m(0, j) = col.x;
        m(1, j) = col.y;
        m(2, j) = col.z;
    }
    return m;
}

void save_vf3d(const std::string& path, const GridData& grid) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_vf3d: cannot open " + path);
    out.write("VF3D", 4);
    const std::uint32_t dims[3] = {grid.nx, grid.ny, grid.nz};
    out.write(reinterpret_cast<const char*>(dims), sizeof dims);
    const double bounds[6] = {grid.box.lo.x, grid.box.hi.x, grid.box.lo.y,
                              grid.box.hi.y, grid.box.lo.z, grid.box.hi.z};
    out.write(reinterpret_cast<const char*>(bounds), sizeof bounds);
    out.write(reinterpret_cast<const char*>(grid.values.data()),
              static_cast<std::streamsize>(grid.values.size() * sizeof(double)));
    if (!out) throw std::runtime_error("save_vf3d: write failed for " + path);
}

GridData load_vf3d(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_vf3d: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "VF3D", 4) != 0)
        throw std::runtime_error("load_vf3d: bad magic in " + path);
    std::uint32_t dims[3];
    in.read(reinterpret_cast<char*>(dims), sizeof dims);
    double bounds[6];
    in.read(reinterpret_cast<char*>(bounds), sizeof bounds);
    GridData g;
    g.nx = dims[0];
    g.ny = dims[1];
    g.nz = dims[2];
    g.box = {{bounds[0], bounds[2], bounds[4]}, {bounds[1], bounds[3], bounds[5]}};
    const std::size_t count = 3u * g.nx * g.ny * g.nz;
    g.values.resize(count);
    in.read(reinterpret_cast<char*>(g.values.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw std::runtime_error("load_vf3d: truncated file " + path);
    return g;
}

GridData sample_to_grid(const VectorField& field, std::uint32_t nx, std::uint32_t ny,
                        std::uint32_t nz, const Box3& box) {
    GridData g;
    g.nx = nx;
    g.ny = ny;
    g.nz = nz;
    g.box = box;
    g.values.resize(3u * nx * ny * nz);
    for (std::uint32_t iz = 0; iz < nz; ++iz)
        for (std::uint32_t iy = 0; iy < ny; ++iy)
            for (std::uint32_t ix = 0; ix < nx; ++ix) {
                const Vec3 v = field.value(g.node(ix, iy, iz));
                const std::size_t base = 3 * (ix + std::size_t(nx) * (iy + std::size_t(ny) * iz));
                g.values[base] = v.x;
                g.values[base + 1] = v.y;
                g.values[base + 2] = v.z;
            }
    return g;
}

FlowMap::FlowMap(VectorField field, double step) : field_(std::move(field)), step_(step) {
    if (!(step > 0.0)) throw std::invalid_argument("FlowMap: step must be positive");
}

Vec3 FlowMap::rk4_step(const Vec3& x, double h) const {
    const Vec3 k1 = field_.value(x);
    const Vec3 k2 = field_.value(x + (0.5 * h) * k1);
    const Vec3 k3 = field_.value(x + (0.5 * h) * k2);
    const Vec3 k4 = field_.value(x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vec3 FlowMap::flow(const Vec3& x, double s) const {
    if (!std::isfinite(s)) throw std::invalid_argument("flow: time must be finite");
    if (s == 0.0) return x;
    const int n = static_cast<int>(std::ceil(std::abs(s) / step_));
    const double h = s / n;
    Vec3 y = x;
    for (int i = 0; i < n; ++i) {
        try {
            y = rk4_step(y, h);
        } catch (const DomainError&) {
            throw DomainError("flow: trajectory left the field domain", i * h);
        }
    }
    return y;
}

std::pair<Vec3, Mat3> FlowMap::flow_with_jacobian(const Vec3& x, double s) const {
    Vec3 y = x;
    Mat3 J = Mat3::identity();
    if (s == 0.0) return {y, J};
    const int n = static_cast<int>(std::ceil(std::abs(s) / step_));
    const double h = s / n;
    for (int i = 0; i < n; ++i) {
        const Vec3 k1 = field_.value(y);
        const Mat3 m1 = field_.gradient(y) * J;
        const Vec3 y2 = y + (0.5 * h) * k1;
        const Mat3 j2 = J + m1 * (0.5 * h);
        const Vec3 k2 = field_.value(y2);
        const Mat3 m2 = field_.gradient(y2) * j2;
        const Vec3 y3 = y + (0.5 * h) * k2;
        const Mat3 j3 = J + m2 * (0.5 * h);
        const Vec3 k3 = field_.value(y3);
        const Mat3 m3 = field_.gradient(y3) * j3;
        const Vec3 y4 = y + h * k3;
        const Mat3 j4 = J + m3 * h;
        const Vec3 k4 = field_.value(y4);
        const Mat3 m4 = field_.gradient(y4) * j4;
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        J = J + (m1 + (m2 + m3) * 2.0 + m4) * (h / 6.0);
    }
    return {y, J};
}

std::vector<Vec3> FlowMap::trajectory(const Vec3& x, double h, int n) const {
    std::vector<Vec3> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    Vec3 y = x;
    out.push_back(y);
    for (int i = 0; i < n; ++i) {
        try {
            y = rk4_step(y, h);
        } catch (const DomainError&) {
            throw DomainError("trajectory: left the field domain", i * h);
        }
        out.push_back(y);
    }
    return out;
}

}  // namespace capflow
