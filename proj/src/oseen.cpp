#include "capflow/oseen.hpp"

#include <cmath>
#include <stdexcept>

#include "capflow/errors.hpp"
#include "capflow/parallel.hpp"

namespace capflow {

namespace {
constexpr double kFourPi = 12.56637061435917295385;
constexpr double kInvFourPi = 1.0 / kFourPi;
}  // namespace

OseenKernel::OseenKernel(double viscosity, double drift) : nu(viscosity), U(drift) {
    if (!(nu > 0.0)) throw std::invalid_argument("OseenKernel: viscosity must be positive");
    if (!(U >= 0.0)) throw std::invalid_argument("OseenKernel: drift speed must be nonnegative");
}

double stable_r_minus_x1(const Vec3& x, double r) {
    if (x.x > 0.0) {
        const double rho2 = x.y * x.y + x.z * x.z;
        return rho2 / (r + x.x);
    }
    return r - x.x;
}

double gamma(const OseenKernel& k, const Vec3& x) {
    const double r = norm(x);
    if (r == 0.0) throw DomainError("gamma: singular at the origin");
    const double w = stable_r_minus_x1(x, r);
    return std::exp(-k.lambda() * w) / (kFourPi * k.nu * r);
}

Vec3 grad_log_gamma(const OseenKernel& k, const Vec3& x) {
    const double r = norm(x);
    if (r == 0.0) throw DomainError("grad_log_gamma: singular at the origin");
    const Vec3 xhat = x / r;
    const double lam = k.lambda();
    return (-(1.0 / r + lam)) * xhat + Vec3{lam, 0.0, 0.0};
}

Vec3 grad_gamma(const OseenKernel& k, const Vec3& x) {
    return gamma(k, x) * grad_log_gamma(k, x);
}

PdeResidual pde_residual(const OseenKernel& k, const Vec3& x) {
    const double r = norm(x);
    if (r == 0.0) throw DomainError("pde_residual: singular at the origin");
    const double g = gamma(k, x);
    const Vec3 gl = grad_log_gamma(k, x);
    const double lam = k.lambda();
    // Lap Gamma = Gamma (|grad log Gamma|^2 + Lap log Gamma), with
    // Lap log Gamma = -(2/r)(1/r + lambda) + 1/r^2.
    const double gl2 = norm2(gl);
    const double lap_log = -(2.0 / r) * (1.0 / r + lam) + 1.0 / (r * r);
    const double lap_gamma = g * (gl2 + lap_log);
    const Vec3 grad = g * gl;
    const double advect = k.U * grad.x;  // b . grad Gamma, b = U e1
    PdeResidual out;
    out.residual = advect - k.nu * lap_gamma;
    // Scale: magnitudes of the computed terms before cancellation.  At U = 0
    // the two sides of the operator vanish analytically and |Lap Gamma| is
    // itself rounding noise, so it cannot serve as a denominator.
    const double lap_mag = g * (gl2 + (2.0 / r) * (1.0 / r + lam) + 1.0 / (r * r));
    out.scale = k.U * norm(grad) + k.nu * lap_mag + 1e-300;
    out.relative = std::abs(out.residual) / out.scale;
    return out;
}

double delta_normalization(const OseenKernel& k, double r, int quad_points) {
    if (!(r > 0.0)) throw std::invalid_argument("delta_normalization: radius must be positive");
    // Axisymmetric surface integral: 2 pi r^2 * int_{-1}^{1} nu Gamma / r dt.
    const auto& [nodes, weights] = quad::gauss_legendre(quad_points);
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double t = nodes[i];
        const double st = std::sqrt(std::max(0.0, 1.0 - t * t));
        const Vec3 x{r * t, r * st, 0.0};
        acc += weights[i] * k.nu * gamma(k, x) / r;
    }
    return acc * 2.0 * 3.14159265358979323846 * r * r;
}

double mixed_norm_bound(double x1, int quad_points) {
    if (x1 == 0.0) throw DomainError("mixed_norm_bound: the x1 = 0 profile diverges");
    const int n = quad_points;
    if (x1 > 0.0) {
        // J = int_0^inf (w + x1)^{-5/4} w^{-3/4} dw, split at w = x1.
        // Head: w = x1 v^4 removes the w^{-3/4} endpoint; tail: w = x1 / t.
        const double head = quad::gauss_interval(
            [](double v) { return 4.0 / std::pow(1.0 + v * v * v * v, 1.25); }, 0.0, 1.0, n);
        const double tail = quad::gauss_interval(
            [](double t) { return 1.0 / std::pow(1.0 + t, 1.25); }, 0.0, 1.0, n);
        return (head + tail) / x1;
    }
    // x1 < 0: w runs over [2|x1|, inf) with r = w - |x1|; substitute
    // w = 2|x1|/t.
    const double a = -x1;
    const double integral = quad::gauss_interval(
        [](double t) { return std::pow(2.0 - t, -1.25); }, 0.0, 1.0, n);
    return std::pow(2.0, 0.25) * integral / a;
}

double capsule_kernel_norm(double R, double L, int quad_points) {
    if (!(R > 0.0) || !(L >= R)) throw std::invalid_argument("capsule_kernel_norm: bad capsule");
    // Slice integral over the 3-dilated capsule: for each axial coordinate
    // x1 the disk radius is P(x1), and
    //   int_0^P (rho^2 + x1^2)^{-3/4} rho drho = 2 [ (P^2 + x1^2)^{1/4} - |x1|^{1/2} ].
    const double R3 = 3.0 * R, b3 = 3.0 * (L - R), X = 3.0 * L;
    auto slice = [&](double x1) {
        const double ax = std::abs(x1);
        double P2;
        if (ax <= b3) {
            P2 = R3 * R3;
        } else {
            const double s = ax - b3;
            P2 = std::max(0.0, R3 * R3 - s * s);
        }
        return 2.0 * (std::pow(P2 + x1 * x1, 0.25) - std::sqrt(ax));
    };
    // x1 = s^2 removes the sqrt cusp at the origin; split at the cap joint.
    auto integrand = [&](double s) { return slice(s * s) * 2.0 * s; };
    const double sj = std::sqrt(b3), se = std::sqrt(X);
    double axial = 0.0;
    if (sj > 0.0) axial += quad::gauss_interval(integrand, 0.0, sj, quad_points);
    axial += quad::gauss_interval(integrand, sj, se, quad_points);
    return 2.0 * 6.28318530717958647692 * axial;  // both half-axes, times 2 pi
}

double capsule_scale(const Capsule& c, const Vec3& y) {
    // dist(y, s-core) - s R is strictly decreasing in s, so the boundary
    // scale is a clean bisection target.
    auto inside = [&](double s) {
        const double h = s * c.core_half();
        const Vec3 d = y - c.center;
        const double t = std::clamp(dot(d, c.axis), -h, h);
        return norm(d - t * c.axis) <= s * c.radius;
    };
    double hi = 1.0;
    while (!inside(hi)) {
        hi *= 2.0;
        if (hi > 1e9) return hi;
    }
    double lo = 0.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (inside(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double capsule_cutoff(const Capsule& c, const Vec3& y) {
    if (contains(c, y)) return 1.0;
    if (!contains(dilate(c, 2.0), y)) return 0.0;
    const double s = capsule_scale(c, y);
    if (s <= 1.0) return 1.0;
    if (s >= 2.0) return 0.0;
    auto h = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    return h(2.0 - s) / (h(2.0 - s) + h(s - 1.0));
}

BiotSavartOperator::BiotSavartOperator(const VectorField& omega, const Capsule& support,
                                       const QuadratureSpec& q)
    : support_(support) {
    q.validate();
    if (q.mode != QuadratureSpec::Mode::Tensor)
        throw std::invalid_argument("BiotSavartOperator: tensor quadrature required (cell exclusion)");
    const Capsule twice = dilate(support, 2.0);
    box_ = twice.bounding_box();
    n_ = q.resolution;
    const Vec3 e = box_.extent();
    h_ = {e.x / n_, e.y / n_, e.z / n_};
    cell_size_ = norm(h_);
    const double cell_vol = h_.x * h_.y * h_.z;
    const std::int64_t total = static_cast<std::int64_t>(n_) * n_ * n_;
    centers_.resize(static_cast<std::size_t>(total));
    moments_.resize(static_cast<std::size_t>(total));
    par::for_index(total, [&](std::int64_t idx) {
        const int iz = static_cast<int>(idx / (n_ * n_));
        const int iy = static_cast<int>((idx / n_) % n_);
        const int ix = static_cast<int>(idx % n_);
        const Vec3 y{box_.lo.x + (ix + 0.5) * h_.x, box_.lo.y + (iy + 0.5) * h_.y,
                     box_.lo.z + (iz + 0.5) * h_.z};
        centers_[static_cast<std::size_t>(idx)] = y;
        const double phi = capsule_cutoff(support_, y);
        moments_[static_cast<std::size_t>(idx)] =
            (phi > 0.0) ? (phi * cell_vol) * omega.value(y) : Vec3{};
    });
}

bool BiotSavartOperator::resolution_warning() const { return cell_size_ > 0.25 * support_.radius; }

Vec3 BiotSavartOperator::operator()(const Vec3& x) const {
    // Index of the cell containing x (if inside the source box): skipped,
    // and not compensated -- the kernel integrates to zero over a ball
    // centered at the target, so the omitted cell is O(h) at worst.
    std::int64_t skip = -1;
    if (box_.contains(x)) {
        const int ix = std::min(n_ - 1, static_cast<int>((x.x - box_.lo.x) / h_.x));
        const int iy = std::min(n_ - 1, static_cast<int>((x.y - box_.lo.y) / h_.y));
        const int iz = std::min(n_ - 1, static_cast<int>((x.z - box_.lo.z) / h_.z));
        skip = ix + static_cast<std::int64_t>(n_) * (iy + static_cast<std::int64_t>(n_) * iz);
    }
    const std::int64_t total = static_cast<std::int64_t>(centers_.size());
    const Vec3 sum = par::sum_index_vec3(total, [&](std::int64_t i) {
        if (i == skip) return Vec3{};
        const Vec3& m = moments_[static_cast<std::size_t>(i)];
        if (m.x == 0.0 && m.y == 0.0 && m.z == 0.0) return Vec3{};
        const Vec3 d = x - centers_[static_cast<std::size_t>(i)];
        const double r = norm(d);
        return cross(m, d) / (r * r * r);
    });
    return kInvFourPi * sum;
}

Vec3 biot_savart(const VectorField& omega, const Capsule& support, const Vec3& x,
                 const QuadratureSpec& q) {
    return BiotSavartOperator(omega, support, q)(x);
}

ManufacturedScalar ManufacturedScalar::constant(double c) {
    ManufacturedScalar m;
    m.value = [c](const Vec3&) { return c; };
    m.gradient = [](const Vec3&) { return Vec3{}; };
    m.laplacian = [](const Vec3&) { return 0.0; };
    return m;
}

ManufacturedScalar ManufacturedScalar::gaussian(const Vec3& center, double width, double amplitude) {
    if (!(width > 0.0)) throw std::invalid_argument("ManufacturedScalar: width must be positive");
    ManufacturedScalar m;
    const double iw2 = 1.0 / (width * width);
    m.value = [=](const Vec3& x) { return amplitude * std::exp(-0.5 * norm2(x - center) * iw2); };
    m.gradient = [=](const Vec3& x) {
        const Vec3 d = x - center;
        return (-amplitude * std::exp(-0.5 * norm2(d) * iw2) * iw2) * d;
    };
    m.laplacian = [=](const Vec3& x) {
        const Vec3 d = x - center;
        const double g = amplitude * std::exp(-0.5 * norm2(d) * iw2);
        return g * (norm2(d) * iw2 * iw2 - 3.0 * iw2);
    };
    return m;
}

namespace {

double lp_norm_on_capsule(const Capsule& c, const std::function<double(const Vec3&)>& f, double p,
                          const QuadratureSpec& q) {
    const double integral = capsule_integral(
        c, [&](const Vec3& y) { return std::pow(std::abs(f(y)), p); }, q);
    return std::pow(std::max(0.0, integral), 1.0 / p);
}

LocalEstimateReport assemble_report(const OseenKernel& k, const Capsule& c, double q_exp,
                                    const std::function<double(const Vec3&)>& theta,
                                    const std::function<double(const Vec3&)>& f,
                                    const std::function<double(const Vec3&)>& g_mag,
                                    const QuadratureSpec& quad) {
    if (!(q_exp > 1.0 && q_exp < 3.0))
        throw std::invalid_argument("local_estimate: exponent must lie in (1, 3)");
    LocalEstimateReport rep;
    rep.q = q_exp;
    rep.r = 3.0 * q_exp / (3.0 - q_exp);
    const Capsule half{c.center, 0.5 * c.radius, 0.5 * c.half_length, c.axis};
    const double R = c.radius, L = c.half_length;
    rep.lhs = lp_norm_on_capsule(half, theta, rep.r, quad.with_seed(rng::derive(quad.seed, 1)));
    rep.f_term = R * lp_norm_on_capsule(c, f, q_exp, quad.with_seed(rng::derive(quad.seed, 2)));
    rep.g_term = lp_norm_on_capsule(c, g_mag, q_exp, quad.with_seed(rng::derive(quad.seed, 3)));
    rep.theta_term = (k.U * R / L + 1.0 / R) *
                     lp_norm_on_capsule(c, theta, q_exp, quad.with_seed(rng::derive(quad.seed, 4)));
    rep.rhs = rep.f_term + rep.g_term + rep.theta_term;
    rep.ratio = rep.lhs / rep.rhs;
    return rep;
}

}  // namespace

LocalEstimateReport local_estimate_check(const OseenKernel& k, const Capsule& c,
                                         const ManufacturedScalar& theta, double q_exp,
                                         const QuadratureSpec& quad) {
    auto f = [&, U = k.U, nu = k.nu](const Vec3& y) {
        return U * theta.gradient(y).x - nu * theta.laplacian(y);
    };
    auto g = [](const Vec3&) { return 0.0; };
    return assemble_report(k, c, q_exp, theta.value, f, g, quad);
}

LocalEstimateReport local_estimate_check_divergence(const OseenKernel& k, const Capsule& c,
                                                    const ManufacturedScalar& theta, double q_exp,
                                                    const QuadratureSpec& quad) {
    // g = b theta - nu grad theta has div g = b . grad theta - nu Lap theta,
    // so theta solves the equation with f = 0.
    auto g_mag = [&, U = k.U, nu = k.nu](const Vec3& y) {
        const Vec3 g = Vec3{U * theta.value(y), 0.0, 0.0} - nu * theta.gradient(y);
        return norm(g);
    };
    auto f = [](const Vec3&) { return 0.0; };
    return assemble_report(k, c, q_exp, theta.value, f, g_mag, quad);
}

}  // namespace capflow
