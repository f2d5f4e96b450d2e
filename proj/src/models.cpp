#include <cmath>
#include <map>

#include "fvlab/errors.hpp"
#include "fvlab/relaxation_model.hpp"

namespace fvlab {

namespace {
constexpr double kGuard = 1e-13;  // strict exclusion band around Omega boundaries

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}
}  // namespace

void RelaxationModel::require_admissible(const Vec& U) const {
    if (!admissible(U))
        throw InvariantError(name() + ": inadmissible state (" +
                             admissibility_violation(U) + ")");
}

void RelaxationModel::require_equilibrium(const Vec& u) const {
    if (!equilibrium_admissible(u))
        throw InvariantError(name() + ": equilibrium vector outside domain");
}

Mat RelaxationModel::scaling_matrix(double) const {
    return Mat::Identity(state_dim(), state_dim());
}

void RelaxationModel::flux_batch(const Mat& states, Mat& out) const {
    for (Eigen::Index i = 0; i < states.cols(); ++i) out.col(i) = flux(states.col(i));
}

void RelaxationModel::relaxation_batch(const Mat& states, Mat& out) const {
    for (Eigen::Index i = 0; i < states.cols(); ++i)
        out.col(i) = relaxation(states.col(i));
}

double RelaxationModel::max_wave_speed_batch(const Mat& states) const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < states.cols(); ++i)
        s = std::max(s, max_wave_speed(states.col(i)));
    return s;
}

double eddington_factor(double xi) {
    if (std::abs(xi) > 1.0)
        throw InvariantError("eddington_factor: |f/e| > 1");
    return (3.0 + 4.0 * xi * xi) / (5.0 + 2.0 * std::sqrt(4.0 - 3.0 * xi * xi));
}

double eddington_factor_derivative(double xi) {
    if (std::abs(xi) > 1.0)
        throw InvariantError("eddington_factor_derivative: |f/e| > 1");
    const double s = std::sqrt(4.0 - 3.0 * xi * xi);
    const double num = 3.0 + 4.0 * xi * xi;
    const double den = 5.0 + 2.0 * s;
    // d/dxi of num/den with den' = -6 xi / s.
    return (8.0 * xi * den + num * 6.0 * xi / s) / (den * den);
}

// ============================================================================
// Euler equations with (linear) stiff friction
//
//   eps d_t rho     + d_x (rho v)             = 0
//   eps d_t (rho v) + d_x (rho v^2 + p(rho))  = -rho v / eps
//
// with p(rho) = kappa rho^gamma, gamma > 1. State U = (rho, m), m = rho v.
// Internal energy fixed by e'(rho) = p/rho^2 and e(0) = 0, i.e.
// e(rho) = kappa rho^(gamma-1) / (gamma-1).
// ============================================================================

class EulerFriction;

class EulerFrictionEntropy final : public EntropyPair {
public:
    EulerFrictionEntropy(double kappa, double gamma) : kappa_(kappa), gamma_(gamma) {}

    double internal_energy(double rho) const {
        return kappa_ * std::pow(rho, gamma_ - 1.0) / (gamma_ - 1.0);
    }
    double pressure(double rho) const { return kappa_ * std::pow(rho, gamma_); }
    double pressure_d(double rho) const {
        return kappa_ * gamma_ * std::pow(rho, gamma_ - 1.0);
    }

    double entropy(const Vec& U) const override {
        const double rho = U[0], m = U[1];
        return 0.5 * m * m / rho + rho * internal_energy(rho);
    }
    double entropy_flux(const Vec& U) const override {
        const double rho = U[0], m = U[1], v = m / rho;
        return 0.5 * m * v * v + (rho * internal_energy(rho) + pressure(rho)) * v;
    }
    Vec entropy_gradient(const Vec& U) const override {
        const double rho = U[0], m = U[1], v = m / rho;
        Vec g(2);
        g[0] = -0.5 * v * v + internal_energy(rho) + pressure(rho) / rho;
        g[1] = v;
        return g;
    }
    Mat entropy_hessian(const Vec& U) const override {
        const double rho = U[0], m = U[1], v = m / rho;
        Mat h(2, 2);
        h(0, 0) = v * v / rho + pressure_d(rho) / rho;
        h(0, 1) = h(1, 0) = -v / rho;
        h(1, 1) = 1.0 / rho;
        return h;
    }
    Vec multiplier(const Vec& u) const override {
        const double rho = u[0];
        return Vec::Constant(1, internal_energy(rho) + pressure(rho) / rho);
    }

private:
    double kappa_, gamma_;
};

class EulerFriction final : public RelaxationModel {
public:
    EulerFriction(double kappa, double gamma)
        : kappa_(kappa), gamma_(gamma), entropy_(kappa, gamma) {
        if (!(kappa > 0.0)) throw ConfigError("euler-friction: kappa must be > 0");
        if (!(gamma > 1.0)) throw ConfigError("euler-friction: gamma must be > 1");
        q_ = Mat::Zero(1, 2);
        q_(0, 0) = 1.0;
    }

    const std::string& name() const override {
        static const std::string n = "euler-friction";
        return n;
    }
    int state_dim() const override { return 2; }
    int equilibrium_dim() const override { return 1; }
    const Mat& conserved_projector() const override { return q_; }

    double pressure(double rho) const { return kappa_ * std::pow(rho, gamma_); }
    double pressure_d(double rho) const {
        return kappa_ * gamma_ * std::pow(rho, gamma_ - 1.0);
    }

    Vec flux(const Vec& U) const override {
        require_admissible(U);
        const double rho = U[0], m = U[1];
        Vec f(2);
        f[0] = m;
        f[1] = m * m / rho + pressure(rho);
        return f;
    }
    Vec relaxation(const Vec& U) const override {
        require_admissible(U);
        Vec r(2);
        r[0] = 0.0;
        r[1] = U[1];
        return r;
    }
    Vec equilibrium_lift(const Vec& u) const override {
        require_equilibrium(u);
        Vec U(2);
        U[0] = u[0];
        U[1] = 0.0;
        return U;
    }
    Mat flux_jacobian(const Vec& U) const override {
        const double rho = U[0], v = U[1] / rho;
        Mat a(2, 2);
        a << 0.0, 1.0, -v * v + pressure_d(rho), 2.0 * v;
        return a;
    }
    Mat relaxation_jacobian(const Vec&) const override {
        Mat b = Mat::Zero(2, 2);
        b(1, 1) = 1.0;
        return b;
    }
    Mat lift_jacobian(const Vec&) const override {
        Mat d = Mat::Zero(2, 1);
        d(0, 0) = 1.0;
        return d;
    }

    bool admissible(const Vec& U) const override {
        return U.allFinite() && U[0] > kGuard;
    }
    std::string admissibility_violation(const Vec& U) const override {
        if (!U.allFinite()) return "non-finite component";
        if (!(U[0] > kGuard)) return "rho <= 0";
        return "";
    }
    bool equilibrium_admissible(const Vec& u) const override {
        return u.size() == 1 && std::isfinite(u[0]) && u[0] > kGuard;
    }

    const EntropyPair* entropy() const override { return &entropy_; }

    double max_wave_speed(const Vec& U) const override {
        const double rho = U[0], v = U[1] / rho;
        return std::abs(v) + std::sqrt(pressure_d(rho));
    }

    Mat closed_form_diffusion(const Vec& u) const override {
        return Mat::Constant(1, 1, pressure_d(u[0]));  // d_t rho = d_x(p'(rho) d_x rho)
    }

    Vec sample_state(std::mt19937_64& rng) const override {
        const double rho = uniform(rng, 0.1, 2.0);
        const double v = uniform(rng, -1.0, 1.0);
        Vec U(2);
        U << rho, rho * v;
        return U;
    }
    Vec sample_equilibrium(std::mt19937_64& rng) const override {
        return Vec::Constant(1, uniform(rng, 0.1, 2.0));
    }

    void flux_batch(const Mat& states, Mat& out) const override {
        for (Eigen::Index i = 0; i < states.cols(); ++i) {
            const double rho = states(0, i), m = states(1, i);
            out(0, i) = m;
            out(1, i) = m * m / rho + kappa_ * std::pow(rho, gamma_);
        }
    }
    void relaxation_batch(const Mat& states, Mat& out) const override {
        out.row(0).setZero();
        out.row(1) = states.row(1);
    }
    double max_wave_speed_batch(const Mat& states) const override {
        double s = 0.0;
        for (Eigen::Index i = 0; i < states.cols(); ++i) {
            const double rho = states(0, i), v = states(1, i) / rho;
            s = std::max(s, std::abs(v) + std::sqrt(pressure_d(rho)));
        }
        return s;
    }
    bool scalar_diffusion(double u, double& m_out) const override {
        m_out = pressure_d(u);
        return true;
    }

private:
    double kappa_, gamma_;
    EulerFrictionEntropy entropy_;
    Mat q_;
};

// ============================================================================
// M1 model of radiative transfer with stiff interaction
//
//   eps d_t e   + d_x f              = (tau^4 - e) / eps
//   eps d_t f   + d_x (chi(f/e) e)   = -f / eps
//   eps d_t tau                      = (e - tau^4) / eps
//
// State U = (e, f, tau); conserved quantity u = e + tau; equilibria
// E(u) = (tau^4, 0, tau) with u = tau + tau^4.
// ============================================================================

class M1Model final : public RelaxationModel {
public:
    M1Model() {
        q_ = Mat::Zero(1, 3);
        q_(0, 0) = 1.0;
        q_(0, 2) = 1.0;
    }

    const std::string& name() const override {
        static const std::string n = "m1";
        return n;
    }
    int state_dim() const override { return 3; }
    int equilibrium_dim() const override { return 1; }
    const Mat& conserved_projector() const override { return q_; }

    // Inverts u = tau + tau^4 on tau > 0 (strictly increasing).
    static double temperature_from_u(double u) {
        auto f = [u](double t) { return t + t * t * t * t - u; };
        auto df = [](double t) { return 1.0 + 4.0 * t * t * t; };
        const double guess = (u > 1.0) ? std::pow(u, 0.25) : u;
        return solve_increasing_positive(f, df, std::max(guess, 1e-8), 1e-14);
    }

    Vec flux(const Vec& U) const override {
        require_admissible(U);
        const double e = U[0], f = U[1];
        Vec out(3);
        out[0] = f;
        out[1] = eddington_factor(f / e) * e;
        out[2] = 0.0;
        return out;
    }
    Vec relaxation(const Vec& U) const override {
        require_admissible(U);
        const double e = U[0], f = U[1], tau = U[2];
        const double t4 = tau * tau * tau * tau;
        Vec r(3);
        r[0] = e - t4;
        r[1] = f;
        r[2] = t4 - e;
        return r;
    }
    Vec equilibrium_lift(const Vec& u) const override {
        require_equilibrium(u);
        const double tau = temperature_from_u(u[0]);
        Vec U(3);
        U << tau * tau * tau * tau, 0.0, tau;
        return U;
    }
    Mat flux_jacobian(const Vec& U) const override {
        const double e = U[0], f = U[1];
        const double xi = f / e;
        const double chi = eddington_factor(xi);
        const double dchi = eddington_factor_derivative(xi);
        Mat a = Mat::Zero(3, 3);
        a(0, 1) = 1.0;
        a(1, 0) = chi - xi * dchi;
        a(1, 1) = dchi;
        return a;
    }
    Mat relaxation_jacobian(const Vec& U) const override {
        const double tau = U[2];
        const double d4 = 4.0 * tau * tau * tau;
        Mat b = Mat::Zero(3, 3);
        b(0, 0) = 1.0;
        b(0, 2) = -d4;
        b(1, 1) = 1.0;
        b(2, 0) = -1.0;
        b(2, 2) = d4;
        return b;
    }
    Mat lift_jacobian(const Vec& u) const override {
        const double tau = temperature_from_u(u[0]);
        const double dtau = 1.0 / (1.0 + 4.0 * tau * tau * tau);
        Mat d(3, 1);
        d << 4.0 * tau * tau * tau * dtau, 0.0, dtau;
        return d;
    }

    bool admissible(const Vec& U) const override {
        return U.allFinite() && U[0] > kGuard && U[2] > kGuard &&
               std::abs(U[1]) <= U[0] * (1.0 - kGuard);
    }
    std::string admissibility_violation(const Vec& U) const override {
        if (!U.allFinite()) return "non-finite component";
        if (!(U[0] > kGuard)) return "e <= 0";
        if (!(U[2] > kGuard)) return "tau <= 0";
        if (!(std::abs(U[1]) <= U[0] * (1.0 - kGuard))) return "|f/e| >= 1";
        return "";
    }
    bool equilibrium_admissible(const Vec& u) const override {
        return u.size() == 1 && std::isfinite(u[0]) && u[0] > kGuard;
    }

    // Characteristic speeds of the M1 closure are bounded by the (normalized)
    // speed of light.
    double max_wave_speed(const Vec&) const override { return 1.0; }

    Mat closed_form_diffusion(const Vec& u) const override {
        // d_t (tau + tau^4) = d_x((4/3) tau^3 d_x tau); in the u variable the
        // coefficient picks up dtau/du = 1/(1 + 4 tau^3).
        const double tau = temperature_from_u(u[0]);
        const double t3 = tau * tau * tau;
        return Mat::Constant(1, 1, (4.0 / 3.0) * t3 / (1.0 + 4.0 * t3));
    }
    bool scalar_diffusion(double u, double& m_out) const override {
        const double tau = temperature_from_u(u);
        const double t3 = tau * tau * tau;
        m_out = (4.0 / 3.0) * t3 / (1.0 + 4.0 * t3);
        return true;
    }

    Vec sample_state(std::mt19937_64& rng) const override {
        const double e = uniform(rng, 0.1, 2.0);
        const double xi = uniform(rng, -0.95, 0.95);
        const double tau = uniform(rng, 0.1, 1.5);
        Vec U(3);
        U << e, xi * e, tau;
        return U;
    }
    Vec sample_equilibrium(std::mt19937_64& rng) const override {
        const double tau = uniform(rng, 0.1, 1.5);
        return Vec::Constant(1, tau + tau * tau * tau * tau);
    }

private:
    Mat q_;
};

// ============================================================================
// Coupled Euler/M1 model: stiff friction and stiff radiative transfer
//
//   eps d_t rho + d_x (rho v)            = 0
//   eps d_t m   + d_x (rho v^2 + p(rho)) = (-kappa m + sigma f) / eps
//   eps d_t e   + d_x f                  = 0
//   eps d_t f   + d_x (chi(f/e) e)       = -sigma f / eps
//
// with p(rho) = C_p rho^eta. State U = (rho, m, e, f); u = (rho, e).
// ============================================================================

class EulerM1 final : public RelaxationModel {
public:
    EulerM1(double kappa, double sigma, double cp, double eta)
        : kappa_(kappa), sigma_(sigma), cp_(cp), eta_(eta) {
        if (!(kappa > 0.0) || !(sigma > 0.0))
            throw ConfigError("euler-m1: kappa and sigma must be > 0");
        if (!(eta > 1.0)) throw ConfigError("euler-m1: eta must be > 1");
        q_ = Mat::Zero(2, 4);
        q_(0, 0) = 1.0;
        q_(1, 2) = 1.0;
    }

    const std::string& name() const override {
        static const std::string n = "euler-m1";
        return n;
    }
    int state_dim() const override { return 4; }
    int equilibrium_dim() const override { return 2; }
    const Mat& conserved_projector() const override { return q_; }

    double pressure(double rho) const { return cp_ * std::pow(rho, eta_); }
    double pressure_d(double rho) const { return cp_ * eta_ * std::pow(rho, eta_ - 1.0); }

    Vec flux(const Vec& U) const override {
        require_admissible(U);
        const double rho = U[0], m = U[1], e = U[2], f = U[3];
        Vec out(4);
        out[0] = m;
        out[1] = m * m / rho + pressure(rho);
        out[2] = f;
        out[3] = eddington_factor(f / e) * e;
        return out;
    }
    Vec relaxation(const Vec& U) const override {
        require_admissible(U);
        Vec r(4);
        r[0] = 0.0;
        r[1] = kappa_ * U[1] - sigma_ * U[3];
        r[2] = 0.0;
        r[3] = sigma_ * U[3];
        return r;
    }
    Vec equilibrium_lift(const Vec& u) const override {
        require_equilibrium(u);
        Vec U(4);
        U << u[0], 0.0, u[1], 0.0;
        return U;
    }
    Mat flux_jacobian(const Vec& U) const override {
        const double rho = U[0], v = U[1] / rho, e = U[2], f = U[3];
        const double xi = f / e;
        const double chi = eddington_factor(xi);
        const double dchi = eddington_factor_derivative(xi);
        Mat a = Mat::Zero(4, 4);
        a(0, 1) = 1.0;
        a(1, 0) = -v * v + pressure_d(rho);
        a(1, 1) = 2.0 * v;
        a(2, 3) = 1.0;
        a(3, 2) = chi - xi * dchi;
        a(3, 3) = dchi;
        return a;
    }
    Mat relaxation_jacobian(const Vec&) const override {
        Mat b = Mat::Zero(4, 4);
        b(1, 1) = kappa_;
        b(1, 3) = -sigma_;
        b(3, 3) = sigma_;
        return b;
    }
    Mat lift_jacobian(const Vec&) const override {
        Mat d = Mat::Zero(4, 2);
        d(0, 0) = 1.0;
        d(2, 1) = 1.0;
        return d;
    }

    bool admissible(const Vec& U) const override {
        return U.allFinite() && U[0] > kGuard && U[2] > kGuard &&
               std::abs(U[3]) <= U[2] * (1.0 - kGuard);
    }
    std::string admissibility_violation(const Vec& U) const override {
        if (!U.allFinite()) return "non-finite component";
        if (!(U[0] > kGuard)) return "rho <= 0";
        if (!(U[2] > kGuard)) return "e <= 0";
        if (!(std::abs(U[3]) <= U[2] * (1.0 - kGuard))) return "|f/e| >= 1";
        return "";
    }
    bool equilibrium_admissible(const Vec& u) const override {
        return u.size() == 2 && u.allFinite() && u[0] > kGuard && u[1] > kGuard;
    }

    double max_wave_speed(const Vec& U) const override {
        const double rho = U[0], v = U[1] / rho;
        return std::max(std::abs(v) + std::sqrt(pressure_d(rho)), 1.0);
    }

    Mat closed_form_diffusion(const Vec& u) const override {
        // d_t rho = (1/kappa) d_x^2 p(rho) + (1/(3 kappa)) d_x^2 e
        // d_t e   = (1/(3 sigma)) d_x^2 e
        Mat m(2, 2);
        m << pressure_d(u[0]) / kappa_, 1.0 / (3.0 * kappa_), 0.0,
            1.0 / (3.0 * sigma_);
        return m;
    }

    Vec sample_state(std::mt19937_64& rng) const override {
        const double rho = uniform(rng, 0.1, 2.0);
        const double v = uniform(rng, -1.0, 1.0);
        const double e = uniform(rng, 0.1, 2.0);
        const double xi = uniform(rng, -0.95, 0.95);
        Vec U(4);
        U << rho, rho * v, e, xi * e;
        return U;
    }
    Vec sample_equilibrium(std::mt19937_64& rng) const override {
        Vec u(2);
        u << uniform(rng, 0.1, 2.0), uniform(rng, 0.1, 2.0);
        return u;
    }

private:
    double kappa_, sigma_, cp_, eta_;
    Mat q_;
};

// ============================================================================
// Shallow water with nonlinear friction (q = 2)
//
//   eps d_t h + d_x (h v)                    = 0
//   eps d_t q + d_x (h v^2 + g h^2 / 2)      = -kappa(h)^2 g q |q| / eps^2
//
// with kappa(h) = kappa0 / h. State U = (h, q), q = h v. The relaxation is
// quadratic: R(E(u) + eps V) = eps^2 R(E(u) + M(eps) V), M(eps) = diag(eps, 1).
// ============================================================================

class ShallowWaterEntropy final : public EntropyPair {
public:
    explicit ShallowWaterEntropy(double g) : g_(g) {}

    double entropy(const Vec& U) const override {
        const double h = U[0], q = U[1];
        return 0.5 * q * q / h + 0.5 * g_ * h * h;
    }
    double entropy_flux(const Vec& U) const override {
        const double h = U[0], q = U[1], v = q / h;
        return (0.5 * h * v * v + g_ * h * h) * v;
    }
    Vec entropy_gradient(const Vec& U) const override {
        const double h = U[0], q = U[1], v = q / h;
        Vec g(2);
        g[0] = -0.5 * v * v + g_ * h;
        g[1] = v;
        return g;
    }
    Mat entropy_hessian(const Vec& U) const override {
        const double h = U[0], q = U[1], v = q / h;
        Mat m(2, 2);
        m(0, 0) = v * v / h + g_;
        m(0, 1) = m(1, 0) = -v / h;
        m(1, 1) = 1.0 / h;
        return m;
    }
    Vec multiplier(const Vec& u) const override {
        return Vec::Constant(1, g_ * u[0]);
    }

private:
    double g_;
};

class ShallowWaterFriction final : public RelaxationModel {
public:
    ShallowWaterFriction(double g, double kappa0)
        : g_(g), kappa0_(kappa0), entropy_(g) {
        if (!(g > 0.0)) throw ConfigError("shallow-water-friction: gravity must be > 0");
        if (!(kappa0 > 0.0)) throw ConfigError("shallow-water-friction: kappa0 must be > 0");
        q_ = Mat::Zero(1, 2);
        q_(0, 0) = 1.0;
    }

    const std::string& name() const override {
        static const std::string n = "shallow-water-friction";
        return n;
    }
    int state_dim() const override { return 2; }
    int equilibrium_dim() const override { return 1; }
    const Mat& conserved_projector() const override { return q_; }

    double gravity() const { return g_; }
    double friction(double h) const { return kappa0_ / h; }

    Vec flux(const Vec& U) const override {
        require_admissible(U);
        const double h = U[0], q = U[1];
        Vec f(2);
        f[0] = q;
        f[1] = q * q / h + 0.5 * g_ * h * h;
        return f;
    }
    Vec relaxation(const Vec& U) const override {
        require_admissible(U);
        const double h = U[0], q = U[1];
        const double k = friction(h);
        Vec r(2);
        r[0] = 0.0;
        r[1] = k * k * g_ * q * std::abs(q);
        return r;
    }
    Vec equilibrium_lift(const Vec& u) const override {
        require_equilibrium(u);
        Vec U(2);
        U << u[0], 0.0;
        return U;
    }
    Mat flux_jacobian(const Vec& U) const override {
        const double h = U[0], v = U[1] / h;
        Mat a(2, 2);
        a << 0.0, 1.0, -v * v + g_ * h, 2.0 * v;
        return a;
    }
    Mat relaxation_jacobian(const Vec& U) const override {
        const double h = U[0], q = U[1];
        const double k = friction(h);
        Mat b = Mat::Zero(2, 2);
        // d/dh of (kappa0/h)^2 g q|q| and d/dq of k^2 g q|q|.
        b(1, 0) = -2.0 * k * k / h * g_ * q * std::abs(q);
        b(1, 1) = k * k * g_ * 2.0 * std::abs(q);
        return b;
    }
    Mat lift_jacobian(const Vec&) const override {
        Mat d = Mat::Zero(2, 1);
        d(0, 0) = 1.0;
        return d;
    }

    bool admissible(const Vec& U) const override {
        return U.allFinite() && U[0] > kGuard;
    }
    std::string admissibility_violation(const Vec& U) const override {
        if (!U.allFinite()) return "non-finite component";
        if (!(U[0] > kGuard)) return "h <= 0";
        return "";
    }
    bool equilibrium_admissible(const Vec& u) const override {
        return u.size() == 1 && std::isfinite(u[0]) && u[0] > kGuard;
    }

    int relaxation_exponent() const override { return 2; }
    Mat scaling_matrix(double eps) const override {
        Mat m = Mat::Identity(2, 2);
        m(0, 0) = eps;
        return m;
    }

    const EntropyPair* entropy() const override { return &entropy_; }

    double max_wave_speed(const Vec& U) const override {
        const double h = U[0], v = U[1] / h;
        return std::abs(v) + std::sqrt(g_ * h);
    }

    Mat closed_form_diffusion(const Vec&) const override {
        throw ConfigError(
            "shallow-water-friction: q = 2, the late-time limit is fully "
            "nonlinear; use the regularized EN2 flux of the parabolic module");
    }

    Vec sample_state(std::mt19937_64& rng) const override {
        const double h = uniform(rng, 0.1, 2.0);
        const double v = uniform(rng, -1.0, 1.0);
        Vec U(2);
        U << h, h * v;
        return U;
    }
    Vec sample_equilibrium(std::mt19937_64& rng) const override {
        return Vec::Constant(1, uniform(rng, 0.1, 2.0));
    }

    void flux_batch(const Mat& states, Mat& out) const override {
        for (Eigen::Index i = 0; i < states.cols(); ++i) {
            const double h = states(0, i), q = states(1, i);
            out(0, i) = q;
            out(1, i) = q * q / h + 0.5 * g_ * h * h;
        }
    }
    void relaxation_batch(const Mat& states, Mat& out) const override {
        for (Eigen::Index i = 0; i < states.cols(); ++i) {
            const double h = states(0, i), q = states(1, i);
            const double k = kappa0_ / h;
            out(0, i) = 0.0;
            out(1, i) = k * k * g_ * q * std::abs(q);
        }
    }
    double max_wave_speed_batch(const Mat& states) const override {
        double s = 0.0;
        for (Eigen::Index i = 0; i < states.cols(); ++i) {
            const double h = states(0, i), v = states(1, i) / h;
            s = std::max(s, std::abs(v) + std::sqrt(g_ * h));
        }
        return s;
    }

private:
    double g_, kappa0_;
    ShallowWaterEntropy entropy_;
    Mat q_;
};

// ============================================================================
// Registry
// ============================================================================

namespace {
double param_or(const std::vector<std::pair<std::string, double>>& params,
                const std::string& key, double fallback,
                std::map<std::string, bool>& seen) {
    double value = fallback;
    for (const auto& [k, v] : params)
        if (k == key) {
            value = v;
            seen[k] = true;
        }
    return value;
}
}  // namespace

std::unique_ptr<RelaxationModel> make_model(
    const std::string& name,
    const std::vector<std::pair<std::string, double>>& params) {
    std::map<std::string, bool> seen;
    for (const auto& [k, v] : params) seen[k] = false;

    std::unique_ptr<RelaxationModel> model;
    if (name == "euler-friction") {
        const double kappa = param_or(params, "kappa", 1.0, seen);
        const double gamma = param_or(params, "gamma", 2.0, seen);
        model = std::make_unique<EulerFriction>(kappa, gamma);
    } else if (name == "m1") {
        model = std::make_unique<M1Model>();
    } else if (name == "euler-m1") {
        const double kappa = param_or(params, "kappa", 1.0, seen);
        const double sigma = param_or(params, "sigma", 1.0, seen);
        const double cp = param_or(params, "C_p", 0.01, seen);
        const double eta = param_or(params, "eta", 1.5, seen);
        model = std::make_unique<EulerM1>(kappa, sigma, cp, eta);
    } else if (name == "shallow-water-friction") {
        const double g = param_or(params, "gravity", 1.0, seen);
        const double kappa0 = param_or(params, "kappa0", 1.0, seen);
        model = std::make_unique<ShallowWaterFriction>(g, kappa0);
    } else {
        throw ConfigError("unknown model \"" + name + "\"");
    }
    for (const auto& [k, used] : seen)
        if (!used)
            throw ConfigError("model " + name + ": unknown parameter \"" + k + "\"");
    return model;
}

std::vector<std::string> model_names() {
    return {"euler-friction", "m1", "euler-m1", "shallow-water-friction"};
}

}  // namespace fvlab
