#include "fvlab/ap_scheme.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "fvlab/errors.hpp"
#include "fvlab/hll_scheme.hpp"

namespace fvlab {

namespace {

// ----------------------------------------------------------------------------
// Q-adapted coordinates
//
// Pinv stacks Q on top of an orthonormal basis of ker Q, so the first n
// adapted components of a vector are its conserved projection. For the
// models whose Q selects state components (all except m1) the change of
// basis is a permutation and is applied by index.
// ----------------------------------------------------------------------------
struct AdaptedBasis {
    int N = 0, n = 0;
    bool selection = false;
    std::vector<int> cons;  // selection path: cons[k] = state index of row k
    std::vector<int> rest;  // remaining state indices
    Mat P, Pinv;            // general path

    static AdaptedBasis build(const Mat& Q);
};

AdaptedBasis AdaptedBasis::build(const Mat& Q) {
    AdaptedBasis ab;
    ab.n = static_cast<int>(Q.rows());
    ab.N = static_cast<int>(Q.cols());

    ab.selection = true;
    std::vector<bool> used(ab.N, false);
    for (int k = 0; k < ab.n && ab.selection; ++k) {
        int hit = -1;
        for (int j = 0; j < ab.N; ++j) {
            if (Q(k, j) == 0.0) continue;
            if (Q(k, j) == 1.0 && hit < 0 && !used[j]) {
                hit = j;
            } else {
                hit = -1;
                break;
            }
        }
        if (hit < 0) {
            ab.selection = false;
        } else {
            used[hit] = true;
            ab.cons.push_back(hit);
        }
    }
    if (ab.selection) {
        for (int j = 0; j < ab.N; ++j)
            if (!used[j]) ab.rest.push_back(j);
        return ab;
    }

    ab.cons.clear();
    Eigen::JacobiSVD<Mat> svd(Q, Eigen::ComputeFullV);
    ab.Pinv.resize(ab.N, ab.N);
    ab.Pinv.topRows(ab.n) = Q;
    ab.Pinv.bottomRows(ab.N - ab.n) =
        svd.matrixV().rightCols(ab.N - ab.n).transpose();
    ab.P = ab.Pinv.inverse();
    return ab;
}

// Dense (I + sigma) from the adapted blocks: conserved block b^2 Mhat^{-1},
// identity elsewhere.
Mat dense_one_plus_sigma(const AdaptedBasis& ab, const Mat& Mhat, double b) {
    Mat block = Mat::Identity(ab.N, ab.N);
    block.topLeftCorner(ab.n, ab.n) = b * b * Mhat.inverse();
    if (ab.selection) {
        Mat out = Mat::Identity(ab.N, ab.N);
        for (int k = 0; k < ab.n; ++k) {
            for (int l = 0; l < ab.n; ++l) out(ab.cons[k], ab.cons[l]) = block(k, l);
            out(ab.cons[k], ab.cons[k]) = block(k, k);
        }
        return out;
    }
    return ab.P * block * ab.Pinv;
}

void clamp_diffusion(Mat& Mhat, double floor) {
    // The closed forms are scalar or triangular; clamping the diagonal
    // bounds the spectrum away from zero.
    for (Eigen::Index k = 0; k < Mhat.rows(); ++k)
        if (Mhat(k, k) < floor) Mhat(k, k) = floor;
}

double condition_number(const Mat& m) {
    Eigen::JacobiSVD<Mat> svd(m);
    const Vec sv = svd.singularValues();
    if (sv[sv.size() - 1] <= 0.0) return std::numeric_limits<double>::infinity();
    return sv[0] / sv[sv.size() - 1];
}

}  // namespace

// ============================================================================
// Dense diagnostic operations
// ============================================================================

Mat alpha_matrix(double gamma, double dx, double b, const Mat& sigma) {
    if (!(gamma >= 0.0) || !(dx > 0.0) || !(b > 0.0))
        throw ConfigError("alpha_matrix: need gamma >= 0, dx > 0, b > 0");
    const Eigen::Index N = sigma.rows();
    const Mat system = Mat::Identity(N, N) +
                       (gamma * dx / (2.0 * b)) * (Mat::Identity(N, N) + sigma);
    Eigen::FullPivLU<Mat> lu(system);
    if (!lu.isInvertible())
        throw ConfigError("alpha_matrix: I + (gamma dx/2b)(I + sigma) is singular");
    return lu.inverse();
}

SigmaConstruction sigma_from_target_diffusion(const RelaxationModel& model,
                                              const Vec& uL, const Vec& uR,
                                              double b, double diffusion_floor) {
    model.require_equilibrium(uL);
    model.require_equilibrium(uR);
    const int N = model.state_dim();
    const int n = model.equilibrium_dim();

    SigmaConstruction out;
    out.Mhat = model.closed_form_diffusion(0.5 * (uL + uR));
    clamp_diffusion(out.Mhat, diffusion_floor);

    const AdaptedBasis ab = AdaptedBasis::build(model.conserved_projector());
    const Mat one_plus_sigma = dense_one_plus_sigma(ab, out.Mhat, b);
    if (condition_number(one_plus_sigma) > 1e12)
        throw ConfigError(
            "sigma_from_target_diffusion: b^2 M^{-1} is ill-conditioned at this "
            "interface; increase b");
    out.sigma = one_plus_sigma - Mat::Identity(N, N);

    // Commutation condition is met by construction; assert it anyway.
    const Mat& Q = model.conserved_projector();
    const Mat residual =
        Q * one_plus_sigma.inverse() - (out.Mhat * Q) / (b * b);
    if (inf_norm(residual) > 1e-10)
        throw NumericalError(
            "sigma_from_target_diffusion: commutation residual " +
            std::to_string(inf_norm(residual)));
    (void)n;
    return out;
}

std::pair<Vec, Vec> modified_interface_states(const RelaxationModel& model,
                                              const Vec& UL, const Vec& UR,
                                              double b, const Mat& alpha,
                                              const Mat& sigma) {
    const Eigen::Index N = UL.size();
    const Mat one_plus_sigma = Mat::Identity(N, N) + sigma;
    Eigen::FullPivLU<Mat> lu(one_plus_sigma);
    if (!lu.isInvertible())
        throw ConfigError("modified_interface_states: I + sigma is singular");

    const Vec ustar = intermediate_state(model, UL, UR, b);
    const Mat residue = Mat::Identity(N, N) - alpha;
    const Vec rbar_l = lu.solve(model.relaxation(UL));
    const Vec rbar_r = lu.solve(model.relaxation(UR));
    return {alpha * ustar + residue * (UL - rbar_l),
            alpha * ustar + residue * (UR - rbar_r)};
}

void APConfig::validate() const {
    if (!(eps > 0.0 && eps <= 1.0))
        throw ConfigError("ap: epsilon must lie in (0, 1]");
    if (!(b > 0.0)) throw ConfigError("ap: wave speed b must be > 0");
    if (!(diffusion_floor > 0.0))
        throw ConfigError("ap: diffusion floor must be > 0");
}

// ============================================================================
// Stepping kernel
// ============================================================================

namespace {

// Per-interface alpha factor in adapted coordinates: an n x n block G on the
// conserved components and a scalar on the rest.
struct AlphaBlocks {
    std::vector<double> G;  // cells * n * n, column-major per interface
    std::vector<double> free_scalar;
};

class APStepper {
public:
    APStepper(const RelaxationModel& model, const APConfig& cfg,
              const UniformGrid1D& grid)
        : model_(model),
          cfg_(cfg),
          grid_(grid),
          ab_(AdaptedBasis::build(model.conserved_projector())),
          N_(model.state_dim()),
          n_(model.equilibrium_dim()),
          C_(grid.cells) {
        flux_.resize(N_, C_);
        relax_.resize(N_, C_);
        fhat_.resize(N_, C_);
        blocks_.G.assign(static_cast<size_t>(C_) * n_ * n_, 0.0);
        blocks_.free_scalar.assign(C_, 0.0);
        scratch_.assign(4 * N_, 0.0);
    }

    void step(const Mat& U, Mat& Unext, double dt, double b) {
        const double eps = cfg_.eps;
        const double dx = grid_.dx;
        const double ds = dt / eps;  // executed Riemann-fan step
        if (b * ds / dx > 0.5 * (1.0 + 1e-9))
            throw NumericalError(
                "ap_step: hyperbolic CFL violated, b (dt/eps)/dx = " +
                std::to_string(b * ds / dx) + " > 1/2");

        const int q = model_.relaxation_exponent();
        const double gamma = cfg_.relaxation_enabled ? std::pow(eps, -q) : 0.0;
        const double a = gamma * dx / (2.0 * b);
        const double lam = ds / dx;
        const double relax_coef = 0.5 * ds * gamma;

        model_.flux_batch(U, flux_);
        if (cfg_.relaxation_enabled) model_.relaxation_batch(U, relax_);

        build_interfaces(U, b, a);

        double* tmp_p = scratch_.data();
        double* tmp_m = tmp_p + N_;
        double* acc_p = tmp_m + N_;
        double* acc_m = acc_p + N_;
        for (int i = 0; i < C_; ++i) {
            const int m = (i + C_ - 1) % C_;
            const double* fh_p = fhat_.col(i).data();
            const double* fh_m = fhat_.col(m).data();
            const double* f_i = flux_.col(i).data();
            for (int k = 0; k < N_; ++k) {
                tmp_p[k] = fh_p[k] - f_i[k];
                tmp_m[k] = fh_m[k] - f_i[k];
            }
            apply_alpha(i, tmp_p, acc_p);
            apply_alpha(m, tmp_m, acc_m);
            double* out = Unext.col(i).data();
            const double* u_i = U.col(i).data();
            for (int k = 0; k < N_; ++k)
                out[k] = u_i[k] - lam * (acc_p[k] - acc_m[k]);
            if (cfg_.relaxation_enabled) {
                const double* r_i = relax_.col(i).data();
                apply_alpha(i, r_i, acc_p);
                apply_alpha(m, r_i, acc_m);
                for (int k = 0; k < N_; ++k)
                    out[k] -= relax_coef * (acc_p[k] + acc_m[k]);
            }
        }
    }

private:
    void build_interfaces(const Mat& U, double b, double a) {
        const double af = 1.0 / (1.0 + a);
        Vec um(n_);
        Mat Mhat;
        for (int i = 0; i < C_; ++i) {
            const int j = (i + 1) % C_;
            // HLL flux.
            {
                const double* ui = U.col(i).data();
                const double* uj = U.col(j).data();
                const double* fi = flux_.col(i).data();
                const double* fj = flux_.col(j).data();
                double* fh = fhat_.col(i).data();
                for (int k = 0; k < N_; ++k)
                    fh[k] = 0.5 * (fi[k] + fj[k]) - 0.5 * b * (uj[k] - ui[k]);
            }
            blocks_.free_scalar[i] = af;
            double* G = blocks_.G.data() + static_cast<size_t>(i) * n_ * n_;
            if (cfg_.sigma_rule == SigmaRule::Zero || !cfg_.relaxation_enabled) {
                for (int k = 0; k < n_ * n_; ++k) G[k] = 0.0;
                for (int k = 0; k < n_; ++k) G[k * n_ + k] = af;
                continue;
            }
            // Conserved block alpha = M (M + a b^2 I)^{-1}.
            const double ab2 = a * b * b;
            if (n_ == 1) {
                double mval;
                if (ab_.selection && model_.scalar_diffusion(
                        0.5 * (U(ab_.cons[0], i) + U(ab_.cons[0], j)), mval)) {
                    // fast path
                } else {
                    const Mat& Q = model_.conserved_projector();
                    um = 0.5 * (Q * U.col(i) + Q * U.col(j));
                    mval = model_.closed_form_diffusion(um)(0, 0);
                }
                if (mval < cfg_.diffusion_floor) mval = cfg_.diffusion_floor;
                G[0] = mval / (mval + ab2);
            } else {
                const Mat& Q = model_.conserved_projector();
                um = 0.5 * (Q * U.col(i) + Q * U.col(j));
                Mhat = model_.closed_form_diffusion(um);
                clamp_diffusion(Mhat, cfg_.diffusion_floor);
                const Mat Gm =
                    Mhat * (Mhat + ab2 * Mat::Identity(n_, n_)).inverse();
                for (int col = 0; col < n_; ++col)
                    for (int row = 0; row < n_; ++row) G[col * n_ + row] = Gm(row, col);
            }
        }
    }

    // y = alpha_i x in state coordinates.
    void apply_alpha(int i, const double* x, double* y) const {
        const double* G = blocks_.G.data() + static_cast<size_t>(i) * n_ * n_;
        const double af = blocks_.free_scalar[i];
        if (ab_.selection) {
            for (int j : ab_.rest) y[j] = af * x[j];
            for (int r = 0; r < n_; ++r) {
                double acc = 0.0;
                for (int c = 0; c < n_; ++c) acc += G[c * n_ + r] * x[ab_.cons[c]];
                y[ab_.cons[r]] = acc;
            }
            return;
        }
        // General path: adapted = Pinv x, blocks, back through P.
        double ad[8], bd[8];
        for (int r = 0; r < N_; ++r) {
            double acc = 0.0;
            for (int c = 0; c < N_; ++c) acc += ab_.Pinv(r, c) * x[c];
            ad[r] = acc;
        }
        for (int r = 0; r < n_; ++r) {
            double acc = 0.0;
            for (int c = 0; c < n_; ++c) acc += G[c * n_ + r] * ad[c];
            bd[r] = acc;
        }
        for (int r = n_; r < N_; ++r) bd[r] = af * ad[r];
        for (int r = 0; r < N_; ++r) {
            double acc = 0.0;
            for (int c = 0; c < N_; ++c) acc += ab_.P(r, c) * bd[c];
            y[r] = acc;
        }
    }

    const RelaxationModel& model_;
    APConfig cfg_;
    UniformGrid1D grid_;
    AdaptedBasis ab_;
    int N_, n_, C_;
    Mat flux_, relax_, fhat_;
    AlphaBlocks blocks_;
    std::vector<double> scratch_;
};

}  // namespace

DiscreteField ap_step(const RelaxationModel& model, const DiscreteField& field,
                      const APConfig& cfg, double dt) {
    cfg.validate();
    APStepper stepper(model, cfg, field.grid);
    DiscreteField next;
    next.grid = field.grid;
    next.time = field.time + dt;
    next.states.resize(field.states.rows(), field.states.cols());
    stepper.step(field.states, next.states, dt, cfg.b);
    require_admissible_field(model, next.states);
    return next;
}

Mat discrete_asymptotic_step(const RelaxationModel& model, const Mat& u_field,
                             double dt, double dx, double diffusion_floor) {
    const int n = static_cast<int>(u_field.rows());
    const int C = static_cast<int>(u_field.cols());

    std::vector<Mat> Mhalf(C);
    double mmax = 0.0;
    for (int i = 0; i < C; ++i) {
        const int j = (i + 1) % C;
        Mhalf[i] =
            model.closed_form_diffusion(0.5 * (u_field.col(i) + u_field.col(j)));
        clamp_diffusion(Mhalf[i], diffusion_floor);
        mmax = std::max(mmax, inf_norm(Mhalf[i]));
    }
    if (dt * mmax / (dx * dx) > 0.5 * (1.0 + 1e-9))
        throw NumericalError(
            "discrete_asymptotic_step: parabolic stability bound violated, "
            "dt max||M|| / dx^2 = " +
            std::to_string(dt * mmax / (dx * dx)));

    Mat next(n, C);
    const double r = dt / (dx * dx);
    for (int i = 0; i < C; ++i) {
        const int j = (i + 1) % C;
        const int m = (i + C - 1) % C;
        next.col(i) = u_field.col(i) +
                      r * (Mhalf[i] * (u_field.col(j) - u_field.col(i)) +
                           Mhalf[m] * (u_field.col(m) - u_field.col(i)));
    }
    return next;
}

InvariantDomainReport ap_invariant_domain_check(const RelaxationModel& model,
                                                const DiscreteField& field,
                                                const APConfig& cfg) {
    InvariantDomainReport report;
    const int C = field.cells();
    const int N = model.state_dim();
    const double dx = field.grid.dx;
    const int q = model.relaxation_exponent();
    const double gamma =
        cfg.relaxation_enabled ? std::pow(cfg.eps, -q) : 0.0;
    const Mat& Q = model.conserved_projector();

    for (int i = 0; i < C; ++i) {
        const int j = (i + 1) % C;
        const Vec UL = field.states.col(i);
        const Vec UR = field.states.col(j);
        Mat sigma;
        if (cfg.sigma_rule == SigmaRule::TargetDiffusion) {
            sigma = sigma_from_target_diffusion(model, Q * UL, Q * UR, cfg.b,
                                                cfg.diffusion_floor)
                        .sigma;
        } else {
            sigma = Mat::Zero(N, N);
        }
        const Mat alpha = alpha_matrix(gamma, dx, cfg.b, sigma);
        const auto [sl, sr] =
            modified_interface_states(model, UL, UR, cfg.b, alpha, sigma);
        if (!model.admissible(sl))
            report.violations.push_back(
                {i, 'L', model.admissibility_violation(sl)});
        if (!model.admissible(sr))
            report.violations.push_back(
                {i, 'R', model.admissibility_violation(sr)});
    }
    return report;
}

double total_entropy(const RelaxationModel& model, const DiscreteField& field) {
    const EntropyPair* ent = model.entropy();
    if (!ent) throw ConfigError(model.name() + ": no entropy pair");
    double s = 0.0;
    for (int i = 0; i < field.cells(); ++i) s += ent->entropy(field.states.col(i));
    return s * field.grid.dx;
}

std::vector<double> entropy_monotonicity_diagnostic(
    const RelaxationModel& model, const std::vector<DiscreteField>& trajectory) {
    std::vector<double> totals;
    totals.reserve(trajectory.size());
    for (const auto& f : trajectory) totals.push_back(total_entropy(model, f));
    return totals;
}

APRunResult run_ap(const RelaxationModel& model, DiscreteField field,
                   APConfig cfg, double final_time, double cfl,
                   const std::function<void(const DiscreteField&)>& observer) {
    cfg.validate();
    if (!(final_time >= field.time))
        throw ConfigError("run_ap: final time must be >= initial time");
    if (!(cfl > 0.0 && cfl <= 1.0))
        throw ConfigError("run_ap: cfl must lie in (0, 1]");

    APStepper stepper(model, cfg, field.grid);
    Mat next(field.states.rows(), field.states.cols());
    APRunResult result;
    if (observer) observer(field);

    while (field.time < final_time * (1.0 - 1e-14)) {
        double b = suggest_wave_speed(model, field.states);
        if (cfg.fixed_b > 0.0) {
            if (cfg.fixed_b * 1.0000001 < b / 1.1)
                throw NumericalError(
                    "run_ap: prescribed wave speed " +
                    std::to_string(cfg.fixed_b) +
                    " is below the spectral radius of the data; the modified "
                    "Riemann solver loses monotonicity");
            b = cfg.fixed_b;
        }
        const double ds = cfl * field.grid.dx / (2.0 * b);
        double dt = cfg.eps * ds;
        if (field.time + dt > final_time) dt = final_time - field.time;
        stepper.step(field.states, next, dt, b);
        field.states.swap(next);
        field.time += dt;
        result.steps += 1;
        result.b_last = b;
        if (observer) observer(field);
        if (!field.states.allFinite())
            throw NumericalError("run_ap: non-finite state at t = " +
                                 std::to_string(field.time));
    }
    require_admissible_field(model, field.states);
    result.final_state = std::move(field);
    return result;
}

}  // namespace fvlab
