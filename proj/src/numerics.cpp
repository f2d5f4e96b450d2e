#include "fvlab/numerics.hpp"

#include <cmath>

#include "fvlab/errors.hpp"

namespace fvlab {

const std::array<double, 5>& GaussLegendre5::nodes() {
    static const std::array<double, 5> x = {
        -0.9061798459386639928, -0.5384693101056830910, 0.0,
        0.5384693101056830910, 0.9061798459386639928};
    return x;
}

const std::array<double, 5>& GaussLegendre5::weights() {
    static const std::array<double, 5> w = {
        0.2369268850561890875, 0.4786286704993664680, 0.5688888888888888889,
        0.4786286704993664680, 0.2369268850561890875};
    return w;
}

double integrate(const std::function<double(double)>& f, double a, double b) {
    const auto& x = GaussLegendre5::nodes();
    const auto& w = GaussLegendre5::weights();
    // Composite rule: panels no wider than 1/2 keep the error of the 5-point
    // rule below 1e-13 for smooth coefficient fields.
    const double width = b - a;
    const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(width) / 0.5)));
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double pa = a + width * p / panels;
        const double pb = a + width * (p + 1) / panels;
        const double mid = 0.5 * (pa + pb);
        const double half = 0.5 * (pb - pa);
        double panel = 0.0;
        for (int i = 0; i < GaussLegendre5::n; ++i)
            panel += w[i] * f(mid + half * x[i]);
        acc += panel * half;
    }
    return acc;
}

Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double h) {
    const Vec f0 = f(x);
    Mat jac(f0.size(), x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double hj = h * std::max(1.0, std::abs(x[j]));
        Vec xp = x, xm = x, xpp = x, xmm = x;
        xp[j] += hj;
        xm[j] -= hj;
        xpp[j] += 2 * hj;
        xmm[j] -= 2 * hj;
        jac.col(j) = (8.0 * (f(xp) - f(xm)) - (f(xpp) - f(xmm))) / (12.0 * hj);
    }
    return jac;
}

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
    auto wrap = [&](const Vec& y) { return Vec::Constant(1, f(y)); };
    return fd_jacobian(wrap, x, h).row(0).transpose();
}

Mat fd_hessian(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
    const Eigen::Index m = x.size();
    Mat hess(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double hi = h * std::max(1.0, std::abs(x[i]));
        for (Eigen::Index j = i; j < m; ++j) {
            const double hj = h * std::max(1.0, std::abs(x[j]));
            if (i == j) {
                Vec xp = x, xm = x;
                xp[i] += hi;
                xm[i] -= hi;
                hess(i, i) = (f(xp) - 2.0 * f(x) + f(xm)) / (hi * hi);
            } else {
                Vec xpp = x, xpm = x, xmp = x, xmm = x;
                xpp[i] += hi; xpp[j] += hj;
                xpm[i] += hi; xpm[j] -= hj;
                xmp[i] -= hi; xmp[j] += hj;
                xmm[i] -= hi; xmm[j] -= hj;
                hess(i, j) = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * hi * hj);
                hess(j, i) = hess(i, j);
            }
        }
    }
    return hess;
}

double fd_directional(const std::function<double(double)>& f, double h) {
    return (8.0 * (f(h) - f(-h)) - (f(2 * h) - f(-2 * h))) / (12.0 * h);
}

double solve_monotone(const std::function<double(double)>& f,
                      const std::function<double(double)>& df, double lo,
                      double hi, double bisect_width, double tol, double scale) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0)
        throw NumericalError("solve_monotone: root not bracketed in [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "]");
    // Bisection phase.
    while (hi - lo > bisect_width) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (fm * flo < 0.0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    // Newton polish, safeguarded by the bracket.
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 60; ++it) {
        const double fx = f(x);
        if (std::abs(fx) <= tol * scale) return x;
        if (fx * flo < 0.0)
            hi = x;
        else
            lo = x;
        const double d = df(x);
        double next = (d != 0.0) ? x - fx / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    return x;
}

double solve_increasing_positive(const std::function<double(double)>& f,
                                 const std::function<double(double)>& df,
                                 double guess, double rel_tol) {
    double lo = guess, hi = guess;
    // Grow a bracket around the guess.
    for (int it = 0; it < 200 && f(lo) > 0.0; ++it) lo *= 0.5;
    for (int it = 0; it < 200 && f(hi) < 0.0; ++it) hi *= 2.0;
    if (f(lo) > 0.0 || f(hi) < 0.0)
        throw NumericalError("solve_increasing_positive: failed to bracket root");
    double x = std::clamp(guess, lo, hi);
    for (int it = 0; it < 100; ++it) {
        const double fx = f(x);
        if (fx > 0.0)
            hi = x;
        else if (fx < 0.0)
            lo = x;
        else
            return x;
        const double d = df(x);
        double next = (d > 0.0) ? x - fx / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= rel_tol * std::abs(next)) return next;
        x = next;
    }
    return x;
}

}  // namespace fvlab
