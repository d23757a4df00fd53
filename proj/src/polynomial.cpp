#include "dynlab/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dynlab {

Polynomial::Polynomial(std::vector<cplx> coeffs) : c_(std::move(coeffs)) {
    trim();
}

Polynomial Polynomial::constant(cplx a) {
    if (a == cplx(0.0, 0.0)) return Polynomial();
    return Polynomial({a});
}

Polynomial Polynomial::identity() {
    return Polynomial({cplx(0.0), cplx(1.0)});
}

int Polynomial::degree() const {
    return static_cast<int>(c_.size()) - 1;
}

cplx Polynomial::eval(cplx z) const {
    cplx r(0.0);
    for (size_t i = c_.size(); i-- > 0;) r = r * z + c_[i];
    return r;
}

std::pair<cplx, cplx> Polynomial::eval_with_derivative(cplx z) const {
    cplx p(0.0), dp(0.0);
    for (size_t i = c_.size(); i-- > 0;) {
        dp = dp * z + p;
        p  = p * z + c_[i];
    }
    return {p, dp};
}

Polynomial Polynomial::derivative() const {
    if (c_.size() <= 1) return Polynomial();
    std::vector<cplx> d(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * cplx(double(i));
    return Polynomial(std::move(d));
}

Polynomial Polynomial::operator+(const Polynomial& q) const {
    std::vector<cplx> r(std::max(c_.size(), q.c_.size()), cplx(0.0));
    for (size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
    for (size_t i = 0; i < q.c_.size(); ++i) r[i] += q.c_[i];
    return Polynomial(std::move(r));
}

Polynomial Polynomial::operator-(const Polynomial& q) const {
    std::vector<cplx> r(std::max(c_.size(), q.c_.size()), cplx(0.0));
    for (size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
    for (size_t i = 0; i < q.c_.size(); ++i) r[i] -= q.c_[i];
    return Polynomial(std::move(r));
}

Polynomial Polynomial::operator*(const Polynomial& q) const {
    if (c_.empty() || q.c_.empty()) return Polynomial();
    std::vector<cplx> r(c_.size() + q.c_.size() - 1, cplx(0.0));
    for (size_t i = 0; i < c_.size(); ++i)
        for (size_t j = 0; j < q.c_.size(); ++j) r[i + j] += c_[i] * q.c_[j];
    return Polynomial(std::move(r));
}

Polynomial Polynomial::operator*(cplx a) const {
    std::vector<cplx> r(c_);
    for (auto& x : r) x *= a;
    return Polynomial(std::move(r));
}

void Polynomial::trim(double tol) {
    while (!c_.empty() && std::abs(c_.back()) <= tol) c_.pop_back();
}

namespace {

// Cauchy bound on root moduli: 1 + max |a_i / a_n|.
double root_bound(const std::vector<cplx>& c) {
    double an = std::abs(c.back());
    double m = 0.0;
    for (size_t i = 0; i + 1 < c.size(); ++i) m = std::max(m, std::abs(c[i]) / an);
    return 1.0 + m;
}

} // namespace

RootResult find_roots(const Polynomial& p, double residual_tol, int max_sweeps,
                      const std::vector<cplx>* warm_start) {
    RootResult res;
    int n = p.degree();
    if (n <= 0) { res.converged = true; return res; }

    const auto& c = p.coeffs();
    std::vector<cplx>& z = res.roots;

    if (warm_start && static_cast<int>(warm_start->size()) == n) {
        z = *warm_start;
    } else {
        // Aberth's starting configuration: points on a circle inside the
        // Cauchy bound, angles offset to avoid symmetry locking.
        double R = 0.5 * root_bound(c);
        z.resize(n);
        for (int i = 0; i < n; ++i) {
            double ang = 2.0 * M_PI * (i + 0.25) / n + 0.5;
            z[i] = R * cplx(std::cos(ang), std::sin(ang));
        }
    }

    // residual scale: polynomial evaluated on the root circle can be large
    double scale = 0.0;
    for (const auto& a : c) scale = std::max(scale, std::abs(a));

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        res.sweeps = sweep + 1;
        double move = 0.0;
        for (int i = 0; i < n; ++i) {
            auto [pv, dv] = p.eval_with_derivative(z[i]);
            if (pv == cplx(0.0)) continue;
            cplx corr;
            if (dv == cplx(0.0)) {
                corr = cplx(0.0);
            } else {
                corr = pv / dv;
            }
            // Aberth deflation term
            cplx s(0.0);
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                cplx d = z[i] - z[j];
                if (std::abs(d) > 1e-300) s += cplx(1.0) / d;
            }
            cplx denom = cplx(1.0) - corr * s;
            cplx step = (std::abs(denom) > 1e-300) ? corr / denom : corr;
            z[i] -= step;
            move = std::max(move, std::abs(step));
        }
        if (move < 1e-15 * (1.0 + root_bound(c))) break;
    }

    res.max_residual = 0.0;
    for (const auto& r : z)
        res.max_residual = std::max(res.max_residual, std::abs(p.eval(r)));
    res.converged = res.max_residual <= residual_tol * std::max(1.0, scale);
    return res;
}

std::vector<cplx> solve_equals(const Polynomial& p, cplx w,
                               const std::vector<cplx>* warm_start) {
    int n = p.degree();
    if (n < 1) throw std::invalid_argument("solve_equals: constant polynomial");
    const auto& c = p.coeffs();
    std::vector<cplx> roots;

    if (n == 1) {
        roots.push_back((w - c[0]) / c[1]);
    } else if (n == 2) {
        // a z^2 + b z + (c0 - w) = 0, stable quadratic formula
        cplx a = c[2], b = c[1], cc = c[0] - w;
        cplx disc = std::sqrt(b * b - 4.0 * a * cc);
        // pick the sign that avoids cancellation
        cplx q = (std::real(std::conj(b) * disc) >= 0.0) ? -0.5 * (b + disc)
                                                         : -0.5 * (b - disc);
        if (std::abs(q) > 0.0) {
            roots.push_back(q / a);
            roots.push_back(cc / q);
        } else {
            roots.push_back(cplx(0.0));
            roots.push_back(-b / a);
        }
    } else {
        std::vector<cplx> shifted = c;
        shifted[0] -= w;
        auto rr = find_roots(Polynomial(shifted), 1e-12, 200, warm_start);
        roots = rr.roots;
    }

    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return roots;
}

} // namespace dynlab
