#ifndef DYNLAB_POLYNOMIAL_HPP
#define DYNLAB_POLYNOMIAL_HPP

#include <complex>
#include <vector>

namespace dynlab {

using cplx = std::complex<double>;

// Dense complex polynomial, coefficients in ascending order: p[0] + p[1] z + ...
// The zero polynomial is represented by an empty coefficient vector.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<cplx> coeffs);

    static Polynomial constant(cplx a);
    static Polynomial identity();          // z

    int degree() const;                    // -1 for the zero polynomial
    const std::vector<cplx>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }

    cplx eval(cplx z) const;               // Horner
    // value and derivative in one pass
    std::pair<cplx, cplx> eval_with_derivative(cplx z) const;

    Polynomial derivative() const;
    Polynomial operator+(const Polynomial& q) const;
    Polynomial operator-(const Polynomial& q) const;
    Polynomial operator*(const Polynomial& q) const;
    Polynomial operator*(cplx a) const;

    void trim(double tol = 0.0);           // drop trailing near-zero coefficients

private:
    std::vector<cplx> c_;
};

struct RootResult {
    std::vector<cplx> roots;       // all degree() roots, with multiplicity
    double max_residual = 0.0;     // max |p(root)| over returned roots
    int sweeps = 0;
    bool converged = false;
};

// Simultaneous-iteration (Aberth-Ehrlich) root finder.
// Deterministic: fixed initial configuration, fixed sweep order.
// `warm_start`, when nonempty and of matching size, seeds the iteration.
RootResult find_roots(const Polynomial& p,
                      double residual_tol = 1e-12,
                      int max_sweeps = 200,
                      const std::vector<cplx>* warm_start = nullptr);

// Roots of p(y) = w. Closed forms for degree 1 and 2, Aberth otherwise.
// Roots are sorted by (re, im) so branch indexing is reproducible.
std::vector<cplx> solve_equals(const Polynomial& p, cplx w,
                               const std::vector<cplx>* warm_start = nullptr);

} // namespace dynlab

#endif
