#pragma once

#include <complex>
#include <string>

#include "ppspec/geometry.hpp"

namespace ppspec {

// Separable data taper h(x) = prod_j h1(x_j) with compact support
// [-1/2,1/2]^d. Two families: the constant taper and the polynomial-sine ramp
// h_a with ramp width a in (0,1/2):
//
//   h_a(x) = (x+1/2)/a - sin(2 pi (x+1/2)/a)/(2 pi)   on [-1/2, -1/2+a]
//          = 1                                        on (-1/2+a, 1/2-a)
//          = h_a(-x)                                  on (1/2-a, 1/2]
//
// The 1-D Fourier transform of h_a has a closed form assembled from
// elementary integrals of the ramp; it is validated against adaptive
// quadrature in the test suite.
class Taper {
public:
    enum class Kind { Uniform, Smooth };

    static Taper uniform(int dim);
    static Taper smooth(int dim, double a);
    // "uniform" or "smooth:<a>"
    static Taper parse(int dim, const std::string& text);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    double ramp_width() const { return a_; }
    std::string id() const;

    double value1d(double x) const;
    double value(std::span<const double> x) const;

    // H_{h,k} = int_{[-1/2,1/2]^d} h^k; cached for k in {1,2,4}.
    double moment1d(int k) const;
    double moment(int k) const;

    // u(w, A) = int_{-A/2}^{A/2} h1(x/A) exp(-i x w) dx. Real by symmetry;
    // returned as complex to match the conjugate-symmetry contract.
    std::complex<double> ft1d(double omega, double A) const;

    // int_{-A/2}^{A/2} h1(x/A)^k exp(-i x w) dx (closed form for k=1,
    // adaptive quadrature on the ramps otherwise).
    std::complex<double> ft1d_pow(int k, double omega, double A) const;

private:
    Taper(Kind kind, int dim, double a);

    Kind kind_;
    int dim_;
    double a_;
    double m1_, m2_, m4_;
};

// H_{h,k}^{(n)}(w) = int_{D_n} h(x/A)^k exp(-i x.w) dx, separable product.
std::complex<double> taper_hn(const Taper& taper, const Window& window, int k,
                              std::span<const double> omega);

// c_{h,n}(w) = (2 pi)^{-d/2} H_{h,2}^{-1/2} |D_n|^{-1/2} H_{h,1}^{(n)}(w).
std::complex<double> bias_factor(const Taper& taper, const Window& window,
                                 std::span<const double> omega);

// F_{h,n}(w) = |c_{h,n}(w)|^2, unit mass over R^d.
double fejer(const Taper& taper, const Window& window, std::span<const double> omega);

}  // namespace ppspec
