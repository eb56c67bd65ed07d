#include "ppspec/taper.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ppspec/quadrature.hpp"

namespace ppspec {

namespace {

double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

// int_0^a u cos(su) du
double int_u_cos(double s, double a) {
    const double sa = s * a;
    if (std::abs(sa) < 1e-4) {
        const double sa2 = sa * sa;
        return a * a * (0.5 - sa2 / 8.0 + sa2 * sa2 / 144.0);
    }
    const double half = std::sin(0.5 * sa);
    return a * std::sin(sa) / s - 2.0 * half * half / (s * s);
}

// int_0^a u sin(su) du
double int_u_sin(double s, double a) {
    const double sa = s * a;
    if (std::abs(sa) < 1e-2) {
        const double sa2 = sa * sa;
        return a * a * a * s * (1.0 / 3.0 - sa2 / 30.0 + sa2 * sa2 / 840.0);
    }
    return (std::sin(sa) - sa * std::cos(sa)) / (s * s);
}

// int_0^a sin(ku) cos(su) du with k = 2 pi / a; even in s, smooth across the
// resonance s = k thanks to the shifted-argument form.
double int_sin_cos(double s, double a) {
    const double k = 2.0 * M_PI / a;
    s = std::abs(s);
    const double q = s - k;
    const double half = std::sin(0.5 * q * a);
    // sin^2(sa/2) = sin^2(qa/2); (k^2-s^2) = -q(k+s)
    return -2.0 * k * half * (0.5 * a) * sinc(0.5 * q * a) / (k + s);
}

// int_0^a sin(ku) sin(su) du with k = 2 pi / a; odd in s.
double int_sin_sin(double s, double a) {
    const double k = 2.0 * M_PI / a;
    const double sign = s < 0.0 ? -1.0 : 1.0;
    s = std::abs(s);
    const double q = s - k;
    return sign * k * a * sinc(q * a) / (k + s);
}

double ramp(double u, double a) {
    return u / a - std::sin(2.0 * M_PI * u / a) / (2.0 * M_PI);
}

}  // namespace

Taper::Taper(Kind kind, int dim, double a) : kind_(kind), dim_(dim), a_(a) {
    if (dim_ < 1 || dim_ > 3) throw std::invalid_argument("taper dimension must be 1, 2, or 3");
    if (kind_ == Kind::Smooth && !(a_ > 0.0 && a_ < 0.5))
        throw std::invalid_argument("smooth taper requires a in (0, 1/2)");
    m1_ = moment1d(1);
    m2_ = moment1d(2);
    m4_ = moment1d(4);
}

Taper Taper::uniform(int dim) { return Taper(Kind::Uniform, dim, 0.0); }

Taper Taper::smooth(int dim, double a) { return Taper(Kind::Smooth, dim, a); }

Taper Taper::parse(int dim, const std::string& text) {
    if (text == "uniform") return uniform(dim);
    const std::string prefix = "smooth:";
    if (text.rfind(prefix, 0) == 0) {
        return smooth(dim, std::stod(text.substr(prefix.size())));
    }
    throw std::invalid_argument("taper must be 'uniform' or 'smooth:<a>'");
}

std::string Taper::id() const {
    if (kind_ == Kind::Uniform) return "uniform";
    std::ostringstream os;
    os << "smooth:" << a_;
    return os.str();
}

double Taper::value1d(double x) const {
    const double ax = std::abs(x);
    if (ax > 0.5) return 0.0;
    if (kind_ == Kind::Uniform) return 1.0;
    const double u = 0.5 - ax;  // distance to the nearer edge
    if (u >= a_) return 1.0;
    return ramp(u, a_);
}

double Taper::value(std::span<const double> x) const {
    double v = 1.0;
    for (double xi : x) v *= value1d(xi);
    return v;
}

double Taper::moment1d(int k) const {
    if (k < 1) throw std::invalid_argument("taper moment requires k >= 1");
    if (kind_ == Kind::Uniform) return 1.0;
    if (k == 1) return 1.0 - a_;  // each ramp integrates to a/2
    const double a = a_;
    const double ramp_part = integrate<double>(
        [a, k](double u) { return std::pow(ramp(u, a), k); }, 0.0, a, 1e-12, 1e-12);
    return (1.0 - 2.0 * a) + 2.0 * ramp_part;
}

double Taper::moment(int k) const {
    double m;
    if (k == 1)
        m = m1_;
    else if (k == 2)
        m = m2_;
    else if (k == 4)
        m = m4_;
    else
        m = moment1d(k);
    double out = 1.0;
    for (int i = 0; i < dim_; ++i) out *= m;
    return out;
}

std::complex<double> Taper::ft1d(double omega, double A) const {
    const double s = A * omega;
    if (kind_ == Kind::Uniform) return {A * sinc(0.5 * s), 0.0};
    // hat{h}(s) = 2 [ sin(s c)/s + cos(s/2) P_c(s) + sin(s/2) P_s(s) ],
    // c = 1/2 - a, with the ramp integrals P_c, P_s from elementary pieces.
    const double a = a_;
    const double c = 0.5 - a;
    const double plateau = c * sinc(s * c);
    const double pc = int_u_cos(s, a) / a - int_sin_cos(s, a) / (2.0 * M_PI);
    const double ps = int_u_sin(s, a) / a - int_sin_sin(s, a) / (2.0 * M_PI);
    const double value = 2.0 * (plateau + std::cos(0.5 * s) * pc + std::sin(0.5 * s) * ps);
    return {A * value, 0.0};
}

std::complex<double> Taper::ft1d_pow(int k, double omega, double A) const {
    if (k == 1 || kind_ == Kind::Uniform) return ft1d(omega, A);
    const double s = A * omega;
    const double a = a_;
    const double c = 0.5 - a;
    const double plateau = c * sinc(s * c);
    const double ramp_part = integrate<double>(
        [a, k, s](double u) {
            return std::pow(ramp(u, a), k) * std::cos(s * (0.5 - u));
        },
        0.0, a, 1e-13, 1e-12);
    return {A * 2.0 * (plateau + ramp_part), 0.0};
}

std::complex<double> taper_hn(const Taper& taper, const Window& window, int k,
                              std::span<const double> omega) {
    if (k < 1) throw std::invalid_argument("taper_hn requires k >= 1");
    std::complex<double> out(1.0, 0.0);
    for (int i = 0; i < window.dim(); ++i) {
        out *= taper.ft1d_pow(k, omega[static_cast<std::size_t>(i)], window.side(i));
    }
    return out;
}

std::complex<double> bias_factor(const Taper& taper, const Window& window,
                                 std::span<const double> omega) {
    const int d = window.dim();
    const double norm = std::pow(2.0 * M_PI, -0.5 * d) /
                        std::sqrt(taper.moment(2) * window.volume());
    return norm * taper_hn(taper, window, 1, omega);
}

double fejer(const Taper& taper, const Window& window, std::span<const double> omega) {
    return std::norm(bias_factor(taper, window, omega));
}

}  // namespace ppspec
