#include "ppspec/quadrature.hpp"

namespace ppspec {

namespace {

// Sum adaptive integrals over oscillation-length segments [k pi/w, (k+1) pi/w].
double oscillatory_sum(const std::function<double(double)>& f, double w,
                       double r_max, double tol) {
    if (w * r_max < 1.0) {
        return integrate<double>(f, 0.0, r_max, tol * 1e-3, tol * 1e-2);
    }
    const double seg = M_PI / w;
    double total = 0.0;
    double r = 0.0;
    int quiet = 0;
    while (r < r_max) {
        const double r_next = std::min(r + seg, r_max);
        const double piece =
            integrate<double>(f, r, r_next, tol * 1e-4, tol * 1e-3, 200);
        total += piece;
        r = r_next;
        if (std::abs(piece) < tol * std::max(1.0, std::abs(total)) * 1e-3) {
            if (++quiet >= 3) break;
        } else {
            quiet = 0;
        }
    }
    return total;
}

}  // namespace

double hankel0(const std::function<double(double)>& g, double w, double r_max,
               double tol) {
    auto f = [&](double r) { return g(r) * std::cyl_bessel_j(0, w * r) * r; };
    return oscillatory_sum(f, w, r_max, tol);
}

double radial_inverse_fourier(const std::function<double(double)>& g, int dim,
                              double w, double r_max, double tol) {
    w = std::abs(w);
    switch (dim) {
        case 1: {
            auto f = [&](double r) { return g(r) * std::cos(w * r); };
            return oscillatory_sum(f, w, r_max, tol) / M_PI;
        }
        case 2:
            return hankel0(g, w, r_max, tol) / (2.0 * M_PI);
        case 3: {
            auto f = [&](double r) {
                const double z = w * r;
                const double s = z < 1e-8 ? 1.0 - z * z / 6.0 : std::sin(z) / z;
                return g(r) * s * r * r;
            };
            return oscillatory_sum(f, w, r_max, tol) / (2.0 * M_PI * M_PI);
        }
        default:
            throw std::invalid_argument("radial_inverse_fourier: dim must be 1, 2, or 3");
    }
}

}  // namespace ppspec
