#include "ppspec/models.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ppspec/quadrature.hpp"

namespace ppspec {

namespace {

double pow_di(double x, int n) {
    double out = 1.0;
    for (int i = 0; i < n; ++i) out *= x;
    return out;
}

double two_pi_pow(int d) { return pow_di(2.0 * M_PI, d); }

// Fourier transform of the uniform unit-ball probability kernel at z = r|w|,
// plus first and second derivatives in z. Series below |z| = 1/2 to dodge the
// z^{-3}..z^{-5} cancellations.
struct BallFt {
    double b, db, d2b;
};

BallFt ball_ft(int d, double z) {
    const double z2 = z * z;
    BallFt out{};
    if (d == 1) {
        if (std::abs(z) < 0.5) {
            out.b = 1.0 - z2 / 6.0 + z2 * z2 / 120.0 - z2 * z2 * z2 / 5040.0;
            out.db = z * (-1.0 / 3.0 + z2 / 30.0 - z2 * z2 / 840.0);
            out.d2b = -1.0 / 3.0 + z2 / 10.0 - z2 * z2 / 168.0 + z2 * z2 * z2 / 6480.0;
        } else {
            const double s = std::sin(z), c = std::cos(z);
            out.b = s / z;
            out.db = c / z - s / z2;
            out.d2b = -s / z - 2.0 * c / z2 + 2.0 * s / (z2 * z);
        }
    } else if (d == 2) {
        if (std::abs(z) < 0.5) {
            out.b = 1.0 - z2 / 8.0 + z2 * z2 / 192.0 - z2 * z2 * z2 / 9216.0;
            out.db = z * (-0.25 + z2 / 48.0 - z2 * z2 / 1536.0);
            out.d2b = -0.25 + z2 / 16.0 - 5.0 * z2 * z2 / 1536.0 + 7.0 * z2 * z2 * z2 / 92160.0;
        } else {
            const double j0 = std::cyl_bessel_j(0, z), j1 = std::cyl_bessel_j(1, z);
            out.b = 2.0 * j1 / z;
            out.db = 2.0 * j0 / z - 4.0 * j1 / z2;
            out.d2b = -2.0 * j1 / z - 6.0 * j0 / z2 + 12.0 * j1 / (z2 * z);
        }
    } else {
        if (std::abs(z) < 0.5) {
            out.b = 1.0 - z2 / 10.0 + z2 * z2 / 280.0 - z2 * z2 * z2 / 15120.0;
            out.db = z * (-0.2 + z2 / 70.0 - z2 * z2 / 2520.0);
            out.d2b = -0.2 + 3.0 * z2 / 70.0 - z2 * z2 / 504.0 + z2 * z2 * z2 / 17820.0;
        } else {
            const double s = std::sin(z), c = std::cos(z);
            const double z3 = z2 * z;
            out.b = 3.0 * (s - z * c) / z3;
            out.db = 3.0 * (z2 * s - 3.0 * s + 3.0 * z * c) / (z3 * z);
            out.d2b = 3.0 * (z3 * c - 5.0 * z2 * s + 12.0 * s - 12.0 * z * c) / (z3 * z2);
        }
    }
    return out;
}

}  // namespace

SpectralModel::SpectralModel(Family family, int dim, std::vector<double> params)
    : family_(family), dim_(dim), params_(std::move(params)) {
    validate();
}

bool SpectralModel::feasible(Family family, int dim, std::span<const double> p) {
    auto pos = [](double x) { return x > 0.0 && std::isfinite(x); };
    switch (family) {
        case Family::Poisson:
            return p.size() == 1 && pos(p[0]);
        case Family::Thomas:
        case Family::Matern:
            return p.size() == 3 && pos(p[0]) && pos(p[1]) && pos(p[2]);
        case Family::Gdpp:
            return p.size() == 2 && pos(p[0]) && pos(p[1]) &&
                   M_PI * p[1] * std::pow(p[0], 2.0 / dim) <= 1.0 + 1e-12;
        case Family::HawkesExp:
            return p.size() == 3 && dim == 1 && pos(p[0]) && pos(p[1]) && p[1] < p[2];
        case Family::LgcpExp:
            return p.size() == 3 && std::isfinite(p[0]) && p[1] >= 0.0 && pos(p[2]);
    }
    return false;
}

void SpectralModel::validate() const {
    if (dim_ < 1 || dim_ > 3) throw std::invalid_argument("model dimension must be 1, 2, or 3");
    if (family_ == Family::HawkesExp && dim_ != 1)
        throw std::invalid_argument("hawkes model is 1-dimensional");
    if (!feasible(family_, dim_, params_)) {
        if (family_ == Family::Gdpp && params_.size() == 2 && params_[0] > 0.0 &&
            params_[1] > 0.0)
            throw std::invalid_argument(
                "gdpp existence constraint violated: need pi*rho2*lambda^(2/d) <= 1");
        throw std::invalid_argument("invalid parameters for family " + family_name());
    }
}

std::string SpectralModel::family_to_name(Family family_) {
    switch (family_) {
        case Family::Poisson: return "poisson";
        case Family::Thomas: return "thomas";
        case Family::Matern: return "matern";
        case Family::Gdpp: return "gdpp";
        case Family::HawkesExp: return "hawkes";
        case Family::LgcpExp: return "lgcp";
    }
    return "?";
}

std::vector<std::string> SpectralModel::param_names_for(Family family_) {
    switch (family_) {
        case Family::Poisson: return {"lambda"};
        case Family::Thomas: return {"kappa", "alpha", "sigma2"};
        case Family::Matern: return {"kappa", "alpha", "r"};
        case Family::Gdpp: return {"lambda", "rho2"};
        case Family::HawkesExp: return {"nu", "a", "beta"};
        case Family::LgcpExp: return {"mu", "s2", "phi"};
    }
    return {};
}

SpectralModel SpectralModel::parse(int dim, const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("model spec must look like family:key=value,...");
    const std::string fam = text.substr(0, colon);
    Family family;
    if (fam == "poisson") family = Family::Poisson;
    else if (fam == "thomas") family = Family::Thomas;
    else if (fam == "matern") family = Family::Matern;
    else if (fam == "gdpp") family = Family::Gdpp;
    else if (fam == "hawkes") family = Family::HawkesExp;
    else if (fam == "lgcp") family = Family::LgcpExp;
    else throw std::invalid_argument("unknown model family: " + fam);

    std::map<std::string, double> kv;
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("model parameter must look like key=value: " + item);
        kv[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    }

    std::vector<std::string> names;
    switch (family) {
        case Family::Poisson: names = {"lambda"}; break;
        case Family::Thomas: names = {"kappa", "alpha", "sigma2"}; break;
        case Family::Matern: names = {"kappa", "alpha", "r"}; break;
        case Family::Gdpp: names = {"lambda", "rho2"}; break;
        case Family::HawkesExp: names = {"nu", "a", "beta"}; break;
        case Family::LgcpExp: names = {"mu", "s2", "phi"}; break;
    }
    std::vector<double> params;
    for (const auto& name : names) {
        auto it = kv.find(name);
        if (it == kv.end())
            throw std::invalid_argument("model spec missing parameter: " + name);
        params.push_back(it->second);
        kv.erase(it);
    }
    if (!kv.empty())
        throw std::invalid_argument("unknown model parameter: " + kv.begin()->first);
    return SpectralModel(family, dim, std::move(params));
}

SpectralModel SpectralModel::with_params(std::span<const double> params) const {
    return SpectralModel(family_, dim_, std::vector<double>(params.begin(), params.end()));
}

double SpectralModel::intensity() const {
    switch (family_) {
        case Family::Poisson: return params_[0];
        case Family::Thomas:
        case Family::Matern: return params_[0] * params_[1];
        case Family::Gdpp: return params_[0];
        case Family::HawkesExp: return params_[0] / (1.0 - params_[1] / params_[2]);
        case Family::LgcpExp: return std::exp(params_[0] + 0.5 * params_[1]);
    }
    return 0.0;
}

double SpectralModel::spectral_density_radial(double w) const {
    const double c = 1.0 / two_pi_pow(dim_);
    const double w2 = w * w;
    switch (family_) {
        case Family::Poisson:
            return c * params_[0];
        case Family::Thomas: {
            const double kappa = params_[0], alpha = params_[1], sigma2 = params_[2];
            return c * kappa * alpha * (1.0 + alpha * std::exp(-sigma2 * w2));
        }
        case Family::Matern: {
            const double kappa = params_[0], alpha = params_[1], r = params_[2];
            const double b = ball_ft(dim_, r * w).b;
            return c * kappa * alpha * (1.0 + alpha * b * b);
        }
        case Family::Gdpp: {
            const double lambda = params_[0], rho2 = params_[1];
            const double p = std::pow(M_PI * rho2 / 2.0, 0.5 * dim_) *
                             std::exp(-rho2 * w2 / 8.0);
            return c * (lambda - lambda * lambda * p);
        }
        case Family::HawkesExp: {
            const double q = params_[2] - params_[1];
            const double beta = params_[2];
            return c * intensity() * (beta * beta + w2) / (q * q + w2);
        }
        case Family::LgcpExp: {
            const double lambda = intensity();
            const double s2 = params_[1], phi = params_[2];
            if (s2 == 0.0) return c * lambda;
            auto gamma2 = [lambda, s2, phi](double r) {
                return lambda * lambda * std::expm1(s2 * std::exp(-r / phi));
            };
            const double r_max = 60.0 * std::max(1.0, phi);
            return c * lambda + radial_inverse_fourier(gamma2, dim_, w, r_max, 1e-8);
        }
    }
    return 0.0;
}

double SpectralModel::spectral_density(std::span<const double> omega) const {
    double w2 = 0.0;
    for (double wi : omega) w2 += wi * wi;
    return spectral_density_radial(std::sqrt(w2));
}

double SpectralModel::pcf_minus_one(double r) const {
    switch (family_) {
        case Family::Poisson:
            return 0.0;
        case Family::Thomas: {
            const double kappa = params_[0], sigma2 = params_[2];
            return std::exp(-r * r / (4.0 * sigma2)) /
                   (kappa * std::pow(4.0 * M_PI * sigma2, 0.5 * dim_));
        }
        case Family::Gdpp:
            return -std::exp(-2.0 * r * r / params_[1]);
        case Family::LgcpExp:
            return std::expm1(params_[1] * std::exp(-r / params_[2]));
        default:
            throw std::invalid_argument("pcf unavailable for family " + family_name());
    }
}

void SpectralModel::spectral_gradient_radial(double w, std::span<double> out) const {
    const double c = 1.0 / two_pi_pow(dim_);
    const double w2 = w * w;
    switch (family_) {
        case Family::Poisson:
            out[0] = c;
            return;
        case Family::Thomas: {
            const double kappa = params_[0], alpha = params_[1], sigma2 = params_[2];
            const double e = std::exp(-sigma2 * w2);
            out[0] = c * alpha * (1.0 + alpha * e);
            out[1] = c * kappa * (1.0 + 2.0 * alpha * e);
            out[2] = -c * kappa * alpha * alpha * w2 * e;
            return;
        }
        case Family::Matern: {
            const double kappa = params_[0], alpha = params_[1], r = params_[2];
            const auto bf = ball_ft(dim_, r * w);
            const double q = bf.b * bf.b;
            const double dq_dr = 2.0 * bf.b * bf.db * w;
            out[0] = c * alpha * (1.0 + alpha * q);
            out[1] = c * kappa * (1.0 + 2.0 * alpha * q);
            out[2] = c * kappa * alpha * alpha * dq_dr;
            return;
        }
        case Family::Gdpp: {
            const double lambda = params_[0], t = params_[1];
            const double p = std::pow(M_PI * t / 2.0, 0.5 * dim_) * std::exp(-t * w2 / 8.0);
            const double dp = p * (0.5 * dim_ / t - w2 / 8.0);
            out[0] = c * (1.0 - 2.0 * lambda * p);
            out[1] = -c * lambda * lambda * dp;
            return;
        }
        case Family::HawkesExp: {
            const double nu = params_[0], beta = params_[2];
            const double q = beta - params_[1];
            const double f = spectral_density_radial(w);
            out[0] = f / nu;
            out[1] = f * (1.0 / q + 2.0 * q / (q * q + w2));
            out[2] = f * (1.0 / beta + 2.0 * beta / (beta * beta + w2) - 1.0 / q -
                          2.0 * q / (q * q + w2));
            return;
        }
        case Family::LgcpExp:
            throw std::invalid_argument("gradient unavailable for quadrature-defined spectrum");
    }
}

std::vector<double> SpectralModel::spectral_gradient(std::span<const double> omega) const {
    double w2 = 0.0;
    for (double wi : omega) w2 += wi * wi;
    std::vector<double> out(static_cast<std::size_t>(n_params()));
    spectral_gradient_radial(std::sqrt(w2), out);
    return out;
}

void SpectralModel::spectral_hessian_radial(double w, std::span<double> out) const {
    const double c = 1.0 / two_pi_pow(dim_);
    const double w2 = w * w;
    switch (family_) {
        case Family::Poisson:
            out[0] = 0.0;
            return;
        case Family::Thomas: {
            const double kappa = params_[0], alpha = params_[1];
            const double e = std::exp(-params_[2] * w2);
            const double h_ka = c * (1.0 + 2.0 * alpha * e);
            const double h_ks = -c * alpha * alpha * w2 * e;
            const double h_aa = 2.0 * c * kappa * e;
            const double h_as = -2.0 * c * kappa * alpha * w2 * e;
            const double h_ss = c * kappa * alpha * alpha * w2 * w2 * e;
            const double m[9] = {0.0, h_ka, h_ks, h_ka, h_aa, h_as, h_ks, h_as, h_ss};
            std::copy(m, m + 9, out.begin());
            return;
        }
        case Family::Matern: {
            const double kappa = params_[0], alpha = params_[1], r = params_[2];
            const auto bf = ball_ft(dim_, r * w);
            const double q = bf.b * bf.b;
            const double dq = 2.0 * bf.b * bf.db * w;
            const double d2q = 2.0 * w2 * (bf.db * bf.db + bf.b * bf.d2b);
            const double h_ka = c * (1.0 + 2.0 * alpha * q);
            const double h_kr = c * alpha * alpha * dq;
            const double h_aa = 2.0 * c * kappa * q;
            const double h_ar = 2.0 * c * kappa * alpha * dq;
            const double h_rr = c * kappa * alpha * alpha * d2q;
            const double m[9] = {0.0, h_ka, h_kr, h_ka, h_aa, h_ar, h_kr, h_ar, h_rr};
            std::copy(m, m + 9, out.begin());
            return;
        }
        case Family::Gdpp: {
            const double lambda = params_[0], t = params_[1];
            const double p = std::pow(M_PI * t / 2.0, 0.5 * dim_) * std::exp(-t * w2 / 8.0);
            const double u = 0.5 * dim_ / t - w2 / 8.0;
            const double dp = p * u;
            const double d2p = p * (u * u - 0.5 * dim_ / (t * t));
            const double m[4] = {-2.0 * c * p, -2.0 * c * lambda * dp, -2.0 * c * lambda * dp,
                                 -c * lambda * lambda * d2p};
            std::copy(m, m + 4, out.begin());
            return;
        }
        case Family::HawkesExp: {
            const double nu = params_[0], beta = params_[2];
            const double q = beta - params_[1];
            const double f = spectral_density_radial(w);
            const double qw = q * q + w2, bw = beta * beta + w2;
            double g[3];
            spectral_gradient_radial(w, g);
            double ln2[9] = {0.0};
            ln2[0] = -1.0 / (nu * nu);
            const double d_aa = 1.0 / (q * q) + 2.0 * (q * q - w2) / (qw * qw);
            const double d_ab = -1.0 / (q * q) + 2.0 * (w2 - q * q) / (qw * qw);
            const double d_bb = -1.0 / (beta * beta) + 2.0 * (w2 - beta * beta) / (bw * bw) +
                                1.0 / (q * q) - 2.0 * (w2 - q * q) / (qw * qw);
            ln2[4] = d_aa;
            ln2[5] = d_ab;
            ln2[7] = d_ab;
            ln2[8] = d_bb;
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    out[static_cast<std::size_t>(3 * i + j)] =
                        g[i] * g[j] / f + f * ln2[3 * i + j];
                }
            }
            return;
        }
        case Family::LgcpExp:
            throw std::invalid_argument("hessian unavailable for quadrature-defined spectrum");
    }
}

std::vector<double> SpectralModel::spectral_hessian(std::span<const double> omega) const {
    double w2 = 0.0;
    for (double wi : omega) w2 += wi * wi;
    std::vector<double> out(static_cast<std::size_t>(n_params() * n_params()));
    spectral_hessian_radial(std::sqrt(w2), out);
    return out;
}

std::vector<double> spectral_density_on_grid(const SpectralModel& model,
                                             const FrequencyGrid& grid) {
    std::map<long long, double> memo;
    const double base = kTwoPi / grid.spacing();
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        long long r2 = 0;
        const int* k = grid.index(i);
        for (int j = 0; j < grid.dim(); ++j)
            r2 += static_cast<long long>(k[j]) * static_cast<long long>(k[j]);
        auto it = memo.find(r2);
        if (it == memo.end()) {
            const double w = base * std::sqrt(static_cast<double>(r2));
            it = memo.emplace(r2, model.spectral_density_radial(w)).first;
        }
        out[i] = it->second;
    }
    return out;
}

}  // namespace ppspec
