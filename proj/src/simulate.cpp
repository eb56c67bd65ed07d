#include "ppspec/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "ppspec/fft.hpp"
#include "ppspec/rng.hpp"

namespace ppspec {

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t replicate) {
    return Philox2x64(master_seed, replicate).next_u64();
}

namespace {

// Homogeneous Poisson on a box [lo, hi]^d appended as flat coords.
void poisson_box(Philox2x64& rng, double rate, const double* lo, const double* hi, int d,
                 std::vector<double>& out) {
    double vol = 1.0;
    for (int i = 0; i < d; ++i) vol *= hi[i] - lo[i];
    const std::uint64_t n = rng.next_poisson(rate * vol);
    for (std::uint64_t j = 0; j < n; ++j) {
        for (int i = 0; i < d; ++i) {
            out.push_back(lo[i] + (hi[i] - lo[i]) * rng.next_double());
        }
    }
}

std::vector<double> sim_poisson(const SpectralModel& m, const Window& win, Philox2x64& rng) {
    const int d = win.dim();
    double lo[3], hi[3];
    for (int i = 0; i < d; ++i) {
        hi[i] = 0.5 * win.side(i);
        lo[i] = -hi[i];
    }
    std::vector<double> pts;
    poisson_box(rng, m.params()[0], lo, hi, d, pts);
    return pts;
}

// Neyman-Scott: parents on the window dilated by `buffer`, Poisson(alpha)
// offspring displaced by the cluster kernel, retained inside the window.
template <typename Displace>
std::vector<double> sim_cluster(const Window& win, double kappa, double alpha, double buffer,
                                Philox2x64& rng, Displace displace) {
    const int d = win.dim();
    double lo[3], hi[3];
    for (int i = 0; i < d; ++i) {
        hi[i] = 0.5 * win.side(i) + buffer;
        lo[i] = -hi[i];
    }
    std::vector<double> parents;
    poisson_box(rng, kappa, lo, hi, d, parents);
    const std::size_t n_parents = parents.size() / static_cast<std::size_t>(d);
    std::vector<double> pts;
    double child[3], step[3];
    for (std::size_t p = 0; p < n_parents; ++p) {
        const std::uint64_t n_off = rng.next_poisson(alpha);
        for (std::uint64_t c = 0; c < n_off; ++c) {
            displace(rng, step);
            bool inside = true;
            for (int i = 0; i < d; ++i) {
                child[i] = parents[p * d + i] + step[i];
                if (std::abs(child[i]) > 0.5 * win.side(i)) inside = false;
            }
            if (inside) pts.insert(pts.end(), child, child + d);
        }
    }
    return pts;
}

std::vector<double> sim_thomas(const SpectralModel& m, const Window& win, Philox2x64& rng) {
    const int d = win.dim();
    const double kappa = m.params()[0], alpha = m.params()[1];
    const double sigma = std::sqrt(m.params()[2]);
    return sim_cluster(win, kappa, alpha, 6.0 * sigma, rng, [&](Philox2x64& r, double* step) {
        for (int i = 0; i < d; ++i) step[i] = sigma * r.next_normal();
    });
}

std::vector<double> sim_matern(const SpectralModel& m, const Window& win, Philox2x64& rng) {
    const int d = win.dim();
    const double kappa = m.params()[0], alpha = m.params()[1], radius = m.params()[2];
    return sim_cluster(win, kappa, alpha, radius, rng, [&](Philox2x64& r, double* step) {
        // uniform in the d-ball: isotropic direction, radius ~ R u^{1/d}
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (int i = 0; i < d; ++i) {
                step[i] = r.next_normal();
                norm2 += step[i] * step[i];
            }
        } while (norm2 == 0.0);
        const double scale =
            radius * std::pow(r.next_double(), 1.0 / d) / std::sqrt(norm2);
        for (int i = 0; i < d; ++i) step[i] *= scale;
    });
}

// Circulant eigenvalues are a pure function of the grid geometry and the
// covariance parameters; cache them across replicates.
const std::vector<double>& circulant_eigenvalues(int d, const double* len, std::size_t m,
                                                 double s2, double phi) {
    struct Key {
        int d;
        double len0, len1;
        std::size_t m;
        double s2, phi;
        bool operator<(const Key& o) const {
            return std::tie(d, len0, len1, m, s2, phi) <
                   std::tie(o.d, o.len0, o.len1, o.m, o.s2, o.phi);
        }
    };
    static std::map<Key, std::vector<double>> cache;
    static std::mutex mutex;
    const Key key{d, len[0], d == 2 ? len[1] : 0.0, m, s2, phi};
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }

    const std::size_t n = 2 * m;  // embedding torus per axis
    const std::size_t total = d == 1 ? n : n * n;
    std::vector<std::complex<double>> cov(total);
    auto wrap = [n](std::size_t j) { return static_cast<double>(std::min(j, n - j)); };
    if (d == 1) {
        const double dx = len[0] / static_cast<double>(m);
        for (std::size_t j = 0; j < n; ++j)
            cov[j] = s2 * std::exp(-wrap(j) * dx / phi);
    } else {
        const double dx = len[0] / static_cast<double>(m);
        const double dy = len[1] / static_cast<double>(m);
        for (std::size_t j1 = 0; j1 < n; ++j1) {
            for (std::size_t j2 = 0; j2 < n; ++j2) {
                const double rx = wrap(j1) * dx, ry = wrap(j2) * dy;
                cov[j1 * n + j2] = s2 * std::exp(-std::hypot(rx, ry) / phi);
            }
        }
    }
    if (d == 1)
        fft_radix2(cov.data(), n, -1);
    else
        fft_2d(cov, n, n, -1);
    double max_eig = 0.0, min_eig = 0.0;
    for (const auto& e : cov) {
        max_eig = std::max(max_eig, e.real());
        min_eig = std::min(min_eig, e.real());
    }
    if (min_eig < -1e-12 * max_eig)
        throw std::runtime_error("circulant embedding not nonnegative-definite");
    std::vector<double> eig(total);
    for (std::size_t j = 0; j < total; ++j) eig[j] = std::max(cov[j].real(), 0.0);
    std::lock_guard<std::mutex> lock(mutex);
    return cache.emplace(key, std::move(eig)).first->second;
}

// Gaussian random field on a regular grid via circulant embedding; returns the
// field on the M^d physical grid covering the dilated box of sides len[].
std::vector<double> grf_circulant(int d, const double* len, std::size_t m, double s2,
                                  double phi, Philox2x64& rng) {
    const std::size_t n = 2 * m;
    const std::size_t total = d == 1 ? n : n * n;
    const std::vector<double>& eig = circulant_eigenvalues(d, len, m, s2, phi);
    std::vector<std::complex<double>> spec(total);
    for (std::size_t j = 0; j < total; ++j) {
        spec[j] = std::sqrt(eig[j]) *
                  std::complex<double>(rng.next_normal(), rng.next_normal());
    }
    if (d == 1)
        fft_radix2(spec.data(), n, +1);
    else
        fft_2d(spec, n, n, +1);
    const double norm = 1.0 / std::sqrt(static_cast<double>(total));
    std::vector<double> field(d == 1 ? m : m * m);
    if (d == 1) {
        for (std::size_t j = 0; j < m; ++j) field[j] = spec[j].real() * norm;
    } else {
        for (std::size_t j1 = 0; j1 < m; ++j1)
            for (std::size_t j2 = 0; j2 < m; ++j2)
                field[j1 * m + j2] = spec[j1 * n + j2].real() * norm;
    }
    return field;
}

std::vector<double> sim_lgcp(const SpectralModel& m, const Window& win, Philox2x64& rng) {
    const int d = win.dim();
    if (d > 2) throw std::invalid_argument("lgcp simulation supports d <= 2");
    const double mu = m.params()[0], s2 = m.params()[1], phi = m.params()[2];
    double len[2];
    for (int i = 0; i < d; ++i) len[i] = win.side(i) + 2.0 * phi;  // dilate by one corr length
    if (d == 2 && len[1] != len[0])
        len[0] = len[1] = std::max(len[0], len[1]);
    std::size_t grid_m = d == 1 ? 4096 : 512;
    std::vector<double> field;
    for (;;) {
        try {
            field = grf_circulant(d, len, grid_m, s2, phi, rng);
            break;
        } catch (const std::runtime_error&) {
            grid_m *= 2;
            if (grid_m > (d == 1 ? 65536u : 2048u)) throw;
        }
    }
    // log-intensity on cells; dominate-and-thin inside the window
    const double dx = len[0] / static_cast<double>(grid_m);
    auto cell = [&](double coord) {
        auto idx = static_cast<long long>(std::floor((coord + 0.5 * len[0]) / dx));
        idx = std::clamp(idx, 0LL, static_cast<long long>(grid_m) - 1);
        return static_cast<std::size_t>(idx);
    };
    double lambda_max = 0.0;
    if (d == 1) {
        const std::size_t c_lo = cell(-0.5 * win.side(0)), c_hi = cell(0.5 * win.side(0));
        for (std::size_t j = c_lo; j <= c_hi; ++j)
            lambda_max = std::max(lambda_max, std::exp(mu + field[j]));
    } else {
        const std::size_t c_lo0 = cell(-0.5 * win.side(0)), c_hi0 = cell(0.5 * win.side(0));
        const std::size_t c_lo1 = cell(-0.5 * win.side(1)), c_hi1 = cell(0.5 * win.side(1));
        for (std::size_t j1 = c_lo0; j1 <= c_hi0; ++j1)
            for (std::size_t j2 = c_lo1; j2 <= c_hi1; ++j2)
                lambda_max = std::max(lambda_max, std::exp(mu + field[j1 * grid_m + j2]));
    }
    const std::uint64_t n_dom = rng.next_poisson(lambda_max * win.volume());
    std::vector<double> pts;
    double x[2];
    for (std::uint64_t j = 0; j < n_dom; ++j) {
        for (int i = 0; i < d; ++i) x[i] = win.side(i) * (rng.next_double() - 0.5);
        const double u = rng.next_double();
        const double g = d == 1 ? field[cell(x[0])] : field[cell(x[0]) * grid_m + cell(x[1])];
        if (u * lambda_max < std::exp(mu + g)) pts.insert(pts.end(), x, x + d);
    }
    return pts;
}

std::vector<double> sim_hawkes(const SpectralModel& m, const Window& win, Philox2x64& rng) {
    const double nu = m.params()[0], a = m.params()[1], beta = m.params()[2];
    const double half = 0.5 * win.side(0);
    const double gap = beta - a;
    // Left extension: expected descendants beyond lag L per point is
    // (a/gap) exp(-gap L); choose L so the truncation loss is ~1e-3.
    double ext = 0.0;
    if (a / gap > 1e-3) ext = std::log(a / gap / 1e-3) / gap;
    std::vector<double> queue;
    {
        const std::uint64_t n_imm = rng.next_poisson(nu * (win.side(0) + ext));
        for (std::uint64_t j = 0; j < n_imm; ++j)
            queue.push_back(-half - ext + (win.side(0) + ext) * rng.next_double());
    }
    std::vector<double> pts;
    const double mean_offspring = a / beta;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const double t = queue[head];
        if (t >= -half && t <= half) pts.push_back(t);
        const std::uint64_t n_child = rng.next_poisson(mean_offspring);
        for (std::uint64_t c = 0; c < n_child; ++c) {
            const double child = t + rng.next_exponential(beta);
            if (child <= half) queue.push_back(child);
        }
    }
    return pts;
}

// Truncated spectral projection sampler for the Gaussian-kernel DPP on the
// window torus: mode k carries eigenvalue F(K)(2 pi k / L); modes below the
// truncation threshold are dropped, Bernoulli thinning picks the active set,
// and points are drawn sequentially against the Gram-Schmidt projection.
class GdppSampler {
public:
    GdppSampler(const SpectralModel& m, const Window& win) : dim_(win.dim()) {
        if (dim_ > 2) throw std::invalid_argument("gdpp simulation supports d <= 2");
        lambda_ = m.params()[0];
        rho2_ = m.params()[1];
        for (int i = 0; i < dim_; ++i) len_[i] = win.side(i);
        const double peak = lambda_ * std::pow(M_PI * rho2_, 0.5 * dim_);
        if (peak >= 1.0 - 1e-12)
            throw std::runtime_error("gdpp spectral component at the existence boundary");
        const double w2max = std::max(0.0, 4.0 / rho2_ * std::log(peak / kTruncation));
        for (int i = 0; i < dim_; ++i)
            kmax_[i] = static_cast<int>(std::floor(std::sqrt(w2max) * len_[i] / kTwoPi));
    }

    double eigenvalue(const int* k) const {
        double w2 = 0.0;
        for (int i = 0; i < dim_; ++i) {
            const double wi = kTwoPi * k[i] / len_[i];
            w2 += wi * wi;
        }
        return lambda_ * std::pow(M_PI * rho2_, 0.5 * dim_) * std::exp(-rho2_ * w2 / 4.0);
    }

    double expected_count() const {
        double sum = 0.0;
        int k[2] = {0, 0};
        for (k[0] = -kmax_[0]; k[0] <= kmax_[0]; ++k[0]) {
            if (dim_ == 1) {
                const double e = eigenvalue(k);
                if (e >= kTruncation) sum += e;
                continue;
            }
            for (k[1] = -kmax_[1]; k[1] <= kmax_[1]; ++k[1]) {
                const double e = eigenvalue(k);
                if (e >= kTruncation) sum += e;
            }
        }
        return sum;
    }

    std::vector<double> sample(Philox2x64& rng) const {
        std::vector<int> modes;  // flat (k1[,k2]) of Bernoulli-selected modes
        int k[2] = {0, 0};
        for (k[0] = -kmax_[0]; k[0] <= kmax_[0]; ++k[0]) {
            if (dim_ == 1) {
                const double e = eigenvalue(k);
                if (e >= kTruncation && rng.next_double() < e) modes.push_back(k[0]);
                continue;
            }
            for (k[1] = -kmax_[1]; k[1] <= kmax_[1]; ++k[1]) {
                const double e = eigenvalue(k);
                if (e >= kTruncation && rng.next_double() < e) {
                    modes.push_back(k[0]);
                    modes.push_back(k[1]);
                }
            }
        }
        const std::size_t f = modes.size() / static_cast<std::size_t>(dim_);
        std::vector<double> pts;
        if (f == 0) return pts;

        double vol = 1.0;
        for (int i = 0; i < dim_; ++i) vol *= len_[i];
        // basis rows accepted so far, planar re/im, each of length f
        std::vector<double> ere, eim;
        ere.reserve(f * f);
        eim.reserve(f * f);
        std::vector<double> vre(f), vim(f), wre(f), wim(f);
        std::vector<std::vector<std::complex<double>>> axis_pow(static_cast<std::size_t>(dim_));

        for (std::size_t accepted = 0; accepted < f;) {
            double x[2];
            for (int i = 0; i < dim_; ++i) x[i] = len_[i] * (rng.next_double() - 0.5);
            const double u = rng.next_double();
            // v(x): phi_k(x) = vol^{-1/2} exp(i 2 pi k.x / L)
            for (int i = 0; i < dim_; ++i) {
                auto& pow_i = axis_pow[static_cast<std::size_t>(i)];
                pow_i.assign(static_cast<std::size_t>(2 * kmax_[i] + 1), {0.0, 0.0});
                const double theta = kTwoPi * x[i] / len_[i];
                const std::complex<double> step(std::cos(theta), std::sin(theta));
                std::complex<double> cur(std::cos(kmax_[i] * theta),
                                         -std::sin(kmax_[i] * theta));
                for (int kk = -kmax_[i]; kk <= kmax_[i]; ++kk) {
                    pow_i[static_cast<std::size_t>(kk + kmax_[i])] = cur;
                    cur *= step;
                }
            }
            const double amp = 1.0 / std::sqrt(vol);
            for (std::size_t mth = 0; mth < f; ++mth) {
                std::complex<double> v = axis_pow[0][static_cast<std::size_t>(
                    modes[mth * static_cast<std::size_t>(dim_)] + kmax_[0])];
                if (dim_ == 2)
                    v *= axis_pow[1][static_cast<std::size_t>(
                        modes[mth * 2 + 1] + kmax_[1])];
                vre[mth] = amp * v.real();
                vim[mth] = amp * v.imag();
            }
            // accept with prob 1 - |E v|^2 L^d / F; early exit once rejected
            const double budget = (1.0 - u) * static_cast<double>(f) / vol;
            double proj = 0.0;
            bool rejected = false;
            for (std::size_t j = 0; j < accepted; ++j) {
                const double* er = ere.data() + j * f;
                const double* ei = eim.data() + j * f;
                double sr = 0.0, si = 0.0;
                for (std::size_t mth = 0; mth < f; ++mth) {
                    sr += er[mth] * vre[mth] + ei[mth] * vim[mth];
                    si += er[mth] * vim[mth] - ei[mth] * vre[mth];
                }
                wre[j] = sr;
                wim[j] = si;
                proj += sr * sr + si * si;
                if (proj >= budget) {
                    rejected = true;
                    break;
                }
            }
            if (rejected) continue;
            // residual g = v - sum_j w_j e_j, normalized, appended
            for (std::size_t j = 0; j < accepted; ++j) {
                const double* er = ere.data() + j * f;
                const double* ei = eim.data() + j * f;
                const double sr = wre[j], si = wim[j];
                for (std::size_t mth = 0; mth < f; ++mth) {
                    vre[mth] -= sr * er[mth] - si * ei[mth];
                    vim[mth] -= sr * ei[mth] + si * er[mth];
                }
            }
            double norm2 = 0.0;
            for (std::size_t mth = 0; mth < f; ++mth)
                norm2 += vre[mth] * vre[mth] + vim[mth] * vim[mth];
            if (norm2 <= 0.0) continue;
            const double inv = 1.0 / std::sqrt(norm2);
            for (std::size_t mth = 0; mth < f; ++mth) {
                ere.push_back(vre[mth] * inv);
                eim.push_back(vim[mth] * inv);
            }
            pts.insert(pts.end(), x, x + dim_);
            ++accepted;
        }
        return pts;
    }

    static constexpr double kTruncation = 1e-4;

private:
    int dim_;
    double lambda_ = 0.0, rho2_ = 0.0;
    double len_[2] = {0.0, 0.0};
    int kmax_[2] = {0, 0};
};

}  // namespace

PointPattern simulate(const SpectralModel& model, const Window& window, std::uint64_t seed) {
    if (model.dim() != window.dim())
        throw std::invalid_argument("model and window dimensions differ");
    Philox2x64 rng(seed, 0x5150'5150ULL);
    std::vector<double> pts;
    switch (model.family()) {
        case SpectralModel::Family::Poisson: pts = sim_poisson(model, window, rng); break;
        case SpectralModel::Family::Thomas: pts = sim_thomas(model, window, rng); break;
        case SpectralModel::Family::Matern: pts = sim_matern(model, window, rng); break;
        case SpectralModel::Family::Gdpp: {
            GdppSampler sampler(model, window);
            pts = sampler.sample(rng);
            break;
        }
        case SpectralModel::Family::HawkesExp: pts = sim_hawkes(model, window, rng); break;
        case SpectralModel::Family::LgcpExp: pts = sim_lgcp(model, window, rng); break;
    }
    return PointPattern(window, std::move(pts));
}

}  // namespace ppspec
