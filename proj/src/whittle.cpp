#include "ppspec/whittle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "ppspec/dft.hpp"
#include "ppspec/rng.hpp"

namespace ppspec {

namespace {

constexpr double kSpectrumFloor = 1e-12;
constexpr double kSentinel = 1e100;

// Unique squared integer radii of a grid plus per-point map into them; the
// isotropic families make every objective evaluation O(#radii) exp calls.
struct RadialLayout {
    std::vector<double> w;            // radial frequency per distinct radius
    std::vector<std::uint32_t> slot;  // grid point -> radius slot
    std::vector<double> data_sum;     // sum of field values per slot (or f sums)
    std::vector<double> count;        // points per slot

    static RadialLayout build(const FrequencyGrid& grid, const std::vector<double>& values) {
        RadialLayout out;
        std::map<long long, std::uint32_t> slot_of;
        const double base = kTwoPi / grid.spacing();
        out.slot.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            long long r2 = 0;
            const int* k = grid.index(i);
            for (int j = 0; j < grid.dim(); ++j)
                r2 += static_cast<long long>(k[j]) * static_cast<long long>(k[j]);
            auto [it, inserted] = slot_of.try_emplace(
                r2, static_cast<std::uint32_t>(slot_of.size()));
            if (inserted) {
                out.w.push_back(base * std::sqrt(static_cast<double>(r2)));
                out.data_sum.push_back(0.0);
                out.count.push_back(0.0);
            }
            out.slot[i] = it->second;
            out.data_sum[it->second] += values[i];
            out.count[it->second] += 1.0;
        }
        return out;
    }
};

// Objective over the radial layout: sum_k [ y_k / f(w_k) + log f(w_k) ]
// collapses to sum over radius slots of [ data_sum/f + count log f ].
class ObjectiveEvaluator {
public:
    ObjectiveEvaluator(SpectralModel::Family family, int dim, RadialLayout layout,
                       double reduced_lambda = -1.0)
        : family_(family), dim_(dim), layout_(std::move(layout)),
          reduced_lambda_(reduced_lambda) {}

    bool reduced() const { return reduced_lambda_ > 0.0; }
    int n_free() const {
        if (reduced()) return 2;
        switch (family_) {
            case SpectralModel::Family::Poisson: return 1;
            case SpectralModel::Family::Gdpp: return 2;
            default: return 3;
        }
    }

    std::vector<double> to_theta(std::span<const double> free) const {
        if (reduced())
            return {free[0], reduced_lambda_ / free[0], free[1]};
        return std::vector<double>(free.begin(), free.end());
    }

    double operator()(std::span<const double> free) const {
        const auto theta = to_theta(free);
        if (!SpectralModel::feasible(family_, dim_, theta)) return penalty(theta);
        const SpectralModel model(family_, dim_, theta);
        double acc = 0.0;
        for (std::size_t s = 0; s < layout_.w.size(); ++s) {
            const double f = model.spectral_density_radial(layout_.w[s]);
            if (!(f > kSpectrumFloor)) return kSentinel;
            acc += layout_.data_sum[s] / f + layout_.count[s] * std::log(f);
        }
        return std::isfinite(acc) ? acc : kSentinel;
    }

private:
    double penalty(const std::vector<double>& theta) const {
        double excess = 0.0;
        for (double t : theta) {
            if (!(t > 0.0) || !std::isfinite(t)) excess += 1.0;
        }
        if (family_ == SpectralModel::Family::Gdpp && theta.size() == 2 && theta[0] > 0.0 &&
            theta[1] > 0.0) {
            excess += std::max(0.0, M_PI * theta[1] * std::pow(theta[0], 2.0 / dim_) - 1.0);
        }
        if (family_ == SpectralModel::Family::HawkesExp && theta.size() == 3) {
            excess += std::max(0.0, theta[1] - theta[2]);
        }
        return kSentinel * (1.0 + excess);
    }

    SpectralModel::Family family_;
    int dim_;
    RadialLayout layout_;
    double reduced_lambda_;
};

struct NmOutcome {
    std::vector<double> x;
    double f = kSentinel;
    int iterations = 0;
    bool converged = false;
};

// Nelder-Mead in log10-parameter space with box clamping.
template <typename F>
NmOutcome nelder_mead(const F& fn, std::span<const double> u0, const ParameterBox& ubox,
                      const OptimizerConfig& cfg) {
    const std::size_t p = u0.size();
    auto clamp = [&](std::vector<double>& u) {
        for (std::size_t j = 0; j < p; ++j) u[j] = std::clamp(u[j], ubox.lo[j], ubox.hi[j]);
    };
    std::vector<std::vector<double>> simplex(p + 1, std::vector<double>(u0.begin(), u0.end()));
    for (std::size_t j = 0; j < p; ++j) {
        simplex[j + 1][j] += 0.05 * (ubox.hi[j] - ubox.lo[j]);
    }
    std::vector<double> fv(p + 1);
    for (std::size_t i = 0; i <= p; ++i) {
        clamp(simplex[i]);
        fv[i] = fn(simplex[i]);
    }
    NmOutcome out;
    int iter = 0;
    std::vector<std::size_t> order(p + 1);
    for (; iter < cfg.max_iterations; ++iter) {
        for (std::size_t i = 0; i <= p; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order[0], worst = order[p], second = order[p - 1];
        double spread = 0.0;
        for (std::size_t i = 0; i <= p; ++i) {
            for (std::size_t j = 0; j < p; ++j)
                spread = std::max(spread, std::abs(simplex[i][j] - simplex[best][j]));
        }
        if (spread < cfg.x_tol &&
            std::abs(fv[worst] - fv[best]) < cfg.f_tol * (1.0 + std::abs(fv[best]))) {
            out.converged = true;
            break;
        }
        std::vector<double> centroid(p, 0.0);
        for (std::size_t i = 0; i <= p; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < p; ++j) centroid[j] += simplex[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(p);
        auto blend = [&](double t) {
            std::vector<double> x(p);
            for (std::size_t j = 0; j < p; ++j)
                x[j] = centroid[j] + t * (centroid[j] - simplex[worst][j]);
            clamp(x);
            return x;
        };
        auto reflect = blend(1.0);
        const double fr = fn(reflect);
        if (fr < fv[best]) {
            auto expand = blend(2.0);
            const double fe = fn(expand);
            if (fe < fr) {
                simplex[worst] = std::move(expand);
                fv[worst] = fe;
            } else {
                simplex[worst] = std::move(reflect);
                fv[worst] = fr;
            }
        } else if (fr < fv[second]) {
            simplex[worst] = std::move(reflect);
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            auto contract = blend(outside ? 0.5 : -0.5);
            const double fc = fn(contract);
            if (fc < std::min(fr, fv[worst])) {
                simplex[worst] = std::move(contract);
                fv[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= p; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < p; ++j)
                        simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
                    fv[i] = fn(simplex[i]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= p; ++i)
        if (fv[i] < fv[best]) best = i;
    out.x = simplex[best];
    out.f = fv[best];
    out.iterations = iter;
    return out;
}

ParameterBox free_box(const ObjectiveEvaluator& eval, SpectralModel::Family family, int dim,
                      const OptimizerConfig& cfg) {
    if (cfg.box) return *cfg.box;
    ParameterBox box = default_box(family, dim);
    if (eval.reduced()) {
        // keep (kappa, sigma2) bounds of the thomas box
        return ParameterBox{{box.lo[0], box.lo[2]}, {box.hi[0], box.hi[2]}};
    }
    return box;
}

// Feasibility projection for coupled constraints, applied to starts only.
void project_start(SpectralModel::Family family, int dim, bool reduced,
                   std::vector<double>& theta) {
    if (reduced) return;
    if (family == SpectralModel::Family::Gdpp) {
        const double bound = 1.0 / (M_PI * std::pow(theta[0], 2.0 / dim));
        theta[1] = std::min(theta[1], 0.9 * bound);
    } else if (family == SpectralModel::Family::HawkesExp) {
        if (theta[1] >= theta[2]) theta[1] = 0.5 * theta[2];
    }
}

std::vector<double> heuristic_start(SpectralModel::Family family, bool reduced,
                                    double lambda_hint) {
    const double lam = std::max(lambda_hint, 1e-3);
    if (reduced) return {std::max(lam / 10.0, 1e-3), 1.0};
    switch (family) {
        case SpectralModel::Family::Poisson: return {lam};
        case SpectralModel::Family::Thomas: return {std::max(lam / 10.0, 1e-3), 10.0, 1.0};
        case SpectralModel::Family::Matern: return {std::max(lam / 10.0, 1e-3), 10.0, 1.0};
        case SpectralModel::Family::Gdpp: return {lam, 0.5 / (M_PI * std::pow(lam, 1.0))};
        case SpectralModel::Family::HawkesExp: return {0.5 * lam, 1.0, 2.0};
        default: throw std::invalid_argument("family cannot be fitted");
    }
}

FitResult minimize(const ObjectiveEvaluator& eval, SpectralModel::Family family, int dim,
                   const OptimizerConfig& cfg, double lambda_hint) {
    const int p = eval.n_free();
    ParameterBox box = free_box(eval, family, dim, cfg);
    if (static_cast<int>(box.lo.size()) != p || static_cast<int>(box.hi.size()) != p)
        throw std::invalid_argument("parameter box size does not match family");
    ParameterBox ubox;
    ubox.lo.resize(static_cast<std::size_t>(p));
    ubox.hi.resize(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) {
        if (!(box.lo[static_cast<std::size_t>(j)] > 0.0))
            throw std::invalid_argument("parameter box must be positive");
        ubox.lo[static_cast<std::size_t>(j)] = std::log10(box.lo[static_cast<std::size_t>(j)]);
        ubox.hi[static_cast<std::size_t>(j)] = std::log10(box.hi[static_cast<std::size_t>(j)]);
    }
    auto fn_u = [&](std::span<const double> u) {
        std::vector<double> theta(u.size());
        for (std::size_t j = 0; j < u.size(); ++j) theta[j] = std::pow(10.0, u[j]);
        return eval(theta);
    };

    const int starts = std::max(1, cfg.multistarts);
    Philox2x64 shuffle_rng(cfg.seed, 0xB0C5ULL);
    std::vector<int> rotation(static_cast<std::size_t>(p), 0);
    for (int j = 0; j < p; ++j)
        rotation[static_cast<std::size_t>(j)] =
            cfg.seed == 0 ? j : static_cast<int>(shuffle_rng.next_u64() % starts);

    NmOutcome winner;
    int winner_index = -1;
    int total_iter = 0;
    for (int s = 0; s < starts; ++s) {
        std::vector<double> theta0;
        if (s == 0) {
            theta0 = heuristic_start(family, eval.reduced(), lambda_hint);
        } else {
            // Latin-square row in the log box
            theta0.resize(static_cast<std::size_t>(p));
            for (int j = 0; j < p; ++j) {
                const int cellpos = (s + rotation[static_cast<std::size_t>(j)]) % starts;
                const double frac = (cellpos + 0.5) / starts;
                const double u = ubox.lo[static_cast<std::size_t>(j)] +
                                 frac * (ubox.hi[static_cast<std::size_t>(j)] -
                                         ubox.lo[static_cast<std::size_t>(j)]);
                theta0[static_cast<std::size_t>(j)] = std::pow(10.0, u);
            }
        }
        project_start(family, dim, eval.reduced(), theta0);
        std::vector<double> u0(static_cast<std::size_t>(p));
        for (int j = 0; j < p; ++j) {
            u0[static_cast<std::size_t>(j)] = std::clamp(
                std::log10(std::max(theta0[static_cast<std::size_t>(j)], 1e-300)),
                ubox.lo[static_cast<std::size_t>(j)], ubox.hi[static_cast<std::size_t>(j)]);
        }
        NmOutcome run = nelder_mead(fn_u, u0, ubox, cfg);
        total_iter += run.iterations;
        if (winner_index < 0 || run.f < winner.f) {
            winner = std::move(run);
            winner_index = s;
        }
    }

    FitResult result;
    std::vector<double> free_theta(winner.x.size());
    for (std::size_t j = 0; j < winner.x.size(); ++j) free_theta[j] = std::pow(10.0, winner.x[j]);
    result.theta = eval.to_theta(free_theta);
    result.objective = winner.f;
    result.iterations = total_iter;
    result.converged = winner.converged && winner.f < kSentinel;
    result.reduced = eval.reduced();
    if (SpectralModel::feasible(family, dim, result.theta)) {
        const SpectralModel fitted(family, dim, result.theta);
        result.family = fitted.family_name();
        result.implied_intensity =
            eval.reduced() ? 0.0 : fitted.intensity();  // reduced overwritten by caller
    } else {
        result.converged = false;
        result.family = SpectralModel::family_to_name(family);
    }
    return result;
}

void attach_grid_meta(FitResult& r, const PeriodogramField& field) {
    r.lambda_hat = field.lambda_hat;
    r.grid_spacing = field.grid.spacing();
    r.domain_d0 = field.grid.domain().d0;
    r.domain_d1 = field.grid.domain().d1;
    r.grid_size = field.grid.size();
}

}  // namespace

ParameterBox default_box(SpectralModel::Family family, int dim) {
    (void)dim;
    switch (family) {
        case SpectralModel::Family::Poisson: return {{1e-6}, {1e4}};
        case SpectralModel::Family::Thomas: return {{1e-3, 1e-2, 1e-4}, {10.0, 1e3, 25.0}};
        case SpectralModel::Family::Matern: return {{1e-3, 1e-2, 1e-3}, {10.0, 1e3, 20.0}};
        case SpectralModel::Family::Gdpp: return {{1e-3, 1e-6}, {1e3, 10.0}};
        case SpectralModel::Family::HawkesExp:
            return {{1e-4, 1e-4, 1e-4}, {100.0, 50.0, 50.0}};
        default:
            throw std::invalid_argument("no parameter box for this family");
    }
}

double whittle_objective(const PeriodogramField& field, const SpectralModel& model) {
    ObjectiveEvaluator eval(model.family(), model.dim(),
                            RadialLayout::build(field.grid, field.values));
    return eval(model.params());
}

double spectral_divergence(const std::vector<double>& f_true, const SpectralModel& model,
                           const FrequencyGrid& grid) {
    ObjectiveEvaluator eval(model.family(), model.dim(), RadialLayout::build(grid, f_true));
    return eval(model.params());
}

double spectral_divergence(const SpectralModel& true_model, const SpectralModel& model,
                           const FrequencyGrid& grid) {
    return spectral_divergence(spectral_density_on_grid(true_model, grid), model, grid);
}

FitResult fit_field(const PeriodogramField& field, SpectralModel::Family family,
                    const OptimizerConfig& config) {
    ObjectiveEvaluator eval(family, field.grid.dim(),
                            RadialLayout::build(field.grid, field.values));
    const double hint = field.lambda_hat > 0.0 ? field.lambda_hat : 1.0;
    FitResult r = minimize(eval, family, field.grid.dim(), config, hint);
    attach_grid_meta(r, field);
    return r;
}

FitResult fit(const PointPattern& pattern, SpectralModel::Family family,
              const DomainSpec& domain, const Taper& taper, const SpacingRule& spacing,
              const OptimizerConfig& config) {
    if (pattern.size() == 0) throw std::invalid_argument("cannot fit an empty pattern");
    const FrequencyGrid grid = build_grid(pattern.window(), domain, spacing);
    const PeriodogramField field = periodogram_grid(pattern, taper, grid);
    return fit_field(field, family, config);
}

FitResult fit_reduced_tcp_field(const PeriodogramField& field, const OptimizerConfig& config) {
    if (!(field.lambda_hat > 0.0))
        throw std::invalid_argument("reduced fit requires a positive intensity estimate");
    ObjectiveEvaluator eval(SpectralModel::Family::Thomas, field.grid.dim(),
                            RadialLayout::build(field.grid, field.values), field.lambda_hat);
    FitResult r = minimize(eval, SpectralModel::Family::Thomas, field.grid.dim(), config,
                           field.lambda_hat);
    attach_grid_meta(r, field);
    r.implied_intensity = field.lambda_hat;  // exact by the algebraic constraint
    return r;
}

FitResult fit_reduced_tcp(const PointPattern& pattern, const DomainSpec& domain,
                          const Taper& taper, const SpacingRule& spacing,
                          const OptimizerConfig& config) {
    if (pattern.size() == 0) throw std::invalid_argument("cannot fit an empty pattern");
    const FrequencyGrid grid = build_grid(pattern.window(), domain, spacing);
    const PeriodogramField field = periodogram_grid(pattern, taper, grid);
    return fit_reduced_tcp_field(field, config);
}

FitResult best_fit_oracle(const SpectralModel& true_model, SpectralModel::Family family,
                          const DomainSpec& domain, const Window& window,
                          const SpacingRule& spacing, const OptimizerConfig& config) {
    const FrequencyGrid grid = build_grid(window, domain, spacing);
    const auto f_true = spectral_density_on_grid(true_model, grid);
    ObjectiveEvaluator eval(family, true_model.dim(), RadialLayout::build(grid, f_true));
    FitResult r = minimize(eval, family, true_model.dim(), config, true_model.intensity());
    r.grid_spacing = grid.spacing();
    r.domain_d0 = domain.d0;
    r.domain_d1 = domain.d1;
    r.grid_size = grid.size();
    r.lambda_hat = true_model.intensity();
    return r;
}

}  // namespace ppspec
