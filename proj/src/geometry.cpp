#include "ppspec/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ppspec {

Window::Window(int dim, std::vector<double> side_lengths)
    : dim_(dim), side_(std::move(side_lengths)) {
    if (dim_ < 1 || dim_ > 3) throw std::invalid_argument("window dimension must be 1, 2, or 3");
    if (side_.size() != static_cast<std::size_t>(dim_))
        throw std::invalid_argument("window side count does not match dimension");
    volume_ = 1.0;
    for (double a : side_) {
        if (!(a > 0.0)) throw std::invalid_argument("window side lengths must be positive");
        volume_ *= a;
    }
}

Window Window::cube(int dim, double side) {
    return Window(dim, std::vector<double>(static_cast<std::size_t>(dim), side));
}

bool Window::contains(std::span<const double> x) const {
    if (x.size() != static_cast<std::size_t>(dim_)) return false;
    for (int i = 0; i < dim_; ++i) {
        if (std::abs(x[static_cast<std::size_t>(i)]) > 0.5 * side_[static_cast<std::size_t>(i)])
            return false;
    }
    return true;
}

PointPattern::PointPattern(Window window, std::vector<double> flat_coords)
    : window_(std::move(window)), coords_(std::move(flat_coords)) {
    const int d = window_.dim();
    if (coords_.size() % static_cast<std::size_t>(d) != 0)
        throw std::invalid_argument("coordinate count not a multiple of dimension");
    const std::size_t n = coords_.size() / static_cast<std::size_t>(d);
    for (std::size_t i = 0; i < n; ++i) {
        if (!window_.contains(std::span<const double>(coords_.data() + i * d, d)))
            throw std::invalid_argument("point outside window (row " + std::to_string(i) + ")");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto less = [&](std::size_t a, std::size_t b) {
        const double* pa = coords_.data() + a * d;
        const double* pb = coords_.data() + b * d;
        return std::lexicographical_compare(pa, pa + d, pb, pb + d);
    };
    std::sort(order.begin(), order.end(), less);
    std::vector<double> sorted(coords_.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) sorted[i * d + j] = coords_[order[i] * d + j];
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (std::equal(sorted.begin() + (i - 1) * d, sorted.begin() + i * d,
                       sorted.begin() + i * d))
            throw std::invalid_argument("duplicate point in pattern");
    }
    coords_ = std::move(sorted);
}

DomainSpec::DomainSpec(double lo, double hi) : d0(lo), d1(hi) {
    if (!(d0 >= 0.0) || !(d1 > d0) || !std::isfinite(d1))
        throw std::invalid_argument("domain requires 0 <= d0 < d1 < inf");
}

SpacingRule SpacingRule::parse(const std::string& text) {
    if (text == "A") return side();
    if (text == "A/2") return half_side();
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos == text.size() && v > 0.0) return explicit_value(v);
    } catch (...) {
    }
    throw std::invalid_argument("spacing rule must be 'A', 'A/2', or a positive number");
}

double SpacingRule::resolve(const Window& window) const {
    if (kind == Kind::Explicit) {
        if (!(value > 0.0)) throw std::invalid_argument("explicit Omega must be positive");
        return value;
    }
    for (int i = 1; i < window.dim(); ++i) {
        if (window.side(i) != window.side(0))
            throw std::invalid_argument(
                "spacing rules tied to A require a cube window; pass an explicit Omega");
    }
    return kind == Kind::SideLength ? window.side(0) : window.side(0) / 2.0;
}

FrequencyGrid::FrequencyGrid(int dim, double omega_spacing, DomainSpec domain,
                             std::vector<int> flat_index)
    : dim_(dim), omega_(omega_spacing), domain_(domain), index_(std::move(flat_index)) {
    freq_.resize(index_.size());
    for (std::size_t i = 0; i < index_.size(); ++i) {
        freq_[i] = kTwoPi * static_cast<double>(index_[i]) / omega_;
    }
    ring_hi_ = 0;
    ring_lo_ = 0;
    if (!index_.empty()) {
        int lo = 1 << 30, hi = 0;
        const std::size_t n = size();
        for (std::size_t i = 0; i < n; ++i) {
            int m = 0;
            for (int j = 0; j < dim_; ++j) m = std::max(m, std::abs(index(i)[j]));
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
        ring_lo_ = lo;
        ring_hi_ = hi;
    }
}

double FrequencyGrid::cell_measure() const {
    double c = 1.0;
    for (int i = 0; i < dim_; ++i) c *= kTwoPi / omega_;
    return c;
}

FrequencyGrid build_grid(const Window& window, const DomainSpec& domain,
                         const SpacingRule& rule) {
    const int d = window.dim();
    const double omega = rule.resolve(window);
    // The annulus condition d0 <= (2pi/Omega) max|k_i| <= d1 is an integer
    // condition on max|k_i|; snap the bounds so boundary frequencies like
    // |w|_inf == d1 are kept regardless of rounding in 2*pi*k/Omega.
    const double scale = omega / kTwoPi;
    const long lo_l = static_cast<long>(std::ceil(domain.d0 * scale - 1e-9));
    const long hi_l = static_cast<long>(std::floor(domain.d1 * scale + 1e-9));
    if (hi_l < lo_l || hi_l < 0)
        throw std::invalid_argument("empty frequency domain");
    const int lo = static_cast<int>(std::max(lo_l, 0L));
    const int hi = static_cast<int>(hi_l);

    std::vector<int> flat;
    std::array<int, 3> k{0, 0, 0};
    auto emit = [&](auto&& self, int axis) -> void {
        if (axis == d) {
            int m = 0;
            for (int j = 0; j < d; ++j) m = std::max(m, std::abs(k[static_cast<std::size_t>(j)]));
            if (m >= lo && m <= hi) {
                for (int j = 0; j < d; ++j) flat.push_back(k[static_cast<std::size_t>(j)]);
            }
            return;
        }
        for (int v = -hi; v <= hi; ++v) {
            k[static_cast<std::size_t>(axis)] = v;
            self(self, axis + 1);
        }
    };
    emit(emit, 0);
    if (flat.empty()) throw std::invalid_argument("empty frequency domain");
    return FrequencyGrid(d, omega, domain, std::move(flat));
}

}  // namespace ppspec
