#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ppspec {

inline constexpr double kTwoPi = 6.283185307179586476925287;

// Centered rectangular observation window prod_i [-A_i/2, A_i/2].
class Window {
public:
    Window(int dim, std::vector<double> side_lengths);
    static Window cube(int dim, double side);

    int dim() const { return dim_; }
    double side(int i) const { return side_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& sides() const { return side_; }
    double volume() const { return volume_; }
    bool contains(std::span<const double> x) const;

private:
    int dim_;
    std::vector<double> side_;
    double volume_;
};

// Simple point set inside a window. Points are canonicalized to lexicographic
// order on construction so every downstream sum is bit-stable; duplicates and
// out-of-window points are rejected.
class PointPattern {
public:
    PointPattern(Window window, std::vector<double> flat_coords);

    const Window& window() const { return window_; }
    int dim() const { return window_.dim(); }
    std::size_t size() const { return coords_.size() / static_cast<std::size_t>(dim()); }
    const double* point(std::size_t i) const {
        return coords_.data() + i * static_cast<std::size_t>(dim());
    }
    const std::vector<double>& coords() const { return coords_; }

private:
    Window window_;
    std::vector<double> coords_;
};

// Sup-norm annulus {w : d0 <= |w|_inf <= d1}.
struct DomainSpec {
    double d0;
    double d1;

    DomainSpec(double lo, double hi);
    bool contains_inf_norm(double r) const { return r >= d0 && r <= d1; }
};

struct SpacingRule {
    enum class Kind { SideLength, HalfSideLength, Explicit };
    Kind kind = Kind::SideLength;
    double value = 0.0;  // used when kind == Explicit

    static SpacingRule side() { return {Kind::SideLength, 0.0}; }
    static SpacingRule half_side() { return {Kind::HalfSideLength, 0.0}; }
    static SpacingRule explicit_value(double omega) { return {Kind::Explicit, omega}; }
    static SpacingRule parse(const std::string& text);

    double resolve(const Window& window) const;
};

// Lattice frequencies w_k = 2 pi k / Omega inside the annulus, lexicographic
// in the integer index k. ring_lo/ring_hi are the integer bounds on |k|_inf
// equivalent to the annulus condition.
class FrequencyGrid {
public:
    FrequencyGrid(int dim, double omega_spacing, DomainSpec domain,
                  std::vector<int> flat_index);

    int dim() const { return dim_; }
    double spacing() const { return omega_; }           // Omega
    double cell_measure() const;                        // (2 pi / Omega)^d
    const DomainSpec& domain() const { return domain_; }
    std::size_t size() const { return index_.size() / static_cast<std::size_t>(dim_); }
    const int* index(std::size_t i) const {
        return index_.data() + i * static_cast<std::size_t>(dim_);
    }
    const double* frequency(std::size_t i) const {
        return freq_.data() + i * static_cast<std::size_t>(dim_);
    }
    const std::vector<double>& frequencies() const { return freq_; }
    int ring_lo() const { return ring_lo_; }
    int ring_hi() const { return ring_hi_; }

private:
    int dim_;
    double omega_;
    DomainSpec domain_;
    std::vector<int> index_;
    std::vector<double> freq_;
    int ring_lo_ = 0, ring_hi_ = 0;
};

FrequencyGrid build_grid(const Window& window, const DomainSpec& domain,
                         const SpacingRule& rule);

// Periodogram samples on a grid plus the metadata needed to reuse them.
struct PeriodogramField {
    FrequencyGrid grid;
    std::vector<double> values;
    std::string taper_id;
    Window window;
    double lambda_hat = 0.0;
};

}  // namespace ppspec
