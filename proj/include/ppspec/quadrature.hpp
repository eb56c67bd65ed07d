#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace ppspec {

namespace detail {

// 15-point Kronrod / 7-point Gauss pair (QUADPACK dqk15 constants).
inline constexpr double kGk15Nodes[8] = {
    0.99145537112081263921, 0.94910791234275852453, 0.86486442335976907279,
    0.74153118559939443986, 0.58608723546769113029, 0.40584515137739716691,
    0.20778495500789846760, 0.0};
inline constexpr double kGk15WeightsK[8] = {
    0.02293532201052922496, 0.06309209262997855329, 0.10479001032225018384,
    0.14065325971552591875, 0.16900472663926790283, 0.19035057806478540991,
    0.20443294007529889241, 0.20948214108472782801};
inline constexpr double kGk15WeightsG[4] = {
    0.12948496616886969327, 0.27970539148927666790, 0.38183005050511894495,
    0.41795918367346938776};

template <typename T>
double abs_value(const T& x) {
    if constexpr (std::is_same_v<T, double>) {
        return std::abs(x);
    } else {
        return std::abs(x);
    }
}

template <typename F, typename T>
void gk15(const F& f, double a, double b, T& result, double& err) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    T gauss = T{};
    T kronrod = kGk15WeightsK[7] * f(center);
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kGk15Nodes[i];
        const T sum = f(center - dx) + f(center + dx);
        kronrod += kGk15WeightsK[i] * sum;
        if (i % 2 == 1) gauss += kGk15WeightsG[i / 2] * sum;
    }
    gauss += kGk15WeightsG[3] * f(center);
    result = kronrod * half;
    err = abs_value<T>((kronrod - gauss) * half);
}

}  // namespace detail

// Adaptive bisection on [a, b]; worst interval first. T is double or
// std::complex<double>.
template <typename T, typename F>
T integrate(const F& f, double a, double b, double abs_tol = 1e-12,
            double rel_tol = 1e-10, int max_intervals = 4000) {
    struct Interval {
        double a, b, err;
        T val;
    };
    std::vector<Interval> stack;
    Interval whole;
    detail::gk15(f, a, b, whole.val, whole.err);
    whole.a = a;
    whole.b = b;
    stack.push_back(whole);
    for (int iter = 0; iter < max_intervals; ++iter) {
        T total = T{};
        double err_total = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < stack.size(); ++i) {
            total += stack[i].val;
            err_total += stack[i].err;
            if (stack[i].err > stack[worst].err) worst = i;
        }
        if (err_total <= std::max(abs_tol, rel_tol * detail::abs_value<T>(total)))
            return total;
        Interval bad = stack[worst];
        const double mid = 0.5 * (bad.a + bad.b);
        if (mid <= bad.a || mid >= bad.b) return total;  // interval exhausted
        Interval left, right;
        detail::gk15(f, bad.a, mid, left.val, left.err);
        detail::gk15(f, mid, bad.b, right.val, right.err);
        left.a = bad.a;
        left.b = mid;
        right.a = mid;
        right.b = bad.b;
        stack[worst] = left;
        stack.push_back(right);
    }
    T total = T{};
    for (const auto& iv : stack) total += iv.val;
    return total;
}

// Iterated 2-D integral over [ax,bx] x [ay,by]; oracle use only.
template <typename F>
double integrate_2d(const F& f, double ax, double bx, double ay, double by,
                    double abs_tol = 1e-10, double rel_tol = 1e-8) {
    auto outer = [&](double y) {
        return integrate<double>([&](double x) { return f(x, y); }, ax, bx,
                                 abs_tol * 0.1, rel_tol * 0.1);
    };
    return integrate<double>(outer, ay, by, abs_tol, rel_tol);
}

// \int_0^\infty g(r) J0(w r) r dr for absolutely integrable radial g.
// Splits at Bessel zeros of J0(w r) and stops once segments are negligible.
double hankel0(const std::function<double(double)>& g, double w,
               double r_max = 60.0, double tol = 1e-8);

// Inverse Fourier transform (2pi)^{-d} \int g(|x|) exp(-i x.w) dx of a radial
// function, d in {1,2,3}; real-valued by symmetry.
double radial_inverse_fourier(const std::function<double(double)>& g, int dim,
                              double w, double r_max = 60.0, double tol = 1e-8);

}  // namespace ppspec
