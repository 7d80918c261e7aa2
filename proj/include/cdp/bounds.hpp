#pragma once

// Closed-form constants and combinatorial bounds: the decay rate psi(d), the
// influence-set constants c1, c2, c3, the path-counting constants nu, s, c6,
// c7, the maximizer r* of the side-count function f(r), and the triggering
// bound c7 N^2 c6^N. Everything that can overflow or underflow is evaluated in
// log space through lgamma.

#include <cstdint>
#include <optional>
#include <vector>

namespace cdp {

struct ConstantsTable {
    int d = 2;
    double psi = 0;   // -(1/8d) log((2d-1)/2d)
    double c1 = 0;    // [4d(1+d)]^{2d}
    double c2 = 0;    // 16 d^4 c1 / (2d-1), from the radius-tail chain; not sharp
    double c3 = 0;    // 2 c2
    double nu = 0;    // (439/18144)^{1/4}
    double s = 0;     // 9 nu^2 / 2
    double c6 = 0;    // 1/3 + (2/3) sqrt(s + 1/4) + 0.001
    double c5 = 0;
    bool c5_calibrated = false;  // true when c5 is the empirical sup, not a proven constant
    double c7 = 0;    // 8 c5 / (1-c6)^2 (1 + 7/c6 + 12/c6^2)
};

double psi_of(int d);
double c1_of(int d);
double c2_of(int d);
double c3_of(int d);
double nu_value();
double s_value();
double c6_value();
double c7_of(double c5, double c6);

/// Empirical c5: sup over 1 <= n <= n_max of (2/3)^n C(n-r*-1, r*-1) s^r* / c6^n.
/// Not a rigorous constant.
double calibrate_c5(int n_max = 100000);

/// Full table; c5 defaults to calibrate_c5().
ConstantsTable constants(int d, std::optional<double> c5 = std::nullopt);

double log_binomial(double n, double k);

/// r* = ceil(n/2 - (2s + 1 + sqrt(Pi)) / (8s + 2)), Pi = (4s+1) n (n-2) + (2s+1)^2.
std::int64_t r_star_closed_form(std::int64_t n, double s);

struct SideCountScan {
    std::int64_t n = 0;
    std::vector<double> log_f;  // log f(r) for r = 1 .. floor(n/2)
    std::int64_t argmax = 0;    // brute force
    std::int64_t r_star = 0;    // closed form
    bool unimodal = false;
};

/// f(r) = s^r C(n-r-1, r-1) on 1 <= r <= n/2.
SideCountScan f_and_rstar(std::int64_t n, double s);
SideCountScan f_and_rstar(std::int64_t n);

/// [C(n-r*-1, r*-1) s^r*]^{1/n}. For s = 0 the maximizing term is the r = 0
/// term, taken as 1.
double root_limit(std::int64_t n, double s);
double root_limit(std::int64_t n);
/// 1/2 + sqrt(s + 1/4).
double root_limit_target(double s);

/// sum_{n >= N} n c^n in closed form c^N (N(1-c) + c) / (1-c)^2.
double tail_sum_closed(std::int64_t N, double c);
/// Same sum by direct accumulation until terms fall below 1e-18 of the total.
double tail_sum_direct(std::int64_t N, double c);

struct TriggeringBound {
    std::int64_t N = 0;
    double log_bound = 0;      // log(c7 N^2 c6^N)
    double bound = 0;          // exp(log_bound), may be inf
    double prefactor = 0;      // 8N
    double no_unit_sides = 0;  // c5/(1-c6)^2 N c6^N
    double one_unit_side = 0;  // 7 c5/(1-c6)^2 (N-1) c6^(N-1)
    double two_unit_sides = 0; // 12 c5/(1-c6)^2 (N-2) c6^(N-2)
    double assembled = 0;      // prefactor * (sum of the three pieces)
    double tail_closed = 0;    // sum_{n>=N} n c6^n
    double tail_direct = 0;
};

TriggeringBound triggering_bound(std::int64_t N, const ConstantsTable& table);

/// Entropy-energy term 2^r C(n-r-1, r-1) (2/3)^{n-2r} nu^{2r} and its
/// rewritten form (2/3)^n s^r C(n-r-1, r-1), both as logs.
double log_entropy_energy(std::int64_t n, std::int64_t r, double nu);
double log_entropy_energy_rewritten(std::int64_t n, std::int64_t r, double s);

}  // namespace cdp
