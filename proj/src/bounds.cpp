#include "cdp/bounds.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

namespace cdp {

namespace {
void check_dim(int d) {
    if (d < 2) throw std::invalid_argument("constants: d must be at least 2");
}
}  // namespace

double psi_of(int d) {
    check_dim(d);
    const double dd = d;
    return -std::log((2.0 * dd - 1.0) / (2.0 * dd)) / (8.0 * dd);
}

double c1_of(int d) {
    check_dim(d);
    return std::pow(4.0 * d * (1.0 + d), 2.0 * d);
}

double c2_of(int d) { return 16.0 * std::pow(d, 4) * c1_of(d) / (2.0 * d - 1.0); }
double c3_of(int d) { return 2.0 * c2_of(d); }

double nu_value() { return std::pow(439.0 / 18144.0, 0.25); }
double s_value() { return 4.5 * nu_value() * nu_value(); }
double c6_value() { return 1.0 / 3.0 + (2.0 / 3.0) * std::sqrt(s_value() + 0.25) + 0.001; }

double c7_of(double c5, double c6) {
    return 8.0 * c5 / ((1.0 - c6) * (1.0 - c6)) * (1.0 + 7.0 / c6 + 12.0 / (c6 * c6));
}

double log_binomial(double n, double k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

std::int64_t r_star_closed_form(std::int64_t n, double s) {
    const double nd = static_cast<double>(n);
    const double pi = (4.0 * s + 1.0) * nd * (nd - 2.0) + (2.0 * s + 1.0) * (2.0 * s + 1.0);
    return static_cast<std::int64_t>(std::ceil(nd / 2.0 - (2.0 * s + 1.0 + std::sqrt(pi)) / (8.0 * s + 2.0)));
}

namespace {

// log of (2/3)^n C(n-r*-1, r*-1) s^r*, or -inf when r* is outside [1, n/2].
double log_series_term(std::int64_t n, double s) {
    const std::int64_t r = r_star_closed_form(n, s);
    if (r < 1 || 2 * r > n) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(n) * std::log(2.0 / 3.0) +
           log_binomial(static_cast<double>(n - r - 1), static_cast<double>(r - 1)) + static_cast<double>(r) * std::log(s);
}

}  // namespace

double calibrate_c5(int n_max) {
    const double s = s_value();
    const double log_c6 = std::log(c6_value());
    double best = -std::numeric_limits<double>::infinity();
    for (std::int64_t n = 1; n <= n_max; ++n) best = std::max(best, log_series_term(n, s) - static_cast<double>(n) * log_c6);
    return std::exp(best);
}

ConstantsTable constants(int d, std::optional<double> c5) {
    check_dim(d);
    if (c5 && !(*c5 > 0.0)) throw std::invalid_argument("constants: c5 must be positive");
    ConstantsTable t;
    t.d = d;
    t.psi = psi_of(d);
    t.c1 = c1_of(d);
    t.c2 = c2_of(d);
    t.c3 = c3_of(d);
    t.nu = nu_value();
    t.s = s_value();
    t.c6 = c6_value();
    if (c5) {
        t.c5 = *c5;
    } else {
        static std::once_flag once;
        static double calibrated = 0.0;
        std::call_once(once, [] { calibrated = calibrate_c5(); });
        t.c5 = calibrated;
        t.c5_calibrated = true;
    }
    t.c7 = c7_of(t.c5, t.c6);
    return t;
}

SideCountScan f_and_rstar(std::int64_t n, double s) {
    if (n < 4) throw std::invalid_argument("f_and_rstar: n must be at least 4");
    SideCountScan out;
    out.n = n;
    const std::int64_t rmax = n / 2;
    out.log_f.reserve(static_cast<std::size_t>(rmax));
    for (std::int64_t r = 1; r <= rmax; ++r)
        out.log_f.push_back(static_cast<double>(r) * std::log(s) +
                            log_binomial(static_cast<double>(n - r - 1), static_cast<double>(r - 1)));
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.log_f.size(); ++i)
        if (out.log_f[i] > out.log_f[best]) best = i;
    out.argmax = static_cast<std::int64_t>(best) + 1;
    out.r_star = r_star_closed_form(n, s);

    // Unimodal: nondecreasing up to the argmax, nonincreasing after it.
    out.unimodal = true;
    for (std::size_t i = 1; i <= best; ++i)
        if (out.log_f[i] < out.log_f[i - 1]) out.unimodal = false;
    for (std::size_t i = best + 1; i < out.log_f.size(); ++i)
        if (out.log_f[i] > out.log_f[i - 1]) out.unimodal = false;
    return out;
}

SideCountScan f_and_rstar(std::int64_t n) { return f_and_rstar(n, s_value()); }

double root_limit(std::int64_t n, double s) {
    if (n < 10) throw std::invalid_argument("root_limit: n must be at least 10");
    if (s < 0) throw std::invalid_argument("root_limit: s must be non-negative");
    if (s == 0.0) return 1.0;
    const std::int64_t r = r_star_closed_form(n, s);
    const double log_term =
        log_binomial(static_cast<double>(n - r - 1), static_cast<double>(r - 1)) + static_cast<double>(r) * std::log(s);
    return std::exp(log_term / static_cast<double>(n));
}

double root_limit(std::int64_t n) { return root_limit(n, s_value()); }

double root_limit_target(double s) { return 0.5 + std::sqrt(s + 0.25); }

double tail_sum_closed(std::int64_t N, double c) {
    if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("tail_sum_closed: c must lie in (0, 1)");
    const double nd = static_cast<double>(N);
    return std::pow(c, nd) * (nd * (1.0 - c) + c) / ((1.0 - c) * (1.0 - c));
}

double tail_sum_direct(std::int64_t N, double c) {
    if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("tail_sum_direct: c must lie in (0, 1)");
    // Kahan summation; the terms decay geometrically so the loop is finite.
    double sum = 0.0, comp = 0.0;
    double power = std::pow(c, static_cast<double>(N));
    for (std::int64_t n = N;; ++n) {
        const double term = static_cast<double>(n) * power;
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (term < 1e-18 * sum && n > N + 10) break;
        power *= c;
    }
    return sum;
}

TriggeringBound triggering_bound(std::int64_t N, const ConstantsTable& table) {
    if (N < 1) throw std::invalid_argument("triggering_bound: N must be at least 1");
    const double c6 = table.c6;
    const double nd = static_cast<double>(N);
    const double base = table.c5 / ((1.0 - c6) * (1.0 - c6));
    TriggeringBound b;
    b.N = N;
    b.log_bound = std::log(table.c7) + 2.0 * std::log(nd) + nd * std::log(c6);
    b.bound = std::exp(b.log_bound);
    b.prefactor = 8.0 * nd;
    b.no_unit_sides = base * nd * std::pow(c6, nd);
    b.one_unit_side = 7.0 * base * (nd - 1.0) * std::pow(c6, nd - 1.0);
    b.two_unit_sides = 12.0 * base * std::max(0.0, nd - 2.0) * std::pow(c6, nd - 2.0);
    b.assembled = b.prefactor * (b.no_unit_sides + b.one_unit_side + b.two_unit_sides);
    b.tail_closed = tail_sum_closed(N, c6);
    b.tail_direct = tail_sum_direct(N, c6);
    return b;
}

double log_entropy_energy(std::int64_t n, std::int64_t r, double nu) {
    const double nd = static_cast<double>(n), rd = static_cast<double>(r);
    return rd * std::log(2.0) + log_binomial(nd - rd - 1.0, rd - 1.0) + (nd - 2.0 * rd) * std::log(2.0 / 3.0) +
           2.0 * rd * std::log(nu);
}

double log_entropy_energy_rewritten(std::int64_t n, std::int64_t r, double s) {
    const double nd = static_cast<double>(n), rd = static_cast<double>(r);
    return nd * std::log(2.0 / 3.0) + rd * std::log(s) + log_binomial(nd - rd - 1.0, rd - 1.0);
}

}  // namespace cdp
