#include "cdp/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "cdp/bounds.hpp"
#include "cdp/coupling.hpp"
#include "cdp/influence.hpp"
#include "cdp/oracle.hpp"
#include "cdp/parallel.hpp"
#include "cdp/renorm.hpp"

namespace cdp::cli {
namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string cell(double v) { return num(v); }
std::string cell(bool v) { return v ? "1" : "0"; }
std::string cell(const std::string& v) { return v; }
template <class T>
    requires std::is_integral_v<T>
std::string cell(T v) {
    return std::to_string(v);
}

class Csv {
public:
    explicit Csv(std::ostream& os) : os_(os) {}

    void header(std::initializer_list<std::string_view> cols) {
        bool first = true;
        for (auto c : cols) {
            os_ << (first ? "" : ",") << c;
            first = false;
        }
        os_ << '\n';
    }

    template <class... T>
    void row(const T&... v) {
        bool first = true;
        ((os_ << (first ? "" : ",") << cell(v), first = false), ...);
        os_ << '\n';
    }

private:
    std::ostream& os_;
};

// TOML rendering of bound option values, so an output file can carry the exact
// configuration that produced it.
std::string toml(double v) { return num(v); }
std::string toml(bool v) { return v ? "true" : "false"; }
std::string toml(const std::string& v) { return "\"" + v + "\""; }
template <class T>
    requires std::is_integral_v<T>
std::string toml(T v) {
    return std::to_string(v);
}
template <class T>
std::string toml(const std::vector<T>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + toml(v[i]);
    return s + "]";
}

class Options {
public:
    explicit Options(CLI::App* app) : app_(app) {}

    template <class T>
    CLI::Option* add(const std::string& name, T& var, const std::string& desc) {
        items_.emplace_back(name, [&var] { return toml(var); });
        return app_->add_option("--" + name, var, desc)->capture_default_str();
    }
    CLI::Option* flag(const std::string& name, bool& var, const std::string& desc) {
        items_.emplace_back(name, [&var] { return toml(var); });
        return app_->add_flag("--" + name, var, desc);
    }

    void dump(std::ostream& os, const std::string& prefix) const {
        for (const auto& [k, f] : items_) os << prefix << k << " = " << f() << '\n';
    }

private:
    CLI::App* app_;
    std::vector<std::pair<std::string, std::function<std::string()>>> items_;
};

ConstraintLaw law_from(const std::vector<double>& rho, bool validation) {
    if (rho.empty()) throw std::invalid_argument("rho must not be empty");
    if (!validation && rho.size() % 2 != 0) throw std::invalid_argument("rho must have 2d entries");
    const int d = static_cast<int>(validation ? (rho.size() - 1) / 2 : rho.size() / 2);
    return ConstraintLaw(rho, d, validation);
}

Point origin(int d) { return Point::zero(d); }

std::vector<std::string> rho_cells(const ConstraintLaw& law) {
    // Fixed columns rho0..rho3 plus rho4 (the validation-mode "unconstrained" mass).
    std::vector<std::string> out(5, "0");
    const auto r = law.rho();
    for (std::size_t i = 0; i < r.size() && i < 5; ++i) out[i] = num(r[i]);
    return out;
}

struct Common {
    std::uint64_t seed = 20240601;
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::string output;
    bool no_timestamp = false;
};

}  // namespace

std::string extract_embedded_config(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line))
        if (line.rfind("# | ", 0) == 0) out += line.substr(4) + '\n';
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Constrained-degree percolation in random environment: experiments and checks", "cdperc"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Read options from a TOML file (as embedded in every output)");

    Common common;
    Options global(&app);
    global.add("seed", common.seed, "Master seed");
    app.add_option("--workers", common.workers, "Worker threads (results do not depend on it)");
    app.add_option("--output,-o", common.output, "Output file (default: stdout)");
    app.add_flag("--no-header-timestamp", common.no_timestamp, "Omit the timestamp line");

    std::vector<std::pair<CLI::App*, Options>> subs;
    auto sub = [&](const std::string& name, const std::string& desc) -> Options& {
        CLI::App* s = app.add_subcommand(name, desc);
        s->configurable();
        subs.emplace_back(s, Options(s));
        return subs.back().second;
    };
    subs.reserve(9);

    // constants
    int c_d = 2;
    double c_c5 = 0;
    {
        auto& o = sub("constants", "Dump the constants table as JSON");
        o.add("d", c_d, "Dimension");
        o.add("c5", c_c5, "Override c5 (0 = empirical calibration)");
    }

    // oracle
    std::vector<double> o_t{0.25, 0.5, 0.9};
    std::uint64_t o_n = 100000;
    std::string o_graph;
    int o_edge = 0;
    {
        auto& o = sub("oracle", "Exact oracle vs Monte Carlo on tiny graphs");
        o.add("t", o_t, "Times");
        o.add("n", o_n, "Monte Carlo replicates");
        o.add("graph", o_graph, "Tiny-graph file (default: built-in cases)");
        o.add("edge", o_edge, "With --graph: the event is 'this edge is open'");
    }

    // crossing
    std::vector<double> x_rho{0, 0, 0.5, 0.5};
    bool x_validation = false;
    std::vector<int> x_L{32, 64, 128};
    std::vector<double> x_t{0.70, 0.71, 0.72, 0.73, 0.74, 0.75, 0.76};
    std::uint64_t x_n = 2000;
    {
        auto& o = sub("crossing", "Left-right crossing probability of the L x L box");
        o.add("rho", x_rho, "Constraint law");
        o.flag("validation", x_validation, "Accept the extra 'unconstrained' entry in rho");
        o.add("L", x_L, "Box sides");
        o.add("t", x_t, "Times");
        o.add("n", x_n, "Replicates per L");
    }

    // dualscan
    std::vector<double> p_rho{0, 0, 0, 1};
    bool p_validation = false;
    std::vector<double> p_t{1.0};
    std::vector<int> p_N{8, 16, 32};
    int p_pad = 0;
    std::uint64_t p_n = 2000;
    {
        auto& o = sub("dualscan", "Closed dual annulus crossing P*(N)");
        o.add("rho", p_rho, "Constraint law");
        o.flag("validation", p_validation, "Accept the extra 'unconstrained' entry in rho");
        o.add("t", p_t, "Times");
        o.add("N", p_N, "Annulus radii");
        o.add("pad", p_pad, "Window pad (0 = max(16, N/2))");
        o.add("n", p_n, "Replicates per N");
    }

    // influence
    int i_d = 2;
    std::int64_t i_rmax = 40;
    std::uint64_t i_n = 100000;
    {
        auto& o = sub("influence", "Radius tail and mean size of the influence set at t = 1");
        o.add("d", i_d, "Dimension");
        o.add("r-max", i_rmax, "Largest radius");
        o.add("n", i_n, "Replicates");
    }

    // locality
    std::vector<double> l_rho{0, 0, 0.5, 0.5};
    double l_t = 0.8;
    std::int64_t l_r = 6;
    std::uint64_t l_n = 1000;
    {
        auto& o = sub("locality", "Exterior resampling leaves omega_t on E(Lambda) unchanged");
        o.add("rho", l_rho, "Constraint law");
        o.add("t", l_t, "Time");
        o.add("r", l_r, "Confinement radius");
        o.add("n", l_n, "Instances");
    }

    // decouple
    std::vector<double> d_rho{0, 0, 0.5, 0.5};
    double d_t = 0.75;
    std::vector<int> d_delta{5, 10, 20};
    std::uint64_t d_n = 100000;
    int d_pad = 12;
    {
        auto& o = sub("decouple", "Covariance of 'edge open' events on two dominoes at distance delta");
        o.add("rho", d_rho, "Constraint law");
        o.add("t", d_t, "Time");
        o.add("delta", d_delta, "Separations");
        o.add("n", d_n, "Replicates");
        o.add("pad", d_pad, "Window pad");
    }

    // continuity
    std::vector<double> k_from{0, 0, 0, 1}, k_to{0, 0, 0.5, 0.5};
    double k_tfrom = 1.0, k_tto = 1.0;
    int k_steps = 10;
    std::uint64_t k_n = 10000;
    int k_radius = 12;
    {
        auto& o = sub("continuity", "Coupled estimates along a path of (rho, t) cells");
        o.add("rho-from", k_from, "Law at the first cell");
        o.add("rho-to", k_to, "Law at the last cell");
        o.add("t-from", k_tfrom, "Time at the first cell");
        o.add("t-to", k_tto, "Time at the last cell");
        o.add("steps", k_steps, "Number of steps (cells = steps + 1)");
        o.add("n", k_n, "Replicates");
        o.add("radius", k_radius, "Window radius around the test edge");
    }

    // scales
    std::uint64_t s_L0 = 25;
    std::size_t s_count = 4;
    double s_c5 = 0;
    {
        auto& o = sub("scales", "Scale ladder, conditions C-1..C-3 and the induction step");
        o.add("L0", s_L0, "First scale (>= 25)");
        o.add("count", s_count, "Number of scales");
        o.add("c5", s_c5, "Override c5 (0 = empirical calibration)");
    }

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << nlohmann::json{{"status", "config_error"}, {"reason", e.what()}}.dump() << '\n';
        return kExitConfigError;
    }

    CLI::App* chosen = app.get_subcommands().front();
    const Options* chosen_opts = nullptr;
    for (const auto& [a, o] : subs)
        if (a == chosen) chosen_opts = &o;
    const std::string name = chosen->get_name();

    std::ostringstream body;
    try {
        if (!common.no_timestamp) {
            const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
            char stamp[32];
            std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
            body << "# cdperc " << name << " generated " << stamp << '\n';
        }
        if (name != "constants") {
            global.dump(body, "# | ");
            body << "# | [" << name << "]\n";
            chosen_opts->dump(body, "# | ");
        }

        Csv csv(body);
        const unsigned w = common.workers;
        const std::uint64_t seed = common.seed;

        if (name == "constants") {
            const ConstantsTable c = constants(c_d, c_c5 > 0 ? std::optional<double>(c_c5) : std::nullopt);
            nlohmann::ordered_json j;
            j["d"] = c.d;
            j["psi"] = c.psi;
            j["c1"] = c.c1;
            j["c2"] = c.c2;
            j["c3"] = c.c3;
            j["nu"] = c.nu;
            j["s"] = c.s;
            j["c6"] = c.c6;
            j["c5"] = c.c5;
            j["c5_calibrated"] = c.c5_calibrated;
            j["c7"] = c.c7;
            j["root_limit_target"] = root_limit_target(c.s);
            body << j.dump(2) << '\n';
        } else if (name == "oracle") {
            std::vector<OracleCase> cases;
            if (o_graph.empty()) {
                cases = builtin_oracle_cases();
            } else {
                std::ifstream f(o_graph);
                if (!f) throw std::invalid_argument("cannot read graph file " + o_graph);
                std::stringstream ss;
                ss << f.rdbuf();
                OracleCase c{parse_tiny_graph(ss.str()), "edge" + std::to_string(o_edge) + "_open", nullptr};
                if (o_edge < 0 || static_cast<std::size_t>(o_edge) >= c.graph.edges.size())
                    throw std::invalid_argument("--edge is not an edge of the graph");
                const auto e = static_cast<std::size_t>(o_edge);
                c.event = [e](std::span<const std::uint8_t> s) { return s[e] != 0; };
                cases.push_back(std::move(c));
            }
            for (double t : o_t)
                if (!(t >= 0 && t <= 1)) throw std::invalid_argument("t must lie in [0, 1]");
            csv.header({"seed", "graph", "event", "edges", "t", "n", "exact", "mc_p_hat", "mc_se", "z", "within_3se"});
            for (const auto& c : cases)
                for (double t : o_t) {
                    const double exact = c.graph.kappa.empty() ? exact_probability_over_constraints(c.graph, t, c.event)
                                                               : exact_event_probability(c.graph, t, c.event);
                    const Estimate mc = monte_carlo_event_probability(c.graph, t, c.event, seed, o_n, w);
                    const double diff = mc.p_hat - exact;
                    const double z = mc.se > 0 ? diff / mc.se : (diff == 0 ? 0.0 : INFINITY);
                    csv.row(seed, c.graph.name, c.event_name, c.graph.edges.size(), t, o_n, exact, mc.p_hat, mc.se, z,
                            std::abs(diff) <= 3 * mc.se + 1e-12);
                }
        } else if (name == "crossing") {
            const ConstraintLaw law = law_from(x_rho, x_validation);
            for (double t : x_t)
                if (!(t >= 0 && t <= 1)) throw std::invalid_argument("t must lie in [0, 1]");
            for (int L : x_L)
                if (L < 4) throw std::invalid_argument("L must be at least 4");
            const auto r = rho_cells(law);
            csv.header({"seed", "rho0", "rho1", "rho2", "rho3", "rho4", "L", "t", "n", "successes", "p_hat", "se"});
            for (int L : x_L) {
                const auto times = crossing_times(seed, law, L, x_n, w);
                for (double t : x_t) {
                    const Estimate e = crossing_estimate(times, t);
                    csv.row(seed, r[0], r[1], r[2], r[3], r[4], L, t, x_n, e.successes, e.p_hat, e.se);
                }
            }
        } else if (name == "dualscan") {
            const ConstraintLaw law = law_from(p_rho, p_validation);
            const auto r = rho_cells(law);
            csv.header({"seed", "rho0", "rho1", "rho2", "rho3", "rho4", "t", "N", "pad", "n", "successes", "p_hat",
                        "se", "check_n", "pad_shift", "combined_se"});
            for (int N : p_N) {
                const int pad = p_pad > 0 ? p_pad : default_pad(N);
                for (const auto& e : estimate_pstar(seed, law, p_t, N, pad, p_n, w))
                    csv.row(seed, r[0], r[1], r[2], r[3], r[4], e.t, N, pad, p_n, e.estimate.successes,
                            e.estimate.p_hat, e.estimate.se, e.check_n, e.shift, e.combined_se);
            }
        } else if (name == "influence") {
            if (i_d < 1 || i_d > kMaxDim) throw std::invalid_argument("d out of range");
            const RadiusTail rt = radius_tail(seed, origin(i_d), i_rmax, i_n, w);
            csv.header({"seed", "d", "r_max", "n", "r", "exceed", "survival", "bound", "fit_slope", "fit_r_last",
                        "mean_size", "mean_size_se", "truncated"});
            for (std::int64_t rr = 0; rr <= i_rmax; ++rr) {
                const auto k = static_cast<std::size_t>(rr);
                csv.row(seed, i_d, i_rmax, i_n, rr, rt.exceed[k], rt.survival[k], rt.bound[k], rt.fit_slope,
                        rt.fit_r_last, rt.mean_size, rt.mean_size_se, rt.truncated);
            }
        } else if (name == "locality") {
            const ConstraintLaw law = law_from(l_rho, false);
            if (l_r < 0) throw std::invalid_argument("r must be non-negative");
            if (!(l_t >= 0 && l_t <= 1)) throw std::invalid_argument("t must lie in [0, 1]");
            const int d = law.dim();
            const VertexSet base{origin(d), origin(d).shifted(0, 1)};
            const Box window = Box::cube(origin(d), static_cast<std::int32_t>(std::max<std::int64_t>(3 * l_r, l_r + 1) + 1));
            const auto res = map_replicates<LocalityResult>(l_n, w, [&](std::size_t i) {
                return locality_check(SeedSpec{seed, static_cast<std::uint32_t>(i)}, law, base, l_t, l_r, window);
            });
            std::uint64_t applicable = 0, pass = 0, fail = 0, changed = 0;
            for (const auto& x : res) {
                applicable += x.verdict != LocalityVerdict::NotApplicable;
                pass += x.verdict == LocalityVerdict::Pass;
                fail += x.verdict == LocalityVerdict::Fail;
                changed += x.changed_edges_outside;
            }
            const auto r = rho_cells(law);
            csv.header({"seed", "rho0", "rho1", "rho2", "rho3", "t", "r", "n", "applicable", "pass", "fail",
                        "mean_changed_edges_outside"});
            csv.row(seed, r[0], r[1], r[2], r[3], l_t, l_r, l_n, applicable, pass, fail,
                    applicable ? static_cast<double>(changed) / static_cast<double>(applicable) : 0.0);
        } else if (name == "decouple") {
            const ConstraintLaw law = law_from(d_rho, false);
            const int d = law.dim();
            const auto r = rho_cells(law);
            csv.header({"seed", "rho0", "rho1", "rho2", "rho3", "t", "delta", "n", "p1", "p2", "p12", "cov_hat", "se",
                        "bound"});
            for (int delta : d_delta) {
                if (delta < 1) throw std::invalid_argument("delta must be positive");
                const VertexSet l1{origin(d), origin(d).shifted(0, 1)};
                const VertexSet l2{origin(d).shifted(0, 1 + delta), origin(d).shifted(0, 2 + delta)};
                const auto a1 = edge_open_event(Edge{l1[0], 0});
                const auto a2 = edge_open_event(Edge{l2[0], 0});
                const auto rep = decoupling_estimate(seed, l1, l2, a1, a2, law, d_t, d_n, d_pad, w);
                csv.row(seed, r[0], r[1], r[2], r[3], d_t, delta, d_n, rep.p1, rep.p2, rep.p12, rep.cov_hat, rep.se,
                        rep.bound);
            }
        } else if (name == "continuity") {
            if (k_steps < 1) throw std::invalid_argument("steps must be at least 1");
            if (k_from.size() != k_to.size()) throw std::invalid_argument("rho-from and rho-to differ in length");
            std::vector<GridCell> grid;
            for (int k = 0; k <= k_steps; ++k) {
                const double s = static_cast<double>(k) / k_steps;
                std::vector<double> rho(k_from.size());
                for (std::size_t j = 0; j < rho.size(); ++j) rho[j] = (1 - s) * k_from[j] + s * k_to[j];
                grid.push_back({law_from(rho, false), (1 - s) * k_tfrom + s * k_tto});
            }
            const int d = grid.front().law.dim();
            const Box window = Box::cube(origin(d), k_radius + 1);
            const auto ev = edge_open_event(Edge{origin(d), 0});
            const CoupledGrid g = coupled_event_grid(seed, window, grid, ev, k_n, k_radius, w);
            csv.header({"seed", "cell", "rho0", "rho1", "rho2", "rho3", "t", "n", "successes", "p_hat", "se",
                        "flip_next", "flip_se"});
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const auto r = rho_cells(grid[i].law);
                const bool last = i + 1 == grid.size();
                csv.row(seed, i, r[0], r[1], r[2], r[3], grid[i].t, k_n, g.cells[i].successes, g.cells[i].p_hat,
                        g.cells[i].se, last ? 0.0 : g.flips[i].p_hat, last ? 0.0 : g.flips[i].se);
            }
        } else if (name == "scales") {
            const ScalePlan plan = scale_plan(s_L0, s_count, s_c5 > 0 ? std::optional<double>(s_c5) : std::nullopt);
            csv.header({"seed", "k", "L", "log_c1_lhs", "c1", "log_c2_lhs", "c2", "log_c3_lhs", "c3",
                        "induction_log_rhs", "induction_log_target", "induction_target_met", "min_L_c1", "min_L_c2",
                        "min_L_c3"});
            for (std::size_t k = 0; k < plan.rows.size(); ++k) {
                const auto& row = plan.rows[k];
                std::string lhs = "nan", target = "nan", met = "";
                try {
                    const double pk = std::pow(static_cast<double>(row.L), -4.0);
                    const InductionStep st = induction_rhs(row.L, pk, plan.c3, plan.psi);
                    lhs = num(st.log_rhs);
                    target = num(st.log_target);
                    met = cell(st.target_met);
                } catch (const std::overflow_error&) {
                    // L_{k+1} no longer fits in 64 bits.
                }
                csv.row(seed, k, row.L, row.log_c1_lhs, row.c1, row.log_c2_lhs, row.c2, row.log_c3_lhs, row.c3, lhs,
                        target, met, plan.min_L_c1, plan.min_L_c2, plan.min_L_c3);
            }
        }
    } catch (const std::invalid_argument& e) {
        err << nlohmann::json{{"status", "config_error"}, {"subcommand", name}, {"reason", e.what()}}.dump() << '\n';
        return kExitConfigError;
    } catch (const std::out_of_range& e) {
        err << nlohmann::json{{"status", "config_error"}, {"subcommand", name}, {"reason", e.what()}}.dump() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << nlohmann::json{{"status", "runtime_error"}, {"subcommand", name}, {"reason", e.what()}}.dump() << '\n';
        return kExitRuntimeError;
    }

    if (common.output.empty()) {
        out << body.str();
    } else {
        std::ofstream f(common.output, std::ios::binary);
        if (!(f << body.str())) {
            err << nlohmann::json{{"status", "runtime_error"}, {"reason", "cannot write " + common.output}}.dump()
                << '\n';
            return kExitRuntimeError;
        }
    }
    return kExitOk;
}

}  // namespace cdp::cli
