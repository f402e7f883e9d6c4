// Acceptance suite: one PASS/FAIL line per criterion at the default Monte Carlo scale.
// The exit status reports whether the suite ran, not whether every criterion passed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <hetbel/diagnostics.hpp>
#include <hetbel/strategist.hpp>
#include <hetbel/survival.hpp>
#include <hetbel/welfare.hpp>

using namespace hetbel;
namespace fs = std::filesystem;

namespace {

unsigned g_threads = 1;
int g_pass = 0;
int g_fail = 0;
std::ofstream g_report;

std::string f(double v, const char* spec = "%.4g") {
    char b[64];
    std::snprintf(b, sizeof b, spec, v);
    return b;
}

std::string est(const Estimate& e) { return f(e.value) + " (se " + f(e.se, "%.2g") + ")"; }

void report(const std::string& id, bool ok, const std::string& what, const std::string& detail) {
    (ok ? g_pass : g_fail)++;
    std::ostringstream line;
    line << (ok ? "PASS " : "FAIL ") << id << "  " << what << "  [" << detail << "]";
    std::cout << line.str() << std::endl;
    if (g_report) g_report << line.str() << std::endl;
}

SimGrid default_grid() { return SimGrid{}; }

void criterion1() {
    ModelParams p;
    SimGrid g = default_grid();
    g.T = 25.0;
    bool ok = true;
    std::string d;
    for (const auto& r : projection_identity(p, g, {1.0, 5.0, 25.0}, g_threads)) {
        const auto e = r.excess();
        ok = ok && std::abs(e.value) < 3.0 * e.se;
        d += "t=" + f(r.t) + ": " + est(e) + "; ";
    }
    p.zeta = 0.5;
    for (const auto& r : projection_identity(p, g, {1.0, 5.0, 25.0}, g_threads)) {
        const auto e = r.excess();
        ok = ok && std::abs(e.value) < 3.0 * e.se;
        d += "zeta=0.5 t=" + f(r.t) + ": excess over 2*Delta^2 " + est(e) + "; ";
    }
    report("1", ok, "filter projection identity", d);
}

void criteria2to5() {
    const ModelParams p;
    const std::vector<double> zs{0.0, 0.5, 1.0, 1.5, 3.0};
    std::vector<WelfarePoint> pts;
    for (double z : zs) pts.push_back({z, 0.5});
    pts.push_back({1.0, 0.0});
    pts.push_back({1.0, 1.0});
    WelfareOptions o;
    o.bench_eta = true;
    o.threads = g_threads;
    const WelfareBatch b(p, default_grid(), pts, o);

    const auto r0 = b.report(0), r3 = b.report(4);
    report("2", r0.gap_IR.value > 3.0 * r0.gap_IR.se && r3.gap_IR.value < -3.0 * r3.gap_IR.se,
           "welfare ordering flips with bias", "U_I-U_R at zeta=0: " + est(r0.gap_IR) + "; at zeta=3: " + est(r3.gap_IR));

    bool ok3 = true;
    std::string d3;
    for (std::size_t i : {0u, 1u, 3u}) {
        const auto r = b.report(i);
        const double ode = welfare_gap_ode(p, zs[i]);
        ok3 = ok3 && std::abs(r.gap_IR.value - ode) < 3.0 * r.gap_IR.se;
        d3 += "zeta=" + f(zs[i]) + ": mc " + est(r.gap_IR) + " ode " + f(ode, "%.6g") + "; ";
    }
    report("3", ok3, "Monte Carlo gap matches ODE oracle", d3);

    const auto r1 = b.report(2);
    const bool same = r0.U_bench == r1.U_bench && r0.U_bench == r3.U_bench;
    bool ok4 = same;
    std::string d4 = std::string("D-based benchmark bitwise equal across zeta: ") + (same ? "yes" : "no") + "; ";
    for (std::size_t i : {0u, 2u, 4u}) {
        const auto e = b.report(i).bench_eta_minus_D;
        ok4 = ok4 && std::abs(e.value) < 3.0 * e.se;
        d4 += "eta-D at zeta=" + f(zs[i]) + ": " + est(e) + "; ";
    }
    report("4", ok4, "benchmark independent of bias", d4);

    const double a = b.report(5).I_minus_bench.value;
    const double c = b.report(6).R_minus_bench.value;
    report("5", std::abs(a) < 1e-10 && std::abs(c) < 1e-10, "boundary identities",
           "U_I-U_bench at e_R=0: " + f(a, "%.3g") + "; U_R-U_bench at e_R=1: " + f(c, "%.3g"));
}

void criterion6() {
    const ModelParams p;
    const auto s = endpoint_slopes(p, default_grid(), g_threads);
    report("6a", s.at0.value < -3.0 * s.at0.se, "slope of U_I-U_bench at e_R=0 is negative", "slope " + est(s.at0));
    report("6b", s.at1.value > 3.0 * s.at1.se, "slope of U_I-U_bench at e_R=1 is positive", "slope " + est(s.at1));
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
    const auto sw = double_loss_scan(p, 0.0, grid, default_grid(), g_threads);
    const auto c = convexity_check(sw);
    double worst = INFINITY;
    for (const auto& d : c.second_differences) worst = std::min(worst, d.se > 0 ? d.value / d.se : INFINITY);
    report("6c", c.convex && c.gap_spread <= 1e-12, "U_I convex in e_R, U_I-U_R constant in e_R",
           "min second difference / se " + f(worst) + "; gap spread " + f(c.gap_spread, "%.3g"));
}

void criterion7() {
    const ModelParams p;
    auto scan = [&](double zeta, const std::vector<double>& grid) {
        const auto s = double_loss_scan(p, zeta, grid, default_grid(), g_threads);
        bool hit = false;
        std::string d = "zeta=" + f(zeta) + ": ";
        for (std::size_t i = 0; i < grid.size(); ++i) {
            hit = hit || s.double_loss[i];
            d += "e_R=" + f(grid[i]) + " I-b " + est(s.reports[i].I_minus_bench) + " R-b " +
                 est(s.reports[i].R_minus_bench) + "; ";
        }
        return std::make_pair(hit, d);
    };
    const auto a = scan(0.0, {0.005, 0.01, 0.02, 0.03, 0.05, 0.07, 0.1});
    report("7a", a.first, "double loss near e_R=0 at zeta=0", a.second);
    const auto b = scan(3.0, {0.9, 0.93, 0.95, 0.97, 0.98, 0.99, 0.995, 0.999});
    report("7b", b.first, "double loss near e_R=1 at zeta=3", b.second);
}

void criterion8() {
    const ModelParams p;
    const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
    const auto s = double_loss_scan(p, 0.0, grid, default_grid(), g_threads);
    bool ok = true;
    std::string d;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto e = s.reports[i].total_minus_autarky;
        if (grid[i] == 0.0 || grid[i] == 1.0) ok = ok && std::abs(e.value) < 1e-10;
        else ok = ok && e.value < -3.0 * e.se;
        d += "e_R=" + f(grid[i]) + ": " + est(e) + "; ";
    }
    report("8", ok, "total welfare below autarky", d);
}

void criterion9() {
    const ModelParams p;
    SimGrid g = default_grid();
    g.T = 50.0;
    const auto m = martingale_check(p, g, g_threads);
    bool ok = true;
    for (const auto& e : {m.eta_R, m.eta_I, m.eta_bench}) ok = ok && std::abs(e.value - 1.0) < 4.0 * e.se;
    report("9", ok, "density processes are martingales",
           "E eta_R " + est(m.eta_R) + "; E eta_I " + est(m.eta_I) + "; E eta_bench " + est(m.eta_bench));
}

void criterion10() {
    const ModelParams p;
    const auto st = stationary_stats(p);
    const double z4b = zeta4_bisection(p);
    SimGrid g = default_grid();
    g.T = 300.0;
    SurvivalOptions o;
    o.threads = g_threads;
    const auto r = simulate_consumption_ratio(p, g, {0.0, 1.0}, o);
    bool ok = std::abs(st.zeta4 - z4b) < 1e-10;
    std::string d = "zeta4 " + f(st.zeta4, "%.12g") + " bisection diff " + f(st.zeta4 - z4b, "%.2g") + "; ";
    for (const auto& s : r) {
        const double rel = std::abs(s.late_slope.value / s.predicted_slope - 1.0);
        ok = ok && rel < 0.10;
        d += "zeta=" + f(s.zeta) + " slope " + est(s.late_slope) + " predicted " + f(s.predicted_slope) +
             " rel err " + f(rel, "%.3f") + "; ";
    }
    ok = ok && st.zeta4 < 1.0 && r[0].class_I_survives && r[1].class_R_survives;
    report("10", ok, "survival threshold and log-eta drift", d);
}

void criterion11() {
    ModelParams p;
    ModelParams ps = p;
    ps.init = InitMode::Stationary;
    const double z2s = critical_zeta_welfare(ps).zeta2;
    const double z4 = stationary_stats(p).zeta4;
    const auto e = rho_zero_equivalence(p, {0.1, 0.02, 0.004});
    std::string d = "stationary |zeta2-zeta4| " + f(std::abs(z2s - z4), "%.3g") + "; ";
    for (const auto& r : e.rows) d += "rho=" + f(r.rho) + " dist " + f(r.distance, "%.4g") + "; ";
    report("11", std::abs(z2s - z4) < 1e-8 && e.strictly_decreasing, "rho to zero and stationary equivalence", d);
}

void criterion12() {
    const ModelParams p;
    const auto a = best_manipulation(p, {0.7, 0.05}, default_zeta_grid(), default_grid(), g_threads);
    report("12a", a.best_role == Role::R && a.best_zeta != 0.0 && a.gain_vs_honest.value > 3.0 * a.gain_vs_honest.se,
           "manipulation pays with slow participation decay",
           std::string("best ") + role_name(a.best_role) + " at zeta " + f(a.best_zeta) + ", gain over honest I " +
               est(a.gain_vs_honest));
    const auto b = best_manipulation(p, {0.3, 0.1}, default_zeta_grid(), default_grid(), g_threads);
    report("12b", b.best_role == Role::I && b.best_zeta == 0.0, "honest Class-I when few others listen",
           std::string("best ") + role_name(b.best_role) + " at zeta " + f(b.best_zeta) + ", gain " +
               est(b.gain_vs_honest));
}

void criterion13() {
    SimGrid g = default_grid();
    g.T = 0.2;
    g.dt = 1e-4;
    const auto c = two_state_counterexample(TwoStateParams::counterexample(), g);
    report("13", c.slope.value > 2.0 * c.slope.se, "two-state slope at e_R=0 is positive",
           "slope " + f(c.slope.value, "%.4g") + " (se " + f(c.slope.se, "%.2g") + "), paths " +
               std::to_string(c.n_paths));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion14(const std::string& cli, const fs::path& work) {
    if (cli.empty()) {
        report("14", false, "manifest reruns are byte identical", "no CLI path given (--cli)");
        return;
    }
    fs::remove_all(work);
    fs::create_directories(work);
    struct Case {
        std::string name, args;
    };
    const std::vector<Case> cases{
        {"sweep", "--experiment welfare-sweep --paths 600 --set grid.T=60 --zeta 0,1.5"},
        {"survival", "--experiment survival --paths 500 --set survival.T=40 --set survival.probes=20"},
        {"strategist", "--experiment strategist --paths 200 --set grid.T=20 --set strategist.points=5"},
        {"twostate", "--experiment two-state --paths 300 --set grid.T=20 --set counterexample.T=0.01"},
        {"paths", "--experiment paths --set grid.T=50"},
        {"critical", "--experiment critical-zeta"},
    };
    bool ok = true;
    std::string d;
    for (const auto& c : cases) {
        const fs::path a = work / (c.name + "_t1");
        const std::string first = "\"" + cli + "\" run " + c.args + " --threads 1 --quiet --out \"" + a.string() + "\"";
        if (std::system(first.c_str()) != 0) {
            ok = false;
            d += c.name + ": first run failed; ";
            continue;
        }
        for (unsigned t : {2u, 5u}) {
            const fs::path b = work / (c.name + "_t" + std::to_string(t));
            const std::string rerun = "\"" + cli + "\" run --manifest \"" + (a / "manifest.txt").string() +
                                      "\" --threads " + std::to_string(t) + " --quiet --out \"" + b.string() + "\"";
            const int rc = std::system(rerun.c_str());
            bool same = rc == 0;
            std::size_t files = 0;
            for (const auto& e : fs::directory_iterator(a)) {
                if (e.path().filename() == "manifest.txt") continue;
                ++files;
                same = same && slurp(e.path()) == slurp(b / e.path().filename());
            }
            ok = ok && same;
            d += c.name + " threads " + std::to_string(t) + ": " + (same ? "identical" : "DIFFERENT") + " (" +
                 std::to_string(files) + " files); ";
        }
    }
    report("14", ok, "manifest reruns are byte identical", d);
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli;
    fs::path work = fs::temp_directory_path() / "hetbel_acceptance";
    std::vector<std::string> only;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--cli" && i + 1 < argc) cli = argv[++i];
        else if (a == "--work" && i + 1 < argc) work = argv[++i];
        else if (a == "--threads" && i + 1 < argc) g_threads = static_cast<unsigned>(std::stoul(argv[++i]));
        else if (a == "--only" && i + 1 < argc) only.push_back(argv[++i]);
        else if (a == "--report" && i + 1 < argc) g_report.open(argv[++i], std::ios::binary);
        else {
            std::cerr << "usage: acceptance [--cli path] [--work dir] [--threads n] [--report file] [--only id]...\n";
            return 2;
        }
    }
    if (g_threads == 0) g_threads = 1;
    const auto want = [&](const char* id) {
        if (only.empty()) return true;
        for (const auto& o : only)
            if (o == id) return true;
        return false;
    };
    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (want("1")) criterion1();
        if (want("2")) criteria2to5();
        if (want("6")) criterion6();
        if (want("7")) criterion7();
        if (want("8")) criterion8();
        if (want("9")) criterion9();
        if (want("10")) criterion10();
        if (want("11")) criterion11();
        if (want("12")) criterion12();
        if (want("13")) criterion13();
        if (want("14")) criterion14(cli, work);
    } catch (const std::exception& e) {
        std::cout << "ERROR " << e.what() << std::endl;
        return 1;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream tail;
    tail << "acceptance: " << g_pass << " passed, " << g_fail << " failed, " << f(secs, "%.0f") << " s";
    std::cout << tail.str() << std::endl;
    if (g_report) g_report << tail.str() << std::endl;
    return 0;
}
