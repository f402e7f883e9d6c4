#include <gtest/gtest.h>

#include <hetbel/config.hpp>
#include <hetbel/csv.hpp>
#include <hetbel/experiments.hpp>
#include <hetbel/manifest.hpp>

using namespace hetbel;

TEST(Config, EmptyTextGivesDefaults) {
    const auto c = parse_config("");
    EXPECT_EQ(c.model.mu_bar, 0.04);
    EXPECT_EQ(c.model.kappa, 0.2);
    EXPECT_EQ(c.model.sigma_mu, 0.01);
    EXPECT_EQ(c.model.sigma_D, 0.2);
    EXPECT_EQ(c.model.sigma_e, 0.05);
    EXPECT_EQ(c.model.rho, 0.02);
    EXPECT_EQ(c.model.mu0, 0.04);
    EXPECT_EQ(c.model.gammaR0, 0.0);
    EXPECT_EQ(c.grid.dt, 0.01);
    EXPECT_EQ(c.grid.n_paths, 20000u);
}

TEST(Config, ParsesCommentsAndDottedKeys) {
    const auto c = parse_config("# header\nexperiment = survival\n\n grid.dt = 0.005  # finer\nmodel.init = stationary\n"
                                "sweep.zeta = 0, 1.5,-2\n");
    EXPECT_EQ(c.experiment, Experiment::Survival);
    EXPECT_EQ(c.grid.dt, 0.005);
    EXPECT_EQ(c.model.init, InitMode::Stationary);
    EXPECT_EQ(c.zetas, (std::vector<double>{0.0, 1.5, -2.0}));
}

TEST(Config, UnknownKeysAndBadValuesAreErrors) {
    EXPECT_THROW(parse_config("model.nope = 1\n"), ConfigError);
    EXPECT_THROW(parse_config("grid.dt = fast\n"), ConfigError);
    EXPECT_THROW(parse_config("grid.n_paths = -3\n"), ConfigError);
    EXPECT_THROW(parse_config("just words\n"), ConfigError);
    EXPECT_THROW(parse_config("experiment = fig9\n"), ConfigError);
}

TEST(Config, RoundTrip) {
    auto c = parse_config("model.zeta = 0.1\ngrid.seed = 18446744073709551615\nsweep.e_R = 0.1, 0.3333333333333333\n"
                          "two_state.stationary_start = false\nout = /tmp/x y\n");
    const std::string s = serialize_config(c);
    const auto d = parse_config(s);
    EXPECT_EQ(serialize_config(d), s);
    EXPECT_EQ(d.model.zeta, 0.1);
    EXPECT_EQ(d.grid.seed, 18446744073709551615ull);
    EXPECT_EQ(d.e_R[1], 0.3333333333333333);
    EXPECT_EQ(d.out, "/tmp/x y");
}

TEST(Csv, SeventeenDigitsAndLf) {
    CsvTable t({"a", "b"});
    t.add({0.1, std::string("x")});
    t.add({1.0 / 3.0, -2.5e-300});
    const auto s = t.str();
    EXPECT_EQ(s, "a,b\n1.0000000000000001e-01,x\n3.3333333333333331e-01,-2.5000000000000000e-300\n");
    EXPECT_EQ(s.find('\r'), std::string::npos);
    EXPECT_EQ(std::stod(CsvTable::number(1.0 / 3.0)), 1.0 / 3.0);
    EXPECT_EQ(std::stod(CsvTable::number(0.1 + 0.2)), 0.1 + 0.2);
    EXPECT_THROW(t.add({1.0}), ModelError);
}

TEST(Manifest, Sha256KnownAnswer) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Manifest, RoundTrip) {
    RunManifest m;
    m.experiment = "paths";
    m.seed = 42;
    m.config = serialize_config(ExperimentConfig{});
    m.checksums = {{"a.csv", "00ff"}, {"b.svg", "1234"}};
    m.runtime_seconds = 1.25;
    const auto n = RunManifest::parse(m.str());
    EXPECT_EQ(n.str(), m.str());
    EXPECT_EQ(serialize_config(parse_config(n.config)), m.config);
    EXPECT_THROW(RunManifest::parse("manifest.seed = 1\n"), ConfigError);
}

TEST(Experiments, OutputIndependentOfThreads) {
    auto c = parse_config("experiment = welfare-sweep\ngrid.T = 10\ngrid.n_paths = 300\nsweep.zeta = 0, 1\n"
                          "sweep.e_R = 0, 0.5, 1\n");
    const auto a = run_experiment(c, 1);
    const auto b = run_experiment(c, 4);
    ASSERT_EQ(a.files.size(), b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) EXPECT_EQ(a.files[i].second, b.files[i].second);
}

TEST(Experiments, CriticalZetaReportsAllThresholds) {
    const auto o = run_experiment(parse_config("experiment = critical-zeta\n"));
    EXPECT_NE(o.summary.find("zeta1"), std::string::npos);
    EXPECT_NE(o.summary.find("zeta4"), std::string::npos);
    EXPECT_EQ(o.files.size(), 2u);
}

TEST(Svg, WellFormed) {
    const auto s = svg_line_chart("t<1>", "x", "y", {{"a", {0, 1, 2}, {1, 0, 1}}});
    EXPECT_EQ(s.rfind("<svg", 0), 0u);
    EXPECT_NE(s.find("</svg>"), std::string::npos);
    EXPECT_NE(s.find("t&lt;1&gt;"), std::string::npos);
}
