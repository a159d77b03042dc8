#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "dampedbar/cli.hpp"
#include "dampedbar/io.hpp"

using namespace dampedbar;

TEST(ParseConfig, MinimalAppliesDefaults) {
    const RunConfig rc = parse_config(R"({"bar": {"h1": 0.3, "h2": 0.7, "c": 1.8, "L": 1.5}})");
    ASSERT_TRUE(rc.bar.has_value());
    EXPECT_EQ(rc.k, 15);
    EXPECT_EQ(rc.x_grid().size(), 200u);
    EXPECT_DOUBLE_EQ(rc.x_grid().back(), 1.5);
    EXPECT_EQ(rc.t, std::vector<double>{0.0});
    EXPECT_EQ(rc.method, ResponseMethod::General);
}

TEST(ParseConfig, PhysicalBlockDerivesCoefficients) {
    const RunConfig rc = parse_config(R"({"physical": {"rho":1,"A0":1,"E":1,"c1":0.3,"c2":0.7,"L":1.5}})");
    const BarConfig c = rc.resolved();
    EXPECT_NEAR(c.h1, 0.3, 1e-15);
    EXPECT_NEAR(c.h2, 0.7, 1e-15);
    EXPECT_DOUBLE_EQ(c.c, 1.0);
}

TEST(ParseConfig, RejectsBothBlocks) {
    EXPECT_THROW((void)parse_config(R"({"bar": {"h1":0,"h2":0,"c":1,"L":1},
        "physical": {"rho":1,"A0":1,"E":1,"c1":0,"c2":0,"L":1}})"),
                 ConfigError);
}

TEST(ParseConfig, UnknownKeyNamed) {
    try {
        (void)parse_config(R"({"bar": {"h1":0,"h2":0,"c":1,"L":1,"damping":3}})");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("bar.damping"), std::string::npos) << e.what();
    }
    try {
        (void)parse_config(R"({"bar": {"h1":0,"h2":0,"c":1,"L":1}, "excitation": {"f": {"type":"constant","valu":1}}})");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("excitation.f.valu"), std::string::npos) << e.what();
    }
}

TEST(ParseConfig, MalformedAndInvalidValues) {
    EXPECT_THROW((void)parse_config("{\"bar\": "), ConfigError);
    EXPECT_THROW((void)parse_config(R"({"bar": {"h1":0,"h2":0,"c":-1,"L":1}})"), ConfigError);
    EXPECT_THROW((void)parse_config(R"({"bar": {"h1":0,"h2":0,"c":1}})"), ConfigError);
    EXPECT_THROW((void)parse_config(R"({"bar": {"h1":"a","h2":0,"c":1,"L":1}})"), ConfigError);
    EXPECT_THROW((void)parse_config(R"({"k": -2})"), ConfigError);
    EXPECT_THROW((void)parse_config(R"({"grid": {"t": [0.5, 0.1]}})"), ConfigError);
    EXPECT_THROW((void)parse_config(R"({"method": "fast"})"), ConfigError);
    EXPECT_THROW((void)parse_config(R"({"fem": {"elements": 0}})"), ConfigError);
    EXPECT_THROW((void)parse_config(R"({"bar": {"h1":0,"h2":0,"c":1,"L":1}, "grid": {"x": [0, 2]}})"), ConfigError);
    EXPECT_THROW((void)parse_config(R"({"excitation": {"p": {"type": "sampled", "x": [0, 1], "t": [0], "values": [1, 2]}}})"),
                 ConfigError);
}

TEST(ParseConfig, FullSchema) {
    const RunConfig rc = parse_config(R"({
        "bar": {"h1": 0.3, "h2": 0.7, "c": 1.8, "L": 1.5},
        "k": 9,
        "grid": {"x": [0, 0.5, 1.5], "t": [0, 0.3]},
        "method": "simplified",
        "excitation": {
            "f": {"type": "polynomial", "coeffs": [0, 0.15, -0.05]},
            "g": {"type": "zero"},
            "p": {"type": "separable",
                  "space": {"type": "sinusoid", "wavenumber": 12.566370614359172},
                  "time": {"type": "sinusoid", "frequency": 2.0943951023931953}}
        },
        "fem": {"elements": 20, "dt": 0.002, "t_final": 0.4, "element_counts": [5, 10]}
    })");
    EXPECT_EQ(rc.k, 9);
    EXPECT_EQ(rc.x_grid().size(), 3u);
    EXPECT_EQ(rc.method, ResponseMethod::Simplified);
    EXPECT_NEAR(rc.excitation.f(1.0), 0.1, 1e-15);
    EXPECT_EQ(rc.fem.elements, 20);
    EXPECT_EQ(rc.fem.element_counts, (std::vector<int>{5, 10}));
    EXPECT_TRUE(std::holds_alternative<forcing::Separable>(rc.excitation.p.variant()));
}

TEST(Csv, QuotingAndRoundTrip) {
    ResultTable t{{"name", "value", "n", "ok"}, {}};
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    std::vector<double> values{0.1, 1.0 / 3.0, -2.5e-300, std::numeric_limits<double>::max(), std::nextafter(1.0, 2.0)};
    for (int i = 0; i < 50; ++i) values.push_back(u(rng) * std::pow(10.0, i % 20 - 10));
    for (std::size_t i = 0; i < values.size(); ++i)
        t.add_row({std::string(i % 2 ? "a,\"b\"" : "plain"), values[i], static_cast<long long>(i), i % 3 == 0});
    const auto rows = parse_csv(to_csv(t));
    ASSERT_EQ(rows.size(), values.size() + 1);
    EXPECT_EQ(rows[0], t.columns);
    for (std::size_t i = 0; i < values.size(); ++i) {
        EXPECT_EQ(rows[i + 1][0], i % 2 ? "a,\"b\"" : "plain");
        EXPECT_EQ(std::stod(rows[i + 1][1]), values[i]);
        EXPECT_EQ(std::stoll(rows[i + 1][2]), static_cast<long long>(i));
        EXPECT_EQ(rows[i + 1][3], i % 3 == 0 ? "true" : "false");
    }
    EXPECT_THROW((void)t.add_row({1.0}), Error);
    EXPECT_THROW((void)parse_csv("\"open"), InvalidInput);
}

TEST(Json, RecordsParseBack) {
    ResultTable t{{"n", "re"}, {}};
    t.add_row({std::string("rigid"), 0.0});
    t.add_row({static_cast<long long>(-1), 1.0 / 3.0});
    const auto j = nlohmann::json::parse(to_json(t));
    ASSERT_EQ(j.size(), 2u);
    EXPECT_EQ(j[0]["n"], "rigid");
    EXPECT_EQ(j[1]["n"], -1);
    EXPECT_EQ(j[1]["re"].get<double>(), 1.0 / 3.0);
}

TEST(Commands, SpectrumFreeFree) {
    RunConfig rc = parse_config(R"({"bar": {"h1":0,"h2":0,"c":1,"L":1}, "k": 1})");
    const CommandOutput out = run_command("spectrum", rc);
    ASSERT_EQ(out.tables.size(), 1u);
    const ResultTable& t = out.tables[0].table;
    EXPECT_EQ(t.columns, (std::vector<std::string>{"n", "re", "im"}));
    ASSERT_EQ(t.rows.size(), 4u);
    EXPECT_EQ(std::get<std::string>(t.rows[0][0]), "rigid");
    EXPECT_EQ(std::get<long long>(t.rows[1][0]), -1);
    EXPECT_NEAR(std::get<double>(t.rows[1][2]), -std::numbers::pi, 1e-15);
    EXPECT_EQ(std::get<double>(t.rows[2][2]), 0.0);
    EXPECT_NEAR(std::get<double>(t.rows[3][2]), std::numbers::pi, 1e-15);
}

TEST(Commands, VerifyFig2) {
    RunConfig rc = parse_config(R"({"bar": {"h1":0.3,"h2":0.7,"c":1.8,"L":1.5}})");
    const CommandOutput out = run_command("verify", rc);
    EXPECT_EQ(out.exit_code, kExitOk);
    bool found = false;
    for (const auto& row : out.tables[0].table.rows) {
        if (std::get<std::string>(row[0]) != "fig2-k15-error") continue;
        found = true;
        EXPECT_LE(std::get<double>(row[1]), 5e-4);
        EXPECT_EQ(std::get<double>(row[2]), 5e-4);
        EXPECT_TRUE(std::get<bool>(row[3]));
    }
    EXPECT_TRUE(found);
}

TEST(Commands, SpuriousScanFinalRowUnstable) {
    RunConfig rc = parse_config(R"({"bar": {"h1":0.7,"h2":-1.5,"c":1.5,"L":1.8}})");
    const ResultTable t = run_command("spurious-scan", rc).tables[0].table;
    ASSERT_EQ(t.rows.size(), 60u);
    EXPECT_EQ(std::get<long long>(t.rows.back()[0]), 60);
    EXPECT_TRUE(std::get<bool>(t.rows.back()[2]));
}

TEST(Commands, OtherSchemas) {
    RunConfig rc = parse_config(R"({"bar": {"h1":0.3,"h2":0.7,"c":1.8,"L":1.5}, "k": 2,
        "grid": {"points": 5, "t": [0, 0.2]}, "fem": {"elements": 4, "dt": 0.01, "t_final": 0.1}})");
    EXPECT_EQ(run_command("modes", rc).tables[0].table.columns,
              (std::vector<std::string>{"x", "n", "u1_re", "u1_im", "u2_re", "u2_im"}));
    const ResultTable resp = run_command("respond", rc).tables[0].table;
    EXPECT_EQ(resp.columns, (std::vector<std::string>{"x", "t", "u", "im_diag"}));
    EXPECT_EQ(resp.rows.size(), 10u);
    const ResultTable fem = run_command("fem", rc).tables[0].table;
    EXPECT_EQ(fem.columns, (std::vector<std::string>{"t", "x", "u", "v"}));
    EXPECT_EQ(std::get<double>(fem.rows.back()[0]), 0.1);
    EXPECT_EQ(run_command("fem-eigs", rc).tables[0].table.rows.size(), 10u);
    EXPECT_EQ(run_command("compare", rc).tables[0].table.columns,
              (std::vector<std::string>{"x", "t", "u_series", "u_fem", "abs_diff"}));
    EXPECT_THROW((void)run_command("nonsense", rc), InvalidInput);
}

TEST(Commands, DeterministicOutput) {
    RunConfig rc = parse_config(R"({"bar": {"h1":0.3,"h2":0.7,"c":1.8,"L":1.5}, "k": 4, "grid": {"points": 7, "t": [0.5]},
        "excitation": {"g": {"type": "constant", "value": 1}}})");
    EXPECT_EQ(to_csv(run_command("respond", rc).tables[0].table), to_csv(run_command("respond", rc).tables[0].table));
}

TEST(Commands, ExitCodeMapping) {
    EXPECT_EQ(exit_code_for(InvalidInput("x")), kExitInvalidConfig);
    EXPECT_EQ(exit_code_for(UnsupportedConfiguration("x")), kExitInvalidConfig);
    EXPECT_EQ(exit_code_for(AccuracyError("x", 1.0)), kExitNumerical);
    EXPECT_EQ(exit_code_for(NumericalError("x")), kExitNumerical);
    RunConfig rc = parse_config(R"({"bar": {"h1":0.4,"h2":-0.4,"c":1,"L":1}})");
    try {
        (void)run_command("respond", rc);
        FAIL();
    } catch (const std::exception& e) {
        EXPECT_EQ(exit_code_for(e), kExitInvalidConfig);
    }
}
