// SPDX-License-Identifier: Apache-2.0
//
// squintlab: wideband XL-MIMO beam squint boundaries and channel slicing
// Copyright (C) 2026 The squintlab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "squintlab/harness.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

#include <atomic>
#include <set>
#include <sstream>

using namespace squintlab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    ScenarioConfig small()
    {
        ScenarioConfig c;
        c.n = 128;
        c.m = 16;
        c.trials = 6;
        return c;
    }

    std::size_t csv_lines(const std::string &s)
    {
        return std::size_t(std::count(s.begin(), s.end(), '\n'));
    }
}

TEST_CASE("configuration defaults", "[harness]")
{
    const ScenarioConfig c;
    CHECK(c.n == 1024);
    CHECK(c.fc == 7e9);
    CHECK(c.b == 600e6);
    CHECK(c.m == 256);
    CHECK(c.l_n == 4);
    CHECK(c.l_f == 1);
    CHECK(c.snr_db == 10);
    CHECK(c.d_min == 10);
    CHECK(c.d_max == 100);
    CHECK_THAT(c.snr_linear(), WithinRel(10.0, 1e-15));
    const ScenarioConfig q = apply_quick(c);
    CHECK(q.m == 64);
    CHECK(q.trials == 100);
    CHECK(q.quick);
}

TEST_CASE("configuration round-trips through JSON", "[harness]")
{
    ScenarioConfig c;
    c.n = 77;
    c.seed = 0xfedcba9876543210ULL;
    c.axis = {1, 2.5};
    c.kappa_f = 0.2;
    const ScenarioConfig back = config_from_json(config_to_json(c));
    CHECK(config_to_json(back) == config_to_json(c));
    CHECK(back.seed == c.seed);
    CHECK_THROWS_AS(config_from_json(R"({"bogus": 1})"), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(R"({"n": 1.5})"), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json("[1]"), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json("{"), std::invalid_argument);
    const auto j = nlohmann::json::parse(config_to_json(c));
    CHECK(j.size() == config_field_names().size());
}

TEST_CASE("string setter parses each field type", "[harness]")
{
    ScenarioConfig c;
    set_config_field(c, "n", "512");
    set_config_field(c, "fc", "2.8e10");
    set_config_field(c, "seed", "18446744073709551615");
    set_config_field(c, "quick", "true");
    set_config_field(c, "axis", "1,2,3e6");
    set_config_field(c, "snr_db", "-5");
    CHECK(c.n == 512);
    CHECK(c.fc == 2.8e10);
    CHECK(c.seed == 18446744073709551615ULL);
    CHECK(c.quick);
    CHECK(c.axis == std::vector<double>{1, 2, 3e6});
    CHECK(c.snr_db == -5);
    CHECK_THROWS_AS(set_config_field(c, "n", "1.5"), std::invalid_argument);
    CHECK_THROWS_AS(set_config_field(c, "n", "12x"), std::invalid_argument);
    CHECK_THROWS_AS(set_config_field(c, "seed", "-1"), std::invalid_argument);
    CHECK_THROWS_AS(set_config_field(c, "nope", "1"), std::invalid_argument);
}

TEST_CASE("validation rejects inconsistent scenarios", "[harness]")
{
    ScenarioConfig c;
    CHECK_NOTHROW(c.validate());
    c.theta = 1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.d_max = 5;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.trials = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("random streams are reproducible and distinct", "[harness]")
{
    RngStream a(5, 3), b(5, 3), c(5, 4), d(6, 3);
    bool differ_c = false, differ_d = false;
    for (int i = 0; i < 16; ++i)
    {
        const double x = a.uniform(0, 1);
        CHECK(x == b.uniform(0, 1));
        differ_c = differ_c || x != c.uniform(0, 1);
        differ_d = differ_d || x != d.uniform(0, 1);
    }
    CHECK(differ_c);
    CHECK(differ_d);
}

TEST_CASE("complex normal draws have unit second moment", "[harness][oracle]")
{
    RngStream r(42, 0);
    double acc = 0;
    std::complex<double> mean = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
    {
        const auto z = r.complex_normal();
        acc += std::norm(z);
        mean += z;
    }
    CHECK(acc / n >= 0.99);
    CHECK(acc / n <= 1.01);
    CHECK(std::abs(mean / double(n)) < 0.01);
}

TEST_CASE("sampled scenarios follow the configured ranges", "[harness]")
{
    ScenarioConfig c;
    for (std::uint64_t t = 0; t < 300; ++t)
    {
        const auto ps = sample_scenario(c, t);
        REQUIRE(ps.size() == 5);
        for (std::size_t i = 0; i < ps.size(); ++i)
        {
            CHECK(std::abs(ps[i].sine_angle()) < 1);
            CHECK(ps[i].scatterer_distance() >= 10);
            CHECK(ps[i].scatterer_distance() <= 100);
            CHECK(ps[i].ue_range() >= 10);
            CHECK(ps[i].ue_range() <= 100);
            CHECK(ps[i].model() == (i < 4 ? PathModel::WN : PathModel::NF));
        }
    }
    const auto a = sample_scenario(c, 17), b = sample_scenario(c, 17);
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        CHECK(a[i].gain() == b[i].gain());
        CHECK(a[i].sine_angle() == b[i].sine_angle());
    }
    const auto users = sample_users(c, 2);
    CHECK(users.size() == 8);
    CHECK(users[3].size() == 4);
}

TEST_CASE("far-field paths are attenuated by the power offset", "[harness]")
{
    ScenarioConfig c;
    c.l_n = 1;
    c.l_f = 1;
    double near = 0, far = 0;
    for (std::uint64_t t = 0; t < 4000; ++t)
    {
        const auto ps = sample_scenario(c, t);
        near += std::norm(ps[0].loss_amp());
        far += std::norm(ps[1].loss_amp());
    }
    CHECK_THAT(10 * std::log10(near / far), WithinAbs(20.0, 0.5));
}

TEST_CASE("parallel_for visits every index once and forwards exceptions", "[harness]")
{
    for (unsigned threads : {1u, 3u, 8u})
    {
        std::vector<std::atomic<int>> hits(100);
        parallel_for(100, threads, [&](Index i) { ++hits[std::size_t(i)]; });
        for (auto &h : hits)
            CHECK(h.load() == 1);
        CHECK_THROWS_AS(parallel_for(10, threads, [](Index i) {
                            if (i == 7)
                                throw std::runtime_error("boom");
                        }),
                        std::runtime_error);
    }
}

TEST_CASE("scheme gains reduce to spectral efficiency", "[harness]")
{
    SchemeGains g;
    g.segments = {RVector<double>::Constant(4, 1.0), RVector<double>::Constant(2, 3.0)};
    CHECK_THAT(g.spectral_efficiency(1.0), WithinRel(0.5 * (1.0 + 2.0), 1e-15));
    CHECK(g.per_subcarrier(1.0).size() == 6);
}

TEST_CASE("per-trial evaluation orders the schemes", "[harness][property]")
{
    const ScenarioConfig c = small();
    for (std::uint64_t t = 0; t < 5; ++t)
    {
        const auto o = evaluate_antenna_slicing(c, sample_scenario(c, t));
        const double s = c.snr_linear();
        const double opt = o.schemes.at("se_opt").spectral_efficiency(s);
        const double as = o.schemes.at("antenna_slicing").spectral_efficiency(s);
        CHECK(opt >= as - 1e-12);
        CHECK(as >= 0);
        CHECK(o.n_wn.bounded());
        CHECK(o.subarrays >= 1);
    }
    auto fs = small();
    fs.k = 2;
    fs.t = 4;
    const auto o = evaluate_subband_slicing(fs, sample_users(fs, 0));
    CHECK(o.schemes.at("subband_slicing").segments.size() == 2);
    CHECK(o.schemes.at("se_opt").spectral_efficiency(10) >= o.schemes.at("subband_slicing").spectral_efficiency(10) - 1e-12);
}

TEST_CASE("experiments emit one row per axis point and scheme", "[harness]")
{
    CHECK(experiment_names().size() == 10);
    CHECK_THROWS_AS(run_experiment("nope", small()), UnknownExperiment);

    auto c = small();
    c.axis = {-10, 0, 10};
    const auto r = run_experiment("se-snr-as", c, 2);
    CHECK(r.axis_values == c.axis);
    CHECK(r.rows.size() == 9);
    CHECK(r.series("se_opt").size() == 3);
    CHECK(r.series("se_opt")[0] < r.series("se_opt")[2]);
    CHECK_THROWS_AS(r.series("missing"), std::out_of_range);
    const std::string csv = to_csv(r);
    CHECK(csv.rfind("axis,scheme,se_bits_per_hz,trials,seed,boundary_b_wn_hz,boundary_n_wn\n", 0) == 0);
    CHECK(csv_lines(csv) == 10);
    const auto meta = nlohmann::json::parse(r.meta_json);
    CHECK(meta["experiment"] == "se-snr-as");
    CHECK(meta["points"].size() == 3);
    CHECK(meta["points"][0].contains("infeasible_trials"));
    CHECK(meta["config"]["n"] == 128);
}

TEST_CASE("every experiment runs at tiny scale", "[harness]")
{
    auto c = small();
    c.trials = 2;
    c.k = 2;
    c.t = 2;
    c.m = 8;
    c.n = 32;
    for (const auto &name : experiment_names())
    {
        auto cc = c;
        if (name == "sweep-bandwidth")
            cc.axis = {50e6, 300e6};
        if (name == "sweep-antennas")
            cc.axis = {16, 64};
        if (name == "se-paths-as" || name == "se-paths-fs")
            cc.axis = {1, 2};
        if (name == "gain-map")
            cc.axis = {0, 4};
        INFO(name);
        const auto r = run_experiment(name, cc, 1);
        CHECK_FALSE(r.rows.empty());
        for (const auto &row : r.rows)
            CHECK(std::isfinite(row.se));
    }
}

TEST_CASE("sweep rows respect SE_opt >= proposed >= baseline for a single path", "[harness][property]")
{
    auto c = small();
    c.n = 256;
    c.trials = 3;
    c.axis = {20e6, 100e6, 300e6, 600e6};
    const auto r = run_experiment("sweep-bandwidth", c, 1);
    const auto &opt = r.series("se_opt"), &as = r.series("antenna_slicing"), &nb = r.series("narrowband_mrt");
    for (std::size_t i = 0; i < opt.size(); ++i)
    {
        CHECK(opt[i] >= as[i] - 1e-9);
        CHECK(as[i] >= nb[i] - 1e-9);
        CHECK(nb[i] >= 0);
    }
}

TEST_CASE("gain map peaks at one on the center subcarrier", "[harness]")
{
    ScenarioConfig c;
    c.n = 512;
    c.m = 1024;
    c.b = 300e6;
    const auto r = run_experiment("gain-map", c, 1);
    double best = 0;
    std::string where;
    for (const auto &row : r.rows)
    {
        CHECK(row.se <= 1 + 1e-12);
        if (row.se > best)
        {
            best = row.se;
            where = row.scheme;
        }
    }
    CHECK_THAT(best, WithinAbs(1.0, 1e-6));
    CHECK(where.find("_m512") != std::string::npos);
}

TEST_CASE("results are independent of the thread count", "[harness]")
{
    auto c = small();
    c.axis = {1, 3};
    const auto a = to_csv(run_experiment("se-paths-as", c, 1));
    const auto b = to_csv(run_experiment("se-paths-as", c, 4));
    CHECK(a == b);
}

TEST_CASE("numbers are printed with twelve significant digits", "[harness]")
{
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(600e6) == "600000000");
    CHECK(format_number(-2.5) == "-2.5");
}

TEST_CASE("bandwidth sweep leaves the 99% band only beyond the boundary", "[harness]")
{
    ScenarioConfig c;
    c.n = 512;
    c.m = 64;
    c.trials = 20;
    const auto r = run_experiment("sweep-bandwidth", c, 1);
    const Path p = Path::from_gain(1.0, c.theta, c.d, c.r, PathModel::WN, c.fc);
    const double Bwn = freq_boundary(c.geometry(), p, c.thresholds(), FieldMode::Near).value();
    const auto &nb = r.series("narrowband_mrt"), &opt = r.series("se_opt");
    double crossing = -1;
    for (std::size_t i = 0; i < nb.size(); ++i)
    {
        const double ratio = nb[i] / opt[i];
        if (r.axis_values[i] <= Bwn)
            CHECK(ratio >= 0.99);
        if (crossing < 0 && ratio < 0.99)
            crossing = r.axis_values[i];
    }
    REQUIRE(crossing > 0);
    INFO("crossing " << crossing << " Hz, boundary " << Bwn << " Hz");
    CHECK(crossing > Bwn);
    CHECK(crossing <= 4 * Bwn);
    WARN("crossing at " << crossing / Bwn << " x B_wn");
}
