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

#include "squintlab/wavefield.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace squintlab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    using LD = long double;
    using P = PathParams<double>;

    // Scatterer placed in the array plane at (d theta, d sqrt(1 - theta^2)), antenna at (x, 0)
    LD planar_distance(LD d, LD theta, LD x)
    {
        const LD xs = d * theta, ys = d * std::sqrt(1.0L - theta * theta);
        return std::hypot(x - xs, ys);
    }

    std::complex<double> cexpj(LD phase)
    {
        const LD w = std::fmod(phase, 2.0L * 3.14159265358979323846264338327950288L);
        return {double(std::cos(w)), double(std::sin(w))};
    }

    constexpr LD c0 = 299792458.0L;
    constexpr LD two_pi = 2.0L * 3.14159265358979323846264338327950288L;
}

TEST_CASE("antenna and subcarrier offsets are centered", "[wavefield]")
{
    const ArrayGeometry<double> g(8, 7e9);
    CHECK(g.offset(0) == -3.5);
    CHECK(g.offset(7) == 3.5);
    CHECK_THAT(g.offsets().sum(), WithinAbs(0.0, 1e-12));
    CHECK_THAT(g.spacing(), WithinRel(299792458.0 / 14e9, 1e-15));

    const CarrierGrid<double> grid(5, 500e6);
    CHECK(grid.subcarrier_spacing() == 100e6);
    CHECK(grid.offset(2) == 0.0);
    CHECK(grid.frequency(4, 7e9) == 7.2e9);
    CHECK_THAT(grid.bandwidth(), WithinRel(500e6, 1e-15));
}

TEST_CASE("invalid parameters are rejected", "[wavefield]")
{
    CHECK_THROWS_AS(ArrayGeometry<double>(0, 7e9), std::invalid_argument);
    CHECK_THROWS_AS(ArrayGeometry<double>(4, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(CarrierGrid<double>(0, 1e6), std::invalid_argument);
    CHECK_THROWS_AS(P::from_gain(1.0, 1.0, 10, 10, PathModel::WN, 7e9), std::invalid_argument);
    CHECK_THROWS_AS(P::from_gain(1.0, 0.1, 0, 10, PathModel::WN, 7e9), std::invalid_argument);
    CHECK_THROWS_AS(P::from_gain(1.0, 0.1, 10, 0, PathModel::WN, 7e9), std::invalid_argument);
    CHECK_NOTHROW(P::from_gain(1.0, 0.1, 10, 0, PathModel::WN, 7e9, true));
    CHECK_THROWS_AS(P::from_gain(1.0, 0.1, 10, 5, PathModel::WN, 7e9, true), std::invalid_argument);
    CHECK_THROWS_AS(ArrayPartition::uniform(10, 3), std::invalid_argument);
    CHECK_THROWS_AS(ArrayPartition({4, 0}), std::invalid_argument);
}

TEST_CASE("gain and loss amplitude are related by the carrier phase", "[wavefield]")
{
    const double fc = 7e9, r = 12.5, d = 33.0;
    const auto p = P::from_loss({0.3, -0.4}, 0.2, d, r, PathModel::WN, fc);
    const auto q = P::from_gain(p.gain(), 0.2, d, r, PathModel::WN, fc);
    CHECK_THAT(std::abs(p.gain()), WithinRel(0.5, 1e-14));
    CHECK_THAT(std::abs(q.loss_amp() - p.loss_amp()), WithinAbs(0.0, 1e-12));
}

TEST_CASE("distance difference matches a planar coordinate oracle", "[wavefield][oracle]")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> th(-0.999, 0.999), ld(0.0, 7.0), lx(-3.0, 0.0);
    for (int i = 0; i < 2000; ++i)
    {
        const double d = std::pow(10.0, ld(rng)), theta = th(rng);
        const double x = (i % 2 ? 1 : -1) * std::pow(10.0, lx(rng)) * 20;
        const LD ref = planar_distance(d, theta, x) - planar_distance(d, theta, 0);
        const double got = distance_difference(d, theta, x, 0.0);
        CHECK(std::abs(LD(got) - ref) <= 1e-12L * std::max<LD>(1, std::abs(ref)) + 1e-9L * std::abs(ref));
    }
}

TEST_CASE("near-field steering tends to the planar steering vector", "[wavefield]")
{
    const ArrayGeometry<double> g(64, 7e9);
    const auto p = P::from_gain(1.0, 0.37, 1e7, 10, PathModel::WN, 7e9);
    const CVector<double> a = near_field_steering(g, p), b = far_field_steering(g, 0.37);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-3);
    CHECK((a.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-14);
}

TEST_CASE("channel entries follow the per-antenna propagation distance", "[wavefield][oracle]")
{
    const double fc = 7e9, B = 600e6;
    const ArrayGeometry<double> g(32, fc);
    const CarrierGrid<double> grid(16, B);
    const std::complex<double> rho{0.6, -0.8};
    const double theta = -0.45, d = 14.0, r = 23.0;

    for (PathModel model : {PathModel::WN, PathModel::NN, PathModel::NF})
    {
        const auto p = P::from_loss(rho, theta, d, r, model, fc);
        const ModelTag tag = model == PathModel::WN ? ModelTag::WN : model == PathModel::NN ? ModelTag::NN : ModelTag::NF;
        const CMatrix<double> H = synth_channel(g, grid, {p}, tag).entries();
        double worst = 0;
        for (Index n = 0; n < g.num_antennas(); ++n)
            for (Index m = 0; m < grid.num_subcarriers(); ++m)
            {
                const LD fm = LD(fc) + LD(grid.offset(m)) * LD(grid.subcarrier_spacing());
                const LD x = LD(g.offset(n)) * (c0 / (2.0L * fc));
                const LD dn = planar_distance(d, theta, x);
                LD phase = 0;
                if (model == PathModel::WN)
                    phase = two_pi * fm * (r + dn) / c0;
                else if (model == PathModel::NN)
                    phase = two_pi * fm * (r + d) / c0 + two_pi * fc * (dn - d) / c0;
                else
                    phase = two_pi * fm * (r + d) / c0 - two_pi * fc * x * theta / c0;
                worst = std::max(worst, std::abs(H(n, m) - rho * cexpj(phase)));
            }
        INFO(to_string(model));
        CHECK(worst < 1e-7);
    }
}

TEST_CASE("model tags restrict the admissible path models", "[wavefield]")
{
    const ArrayGeometry<double> g(4, 7e9);
    const CarrierGrid<double> grid(4, 1e8);
    const auto wn = P::from_gain(1.0, 0.1, 20, 20, PathModel::WN, 7e9);
    const auto nf = wn.with_model(PathModel::NF);
    CHECK_THROWS_AS(synth_channel(g, grid, {wn, nf}, ModelTag::WN), std::invalid_argument);
    CHECK_NOTHROW(synth_channel(g, grid, {wn, nf}, ModelTag::Hybrid));
    CHECK_THROWS_AS(synth_channel<double>(g, grid, {}, ModelTag::Hybrid), std::invalid_argument);
    CHECK_THROWS_AS(ChannelTensor<double>(CMatrix<double>::Zero(3, 4), g, grid, {wn}, ModelTag::WN), std::invalid_argument);
}

TEST_CASE("channel is linear in the paths", "[wavefield][property]")
{
    const ArrayGeometry<double> g(24, 7e9);
    const CarrierGrid<double> grid(12, 400e6);
    const auto a = P::from_gain({0.2, 0.9}, 0.3, 15, 40, PathModel::WN, 7e9);
    const auto b = P::from_gain({-1.1, 0.1}, -0.6, 60, 20, PathModel::WN, 7e9);
    const CMatrix<double> Hab = synth_channel(g, grid, {a, b}, ModelTag::WN).entries();
    const CMatrix<double> Ha = synth_channel(g, grid, {a}, ModelTag::WN).entries();
    const CMatrix<double> Hb = synth_channel(g, grid, {b}, ModelTag::WN).entries();
    CHECK((Hab - Ha - Hb).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((Ha.cwiseAbs().array() - std::abs(a.gain())).abs().maxCoeff() < 1e-12);
}

TEST_CASE("beam squint matrix entries have the squint phase", "[wavefield]")
{
    const ArrayGeometry<double> g(16, 7e9);
    const CarrierGrid<double> grid(8, 600e6);
    const auto p = P::from_gain(1.0, 0.5, 10, 10, PathModel::WN, 7e9);
    const CMatrix<double> Q = beam_squint_matrix(g, grid, p, FieldMode::Near);
    const RVector<double> dd = distance_variation(g, p);
    for (Index n = 0; n < 16; ++n)
        for (Index m = 0; m < 8; ++m)
        {
            const double ph = 2 * pi<double> * grid.offset(m) * grid.subcarrier_spacing() * dd[n] / 299792458.0;
            CHECK(std::abs(Q(n, m) - std::polar(1.0, ph)) < 1e-12);
        }
    const CMatrix<double> F = beam_squint_matrix(g, grid, p, FieldMode::Far);
    CHECK(std::abs(F(0, 0) - std::polar(1.0, 2 * pi<double> * grid.offset(0) * grid.subcarrier_spacing() *
                                              (-g.position(0) * 0.5) / 299792458.0)) < 1e-12);
}

TEST_CASE("sub-band channel equals the matching full-band columns", "[wavefield]")
{
    const double fc = 7e9;
    const ArrayGeometry<double> g(40, fc);
    const CarrierGrid<double> grid(64, 640e6);
    const std::vector<P> paths = {P::from_gain({1, 0.3}, 0.2, 18, 30, PathModel::WN, fc),
                                  P::from_gain({-0.4, 0.7}, -0.7, 50, 11, PathModel::NN, fc),
                                  P::from_gain({0.1, 0.1}, 0.05, 80, 70, PathModel::NF, fc)};
    const CMatrix<double> H = synth_channel(g, grid, paths, ModelTag::Hybrid).entries();
    const Index first = 16, Ms = 16;
    const auto sub = CarrierGrid<double>::from_spacing(Ms, grid.subcarrier_spacing());
    const double center = fc + 0.5 * (grid.offset(first) + grid.offset(first + Ms - 1)) * grid.subcarrier_spacing();
    const CMatrix<double> Hs = synth_subband_channel(g, sub, center, paths, ModelTag::Hybrid).entries();
    CHECK((Hs - H.middleCols(first, Ms)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("partition offsets and subarray channels", "[wavefield]")
{
    const ArrayPartition part({3, 5, 8});
    CHECK(part.num_antennas() == 16);
    CHECK(part.first(2) == 8);
    CHECK(part.offset(0) == -8 + 1.5);
    CHECK(part.offset(2) == -8 + 8 + 4.0);
    const ArrayGeometry<double> g(16, 7e9);
    // center of subarray t coincides with the mean element position
    for (Index t = 0; t < 3; ++t)
    {
        double mean = 0;
        for (Index i = 0; i < part.size(t); ++i)
            mean += g.offset(part.first(t) + i);
        CHECK_THAT(mean / double(part.size(t)), WithinAbs(part.offset(t), 1e-12));
    }

    const CarrierGrid<double> grid(8, 600e6);
    const std::vector<P> paths = {P::from_gain({1, 0}, 0.3, 9, 30, PathModel::WN, 7e9),
                                  P::from_gain({0, 1}, -0.2, 40, 30, PathModel::NN, 7e9),
                                  P::from_gain({0.3, 0}, 0.6, 40, 30, PathModel::NF, 7e9)};
    const CMatrix<double> H = synth_channel(g, grid, paths, ModelTag::Hybrid).entries();
    for (Index t = 0; t < 3; ++t)
    {
        CMatrix<double> sum = CMatrix<double>::Zero(part.size(t), 8);
        for (const auto &p : paths)
            sum += subarray_relocation(g, p, part, t) * subarray_channel(g, grid, {p}, part, t).entries();
        CHECK((sum - H.middleRows(part.first(t), part.size(t))).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(std::abs(std::abs(subarray_relocation(g, paths[0], part, t)) - 1.0) < 1e-14);
        const LD x0 = LD(part.offset(t)) * LD(g.spacing());
        CHECK_THAT(subarray_reference_distance(g, paths[0], part, t), WithinRel(double(planar_distance(9, 0.3, x0)), 1e-13));
    }
    CHECK_THROWS_AS(subarray_channel(g, grid, paths, part, 3), std::out_of_range);
    CHECK_THROWS_AS(subarray_channel(ArrayGeometry<double>(15, 7e9), grid, paths, part, 0), std::invalid_argument);
}

TEST_CASE("delay steering carries the total path length", "[wavefield]")
{
    const CarrierGrid<double> grid(6, 300e6);
    const auto p = P::from_gain(1.0, 0.0, 10, 20, PathModel::WN, 7e9);
    const CVector<double> b = delay_steering(grid, p);
    for (Index m = 0; m < 6; ++m)
        CHECK(std::abs(b[m] - std::polar(1.0, 2 * pi<double> * grid.offset(m) * 50e6 * 30 / 299792458.0)) < 1e-12);
}
