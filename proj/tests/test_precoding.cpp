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

#include "squintlab/precoding.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace squintlab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    using P = PathParams<double>;
    const double fc = 7e9;

    CMatrix<double> random_channel(Index N, Index M, std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> n;
        CMatrix<double> H(N, M);
        for (Index i = 0; i < N; ++i)
            for (Index m = 0; m < M; ++m)
                H(i, m) = {n(rng), n(rng)};
        return H;
    }

    std::vector<CVector<double>> random_analog(const ArrayPartition &part, std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-pi<double>, pi<double>);
        std::vector<CVector<double>> a;
        for (Index t = 0; t < part.num_subarrays(); ++t)
        {
            CVector<double> v(part.size(t));
            for (Index i = 0; i < v.size(); ++i)
                v[i] = std::polar(1.0, u(rng));
            a.push_back(v);
        }
        return a;
    }
}

TEST_CASE("precoder sets validate the analog stage", "[precoding]")
{
    const ArrayPartition part({2, 2});
    std::vector<CVector<double>> a = {CVector<double>::Ones(2), CVector<double>::Ones(2)};
    CHECK_NOTHROW(PrecoderSet<double>(part, a, CMatrix<double>::Ones(2, 3), Scheme::AntennaSlicing));
    a[1][0] = 0.5;
    CHECK_THROWS_AS(PrecoderSet<double>(part, a, CMatrix<double>::Ones(2, 3), Scheme::AntennaSlicing), std::invalid_argument);
    CHECK_THROWS_AS(PrecoderSet<double>(part, {CVector<double>::Ones(2)}, CMatrix<double>::Ones(2, 3), Scheme::AntennaSlicing),
                    std::invalid_argument);
    CHECK(std::string(to_string(Scheme::NarrowbandBaseline)) == "narrowband_mrt");
}

TEST_CASE("hybrid MRT meets the power constraint and matches a dense evaluation", "[precoding][property]")
{
    const ArrayPartition part({5, 11, 8, 8});
    const CMatrix<double> H = random_channel(32, 6, 1);
    const auto pre = hybrid_precoders(H, part, random_analog(part, 2), Scheme::AntennaSlicing);
    const CMatrix<double> F = pre.analog_matrix();
    for (Index m = 0; m < 6; ++m)
    {
        const CVector<double> x = pre.effective(m);
        CHECK_THAT(x.norm(), WithinAbs(1.0, 1e-12));
        CHECK((x - F * pre.digital().col(m)).norm() < 1e-12);
        const std::complex<double> dense = (F * pre.digital().col(m)).dot(H.col(m));
        CHECK(std::abs(pre.response(H.col(m), m) - dense) < 1e-10);
        // Cauchy-Schwarz: no unit-power precoder beats ||h||^2
        CHECK(std::norm(dense) <= H.col(m).squaredNorm() * (1 + 1e-12));
    }
}

TEST_CASE("digital MRT is optimal for a fixed analog stage", "[precoding][property]")
{
    const ArrayPartition part({4, 4, 4});
    const CMatrix<double> H = random_channel(12, 1, 7);
    const auto analog = random_analog(part, 8);
    const CVector<double> fd = digital_mrt<double>(H.col(0), part, analog);
    const double best = std::norm(PrecoderSet<double>(part, analog, fd, Scheme::AntennaSlicing).response(H.col(0), 0));
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n;
    for (int i = 0; i < 200; ++i)
    {
        CVector<double> v(3);
        for (Index t = 0; t < 3; ++t)
            v[t] = {n(rng), n(rng)};
        v /= std::sqrt(4.0 * v.squaredNorm());
        CHECK(std::norm(PrecoderSet<double>(part, analog, v, Scheme::AntennaSlicing).response(H.col(0), 0)) <=
              best * (1 + 1e-12));
    }
    CHECK_THROWS_AS(digital_mrt<double>(CVector<double>::Zero(12), part, analog), DegenerateSubcarrier);
}

TEST_CASE("narrowband MRT reaches N |g|^2 on a squint-free path", "[precoding]")
{
    const ArrayGeometry<double> g(128, fc);
    const CarrierGrid<double> grid(16, 600e6);
    const P p = P::from_gain({0.6, 0.8}, 0.3, 20, 20, PathModel::NN, fc);
    const CMatrix<double> H = synth_channel(g, grid, {p}, ModelTag::NN).entries();
    const RVector<double> gains = received_power_gains(H, full_array_mrt_precoders(g, 16, p));
    CHECK((gains.array() - 128.0).abs().maxCoeff() < 1e-8);
}

TEST_CASE("narrowband MRT gain on a squinted path is N |g|^2 eta^2", "[precoding]")
{
    const ArrayGeometry<double> g(256, fc);
    const CarrierGrid<double> grid(32, 600e6);
    const P p = P::from_gain({1.2, 0}, 0.4, 12, 20, PathModel::WN, fc);
    const CMatrix<double> H = synth_channel(g, grid, {p}, ModelTag::WN).entries();
    const RVector<double> gains = received_power_gains(H, full_array_mrt_precoders(g, 32, p));
    const CMatrix<double> Q = beam_squint_matrix(g, grid, p, FieldMode::Near);
    for (Index m = 0; m < 32; ++m)
    {
        const double eta = normalized_array_gain(g, grid, p, m);
        CHECK_THAT(eta, WithinRel(std::abs(Q.col(m).sum()) / 256.0, 1e-10));
        CHECK(eta <= 1 + 1e-12);
        CHECK_THAT(gains[m], WithinRel(256 * 1.44 * eta * eta, 1e-9));
    }
}

TEST_CASE("fully digital precoder attains the optimal SE", "[precoding]")
{
    const CMatrix<double> H = random_channel(16, 8, 3);
    const auto pre = optimal_precoders(H);
    CHECK_THAT(spectral_efficiency(H, pre, 10.0, 1.0), WithinRel(optimal_spectral_efficiency(H, 10.0, 1.0), 1e-12));
    CHECK_THROWS_AS(spectral_efficiency(H, pre, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("slice precoder equals the relocated full-array steering on the subarray", "[precoding]")
{
    const ArrayGeometry<double> g(96, fc);
    const ArrayPartition part({32, 40, 24});
    const std::vector<P> paths = {P::from_gain({0.2, -0.9}, -0.35, 15, 30, PathModel::WN, fc),
                                  P::from_gain({0.5, 0.1}, 0.5, 70, 30, PathModel::WN, fc)};
    for (Index t = 0; t < 3; ++t)
    {
        const CVector<double> b = analog_slice_precoder(g, paths, part, 0, t);
        const CVector<double> ref = phase_only<double>(paths[0].gain() * near_field_steering(g, paths[0]).segment(part.first(t), part.size(t)));
        CHECK((b - ref).cwiseAbs().maxCoeff() < 1e-9);
    }
    CHECK_THROWS_AS(analog_slice_precoder(g, paths, part, 2, 0), std::invalid_argument);
}

TEST_CASE("orthogonal-path antenna slicing matches the closed form", "[precoding][oracle]")
{
    // four NN paths at plane-wave distance, angles orthogonal over 64 antennas
    const ArrayGeometry<double> g(256, fc);
    const CarrierGrid<double> grid(8, 100e6);
    std::vector<P> paths;
    const std::vector<double> amp = {1.0, 0.8, 0.6, 0.5};
    for (int l = 0; l < 4; ++l)
        paths.push_back(P::from_gain({amp[std::size_t(l)], 0}, -0.3 + l * 2.0 / 64, 1e6, 10, PathModel::NN, fc));
    const auto ch = synth_channel(g, grid, paths, ModelTag::NN);
    const ArrayPartition part = ArrayPartition::uniform(256, 4);
    const auto pre = antenna_slicing_precoders(ch, part, {0, 1, 2, 3});
    const double P0 = 10;
    const double se = spectral_efficiency(ch, pre, P0, 1.0);
    CHECK_THAT(se, WithinRel(se_closed_form::antenna_slicing_equal<double>(256, amp, P0, 1.0), 0.02));
    CHECK_THAT(se_closed_form::antenna_slicing<double>({64, 64, 64, 64}, amp, P0, 1.0),
               WithinRel(se_closed_form::antenna_slicing_equal<double>(256, amp, P0, 1.0), 1e-12));
}

TEST_CASE("sub-band slicing on a compliant single path reaches the full-array gain", "[precoding]")
{
    const ArrayGeometry<double> g(256, fc);
    const auto sub = CarrierGrid<double>::from_spacing(8, 100e3);
    const P p = P::from_gain({1, 0}, 0.2, 30, 30, PathModel::WN, fc);
    const double center = fc + 50e6;
    const CMatrix<double> H = synth_subband_channel(g, sub, center, {p}, ModelTag::WN).entries();
    const auto part = ArrayPartition::uniform(256, 8);
    const auto pre = subband_slicing_precoders(g, H, {p}, center, part);
    const double se = spectral_efficiency(H, pre, 10.0, 1.0);
    CHECK_THAT(se, WithinRel(se_closed_form::subband_single_path<double>(256, 8, 1.0, 10.0, 1.0), 0.03));
    CHECK_THAT(se, WithinRel(optimal_spectral_efficiency(H, 10.0, 1.0), 0.03));
    const auto S = se_closed_form::block_magnitude_sums(H, part);
    CHECK_THAT(S(0, 0), WithinRel(32.0, 1e-12));
    CHECK_THAT(se_closed_form::subband_user<double>(S, 32, 10.0, 1.0), WithinRel(std::log2(1 + 10.0 * 256), 1e-12));
}

TEST_CASE("SNR helpers invert each other", "[precoding]")
{
    CHECK_THAT(snr_db(power_for_snr_db(13.0, 0.5, 2.0), 0.5, 2.0), WithinAbs(13.0, 1e-12));
    CHECK_THAT(mean_ascending<double>(RVector<double>::LinSpaced(5, 1, 5)), WithinAbs(3.0, 1e-15));
}

TEST_CASE("multi-user gain equals one for a single path", "[precoding]")
{
    const auto sub = CarrierGrid<double>::from_spacing(16, 1e6);
    const P p = P::from_gain({2, 0}, 0.2, 30, 30, PathModel::WN, fc);
    for (Index m = 0; m < 16; ++m)
        CHECK_THAT(multiuser_gain<double>({p}, sub, m), WithinRel(2.0, 1e-12));
}
