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

#ifndef SQUINTLAB_BOUNDARIES_HPP
#define SQUINTLAB_BOUNDARIES_HPP

// Wideband boundaries (bandwidth and antenna count beyond which beam squint
// can no longer be ignored), the near-field threshold, their bounds, and a
// brute-force phase oracle that evaluates the squint phase antenna by antenna.

#include "squintlab/limit.hpp"
#include "squintlab/wavefield.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace squintlab
{
    template <typename Scalar>
    class SquintThresholds
    {
    public:
        SquintThresholds() = default;
        SquintThresholds(Scalar kappa_a, Scalar kappa_f) : ka_(kappa_a), kf_(kappa_f)
        {
            if (!(kappa_a > Scalar(0) && kappa_a <= Scalar(1)) || !(kappa_f > Scalar(0) && kappa_f <= Scalar(1)))
                throw std::invalid_argument("SquintThresholds: kappa values must lie in (0, 1]");
        }

        Scalar kappa_a() const { return ka_; }
        Scalar kappa_f() const { return kf_; }
        Scalar total() const { return ka_ + kf_; }
        Scalar phase_limit() const { return total() * pi<Scalar>; } // rad

    private:
        Scalar ka_ = Scalar(0.125);
        Scalar kf_ = Scalar(0.125);
    };

    // Raw closed forms on scalar inputs; |theta| <= 1 is accepted so limits can be evaluated
    namespace closed_form
    {
        // sqrt(d^2 + (N-1) d lambda |theta| / 2 + (N-1)^2 lambda^2 / 16) - d
        template <typename Scalar>
        Scalar near_variation(Scalar N, Scalar lambda, Scalar theta, Scalar d)
        {
            const Scalar x = (N - Scalar(1)) * d * lambda * std::abs(theta) / Scalar(2) +
                             (N - Scalar(1)) * (N - Scalar(1)) * lambda * lambda / Scalar(16);
            return x / (std::sqrt(d * d + x) + d);
        }

        template <typename Scalar>
        Scalar far_variation(Scalar N, Scalar lambda, Scalar theta)
        {
            return (N - Scalar(1)) * lambda * std::abs(theta) / Scalar(4);
        }

        template <typename Scalar>
        Limit<Scalar> bandwidth_limit(Scalar kappa, Scalar c, Scalar variation)
        {
            if (!(variation > Scalar(0)))
                return Limit<Scalar>::unbounded();
            return Limit<Scalar>::finite(kappa * c / variation);
        }

        // (-A2 + sqrt(A2^2 + 4 A1 A)) / (2 A1) + 1
        template <typename Scalar>
        Scalar quadratic_count(Scalar A1, Scalar A2, Scalar A)
        {
            return Scalar(2) * A / (A2 + std::sqrt(A2 * A2 + Scalar(4) * A1 * A)) + Scalar(1);
        }
    }

    template <typename Scalar>
    struct BoundaryCoefficients
    {
        Scalar A1; // lambda^2 / 16
        Scalar A2; // lambda d |theta| / 2
        Scalar A3; // (kappa^2 c^2 + 2 kappa c d B) / B^2
        Scalar A4; // lambda d / 2
        Scalar A5; // (kappa_a^2 c^2 + 4 kappa_a c d f_c) / (4 f_c^2)
    };

    template <typename Scalar>
    BoundaryCoefficients<Scalar> boundary_coefficients(Scalar bandwidth, Scalar sine_angle, Scalar d, Scalar center_freq,
                                                       const SquintThresholds<Scalar> &thr,
                                                       Scalar wave_speed = speed_of_light<Scalar>)
    {
        const Scalar c = wave_speed, lambda = c / center_freq, kappa = thr.total(), ka = thr.kappa_a();
        BoundaryCoefficients<Scalar> A;
        A.A1 = lambda * lambda / Scalar(16);
        A.A2 = lambda * d * std::abs(sine_angle) / Scalar(2);
        A.A3 = (kappa * kappa * c * c + Scalar(2) * kappa * c * d * bandwidth) / (bandwidth * bandwidth);
        A.A4 = lambda * d / Scalar(2);
        A.A5 = (ka * ka * c * c + Scalar(4) * ka * c * d * center_freq) / (Scalar(4) * center_freq * center_freq);
        return A;
    }

    // ---- distance variation and squint phase -----------------------------

    template <typename Scalar>
    Scalar max_distance_variation(const ArrayGeometry<Scalar> &geom, const PathParams<Scalar> &path, FieldMode mode)
    {
        const Scalar N = Scalar(geom.num_antennas());
        if (mode == FieldMode::Near)
            return closed_form::near_variation(N, geom.wavelength(), path.sine_angle(), path.scatterer_distance());
        return closed_form::far_variation(N, geom.wavelength(), path.sine_angle());
    }

    // pi B / c * max variation
    template <typename Scalar>
    Scalar max_squint_phase(const ArrayGeometry<Scalar> &geom, const CarrierGrid<Scalar> &grid,
                            const PathParams<Scalar> &path, FieldMode mode)
    {
        return pi<Scalar> * grid.bandwidth() / geom.wave_speed() * max_distance_variation(geom, path, mode);
    }

    // ---- boundaries -----------------------------------------------------

    template <typename Scalar>
    Limit<Scalar> freq_boundary(const ArrayGeometry<Scalar> &geom, const PathParams<Scalar> &path,
                                const SquintThresholds<Scalar> &thr, FieldMode mode)
    {
        return closed_form::bandwidth_limit(thr.total(), geom.wave_speed(), max_distance_variation(geom, path, mode));
    }

    // Real-valued antenna count; the near-field boundary is always finite
    template <typename Scalar>
    Limit<Scalar> antenna_boundary(Scalar bandwidth, const PathParams<Scalar> &path, Scalar center_freq,
                                   const SquintThresholds<Scalar> &thr, FieldMode mode,
                                   Scalar wave_speed = speed_of_light<Scalar>)
    {
        if (!(bandwidth > Scalar(0)))
            throw std::invalid_argument("antenna_boundary: bandwidth must be positive");
        const Scalar theta = std::abs(path.sine_angle());
        if (mode == FieldMode::Far)
        {
            if (theta == Scalar(0))
                return Limit<Scalar>::unbounded();
            return Limit<Scalar>::finite(Scalar(4) * thr.total() * center_freq / (bandwidth * theta) + Scalar(1));
        }
        const auto A = boundary_coefficients(bandwidth, path.sine_angle(), path.scatterer_distance(), center_freq, thr,
                                             wave_speed);
        return Limit<Scalar>::finite(closed_form::quadratic_count(A.A1, A.A2, A.A3));
    }

    template <typename Scalar>
    Scalar near_field_threshold(const PathParams<Scalar> &path, Scalar center_freq, Scalar kappa_a,
                                Scalar wave_speed = speed_of_light<Scalar>)
    {
        const Scalar c = wave_speed, lambda = c / center_freq, d = path.scatterer_distance();
        const Scalar A1 = lambda * lambda / Scalar(16);
        const Scalar A2 = lambda * d * std::abs(path.sine_angle()) / Scalar(2);
        const Scalar A5 = (kappa_a * kappa_a * c * c + Scalar(4) * kappa_a * c * d * center_freq) /
                          (Scalar(4) * center_freq * center_freq);
        return closed_form::quadratic_count(A1, A2, A5);
    }

    // Far-angle approximation 2 kappa_a / |theta| + 1
    template <typename Scalar>
    Scalar near_field_threshold_approx(const PathParams<Scalar> &path, Scalar kappa_a)
    {
        return Scalar(2) * kappa_a / std::abs(path.sine_angle()) + Scalar(1);
    }

    // Lower and upper bounds over the angle for each boundary
    template <typename Scalar>
    struct BoundaryBounds
    {
        Scalar antenna_near_lower, antenna_near_upper;        // N_wn
        Limit<Scalar> freq_near_lower, freq_near_upper;       // B_wn
        Scalar threshold_lower, threshold_upper;              // N~
        Limit<Scalar> freq_far_lower, freq_far_upper;         // B_wf
        Scalar antenna_far_lower;                             // N_wf
        Limit<Scalar> antenna_far_upper;
    };

    template <typename Scalar>
    BoundaryBounds<Scalar> boundary_bounds(const ArrayGeometry<Scalar> &geom, Scalar bandwidth, Scalar d,
                                           const SquintThresholds<Scalar> &thr)
    {
        const Scalar c = geom.wave_speed(), fc = geom.center_freq(), lambda = geom.wavelength(), kappa = thr.total();
        const Scalar Nm1 = Scalar(geom.num_antennas() - 1);
        const auto A = boundary_coefficients(bandwidth, Scalar(0), d, fc, thr, c);

        BoundaryBounds<Scalar> b{};
        b.antenna_near_lower = Scalar(4) * kappa * fc / bandwidth + Scalar(1);
        b.antenna_near_upper = std::sqrt(A.A1 * A.A3) / A.A1 + Scalar(1);
        if (Nm1 > Scalar(0))
        {
            b.freq_near_lower = Limit<Scalar>::finite(Scalar(4) * kappa * fc / Nm1);
            // 4 kappa c / (sqrt(lambda^2 (N-1)^2 + 16 d^2) - 4 d)
            const Scalar s2 = lambda * lambda * Nm1 * Nm1;
            b.freq_near_upper = Limit<Scalar>::finite(Scalar(4) * kappa * c * (std::sqrt(s2 + Scalar(16) * d * d) + Scalar(4) * d) / s2);
        }
        else
        {
            b.freq_near_lower = Limit<Scalar>::unbounded();
            b.freq_near_upper = Limit<Scalar>::unbounded();
        }
        b.threshold_lower = Scalar(2) * thr.kappa_a() + Scalar(1);
        b.threshold_upper = std::sqrt(A.A1 * A.A5) / A.A1 + Scalar(1);
        b.freq_far_lower = b.freq_near_lower;
        b.freq_far_upper = Limit<Scalar>::unbounded();
        b.antenna_far_lower = b.antenna_near_lower;
        b.antenna_far_upper = Limit<Scalar>::unbounded();
        return b;
    }

    template <typename Scalar>
    struct BoundaryReport
    {
        Limit<Scalar> freq_boundary_near;
        Scalar antenna_boundary_near;
        Limit<Scalar> freq_boundary_far;
        Limit<Scalar> antenna_boundary_far;
        Scalar near_field_threshold;
        BoundaryBounds<Scalar> bounds;
        BoundaryCoefficients<Scalar> coeffs;
    };

    template <typename Scalar>
    BoundaryReport<Scalar> boundary_report(const ArrayGeometry<Scalar> &geom, Scalar bandwidth,
                                           const PathParams<Scalar> &path, const SquintThresholds<Scalar> &thr)
    {
        const Scalar fc = geom.center_freq(), c = geom.wave_speed();
        BoundaryReport<Scalar> r{freq_boundary(geom, path, thr, FieldMode::Near),
                                 antenna_boundary(bandwidth, path, fc, thr, FieldMode::Near, c).value(),
                                 freq_boundary(geom, path, thr, FieldMode::Far),
                                 antenna_boundary(bandwidth, path, fc, thr, FieldMode::Far, c),
                                 near_field_threshold(path, fc, thr.kappa_a(), c),
                                 boundary_bounds(geom, bandwidth, path.scatterer_distance(), thr),
                                 boundary_coefficients(bandwidth, path.sine_angle(), path.scatterer_distance(), fc, thr, c)};
        return r;
    }

    template <typename Scalar>
    PathModel classify_path(const ArrayGeometry<Scalar> &geom, const CarrierGrid<Scalar> &grid,
                            const PathParams<Scalar> &path, const SquintThresholds<Scalar> &thr)
    {
        const Scalar N = Scalar(geom.num_antennas()), B = grid.bandwidth();
        const Limit<Scalar> bwn = freq_boundary(geom, path, thr, FieldMode::Near);
        bool wideband = !bwn.admits(B);
        if (B > Scalar(0))
            wideband = wideband || N >= antenna_boundary(B, path, geom.center_freq(), thr, FieldMode::Near,
                                                         geom.wave_speed()).value();
        if (wideband)
            return PathModel::WN;
        if (N < near_field_threshold(path, geom.center_freq(), thr.kappa_a(), geom.wave_speed()))
            return PathModel::NF;
        return PathModel::NN;
    }

    // kappa_f c / max |r + d - mean(r + d)| over the user's near-field paths
    template <typename Scalar>
    Limit<Scalar> subband_phase_limit(const std::vector<PathParams<Scalar>> &paths, Scalar kappa_f,
                                      Scalar wave_speed = speed_of_light<Scalar>)
    {
        std::vector<Scalar> D;
        for (const auto &p : paths)
            if (is_near(p.model()))
                D.push_back(p.total_distance());
        if (D.empty())
            throw std::invalid_argument("subband_phase_limit: no near-field path");
        Scalar mean = Scalar(0);
        for (Scalar v : D)
            mean += v;
        mean /= Scalar(D.size());
        Scalar dev = Scalar(0);
        for (Scalar v : D)
            dev = std::max(dev, std::abs(v - mean));
        return closed_form::bandwidth_limit(kappa_f, wave_speed, dev);
    }

    // ---- brute-force oracle --------------------------------------------
    //
    // These walk every antenna and subcarrier and use the unwrapped phase
    // 2 pi delta_m df Dd_n / c, never the closed-form maxima above.

    namespace oracle
    {
        template <typename Scalar>
        Scalar max_abs_distance_variation(const ArrayGeometry<Scalar> &geom, const PathParams<Scalar> &path, FieldMode mode)
        {
            const RVector<Scalar> dd = squint_distances(geom, path, mode);
            return dd.cwiseAbs().maxCoeff();
        }

        // Largest |2 pi delta_m df| / c over the grid, scanned subcarrier by subcarrier
        template <typename Scalar>
        Scalar max_grid_phase_rate(const CarrierGrid<Scalar> &grid, Scalar wave_speed)
        {
            Scalar best = Scalar(0);
            for (Index m = 0; m < grid.num_subcarriers(); ++m)
                best = std::max(best, std::abs(grid.offset(m)));
            return Scalar(2) * pi<Scalar> * grid.subcarrier_spacing() * best / wave_speed;
        }

        // max over (n, m) of |a delta_m Dd_n|; the modulus of a product splits into the two maxima
        template <typename Scalar>
        Scalar max_squint_phase(const ArrayGeometry<Scalar> &geom, const CarrierGrid<Scalar> &grid,
                                const PathParams<Scalar> &path, FieldMode mode)
        {
            return max_grid_phase_rate(grid, geom.wave_speed()) * max_abs_distance_variation(geom, path, mode);
        }

        // Largest N whose grid squint phase stays below the threshold
        template <typename Scalar>
        Index largest_compliant_antennas(Scalar bandwidth, Index num_subcarriers, const PathParams<Scalar> &path,
                                         Scalar center_freq, const SquintThresholds<Scalar> &thr,
                                         Scalar wave_speed = speed_of_light<Scalar>)
        {
            const Scalar rate = max_grid_phase_rate(CarrierGrid<Scalar>(num_subcarriers, bandwidth), wave_speed);
            auto ok = [&](Index N) {
                const ArrayGeometry<Scalar> g(N, center_freq, wave_speed);
                return rate * max_abs_distance_variation(g, path, FieldMode::Near) < thr.phase_limit();
            };
            if (!ok(1))
                return 0;
            Index lo = 1, hi = 2;
            while (ok(hi))
            {
                lo = hi;
                hi *= 2;
                if (hi > (Index(1) << 40))
                    throw std::runtime_error("largest_compliant_antennas: no finite boundary");
            }
            while (hi - lo > 1)
            {
                const Index mid = lo + (hi - lo) / 2;
                (ok(mid) ? lo : hi) = mid;
            }
            return lo;
        }

        // Smallest N whose center-frequency phase variation reaches kappa_a pi
        template <typename Scalar>
        Index smallest_near_field_antennas(const PathParams<Scalar> &path, Scalar center_freq, Scalar kappa_a,
                                           Scalar wave_speed = speed_of_light<Scalar>)
        {
            auto reaches = [&](Index N) {
                const ArrayGeometry<Scalar> g(N, center_freq, wave_speed);
                const RVector<Scalar> dd = distance_variation(g, path);
                return g.wavenumber() * dd.cwiseAbs().maxCoeff() >= kappa_a * pi<Scalar>;
            };
            Index lo = 1, hi = 2;
            while (!reaches(hi))
            {
                lo = hi;
                hi *= 2;
            }
            while (hi - lo > 1)
            {
                const Index mid = lo + (hi - lo) / 2;
                (reaches(mid) ? hi : lo) = mid;
            }
            return reaches(lo) ? lo : hi;
        }
    }
}

#endif
