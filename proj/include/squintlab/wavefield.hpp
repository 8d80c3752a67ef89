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

#ifndef SQUINTLAB_WAVEFIELD_HPP
#define SQUINTLAB_WAVEFIELD_HPP

// Array and OFDM geometry, steering vectors, beam squint matrices and
// wideband hybrid-field channel synthesis for a uniform linear array.
//
// Conventions
// - All phases are written with exp(+j ...).
// - Antenna and subcarrier indices are zero-based. The antenna offset is
//   delta_N(n) = n - (N-1)/2 and the subcarrier offset is delta_M(m) = m - (M-1)/2.
// - The planar limit of the spherical distance variation is -delta*s*theta, and
//   the far-field steering vector uses that same sign.

#include "squintlab/constants.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace squintlab
{
    enum class PathModel
    {
        WN, // wideband near-field
        NN, // narrowband near-field
        NF  // narrowband far-field
    };

    enum class ModelTag
    {
        WN,
        NN,
        NF,
        Hybrid
    };

    enum class FieldMode
    {
        Near,
        Far
    };

    inline const char *to_string(PathModel m)
    {
        switch (m)
        {
        case PathModel::WN:
            return "WN";
        case PathModel::NN:
            return "NN";
        default:
            return "NF";
        }
    }

    inline bool is_near(PathModel m) { return m != PathModel::NF; }

    // Uniform linear array
    template <typename Scalar>
    class ArrayGeometry
    {
    public:
        // Half-wavelength spacing at the center frequency
        ArrayGeometry(Index num_antennas, Scalar center_freq, Scalar wave_speed = speed_of_light<Scalar>)
            : ArrayGeometry(num_antennas, center_freq, wave_speed / (Scalar(2) * center_freq), wave_speed, 0)
        {
        }

        static ArrayGeometry with_spacing(Index num_antennas, Scalar center_freq, Scalar spacing,
                                          Scalar wave_speed = speed_of_light<Scalar>)
        {
            return ArrayGeometry(num_antennas, center_freq, spacing, wave_speed, 0);
        }

        Index num_antennas() const { return N_; }
        Scalar spacing() const { return s_; }
        Scalar center_freq() const { return fc_; }
        Scalar wave_speed() const { return c_; }
        Scalar wavelength() const { return c_ / fc_; }
        Scalar wavenumber() const { return Scalar(2) * pi<Scalar> * fc_ / c_; }

        // Offset of antenna n from the array center in units of the spacing
        Scalar offset(Index n) const { return Scalar(n) - Scalar(N_ - 1) / Scalar(2); }
        Scalar position(Index n) const { return offset(n) * s_; }

        RVector<Scalar> offsets() const
        {
            return RVector<Scalar>::LinSpaced(N_, Scalar(0), Scalar(N_ - 1)).array() - Scalar(N_ - 1) / Scalar(2);
        }

        // Same carrier and spacing with a different antenna count
        ArrayGeometry resized(Index num_antennas) const { return ArrayGeometry(num_antennas, fc_, s_, c_, 0); }

    private:
        ArrayGeometry(Index N, Scalar fc, Scalar s, Scalar c, int) : N_(N), s_(s), fc_(fc), c_(c)
        {
            if (N < 1)
                throw std::invalid_argument("ArrayGeometry: num_antennas must be positive");
            if (!(fc > Scalar(0)) || !(s > Scalar(0)) || !(c > Scalar(0)))
                throw std::invalid_argument("ArrayGeometry: center_freq, spacing and wave_speed must be positive");
        }

        Index N_;
        Scalar s_;
        Scalar fc_;
        Scalar c_;
    };

    // OFDM subcarrier grid, centered on the carrier
    template <typename Scalar>
    class CarrierGrid
    {
    public:
        CarrierGrid(Index num_subcarriers, Scalar bandwidth)
            : CarrierGrid(num_subcarriers, bandwidth / Scalar(num_subcarriers > 0 ? num_subcarriers : 1), 0)
        {
        }

        static CarrierGrid from_spacing(Index num_subcarriers, Scalar subcarrier_spacing)
        {
            return CarrierGrid(num_subcarriers, subcarrier_spacing, 0);
        }

        Index num_subcarriers() const { return M_; }
        Scalar subcarrier_spacing() const { return df_; }
        Scalar bandwidth() const { return Scalar(M_) * df_; }

        Scalar offset(Index m) const { return Scalar(m) - Scalar(M_ - 1) / Scalar(2); }
        Scalar frequency(Index m, Scalar center) const { return center + offset(m) * df_; }

        RVector<Scalar> offsets() const
        {
            return RVector<Scalar>::LinSpaced(M_, Scalar(0), Scalar(M_ - 1)).array() - Scalar(M_ - 1) / Scalar(2);
        }

    private:
        CarrierGrid(Index M, Scalar df, int) : M_(M), df_(df)
        {
            if (M < 1)
                throw std::invalid_argument("CarrierGrid: num_subcarriers must be positive");
            if (!(df >= Scalar(0)) || !std::isfinite(df))
                throw std::invalid_argument("CarrierGrid: subcarrier spacing must be non-negative");
        }

        Index M_;
        Scalar df_;
    };

    // One propagation path: UE -> scatterer -> array
    template <typename Scalar>
    class PathParams
    {
    public:
        // From the complex path gain g
        static PathParams from_gain(Complex<Scalar> gain, Scalar sine_angle, Scalar scatterer_distance, Scalar ue_range,
                                    PathModel model, Scalar center_freq, bool line_of_sight = false,
                                    Scalar wave_speed = speed_of_light<Scalar>)
        {
            PathParams p(sine_angle, scatterer_distance, ue_range, model, line_of_sight);
            const Scalar k = Scalar(2) * pi<Scalar> * center_freq / wave_speed;
            p.g_ = gain;
            p.rho_ = gain * phasor(-k * (ue_range + scatterer_distance));
            return p;
        }

        // From the large-scale loss amplitude rho, g = rho * exp(+j k (r + d))
        static PathParams from_loss(Complex<Scalar> loss_amp, Scalar sine_angle, Scalar scatterer_distance, Scalar ue_range,
                                    PathModel model, Scalar center_freq, bool line_of_sight = false,
                                    Scalar wave_speed = speed_of_light<Scalar>)
        {
            PathParams p(sine_angle, scatterer_distance, ue_range, model, line_of_sight);
            const Scalar k = Scalar(2) * pi<Scalar> * center_freq / wave_speed;
            p.rho_ = loss_amp;
            p.g_ = loss_amp * phasor(k * (ue_range + scatterer_distance));
            return p;
        }

        Complex<Scalar> gain() const { return g_; }
        Complex<Scalar> loss_amp() const { return rho_; }
        Scalar sine_angle() const { return theta_; }
        Scalar angle() const { return std::asin(theta_); }
        Scalar scatterer_distance() const { return d_; }
        Scalar ue_range() const { return r_; }
        Scalar total_distance() const { return r_ + d_; }
        PathModel model() const { return model_; }
        bool is_line_of_sight() const { return los_; }

        PathParams with_model(PathModel m) const
        {
            PathParams p = *this;
            p.model_ = m;
            return p;
        }

        // Replaces g and rho by the same factor
        PathParams scaled(Complex<Scalar> factor) const
        {
            PathParams p = *this;
            p.g_ *= factor;
            p.rho_ *= factor;
            return p;
        }

    private:
        PathParams(Scalar theta, Scalar d, Scalar r, PathModel model, bool los)
            : theta_(theta), d_(d), r_(r), model_(model), los_(los)
        {
            if (!(std::abs(theta) < Scalar(1)))
                throw std::invalid_argument("PathParams: sine angle must lie in (-1, 1)");
            if (!(d > Scalar(0)) || !std::isfinite(d))
                throw std::invalid_argument("PathParams: scatterer distance must be positive");
            if (!(r >= Scalar(0)) || !std::isfinite(r))
                throw std::invalid_argument("PathParams: UE range must be non-negative");
            if (r == Scalar(0) && !los)
                throw std::invalid_argument("PathParams: zero UE range is reserved for the line-of-sight path");
            if (los && r != Scalar(0))
                throw std::invalid_argument("PathParams: the line-of-sight path has zero UE range");
        }

        Complex<Scalar> g_{1};
        Complex<Scalar> rho_{1};
        Scalar theta_;
        Scalar d_;
        Scalar r_;
        PathModel model_;
        bool los_;
    };

    // N x M channel matrix with the paths it was built from
    template <typename Scalar>
    class ChannelTensor
    {
    public:
        ChannelTensor(CMatrix<Scalar> entries, ArrayGeometry<Scalar> geometry, CarrierGrid<Scalar> grid,
                      std::vector<PathParams<Scalar>> paths, ModelTag model_tag)
            : H_(std::move(entries)), geom_(geometry), grid_(grid), paths_(std::move(paths)), tag_(model_tag)
        {
            if (H_.rows() != geom_.num_antennas() || H_.cols() != grid_.num_subcarriers())
                throw std::invalid_argument("ChannelTensor: entries do not match geometry x grid");
        }

        const CMatrix<Scalar> &entries() const { return H_; }
        const ArrayGeometry<Scalar> &geometry() const { return geom_; }
        const CarrierGrid<Scalar> &grid() const { return grid_; }
        const std::vector<PathParams<Scalar>> &paths() const { return paths_; }
        ModelTag model_tag() const { return tag_; }

        Index num_antennas() const { return H_.rows(); }
        Index num_subcarriers() const { return H_.cols(); }
        auto column(Index m) const { return H_.col(m); }

    private:
        CMatrix<Scalar> H_;
        ArrayGeometry<Scalar> geom_;
        CarrierGrid<Scalar> grid_;
        std::vector<PathParams<Scalar>> paths_;
        ModelTag tag_;
    };

    // ---- distances -------------------------------------------------------

    // Distance from a scatterer at (d, theta) to a point at signed position x along the array
    template <typename Scalar>
    inline Scalar distance_to_position(Scalar d, Scalar theta, Scalar x)
    {
        return std::sqrt(d * d - Scalar(2) * d * x * theta + x * x);
    }

    // distance(x) - distance(x0), written to avoid cancellation at large d
    template <typename Scalar>
    inline Scalar distance_difference(Scalar d, Scalar theta, Scalar x, Scalar x0)
    {
        const Scalar num = (x * x - x0 * x0) - Scalar(2) * d * theta * (x - x0);
        const Scalar den = distance_to_position(d, theta, x) + distance_to_position(d, theta, x0);
        return num / den;
    }

    template <typename Scalar>
    Scalar scatterer_antenna_distance(const ArrayGeometry<Scalar> &geom, const PathParams<Scalar> &path, Index n)
    {
        if (n < 0 || n >= geom.num_antennas())
            throw std::out_of_range("scatterer_antenna_distance: antenna index out of range");
        return distance_to_position(path.scatterer_distance(), path.sine_angle(), geom.position(n));
    }

    // Delta d_n = d_n - d for every antenna
    template <typename Scalar>
    RVector<Scalar> distance_variation(const ArrayGeometry<Scalar> &geom, const PathParams<Scalar> &path)
    {
        RVector<Scalar> dd(geom.num_antennas());
        for (Index n = 0; n < geom.num_antennas(); ++n)
            dd[n] = distance_difference(path.scatterer_distance(), path.sine_angle(), geom.position(n), Scalar(0));
        return dd;
    }

    // ---- steering vectors ------------------------------------------------

    template <typename Scalar>
    RVector<Scalar> subcarrier_frequencies(const CarrierGrid<Scalar> &grid, Scalar center)
    {
        return (grid.offsets() * grid.subcarrier_spacing()).array() + center;
    }

    // Spherical-wave steering vector at the center frequency
    template <typename Scalar>
    CVector<Scalar> near_field_steering(const ArrayGeometry<Scalar> &geom, const PathParams<Scalar> &path)
    {
        const Scalar k = geom.wavenumber();
        return distance_variation(geom, path).unaryExpr([k](Scalar v) { return phasor(k * v); });
    }

    // Planar-wave steering vector, element n = exp(-j k delta_n s theta)
    template <typename Scalar>
    CVector<Scalar> far_field_steering(const ArrayGeometry<Scalar> &geom, Scalar sine_angle)
    {
        const Scalar a = -geom.wavenumber() * geom.spacing() * sine_angle;
        return geom.offsets().unaryExpr([a](Scalar v) { return phasor(a * v); });
    }

    template <typename Scalar>
    CVector<Scalar> delay_steering(const CarrierGrid<Scalar> &grid, const PathParams<Scalar> &path,
                                   Scalar wave_speed = speed_of_light<Scalar>)
    {
        const Scalar a = Scalar(2) * pi<Scalar> * grid.subcarrier_spacing() * path.total_distance() / wave_speed;
        return grid.offsets().unaryExpr([a](Scalar v) { return phasor(a * v); });
    }

    // Per-antenna path-length term that multiplies the frequency offset
    template <typename Scalar>
    RVector<Scalar> squint_distances(const ArrayGeometry<Scalar> &geom, const PathParams<Scalar> &path, FieldMode mode)
    {
        if (mode == FieldMode::Near)
            return distance_variation(geom, path);
        return -geom.offsets() * (geom.spacing() * path.sine_angle());
    }

    // Entry (n, m) = exp(+j 2 pi delta_m df Dd_n / c)
    template <typename Scalar>
    CMatrix<Scalar> beam_squint_matrix(const ArrayGeometry<Scalar> &geom, const CarrierGrid<Scalar> &grid,
                                       const PathParams<Scalar> &path, FieldMode mode)
    {
        const RVector<Scalar> dd = squint_distances(geom, path, mode);
        const RVector<Scalar> df = grid.offsets() * grid.subcarrier_spacing();
        const Scalar a = Scalar(2) * pi<Scalar> / geom.wave_speed();
        return (dd * df.transpose()).unaryExpr([a](Scalar v) { return phasor(a * v); });
    }

    // ---- channel synthesis -----------------------------------------------

    // Contribution of one path over a set of array positions
    // x: antenna positions in meters, x_ref: position the steering phase is referenced to
    // df: subcarrier frequencies minus the carrier, in Hz
    template <typename Scalar>
    CMatrix<Scalar> path_response_at(const ArrayGeometry<Scalar> &geom, const RVector<Scalar> &df,
                                     const PathParams<Scalar> &path, const RVector<Scalar> &x, Scalar x_ref)
    {
        const Index Nx = x.size();
        const Index M = df.size();
        const Scalar a = Scalar(2) * pi<Scalar> / geom.wave_speed();
        const Scalar fc = geom.center_freq();
        const Scalar d = path.scatterer_distance();
        const Scalar theta = path.sine_angle();
        const Scalar D = path.total_distance();

        RVector<Scalar> steer(Nx), squint(Nx);
        for (Index n = 0; n < Nx; ++n)
        {
            if (path.model() == PathModel::NF)
            {
                steer[n] = -x[n] * theta;
                squint[n] = 0;
            }
            else
            {
                steer[n] = distance_difference(d, theta, x[n], x_ref);
                squint[n] = path.model() == PathModel::WN ? distance_difference(d, theta, x[n], Scalar(0)) : Scalar(0);
            }
        }

        CMatrix<Scalar> H(Nx, M);
        for (Index m = 0; m < M; ++m)
            for (Index n = 0; n < Nx; ++n)
                H(n, m) = path.gain() * phasor(a * (df[m] * D + fc * steer[n] + df[m] * squint[n]));
        return H;
    }

    inline bool tag_admits(ModelTag tag, PathModel m)
    {
        switch (tag)
        {
        case ModelTag::WN:
            return m == PathModel::WN;
        case ModelTag::NN:
            return m == PathModel::NN;
        case ModelTag::NF:
            return m == PathModel::NF;
        default:
            return true;
        }
    }

    template <typename Scalar>
    ChannelTensor<Scalar> synth_channel(const ArrayGeometry<Scalar> &geom, const CarrierGrid<Scalar> &grid,
                                        const std::vector<PathParams<Scalar>> &paths, ModelTag model_tag)
    {
        if (paths.empty())
            throw std::invalid_argument("synth_channel: path list is empty");
        for (const auto &p : paths)
            if (!tag_admits(model_tag, p.model()))
                throw std::invalid_argument(std::string("synth_channel: path model ") + to_string(p.model()) +
                                            " is not allowed under this model tag");

        const RVector<Scalar> x = geom.offsets() * geom.spacing();
        const RVector<Scalar> df = grid.offsets() * grid.subcarrier_spacing();
        CMatrix<Scalar> H = CMatrix<Scalar>::Zero(geom.num_antennas(), grid.num_subcarriers());
        for (const auto &p : paths)
            H += path_response_at(geom, df, p, x, Scalar(0));
        return ChannelTensor<Scalar>(std::move(H), geom, grid, paths, model_tag);
    }

    // Channel on a sub-band grid centered at subband_center instead of the carrier.
    // Equals the matching columns of the full-band channel.
    template <typename Scalar>
    ChannelTensor<Scalar> synth_subband_channel(const ArrayGeometry<Scalar> &geom, const CarrierGrid<Scalar> &subband,
                                                Scalar subband_center, const std::vector<PathParams<Scalar>> &paths,
                                                ModelTag model_tag)
    {
        if (paths.empty())
            throw std::invalid_argument("synth_subband_channel: path list is empty");
        for (const auto &p : paths)
            if (!tag_admits(model_tag, p.model()))
                throw std::invalid_argument("synth_subband_channel: path model not allowed under this model tag");

        const RVector<Scalar> x = geom.offsets() * geom.spacing();
        const RVector<Scalar> df = (subband.offsets() * subband.subcarrier_spacing()).array() + (subband_center - geom.center_freq());
        CMatrix<Scalar> H = CMatrix<Scalar>::Zero(geom.num_antennas(), subband.num_subcarriers());
        for (const auto &p : paths)
            H += path_response_at(geom, df, p, x, Scalar(0));
        return ChannelTensor<Scalar>(std::move(H), geom, subband, paths, model_tag);
    }

    // ---- subarrays --------------------------------------------------------

    // Consecutive, non-overlapping subarrays covering the full array
    class ArrayPartition
    {
    public:
        explicit ArrayPartition(std::vector<Index> sizes) : sizes_(std::move(sizes))
        {
            if (sizes_.empty())
                throw std::invalid_argument("ArrayPartition: at least one subarray required");
            first_.reserve(sizes_.size());
            Index acc = 0;
            for (Index s : sizes_)
            {
                if (s < 1)
                    throw std::invalid_argument("ArrayPartition: subarray sizes must be positive");
                first_.push_back(acc);
                acc += s;
            }
            total_ = acc;
        }

        static ArrayPartition uniform(Index num_antennas, Index num_subarrays)
        {
            if (num_subarrays < 1 || num_antennas % num_subarrays != 0)
                throw std::invalid_argument("ArrayPartition::uniform: subarray count must divide the antenna count");
            return ArrayPartition(std::vector<Index>(std::size_t(num_subarrays), num_antennas / num_subarrays));
        }

        Index num_subarrays() const { return Index(sizes_.size()); }
        Index num_antennas() const { return total_; }
        Index size(Index t) const { return sizes_.at(std::size_t(t)); }
        Index first(Index t) const { return first_.at(std::size_t(t)); }
        const std::vector<Index> &sizes() const { return sizes_; }

        // Subarray center relative to the array center, in units of the spacing
        double offset(Index t) const
        {
            return -double(total_) / 2.0 + double(first(t)) + double(size(t)) / 2.0;
        }

    private:
        std::vector<Index> sizes_;
        std::vector<Index> first_;
        Index total_ = 0;
    };

    namespace detail
    {
        inline void check_subarray(const ArrayPartition &part, Index N, Index t)
        {
            if (part.num_antennas() != N)
                throw std::invalid_argument("subarray: partition does not cover the array");
            if (t < 0 || t >= part.num_subarrays())
                throw std::out_of_range("subarray: index out of range");
        }

        template <typename Scalar>
        RVector<Scalar> subarray_positions(const ArrayGeometry<Scalar> &geom, const ArrayPartition &part, Index t)
        {
            const Index Nt = part.size(t);
            RVector<Scalar> x(Nt);
            for (Index i = 0; i < Nt; ++i)
                x[i] = geom.position(part.first(t) + i);
            return x;
        }
    }

    // Distance from the scatterer to the center of subarray t
    template <typename Scalar>
    Scalar subarray_reference_distance(const ArrayGeometry<Scalar> &geom, const PathParams<Scalar> &path,
                                       const ArrayPartition &part, Index t)
    {
        detail::check_subarray(part, geom.num_antennas(), t);
        const Scalar x0 = Scalar(part.offset(t)) * geom.spacing();
        return distance_to_position(path.scatterer_distance(), path.sine_angle(), x0);
    }

    // Spherical steering vector of subarray t, referenced to the subarray center
    template <typename Scalar>
    CVector<Scalar> subarray_steering(const ArrayGeometry<Scalar> &geom, const PathParams<Scalar> &path,
                                      const ArrayPartition &part, Index t)
    {
        detail::check_subarray(part, geom.num_antennas(), t);
        const Scalar x0 = Scalar(part.offset(t)) * geom.spacing();
        const Scalar k = geom.wavenumber();
        const Scalar d = path.scatterer_distance(), theta = path.sine_angle();
        return detail::subarray_positions(geom, part, t).unaryExpr(
            [&](Scalar x) { return phasor(k * distance_difference(d, theta, x, x0)); });
    }

    // Rows of the full-array planar steering vector that belong to subarray t
    template <typename Scalar>
    CVector<Scalar> subarray_far_steering(const ArrayGeometry<Scalar> &geom, Scalar sine_angle,
                                          const ArrayPartition &part, Index t)
    {
        detail::check_subarray(part, geom.num_antennas(), t);
        return far_field_steering(geom, sine_angle).segment(part.first(t), part.size(t));
    }

    // Phase that moves a near-field block from the subarray reference to the array reference
    template <typename Scalar>
    Complex<Scalar> subarray_relocation(const ArrayGeometry<Scalar> &geom, const PathParams<Scalar> &path,
                                        const ArrayPartition &part, Index t)
    {
        if (!is_near(path.model()))
            return Complex<Scalar>(1);
        const Scalar x0 = Scalar(part.offset(t)) * geom.spacing();
        return phasor(geom.wavenumber() *
                      distance_difference(path.scatterer_distance(), path.sine_angle(), x0, Scalar(0)));
    }

    // Channel of subarray t. Near-field steering is referenced to the subarray center,
    // the squint term and far-field rows keep the full-array reference.
    template <typename Scalar>
    ChannelTensor<Scalar> subarray_channel(const ArrayGeometry<Scalar> &geom, const CarrierGrid<Scalar> &grid,
                                           const std::vector<PathParams<Scalar>> &paths, const ArrayPartition &part,
                                           Index t)
    {
        detail::check_subarray(part, geom.num_antennas(), t);
        if (paths.empty())
            throw std::invalid_argument("subarray_channel: path list is empty");
        const RVector<Scalar> x = detail::subarray_positions(geom, part, t);
        const Scalar x0 = Scalar(part.offset(t)) * geom.spacing();
        const RVector<Scalar> df = grid.offsets() * grid.subcarrier_spacing();
        CMatrix<Scalar> H = CMatrix<Scalar>::Zero(part.size(t), grid.num_subcarriers());
        for (const auto &p : paths)
            H += path_response_at(geom, df, p, x, is_near(p.model()) ? x0 : Scalar(0));
        return ChannelTensor<Scalar>(std::move(H), geom.resized(part.size(t)), grid, paths, ModelTag::Hybrid);
    }
}

#endif
