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

#ifndef SQUINTLAB_PRECODING_HPP
#define SQUINTLAB_PRECODING_HPP

// Hybrid precoders (block-diagonal analog stage + per-subcarrier digital MRT)
// and the spectral-efficiency / array-gain metrics built on them.
//
// The received amplitude on subcarrier m is f_D,m^H F^H h_m; only its modulus
// enters the metrics, so the conjugation convention does not matter.

#include "squintlab/wavefield.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace squintlab
{
    enum class Scheme
    {
        FullArrayMRT,
        OptimalPerSubcarrier,
        AntennaSlicing,
        SubbandSlicing,
        NarrowbandBaseline
    };

    inline const char *to_string(Scheme s)
    {
        switch (s)
        {
        case Scheme::FullArrayMRT:
            return "full_array_mrt";
        case Scheme::OptimalPerSubcarrier:
            return "se_opt";
        case Scheme::AntennaSlicing:
            return "antenna_slicing";
        case Scheme::SubbandSlicing:
            return "subband_slicing";
        default:
            return "narrowband_mrt";
        }
    }

    // Channel orthogonal to every analog beam on one subcarrier
    class DegenerateSubcarrier : public std::runtime_error
    {
    public:
        DegenerateSubcarrier() : std::runtime_error("digital_mrt: channel is orthogonal to all analog beams") {}
    };

    template <typename Scalar>
    class PrecoderSet
    {
    public:
        // analog[t] has partition.size(t) unit-modulus entries; digital is T x M
        PrecoderSet(ArrayPartition partition, std::vector<CVector<Scalar>> analog, CMatrix<Scalar> digital, Scheme scheme)
            : part_(std::move(partition)), analog_(std::move(analog)), digital_(std::move(digital)), scheme_(scheme)
        {
            if (Index(analog_.size()) != part_.num_subarrays() || digital_.rows() != part_.num_subarrays())
                throw std::invalid_argument("PrecoderSet: analog blocks, digital rows and partition disagree");
            for (Index t = 0; t < part_.num_subarrays(); ++t)
            {
                if (analog_[std::size_t(t)].size() != part_.size(t))
                    throw std::invalid_argument("PrecoderSet: analog block size mismatch");
                if (((analog_[std::size_t(t)].cwiseAbs().array() - Scalar(1)).abs() > Scalar(1e-9)).any())
                    throw std::invalid_argument("PrecoderSet: analog entries must have unit modulus");
            }
        }

        const ArrayPartition &partition() const { return part_; }
        const std::vector<CVector<Scalar>> &analog_blocks() const { return analog_; }
        const CMatrix<Scalar> &digital() const { return digital_; }
        Scheme scheme() const { return scheme_; }

        Index num_antennas() const { return part_.num_antennas(); }
        Index num_rf_chains() const { return part_.num_subarrays(); }
        Index num_subcarriers() const { return digital_.cols(); }

        // Dense N x T block-diagonal analog matrix
        CMatrix<Scalar> analog_matrix() const
        {
            CMatrix<Scalar> F = CMatrix<Scalar>::Zero(num_antennas(), num_rf_chains());
            for (Index t = 0; t < num_rf_chains(); ++t)
                F.col(t).segment(part_.first(t), part_.size(t)) = analog_[std::size_t(t)];
            return F;
        }

        // F f_D,m
        CVector<Scalar> effective(Index m) const
        {
            CVector<Scalar> x(num_antennas());
            for (Index t = 0; t < num_rf_chains(); ++t)
                x.segment(part_.first(t), part_.size(t)) = analog_[std::size_t(t)] * digital_(t, m);
            return x;
        }

        // f_D,m^H F^H h
        template <typename Derived>
        Complex<Scalar> response(const Eigen::MatrixBase<Derived> &h, Index m) const
        {
            Complex<Scalar> acc(0);
            for (Index t = 0; t < num_rf_chains(); ++t)
            {
                const Complex<Scalar> y = analog_[std::size_t(t)].dot(h.segment(part_.first(t), part_.size(t)));
                acc += std::conj(digital_(t, m)) * y;
            }
            return acc;
        }

    private:
        ArrayPartition part_;
        std::vector<CVector<Scalar>> analog_;
        CMatrix<Scalar> digital_;
        Scheme scheme_;
    };

    // ---- analog stages -------------------------------------------------

    template <typename Scalar>
    CVector<Scalar> phase_only(const CVector<Scalar> &v)
    {
        return v.unaryExpr([](const Complex<Scalar> &z) { return phasor(std::arg(z)); });
    }

    // (1/sqrt(N)) w(theta, d)
    template <typename Scalar>
    CVector<Scalar> mrt_full_array(const ArrayGeometry<Scalar> &geom, const PathParams<Scalar> &path)
    {
        return near_field_steering(geom, path) / std::sqrt(Scalar(geom.num_antennas()));
    }

    // (1/sqrt(N)) w .* q(m): matched to the single-path channel on subcarrier m
    template <typename Scalar>
    CVector<Scalar> optimal_receiver(const ArrayGeometry<Scalar> &geom, const CarrierGrid<Scalar> &grid,
                                     const PathParams<Scalar> &path, Index m)
    {
        if (m < 0 || m >= grid.num_subcarriers())
            throw std::out_of_range("optimal_receiver: subcarrier index out of range");
        const Scalar f = grid.frequency(m, geom.center_freq());
        const Scalar a = Scalar(2) * pi<Scalar> * f / geom.wave_speed();
        return distance_variation(geom, path).unaryExpr([a](Scalar v) { return phasor(a * v); }) /
               std::sqrt(Scalar(geom.num_antennas()));
    }

    // Phases of the far-field terms plus the assigned near-field path on subarray t.
    // The near-field term is the full-array steering vector restricted to the
    // subarray, i.e. g e^{jk(d_as,t - d)} w_as,t.
    template <typename Scalar>
    CVector<Scalar> analog_slice_precoder(const ArrayGeometry<Scalar> &geom, const std::vector<PathParams<Scalar>> &paths,
                                          const ArrayPartition &part, Index near_path, Index t)
    {
        if (near_path < 0 || near_path >= Index(paths.size()) || !is_near(paths[std::size_t(near_path)].model()))
            throw std::invalid_argument("analog_slice_precoder: assigned path must be a near-field path of the list");
        const auto &pn = paths[std::size_t(near_path)];
        CVector<Scalar> Bt = pn.gain() * subarray_relocation(geom, pn, part, t) * subarray_steering(geom, pn, part, t);
        for (const auto &p : paths)
            if (p.model() == PathModel::NF)
                Bt += p.gain() * subarray_far_steering(geom, p.sine_angle(), part, t);
        return phase_only(Bt);
    }

    // Phases of sum_l g_l e^{j 2pi (f~ - f_c)(r+d)/c} times the near-field steering at f~ on subarray t
    template <typename Scalar>
    CVector<Scalar> analog_subband_precoder(const ArrayGeometry<Scalar> &geom, const std::vector<PathParams<Scalar>> &user_paths,
                                            Scalar subband_center, const ArrayPartition &part, Index t)
    {
        detail::check_subarray(part, geom.num_antennas(), t);
        const Scalar a = Scalar(2) * pi<Scalar> / geom.wave_speed();
        const Scalar fc = geom.center_freq();
        CVector<Scalar> C = CVector<Scalar>::Zero(part.size(t));
        bool any = false;
        for (const auto &p : user_paths)
        {
            if (!is_near(p.model()))
                continue;
            any = true;
            const Complex<Scalar> lead = p.gain() * phasor(a * (subband_center - fc) * p.total_distance());
            for (Index i = 0; i < part.size(t); ++i)
            {
                const Scalar dd = distance_difference(p.scatterer_distance(), p.sine_angle(), geom.position(part.first(t) + i), Scalar(0));
                C[i] += lead * phasor(a * subband_center * dd);
            }
        }
        if (!any)
            throw std::invalid_argument("analog_subband_precoder: user has no near-field path");
        return phase_only(C);
    }

    // ---- digital stage --------------------------------------------------

    // F^H h / ||F F^H h||, with ||F F^H h|| = sqrt(sum_t N_t |f_t^H h_t|^2)
    template <typename Scalar, typename Derived>
    CVector<Scalar> digital_mrt(const Eigen::MatrixBase<Derived> &h, const ArrayPartition &part,
                                const std::vector<CVector<Scalar>> &analog)
    {
        if (h.size() != part.num_antennas() || Index(analog.size()) != part.num_subarrays())
            throw std::invalid_argument("digital_mrt: dimension mismatch");
        CVector<Scalar> y(part.num_subarrays());
        Scalar den2 = Scalar(0);
        for (Index t = 0; t < part.num_subarrays(); ++t)
        {
            y[t] = analog[std::size_t(t)].dot(h.segment(part.first(t), part.size(t)));
            den2 += Scalar(part.size(t)) * std::norm(y[t]);
        }
        const Scalar den = std::sqrt(den2);
        if (!(den > std::numeric_limits<Scalar>::min()))
            throw DegenerateSubcarrier();
        return y / den;
    }

    // Digital MRT on every subcarrier; degenerate subcarriers get a unit-power vector on subarray 0
    template <typename Scalar>
    PrecoderSet<Scalar> hybrid_precoders(const CMatrix<Scalar> &H, ArrayPartition part, std::vector<CVector<Scalar>> analog,
                                         Scheme scheme)
    {
        CMatrix<Scalar> D(part.num_subarrays(), H.cols());
        for (Index m = 0; m < H.cols(); ++m)
        {
            try
            {
                D.col(m) = digital_mrt<Scalar>(H.col(m), part, analog);
            }
            catch (const DegenerateSubcarrier &)
            {
                D.col(m).setZero();
                D(0, m) = Complex<Scalar>(Scalar(1) / std::sqrt(Scalar(part.size(0))));
            }
        }
        return PrecoderSet<Scalar>(std::move(part), std::move(analog), std::move(D), scheme);
    }

    // Narrowband MRT toward one path on every subcarrier
    template <typename Scalar>
    PrecoderSet<Scalar> full_array_mrt_precoders(const ArrayGeometry<Scalar> &geom, Index num_subcarriers,
                                                 const PathParams<Scalar> &path, Scheme scheme = Scheme::NarrowbandBaseline)
    {
        const Index N = geom.num_antennas();
        CMatrix<Scalar> D = CMatrix<Scalar>::Constant(1, num_subcarriers, Complex<Scalar>(Scalar(1) / std::sqrt(Scalar(N))));
        return PrecoderSet<Scalar>(ArrayPartition({N}), {near_field_steering(geom, path)}, std::move(D), scheme);
    }

    // Fully digital per-subcarrier MRT: N single-antenna chains
    template <typename Scalar>
    PrecoderSet<Scalar> optimal_precoders(const CMatrix<Scalar> &H)
    {
        const Index N = H.rows();
        std::vector<CVector<Scalar>> analog(std::size_t(N), CVector<Scalar>::Ones(1));
        CMatrix<Scalar> D(N, H.cols());
        for (Index m = 0; m < H.cols(); ++m)
        {
            const Scalar nrm = H.col(m).norm();
            if (nrm > std::numeric_limits<Scalar>::min())
                D.col(m) = H.col(m) / nrm;
            else
            {
                D.col(m).setZero();
                D(0, m) = Complex<Scalar>(1);
            }
        }
        return PrecoderSet<Scalar>(ArrayPartition(std::vector<Index>(std::size_t(N), 1)), std::move(analog), std::move(D),
                                   Scheme::OptimalPerSubcarrier);
    }

    template <typename Scalar>
    PrecoderSet<Scalar> antenna_slicing_precoders(const ChannelTensor<Scalar> &channel, const ArrayPartition &part,
                                                  const std::vector<Index> &assigned_path)
    {
        if (Index(assigned_path.size()) != part.num_subarrays())
            throw std::invalid_argument("antenna_slicing_precoders: one assigned path per subarray required");
        std::vector<CVector<Scalar>> analog;
        for (Index t = 0; t < part.num_subarrays(); ++t)
            analog.push_back(analog_slice_precoder(channel.geometry(), channel.paths(), part, assigned_path[std::size_t(t)], t));
        return hybrid_precoders(channel.entries(), part, std::move(analog), Scheme::AntennaSlicing);
    }

    // H is the user's N x M_s sub-band channel
    template <typename Scalar>
    PrecoderSet<Scalar> subband_slicing_precoders(const ArrayGeometry<Scalar> &geom, const CMatrix<Scalar> &H,
                                                  const std::vector<PathParams<Scalar>> &user_paths, Scalar subband_center,
                                                  const ArrayPartition &part)
    {
        std::vector<CVector<Scalar>> analog;
        for (Index t = 0; t < part.num_subarrays(); ++t)
            analog.push_back(analog_subband_precoder(geom, user_paths, subband_center, part, t));
        return hybrid_precoders(H, part, std::move(analog), Scheme::SubbandSlicing);
    }

    // ---- metrics ---------------------------------------------------------

    // |sum_n q(m)_n| / N for the near-field squint column of one path
    template <typename Scalar>
    Scalar normalized_array_gain(const ArrayGeometry<Scalar> &geom, const CarrierGrid<Scalar> &grid,
                                 const PathParams<Scalar> &path, Index m)
    {
        if (m < 0 || m >= grid.num_subcarriers())
            throw std::out_of_range("normalized_array_gain: subcarrier index out of range");
        const Scalar a = Scalar(2) * pi<Scalar> * grid.offset(m) * grid.subcarrier_spacing() / geom.wave_speed();
        Complex<Scalar> acc(0);
        const RVector<Scalar> dd = distance_variation(geom, path);
        for (Index n = 0; n < dd.size(); ++n)
            acc += phasor(a * dd[n]);
        return std::abs(acc) / Scalar(geom.num_antennas());
    }

    // |sum_l e^{j dw_l} |g_l|^2| / sqrt(sum_l |g_l|^2), dw_l = 2pi delta df (r_l + d_l - mean) / c
    // The normalization is kept exactly as defined; the value is not bounded by 1.
    template <typename Scalar>
    Scalar multiuser_gain(const std::vector<PathParams<Scalar>> &user_paths, const CarrierGrid<Scalar> &subband, Index m,
                          Scalar wave_speed = speed_of_light<Scalar>)
    {
        if (user_paths.empty())
            throw std::invalid_argument("multiuser_gain: path list is empty");
        Scalar mean = Scalar(0), pow = Scalar(0);
        for (const auto &p : user_paths)
        {
            mean += p.total_distance();
            pow += std::norm(p.gain());
        }
        mean /= Scalar(user_paths.size());
        const Scalar a = Scalar(2) * pi<Scalar> * subband.offset(m) * subband.subcarrier_spacing() / wave_speed;
        Complex<Scalar> acc(0);
        for (const auto &p : user_paths)
            acc += std::norm(p.gain()) * phasor(a * (p.total_distance() - mean));
        return std::abs(acc) / std::sqrt(pow);
    }

    // |f_D,m^H F^H h_m|^2 for every subcarrier
    template <typename Scalar>
    RVector<Scalar> received_power_gains(const CMatrix<Scalar> &H, const PrecoderSet<Scalar> &pre)
    {
        if (H.rows() != pre.num_antennas() || H.cols() != pre.num_subcarriers())
            throw std::invalid_argument("spectral_efficiency: channel and precoder dimensions differ");
        RVector<Scalar> g(H.cols());
        for (Index m = 0; m < H.cols(); ++m)
            g[m] = std::norm(pre.response(H.col(m), m));
        return g;
    }

    template <typename Scalar>
    RVector<Scalar> spectral_efficiency_per_subcarrier(const CMatrix<Scalar> &H, const PrecoderSet<Scalar> &pre, Scalar P,
                                                       Scalar sigma2)
    {
        if (!(P >= Scalar(0)) || !(sigma2 > Scalar(0)))
            throw std::invalid_argument("spectral_efficiency: power must be non-negative and noise positive");
        return received_power_gains(H, pre).unaryExpr([&](Scalar g) { return std::log2(Scalar(1) + P * g / sigma2); });
    }

    // Mean over subcarriers, summed in ascending m
    template <typename Scalar>
    Scalar mean_ascending(const RVector<Scalar> &v)
    {
        Scalar acc = Scalar(0);
        for (Index i = 0; i < v.size(); ++i)
            acc += v[i];
        return acc / Scalar(v.size());
    }

    template <typename Scalar>
    Scalar spectral_efficiency(const CMatrix<Scalar> &H, const PrecoderSet<Scalar> &pre, Scalar P, Scalar sigma2)
    {
        return mean_ascending(spectral_efficiency_per_subcarrier(H, pre, P, sigma2));
    }

    template <typename Scalar>
    Scalar spectral_efficiency(const ChannelTensor<Scalar> &channel, const PrecoderSet<Scalar> &pre, Scalar P, Scalar sigma2)
    {
        return spectral_efficiency(channel.entries(), pre, P, sigma2);
    }

    // Sub-band schemes: average over each user's own subcarriers, then over users
    template <typename Scalar>
    Scalar spectral_efficiency(const std::vector<CMatrix<Scalar>> &user_channels, const std::vector<PrecoderSet<Scalar>> &pre,
                               Scalar P, Scalar sigma2)
    {
        if (user_channels.empty() || user_channels.size() != pre.size())
            throw std::invalid_argument("spectral_efficiency: one precoder set per user required");
        Scalar acc = Scalar(0);
        for (std::size_t k = 0; k < user_channels.size(); ++k)
            acc += spectral_efficiency(user_channels[k], pre[k], P, sigma2);
        return acc / Scalar(user_channels.size());
    }

    // Fully digital upper bound: log2(1 + P ||h_m||^2 / sigma2) per subcarrier
    template <typename Scalar>
    RVector<Scalar> optimal_spectral_efficiency_per_subcarrier(const CMatrix<Scalar> &H, Scalar P, Scalar sigma2)
    {
        RVector<Scalar> se(H.cols());
        for (Index m = 0; m < H.cols(); ++m)
            se[m] = std::log2(Scalar(1) + P * H.col(m).squaredNorm() / sigma2);
        return se;
    }

    template <typename Scalar>
    Scalar optimal_spectral_efficiency(const CMatrix<Scalar> &H, Scalar P, Scalar sigma2)
    {
        return mean_ascending(optimal_spectral_efficiency_per_subcarrier(H, P, sigma2));
    }

    // 10 log10(P |g|^2 / sigma2)
    template <typename Scalar>
    Scalar snr_db(Scalar P, Scalar gain_abs, Scalar sigma2)
    {
        return Scalar(10) * std::log10(P * gain_abs * gain_abs / sigma2);
    }

    // Transmit power giving the requested SNR
    template <typename Scalar>
    Scalar power_for_snr_db(Scalar snr, Scalar gain_abs, Scalar sigma2)
    {
        return std::pow(Scalar(10), snr / Scalar(10)) * sigma2 / (gain_abs * gain_abs);
    }

    // Closed-form SE approximations, used as cross-check oracles
    namespace se_closed_form
    {
        // Orthogonal paths: log2(1 + P (sum |g_t|^2 N_t^2)^2 / (sum |g_t|^2 N_t^3 sigma2))
        template <typename Scalar>
        Scalar antenna_slicing(const std::vector<Index> &sizes, const std::vector<Scalar> &gain_abs, Scalar P, Scalar sigma2)
        {
            if (sizes.size() != gain_abs.size() || sizes.empty())
                throw std::invalid_argument("se_closed_form::antenna_slicing: one gain per subarray required");
            Scalar num = Scalar(0), den = Scalar(0);
            for (std::size_t t = 0; t < sizes.size(); ++t)
            {
                const Scalar g2 = gain_abs[t] * gain_abs[t], Nt = Scalar(sizes[t]);
                num += g2 * Nt * Nt;
                den += g2 * Nt * Nt * Nt;
            }
            return std::log2(Scalar(1) + P * num * num / (den * sigma2));
        }

        // Equal sizes N/T: log2(1 + P N sum_t |g_t|^2 / (T sigma2))
        template <typename Scalar>
        Scalar antenna_slicing_equal(Index N, const std::vector<Scalar> &gain_abs, Scalar P, Scalar sigma2)
        {
            Scalar s = Scalar(0);
            for (Scalar g : gain_abs)
                s += g * g;
            return std::log2(Scalar(1) + P * Scalar(N) * s / (Scalar(gain_abs.size()) * sigma2));
        }

        // One user: per-subcarrier sums of entry magnitudes on each subarray block
        // block_magnitude_sums is T x M_s with entry (t, m) = sum_n |[H_t]_{n,m}|
        template <typename Scalar>
        Scalar subband_user(const RMatrix<Scalar> &block_magnitude_sums, Index Ns, Scalar P, Scalar sigma2)
        {
            Scalar acc = Scalar(0);
            for (Index m = 0; m < block_magnitude_sums.cols(); ++m)
            {
                const Scalar s2 = block_magnitude_sums.col(m).squaredNorm();
                acc += std::log2(Scalar(1) + P * s2 * s2 / (Scalar(Ns) * s2 * sigma2));
            }
            return acc / Scalar(block_magnitude_sums.cols());
        }

        // Average over users of subband_user
        template <typename Scalar>
        Scalar subband_slicing(const std::vector<RMatrix<Scalar>> &users, Index Ns, Scalar P, Scalar sigma2)
        {
            Scalar acc = Scalar(0);
            for (const auto &u : users)
                acc += subband_user(u, Ns, P, sigma2);
            return acc / Scalar(users.size());
        }

        // Single path per user with common |g|: reduces to log2(1 + P N |g|^2 / sigma2)
        template <typename Scalar>
        Scalar subband_single_path(Index N, Index T, Scalar gain_abs, Scalar P, Scalar sigma2)
        {
            return antenna_slicing_equal(N, std::vector<Scalar>(std::size_t(T), gain_abs), P, sigma2);
        }

        // Per-subarray magnitude sums of a user's channel
        template <typename Scalar>
        RMatrix<Scalar> block_magnitude_sums(const CMatrix<Scalar> &H, const ArrayPartition &part)
        {
            RMatrix<Scalar> S(part.num_subarrays(), H.cols());
            for (Index t = 0; t < part.num_subarrays(); ++t)
                S.row(t) = H.middleRows(part.first(t), part.size(t)).cwiseAbs().colwise().sum();
            return S;
        }
    }
}

#endif
