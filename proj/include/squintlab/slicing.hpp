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

#ifndef SQUINTLAB_SLICING_HPP
#define SQUINTLAB_SLICING_HPP

// Antenna-domain subarray planning and frequency-domain sub-band allocation.

#include "squintlab/boundaries.hpp"
#include "squintlab/precoding.hpp"
#include "squintlab/wavefield.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace squintlab
{
    using Path = PathParams<double>;
    using Geometry = ArrayGeometry<double>;
    using Grid = CarrierGrid<double>;
    using Thresholds = SquintThresholds<double>;

    // Scenario cannot be planned within the boundaries
    class InfeasibleError : public std::runtime_error
    {
    public:
        InfeasibleError(const std::string &what, std::vector<Limit<double>> caps = {})
            : std::runtime_error(what), caps_(std::move(caps))
        {
        }
        const std::vector<Limit<double>> &caps() const { return caps_; }

    private:
        std::vector<Limit<double>> caps_;
    };

    struct SlicingPlan
    {
        ArrayPartition partition;
        std::vector<Index> path_assignment; // t' per subarray: rank of the near-field path by descending |g|, zero-based
        std::vector<Index> path_index;      // position of that path in the input list
        bool compliant = true;              // every subarray inside its [N~, floor(N_wn)] window

        Index num_subarrays() const { return partition.num_subarrays(); }
        const std::vector<Index> &subarray_sizes() const { return partition.sizes(); }
        std::vector<double> offsets() const;
    };

    enum class SubarraySizing
    {
        GreedyMax, // round-robin, each subarray as large as its path allows
        Uniform    // fewest equal subarrays that fit every window
    };

    struct SlicingPolicy
    {
        SubarraySizing sizing = SubarraySizing::GreedyMax;
    };

    // Admissible size range of a subarray serving one path
    struct SubarrayWindow
    {
        Index min_size; // ceil(N~)
        Index max_size; // floor(N_wn), at least 1
    };

    // Indices of near-field paths, strongest first (stable for ties)
    std::vector<Index> near_paths_by_power(const std::vector<Path> &paths);

    SubarrayWindow subarray_window(const Path &path, double bandwidth, double center_freq, const Thresholds &thr,
                                   double wave_speed = speed_of_light<double>);

    SlicingPlan plan_antenna_slices(const Geometry &geom, const Grid &grid, const std::vector<Path> &paths,
                                    const Thresholds &thr, const SlicingPolicy &policy = {});

    // Plan with fixed sizes and the cyclic assignment t' = t mod L_N
    SlicingPlan make_slicing_plan(const std::vector<Path> &paths, std::vector<Index> sizes);

    // Plan-level conveniences
    ChannelTensor<double> subarray_channel(const Geometry &geom, const Grid &grid, const std::vector<Path> &paths,
                                           const SlicingPlan &plan, Index t);
    CVector<double> analog_slice_precoder(const Geometry &geom, const std::vector<Path> &paths, const SlicingPlan &plan, Index t);
    PrecoderSet<double> antenna_slicing_precoders(const ChannelTensor<double> &channel, const SlicingPlan &plan);

    struct SubbandPlan
    {
        std::vector<double> user_bandwidths; // B_s,k in Hz
        std::vector<Index> user_subcarriers; // M_s,k
        std::vector<double> user_centers;    // f~_c,k in Hz
        std::vector<Index> first_subcarrier; // index of the user's first subcarrier in the full grid
        std::vector<Limit<double>> caps;     // per-user bandwidth caps used by the allocator (empty if none)
        double subcarrier_spacing = 0;

        Index num_users() const { return Index(user_subcarriers.size()); }
        Grid user_grid(Index k) const { return Grid::from_spacing(user_subcarriers.at(std::size_t(k)), subcarrier_spacing); }
    };

    enum class SubbandSharing
    {
        EqualShare,
        ProportionalPower // start from shares proportional to sum |g|^2
    };

    struct SubbandPolicy
    {
        Index num_subarrays = 8; // T; each user sees N_s = N / T antennas per subarray
        SubbandSharing sharing = SubbandSharing::EqualShare;
    };

    // min over the user's near-field paths of B_wn(N_s), and the delay-spread limit
    std::vector<Limit<double>> subband_caps(const std::vector<std::vector<Path>> &users, const Geometry &geom,
                                            const Thresholds &thr, Index subarray_size);

    SubbandPlan allocate_subbands(const std::vector<std::vector<Path>> &users, const Geometry &geom, const Grid &grid,
                                  const Thresholds &thr, const SubbandPolicy &policy = {});

    // Equal split ignoring caps
    SubbandPlan equal_share_subbands(const Geometry &geom, const Grid &grid, Index num_users);

    // {"subarrays":[{"size","path","offset"}...], "subbands":[{"bandwidth_hz","subcarriers","center_hz"}...]}
    std::string plans_to_json(const std::optional<SlicingPlan> &slices, const std::optional<SubbandPlan> &subbands,
                              int indent = 2);
}

#endif
