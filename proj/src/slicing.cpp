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

#include "squintlab/slicing.hpp"

#include <json.hpp>

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <sstream>

namespace squintlab
{
    std::vector<double> SlicingPlan::offsets() const
    {
        std::vector<double> o;
        for (Index t = 0; t < partition.num_subarrays(); ++t)
            o.push_back(partition.offset(t));
        return o;
    }

    std::vector<Index> near_paths_by_power(const std::vector<Path> &paths)
    {
        std::vector<Index> idx;
        for (Index i = 0; i < Index(paths.size()); ++i)
            if (is_near(paths[std::size_t(i)].model()))
                idx.push_back(i);
        std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
            return std::abs(paths[std::size_t(a)].gain()) > std::abs(paths[std::size_t(b)].gain());
        });
        return idx;
    }

    SubarrayWindow subarray_window(const Path &path, double bandwidth, double center_freq, const Thresholds &thr,
                                   double wave_speed)
    {
        const double nt = near_field_threshold(path, center_freq, thr.kappa_a(), wave_speed);
        const double nb = antenna_boundary(bandwidth, path, center_freq, thr, FieldMode::Near, wave_speed).value();
        SubarrayWindow w;
        w.min_size = Index(std::ceil(nt));
        w.max_size = std::max<Index>(1, Index(std::floor(nb)));
        return w;
    }

    namespace
    {
        struct PlanContext
        {
            std::vector<Index> near;
            std::vector<SubarrayWindow> windows;
        };

        PlanContext plan_context(const Geometry &geom, const Grid &grid, const std::vector<Path> &paths, const Thresholds &thr)
        {
            PlanContext ctx;
            ctx.near = near_paths_by_power(paths);
            if (ctx.near.empty())
                throw std::invalid_argument("plan_antenna_slices: at least one near-field path required");
            for (Index i : ctx.near)
                ctx.windows.push_back(subarray_window(paths[std::size_t(i)], grid.bandwidth(), geom.center_freq(), thr,
                                                      geom.wave_speed()));
            return ctx;
        }

        SlicingPlan assemble(const PlanContext &ctx, std::vector<Index> sizes)
        {
            const Index L = Index(ctx.near.size());
            std::vector<Index> rank, index;
            bool compliant = true;
            for (Index t = 0; t < Index(sizes.size()); ++t)
            {
                const Index r = t % L;
                rank.push_back(r);
                index.push_back(ctx.near[std::size_t(r)]);
                const auto &w = ctx.windows[std::size_t(r)];
                if (sizes[std::size_t(t)] < w.min_size || sizes[std::size_t(t)] > w.max_size)
                    compliant = false;
            }
            return SlicingPlan{ArrayPartition(std::move(sizes)), std::move(rank), std::move(index), compliant};
        }

        std::vector<Index> greedy_sizes(const PlanContext &ctx, Index N)
        {
            const Index L = Index(ctx.near.size());
            std::vector<Index> sizes;
            Index remaining = N;
            for (Index t = 0; remaining > 0; ++t)
            {
                const auto &w = ctx.windows[std::size_t(t % L)];
                Index size = std::min(w.max_size, remaining);
                const Index rest = remaining - size;
                if (rest > 0)
                {
                    // a runt below the next window: borrow from this subarray, else merge
                    const Index need = ctx.windows[std::size_t((t + 1) % L)].min_size;
                    if (rest < need)
                    {
                        const Index deficit = need - rest;
                        if (size - deficit >= w.min_size)
                            size -= deficit;
                        else
                            size = remaining;
                    }
                }
                sizes.push_back(size);
                remaining -= size;
            }
            return sizes;
        }

        std::vector<Index> uniform_sizes(const PlanContext &ctx, Index N)
        {
            const Index L = Index(ctx.near.size());
            for (Index T = 1; T <= N; ++T)
            {
                std::vector<Index> sizes(std::size_t(T), N / T);
                for (Index t = 0; t < N % T; ++t)
                    ++sizes[std::size_t(t)];
                bool fits = true;
                for (Index t = 0; t < T && fits; ++t)
                {
                    const auto &w = ctx.windows[std::size_t(t % L)];
                    fits = sizes[std::size_t(t)] >= w.min_size && sizes[std::size_t(t)] <= w.max_size;
                }
                if (fits)
                    return sizes;
            }
            throw InfeasibleError("plan_antenna_slices: no uniform split fits every subarray window");
        }
    }

    SlicingPlan plan_antenna_slices(const Geometry &geom, const Grid &grid, const std::vector<Path> &paths,
                                    const Thresholds &thr, const SlicingPolicy &policy)
    {
        const PlanContext ctx = plan_context(geom, grid, paths, thr);
        const Index N = geom.num_antennas();
        const double nt = near_field_threshold(paths[std::size_t(ctx.near[0])], geom.center_freq(), thr.kappa_a(),
                                               geom.wave_speed());
        if (double(N) < nt)
        {
            std::ostringstream os;
            os << "plan_antenna_slices: " << N << " antennas cannot host a near-field subarray (threshold " << nt << ")";
            throw InfeasibleError(os.str());
        }
        if (policy.sizing == SubarraySizing::Uniform)
            return assemble(ctx, uniform_sizes(ctx, N));
        return assemble(ctx, greedy_sizes(ctx, N));
    }

    SlicingPlan make_slicing_plan(const std::vector<Path> &paths, std::vector<Index> sizes)
    {
        PlanContext ctx;
        ctx.near = near_paths_by_power(paths);
        if (ctx.near.empty())
            throw std::invalid_argument("make_slicing_plan: at least one near-field path required");
        // windows are unknown without a bandwidth; mark every size admissible
        ctx.windows.assign(ctx.near.size(), SubarrayWindow{1, std::numeric_limits<Index>::max()});
        return assemble(ctx, std::move(sizes));
    }

    ChannelTensor<double> subarray_channel(const Geometry &geom, const Grid &grid, const std::vector<Path> &paths,
                                           const SlicingPlan &plan, Index t)
    {
        return subarray_channel(geom, grid, paths, plan.partition, t);
    }

    CVector<double> analog_slice_precoder(const Geometry &geom, const std::vector<Path> &paths, const SlicingPlan &plan, Index t)
    {
        return analog_slice_precoder(geom, paths, plan.partition, plan.path_index.at(std::size_t(t)), t);
    }

    PrecoderSet<double> antenna_slicing_precoders(const ChannelTensor<double> &channel, const SlicingPlan &plan)
    {
        return antenna_slicing_precoders(channel, plan.partition, plan.path_index);
    }

    // ---- sub-bands ----------------------------------------------------------

    std::vector<Limit<double>> subband_caps(const std::vector<std::vector<Path>> &users, const Geometry &geom,
                                            const Thresholds &thr, Index subarray_size)
    {
        const Geometry gs = geom.resized(subarray_size);
        std::vector<Limit<double>> caps;
        for (const auto &u : users)
        {
            Limit<double> cap = subband_phase_limit(u, thr.kappa_f(), geom.wave_speed());
            for (const auto &p : u)
                if (is_near(p.model()))
                    cap = min(cap, freq_boundary(gs, p, thr, FieldMode::Near));
            caps.push_back(cap);
        }
        return caps;
    }

    namespace
    {
        SubbandPlan build_subband_plan(const Geometry &geom, const Grid &grid, const std::vector<Index> &counts)
        {
            SubbandPlan plan;
            const double df = grid.subcarrier_spacing();
            plan.subcarrier_spacing = df;
            double lower = geom.center_freq() - grid.bandwidth() / 2.0;
            Index first = 0;
            for (Index Mk : counts)
            {
                const double Bk = double(Mk) * df;
                plan.user_subcarriers.push_back(Mk);
                plan.user_bandwidths.push_back(Bk);
                plan.user_centers.push_back(lower + Bk / 2.0);
                plan.first_subcarrier.push_back(first);
                lower += Bk;
                first += Mk;
            }
            return plan;
        }

        std::string caps_message(const std::vector<Limit<double>> &caps, double B)
        {
            std::ostringstream os;
            os << "allocate_subbands: per-user caps cannot cover " << B << " Hz [";
            for (std::size_t k = 0; k < caps.size(); ++k)
            {
                if (k)
                    os << ", ";
                if (caps[k].bounded())
                    os << caps[k].value();
                else
                    os << "unbounded";
            }
            os << "]";
            return os.str();
        }
    }

    SubbandPlan allocate_subbands(const std::vector<std::vector<Path>> &users, const Geometry &geom, const Grid &grid,
                                  const Thresholds &thr, const SubbandPolicy &policy)
    {
        const Index K = Index(users.size());
        const Index M = grid.num_subcarriers();
        const Index N = geom.num_antennas();
        if (K < 1)
            throw std::invalid_argument("allocate_subbands: at least one user required");
        if (policy.num_subarrays < 1 || N % policy.num_subarrays != 0)
            throw std::invalid_argument("allocate_subbands: subarray count must divide the antenna count");
        const double df = grid.subcarrier_spacing();

        const auto caps = subband_caps(users, geom, thr, N / policy.num_subarrays);
        std::vector<Index> cap_m;
        Index total = 0;
        for (const auto &c : caps)
        {
            Index cm = M;
            if (c.bounded())
                cm = std::min<Index>(M, Index(std::floor(c.value() / df)));
            cap_m.push_back(cm);
            total += cm;
        }
        if (K > M || total < M || *std::min_element(cap_m.begin(), cap_m.end()) < 1)
            throw InfeasibleError(caps_message(caps, grid.bandwidth()), caps);

        std::vector<Index> share(static_cast<std::size_t>(K));
        if (policy.sharing == SubbandSharing::ProportionalPower)
        {
            std::vector<double> w;
            double ws = 0;
            for (const auto &u : users)
            {
                double s = 0;
                for (const auto &p : u)
                    s += std::norm(p.gain());
                w.push_back(s);
                ws += s;
            }
            for (Index k = 0; k < K; ++k)
                share[std::size_t(k)] = 1 + (ws > 0 ? Index(std::floor(double(M - K) * w[std::size_t(k)] / ws)) : (M - K) / K);
        }
        else
            std::fill(share.begin(), share.end(), M / K);

        std::vector<Index> alloc(static_cast<std::size_t>(K));
        Index used = 0;
        for (Index k = 0; k < K; ++k)
        {
            alloc[std::size_t(k)] = std::min(share[std::size_t(k)], cap_m[std::size_t(k)]);
            used += alloc[std::size_t(k)];
        }
        for (Index k = 0; used < M; k = (k + 1) % K)
            if (alloc[std::size_t(k)] < cap_m[std::size_t(k)])
            {
                ++alloc[std::size_t(k)];
                ++used;
            }

        SubbandPlan plan = build_subband_plan(geom, grid, alloc);
        plan.caps = caps;
        return plan;
    }

    SubbandPlan equal_share_subbands(const Geometry &geom, const Grid &grid, Index num_users)
    {
        const Index M = grid.num_subcarriers();
        if (num_users < 1 || num_users > M)
            throw std::invalid_argument("equal_share_subbands: need 1 <= users <= subcarriers");
        std::vector<Index> counts(std::size_t(num_users), M / num_users);
        for (Index k = 0; k < M % num_users; ++k)
            ++counts[std::size_t(k)];
        return build_subband_plan(geom, grid, counts);
    }

    std::string plans_to_json(const std::optional<SlicingPlan> &slices, const std::optional<SubbandPlan> &subbands, int indent)
    {
        nlohmann::ordered_json j;
        j["subarrays"] = nlohmann::ordered_json::array();
        j["subbands"] = nlohmann::ordered_json::array();
        if (slices)
        {
            for (Index t = 0; t < slices->num_subarrays(); ++t)
                j["subarrays"].push_back({{"size", slices->partition.size(t)},
                                          {"path", slices->path_assignment[std::size_t(t)]},
                                          {"offset", slices->partition.offset(t)},
                                          {"path_index", slices->path_index[std::size_t(t)]}});
            j["compliant"] = slices->compliant;
        }
        if (subbands)
        {
            for (Index k = 0; k < subbands->num_users(); ++k)
            {
                nlohmann::ordered_json e{{"bandwidth_hz", subbands->user_bandwidths[std::size_t(k)]},
                                         {"subcarriers", subbands->user_subcarriers[std::size_t(k)]},
                                         {"center_hz", subbands->user_centers[std::size_t(k)]},
                                         {"first_subcarrier", subbands->first_subcarrier[std::size_t(k)]}};
                if (!subbands->caps.empty())
                {
                    const auto &c = subbands->caps[std::size_t(k)];
                    if (c.bounded())
                        e["cap_hz"] = c.value();
                    else
                        e["cap_hz"] = "unbounded";
                }
                j["subbands"].push_back(e);
            }
        }
        return j.dump(indent);
    }
}
