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

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace squintlab
{
    // ---- configuration --------------------------------------------------

    double ScenarioConfig::snr_linear() const { return std::pow(10.0, snr_db / 10.0); }

    void ScenarioConfig::validate() const
    {
        auto need = [](bool ok, const char *msg) {
            if (!ok)
                throw std::invalid_argument(std::string("ScenarioConfig: ") + msg);
        };
        need(n >= 1, "n must be positive");
        need(m >= 1, "m must be positive");
        need(fc > 0, "fc must be positive");
        need(b > 0, "b must be positive");
        need(l_n >= 1, "l_n must be positive");
        need(l_f >= 0, "l_f must be non-negative");
        need(k >= 1, "k must be positive");
        need(t >= 1, "t must be positive");
        need(kappa_a > 0 && kappa_a <= 1 && kappa_f > 0 && kappa_f <= 1, "kappa values must lie in (0, 1]");
        need(trials >= 1, "trials must be positive");
        need(std::abs(theta) < 1, "theta must lie in (-1, 1)");
        need(d > 0 && r > 0, "d and r must be positive");
        need(d_min > 0 && d_max >= d_min, "need 0 < d_min <= d_max");
        need(std::isfinite(snr_db) && std::isfinite(far_power_offset_db), "snr_db and far_power_offset_db must be finite");
    }

    ScenarioConfig apply_quick(ScenarioConfig cfg)
    {
        cfg.m = 64;
        cfg.trials = 100;
        cfg.quick = true;
        return cfg;
    }

    namespace
    {
        using json = nlohmann::ordered_json;

        enum class Kind
        {
            Int,
            Real,
            Seed,
            Flag,
            List
        };

        struct Field
        {
            const char *name;
            Kind kind;
            void *(*ptr)(ScenarioConfig &);
        };

#define SQL_FIELD(member, kind) \
    Field { #member, kind, [](ScenarioConfig &c) -> void * { return &c.member; } }

        const std::vector<Field> &fields()
        {
            static const std::vector<Field> f = {
                SQL_FIELD(n, Kind::Int),
                SQL_FIELD(fc, Kind::Real),
                SQL_FIELD(b, Kind::Real),
                SQL_FIELD(m, Kind::Int),
                SQL_FIELD(l_n, Kind::Int),
                SQL_FIELD(l_f, Kind::Int),
                SQL_FIELD(k, Kind::Int),
                SQL_FIELD(t, Kind::Int),
                SQL_FIELD(kappa_a, Kind::Real),
                SQL_FIELD(kappa_f, Kind::Real),
                SQL_FIELD(snr_db, Kind::Real),
                SQL_FIELD(trials, Kind::Int),
                SQL_FIELD(seed, Kind::Seed),
                SQL_FIELD(theta, Kind::Real),
                SQL_FIELD(d, Kind::Real),
                SQL_FIELD(r, Kind::Real),
                SQL_FIELD(d_min, Kind::Real),
                SQL_FIELD(d_max, Kind::Real),
                SQL_FIELD(far_power_offset_db, Kind::Real),
                SQL_FIELD(axis, Kind::List),
                SQL_FIELD(quick, Kind::Flag),
            };
            return f;
        }
#undef SQL_FIELD

        const Field &field(const std::string &name)
        {
            for (const auto &f : fields())
                if (name == f.name)
                    return f;
            throw std::invalid_argument("unknown config field: " + name);
        }

        void set_from_json(ScenarioConfig &cfg, const Field &f, const json &v)
        {
            void *p = f.ptr(cfg);
            switch (f.kind)
            {
            case Kind::Int:
                if (!v.is_number_integer())
                    throw std::invalid_argument(std::string("config field ") + f.name + " must be an integer");
                *static_cast<Index *>(p) = v.get<Index>();
                break;
            case Kind::Real:
                if (!v.is_number())
                    throw std::invalid_argument(std::string("config field ") + f.name + " must be a number");
                *static_cast<double *>(p) = v.get<double>();
                break;
            case Kind::Seed:
                if (!v.is_number_unsigned())
                    throw std::invalid_argument("config field seed must be a non-negative integer");
                *static_cast<std::uint64_t *>(p) = v.get<std::uint64_t>();
                break;
            case Kind::Flag:
                if (!v.is_boolean())
                    throw std::invalid_argument(std::string("config field ") + f.name + " must be a boolean");
                *static_cast<bool *>(p) = v.get<bool>();
                break;
            case Kind::List:
                if (!v.is_array())
                    throw std::invalid_argument(std::string("config field ") + f.name + " must be an array");
                *static_cast<std::vector<double> *>(p) = v.get<std::vector<double>>();
                break;
            }
        }

        json get_json(ScenarioConfig &cfg, const Field &f)
        {
            void *p = f.ptr(cfg);
            switch (f.kind)
            {
            case Kind::Int:
                return *static_cast<Index *>(p);
            case Kind::Real:
                return *static_cast<double *>(p);
            case Kind::Seed:
                return *static_cast<std::uint64_t *>(p);
            case Kind::Flag:
                return *static_cast<bool *>(p);
            default:
                return *static_cast<std::vector<double> *>(p);
            }
        }

        double parse_real(const std::string &s, const char *name)
        {
            std::size_t pos = 0;
            double v = 0;
            try
            {
                v = std::stod(s, &pos);
            }
            catch (const std::exception &)
            {
                pos = 0;
            }
            if (pos == 0 || pos != s.size())
                throw std::invalid_argument(std::string("invalid number for ") + name + ": " + s);
            return v;
        }
    }

    const std::vector<std::string> &config_field_names()
    {
        static const std::vector<std::string> names = [] {
            std::vector<std::string> v;
            for (const auto &f : fields())
                v.emplace_back(f.name);
            return v;
        }();
        return names;
    }

    void set_config_field(ScenarioConfig &cfg, const std::string &name, const std::string &value)
    {
        const Field &f = field(name);
        void *p = f.ptr(cfg);
        switch (f.kind)
        {
        case Kind::Int:
        {
            const double v = parse_real(value, f.name);
            if (v != std::floor(v))
                throw std::invalid_argument(std::string("config field ") + f.name + " must be an integer");
            *static_cast<Index *>(p) = Index(v);
            break;
        }
        case Kind::Real:
            *static_cast<double *>(p) = parse_real(value, f.name);
            break;
        case Kind::Seed:
        {
            std::size_t pos = 0;
            std::uint64_t v = 0;
            try
            {
                if (!value.empty() && value[0] != '-')
                    v = std::stoull(value, &pos);
            }
            catch (const std::exception &)
            {
                pos = 0;
            }
            if (pos == 0 || pos != value.size())
                throw std::invalid_argument("invalid seed: " + value);
            *static_cast<std::uint64_t *>(p) = v;
            break;
        }
        case Kind::Flag:
            if (value == "true" || value == "1")
                *static_cast<bool *>(p) = true;
            else if (value == "false" || value == "0")
                *static_cast<bool *>(p) = false;
            else
                throw std::invalid_argument(std::string("invalid boolean for ") + f.name + ": " + value);
            break;
        case Kind::List:
        {
            std::vector<double> out;
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ','))
                out.push_back(parse_real(item, f.name));
            *static_cast<std::vector<double> *>(p) = out;
            break;
        }
        }
    }

    ScenarioConfig config_from_json(const std::string &text, ScenarioConfig base)
    {
        json j;
        try
        {
            j = json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
        }
        if (!j.is_object())
            throw std::invalid_argument("config: top level must be an object");
        for (auto it = j.begin(); it != j.end(); ++it)
            set_from_json(base, field(it.key()), it.value());
        return base;
    }

    std::string config_to_json(const ScenarioConfig &cfg, int indent)
    {
        ScenarioConfig c = cfg;
        json j = json::object();
        for (const auto &f : fields())
            j[f.name] = get_json(c, f);
        return j.dump(indent);
    }

    // ---- random streams and sampling --------------------------------------

    RngStream::RngStream(std::uint64_t master_seed, std::uint64_t substream_id) : seed_(master_seed), id_(substream_id)
    {
        std::seed_seq seq{std::uint32_t(master_seed), std::uint32_t(master_seed >> 32), std::uint32_t(substream_id),
                          std::uint32_t(substream_id >> 32), 0x5eedu};
        eng_.seed(seq);
    }

    double RngStream::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }

    std::complex<double> RngStream::complex_normal()
    {
        const double re = normal_(eng_);
        const double im = normal_(eng_);
        return {re / std::sqrt(2.0), im / std::sqrt(2.0)};
    }

    namespace
    {
        Path draw_path(RngStream &rng, const ScenarioConfig &cfg, PathModel model, double amplitude)
        {
            double theta = rng.uniform(-1.0, 1.0);
            while (!(std::abs(theta) < 1.0))
                theta = rng.uniform(-1.0, 1.0);
            const double d = rng.uniform(cfg.d_min, cfg.d_max);
            const double r = rng.uniform(cfg.d_min, cfg.d_max);
            const std::complex<double> rho = rng.complex_normal() * amplitude;
            return Path::from_loss(rho, theta, d, r, model, cfg.fc);
        }
    }

    std::vector<Path> sample_scenario(const ScenarioConfig &cfg, std::uint64_t trial)
    {
        RngStream rng(cfg.seed, trial);
        const double far_amp = std::pow(10.0, -cfg.far_power_offset_db / 20.0);
        std::vector<Path> paths;
        for (Index l = 0; l < cfg.l_n; ++l)
            paths.push_back(draw_path(rng, cfg, PathModel::WN, 1.0));
        for (Index l = 0; l < cfg.l_f; ++l)
            paths.push_back(draw_path(rng, cfg, PathModel::NF, far_amp));
        return paths;
    }

    std::vector<std::vector<Path>> sample_users(const ScenarioConfig &cfg, std::uint64_t trial)
    {
        RngStream rng(cfg.seed, trial);
        std::vector<std::vector<Path>> users(std::size_t(cfg.k));
        for (auto &u : users)
            for (Index l = 0; l < cfg.l_n; ++l)
                u.push_back(draw_path(rng, cfg, PathModel::WN, 1.0));
        return users;
    }

    // ---- evaluation -------------------------------------------------------

    double SchemeGains::spectral_efficiency(double snr_linear) const
    {
        double acc = 0;
        for (const auto &s : segments)
            acc += mean_ascending<double>(s.unaryExpr([&](double g) { return std::log2(1.0 + snr_linear * g); }));
        return acc / double(segments.size());
    }

    RVector<double> SchemeGains::per_subcarrier(double snr_linear) const
    {
        Index total = 0;
        for (const auto &s : segments)
            total += s.size();
        RVector<double> out(total);
        Index at = 0;
        for (const auto &s : segments)
        {
            out.segment(at, s.size()) = s.unaryExpr([&](double g) { return std::log2(1.0 + snr_linear * g); });
            at += s.size();
        }
        return out;
    }

    namespace
    {
        RVector<double> column_power(const CMatrix<double> &H)
        {
            return H.colwise().squaredNorm().transpose();
        }
    }

    TrialOutcome evaluate_antenna_slicing(const ScenarioConfig &cfg, const std::vector<Path> &paths)
    {
        const Geometry geom = cfg.geometry();
        const Grid grid = cfg.grid();
        const Thresholds thr = cfg.thresholds();
        const auto channel = synth_channel(geom, grid, paths, ModelTag::Hybrid);
        const auto near = near_paths_by_power(paths);
        if (near.empty())
            throw std::invalid_argument("evaluate_antenna_slicing: no near-field path");
        const Path &strongest = paths[std::size_t(near[0])];

        TrialOutcome out;
        const auto baseline = full_array_mrt_precoders(geom, grid.num_subcarriers(), strongest);
        out.schemes["narrowband_mrt"].segments = {received_power_gains(channel.entries(), baseline)};
        try
        {
            const SlicingPlan plan = plan_antenna_slices(geom, grid, paths, thr);
            const auto pre = antenna_slicing_precoders(channel, plan);
            out.schemes["antenna_slicing"].segments = {received_power_gains(channel.entries(), pre)};
            out.subarrays = plan.num_subarrays();
        }
        catch (const InfeasibleError &)
        {
            out.infeasible = true;
            out.subarrays = 1;
            out.schemes["antenna_slicing"] = out.schemes["narrowband_mrt"];
        }
        out.schemes["se_opt"].segments = {column_power(channel.entries())};

        out.b_wn = freq_boundary(geom, strongest, thr, FieldMode::Near);
        out.n_wn = antenna_boundary(grid.bandwidth(), strongest, geom.center_freq(), thr, FieldMode::Near);
        out.b_wf = freq_boundary(geom, strongest, thr, FieldMode::Far);
        out.n_wf = antenna_boundary(grid.bandwidth(), strongest, geom.center_freq(), thr, FieldMode::Far);
        return out;
    }

    TrialOutcome evaluate_subband_slicing(const ScenarioConfig &cfg, const std::vector<std::vector<Path>> &users)
    {
        const Geometry geom = cfg.geometry();
        const Grid grid = cfg.grid();
        const Thresholds thr = cfg.thresholds();
        const Index T = cfg.t;

        TrialOutcome out;
        SubbandPlan plan;
        try
        {
            plan = allocate_subbands(users, geom, grid, thr, SubbandPolicy{T, SubbandSharing::EqualShare});
        }
        catch (const InfeasibleError &)
        {
            out.infeasible = true;
            plan = equal_share_subbands(geom, grid, Index(users.size()));
        }
        const ArrayPartition part = ArrayPartition::uniform(geom.num_antennas(), T);
        const Geometry sub_geom = geom.resized(geom.num_antennas() / T);

        auto &fs = out.schemes["subband_slicing"].segments;
        auto &mrt = out.schemes["narrowband_mrt"].segments;
        auto &opt = out.schemes["se_opt"].segments;
        for (Index k = 0; k < plan.num_users(); ++k)
        {
            const auto &u = users[std::size_t(k)];
            const Grid gk = plan.user_grid(k);
            const double fk = plan.user_centers[std::size_t(k)];
            const CMatrix<double> Hk = synth_subband_channel(geom, gk, fk, u, ModelTag::Hybrid).entries();
            fs.push_back(received_power_gains(Hk, subband_slicing_precoders(geom, Hk, u, fk, part)));
            const auto near = near_paths_by_power(u);
            mrt.push_back(received_power_gains(Hk, full_array_mrt_precoders(geom, gk.num_subcarriers(), u[std::size_t(near.at(0))])));
            opt.push_back(column_power(Hk));
        }
        out.subarrays = T;

        const auto near0 = near_paths_by_power(users.at(0));
        const Path &p0 = users[0][std::size_t(near0.at(0))];
        const double B0 = plan.user_bandwidths[0];
        out.b_wn = freq_boundary(sub_geom, p0, thr, FieldMode::Near);
        out.n_wn = antenna_boundary(B0, p0, geom.center_freq(), thr, FieldMode::Near);
        out.b_wf = freq_boundary(sub_geom, p0, thr, FieldMode::Far);
        out.n_wf = antenna_boundary(B0, p0, geom.center_freq(), thr, FieldMode::Far);
        return out;
    }

    // ---- plumbing ---------------------------------------------------------

    unsigned worker_threads_from_env()
    {
        const char *s = std::getenv("SQUINTLAB_THREADS");
        unsigned n = 0;
        if (s && *s)
        {
            char *end = nullptr;
            const unsigned long v = std::strtoul(s, &end, 10);
            if (end && *end == '\0')
                n = unsigned(v);
        }
        if (n == 0)
            n = std::max(1u, std::thread::hardware_concurrency());
        return n;
    }

    void parallel_for(Index count, unsigned threads, const std::function<void(Index)> &fn)
    {
        if (threads == 0)
            threads = std::max(1u, std::thread::hardware_concurrency());
        if (threads <= 1 || count <= 1)
        {
            for (Index i = 0; i < count; ++i)
                fn(i);
            return;
        }
        std::atomic<Index> next{0};
        std::exception_ptr err;
        std::mutex mu;
        auto work = [&] {
            for (Index i = next++; i < count; i = next++)
            {
                try
                {
                    fn(i);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!err)
                        err = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        const unsigned n = unsigned(std::min<Index>(Index(threads), count));
        for (unsigned w = 0; w < n; ++w)
            pool.emplace_back(work);
        for (auto &th : pool)
            th.join();
        if (err)
            std::rethrow_exception(err);
    }

    std::string format_number(double v)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", v);
        return buf;
    }

    const std::vector<double> &SweepResult::series(const std::string &scheme) const
    {
        auto it = se_per_scheme.find(scheme);
        if (it == se_per_scheme.end())
            throw std::out_of_range("SweepResult: no scheme " + scheme);
        return it->second;
    }

    std::string to_csv(const SweepResult &res)
    {
        auto lim = [](const Limit<double> &l) { return l.bounded() ? format_number(l.value()) : std::string("unbounded"); };
        std::ostringstream os;
        os << "axis,scheme,se_bits_per_hz,trials,seed,boundary_b_wn_hz,boundary_n_wn\n";
        for (const auto &r : res.rows)
            os << format_number(r.axis) << ',' << r.scheme << ',' << format_number(r.se) << ',' << res.trials << ','
               << res.seed << ',' << lim(r.b_wn) << ',' << lim(r.n_wn) << '\n';
        return os.str();
    }
}
