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

#include <algorithm>
#include <cmath>

namespace squintlab
{
    namespace
    {
        using json = nlohmann::ordered_json;
        using Outcomes = std::vector<TrialOutcome>;

        Outcomes run_trials(Index trials, unsigned threads, const std::function<TrialOutcome(Index)> &fn)
        {
            Outcomes out(static_cast<std::size_t>(trials));
            parallel_for(trials, threads, [&](Index i) { out[std::size_t(i)] = fn(i); });
            return out;
        }

        Outcomes antenna_trials(const ScenarioConfig &cfg, unsigned threads)
        {
            return run_trials(cfg.trials, threads,
                              [&](Index i) { return evaluate_antenna_slicing(cfg, sample_scenario(cfg, std::uint64_t(i))); });
        }

        Outcomes subband_trials(const ScenarioConfig &cfg, unsigned threads)
        {
            return run_trials(cfg.trials, threads,
                              [&](Index i) { return evaluate_subband_slicing(cfg, sample_users(cfg, std::uint64_t(i))); });
        }

        // Fixed (theta, d, r) from the config, unit gain with a random phase per trial
        Outcomes fixed_path_trials(const ScenarioConfig &cfg, unsigned threads)
        {
            return run_trials(cfg.trials, threads, [&](Index i) {
                RngStream rng(cfg.seed, std::uint64_t(i));
                const double phase = rng.uniform(0.0, 2.0 * pi<double>);
                const Path p = Path::from_gain(std::polar(1.0, phase), cfg.theta, cfg.d, cfg.r, PathModel::WN, cfg.fc);
                return evaluate_antenna_slicing(cfg, {p});
            });
        }

        Limit<double> mean_limit(const Outcomes &o, Limit<double> TrialOutcome::*field)
        {
            double acc = 0;
            for (const auto &t : o)
            {
                const Limit<double> &l = t.*field;
                if (!l.bounded())
                    return Limit<double>::unbounded();
                acc += l.value();
            }
            return Limit<double>::finite(acc / double(o.size()));
        }

        json limit_json(const Limit<double> &l)
        {
            if (l.bounded())
                return l.value();
            return "unbounded";
        }

        class Builder
        {
        public:
            Builder(std::string experiment, std::string axis_name, const ScenarioConfig &cfg, std::vector<std::string> schemes)
                : schemes_(std::move(schemes))
            {
                res_.experiment = std::move(experiment);
                res_.axis_name = std::move(axis_name);
                res_.trials = cfg.trials;
                res_.seed = cfg.seed;
                meta_["experiment"] = res_.experiment;
                meta_["axis"] = res_.axis_name;
                meta_["config"] = json::parse(config_to_json(cfg));
                meta_["schemes"] = schemes_;
                meta_["points"] = json::array();
            }

            // se(gains) evaluated per trial, averaged in ascending trial order
            void add(double axis, const Outcomes &o, const std::function<double(const SchemeGains &)> &se)
            {
                const Limit<double> b_wn = mean_limit(o, &TrialOutcome::b_wn), n_wn = mean_limit(o, &TrialOutcome::n_wn);
                res_.axis_values.push_back(axis);
                for (const auto &s : schemes_)
                {
                    double acc = 0;
                    for (const auto &t : o)
                        acc += se(t.schemes.at(s));
                    const double v = acc / double(o.size());
                    res_.se_per_scheme[s].push_back(v);
                    res_.rows.push_back({axis, s, v, b_wn, n_wn});
                }
                Index infeasible = 0;
                double subarrays = 0;
                for (const auto &t : o)
                {
                    infeasible += t.infeasible ? 1 : 0;
                    subarrays += double(t.subarrays);
                }
                json p;
                p["axis"] = axis;
                p["infeasible_trials"] = infeasible;
                p["mean_subarrays"] = subarrays / double(o.size());
                p["b_wn_hz"] = limit_json(b_wn);
                p["n_wn"] = limit_json(n_wn);
                p["b_wf_hz"] = limit_json(mean_limit(o, &TrialOutcome::b_wf));
                p["n_wf"] = limit_json(mean_limit(o, &TrialOutcome::n_wf));
                meta_["points"].push_back(p);
            }

            void add_row(double axis, const std::string &scheme, double v, Limit<double> b_wn, Limit<double> n_wn)
            {
                if (res_.se_per_scheme.find(scheme) == res_.se_per_scheme.end())
                    order_.push_back(scheme);
                res_.se_per_scheme[scheme].push_back(v);
                res_.rows.push_back({axis, scheme, v, b_wn, n_wn});
            }

            json &meta() { return meta_; }
            std::vector<double> &axis_values() { return res_.axis_values; }

            SweepResult finish()
            {
                if (!order_.empty())
                    meta_["schemes"] = order_;
                res_.meta_json = meta_.dump(2);
                return std::move(res_);
            }

        private:
            SweepResult res_;
            std::vector<std::string> schemes_, order_;
            json meta_;
        };

        std::vector<double> range(double lo, double hi, double step)
        {
            std::vector<double> v;
            for (Index i = 0;; ++i)
            {
                const double x = lo + double(i) * step;
                if (x > hi * (1 + 1e-12))
                    break;
                v.push_back(x);
            }
            return v;
        }

        std::vector<double> axis_or(const ScenarioConfig &cfg, std::vector<double> fallback)
        {
            return cfg.axis.empty() ? fallback : cfg.axis;
        }

        Index as_count(double v, const char *what)
        {
            if (!(v >= 1) || v != std::floor(v))
                throw std::invalid_argument(std::string("axis value for ") + what + " must be a positive integer");
            return Index(v);
        }

        const std::vector<std::string> as_schemes = {"narrowband_mrt", "antenna_slicing", "se_opt"};
        const std::vector<std::string> fs_schemes = {"narrowband_mrt", "subband_slicing", "se_opt"};

        SweepResult sweep_bandwidth(const ScenarioConfig &cfg, unsigned threads)
        {
            Builder b("sweep-bandwidth", "bandwidth_hz", cfg, as_schemes);
            const double snr = cfg.snr_linear();
            for (double B : axis_or(cfg, cfg.quick ? range(50e6, 700e6, 50e6) : range(10e6, 700e6, 10e6)))
            {
                ScenarioConfig c = cfg;
                c.b = B;
                c.validate();
                b.add(B, fixed_path_trials(c, threads), [&](const SchemeGains &g) { return g.spectral_efficiency(snr); });
            }
            return b.finish();
        }

        SweepResult sweep_antennas(const ScenarioConfig &cfg, unsigned threads)
        {
            Builder b("sweep-antennas", "antennas", cfg, as_schemes);
            const double snr = cfg.snr_linear();
            std::vector<double> def;
            for (Index n = 16; n <= (cfg.quick ? 2048 : 8192); n *= 2)
                def.push_back(double(n));
            for (double N : axis_or(cfg, def))
            {
                ScenarioConfig c = cfg;
                c.n = as_count(N, "antennas");
                b.add(N, fixed_path_trials(c, threads), [&](const SchemeGains &g) { return g.spectral_efficiency(snr); });
            }
            return b.finish();
        }

        SweepResult gain_map(const ScenarioConfig &cfg)
        {
            Builder b("gain-map", "theta_or_d", cfg, {});
            const Geometry geom = cfg.geometry();
            const Grid grid = cfg.grid();
            const Thresholds thr = cfg.thresholds();
            const Index M = grid.num_subcarriers();

            std::vector<Index> ms;
            if (cfg.axis.empty())
            {
                const Index stride = std::max<Index>(1, M / 32);
                for (Index m = 0; m < M; m += stride)
                    ms.push_back(m);
                ms.push_back(M - 1);
                ms.push_back(M / 2);
            }
            else
                for (double v : cfg.axis)
                {
                    if (!(v >= 0) || v != std::floor(v) || v >= double(M))
                        throw std::invalid_argument("gain-map axis values must be subcarrier indices");
                    ms.push_back(Index(v));
                }
            std::sort(ms.begin(), ms.end());
            ms.erase(std::unique(ms.begin(), ms.end()), ms.end());

            auto eval = [&](const Path &p, double axis, const std::string &tag) {
                const Limit<double> bwn = freq_boundary(geom, p, thr, FieldMode::Near);
                const Limit<double> nwn = antenna_boundary(grid.bandwidth(), p, geom.center_freq(), thr, FieldMode::Near);
                for (Index m : ms)
                    b.add_row(axis, tag + std::to_string(m), normalized_array_gain(geom, grid, p, m), bwn, nwn);
            };
            for (Index i = 0; i < 199; ++i)
            {
                const double th = -0.99 + 0.01 * double(i);
                eval(Path::from_gain({1.0, 0.0}, th, cfg.d, cfg.r, PathModel::WN, cfg.fc), th, "eta_theta_m");
            }
            for (Index i = 0; i < 96; ++i)
            {
                const double d = 5.0 + double(i);
                eval(Path::from_gain({1.0, 0.0}, cfg.theta, d, cfg.r, PathModel::WN, cfg.fc), d, "eta_d_m");
            }
            SweepResult r = b.finish();
            r.trials = 1;
            r.axis_values.clear();
            for (const auto &row : r.rows)
                if (r.axis_values.empty() || r.axis_values.back() != row.axis)
                    r.axis_values.push_back(row.axis);
            return r;
        }

        enum class Family
        {
            Antenna,
            Subband
        };

        Outcomes family_trials(Family f, const ScenarioConfig &cfg, unsigned threads)
        {
            cfg.validate();
            return f == Family::Antenna ? antenna_trials(cfg, threads) : subband_trials(cfg, threads);
        }

        const std::vector<std::string> &family_schemes(Family f) { return f == Family::Antenna ? as_schemes : fs_schemes; }

        SweepResult se_snr(const std::string &name, Family f, const ScenarioConfig &cfg, unsigned threads)
        {
            Builder b(name, "snr_db", cfg, family_schemes(f));
            const Outcomes o = family_trials(f, cfg, threads);
            for (double s : axis_or(cfg, {-10, -5, 0, 5, 10, 15, 20}))
            {
                const double lin = std::pow(10.0, s / 10.0);
                b.add(s, o, [&](const SchemeGains &g) { return g.spectral_efficiency(lin); });
            }
            return b.finish();
        }

        SweepResult se_subcarrier(const std::string &name, Family f, const ScenarioConfig &cfg, unsigned threads)
        {
            Builder b(name, "subcarrier", cfg, family_schemes(f));
            const Outcomes o = family_trials(f, cfg, threads);
            const double lin = cfg.snr_linear();
            std::vector<double> def;
            for (Index m = 0; m < cfg.m; ++m)
                def.push_back(double(m));
            for (double v : axis_or(cfg, def))
            {
                if (!(v >= 0) || v != std::floor(v) || v >= double(cfg.m))
                    throw std::invalid_argument("subcarrier axis values must be indices below m");
                const Index m = Index(v);
                b.add(v, o, [&](const SchemeGains &g) { return g.per_subcarrier(lin)[m]; });
            }
            return b.finish();
        }

        SweepResult se_paths(const std::string &name, Family f, const ScenarioConfig &cfg, unsigned threads)
        {
            Builder b(name, "near_paths", cfg, family_schemes(f));
            const double lin = cfg.snr_linear();
            for (double v : axis_or(cfg, {1, 2, 3, 4, 5, 6, 7, 8}))
            {
                ScenarioConfig c = cfg;
                c.l_n = as_count(v, "near_paths");
                b.add(v, family_trials(f, c, threads), [&](const SchemeGains &g) { return g.spectral_efficiency(lin); });
            }
            return b.finish();
        }

        SweepResult se_subarrays(const ScenarioConfig &cfg, unsigned threads)
        {
            Builder b("se-subarrays-fs", "subarrays", cfg, fs_schemes);
            const double lin = cfg.snr_linear();
            std::vector<double> def;
            for (Index t : {1, 2, 4, 8, 16, 32, 64})
                if (cfg.n % t == 0)
                    def.push_back(double(t));
            for (double v : axis_or(cfg, def))
            {
                ScenarioConfig c = cfg;
                c.t = as_count(v, "subarrays");
                if (c.n % c.t != 0)
                    throw std::invalid_argument("subarray count must divide n");
                b.add(v, family_trials(Family::Subband, c, threads), [&](const SchemeGains &g) { return g.spectral_efficiency(lin); });
            }
            return b.finish();
        }
    }

    const std::vector<std::string> &experiment_names()
    {
        static const std::vector<std::string> names = {"gain-map",         "sweep-bandwidth", "sweep-antennas",
                                                       "se-snr-as",        "se-subcarrier-as", "se-paths-as",
                                                       "se-snr-fs",        "se-subcarrier-fs", "se-paths-fs",
                                                       "se-subarrays-fs"};
        return names;
    }

    SweepResult run_experiment(const std::string &name, const ScenarioConfig &cfg, unsigned threads)
    {
        if (std::find(experiment_names().begin(), experiment_names().end(), name) == experiment_names().end())
            throw UnknownExperiment(name);
        cfg.validate();
        if (name == "gain-map")
            return gain_map(cfg);
        if (name == "sweep-bandwidth")
            return sweep_bandwidth(cfg, threads);
        if (name == "sweep-antennas")
            return sweep_antennas(cfg, threads);
        if (name == "se-snr-as")
            return se_snr(name, Family::Antenna, cfg, threads);
        if (name == "se-subcarrier-as")
            return se_subcarrier(name, Family::Antenna, cfg, threads);
        if (name == "se-paths-as")
            return se_paths(name, Family::Antenna, cfg, threads);
        if (name == "se-snr-fs")
            return se_snr(name, Family::Subband, cfg, threads);
        if (name == "se-subcarrier-fs")
            return se_subcarrier(name, Family::Subband, cfg, threads);
        if (name == "se-paths-fs")
            return se_paths(name, Family::Subband, cfg, threads);
        return se_subarrays(cfg, threads);
    }
}
