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

#ifndef SQUINTLAB_HARNESS_HPP
#define SQUINTLAB_HARNESS_HPP

// Scenario configuration, seeded scenario sampling and Monte Carlo experiments.

#include "squintlab/slicing.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace squintlab
{
    struct ScenarioConfig
    {
        Index n = 1024;                   // antennas
        double fc = 7e9;                  // Hz
        double b = 600e6;                 // Hz
        Index m = 256;                    // subcarriers
        Index l_n = 4;                    // near-field paths (per user in multi-user runs)
        Index l_f = 1;                    // far-field paths
        Index k = 8;                      // users
        Index t = 8;                      // subarrays for sub-band slicing
        double kappa_a = 0.125;
        double kappa_f = 0.125;
        double snr_db = 10;
        Index trials = 200;
        std::uint64_t seed = 1;
        double theta = 0.1;               // fixed path for gain-map and the sweeps
        double d = 10;                    // m
        double r = 10;                    // m
        double d_min = 10;                // sampling range of d and r, m
        double d_max = 100;
        double far_power_offset_db = 20;  // far-field paths this far below the near-field ones
        std::vector<double> axis;         // replaces the default sweep axis when non-empty
        bool quick = false;               // m = 64, trials = 100

        Geometry geometry() const { return Geometry(n, fc); }
        Grid grid() const { return Grid(m, b); }
        Thresholds thresholds() const { return Thresholds(kappa_a, kappa_f); }
        double snr_linear() const;
        void validate() const;
    };

    // Desk-scale overrides
    ScenarioConfig apply_quick(ScenarioConfig cfg);

    // Flat JSON with the field names above; unknown keys are rejected
    ScenarioConfig config_from_json(const std::string &text, ScenarioConfig base = {});
    std::string config_to_json(const ScenarioConfig &cfg, int indent = -1);

    // Names of the settable fields and a string setter used by the CLI
    const std::vector<std::string> &config_field_names();
    void set_config_field(ScenarioConfig &cfg, const std::string &name, const std::string &value);

    // Independent random stream per (master seed, trial)
    class RngStream
    {
    public:
        RngStream(std::uint64_t master_seed, std::uint64_t substream_id);

        std::uint64_t master_seed() const { return seed_; }
        std::uint64_t substream_id() const { return id_; }

        double uniform(double lo, double hi);
        std::complex<double> complex_normal(); // CN(0, 1)

    private:
        std::uint64_t seed_, id_;
        std::mt19937_64 eng_;
        std::normal_distribution<double> normal_{0.0, 1.0};
    };

    // L_N wideband near-field paths followed by L_F far-field paths
    std::vector<Path> sample_scenario(const ScenarioConfig &cfg, std::uint64_t trial);

    // K users with L_N near-field paths each
    std::vector<std::vector<Path>> sample_users(const ScenarioConfig &cfg, std::uint64_t trial);

    struct SweepRow
    {
        double axis;
        std::string scheme;
        double se; // bits/s/Hz, or the normalized gain for gain-map rows
        Limit<double> b_wn;
        Limit<double> n_wn;
    };

    struct SweepResult
    {
        std::string experiment;
        std::string axis_name;
        std::vector<double> axis_values;
        std::map<std::string, std::vector<double>> se_per_scheme; // aligned with axis_values
        std::vector<SweepRow> rows;                               // CSV order
        Index trials = 0;
        std::uint64_t seed = 0;
        std::string meta_json;

        const std::vector<double> &series(const std::string &scheme) const;
    };

    class UnknownExperiment : public std::invalid_argument
    {
    public:
        explicit UnknownExperiment(const std::string &name) : std::invalid_argument("unknown experiment: " + name) {}
    };

    const std::vector<std::string> &experiment_names();

    // threads = 0 picks the hardware concurrency
    SweepResult run_experiment(const std::string &name, const ScenarioConfig &cfg, unsigned threads = 1);

    std::string to_csv(const SweepResult &result);

    // SQUINTLAB_THREADS, 0 or unset = auto
    unsigned worker_threads_from_env();

    // Calls fn(i) for i in [0, count) on up to `threads` workers
    void parallel_for(Index count, unsigned threads, const std::function<void(Index)> &fn);

    // ---- per-trial evaluation, exposed for tests and acceptance --------------

    // |f^H h|^2 per subcarrier, one segment per user (a single segment for one user)
    struct SchemeGains
    {
        std::vector<RVector<double>> segments;

        double spectral_efficiency(double snr_linear) const;
        RVector<double> per_subcarrier(double snr_linear) const;
    };

    struct TrialOutcome
    {
        std::map<std::string, SchemeGains> schemes;
        bool infeasible = false;
        Index subarrays = 0;
        Limit<double> b_wn = Limit<double>::unbounded();
        Limit<double> n_wn = Limit<double>::unbounded();
        Limit<double> b_wf = Limit<double>::unbounded();
        Limit<double> n_wf = Limit<double>::unbounded();
    };

    // Single UE: narrowband_mrt, antenna_slicing, se_opt
    TrialOutcome evaluate_antenna_slicing(const ScenarioConfig &cfg, const std::vector<Path> &paths);

    // K UEs on sub-bands: narrowband_mrt, subband_slicing, se_opt
    TrialOutcome evaluate_subband_slicing(const ScenarioConfig &cfg, const std::vector<std::vector<Path>> &users);

    // Format with 12 significant digits
    std::string format_number(double v);
}

#endif
