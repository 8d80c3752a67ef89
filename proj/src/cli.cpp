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

#include "squintlab/cli.hpp"
#include "squintlab/channel_io.hpp"
#include "squintlab/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace squintlab
{
    namespace
    {
        using json = nlohmann::ordered_json;

        json limit_json(const Limit<double> &l)
        {
            if (l.bounded())
                return l.value();
            return "unbounded";
        }

        std::string kebab(std::string s)
        {
            std::replace(s.begin(), s.end(), '_', '-');
            return s;
        }

        std::string read_file(const std::string &path)
        {
            std::ifstream is(path);
            if (!is)
                throw std::invalid_argument("cannot read config file " + path);
            std::ostringstream ss;
            ss << is.rdbuf();
            return ss.str();
        }

        void write_file(const std::string &path, const std::string &text)
        {
            std::ofstream os(path, std::ios::binary);
            if (!os || !(os << text))
                throw std::runtime_error("cannot write " + path);
        }

        PathModel parse_model(const std::string &s)
        {
            if (s == "WN" || s == "wn")
                return PathModel::WN;
            if (s == "NN" || s == "nn")
                return PathModel::NN;
            if (s == "NF" || s == "nf")
                return PathModel::NF;
            throw std::invalid_argument("unknown path model: " + s);
        }

        ModelTag tag_for(PathModel m)
        {
            switch (m)
            {
            case PathModel::WN:
                return ModelTag::WN;
            case PathModel::NN:
                return ModelTag::NN;
            default:
                return ModelTag::NF;
            }
        }
    }

    std::string boundary_report_json(const BoundaryReport<double> &r, int indent)
    {
        json j;
        j["freq_boundary_near_hz"] = limit_json(r.freq_boundary_near);
        j["antenna_boundary_near"] = r.antenna_boundary_near;
        j["freq_boundary_far_hz"] = limit_json(r.freq_boundary_far);
        j["antenna_boundary_far"] = limit_json(r.antenna_boundary_far);
        j["near_field_threshold"] = r.near_field_threshold;
        const auto &b = r.bounds;
        j["bounds"] = {
            {"antenna_boundary_near", {{"lower", b.antenna_near_lower}, {"upper", b.antenna_near_upper}}},
            {"freq_boundary_near_hz", {{"lower", limit_json(b.freq_near_lower)}, {"upper", limit_json(b.freq_near_upper)}}},
            {"near_field_threshold", {{"lower", b.threshold_lower}, {"upper", b.threshold_upper}}},
            {"freq_boundary_far_hz", {{"lower", limit_json(b.freq_far_lower)}, {"upper", limit_json(b.freq_far_upper)}}},
            {"antenna_boundary_far", {{"lower", b.antenna_far_lower}, {"upper", limit_json(b.antenna_far_upper)}}},
        };
        j["coeffs"] = {{"a1", r.coeffs.A1}, {"a2", r.coeffs.A2}, {"a3", r.coeffs.A3}, {"a4", r.coeffs.A4}, {"a5", r.coeffs.A5}};
        return j.dump(indent);
    }

    int cli_main(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
    {
        CLI::App app{"squintlab: beam squint boundaries, channel slicing and SE experiments", "squintlab"};
        app.require_subcommand(1);

        std::string config_path;
        unsigned threads = 0;
        bool threads_set = false;
        std::uint64_t trial = 0;
        bool single = false;
        app.add_option("--config", config_path, "flat JSON config file")->check(CLI::ExistingFile);
        auto *threads_opt = app.add_option("--threads", threads, "worker threads (0 = auto, default SQUINTLAB_THREADS)");
        app.add_option("--trial", trial, "trial index used to sample paths for channel and plan");
        app.add_flag("--single", single, "use the fixed path (theta, d, r) instead of a sampled scenario");

        std::map<std::string, std::string> values;
        std::map<std::string, CLI::Option *> opts;
        bool quick = false;
        auto *quick_opt = app.add_flag("--quick", quick, "desk-scale settings (m = 64, trials = 100)");
        for (const auto &name : config_field_names())
        {
            if (name == "quick")
                continue;
            opts[name] = app.add_option("--" + kebab(name), values[name], "config field " + name);
        }

        auto *boundary = app.add_subcommand("boundary", "boundary values for the path (theta, d) as JSON");
        auto *classify = app.add_subcommand("classify", "print WN, NN or NF for the path (theta, d)");
        auto *channel = app.add_subcommand("channel", "dump a channel tensor in SQNT format");
        std::string channel_out, channel_model = "hybrid";
        channel->add_option("--out", channel_out, "output file")->required();
        channel->add_option("--model", channel_model, "hybrid, WN, NN or NF");
        auto *plan = app.add_subcommand("plan", "print the slicing plans as JSON");
        std::string plan_kind = "both", plan_sizing = "greedy", plan_sharing = "equal";
        plan->add_option("--kind", plan_kind, "antenna, subband or both")->check(CLI::IsMember({"antenna", "subband", "both"}));
        plan->add_option("--sizing", plan_sizing, "greedy or uniform")->check(CLI::IsMember({"greedy", "uniform"}));
        plan->add_option("--sharing", plan_sharing, "equal or proportional")->check(CLI::IsMember({"equal", "proportional"}));
        auto *run = app.add_subcommand("run", "run an experiment and emit CSV");
        std::string experiment, run_out;
        run->add_option("experiment", experiment, "experiment name")->required();
        run->add_option("--out", run_out, "CSV file; metadata goes to <out>.meta.json");
        for (auto *s : {boundary, classify, channel, plan, run})
            s->fallthrough();

        try
        {
            std::vector<std::string> rev(args.rbegin(), args.rend());
            app.parse(rev);
        }
        catch (const CLI::ParseError &e)
        {
            const int code = app.exit(e, out, err);
            return code == 0 ? exit_ok : exit_usage;
        }
        threads_set = threads_opt->count() > 0;

        try
        {
            ScenarioConfig cfg;
            if (!config_path.empty())
                cfg = config_from_json(read_file(config_path), cfg);
            if (quick_opt->count() > 0)
                cfg.quick = quick;
            if (cfg.quick)
                cfg = apply_quick(cfg);
            for (const auto &[name, opt] : opts)
                if (opt->count() > 0)
                    set_config_field(cfg, name, values[name]);
            cfg.validate();

            const Geometry geom = cfg.geometry();
            const Grid grid = cfg.grid();
            const Thresholds thr = cfg.thresholds();
            const Path fixed = Path::from_gain({1.0, 0.0}, cfg.theta, cfg.d, cfg.r, PathModel::WN, cfg.fc);

            if (*boundary)
            {
                out << boundary_report_json(boundary_report(geom, grid.bandwidth(), fixed, thr)) << '\n';
                return exit_ok;
            }
            if (*classify)
            {
                out << to_string(classify_path(geom, grid, fixed, thr)) << '\n';
                return exit_ok;
            }
            if (*channel)
            {
                std::vector<Path> paths = single ? std::vector<Path>{fixed} : sample_scenario(cfg, trial);
                ModelTag tag = ModelTag::Hybrid;
                if (channel_model != "hybrid")
                {
                    const PathModel m = parse_model(channel_model);
                    for (auto &p : paths)
                        p = p.with_model(m);
                    tag = tag_for(m);
                }
                write_channel_file(channel_out, synth_channel(geom, grid, paths, tag).entries());
                return exit_ok;
            }
            if (*plan)
            {
                std::optional<SlicingPlan> sp;
                std::optional<SubbandPlan> bp;
                if (plan_kind != "subband")
                {
                    SlicingPolicy pol;
                    pol.sizing = plan_sizing == "uniform" ? SubarraySizing::Uniform : SubarraySizing::GreedyMax;
                    const std::vector<Path> paths = single ? std::vector<Path>{fixed} : sample_scenario(cfg, trial);
                    sp = plan_antenna_slices(geom, grid, paths, thr, pol);
                }
                if (plan_kind != "antenna")
                {
                    std::vector<std::vector<Path>> users = single ? std::vector<std::vector<Path>>(std::size_t(cfg.k), {fixed})
                                                                  : sample_users(cfg, trial);
                    SubbandPolicy pol{cfg.t, plan_sharing == "proportional" ? SubbandSharing::ProportionalPower
                                                                            : SubbandSharing::EqualShare};
                    bp = allocate_subbands(users, geom, grid, thr, pol);
                }
                out << plans_to_json(sp, bp) << '\n';
                return exit_ok;
            }

            const unsigned nthreads = threads_set ? threads : worker_threads_from_env();
            const SweepResult res = run_experiment(experiment, cfg, nthreads);
            if (run_out.empty())
                out << to_csv(res);
            else
            {
                write_file(run_out, to_csv(res));
                write_file(run_out + ".meta.json", res.meta_json + "\n");
            }
            return exit_ok;
        }
        catch (const InfeasibleError &e)
        {
            err << "infeasible: " << e.what() << '\n';
            return exit_infeasible;
        }
        catch (const std::invalid_argument &e)
        {
            err << "error: " << e.what() << '\n';
            return exit_usage;
        }
        catch (const std::exception &e)
        {
            err << "error: " << e.what() << '\n';
            return exit_usage;
        }
    }
}
