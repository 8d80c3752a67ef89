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

#ifndef SQUINTLAB_CLI_HPP
#define SQUINTLAB_CLI_HPP

// Command line front end. Subcommands: boundary, classify, channel, plan, run.

#include "squintlab/boundaries.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace squintlab
{
    enum ExitCode : int
    {
        exit_ok = 0,
        exit_usage = 1,
        exit_infeasible = 2
    };

    // args excludes the program name
    int cli_main(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

    // {"freq_boundary_near_hz", "antenna_boundary_near", "freq_boundary_far_hz", "antenna_boundary_far",
    //  "near_field_threshold", "bounds": {...}, "coeffs": {"a1".."a5"}}; unbounded values are the string "unbounded"
    std::string boundary_report_json(const BoundaryReport<double> &report, int indent = 2);
}

#endif
