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

#ifndef SQUINTLAB_CHANNEL_IO_HPP
#define SQUINTLAB_CHANNEL_IO_HPP

// Binary channel dump: "SQNT", u16 version, u32 N, u32 M, 2 reserved bytes,
// then N*M little-endian f64 (re, im) pairs, row-major (antenna outer).

#include "squintlab/constants.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace squintlab
{
    class ChannelFormatError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    inline constexpr std::uint16_t sqnt_version = 1;
    inline constexpr std::size_t sqnt_header_bytes = 16;

    void write_channel(std::ostream &os, const CMatrix<double> &H);
    CMatrix<double> read_channel(std::istream &is);

    void write_channel_file(const std::string &path, const CMatrix<double> &H);
    CMatrix<double> read_channel_file(const std::string &path);
}

#endif
