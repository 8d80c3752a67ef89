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

#include "squintlab/channel_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace squintlab
{
    namespace
    {
        template <typename U>
        void put_le(std::ostream &os, U v)
        {
            unsigned char b[sizeof(U)];
            for (std::size_t i = 0; i < sizeof(U); ++i)
                b[i] = static_cast<unsigned char>((std::uint64_t(v) >> (8 * i)) & 0xff);
            os.write(reinterpret_cast<const char *>(b), sizeof(U));
        }

        template <typename U>
        U get_le(std::istream &is)
        {
            unsigned char b[sizeof(U)];
            if (!is.read(reinterpret_cast<char *>(b), sizeof(U)))
                throw ChannelFormatError("read_channel: truncated stream");
            std::uint64_t v = 0;
            for (std::size_t i = 0; i < sizeof(U); ++i)
                v |= std::uint64_t(b[i]) << (8 * i);
            return static_cast<U>(v);
        }

        void put_f64(std::ostream &os, double x) { put_le(os, std::bit_cast<std::uint64_t>(x)); }
        double get_f64(std::istream &is) { return std::bit_cast<double>(get_le<std::uint64_t>(is)); }
    }

    void write_channel(std::ostream &os, const CMatrix<double> &H)
    {
        if (H.rows() > 0xffffffffLL || H.cols() > 0xffffffffLL)
            throw std::invalid_argument("write_channel: dimensions exceed 32 bits");
        os.write("SQNT", 4);
        put_le<std::uint16_t>(os, sqnt_version);
        put_le<std::uint32_t>(os, std::uint32_t(H.rows()));
        put_le<std::uint32_t>(os, std::uint32_t(H.cols()));
        put_le<std::uint16_t>(os, 0);
        for (Index n = 0; n < H.rows(); ++n)
            for (Index m = 0; m < H.cols(); ++m)
            {
                put_f64(os, H(n, m).real());
                put_f64(os, H(n, m).imag());
            }
        if (!os)
            throw std::runtime_error("write_channel: write failed");
    }

    CMatrix<double> read_channel(std::istream &is)
    {
        char magic[4];
        if (!is.read(magic, 4) || std::memcmp(magic, "SQNT", 4) != 0)
            throw ChannelFormatError("read_channel: bad magic");
        if (get_le<std::uint16_t>(is) != sqnt_version)
            throw ChannelFormatError("read_channel: unsupported version");
        const Index N = get_le<std::uint32_t>(is), M = get_le<std::uint32_t>(is);
        get_le<std::uint16_t>(is);
        CMatrix<double> H(N, M);
        for (Index n = 0; n < N; ++n)
            for (Index m = 0; m < M; ++m)
            {
                const double re = get_f64(is);
                H(n, m) = {re, get_f64(is)};
            }
        return H;
    }

    void write_channel_file(const std::string &path, const CMatrix<double> &H)
    {
        std::ofstream os(path, std::ios::binary);
        if (!os)
            throw std::runtime_error("cannot open " + path);
        write_channel(os, H);
    }

    CMatrix<double> read_channel_file(const std::string &path)
    {
        std::ifstream is(path, std::ios::binary);
        if (!is)
            throw std::runtime_error("cannot open " + path);
        return read_channel(is);
    }
}
