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

#ifndef SQUINTLAB_LIMIT_HPP
#define SQUINTLAB_LIMIT_HPP

#include <stdexcept>

namespace squintlab
{
    // A boundary value that is either a finite number or unbounded
    // Unbounded never hides behind infinity or a sentinel; ask bounded() first
    template <typename Scalar>
    class Limit
    {
    public:
        Limit() = default; // unbounded

        static Limit finite(Scalar v) { return Limit(true, v); }
        static Limit unbounded() { return Limit(false, Scalar(0)); }

        bool bounded() const { return bounded_; }

        Scalar value() const
        {
            if (!bounded_)
                throw std::logic_error("Limit::value: limit is unbounded");
            return value_;
        }

        Scalar value_or(Scalar fallback) const { return bounded_ ? value_ : fallback; }

        // True if x lies strictly below the limit
        bool admits(Scalar x) const { return !bounded_ || x < value_; }

        Limit scaled(Scalar factor) const { return bounded_ ? finite(value_ * factor) : unbounded(); }

        friend bool operator==(const Limit &a, const Limit &b)
        {
            return a.bounded_ == b.bounded_ && (!a.bounded_ || a.value_ == b.value_);
        }

        friend Limit min(const Limit &a, const Limit &b)
        {
            if (!a.bounded_)
                return b;
            if (!b.bounded_)
                return a;
            return a.value_ <= b.value_ ? a : b;
        }

    private:
        Limit(bool b, Scalar v) : bounded_(b), value_(v) {}
        bool bounded_ = false;
        Scalar value_ = Scalar(0);
    };
}

#endif
