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

#ifndef SQUINTLAB_CONSTANTS_HPP
#define SQUINTLAB_CONSTANTS_HPP

#include <Eigen/Dense>

#include <complex>
#include <numbers>

namespace squintlab
{
    template <typename Scalar>
    inline constexpr Scalar speed_of_light = Scalar(299792458.0); // m/s, exact

    template <typename Scalar>
    inline constexpr Scalar pi = std::numbers::pi_v<Scalar>;

    using Index = Eigen::Index;

    template <typename Scalar>
    using Complex = std::complex<Scalar>;

    template <typename Scalar>
    using CVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

    template <typename Scalar>
    using CMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

    template <typename Scalar>
    using RVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    template <typename Scalar>
    using RMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    // exp(+j*phase)
    template <typename Scalar>
    inline Complex<Scalar> phasor(Scalar phase)
    {
        return std::polar(Scalar(1), phase);
    }
}

#endif
