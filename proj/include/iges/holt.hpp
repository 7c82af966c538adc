/*
    Copyright (C) 2026 by the iges project

    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#pragma once

#include <Eigen/Dense>

#include "iges/errors.hpp"

namespace iges {

/// Two-parameter (level/trend) exponential smoother used as the one-step
/// state predictor. Works on any scalar type.
template <typename Scalar>
struct HoltStateT {
    using Vec = Eigen::Vector<Scalar, Eigen::Dynamic>;
    Vec level;
    Vec trend;
    Scalar alpha{};
    Scalar beta{};
};

template <typename Scalar>
struct HoltStepT {
    using Vec = Eigen::Vector<Scalar, Eigen::Dynamic>;
    HoltStateT<Scalar> next;
    Vec predicted;  // one-step-ahead forecast, level + trend
    Vec u;          // control input: predicted - alpha * observed
};

/// Seed from the first two samples: level = x2, trend = x2 - x1.
template <typename Scalar>
HoltStateT<Scalar> holt_init(const Eigen::Vector<Scalar, Eigen::Dynamic>& x1,
                             const Eigen::Vector<Scalar, Eigen::Dynamic>& x2, Scalar alpha,
                             Scalar beta) {
    if (x1.size() != x2.size())
        throw NumericFailure("holt_init: sample dimensions differ");
    HoltStateT<Scalar> h;
    h.level = x2;
    h.trend = x2 - x1;
    h.alpha = alpha;
    h.beta = beta;
    return h;
}

template <typename Scalar>
HoltStepT<Scalar> holt_step(const HoltStateT<Scalar>& h,
                            const Eigen::Vector<Scalar, Eigen::Dynamic>& observed) {
    if (observed.size() != h.level.size())
        throw NumericFailure("holt_step: observation dimension mismatch");
    HoltStepT<Scalar> out;
    out.next.alpha = h.alpha;
    out.next.beta = h.beta;
    out.next.level = h.alpha * observed + (Scalar{1} - h.alpha) * (h.level + h.trend);
    out.next.trend =
        h.beta * (out.next.level - h.level) + (Scalar{1} - h.beta) * h.trend;
    out.predicted = out.next.level + out.next.trend;
    out.u = out.predicted - h.alpha * observed;
    return out;
}

using HoltState = HoltStateT<double>;
using HoltStep = HoltStepT<double>;

}  // namespace iges
