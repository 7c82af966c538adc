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

#include <stdexcept>
#include <string>

namespace iges {

struct IgesError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input file (bad JSON, bad MATPOWER table, missing key).
struct ParseError : IgesError {
    using IgesError::IgesError;
};

/// A model invariant does not hold; message names the offending field.
struct ValidationError : IgesError {
    using IgesError::IgesError;
};

/// The stacked gas system matrix is numerically singular.
struct SingularModel : IgesError {
    using IgesError::IgesError;
};

/// Power flow failed to converge within the iteration budget.
struct NonConvergence : IgesError {
    using IgesError::IgesError;
};

/// Numeric breakdown at runtime (singular innovation, negative density, ...).
struct NumericFailure : IgesError {
    using IgesError::IgesError;
};

/// Filter coefficient denominator is identically zero (measurement == truth).
struct DegenerateDenominator : IgesError {
    using IgesError::IgesError;
};

struct IoError : IgesError {
    using IgesError::IgesError;
};

}  // namespace iges
