//------------------------------------------------------------------------------
// Copyright 2026 The autotune authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//------------------------------------------------------------------------------
#ifndef AUTOTUNE_ERROR_HPP
#define AUTOTUNE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace autotune {

enum class errc {
    invalid_bounds,
    empty_name,
    duplicate_name,
    empty_parameter_set,
    dimension_mismatch,
    non_finite_coordinate,
    invalid_coefficients,
    search_converged,
    no_outstanding_proposal,
    invalid_objective,
    non_finite_duration,
    invalid_argument,
    busy_pool,
    resource_exhausted,
    budget_exceeded,
    zero_duration,
    checksum_mismatch,
    unknown_workload,
    parse_error,
    io_error,
};

constexpr const char* to_string(errc code) noexcept {
    switch (code) {
    case errc::invalid_bounds: return "InvalidBounds";
    case errc::empty_name: return "EmptyName";
    case errc::duplicate_name: return "DuplicateName";
    case errc::empty_parameter_set: return "EmptyParameterSet";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::non_finite_coordinate: return "NonFiniteCoordinate";
    case errc::invalid_coefficients: return "InvalidCoefficients";
    case errc::search_converged: return "SearchConverged";
    case errc::no_outstanding_proposal: return "NoOutstandingProposal";
    case errc::invalid_objective: return "InvalidObjective";
    case errc::non_finite_duration: return "NonFiniteDuration";
    case errc::invalid_argument: return "InvalidArgument";
    case errc::busy_pool: return "BusyPool";
    case errc::resource_exhausted: return "ResourceExhausted";
    case errc::budget_exceeded: return "BudgetExceeded";
    case errc::zero_duration: return "ZeroDuration";
    case errc::checksum_mismatch: return "ChecksumMismatch";
    case errc::unknown_workload: return "UnknownWorkload";
    case errc::parse_error: return "ParseError";
    case errc::io_error: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

} // namespace autotune

#endif // AUTOTUNE_ERROR_HPP
