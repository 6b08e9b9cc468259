#pragma once

#include <filesystem>

#include "twoloop/core/types.hpp"

// File protocol between the runner and external simulators.
//
// params file:   header `name,index,value`, one row per scalar component in
//                declaration order, values with 17 significant digits.
// fitness file:  header `fitness`, then one value per row.

namespace twoloop::runner {

void write_params_file(const Individual& individual, const std::filesystem::path& path);

/// Inverse of write_params_file. Generation and index are left at zero.
Individual read_params_file(const std::filesystem::path& path);

/// Throws Error(EvaluationFailed) with a diagnostic when the file is missing,
/// empty, has the wrong header or row count, or holds an unparsable value.
FitnessVector read_fitness_file(const std::filesystem::path& path, std::size_t expected_length);

/// Writes a fitness file (used by native fixtures and tests).
void write_fitness_file(const FitnessVector& fitness, const std::filesystem::path& path);

/// Shortest-safe decimal form with 17 significant digits.
std::string format_real(double value);

/// Strict full-string parse of a real number.
bool parse_real(std::string_view text, double& out);

}  // namespace twoloop::runner
