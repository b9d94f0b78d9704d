#pragma once

#include <stdexcept>
#include <string>

#include "ssn/problems.hpp"

namespace ssn {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Self-describing JSON document: generation parameters plus every draw
/// (rows, support, signs, eta2, noise) and the derived data b, xbar.
std::string instance_to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(const std::string& text);

void save_instance(const ProblemInstance& inst, const std::string& path);
/// Loads and rebuilds the operator. Throws IoError on unreadable or
/// malformed files.
ProblemInstance load_instance(const std::string& path);

}  // namespace ssn
