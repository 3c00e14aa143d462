#pragma once

#include <string>

#include "ftmoea/dataset.hpp"
#include "ftmoea/fault_tree.hpp"

namespace ftmoea {

// Container Seal Design, the embedded ground-truth case study.
extern const char* const kCsdText;

FaultTree csd_tree();

// Complete dataset over all 128 assignments.
FailureDataset csd_complete_dataset();

// Resolves `--case` names or falls through to a file path.
FaultTree resolve_case(const std::string& name_or_path);
bool is_embedded_case(const std::string& name);

}  // namespace ftmoea
