#pragma once

#include <optional>
#include <string>
#include <vector>

#include "semaclaw/dispatch/types.hpp"

namespace semaclaw::dispatch {

/// Edges run from a task to each label in its depends_on. Returns one directed
/// cycle as a label list, rotated to start at its smallest label, or nothing.
/// Dependencies on unknown labels are ignored.
std::optional<std::vector<std::string>> detect_cycle(const std::vector<TaskNode>& tasks);

/// Validates labels (non-empty, unique, no '/'), dependency targets and
/// acyclicity. Throws Errc::validation with the witness cycle in the message.
void validate_graph(const std::vector<TaskNode>& tasks);

}  // namespace semaclaw::dispatch
