#pragma once

#include <cstddef>
#include <string_view>

namespace semaclaw::kernel {

/// Headroom reserved for the next user message and injected reminders.
inline constexpr std::size_t kCompactionBuffer = 8000;
inline constexpr std::size_t kMinContextLimit = 16000;

/// ceil(bytes / 4).
std::size_t count_tokens(std::string_view text) noexcept;

/// Largest history size that does not trigger compaction: floor(0.75 L) - 8000.
std::size_t compaction_threshold(std::size_t context_limit) noexcept;

/// token_count + 8000 > 0.75 * context_limit, evaluated in exact integer arithmetic.
bool should_compact(std::size_t token_count, std::size_t context_limit) noexcept;

/// Upper bound on history size after a truncation fallback: half the limit,
/// and never above the trigger threshold so compaction cannot immediately re-fire.
std::size_t truncation_target(std::size_t context_limit) noexcept;

}  // namespace semaclaw::kernel
