#include "semaclaw/kernel/tokens.hpp"

#include <algorithm>

namespace semaclaw::kernel {

std::size_t count_tokens(std::string_view text) noexcept { return (text.size() + 3) / 4; }

std::size_t compaction_threshold(std::size_t context_limit) noexcept {
    auto three_quarters = (3 * context_limit) / 4;
    return three_quarters > kCompactionBuffer ? three_quarters - kCompactionBuffer : 0;
}

bool should_compact(std::size_t token_count, std::size_t context_limit) noexcept {
    return 4 * (token_count + kCompactionBuffer) > 3 * context_limit;
}

std::size_t truncation_target(std::size_t context_limit) noexcept {
    return std::min(context_limit / 2, compaction_threshold(context_limit));
}

}  // namespace semaclaw::kernel
