#include "semaclaw/dispatch/graph.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "semaclaw/common/error.hpp"

namespace semaclaw::dispatch {

std::optional<std::vector<std::string>> detect_cycle(const std::vector<TaskNode>& tasks) {
    std::map<std::string, std::vector<std::string>> edges;
    for (const auto& t : tasks) edges[t.label];
    for (const auto& t : tasks) {
        for (const auto& d : t.depends_on) {
            if (edges.count(d)) edges[t.label].push_back(d);
        }
    }
    for (auto& [label, out] : edges) std::sort(out.begin(), out.end());

    enum class Mark { white, grey, black };
    std::map<std::string, Mark> mark;
    std::vector<std::string> stack;

    std::optional<std::vector<std::string>> found;
    auto visit = [&](auto&& self, const std::string& node) -> bool {
        mark[node] = Mark::grey;
        stack.push_back(node);
        for (const auto& next : edges[node]) {
            if (mark[next] == Mark::grey) {
                auto from = std::find(stack.begin(), stack.end(), next);
                std::vector<std::string> cycle(from, stack.end());
                std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()), cycle.end());
                found = std::move(cycle);
                return true;
            }
            if (mark[next] == Mark::white && self(self, next)) return true;
        }
        stack.pop_back();
        mark[node] = Mark::black;
        return false;
    };
    for (const auto& [label, out] : edges) {
        if (mark[label] == Mark::white && visit(visit, label)) return found;
    }
    return std::nullopt;
}

void validate_graph(const std::vector<TaskNode>& tasks) {
    std::set<std::string> labels;
    for (const auto& t : tasks) {
        if (t.label.empty()) fail(Errc::validation, "task label is empty");
        if (t.label.find('/') != std::string::npos) {
            fail(Errc::validation, "task label '" + t.label + "' contains '/'");
        }
        if (!labels.insert(t.label).second) fail(Errc::validation, "duplicate task label '" + t.label + "'");
    }
    for (const auto& t : tasks) {
        for (const auto& d : t.depends_on) {
            if (!labels.count(d)) {
                fail(Errc::validation, "task '" + t.label + "' depends on unknown label '" + d + "'");
            }
        }
    }
    if (auto cycle = detect_cycle(tasks)) {
        std::string text;
        for (const auto& l : *cycle) text += l + " -> ";
        text += cycle->front();
        fail(Errc::validation, "dependency cycle: " + text);
    }
}

}  // namespace semaclaw::dispatch
