#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "beliefgraph/worldsim/simulate.hpp"

namespace beliefgraph::worldsim {

/// Malformed log record. `line` is 1-based, 0 when the problem is not tied to a line.
class LogFormatError : public std::runtime_error {
public:
    LogFormatError(std::size_t line, const std::string& what)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

nlohmann::ordered_json box_to_json(const Box& b);
Box box_from_json(const nlohmann::json& j);
nlohmann::ordered_json point_to_json(const Point2& p);
Point2 point_from_json(const nlohmann::json& j);

nlohmann::ordered_json observation_to_json(const FrameObservation& f);
FrameObservation observation_from_json(const nlohmann::json& j);

/// One JSON record per line, ordered by (time, camera).
std::string dump_observations(const ObservationLog& log);
ObservationLog load_observations(std::string_view text);

/// Header line followed by one record per frame.
std::string dump_ground_truth(const GroundTruthLog& log);
GroundTruthLog load_ground_truth(std::string_view text);

/// Calls `fn(line_number, line)` for each non-blank line.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") != std::string_view::npos) fn(line_no, line);
        if (nl == std::string_view::npos) break;
        text.remove_prefix(nl + 1);
    }
}

}  // namespace beliefgraph::worldsim
