#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "beliefgraph/pg/graphs.hpp"

namespace beliefgraph::pg {

inline constexpr int kArchiveVersion = 1;
inline constexpr std::string_view kArchiveSchema = "beliefgraph-pg";

/// Unreadable archive. `line` is 1-based; 0 when not tied to a record.
class ArchiveError : public std::runtime_error {
public:
    ArchiveError(std::size_t line, const std::string& what)
        : std::runtime_error(line > 0 ? "archive line " + std::to_string(line) + ": " + what : "archive: " + what),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

nlohmann::ordered_json robot_to_json(const RobotPG& g);
nlohmann::ordered_json joint_to_json(const JointPG& g);
nlohmann::ordered_json belief_to_json(const BeliefPG& b);
RobotPG robot_from_json(const nlohmann::json& j);
JointPG joint_from_json(const nlohmann::json& j);
BeliefPG belief_from_json(const nlohmann::json& j);

/// Header line, then robot, joint and belief records, one per line.
std::string encode_pgs(const PgSet& set);
PgSet decode_pgs(std::string_view text);

/// The belief records of one agent, in archive order and format.
std::string encode_beliefs_of(const PgSet& set, int agent);

}  // namespace beliefgraph::pg
