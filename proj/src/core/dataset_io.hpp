#pragma once

#include "core/records.hpp"

#include <iosfwd>
#include <string>

namespace seqdiag {

/// JSON-Lines dataset codec: one trajectory per line, UTF-8, "\n" endings.
/// save followed by load is the identity on valid datasets.

std::string trajectory_to_json_line(const StudentTrajectory& t);

/// Throws DecodeError naming the 1-based line on malformed input.
StudentTrajectory trajectory_from_json_line(const std::string& line, int line_number);

void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

void write_dataset(const Dataset& dataset, std::ostream& out);
Dataset read_dataset(std::istream& in);

} // namespace seqdiag
