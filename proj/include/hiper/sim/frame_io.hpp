#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hiper/sim/simulator.hpp"

namespace hiper::sim {

// Newline-delimited records, one frame per line. Ground-truth provenance
// fields are not part of the format.
std::string frame_to_record(const SensorFrame& frame);
SensorFrame frame_from_record(const std::string& line);

void write_frames(std::ostream& out, const std::vector<SensorFrame>& frames);
std::vector<SensorFrame> read_frames(std::istream& in);

void write_frames_file(const std::string& path, const std::vector<SensorFrame>& frames);
std::vector<SensorFrame> read_frames_file(const std::string& path);

}  // namespace hiper::sim
