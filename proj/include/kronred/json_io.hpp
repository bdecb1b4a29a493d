#ifndef KRONRED_JSON_IO_HPP
#define KRONRED_JSON_IO_HPP

#include <string>

#include <json.hpp>

#include "kronred/network.hpp"

namespace kronred {

using Json = nlohmann::ordered_json;

/// JSON mirror of the Network record with canonical field names
/// species / complexes / reactions / boundary. Round-trips exactly.
Json network_to_json(const Network& net);
Network network_from_json(const Json& j);
Network network_from_json_text(const std::string& text);

/// Reads a whole file or throws IoError.
std::string read_text_file(const std::string& path);

/// Writes text, creating parent directories; throws IoError on failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace kronred

#endif  // KRONRED_JSON_IO_HPP
