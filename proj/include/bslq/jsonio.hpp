#pragma once

#include <json.hpp>

#include <string>

namespace bslq {

using Json = nlohmann::ordered_json;

// Serializer with a fixed number format: every finite double is printed with 17
// significant digits (%.17g), so equal values always produce identical bytes and
// round-trip exactly. nlohmann's own dump() uses shortest-round-trip formatting,
// which is also deterministic but not fixed-width; reports pin the format instead.
std::string dump_json(const Json& j, int indent = 2);

}  // namespace bslq
