#ifndef EXPDYN_JSON_IO_HPP
#define EXPDYN_JSON_IO_HPP

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "expdyn/itinerary.hpp"
#include "expdyn/nonlanding.hpp"
#include "expdyn/ray_engine.hpp"

namespace expdyn {

using Json = nlohmann::ordered_json;

/// Writes to a sibling temporary file and renames it over `path`.
void writeFileAtomic(const std::string& path, std::string_view bytes);
std::string readFile(const std::string& path);

Json complexJson(Complex z);
Json toJson(const TailReport& tail);
Json toJson(const RayTrace& trace, const std::optional<TailReport>& tail);
Json toJson(const Itinerary& it);
Json toJson(const AccumulationCertificate& cert);

/// Inverse of toJson(AccumulationCertificate); the base address must be
/// in the textual grammar.
AccumulationCertificate certificateFromJson(const Json& j);

/// Pretty-printed with a trailing newline.
std::string dumpJson(const Json& j);

}  // namespace expdyn

#endif  // EXPDYN_JSON_IO_HPP
