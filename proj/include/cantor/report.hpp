#pragma once

#include <string>

#include <json.hpp>

#include "cantor/certify.hpp"
#include "cantor/oracle.hpp"

namespace cantor {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchema = 1;

Json to_json(const Interval& v);
Json to_json(const Certificate& cert);
Json to_json(const PointReport& rep);
Json to_json(const SearchStats& stats);
Json to_json(const CoverReport& rep);

// One "lo,hi" row per cover part, with a header line.
std::string cover_csv(const CoverReport& rep);

}  // namespace cantor
