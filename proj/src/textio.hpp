#pragma once

#include <string>

namespace specnet {

/// Decimal rendering with 17 significant digits; round-trips any double.
/// Used for every number that lands in a CSV or JSON export so that reruns
/// are byte-identical.
std::string fmt17(double x);

/// JSON-safe variant: NaN / infinities become null (JSON has no encoding
/// for them).
std::string json_number(double x);

std::string json_escape(const std::string& s);

}  // namespace specnet
