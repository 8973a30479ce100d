#pragma once

#include <iosfwd>
#include <optional>

#include <json.hpp>

#include "relloc/localizer.hpp"

namespace relloc {

nlohmann::json span_to_json(const SourceSpan& s);
nlohmann::json report_to_json(const RankedReport& r);

/// Table of rank, score (2 decimals), hint and expression. `top` limits the
/// number of ranking rows.
void write_report_text(std::ostream& os, const RankedReport& r, std::optional<int> top = std::nullopt);

}  // namespace relloc
