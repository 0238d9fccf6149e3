#pragma once

#include <string>
#include <string_view>

#include "pchsh/extraction.h"
#include "pchsh/strategy.h"
#include "pchsh/verifier.h"

namespace pchsh {

/// Formats with `digits` significant digits ("%.*g").
std::string format_significant(double x, int digits = 12);

/// Ordered list of {"party": "alice"|"bob", "bit": k}.
std::string transcript_to_json(const RelabelTranscript &transcript);
RelabelTranscript transcript_from_json(std::string_view text);

/// JSON document mirroring SelfTestReport; reals carry 12 significant digits.
std::string report_to_json(const SelfTestReport &report, int indent = 2);

/// Header of the sweep CSV schema (no trailing newline).
std::string sweep_csv_header();
/// One sweep CSV row for `report` (no trailing newline).
std::string sweep_csv_row(const SelfTestReport &report, const NoiseSpec &noise);

}  // namespace pchsh
