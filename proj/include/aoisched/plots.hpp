#pragma once

// SVG charts rendered from the text of comparison.csv alone, so a chart can
// always be regenerated from the table it summarizes.

#include <string>
#include <string_view>

namespace aoisched {

/// Line chart of mean EXWSUoI against the horizon, one line per policy.
/// Throws std::runtime_error if the CSV lacks the needed columns.
std::string exwsuoi_line_svg(std::string_view comparison_csv);

/// Grouped bars of mean age, mean latency and RMS jitter per policy at the
/// largest horizon in the table.
std::string metrics_bars_svg(std::string_view comparison_csv);

}  // namespace aoisched
