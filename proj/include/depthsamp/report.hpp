#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "depthsamp/experiments.hpp"

namespace depthsamp {

inline constexpr const char* kReportHeader =
    "sampler,reconstructor,rate,seed,mae_mm,rmse_mm,samples,time_ms";

// One line per report row in report order. Wall-clock time is written only
// when `timing` is set, so default reports are byte-for-byte reproducible.
void write_csv(const EvalReport& report, std::ostream& out, bool timing = false);

// Aggregated curve over the perturbation axis:
// sampler,reconstructor,rate,<delta_t|jitter_px>,mae_mm,rmse_mm,cells
void write_curve_csv(const EvalReport& report, std::ostream& out);

// Rows (with scene names, flags and errors) plus aggregates.
void write_json(const EvalReport& report, std::ostream& out, bool timing = false);

void save_report(const EvalReport& report, const std::filesystem::path& csv_path,
                 bool timing = false);

}  // namespace depthsamp
