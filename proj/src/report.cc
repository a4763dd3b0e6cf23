#include "depthsamp/report.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <ostream>

#include "depthsamp/errors.hpp"

namespace depthsamp {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

}  // namespace

void write_csv(const EvalReport& report, std::ostream& out, bool timing) {
  out << kReportHeader << '\n';
  for (const EvalRow& r : report.rows) {
    out << to_string(r.sampler) << ',' << to_string(r.reconstructor) << ','
        << fmt("%.6g", r.rate) << ',' << r.seed << ',';
    if (r.error.empty()) {
      out << fmt("%.6f", r.mae) << ',' << fmt("%.6f", r.rmse);
    } else {
      out << "nan,nan";
    }
    out << ',' << r.samples << ',' << fmt("%.3f", timing ? r.time_ms : 0.0) << '\n';
  }
}

void write_curve_csv(const EvalReport& report, std::ostream& out) {
  const char* axis = report.perturbation_kind == "temporal" ? "delta_t"
                     : report.perturbation_kind == "jitter" ? "jitter_px"
                                                            : "perturbation";
  out << "sampler,reconstructor,rate," << axis << ",mae_mm,rmse_mm,cells\n";
  for (const AggregateRow& a : aggregate(report)) {
    out << to_string(a.sampler) << ',' << to_string(a.reconstructor) << ','
        << fmt("%.6g", a.rate) << ',' << a.perturbation << ',' << fmt("%.6f", a.mae) << ','
        << fmt("%.6f", a.rmse) << ',' << a.cells << '\n';
  }
}

void write_json(const EvalReport& report, std::ostream& out, bool timing) {
  nlohmann::ordered_json j;
  j["perturbation"] = report.perturbation_kind;
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const EvalRow& r : report.rows) {
    nlohmann::ordered_json row;
    row["scene"] = r.scene_name;
    row["sampler"] = to_string(r.sampler);
    row["reconstructor"] = to_string(r.reconstructor);
    row["rate"] = r.rate;
    row["seed"] = r.seed;
    row["perturbation"] = r.perturbation;
    row["mae_mm"] = r.mae;
    row["rmse_mm"] = r.rmse;
    row["samples"] = r.samples;
    row["valid_pixels"] = r.valid_pixels;
    row["time_ms"] = timing ? r.time_ms : 0.0;
    row["converged"] = r.converged;
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(std::move(row));
  }
  auto& agg = j["aggregate"] = nlohmann::ordered_json::array();
  for (const AggregateRow& a : aggregate(report)) {
    agg.push_back({{"sampler", to_string(a.sampler)},
                   {"reconstructor", to_string(a.reconstructor)},
                   {"rate", a.rate},
                   {"perturbation", a.perturbation},
                   {"mae_mm", a.mae},
                   {"rmse_mm", a.rmse},
                   {"cells", a.cells}});
  }
  out << j.dump(2) << '\n';
}

void save_report(const EvalReport& report, const std::filesystem::path& csv_path, bool timing) {
  std::ofstream csv(csv_path);
  if (!csv) throw IoError("cannot write " + csv_path.string());
  write_csv(report, csv, timing);
  auto json_path = csv_path;
  json_path.replace_extension(".json");
  std::ofstream json(json_path);
  if (!json) throw IoError("cannot write " + json_path.string());
  write_json(report, json, timing);
}

}  // namespace depthsamp
