#pragma once

// Report bundle on disk:
//   summary.txt   key = value lines, then one verdict line per requirement
//   pass.csv      per-sample series
//   budget.csv    loss terms at the best sample
//   keys/         keys.csv per pass plus the key store (<id>.bin, <id>.json)
//   plots/*.csv   plot-ready columns

#include <filesystem>
#include <string>
#include <vector>

#include "csv.hpp"
#include "mission.hpp"

namespace skylink {

struct ReportBundle {
    std::filesystem::path dir;
    std::vector<std::filesystem::path> files; // relative to dir, in write order
};

inline std::string verdict_line(const Verdict& v) {
    std::string line = v.passed ? "PASS " : "FAIL ";
    line += v.requirement + " " + v.comparator + " " + format_number(v.threshold);
    if (!v.unit.empty()) line += " " + v.unit;
    line += " (measured " + format_number(v.measured);
    if (!v.unit.empty()) line += " " + v.unit;
    return line + ")";
}

inline std::string summary_text(const MissionReport& r) {
    std::string out;
    for (const auto& [k, v] : r.summary) out += k + " = " + v + "\n";
    out += "\n[requirements]\n";
    for (const auto& v : r.verdicts) out += verdict_line(v) + "\n";
    out += std::string("overall = ") + (r.all_passed() ? "PASS" : "FAIL") + "\n";
    return out;
}

inline ReportBundle emit_report(const MissionReport& r, const std::filesystem::path& dir) {
    ReportBundle b{dir, {}};
    auto put = [&](const std::filesystem::path& rel, const std::string& text) {
        write_text(dir / rel, text);
        b.files.push_back(rel);
    };
    put("summary.txt", summary_text(r));
    put("pass.csv", to_csv(r.pass));
    put("budget.csv", to_csv(r.budget));
    if (r.key_rows) put("keys/keys.csv", to_csv(*r.key_rows));
    if (!r.keys.ids().empty()) {
        r.keys.save(dir / "keys" / "store");
        for (const auto& id : r.keys.ids()) {
            b.files.push_back(std::filesystem::path("keys") / "store" / (id + ".bin"));
            b.files.push_back(std::filesystem::path("keys") / "store" / (id + ".json"));
        }
    }
    for (const auto& [name, table] : r.plots) put(std::filesystem::path("plots") / name, to_csv(table));
    return b;
}

} // namespace skylink
