#pragma once

// Text format for scenarios: [section] headers, `key = value unit` lines,
// `#` comments. Dimensioned values must carry a unit suffix.

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "scenario.hpp"

#ifndef SKYLINK_DEFAULT_PRESET_DIR
#define SKYLINK_DEFAULT_PRESET_DIR "presets"
#endif

namespace skylink {

enum class Dim { none, length, angle, small_angle, frequency, time, loss, data, text, integer, list };

struct UnitDef {
    std::string_view name;
    double factor; // to the stored unit
};

inline std::vector<UnitDef> units_for(Dim d) {
    switch (d) {
    case Dim::length: return {{"m", 1.0}, {"km", 1e3}, {"cm", 1e-2}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}};
    case Dim::angle: return {{"deg", 1.0}};
    case Dim::small_angle: return {{"rad", 1.0}, {"mrad", 1e-3}, {"urad", 1e-6}, {"nrad", 1e-9}};
    case Dim::frequency: return {{"Hz", 1.0}, {"cps", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
    case Dim::time:
        return {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12}, {"fs", 1e-15},
                {"min", 60.0}, {"h", 3600.0}};
    case Dim::loss: return {{"dB", 1.0}};
    case Dim::data: return {{"bit", 1.0}, {"kbit", 1e3}, {"Mbit", 1e6}, {"Gbit", 1e9}, {"B", 8.0}, {"kB", 8e3}};
    default: return {};
    }
}

namespace detail {

inline std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

inline std::string nearest(std::string_view word, const std::vector<std::string_view>& options) {
    std::string_view best;
    std::size_t best_d = static_cast<std::size_t>(-1);
    for (auto o : options) {
        const std::size_t d = edit_distance(word, o);
        if (d < best_d) {
            best_d = d;
            best = o;
        }
    }
    return std::string(best);
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

inline bool parse_double(const std::string& token, double& out) {
    const char* end = token.data() + token.size();
    auto [p, ec] = std::from_chars(token.data(), end, out);
    return ec == std::errc() && p == end;
}

/// Shortest text that reads back as exactly `x`.
inline std::string shortest(double x) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, p);
}

} // namespace detail

using FieldValue = std::variant<double, std::optional<double>, std::string, std::vector<double>, std::int64_t>;

template <typename Owner>
struct FieldSpec {
    std::string_view key;
    Dim dim;
    std::string_view unit; // preferred unit when writing
    std::function<FieldValue(const Owner&)> get;
    std::function<void(Owner&, const FieldValue&)> set;
};

namespace detail {

template <typename Owner, typename Member>
FieldSpec<Owner> num(std::string_view key, Dim dim, std::string_view unit, Member Owner::*m) {
    return {key, dim, unit, [m](const Owner& o) { return FieldValue(static_cast<double>(o.*m)); },
            [m](Owner& o, const FieldValue& v) { o.*m = std::get<double>(v); }};
}

template <typename Owner, typename Member>
FieldSpec<Owner> integer(std::string_view key, Member Owner::*m) {
    return {key, Dim::integer, "", [m](const Owner& o) { return FieldValue(static_cast<std::int64_t>(o.*m)); },
            [m](Owner& o, const FieldValue& v) { o.*m = static_cast<Member>(std::get<std::int64_t>(v)); }};
}

template <typename Owner>
FieldSpec<Owner> list(std::string_view key, std::vector<double> Owner::*m) {
    return {key, Dim::list, "", [m](const Owner& o) { return FieldValue(o.*m); },
            [m](Owner& o, const FieldValue& v) { o.*m = std::get<std::vector<double>>(v); }};
}

template <typename Owner>
FieldSpec<Owner> text(std::string_view key, std::function<std::string(const Owner&)> get,
                      std::function<void(Owner&, const std::string&)> set) {
    return {key, Dim::text, "", [get](const Owner& o) { return FieldValue(get(o)); },
            [set](Owner& o, const FieldValue& v) { set(o, std::get<std::string>(v)); }};
}

inline MissionKind mission_kind_from(const std::string& s) {
    std::vector<std::string_view> names;
    for (const auto& [kind, name] : mission_kind_names) {
        if (name == s) return kind;
        names.push_back(name);
    }
    throw Error(ErrorKind::validation, "unknown mission kind '" + s + "', nearest is '" + nearest(s, names) + "'");
}

inline std::string bsm_mode_name(BsmMode m) {
    switch (m) {
    case BsmMode::full: return "full";
    case BsmMode::linear_optics: return "linear-optics";
    case BsmMode::singlet_only: return "singlet-only";
    }
    return "?";
}

inline BsmMode bsm_mode_from(const std::string& s) {
    if (s == "full") return BsmMode::full;
    if (s == "linear-optics") return BsmMode::linear_optics;
    if (s == "singlet-only") return BsmMode::singlet_only;
    throw Error(ErrorKind::validation, "unknown BSM mode '" + s + "', nearest is '" +
                                           nearest(s, {"full", "linear-optics", "singlet-only"}) + "'");
}

} // namespace detail

struct ScenarioSchema {
    std::vector<FieldSpec<MissionSection>> mission;
    std::vector<FieldSpec<OrbitSection>> orbit;
    std::vector<FieldSpec<StationConfig>> stations;
    std::vector<FieldSpec<SourceSection>> source;
    std::vector<FieldSpec<DetectorSection>> detectors;
    std::vector<FieldSpec<AtmosphereSection>> atmosphere;
    std::vector<FieldSpec<ProtocolSection>> protocol;
    std::vector<FieldSpec<SeedSection>> seeds;
};

inline const ScenarioSchema& scenario_schema() {
    using namespace detail;
    static const ScenarioSchema schema = [] {
        ScenarioSchema s;
        s.mission = {
            text<MissionSection>(
                "kind", [](const MissionSection& m) { return std::string(to_string(m.kind)); },
                [](MissionSection& m, const std::string& v) { m.kind = mission_kind_from(v); }),
            text<MissionSection>(
                "name", [](const MissionSection& m) { return m.name; },
                [](MissionSection& m, const std::string& v) { m.name = v; }),
            num("max_elevation", Dim::angle, "deg", &MissionSection::max_elevation_deg),
            num("step", Dim::time, "s", &MissionSection::step_s),
            integer("passes", &MissionSection::passes),
            num("baseline", Dim::length, "km", &MissionSection::baseline_m),
            num("cross_track", Dim::length, "km", &MissionSection::cross_track_m),
            num("duration", Dim::time, "s", &MissionSection::duration_s),
            integer("workers", &MissionSection::workers),
        };
        s.orbit = {
            num("altitude", Dim::length, "km", &OrbitSection::altitude_m),
            num("inclination", Dim::angle, "deg", &OrbitSection::inclination_deg),
            integer("satellites", &OrbitSection::satellites),
        };
        s.stations = {
            text<StationConfig>(
                "name", [](const StationConfig& c) { return c.site.name; },
                [](StationConfig& c, const std::string& v) { c.site.name = v; }),
            {"latitude", Dim::angle, "deg", [](const StationConfig& c) { return FieldValue(c.site.latitude_deg); },
             [](StationConfig& c, const FieldValue& v) { c.site.latitude_deg = std::get<double>(v); }},
            {"altitude", Dim::length, "m", [](const StationConfig& c) { return FieldValue(c.site.altitude_m); },
             [](StationConfig& c, const FieldValue& v) { c.site.altitude_m = std::get<double>(v); }},
            {"min_elevation", Dim::angle, "deg",
             [](const StationConfig& c) { return FieldValue(c.site.min_elevation_deg); },
             [](StationConfig& c, const FieldValue& v) { c.site.min_elevation_deg = std::get<double>(v); }},
            num("aperture", Dim::length, "m", &StationConfig::aperture_m),
            num("receiver_efficiency", Dim::none, "", &StationConfig::receiver_efficiency),
            num("pointing_jitter", Dim::small_angle, "urad", &StationConfig::pointing_jitter_rad),
            num("zenith_transmittance", Dim::none, "", &StationConfig::zenith_transmittance),
            num("background", Dim::frequency, "Hz", &StationConfig::background_cps),
        };
        s.source = {
            text<SourceSection>(
                "type", [](const SourceSection& c) { return std::string(c.type == SourceType::wcp ? "wcp" : "spdc"); },
                [](SourceSection& c, const std::string& v) {
                    if (v == "wcp") c.type = SourceType::wcp;
                    else if (v == "spdc") c.type = SourceType::spdc;
                    else throw Error(ErrorKind::validation, "source.type must be wcp or spdc, got '" + v + "'");
                }),
            num("rep_rate", Dim::frequency, "MHz", &SourceSection::rep_rate_hz),
            list("intensities", &SourceSection::intensities),
            list("probabilities", &SourceSection::probabilities),
            num("basis_bias", Dim::none, "", &SourceSection::basis_bias),
            num("pair_rate", Dim::frequency, "Hz", &SourceSection::pair_rate_hz),
            num("fidelity", Dim::none, "", &SourceSection::fidelity),
            num("wavelength", Dim::length, "nm", &SourceSection::wavelength_m),
            num("divergence", Dim::small_angle, "urad", &SourceSection::divergence_rad),
            num("transmitter_efficiency", Dim::none, "", &SourceSection::transmitter_efficiency),
        };
        s.detectors = {
            num("efficiency", Dim::none, "", &DetectorSection::efficiency),
            num("dark_rate", Dim::frequency, "Hz", &DetectorSection::dark_rate_cps),
            num("dead_time", Dim::time, "ns", &DetectorSection::dead_time_s),
            num("jitter", Dim::time, "ps", &DetectorSection::jitter_s),
            num("window", Dim::time, "ns", &DetectorSection::window_s),
        };
        s.atmosphere = {
            num("rytov_variance", Dim::none, "", &AtmosphereSection::rytov_variance),
            num("fresnel_ratio", Dim::none, "", &AtmosphereSection::fresnel_ratio),
            num("background_scale", Dim::none, "", &AtmosphereSection::background_scale),
            {"fixed_loss", Dim::loss, "dB", [](const AtmosphereSection& a) { return FieldValue(a.fixed_loss_db); },
             [](AtmosphereSection& a, const FieldValue& v) { a.fixed_loss_db = std::get<double>(v); }},
        };
        s.protocol = {
            num("misalignment", Dim::none, "", &ProtocolSection::misalignment),
            num("f_ec", Dim::none, "", &ProtocolSection::f_ec),
            num("epsilon", Dim::none, "", &ProtocolSection::epsilon),
            text<ProtocolSection>(
                "bsm_mode", [](const ProtocolSection& p) { return bsm_mode_name(p.bsm_mode); },
                [](ProtocolSection& p, const std::string& v) { p.bsm_mode = bsm_mode_from(v); }),
            num("bsm_visibility", Dim::none, "", &ProtocolSection::bsm_visibility),
            num("key_budget", Dim::data, "kB", &ProtocolSection::key_budget_bits),
            {"payloads", Dim::data, "B", [](const ProtocolSection& p) { return FieldValue(p.payload_bits); },
             [](ProtocolSection& p, const FieldValue& v) { p.payload_bits = std::get<std::vector<double>>(v); }},
            num("reference_angle", Dim::angle, "deg", &ProtocolSection::reference_angle_deg),
            num("reference_decorrelation", Dim::none, "", &ProtocolSection::reference_decorrelation),
            num("injected_decorrelation", Dim::none, "", &ProtocolSection::injected_decorrelation),
            num("key_per_pass", Dim::data, "Mbit", &ProtocolSection::key_per_pass_bits),
            num("passes_per_year", Dim::none, "", &ProtocolSection::passes_per_year),
            integer("stations_served", &ProtocolSection::stations_served),
            integer("days", &ProtocolSection::days),
        };
        s.seeds = {
            {"master", Dim::integer, "",
             [](const SeedSection& d) { return FieldValue(static_cast<std::int64_t>(d.master)); },
             [](SeedSection& d, const FieldValue& v) { d.master = static_cast<std::uint64_t>(std::get<std::int64_t>(v)); }},
        };
        return s;
    }();
    return schema;
}

inline const std::vector<std::string_view>& scenario_sections() {
    static const std::vector<std::string_view> names{"mission",    "orbit",    "stations", "source",
                                                     "detectors",  "atmosphere", "protocol", "seeds"};
    return names;
}

namespace detail {

struct LineContext {
    std::string source;
    int line = 0;
    std::string section;
    std::string key;

    std::string where() const { return source + ":" + std::to_string(line) + ": " + section + "." + key; }
};

inline FieldValue parse_value(Dim dim, const std::string& raw, const LineContext& ctx) {
    const auto tokens = split_ws(raw);
    require(!tokens.empty(), ErrorKind::parse, ctx.where() + ": missing value");
    auto number = [&](const std::string& t) {
        double x;
        require(parse_double(t, x), ErrorKind::parse, ctx.where() + ": '" + t + "' is not a number");
        return x;
    };
    auto unit_list = [&] {
        std::string s;
        for (const auto& u : units_for(dim)) s += (s.empty() ? "" : ", ") + std::string(u.name);
        return s;
    };
    auto unit_factor = [&](const std::string& u) {
        for (const auto& def : units_for(dim)) {
            if (def.name == u) return def.factor;
        }
        throw Error(ErrorKind::unit, ctx.where() + ": unit '" + u + "' is not valid here, expected one of " +
                                         unit_list());
    };

    switch (dim) {
    case Dim::text:
        require(tokens.size() == 1, ErrorKind::parse, ctx.where() + ": expected a single word");
        return tokens[0];
    case Dim::integer: {
        require(tokens.size() == 1, ErrorKind::parse, ctx.where() + ": expected an integer without unit");
        std::int64_t v;
        const auto& t = tokens[0];
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        require(ec == std::errc() && p == t.data() + t.size(), ErrorKind::parse,
                ctx.where() + ": '" + t + "' is not an integer");
        return v;
    }
    case Dim::list: {
        std::vector<double> xs;
        for (const auto& t : tokens) xs.push_back(number(t));
        return xs;
    }
    case Dim::none:
        if (tokens.size() != 1) {
            double x;
            if (tokens.size() == 2 && parse_double(tokens[0], x)) {
                throw Error(ErrorKind::unit, ctx.where() + ": dimensionless value takes no unit, got '" + tokens[1] + "'");
            }
            throw Error(ErrorKind::parse, ctx.where() + ": expected a single number");
        }
        return number(tokens[0]);
    case Dim::data:
        if (ctx.key == "payloads") {
            // A list of numbers sharing one trailing unit.
            require(tokens.size() >= 2, ErrorKind::unit, ctx.where() + ": missing unit, expected one of " + unit_list());
            const double f = unit_factor(tokens.back());
            std::vector<double> xs;
            for (std::size_t i = 0; i + 1 < tokens.size(); ++i) xs.push_back(number(tokens[i]) * f);
            return xs;
        }
        [[fallthrough]];
    default:
        if (tokens.size() == 1) {
            throw Error(ErrorKind::unit, ctx.where() + ": missing unit, expected one of " + unit_list());
        }
        require(tokens.size() == 2, ErrorKind::parse, ctx.where() + ": expected '<number> <unit>'");
        return number(tokens[0]) * unit_factor(tokens[1]);
    }
}

template <typename Owner>
void apply_field(Owner& owner, const std::vector<FieldSpec<Owner>>& fields, const LineContext& ctx,
                 const std::string& raw) {
    for (const auto& f : fields) {
        if (f.key != ctx.key) continue;
        FieldValue v = parse_value(f.dim, raw, ctx);
        try {
            f.set(owner, v);
        } catch (const Error& e) {
            throw Error(e.kind(), ctx.where() + ": " + e.what());
        }
        return;
    }
    std::vector<std::string_view> keys;
    for (const auto& f : fields) keys.push_back(f.key);
    throw Error(ErrorKind::validation,
                ctx.where() + ": unknown key '" + ctx.key + "', nearest known key is '" + nearest(ctx.key, keys) + "'");
}

inline std::string format_in_unit(double value, Dim dim, std::string_view preferred) {
    for (const auto& u : units_for(dim)) {
        if (u.name != preferred) continue;
        const std::string text = shortest(value / u.factor);
        double back;
        if (parse_double(text, back) && back * u.factor == value) return text + " " + std::string(u.name);
    }
    // Fall back to the stored unit, which always reads back exactly.
    return shortest(value) + " " + std::string(units_for(dim).front().name);
}

template <typename Owner>
void emit_section(std::string& out, std::string_view name, const Owner& owner,
                  const std::vector<FieldSpec<Owner>>& fields) {
    out += "[" + std::string(name) + "]\n";
    for (const auto& f : fields) {
        const FieldValue v = f.get(owner);
        std::string text;
        if (const auto* d = std::get_if<double>(&v)) {
            text = f.dim == Dim::none ? shortest(*d) : format_in_unit(*d, f.dim, f.unit);
        } else if (const auto* o = std::get_if<std::optional<double>>(&v)) {
            if (!*o) continue;
            text = format_in_unit(**o, f.dim, f.unit);
        } else if (const auto* s = std::get_if<std::string>(&v)) {
            text = *s;
        } else if (const auto* i = std::get_if<std::int64_t>(&v)) {
            text = std::to_string(*i);
        } else {
            const auto& xs = std::get<std::vector<double>>(v);
            if (f.dim == Dim::data) {
                // Shared unit only if every entry reads back exactly.
                std::string_view unit = f.unit;
                double factor = 1.0;
                for (const auto& u : units_for(f.dim)) {
                    if (u.name == unit) factor = u.factor;
                }
                bool exact = true;
                for (double x : xs) {
                    double back;
                    exact = exact && parse_double(shortest(x / factor), back) && back * factor == x;
                }
                if (!exact) {
                    unit = units_for(f.dim).front().name;
                    factor = 1.0;
                }
                for (double x : xs) text += shortest(x / factor) + " ";
                text += std::string(unit);
            } else {
                for (std::size_t k = 0; k < xs.size(); ++k) text += (k ? " " : "") + shortest(xs[k]);
            }
        }
        out += std::string(f.key) + " = " + text + "\n";
    }
    out += "\n";
}

} // namespace detail

/// Parses scenario text. `source_name` is used in diagnostics.
inline Scenario parse_scenario_text(const std::string& text, const std::string& source_name = "<scenario>") {
    const auto& schema = scenario_schema();
    Scenario s;
    std::set<std::string> present;
    std::set<std::string> seen_keys;
    detail::LineContext ctx{source_name, 0, "", ""};
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        ++ctx.line;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            require(t.back() == ']', ErrorKind::parse, source_name + ":" + std::to_string(ctx.line) + ": bad section header");
            const std::string name = detail::trim(t.substr(1, t.size() - 2));
            const auto& names = scenario_sections();
            if (std::find(names.begin(), names.end(), name) == names.end()) {
                throw Error(ErrorKind::validation, source_name + ":" + std::to_string(ctx.line) + ": unknown section '" +
                                                       name + "', nearest known section is '" +
                                                       detail::nearest(name, names) + "'");
            }
            if (name != "stations") {
                require(!present.count(name), ErrorKind::validation,
                        source_name + ":" + std::to_string(ctx.line) + ": section '" + name + "' appears twice");
            } else {
                s.stations.emplace_back();
            }
            present.insert(name);
            ctx.section = name;
            seen_keys.clear();
            continue;
        }
        const auto eq = t.find('=');
        require(eq != std::string::npos, ErrorKind::parse,
                source_name + ":" + std::to_string(ctx.line) + ": expected 'key = value'");
        ctx.key = detail::trim(t.substr(0, eq));
        const std::string raw = detail::trim(t.substr(eq + 1));
        require(!ctx.section.empty(), ErrorKind::parse, ctx.where() + ": key outside any section");
        require(seen_keys.insert(ctx.key).second, ErrorKind::validation, ctx.where() + ": key given twice");

        if (ctx.section == "mission") detail::apply_field(s.mission, schema.mission, ctx, raw);
        else if (ctx.section == "orbit") detail::apply_field(s.orbit, schema.orbit, ctx, raw);
        else if (ctx.section == "stations") detail::apply_field(s.stations.back(), schema.stations, ctx, raw);
        else if (ctx.section == "source") detail::apply_field(s.source, schema.source, ctx, raw);
        else if (ctx.section == "detectors") detail::apply_field(s.detectors, schema.detectors, ctx, raw);
        else if (ctx.section == "atmosphere") detail::apply_field(s.atmosphere, schema.atmosphere, ctx, raw);
        else if (ctx.section == "protocol") detail::apply_field(s.protocol, schema.protocol, ctx, raw);
        else detail::apply_field(s.seeds, schema.seeds, ctx, raw);
    }

    require(present.count("mission"), ErrorKind::validation, source_name + ": missing [mission] section");
    std::vector<std::string> required{"seeds"};
    switch (s.mission.kind) {
    case MissionKind::downlink_qkd:
    case MissionKind::relay_exchange:
        required.insert(required.end(), {"orbit", "stations", "source", "detectors"});
        break;
    case MissionKind::two_downlink_entanglement:
    case MissionKind::uplink_teleportation:
    case MissionKind::gravity_test:
        required.insert(required.end(), {"orbit", "stations", "source", "detectors", "atmosphere"});
        break;
    case MissionKind::constellation_plan:
        required.insert(required.end(), {"orbit", "stations", "protocol"});
        break;
    }
    for (const auto& r : required) {
        require(present.count(r), ErrorKind::validation,
                source_name + ": " + std::string(to_string(s.mission.kind)) + " needs a [" + r + "] section");
    }
    s.validate();
    return s;
}

inline std::string emit_scenario(const Scenario& s) {
    const auto& schema = scenario_schema();
    std::string out;
    detail::emit_section(out, "mission", s.mission, schema.mission);
    detail::emit_section(out, "orbit", s.orbit, schema.orbit);
    for (const auto& st : s.stations) detail::emit_section(out, "stations", st, schema.stations);
    detail::emit_section(out, "source", s.source, schema.source);
    detail::emit_section(out, "detectors", s.detectors, schema.detectors);
    detail::emit_section(out, "atmosphere", s.atmosphere, schema.atmosphere);
    detail::emit_section(out, "protocol", s.protocol, schema.protocol);
    detail::emit_section(out, "seeds", s.seeds, schema.seeds);
    out.pop_back();
    return out;
}

inline Scenario parse_scenario(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    require(f.good(), ErrorKind::io, "cannot read " + path.string());
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_scenario_text(buf.str(), path.filename().string());
}

inline std::filesystem::path preset_dir() {
    if (const char* env = std::getenv("SKYLINK_PRESET_DIR"); env && *env) return env;
    return SKYLINK_DEFAULT_PRESET_DIR;
}

inline std::vector<std::string> list_presets() {
    std::vector<std::string> names;
    std::error_code ec;
    for (const auto& e : std::filesystem::directory_iterator(preset_dir(), ec)) {
        if (e.path().extension() == ".scn") names.push_back(e.path().stem().string());
    }
    std::sort(names.begin(), names.end());
    return names;
}

inline std::filesystem::path find_preset(const std::string& name) {
    const auto path = preset_dir() / (name + ".scn");
    if (std::filesystem::exists(path)) return path;
    std::string known;
    for (const auto& n : list_presets()) known += (known.empty() ? "" : ", ") + n;
    throw Error(ErrorKind::io, "no preset '" + name + "' in " + preset_dir().string() + " (available: " + known + ")");
}

inline Scenario load_preset(const std::string& name) { return parse_scenario(find_preset(name)); }

} // namespace skylink
