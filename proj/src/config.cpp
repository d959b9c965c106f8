#include "nmor/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "nmor/spectrum.hpp"

namespace nmor {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string lower(std::string s) {
    for (char& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

double parse_double(const std::string& raw) {
    if (raw.empty()) throw config_error("empty value");
    char* end = nullptr;
    const double v = std::strtod(raw.c_str(), &end);
    if (end != raw.c_str() + raw.size()) throw config_error("not a number: '" + raw + "'");
    if (!std::isfinite(v)) throw config_error("not finite: '" + raw + "'");
    return v;
}

long long parse_int(const std::string& raw) {
    if (raw.empty()) throw config_error("empty value");
    char* end = nullptr;
    const long long v = std::strtoll(raw.c_str(), &end, 10);
    if (end != raw.c_str() + raw.size()) throw config_error("not an integer: '" + raw + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& raw) {
    if (raw.empty()) throw config_error("empty value");
    if (raw[0] == '-') throw config_error("must be non-negative: '" + raw + "'");
    char* end = nullptr;
    const unsigned long long v = std::strtoull(raw.c_str(), &end, 10);
    if (end != raw.c_str() + raw.size()) throw config_error("not an integer: '" + raw + "'");
    return v;
}

bool parse_bool(const std::string& raw) {
    const std::string v = lower(raw);
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw config_error("not a boolean: '" + raw + "'");
}

std::vector<std::string> split_list(const std::string& raw) {
    std::vector<std::string> out;
    if (trim(raw).empty()) return out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = raw.find(',', start);
        const std::string piece = trim(raw.substr(start, comma - start));
        if (piece.empty()) throw config_error("empty list element");
        out.push_back(piece);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct KeyDef {
    const char* section;
    const char* key;
    std::function<void(ExperimentConfig&, const std::string&)> apply;
    std::function<std::string(const ExperimentConfig&)> dump;
};

const std::vector<KeyDef>& key_table() {
    using C = ExperimentConfig;
    static const std::vector<KeyDef> table = {
        {"probe", "power_mw", [](C& c, const std::string& v) { c.power_w = parse_double(v) / 1e3; },
         [](const C& c) { return fmt(c.power_w * 1e3); }},
        {"probe", "wavelength_nm",
         [](C& c, const std::string& v) { c.wavelength_m = parse_double(v) / 1e9; },
         [](const C& c) { return fmt(c.wavelength_m * 1e9); }},

        {"squeezer", "enabled",
         [](C& c, const std::string& v) { c.squeeze_enabled = parse_bool(v); },
         [](const C& c) { return c.squeeze_enabled ? "true" : "false"; }},
        {"squeezer", "r", [](C& c, const std::string& v) { c.squeeze.r = parse_double(v); },
         [](const C& c) { return fmt(c.squeeze.r); }},
        {"squeezer", "theta_deg",
         [](C& c, const std::string& v) { c.squeeze.theta_rad = parse_double(v) * constants::pi / 180.0; },
         [](const C& c) { return fmt(c.squeeze.theta_rad * 180.0 / constants::pi); }},
        {"squeezer", "excess", [](C& c, const std::string& v) { c.squeeze.excess = parse_double(v); },
         [](const C& c) { return fmt(c.squeeze.excess); }},

        {"cell", "temperature_c",
         [](C& c, const std::string& v) { c.cell.temperature_c = parse_double(v); },
         [](const C& c) { return fmt(c.cell.temperature_c); }},
        {"cell", "length_mm",
         [](C& c, const std::string& v) { c.cell.length_m = parse_double(v) / 1e3; },
         [](const C& c) { return fmt(c.cell.length_m * 1e3); }},
        {"cell", "density_cm3",
         [](C& c, const std::string& v) {
             if (lower(v) == "auto")
                 c.density_cm3.reset();
             else
                 c.density_cm3 = parse_double(v);
         },
         [](const C& c) { return c.density_cm3 ? fmt(*c.density_cm3) : std::string("auto"); }},
        {"cell", "asym", [](C& c, const std::string& v) { c.cell.asym = parse_double(v); },
         [](const C& c) { return fmt(c.cell.asym); }},

        {"noise", "rin_level", [](C& c, const std::string& v) { c.noise.rin_level = parse_double(v); },
         [](const C& c) { return fmt(c.noise.rin_level); }},
        {"noise", "rin_corner_hz",
         [](C& c, const std::string& v) { c.noise.rin_corner_hz = parse_double(v); },
         [](const C& c) { return fmt(c.noise.rin_corner_hz); }},
        {"noise", "rin_knee_hz",
         [](C& c, const std::string& v) { c.noise.rin_knee_hz = parse_double(v); },
         [](const C& c) { return fmt(c.noise.rin_knee_hz); }},
        {"noise", "cmrr_db", [](C& c, const std::string& v) { c.noise.cmrr_db = parse_double(v); },
         [](const C& c) { return fmt(c.noise.cmrr_db); }},
        {"noise", "balanced", [](C& c, const std::string& v) { c.noise.balanced = parse_bool(v); },
         [](const C& c) { return c.noise.balanced ? "true" : "false"; }},
        {"noise", "eta", [](C& c, const std::string& v) { c.noise.eta = parse_double(v); },
         [](const C& c) { return fmt(c.noise.eta); }},
        {"noise", "dark_floor_rel_sql",
         [](C& c, const std::string& v) { c.noise.dark_floor_rel_sql = parse_double(v); },
         [](const C& c) { return fmt(c.noise.dark_floor_rel_sql); }},
        {"noise", "dark_peaks",
         [](C& c, const std::string& v) {
             std::vector<DarkPeak> peaks;
             for (const std::string& item : split_list(v)) {
                 const std::size_t colon = item.find(':');
                 if (colon == std::string::npos)
                     throw config_error("expected freq:height pairs, got '" + item + "'");
                 peaks.push_back({parse_double(trim(item.substr(0, colon))),
                                  parse_double(trim(item.substr(colon + 1)))});
             }
             c.noise.dark_peaks = std::move(peaks);
         },
         [](const C& c) {
             std::string out;
             for (const auto& p : c.noise.dark_peaks) {
                 if (!out.empty()) out += ",";
                 out += fmt(p.freq_hz) + ":" + fmt(p.height_rel_sql);
             }
             return out;
         }},

        {"sweep", "b_min_ut", [](C& c, const std::string& v) { c.b_min_t = parse_double(v) / 1e6; },
         [](const C& c) { return fmt(c.b_min_t * 1e6); }},
        {"sweep", "b_max_ut", [](C& c, const std::string& v) { c.b_max_t = parse_double(v) / 1e6; },
         [](const C& c) { return fmt(c.b_max_t * 1e6); }},
        {"sweep", "b_points",
         [](C& c, const std::string& v) { c.b_points = int(parse_int(v)); },
         [](const C& c) { return std::to_string(c.b_points); }},
        {"sweep", "temperatures_c",
         [](C& c, const std::string& v) {
             std::vector<double> temps;
             for (const std::string& item : split_list(v)) temps.push_back(parse_double(item));
             c.temperatures_c = std::move(temps);
         },
         [](const C& c) {
             std::string out;
             for (double t : c.temperatures_c) {
                 if (!out.empty()) out += ",";
                 out += fmt(t);
             }
             return out;
         }},
        {"sweep", "detection_freq_hz",
         [](C& c, const std::string& v) { c.detection_freq_hz = parse_double(v); },
         [](const C& c) { return fmt(c.detection_freq_hz); }},

        {"spectrum", "sample_rate_hz",
         [](C& c, const std::string& v) { c.sample_rate_hz = parse_double(v); },
         [](const C& c) { return fmt(c.sample_rate_hz); }},
        {"spectrum", "duration_s",
         [](C& c, const std::string& v) { c.duration_s = parse_double(v); },
         [](const C& c) { return fmt(c.duration_s); }},
        {"spectrum", "rbw_hz", [](C& c, const std::string& v) { c.rbw_hz = parse_double(v); },
         [](const C& c) { return fmt(c.rbw_hz); }},
        {"spectrum", "averages",
         [](C& c, const std::string& v) { c.averages = int(parse_int(v)); },
         [](const C& c) { return std::to_string(c.averages); }},
        {"spectrum", "mod_freq_hz",
         [](C& c, const std::string& v) { c.mod_freq_hz = parse_double(v); },
         [](const C& c) { return fmt(c.mod_freq_hz); }},
        {"spectrum", "mod_b_amp_nt",
         [](C& c, const std::string& v) { c.mod_b_amp_t = parse_double(v) / 1e9; },
         [](const C& c) { return fmt(c.mod_b_amp_t * 1e9); }},

        {"output", "directory", [](C& c, const std::string& v) { c.out_directory = v; },
         [](const C& c) { return c.out_directory; }},
        {"output", "formats",
         [](C& c, const std::string& v) {
             std::vector<std::string> fs;
             for (const std::string& item : split_list(v)) fs.push_back(lower(item));
             c.formats = std::move(fs);
         },
         [](const C& c) {
             std::string out;
             for (const auto& f : c.formats) {
                 if (!out.empty()) out += ",";
                 out += f;
             }
             return out;
         }},

        {"run", "seed", [](C& c, const std::string& v) { c.seed = parse_u64(v); },
         [](const C& c) { return std::to_string(c.seed); }},
    };
    return table;
}

const KeyDef* find_key(const std::string& section, const std::string& key) {
    for (const KeyDef& def : key_table())
        if (section == def.section && key == def.key) return &def;
    return nullptr;
}

bool known_section(const std::string& section) {
    for (const KeyDef& def : key_table())
        if (section == def.section) return true;
    return false;
}

// A '#' or ';' at the start of the line or after whitespace opens a comment.
std::string strip_comment(const std::string& line) {
    for (std::size_t i = 0; i < line.size(); ++i) {
        if ((line[i] == '#' || line[i] == ';') &&
            (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1]))))
            return line.substr(0, i);
    }
    return line;
}

}  // namespace

SqueezeParams ExperimentConfig::effective_squeeze() const {
    return squeeze_enabled ? squeeze : SqueezeParams{0.0, 0.0, 1.0};
}

double ExperimentConfig::density() const {
    return density_cm3 ? *density_cm3 : vapor_density(cell.temperature_c);
}

ExperimentConfig default_config() { return ExperimentConfig{}; }

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    ExperimentConfig cfg = default_config();
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    auto where = [&] { return source + ":" + std::to_string(lineno) + ": "; };
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error(where() + "unterminated section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (!known_section(section))
                throw config_error(where() + "unknown section [" + section + "]");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error(where() + "expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw config_error(where() + "missing key before '='");
        if (section.empty())
            throw config_error(where() + "'" + key + "' appears outside any [section]");
        const KeyDef* def = find_key(section, key);
        if (!def)
            throw config_error(where() + "[" + section + "] " + key + ": unknown key");
        try {
            def->apply(cfg, value);
        } catch (const config_error& e) {
            throw config_error(where() + "[" + section + "] " + key + ": " + e.what());
        }
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error(path + ": cannot read config file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path);
}

void apply_key(ExperimentConfig& cfg, const std::string& dotted_key, const std::string& value) {
    const std::size_t dot = dotted_key.find('.');
    if (dot == std::string::npos)
        throw config_error("expected 'section.key', got '" + dotted_key + "'");
    const std::string section = trim(dotted_key.substr(0, dot));
    const std::string key = trim(dotted_key.substr(dot + 1));
    const KeyDef* def = find_key(section, key);
    if (!def) throw config_error("[" + section + "] " + key + ": unknown key");
    try {
        def->apply(cfg, trim(value));
    } catch (const config_error& e) {
        throw config_error("[" + section + "] " + key + ": " + e.what());
    }
}

std::vector<std::string> validation_errors(const ExperimentConfig& cfg) {
    std::vector<std::string> errs;
    auto bad = [&](const char* sec, const char* key, const std::string& msg) {
        errs.push_back(std::string("[") + sec + "] " + key + ": " + msg);
    };

    if (!(cfg.power_w > 0.0) || cfg.power_w > 1.0) bad("probe", "power_mw", "must lie in (0, 1000] mW");
    if (cfg.wavelength_m < 200e-9 || cfg.wavelength_m > 5e-6)
        bad("probe", "wavelength_nm", "must lie in [200, 5000] nm");

    if (cfg.squeeze.r < 0.0 || cfg.squeeze.r > 3.0) bad("squeezer", "r", "must lie in [0, 3]");
    if (cfg.squeeze.excess < 1.0 || cfg.squeeze.excess > 100.0)
        bad("squeezer", "excess", "must lie in [1, 100]");
    if (!std::isfinite(cfg.squeeze.theta_rad)) bad("squeezer", "theta_deg", "must be finite");

    if (!(cfg.cell.length_m > 0.0) || cfg.cell.length_m > 1.0)
        bad("cell", "length_mm", "must lie in (0, 1000] mm");
    if (cfg.cell.asym < -1.0 || cfg.cell.asym > 1.0) bad("cell", "asym", "must lie in [-1, 1]");
    if (cfg.density_cm3) {
        if (!(*cfg.density_cm3 >= 0.0) || *cfg.density_cm3 > 1e16)
            bad("cell", "density_cm3", "must lie in [0, 1e16] cm^-3, or 'auto'");
    } else {
        try {
            vapor_density(cfg.cell.temperature_c);
        } catch (const std::exception& e) {
            bad("cell", "temperature_c", e.what());
        }
    }

    if (cfg.noise.rin_level < 0.0 || cfg.noise.rin_level > 1e-6)
        bad("noise", "rin_level", "must lie in [0, 1e-6] /Hz");
    if (!(cfg.noise.rin_corner_hz > 0.0) || cfg.noise.rin_corner_hz > 1e9)
        bad("noise", "rin_corner_hz", "must lie in (0, 1e9] Hz");
    if (!(cfg.noise.rin_knee_hz > 0.0) || cfg.noise.rin_knee_hz > 1e9)
        bad("noise", "rin_knee_hz", "must lie in (0, 1e9] Hz");
    if (cfg.noise.cmrr_db < 0.0 || cfg.noise.cmrr_db > 120.0)
        bad("noise", "cmrr_db", "must lie in [0, 120] dB");
    if (cfg.noise.eta < 0.0 || cfg.noise.eta > 1.0) bad("noise", "eta", "must lie in [0, 1]");
    if (cfg.noise.dark_floor_rel_sql < 0.0 || cfg.noise.dark_floor_rel_sql > 1e6)
        bad("noise", "dark_floor_rel_sql", "must lie in [0, 1e6]");
    for (const auto& p : cfg.noise.dark_peaks) {
        if (!(p.freq_hz > 0.0) || p.height_rel_sql < 0.0) {
            bad("noise", "dark_peaks", "each peak needs freq > 0 and height >= 0");
            break;
        }
    }

    if (!(cfg.b_min_t < cfg.b_max_t)) bad("sweep", "b_min_ut", "must be below b_max_ut");
    if (cfg.b_points < 2 || cfg.b_points > 2000001)
        bad("sweep", "b_points", "must lie in [2, 2000001]");
    if (cfg.temperatures_c.empty()) {
        bad("sweep", "temperatures_c", "must not be empty");
    } else {
        for (double t : cfg.temperatures_c) {
            try {
                vapor_density(t);
            } catch (const std::exception& e) {
                bad("sweep", "temperatures_c", fmt(t) + ": " + e.what());
                break;
            }
        }
    }
    if (!(cfg.detection_freq_hz > 0.0) || cfg.detection_freq_hz > 100e6)
        bad("sweep", "detection_freq_hz", "must lie in (0, 100e6] Hz");

    const bool spectrum_base_ok = cfg.sample_rate_hz > 0.0 && cfg.sample_rate_hz <= 1e9 &&
                                  cfg.rbw_hz > 0.0 && cfg.averages >= 1 && cfg.averages <= 1000000 &&
                                  cfg.duration_s > 0.0 && cfg.duration_s <= 3600.0;
    if (!(cfg.sample_rate_hz > 0.0) || cfg.sample_rate_hz > 1e9)
        bad("spectrum", "sample_rate_hz", "must lie in (0, 1e9] Hz");
    if (!(cfg.rbw_hz > 0.0)) bad("spectrum", "rbw_hz", "must be positive");
    if (cfg.averages < 1 || cfg.averages > 1000000)
        bad("spectrum", "averages", "must lie in [1, 1000000]");
    if (!(cfg.duration_s > 0.0) || cfg.duration_s > 3600.0)
        bad("spectrum", "duration_s", "must lie in (0, 3600] s");
    if (spectrum_base_ok) {
        if (1.5 * cfg.sample_rate_hz / cfg.rbw_hz < 16.0) {
            bad("spectrum", "rbw_hz", "too wide for sample_rate_hz");
        } else {
            const double need = welch_min_duration_s(cfg.sample_rate_hz, cfg.rbw_hz, cfg.averages);
            if (cfg.duration_s < need)
                bad("spectrum", "duration_s",
                    "record too short for this rbw_hz and averages; need at least " + fmt(need) + " s");
        }
    }
    if (cfg.mod_freq_hz < 0.0) bad("spectrum", "mod_freq_hz", "must be non-negative");
    if (cfg.mod_freq_hz > 0.0 && cfg.mod_freq_hz >= cfg.sample_rate_hz / 2.0)
        bad("spectrum", "mod_freq_hz", "must be below sample_rate_hz / 2");
    if (cfg.mod_b_amp_t < 0.0) bad("spectrum", "mod_b_amp_nt", "must be non-negative");
    if (cfg.mod_b_amp_t > 0.0 && cfg.mod_freq_hz == 0.0)
        bad("spectrum", "mod_freq_hz", "must be set when mod_b_amp_nt > 0");

    if (cfg.formats.empty()) bad("output", "formats", "must not be empty");
    for (const auto& f : cfg.formats) {
        if (f != "csv" && f != "json" && f != "svg") {
            bad("output", "formats", "unknown format '" + f + "' (expected csv, json or svg)");
            break;
        }
    }

    return errs;
}

void validate(const ExperimentConfig& cfg) {
    const std::vector<std::string> errs = validation_errors(cfg);
    if (errs.empty()) return;
    std::string msg;
    for (const auto& e : errs) {
        if (!msg.empty()) msg += "\n";
        msg += e;
    }
    throw config_error(msg);
}

std::string canonical_text(const ExperimentConfig& cfg) {
    std::string out, section;
    for (const KeyDef& def : key_table()) {
        if (section != def.section) {
            section = def.section;
            if (!out.empty()) out += "\n";
            out += "[" + section + "]\n";
        }
        out += std::string(def.key) + " = " + def.dump(cfg) + "\n";
    }
    return out;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) { return fnv1a(canonical_text(cfg)); }

}  // namespace nmor
