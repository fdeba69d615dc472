#include "satfl/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "satfl/error.hpp"

namespace satfl {

namespace {

enum class Unit { None, Km, Deg, Dbm, Dbi, Hz, Kelvin, Seconds, Hours, Bits };

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Converts `value` given in `unit` (case-insensitive text) into the key unit.
std::optional<double> convert(double value, std::string_view unit_text, Unit key_unit) {
    const std::string u = lower(unit_text);
    if (u.empty()) return value;
    switch (key_unit) {
        case Unit::None: return std::nullopt;
        case Unit::Km:
            if (u == "km") return value;
            if (u == "m") return value * 1e-3;
            return std::nullopt;
        case Unit::Deg:
            if (u == "deg") return value;
            if (u == "rad") return orbital::rad_to_deg(value);
            return std::nullopt;
        case Unit::Dbm:
            if (u == "dbm") return value;
            if (u == "dbw") return value + 30.0;
            if (u == "w") return link::watts_to_dbm(value);
            if (u == "mw") return link::linear_to_db(value);
            return std::nullopt;
        case Unit::Dbi:
            if (u == "dbi" || u == "db") return value;
            if (u == "lin") return link::linear_to_db(value);
            return std::nullopt;
        case Unit::Hz:
            if (u == "hz") return value;
            if (u == "khz") return value * 1e3;
            if (u == "mhz") return value * 1e6;
            if (u == "ghz") return value * 1e9;
            return std::nullopt;
        case Unit::Kelvin:
            if (u == "k") return value;
            return std::nullopt;
        case Unit::Seconds:
            if (u == "s") return value;
            if (u == "min") return value * 60.0;
            if (u == "h") return value * 3600.0;
            return std::nullopt;
        case Unit::Hours:
            if (u == "h") return value;
            if (u == "min") return value / 60.0;
            if (u == "s") return value / 3600.0;
            return std::nullopt;
        case Unit::Bits:
            if (u == "bit" || u == "bits") return value;
            if (u == "kbit") return value * 1e3;
            if (u == "mbit") return value * 1e6;
            return std::nullopt;
    }
    return std::nullopt;
}

class LineParser {
public:
    LineParser(const std::string& source, int line) : source_(source), line_(line) {}

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_, what); }

    double quantity(std::string_view key, std::string_view text, Unit unit) const {
        text = trim(text);
        double v = 0.0;
        const auto* first = text.data();
        const auto* last = text.data() + text.size();
        if (!text.empty() && *first == '+') ++first;
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || !std::isfinite(v)) fail("'" + std::string(key) + "': expected a number, got '" + std::string(text) + "'");
        const auto unit_text = trim(std::string_view(ptr, static_cast<std::size_t>(last - ptr)));
        std::optional<double> out;
        try {
            out = convert(v, unit_text, unit);
        } catch (const DomainError& e) {
            fail("'" + std::string(key) + "': " + e.what());
        }
        if (!out) fail("'" + std::string(key) + "': unit '" + std::string(unit_text) + "' not accepted here");
        return *out;
    }

    double positive(std::string_view key, std::string_view text, Unit unit) const {
        const double v = quantity(key, text, unit);
        if (!(v > 0.0)) fail("'" + std::string(key) + "' must be positive");
        return v;
    }

    long integer(std::string_view key, std::string_view text, long min_value) const {
        text = trim(text);
        long v = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            fail("'" + std::string(key) + "': expected an integer, got '" + std::string(text) + "'");
        }
        if (v < min_value) fail("'" + std::string(key) + "' must be >= " + std::to_string(min_value));
        return v;
    }

    bool boolean(std::string_view key, std::string_view text) const {
        const auto t = lower(trim(text));
        if (t == "true" || t == "on" || t == "yes" || t == "1") return true;
        if (t == "false" || t == "off" || t == "no" || t == "0") return false;
        fail("'" + std::string(key) + "': expected true/false, got '" + t + "'");
    }

private:
    const std::string& source_;
    int line_;
};

OrbitConfig parse_orbit(const LineParser& p, std::string_view text) {
    OrbitConfig o;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string token;
    while (in >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) p.fail("orbit token '" + token + "' is not key=value");
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (!seen.insert(key).second) p.fail("orbit field '" + key + "' given twice");
        if (key == "altitude_km") {
            o.altitude_km = p.positive(key, value, Unit::Km);
        } else if (key == "inclination_deg") {
            o.inclination_deg = p.quantity(key, value, Unit::Deg);
            if (o.inclination_deg < 0.0 || o.inclination_deg > 180.0) p.fail("inclination must lie in [0, 180] deg");
        } else if (key == "raan_deg") {
            o.raan_deg = p.quantity(key, value, Unit::Deg);
        } else if (key == "phase_deg") {
            o.phase_deg = p.quantity(key, value, Unit::Deg);
        } else if (key == "count") {
            o.count = static_cast<int>(p.integer(key, value, 1));
        } else {
            p.fail("unknown orbit field '" + key + "'");
        }
    }
    if (!seen.contains("altitude_km")) p.fail("orbit needs altitude_km");
    return o;
}

void assign(const LineParser& p, Scenario& s, const std::string& section, const std::string& key,
            std::string_view value) {
    auto unknown = [&] { p.fail("unknown key '" + key + "' in [" + section + "]"); };
    if (section == "constellation") {
        if (key != "orbit") unknown();
        s.constellation.push_back(parse_orbit(p, value));
    } else if (section == "ground_station") {
        auto& g = s.ground_station;
        if (key == "name") {
            g.name = std::string(trim(value));
            if (g.name.empty()) p.fail("ground station name is empty");
        } else if (key == "latitude_deg") {
            g.latitude_deg = p.quantity(key, value, Unit::Deg);
            if (std::abs(g.latitude_deg) > 90.0) p.fail("latitude must lie in [-90, 90] deg");
        } else if (key == "longitude_deg") {
            g.longitude_deg = p.quantity(key, value, Unit::Deg);
        } else if (key == "min_elevation_deg") {
            g.min_elevation_deg = p.quantity(key, value, Unit::Deg);
            if (g.min_elevation_deg < 0.0 || g.min_elevation_deg >= 90.0) p.fail("min_elevation must lie in [0, 90) deg");
        } else {
            unknown();
        }
    } else if (section == "link") {
        auto& l = s.link;
        if (key == "power_dbm") l.power_dbm = p.quantity(key, value, Unit::Dbm);
        else if (key == "gain_sat_dbi") l.gain_sat_dbi = p.quantity(key, value, Unit::Dbi);
        else if (key == "gain_gs_dbi") l.gain_gs_dbi = p.quantity(key, value, Unit::Dbi);
        else if (key == "bandwidth_hz") l.bandwidth_hz = p.positive(key, value, Unit::Hz);
        else if (key == "noise_temp_k") l.noise_temp_k = p.positive(key, value, Unit::Kelvin);
        else if (key == "carrier_hz") l.carrier_hz = p.positive(key, value, Unit::Hz);
        else if (key == "ul_power_dbm") l.ul_power_dbm = p.quantity(key, value, Unit::Dbm);
        else if (key == "ul_gain_sat_dbi") l.ul_gain_sat_dbi = p.quantity(key, value, Unit::Dbi);
        else if (key == "ul_gain_gs_dbi") l.ul_gain_gs_dbi = p.quantity(key, value, Unit::Dbi);
        else unknown();
    } else if (section == "learner") {
        auto& l = s.learner;
        if (key == "kind") {
            l.kind = std::string(trim(value));
            if (l.kind != "logreg" && l.kind != "mlp") p.fail("learner kind must be logreg or mlp");
        } else if (key == "classes") l.classes = static_cast<int>(p.integer(key, value, 2));
        else if (key == "feature_dim") l.feature_dim = static_cast<int>(p.integer(key, value, 1));
        else if (key == "hidden") l.hidden = static_cast<int>(p.integer(key, value, 1));
        else if (key == "eta") {
            l.eta = p.positive(key, value, Unit::None);
            if (l.eta > 1.0) p.fail("eta must lie in (0, 1]");
        } else if (key == "batch_size") l.batch_size = static_cast<int>(p.integer(key, value, 1));
        else if (key == "local_iters") l.local_iters = static_cast<int>(p.integer(key, value, 0));
        else if (key == "local_epochs") l.local_epochs = static_cast<int>(p.integer(key, value, 1));
        else if (key == "samples_per_class") l.samples_per_class = static_cast<int>(p.integer(key, value, 1));
        else if (key == "test_per_class") l.test_per_class = static_cast<int>(p.integer(key, value, 1));
        else if (key == "spread") {
            l.spread = p.quantity(key, value, Unit::None);
            if (l.spread < 0.0) p.fail("spread must be non-negative");
        } else if (key == "partition") {
            l.partition = std::string(trim(value));
            if (l.partition != "altitude" && l.partition != "iid") p.fail("partition must be altitude or iid");
        } else unknown();
    } else if (section == "compute") {
        auto& c = s.compute;
        if (key == "train_time_s") c.train_time_s = p.positive(key, value, Unit::Seconds);
        else if (key == "cycles_per_bit") c.cycles_per_bit = p.positive(key, value, Unit::None);
        else if (key == "cpu_hz") c.cpu_hz = p.positive(key, value, Unit::Hz);
        else unknown();
    } else if (section == "scheduler") {
        auto& c = s.scheduler;
        if (key == "policy") {
            try {
                c.policy = scheduler::parse_policy(std::string(trim(value)));
            } catch (const ValidationError& e) {
                p.fail(e.what());
            }
        } else if (key == "strict_online_budget") c.strict_online_budget = p.boolean(key, value);
        else if (key == "max_concurrent_links") c.max_concurrent_links = static_cast<int>(p.integer(key, value, 0));
        else unknown();
    } else if (section == "sim") {
        auto& c = s.sim;
        if (key == "horizon_h") c.horizon_h = p.positive(key, value, Unit::Hours);
        else if (key == "eval_period_s") c.eval_period_s = p.positive(key, value, Unit::Seconds);
        else if (key == "seed") c.seed = static_cast<std::uint64_t>(p.integer(key, value, 0));
        else if (key == "coarse_step_s") {
            c.coarse_step_s = p.positive(key, value, Unit::Seconds);
            if (c.coarse_step_s > orbital::kMaxCoarseStep) p.fail("coarse_step_s must be <= 10 s");
        } else if (key == "model_bits") c.model_bits = p.positive(key, value, Unit::Bits);
        else if (key == "accuracy_threshold") {
            c.accuracy_threshold = p.quantity(key, value, Unit::None);
            if (*c.accuracy_threshold < 0.0 || *c.accuracy_threshold > 1.0) p.fail("accuracy_threshold must lie in [0, 1]");
        } else unknown();
    } else {
        p.fail("unknown section [" + section + "]");
    }
}

}  // namespace

std::string format_number(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

std::vector<orbital::OrbitSpec> Scenario::orbit_specs() const {
    std::vector<orbital::OrbitSpec> out;
    for (const auto& o : constellation) {
        out.push_back({o.altitude_km * 1e3, orbital::deg_to_rad(o.inclination_deg), orbital::deg_to_rad(o.raan_deg),
                       orbital::deg_to_rad(o.phase_deg), o.count});
    }
    return out;
}

orbital::GroundStation Scenario::station() const {
    return {orbital::deg_to_rad(ground_station.latitude_deg), orbital::deg_to_rad(ground_station.longitude_deg),
            orbital::deg_to_rad(ground_station.min_elevation_deg)};
}

link::LinkBudget Scenario::downlink_budget() const {
    return link::LinkBudget::from_db(link.power_dbm, link.gain_sat_dbi, link.gain_gs_dbi, link.bandwidth_hz,
                                     link.noise_temp_k, link.carrier_hz);
}

link::LinkBudget Scenario::uplink_budget() const {
    return link::LinkBudget::from_db(link.ul_power_dbm.value_or(link.power_dbm),
                                     link.ul_gain_sat_dbi.value_or(link.gain_sat_dbi),
                                     link.ul_gain_gs_dbi.value_or(link.gain_gs_dbi), link.bandwidth_hz,
                                     link.noise_temp_k, link.carrier_hz);
}

Scenario parse_scenario(std::string_view text, const std::string& source) {
    Scenario s;
    std::string section;
    std::set<std::string> seen_sections;
    std::set<std::string> seen_keys;
    bool have_lat = false, have_lon = false;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        LineParser p(source, line_no);

        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const auto line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') p.fail("unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!seen_sections.insert(section).second) p.fail("section [" + section + "] appears twice");
            continue;
        }
        if (section.empty()) p.fail("key outside of any section");
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) p.fail("expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) p.fail("empty key");
        if (value.empty()) p.fail("'" + key + "' has no value");
        if (key != "orbit" && !seen_keys.insert(section + "." + key).second) p.fail("'" + key + "' given twice");
        if (section == "ground_station") {
            have_lat = have_lat || key == "latitude_deg";
            have_lon = have_lon || key == "longitude_deg";
        }
        assign(p, s, section, key, value);
    }

    // train_time_s has a default; an explicit c_k/nu_k pair replaces it.
    if (!seen_keys.contains("compute.train_time_s") &&
        (seen_keys.contains("compute.cycles_per_bit") || seen_keys.contains("compute.cpu_hz"))) {
        s.compute.train_time_s.reset();
    }
    if (!have_lat || !have_lon) throw ParseError(source, line_no, "[ground_station] needs latitude_deg and longitude_deg");
    validate(s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream out;
    const auto n = [](double v) { return format_number(v); };

    out << "[constellation]\n";
    for (const auto& o : s.constellation) {
        out << "orbit = altitude_km=" << n(o.altitude_km) << " inclination_deg=" << n(o.inclination_deg)
            << " raan_deg=" << n(o.raan_deg) << " phase_deg=" << n(o.phase_deg) << " count=" << o.count << "\n";
    }
    const auto& g = s.ground_station;
    out << "\n[ground_station]\nname = " << g.name << "\nlatitude_deg = " << n(g.latitude_deg)
        << "\nlongitude_deg = " << n(g.longitude_deg) << "\nmin_elevation_deg = " << n(g.min_elevation_deg) << "\n";

    const auto& l = s.link;
    out << "\n[link]\npower_dbm = " << n(l.power_dbm) << "\ngain_sat_dbi = " << n(l.gain_sat_dbi)
        << "\ngain_gs_dbi = " << n(l.gain_gs_dbi) << "\nbandwidth_hz = " << n(l.bandwidth_hz)
        << "\nnoise_temp_k = " << n(l.noise_temp_k) << "\ncarrier_hz = " << n(l.carrier_hz) << "\n";
    if (l.ul_power_dbm) out << "ul_power_dbm = " << n(*l.ul_power_dbm) << "\n";
    if (l.ul_gain_sat_dbi) out << "ul_gain_sat_dbi = " << n(*l.ul_gain_sat_dbi) << "\n";
    if (l.ul_gain_gs_dbi) out << "ul_gain_gs_dbi = " << n(*l.ul_gain_gs_dbi) << "\n";

    const auto& le = s.learner;
    out << "\n[learner]\nkind = " << le.kind << "\nclasses = " << le.classes << "\nfeature_dim = " << le.feature_dim
        << "\nhidden = " << le.hidden << "\neta = " << n(le.eta) << "\nbatch_size = " << le.batch_size
        << "\nlocal_iters = " << le.local_iters << "\nlocal_epochs = " << le.local_epochs
        << "\nsamples_per_class = " << le.samples_per_class << "\ntest_per_class = " << le.test_per_class
        << "\nspread = " << n(le.spread) << "\npartition = " << le.partition << "\n";

    out << "\n[compute]\n";
    if (s.compute.train_time_s) out << "train_time_s = " << n(*s.compute.train_time_s) << "\n";
    if (s.compute.cycles_per_bit) out << "cycles_per_bit = " << n(*s.compute.cycles_per_bit) << "\n";
    if (s.compute.cpu_hz) out << "cpu_hz = " << n(*s.compute.cpu_hz) << "\n";

    out << "\n[scheduler]\npolicy = " << scheduler::to_string(s.scheduler.policy)
        << "\nstrict_online_budget = " << (s.scheduler.strict_online_budget ? "true" : "false")
        << "\nmax_concurrent_links = " << s.scheduler.max_concurrent_links << "\n";

    out << "\n[sim]\nhorizon_h = " << n(s.sim.horizon_h) << "\neval_period_s = " << n(s.sim.eval_period_s)
        << "\nseed = " << s.sim.seed << "\ncoarse_step_s = " << n(s.sim.coarse_step_s) << "\n";
    if (s.sim.model_bits) out << "model_bits = " << n(*s.sim.model_bits) << "\n";
    if (s.sim.accuracy_threshold) out << "accuracy_threshold = " << n(*s.sim.accuracy_threshold) << "\n";
    return out.str();
}

void validate(const Scenario& s) {
    for (const auto& o : s.constellation) {
        if (!(o.altitude_km > 0.0) || o.count < 1) throw ValidationError("orbit needs positive altitude and count");
    }
    const bool by_time = s.compute.train_time_s.has_value();
    const bool by_cycles = s.compute.cycles_per_bit.has_value() || s.compute.cpu_hz.has_value();
    if (by_time && by_cycles) throw ValidationError("[compute] takes either train_time_s or cycles_per_bit + cpu_hz");
    if (!by_time && !(s.compute.cycles_per_bit && s.compute.cpu_hz)) {
        throw ValidationError("[compute] needs train_time_s or both cycles_per_bit and cpu_hz");
    }
    if (!(s.sim.horizon_h > 0.0) || !(s.sim.eval_period_s > 0.0)) throw ValidationError("horizon and eval period must be positive");
    if (!(s.sim.coarse_step_s > 0.0) || s.sim.coarse_step_s > orbital::kMaxCoarseStep) {
        throw ValidationError("coarse_step_s must lie in (0, 10]");
    }
    if (s.scheduler.max_concurrent_links < 0) throw ValidationError("max_concurrent_links must be >= 0");

    std::set<double> altitudes;
    for (const auto& o : s.constellation) altitudes.insert(o.altitude_km);
    const auto groups = s.learner.partition == "altitude" ? std::max<std::size_t>(1, altitudes.size()) : 1;
    if (s.learner.classes % static_cast<int>(groups) != 0) {
        throw ValidationError("learner.classes = " + std::to_string(s.learner.classes) + " cannot be split across " +
                              std::to_string(groups) + " altitude groups");
    }
    try {
        s.downlink_budget();
        s.uplink_budget();
    } catch (const DomainError& e) {
        throw ValidationError(std::string("[link] ") + e.what());
    }
}

}  // namespace satfl
