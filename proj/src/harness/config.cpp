#include "ibfsi/errors.hpp"
#include "ibfsi/harness.hpp"
#include "ibfsi/kernels.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace ibfsi {

namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& where, const std::string& key) {
    throw ConfigError("unknown config key '" + key + "' in " + where);
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) bad_key(where, it.key());
}

double num(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ConfigError(std::string("config key '") + key + "' must be a number");
    return obj[key].get<double>();
}

BenchmarkKind parse_kind(const std::string& name) {
    if (name == "membrane") return BenchmarkKind::Membrane;
    if (name == "band") return BenchmarkKind::Band;
    if (name == "block") return BenchmarkKind::Block;
    if (name == "cook") return BenchmarkKind::Cook;
    if (name == "channel") return BenchmarkKind::Channel;
    if (name == "turek") return BenchmarkKind::TurekHron;
    throw ConfigError("unknown benchmark '" + name +
                      "' (expected membrane|band|block|cook|channel|turek)");
}

} // namespace

void BenchmarkConfig::validate() const {
    DeltaKernel::parse(kernel); // throws on a bad selection string
    if (mfac <= 0.0) throw ConfigError("mfac must be positive");
    if (final_time >= 0.0 && load_time >= 0.0 && load_time > final_time)
        throw ConfigError("load_time must not exceed final_time");
    if (stab.nu_stab != -1.0 && (stab.nu_stab < -1.0 || stab.nu_stab >= 0.5))
        throw ConfigError("nu_stab must lie in [-1, 0.5)");
    if (membrane_tracers < 3) throw ConfigError("need at least 3 tracer points");
}

BenchmarkConfig BenchmarkConfig::from_json_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config must be a JSON object");
    check_keys(root, "config",
               {"benchmark", "kernel", "mfac", "n", "final_time", "dt", "load_time", "out",
                "output_every", "steady_stop", "seed", "probes", "stabilization", "membrane",
                "band", "channel", "turek"});
    if (!root.contains("benchmark")) throw ConfigError("config needs a 'benchmark' key");

    BenchmarkConfig cfg;
    cfg.name = root["benchmark"].get<std::string>();
    cfg.kind = parse_kind(cfg.name);
    if (root.contains("kernel")) cfg.kernel = root["kernel"].get<std::string>();
    cfg.mfac = num(root, "mfac", cfg.mfac);
    cfg.resolution = static_cast<int>(num(root, "n", -1.0));
    cfg.final_time = num(root, "final_time", -1.0);
    cfg.dt = num(root, "dt", -1.0);
    cfg.load_time = num(root, "load_time", -1.0);
    if (root.contains("out")) cfg.out_dir = root["out"].get<std::string>();
    cfg.output_every = static_cast<int>(num(root, "output_every", -1.0));
    if (root.contains("steady_stop")) cfg.steady_stop = root["steady_stop"].get<bool>();
    cfg.seed = static_cast<std::uint64_t>(num(root, "seed", 0.0));

    if (root.contains("probes")) {
        const json& ps = root["probes"];
        if (!ps.is_array()) throw ConfigError("'probes' must be an array");
        for (const json& p : ps) {
            check_keys(p, "probe", {"name", "x", "y"});
            if (!p.contains("name") || !p.contains("x") || !p.contains("y"))
                throw ConfigError("each probe needs name, x, y");
            cfg.probes.push_back({p["name"].get<std::string>(),
                                  {p["x"].get<double>(), p["y"].get<double>()}});
        }
    }
    if (root.contains("stabilization")) {
        const json& st = root["stabilization"];
        check_keys(st, "stabilization", {"nu_stab", "modified_invariants"});
        cfg.stab.nu_stab = num(st, "nu_stab", -1.0);
        if (st.contains("modified_invariants"))
            cfg.stab.modified_invariants = st["modified_invariants"].get<bool>();
    }
    if (root.contains("membrane")) {
        if (cfg.kind != BenchmarkKind::Membrane)
            throw ConfigError("'membrane' section on a non-membrane benchmark");
        const json& m = root["membrane"];
        check_keys(m, "membrane", {"kappa", "tracers"});
        cfg.membrane_kappa = num(m, "kappa", cfg.membrane_kappa);
        cfg.membrane_tracers = static_cast<int>(num(m, "tracers", cfg.membrane_tracers));
    }
    if (root.contains("band")) {
        if (cfg.kind != BenchmarkKind::Band)
            throw ConfigError("'band' section on a non-band benchmark");
        const json& b = root["band"];
        check_keys(b, "band", {"thickness", "traction"});
        cfg.band_thickness = num(b, "thickness", cfg.band_thickness);
        cfg.band_traction = num(b, "traction", cfg.band_traction);
    }
    if (root.contains("channel")) {
        if (cfg.kind != BenchmarkKind::Channel)
            throw ConfigError("'channel' section on a non-channel benchmark");
        const json& c = root["channel"];
        check_keys(c, "channel", {"theta", "mu", "dpdl"});
        cfg.channel_theta = num(c, "theta", cfg.channel_theta);
        cfg.channel_mu = num(c, "mu", cfg.channel_mu);
        cfg.channel_dpdl = num(c, "dpdl", cfg.channel_dpdl);
    }
    if (root.contains("turek")) {
        if (cfg.kind != BenchmarkKind::TurekHron)
            throw ConfigError("'turek' section on a non-turek benchmark");
        const json& t = root["turek"];
        check_keys(t, "turek", {"ramp_time"});
        cfg.turek_ramp = num(t, "ramp_time", cfg.turek_ramp);
    }

    cfg.validate();
    return cfg;
}

BenchmarkConfig BenchmarkConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

void TimeSeries::add_row(const std::vector<double>& row) {
    if (row.size() != columns.size())
        throw InvalidArgumentError("time series row width mismatch");
    if (!rows.empty() && row[0] <= rows.back()[0])
        throw InvalidArgumentError("time series rows must advance in t");
    rows.push_back(row);
}

int TimeSeries::column(const std::string& name) const {
    for (size_t k = 0; k < columns.size(); ++k)
        if (columns[k] == name) return static_cast<int>(k);
    return -1;
}

double TimeSeries::last(const std::string& name) const {
    const int c = column(name);
    if (c < 0 || rows.empty()) throw InvalidArgumentError("no column " + name);
    return rows.back()[c];
}

double TimeSeries::max_abs(const std::string& name) const {
    const int c = column(name);
    if (c < 0) throw InvalidArgumentError("no column " + name);
    double m = 0.0;
    for (const auto& r : rows) m = std::max(m, std::fabs(r[c]));
    return m;
}

double load_ramp(double t, double t_load) {
    if (t_load <= 0.0) return 1.0;
    return std::min(t / t_load, 1.0);
}

} // namespace ibfsi
