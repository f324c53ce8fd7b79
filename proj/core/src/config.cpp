#include "implab/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "implab/csv.hpp"

namespace implab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& s) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    if (b < e && *b == '+') ++b; // from_chars rejects a leading '+'
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) throw ValidationError("not a real number: '" + s + "'");
    return v;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

} // namespace

std::complex<double> parse_complex(const std::string& text) {
    const std::string s = trim(text);
    if (s.empty()) throw ValidationError("empty complex literal");

    const bool has_i = s.back() == 'i' || s.back() == 'I';
    if (!has_i) return {parse_real(s), 0.0};

    // Find the sign separating the real part from the imaginary part:
    // the last '+'/'-' that is not leading and not an exponent sign.
    std::size_t split = std::string::npos;
    for (std::size_t k = s.size() - 1; k > 0; --k) {
        const char c = s[k];
        if ((c == '+' || c == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    auto imag_of = [](std::string part) -> double {
        if (part.empty() || part == "+") return 1.0;
        if (part == "-") return -1.0;
        return parse_real(part);
    };
    if (split == std::string::npos)
        return {0.0, imag_of(s.substr(0, s.size() - 1))};
    return {parse_real(s.substr(0, split)), imag_of(s.substr(split, s.size() - 1 - split))};
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

class KeyMap {
  public:
    KeyMap(std::map<std::string, Entry> entries, std::string origin)
        : entries_(std::move(entries)), origin_(std::move(origin)) {}

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::optional<std::string> get(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        it->second.used = true;
        return it->second.value;
    }

    std::string require(const std::string& key) {
        auto v = get(key);
        if (!v) throw ValidationError(origin_ + ": missing required key '" + key + "'");
        return *v;
    }

    template <typename F>
    auto parse_as(const std::string& key, F&& f) -> decltype(f(std::string{})) {
        auto it = entries_.find(key);
        if (it == entries_.end())
            throw ValidationError(origin_ + ": missing required key '" + key + "'");
        it->second.used = true;
        try {
            return f(it->second.value);
        } catch (const ValidationError& e) {
            throw ValidationError(origin_ + ":" + std::to_string(it->second.line) + ": key '" +
                                  key + "': " + e.what());
        }
    }

    void reject_unused() const {
        for (const auto& [key, entry] : entries_)
            if (!entry.used)
                throw ValidationError(origin_ + ":" + std::to_string(entry.line) +
                                      ": unknown key '" + key + "'");
    }

    const std::string& origin() const { return origin_; }

  private:
    std::map<std::string, Entry> entries_;
    std::string origin_;
};

KeyMap scan(const std::string& text, const std::string& origin) {
    std::map<std::string, Entry> entries;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError(origin + ":" + std::to_string(line_no) +
                                  ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ValidationError(origin + ":" + std::to_string(line_no) + ": empty key");
        if (entries.count(key))
            throw ValidationError(origin + ":" + std::to_string(line_no) + ": duplicate key '" +
                                  key + "'");
        entries[key] = Entry{value, line_no, false};
    }
    return KeyMap(std::move(entries), origin);
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    KeyMap keys = scan(text, origin);
    ExperimentConfig cfg;

    // --- germ ---
    if (keys.has("germ.coeffs")) {
        keys.parse_as("germ.coeffs", [&](const std::string& v) {
            for (const auto& tok : split_ws(v)) cfg.germ_coeffs.push_back(parse_complex(tok));
            return 0;
        });
    } else if (keys.has("germ.preset")) {
        const std::string preset = keys.parse_as("germ.preset", [](const std::string& v) {
            if (v != "quadratic" && v != "cubic" && v != "geometric")
                throw ValidationError("preset must be quadratic|cubic|geometric");
            return v;
        });
        int degree = 30;
        if (keys.has("germ.degree"))
            degree = keys.parse_as("germ.degree", [](const std::string& v) {
                return static_cast<int>(parse_real(v));
            });
        if (preset == "quadratic") {
            cfg.germ_coeffs = {1.0};
        } else if (preset == "cubic") {
            cfg.germ_coeffs = {1.0, 1.0};
        } else {
            if (degree < 2) throw ValidationError(origin + ": germ.degree must be >= 2");
            cfg.germ_coeffs.assign(static_cast<std::size_t>(degree - 1), 1.0);
            cfg.germ_kind = "truncation";
        }
    } else {
        throw ValidationError(origin + ": missing germ.coeffs or germ.preset");
    }
    if (keys.has("germ.kind"))
        cfg.germ_kind = keys.parse_as("germ.kind", [](const std::string& v) {
            if (v != "polynomial" && v != "truncation")
                throw ValidationError("germ.kind must be polynomial|truncation");
            return v;
        });
    if (keys.has("germ.eval_radius"))
        cfg.eval_radius = keys.parse_as("germ.eval_radius", [](const std::string& v) {
            const double r = parse_real(v);
            if (!(r > 0)) throw ValidationError("eval_radius must be positive");
            return r;
        });

    // --- schedule ---
    cfg.schedule_kind = keys.require("schedule.kind");
    static const std::vector<std::string> kKinds = {
        "constant",    "linear",          "symmetric_pair", "random_disk",
        "random_discrete", "orbit_doubling", "orbit_rotation", "tabulated"};
    if (std::find(kKinds.begin(), kKinds.end(), cfg.schedule_kind) == kKinds.end())
        throw ValidationError(origin + ": unknown schedule.kind '" + cfg.schedule_kind + "'");

    auto get_complex = [&](const char* key, std::complex<double>& dst) {
        if (keys.has(key))
            dst = keys.parse_as(key, [](const std::string& v) { return parse_complex(v); });
    };
    auto get_real = [&](const char* key, double& dst) {
        if (keys.has(key))
            dst = keys.parse_as(key, [](const std::string& v) { return parse_real(v); });
    };
    get_complex("schedule.sigma", cfg.sigma0);
    get_real("schedule.slope", cfg.slope);
    get_complex("schedule.center", cfg.center);
    get_real("schedule.radius", cfg.radius);
    get_complex("schedule.defect_c", cfg.defect_c);
    get_complex("schedule.obs.c0", cfg.obs_c0);
    get_complex("schedule.obs.c1", cfg.obs_c1);
    get_complex("schedule.obs.c2", cfg.obs_c2);
    get_real("schedule.x0", cfg.x0);
    get_real("schedule.theta", cfg.theta);
    get_complex("schedule.tail.c", cfg.tail_c);
    get_real("schedule.tail.alpha", cfg.tail_alpha);
    if (keys.has("schedule.values"))
        keys.parse_as("schedule.values", [&](const std::string& v) {
            for (const auto& tok : split_ws(v)) cfg.values.push_back(parse_complex(tok));
            return 0;
        });
    if (keys.has("schedule.table"))
        cfg.table_path = keys.parse_as("schedule.table", [](const std::string& v) { return v; });
    if (keys.has("schedule.bound"))
        cfg.bound = keys.parse_as("schedule.bound", [](const std::string& v) {
            const double m = parse_real(v);
            if (!(m >= 0)) throw ValidationError("bound must be >= 0");
            return m;
        });
    if (keys.has("seed"))
        cfg.seed = keys.parse_as("seed", [](const std::string& v) {
            return static_cast<std::uint64_t>(std::stoull(v));
        });

    const bool random_kind =
        cfg.schedule_kind == "random_disk" || cfg.schedule_kind == "random_discrete";
    if (random_kind && !cfg.bound)
        throw ValidationError(origin +
                              ": schedule.bound (uniform bound M) is required for random "
                              "schedules");

    // --- experiment ---
    keys.parse_as("w0", [&](const std::string& v) {
        for (const auto& tok : split_ws(v)) cfg.w0s.push_back(parse_complex(tok));
        return 0;
    });
    if (!keys.has("w0") || cfg.w0s.empty())
        throw ValidationError(origin + ": w0 must list at least one start point");
    keys.parse_as("n", [&](const std::string& v) {
        for (const auto& tok : split_ws(v)) {
            const double x = parse_real(tok);
            if (x < 1 || x != std::floor(x)) throw ValidationError("n entries must be integers >= 1");
            cfg.ns.push_back(static_cast<int>(x));
        }
        return 0;
    });
    if (!keys.has("n") || cfg.ns.empty())
        throw ValidationError(origin + ": n must list at least one scale");

    get_real("beta", cfg.beta);
    if (!(cfg.beta > 0.5 && cfg.beta < 2.0 / 3.0))
        throw ValidationError(origin + ": beta must lie in (1/2, 2/3)");
    get_real("tol", cfg.tol);
    if (!(cfg.tol > 0)) throw ValidationError(origin + ": tol must be positive");
    if (!(cfg.tail_alpha > 0 && cfg.tail_alpha < 1))
        throw ValidationError(origin + ": schedule.tail.alpha must lie in (0,1)");
    if (keys.has("precision"))
        cfg.precision = keys.parse_as("precision", [](const std::string& v) {
            if (v == "double") return Precision::f64;
            if (v == "extended") return Precision::f80;
            throw ValidationError("precision must be double|extended");
        });
    if (keys.has("diagnose"))
        cfg.diagnose = keys.parse_as("diagnose", [](const std::string& v) {
            if (v == "true" || v == "1") return true;
            if (v == "false" || v == "0") return false;
            throw ValidationError("diagnose must be true|false");
        });
    if (keys.has("threads"))
        cfg.threads = keys.parse_as("threads", [](const std::string& v) {
            return static_cast<int>(parse_real(v));
        });
    if (keys.has("output.report"))
        cfg.out_report = keys.parse_as("output.report", [](const std::string& v) { return v; });
    if (keys.has("output.diagnostics"))
        cfg.out_diagnostics =
            keys.parse_as("output.diagnostics", [](const std::string& v) { return v; });
    if (keys.has("output.trace"))
        cfg.out_trace = keys.parse_as("output.trace", [](const std::string& v) { return v; });

    keys.reject_unused();

    // Everything the run depends on, in canonical order, feeds the hash.
    std::ostringstream canon;
    canon.imbue(std::locale::classic());
    canon << "germ.kind=" << cfg.germ_kind << ";germ.eval_radius=" << fmt(cfg.eval_radius)
          << ";germ.coeffs=";
    for (const auto& c : cfg.germ_coeffs) canon << fmt(c) << ' ';
    canon << ";schedule.kind=" << cfg.schedule_kind << ";sigma=" << fmt(cfg.sigma0)
          << ";slope=" << fmt(cfg.slope) << ";center=" << fmt(cfg.center)
          << ";radius=" << fmt(cfg.radius) << ";defect=" << fmt(cfg.defect_c)
          << ";obs=" << fmt(cfg.obs_c0) << '|' << fmt(cfg.obs_c1) << '|' << fmt(cfg.obs_c2)
          << ";x0=" << fmt(cfg.x0) << ";theta=" << fmt(cfg.theta) << ";tail=" << fmt(cfg.tail_c)
          << '@' << fmt(cfg.tail_alpha) << ";seed=" << cfg.seed << ";values=";
    for (const auto& c : cfg.values) canon << fmt(c) << ' ';
    canon << ";table=" << cfg.table_path << ";w0=";
    for (const auto& c : cfg.w0s) canon << fmt(c) << ' ';
    canon << ";n=";
    for (int n : cfg.ns) canon << n << ' ';
    canon << ";beta=" << fmt(cfg.beta) << ";tol=" << fmt(cfg.tol)
          << ";precision=" << (cfg.precision ? (*cfg.precision == Precision::f80 ? 2 : 1) : 0)
          << ";diagnose=" << cfg.diagnose;
    std::ostringstream hex;
    hex << std::hex << fnv1a64(canon.str());
    cfg.hash = hex.str();
    return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open config: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str(), path);
}

Germ ExperimentConfig::build_germ() const {
    if (germ_kind == "polynomial") return Germ::polynomial(germ_coeffs);
    return Germ::truncation(germ_coeffs, eval_radius);
}

SigmaSchedule ExperimentConfig::build_schedule() const {
    SigmaSchedule s = [&]() -> SigmaSchedule {
        if (schedule_kind == "constant") return SigmaSchedule::constant(sigma0);
        if (schedule_kind == "linear") return SigmaSchedule::linear(slope);
        if (schedule_kind == "symmetric_pair")
            return SigmaSchedule::symmetric_pair(SigmaSchedule::random_disk(center, radius, seed),
                                                 defect_c);
        if (schedule_kind == "random_disk")
            return SigmaSchedule::random_disk(center, radius, seed);
        if (schedule_kind == "random_discrete") return SigmaSchedule::random_discrete(values, seed);
        if (schedule_kind == "orbit_doubling")
            return SigmaSchedule::orbit_doubling(CircleObservable{obs_c0, obs_c1, obs_c2}, seed);
        if (schedule_kind == "orbit_rotation")
            return SigmaSchedule::orbit_rotation(CircleObservable{obs_c0, obs_c1, obs_c2}, x0,
                                                 theta);
        if (schedule_kind == "tabulated")
            return SigmaSchedule::tabulated(read_sigma_table_csv(table_path));
        throw ValidationError("unknown schedule kind: " + schedule_kind);
    }();
    if (tail_c != std::complex<double>(0.0)) s = s.with_tail(tail_c, tail_alpha);
    if (bound && *bound < s.bound())
        throw ValidationError("declared schedule.bound " + fmt(*bound) +
                              " is below the schedule's structural bound " + fmt(s.bound()));
    return s;
}

} // namespace implab
