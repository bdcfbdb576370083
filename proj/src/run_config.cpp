#include "tilediff/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>

#include "tilediff/bridge.hpp"
#include "tilediff/fixtures.hpp"
#include "tilediff/grid_io.hpp"

namespace tilediff {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) bad(path, "expected an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    require_object(j, path);
    for (const auto& [key, _] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            bad(child(path, key), "unknown key");
        }
    }
}

const json* field(const json& j, const char* key) {
    const auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

long long as_int(const json& v, const std::string& path, long long lo, long long hi) {
    if (!v.is_number_integer()) bad(path, "expected an integer");
    if (v.is_number_unsigned() && v.get<unsigned long long>() > static_cast<unsigned long long>(hi)) {
        bad(path, "out of range");
    }
    const auto x = v.get<long long>();
    if (x < lo || x > hi) bad(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
}

double as_double(const json& v, const std::string& path) {
    if (!v.is_number()) bad(path, "expected a number");
    return v.get<double>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) bad(path, "expected a string");
    return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) bad(path, "expected a boolean");
    return v.get<bool>();
}

std::uint64_t as_u64(const json& v, const std::string& path) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
    bad(path, "expected a nonnegative integer");
}

// Parses `kind` strings through the library parsers, turning their
// InvalidArgument into a ConfigError at the right path.
template <typename F>
auto parse_enum(const json& v, const std::string& path, F parse) {
    const std::string s = as_string(v, path);
    try {
        return parse(s);
    } catch (const InvalidArgument& e) {
        bad(path, e.what());
    }
}

void parse_input(const json& j, const std::string& path, InputSpec& in) {
    check_keys(j, path, {"fixture", "shape", "path"});
    if (auto* v = field(j, "path")) in.path = as_string(*v, child(path, "path"));
    if (auto* v = field(j, "fixture")) in.fixture = as_string(*v, child(path, "fixture"));
    if (auto* v = field(j, "shape")) {
        const auto p = child(path, "shape");
        if (!v->is_array() || v->size() != 3) bad(p, "expected [channels, height, width]");
        in.shape = {static_cast<std::size_t>(as_int((*v)[0], p + "/0", 1, 64)),
                    static_cast<std::size_t>(as_int((*v)[1], p + "/1", 1, 1 << 14)),
                    static_cast<std::size_t>(as_int((*v)[2], p + "/2", 1, 1 << 14))};
    }
    if (field(j, "path") && field(j, "fixture")) bad(path, "give either path or fixture, not both");
}

void parse_schedule(const json& j, const std::string& path, Schedule& out) {
    check_keys(j, path, {"kind", "steps", "beta_start", "beta_end"});
    BetaSchedule kind = out.kind();
    int steps = out.steps();
    double bs = out.beta_start();
    double be = out.beta_end();
    if (auto* v = field(j, "kind")) kind = parse_enum(*v, child(path, "kind"), parse_beta_schedule);
    if (auto* v = field(j, "steps")) steps = static_cast<int>(as_int(*v, child(path, "steps"), 1, 100000));
    if (auto* v = field(j, "beta_start")) bs = as_double(*v, child(path, "beta_start"));
    if (auto* v = field(j, "beta_end")) be = as_double(*v, child(path, "beta_end"));
    try {
        out = Schedule::build(kind, steps, bs, be);
    } catch (const InvalidArgument& e) {
        bad(path, e.what());
    }
}

LevelSchedule parse_level(const json& j, const std::string& path, LevelSchedule base) {
    check_keys(j, path, {"steps", "depth"});
    if (auto* v = field(j, "steps")) base.steps = static_cast<int>(as_int(*v, child(path, "steps"), 1, 100000));
    if (auto* v = field(j, "depth")) base.depth = static_cast<int>(as_int(*v, child(path, "depth"), 0, 100000));
    return base;
}

void parse_backend(const json& j, const std::string& path, BackendSpec& b) {
    check_keys(j, path, {"kind", "gmm", "bridge"});
    if (auto* v = field(j, "kind")) {
        const auto p = child(path, "kind");
        const std::string s = as_string(*v, p);
        if (s == "zero") b.kind = BackendSpec::Kind::zero;
        else if (s == "gmm") b.kind = BackendSpec::Kind::gmm;
        else if (s == "bridge") b.kind = BackendSpec::Kind::bridge;
        else bad(p, "unknown backend '" + s + "' (zero, gmm, bridge)");
    }
    if (auto* g = field(j, "gmm")) {
        const auto p = child(path, "gmm");
        check_keys(*g, p, {"components", "variance", "mean_amplitude", "seed"});
        if (auto* v = field(*g, "components")) {
            b.gmm_components = static_cast<std::size_t>(as_int(*v, child(p, "components"), 1, 4096));
        }
        if (auto* v = field(*g, "variance")) b.gmm_variance = as_double(*v, child(p, "variance"));
        if (auto* v = field(*g, "mean_amplitude")) b.gmm_mean_amplitude = as_double(*v, child(p, "mean_amplitude"));
        if (auto* v = field(*g, "seed")) b.gmm_seed = as_u64(*v, child(p, "seed"));
        if (!(b.gmm_variance > 0.0)) bad(child(p, "variance"), "must be > 0");
        if (!(b.gmm_mean_amplitude >= 0.0)) bad(child(p, "mean_amplitude"), "must be >= 0");
    }
    if (auto* br = field(j, "bridge")) {
        const auto p = child(path, "bridge");
        check_keys(*br, p, {"address", "timeout_ms"});
        if (auto* v = field(*br, "address")) b.bridge_address = as_string(*v, child(p, "address"));
        if (auto* v = field(*br, "timeout_ms")) {
            b.bridge_timeout = std::chrono::milliseconds(as_int(*v, child(p, "timeout_ms"), 1, 3'600'000));
        }
    }
    if (b.kind == BackendSpec::Kind::bridge && b.bridge_address.empty()) {
        bad(child(path, "bridge/address"), "required for the bridge backend");
    }
}

template <typename T, typename F>
std::vector<T> parse_list(const json& v, const std::string& path, F each) {
    if (!v.is_array() || v.empty()) bad(path, "expected a nonempty array");
    std::vector<T> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(each(v[i], path + "/" + std::to_string(i)));
    return out;
}

void parse_ablate(const json& j, const std::string& path, AblateSpec& a) {
    check_keys(j, path, {"depths", "lambdas", "blend_modes", "baseline_steps", "seeds"});
    if (auto* v = field(j, "depths")) {
        a.depths = parse_list<int>(*v, child(path, "depths"),
                                   [](const json& x, const std::string& p) { return static_cast<int>(as_int(x, p, 0, 100000)); });
    }
    if (auto* v = field(j, "lambdas")) a.lambdas = parse_list<double>(*v, child(path, "lambdas"), as_double);
    if (auto* v = field(j, "blend_modes")) {
        a.blend_modes = parse_list<BlendMode>(*v, child(path, "blend_modes"), [](const json& x, const std::string& p) {
            return parse_enum(x, p, parse_blend_mode);
        });
    }
    if (auto* v = field(j, "baseline_steps")) {
        a.baseline_steps = static_cast<int>(as_int(*v, child(path, "baseline_steps"), 1, 100000));
    }
    if (auto* v = field(j, "seeds")) a.seeds = static_cast<int>(as_int(*v, child(path, "seeds"), 1, 1024));
}

void parse_bench(const json& j, const std::string& path, BenchSpec& b) {
    check_keys(j, path, {"ratio", "overlaps", "baseline_steps"});
    if (auto* v = field(j, "ratio")) b.ratio = static_cast<int>(as_int(*v, child(path, "ratio"), 1, 64));
    if (auto* v = field(j, "overlaps")) b.overlaps = parse_list<double>(*v, child(path, "overlaps"), as_double);
    if (auto* v = field(j, "baseline_steps")) {
        b.baseline_steps = static_cast<int>(as_int(*v, child(path, "baseline_steps"), 1, 100000));
    }
}

json level_json(const LevelSchedule& ls) { return {{"steps", ls.steps}, {"depth", ls.depth}}; }

} // namespace

std::string_view to_string(BackendSpec::Kind kind) {
    switch (kind) {
    case BackendSpec::Kind::zero: return "zero";
    case BackendSpec::Kind::gmm: return "gmm";
    case BackendSpec::Kind::bridge: return "bridge";
    }
    return "unknown";
}

RunConfig parse_run_config(const json& doc) {
    check_keys(doc, "", {"input", "output_dir", "seed", "threads", "schedule", "levels", "steps", "depth",
                         "level_overrides", "up_space", "codec", "overlap", "blend", "lambda", "prompt",
                         "guidance_scale", "patch", "backend", "metrics", "ablate", "bench"});
    RunConfig cfg;
    CascadeConfig& c = cfg.cascade;
    if (auto* v = field(doc, "input")) parse_input(*v, "/input", cfg.input);
    if (auto* v = field(doc, "output_dir")) cfg.output_dir = as_string(*v, "/output_dir");
    if (auto* v = field(doc, "seed")) c.seed = as_u64(*v, "/seed");
    if (auto* v = field(doc, "threads")) c.threads = static_cast<std::size_t>(as_int(*v, "/threads", 1, 1024));
    if (auto* v = field(doc, "schedule")) parse_schedule(*v, "/schedule", c.schedule);
    if (auto* v = field(doc, "levels")) c.levels = static_cast<int>(as_int(*v, "/levels", 1, 8));
    if (auto* v = field(doc, "steps")) c.level_schedule.steps = static_cast<int>(as_int(*v, "/steps", 1, 100000));
    if (auto* v = field(doc, "depth")) c.level_schedule.depth = static_cast<int>(as_int(*v, "/depth", 0, 100000));
    if (auto* v = field(doc, "level_overrides")) {
        if (!v->is_array()) bad("/level_overrides", "expected an array");
        for (std::size_t i = 0; i < v->size(); ++i) {
            const auto& item = (*v)[i];
            const std::string p = "/level_overrides/" + std::to_string(i);
            c.level_overrides.push_back(item.is_null() ? std::nullopt
                                                       : std::optional(parse_level(item, p, c.level_schedule)));
        }
    }
    if (auto* v = field(doc, "up_space")) c.up_space = parse_enum(*v, "/up_space", parse_up_space);
    if (auto* v = field(doc, "codec")) {
        check_keys(*v, "/codec", {"kind", "factor"});
        if (auto* k = field(*v, "kind")) c.codec.kind = parse_enum(*k, "/codec/kind", parse_codec_kind);
        c.codec.factor = c.codec.kind == Codec::Kind::identity ? 1 : 2;
        if (auto* f = field(*v, "factor")) c.codec.factor = static_cast<std::size_t>(as_int(*f, "/codec/factor", 1, 64));
        if (c.codec.kind == Codec::Kind::identity && c.codec.factor != 1) bad("/codec/factor", "identity codec has factor 1");
    }
    if (auto* v = field(doc, "overlap")) c.overlap = as_double(*v, "/overlap");
    if (auto* v = field(doc, "blend")) {
        check_keys(*v, "/blend", {"mode", "sigma"});
        if (auto* m = field(*v, "mode")) c.blend = parse_enum(*m, "/blend/mode", parse_blend_mode);
        if (auto* s = field(*v, "sigma"); s && !s->is_null()) c.sigma = as_double(*s, "/blend/sigma");
    }
    if (auto* v = field(doc, "lambda")) c.lambda = as_double(*v, "/lambda");
    if (auto* v = field(doc, "prompt")) c.guidance.prompt = as_string(*v, "/prompt");
    if (auto* v = field(doc, "guidance_scale")) c.guidance.guidance_scale = static_cast<float>(as_double(*v, "/guidance_scale"));
    if (auto* v = field(doc, "patch"); v && !v->is_null()) {
        if (!v->is_array() || v->size() != 2) bad("/patch", "expected [height, width]");
        c.patch_height = static_cast<std::size_t>(as_int((*v)[0], "/patch/0", 1, 1 << 14));
        c.patch_width = static_cast<std::size_t>(as_int((*v)[1], "/patch/1", 1, 1 << 14));
    }
    if (auto* v = field(doc, "backend")) parse_backend(*v, "/backend", cfg.backend);
    if (auto* v = field(doc, "metrics")) {
        check_keys(*v, "/metrics", {"enabled"});
        if (auto* e = field(*v, "enabled")) c.compute_metrics = as_bool(*e, "/metrics/enabled");
    }
    if (auto* v = field(doc, "ablate")) parse_ablate(*v, "/ablate", cfg.ablate);
    if (auto* v = field(doc, "bench")) parse_bench(*v, "/bench", cfg.bench);

    try {
        c.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    json doc;
    try {
        doc = json::parse(bytes.begin(), bytes.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_run_config(doc);
}

json to_json(const RunConfig& cfg) {
    const CascadeConfig& c = cfg.cascade;
    json input;
    if (cfg.input.path.empty()) {
        input = {{"fixture", cfg.input.fixture},
                 {"shape", {cfg.input.shape.channels, cfg.input.shape.height, cfg.input.shape.width}}};
    } else {
        input = {{"path", cfg.input.path}};
    }
    json overrides = json::array();
    for (const auto& o : c.level_overrides) overrides.push_back(o ? level_json(*o) : json(nullptr));
    json backend = {{"kind", std::string(to_string(cfg.backend.kind))}};
    if (cfg.backend.kind == BackendSpec::Kind::gmm) {
        backend["gmm"] = {{"components", cfg.backend.gmm_components},
                          {"variance", cfg.backend.gmm_variance},
                          {"mean_amplitude", cfg.backend.gmm_mean_amplitude},
                          {"seed", cfg.backend.gmm_seed}};
    } else if (cfg.backend.kind == BackendSpec::Kind::bridge) {
        backend["bridge"] = {{"address", cfg.backend.bridge_address},
                             {"timeout_ms", cfg.backend.bridge_timeout.count()}};
    }
    json blend_modes = json::array();
    for (auto m : cfg.ablate.blend_modes) blend_modes.push_back(std::string(to_string(m)));
    return {
        {"input", input},
        {"seed", c.seed},
        {"schedule",
         {{"kind", std::string(to_string(c.schedule.kind()))},
          {"steps", c.schedule.steps()},
          {"beta_start", c.schedule.beta_start()},
          {"beta_end", c.schedule.beta_end()}}},
        {"levels", c.levels},
        {"steps", c.level_schedule.steps},
        {"depth", c.level_schedule.depth},
        {"level_overrides", overrides},
        {"up_space", std::string(to_string(c.up_space))},
        {"codec", {{"kind", std::string(to_string(c.codec.kind))}, {"factor", c.codec.factor}}},
        {"overlap", c.overlap},
        {"blend", {{"mode", std::string(to_string(c.blend))}, {"sigma", c.sigma ? json(*c.sigma) : json(nullptr)}}},
        {"lambda", c.lambda},
        {"prompt", c.guidance.prompt},
        {"guidance_scale", c.guidance.guidance_scale},
        {"patch", c.patch_height ? json::array({c.patch_height, c.patch_width}) : json(nullptr)},
        {"backend", backend},
        {"metrics", {{"enabled", c.compute_metrics}}},
        {"ablate",
         {{"depths", cfg.ablate.depths},
          {"lambdas", cfg.ablate.lambdas},
          {"blend_modes", blend_modes},
          {"baseline_steps", cfg.ablate.baseline_steps},
          {"seeds", cfg.ablate.seeds}}},
        {"bench",
         {{"ratio", cfg.bench.ratio}, {"overlaps", cfg.bench.overlaps}, {"baseline_steps", cfg.bench.baseline_steps}}},
    };
}

Grid load_input(const RunConfig& cfg) {
    if (cfg.input.path.empty()) return fixtures::by_name(cfg.input.fixture, cfg.input.shape, cfg.cascade.seed);
    const std::filesystem::path p(cfg.input.path);
    const auto ext = p.extension().string();
    if (ext == ".pgm" || ext == ".ppm") return read_pnm(p);
    return read_rgf(p);
}

std::unique_ptr<Denoiser> make_denoiser(const RunConfig& cfg, const Shape& patch) {
    const auto& b = cfg.backend;
    switch (b.kind) {
    case BackendSpec::Kind::zero: return std::make_unique<ZeroDenoiser>();
    case BackendSpec::Kind::gmm:
        return std::make_unique<GmmDenoiser>(
            fixtures::texture_prior(patch, b.gmm_components, b.gmm_variance, b.gmm_mean_amplitude, b.gmm_seed),
            cfg.cascade.schedule);
    case BackendSpec::Kind::bridge:
        return std::make_unique<BridgeDenoiser>(BridgeOptions{b.bridge_address, b.bridge_timeout, "tilediff"});
    }
    throw ConfigError("unknown backend");
}

} // namespace tilediff
