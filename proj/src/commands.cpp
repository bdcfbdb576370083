#include "tilediff/commands.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "tilediff/fixtures.hpp"
#include "tilediff/grid_io.hpp"
#include "tilediff/manifest.hpp"

namespace tilediff {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::filesystem::path prepare_output(const RunConfig& cfg) {
    const std::filesystem::path dir(cfg.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

Shape patch_shape(const RunConfig& cfg, const Grid& base) {
    const auto& c = cfg.cascade;
    return {base.channels(), c.patch_height ? c.patch_height : base.height(),
            c.patch_width ? c.patch_width : base.width()};
}

double rmse(const Grid& a, const Grid& b) {
    require_same_shape(a.shape(), b.shape(), "rmse");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - b[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(a.size()));
}

std::string view_extension(const Grid& view) { return view.channels() == 3 ? ".ppm" : ".pgm"; }

struct AblateRow {
    std::string variant;
    std::string group;
    std::string value;
    std::uint64_t nfe = 0;
    std::uint64_t inversion_nfe = 0;
    double wall_ms = 0.0;
    double seam = 0.0;
    double low = NAN;
    double mid = NAN;
    double high = NAN;
    double recon = NAN;
};

std::string csv_number(double v) {
    if (std::isnan(v)) return "";
    std::ostringstream os;
    os << std::setprecision(9) << v;
    return os.str();
}

std::string format_value(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

} // namespace

int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::invalid_argument:
    case ErrorKind::config: return kExitConfig;
    case ErrorKind::io: return kExitIo;
    case ErrorKind::protocol: return kExitProtocol;
    case ErrorKind::numeric: return kExitNumeric;
    }
    return kExitConfig;
}

Grid view_grid(const Grid& latent, const Codec& codec) {
    const Grid pixel = decode(codec, latent);
    const std::size_t channels = pixel.channels() >= 3 ? 3 : 1;
    Grid view(channels, pixel.height(), pixel.width());
    std::copy_n(pixel.values().begin(), view.size(), view.values().begin());
    const auto stats = compute_stats(view);
    if (stats.min < 0.0 || stats.max > 1.0) {
        const double span = stats.max > stats.min ? stats.max - stats.min : 1.0;
        for (float& v : view.values()) v = static_cast<float>((v - stats.min) / span);
    }
    return view;
}

int cmd_generate(const RunConfig& cfg, std::ostream& log) {
    const auto start = Clock::now();
    const Grid base = load_input(cfg);
    const auto den = make_denoiser(cfg, patch_shape(cfg, base));
    const CascadeResult result = run_cascade(base, *den, cfg.cascade);
    const double total_ms = ms_since(start);

    const auto dir = prepare_output(cfg);
    json manifest = build_manifest(cfg, *den, base, result, total_ms);
    for (std::size_t i = 0; i < result.level_outputs.size(); ++i) {
        const std::string stem = "level_" + std::to_string(i);
        const Grid view = view_grid(result.level_outputs[i], cfg.cascade.codec);
        write_rgf(dir / (stem + ".rgf"), result.level_outputs[i]);
        write_pnm(dir / (stem + view_extension(view)), view);
        manifest["levels"][i]["files"] = {{"grid", stem + ".rgf"}, {"view", stem + view_extension(view)}};
        const auto& r = result.reports[i];
        log << "level " << i << ": canvas " << to_string(r.canvas) << ", " << r.layout->patch_count()
            << " patches, nfe " << r.nfe_reverse << " (+" << r.nfe_inversion << " inversion), "
            << std::fixed << std::setprecision(1) << r.wall_ms << " ms\n";
        log.unsetf(std::ios::floatfield);
    }
    write_text_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
    log << "wrote " << (dir / "manifest.json").string() << "\n";
    return kExitOk;
}

int cmd_ablate(const RunConfig& cfg, std::ostream& log) {
    const auto& a = cfg.ablate;
    const int T = cfg.cascade.schedule.steps();
    std::vector<AblateRow> rows;

    // One variant = one cascade_step per seed; metrics averaged over seeds.
    auto run_variant = [&](AblateRow row, CascadeConfig vc) {
        vc.levels = 1;
        vc.level_overrides.clear();
        vc.validate();
        double seam = 0.0;
        double low = 0.0;
        double mid = 0.0;
        double high = 0.0;
        double recon = 0.0;
        double wall = 0.0;
        for (int s = 0; s < a.seeds; ++s) {
            RunConfig seeded = cfg;
            seeded.cascade.seed = cfg.cascade.seed + static_cast<std::uint64_t>(s);
            vc.seed = seeded.cascade.seed;
            const Grid base = load_input(seeded);
            const auto den = make_denoiser(seeded, patch_shape(seeded, base));
            const auto [ph, pw] = resolve_patch_size(vc, *den, base);
            const Grid reference = up(base, vc.up_space, vc.codec);
            LevelReport rep;
            const auto start = Clock::now();
            const Grid out = refine_canvas(reference, *den, vc, 0, ph, pw, &rep);
            wall += ms_since(start);
            const auto m = measure_level(out, *rep.layout);
            seam += m.seam_ratio;
            if (m.bands) {
                low += m.bands->energies[0];
                mid += m.bands->energies[1];
                high += m.bands->energies[2];
            } else {
                low = mid = high = NAN;
            }
            recon += rmse(out, reference);
            row.nfe = rep.nfe_reverse;
            row.inversion_nfe = rep.nfe_inversion;
        }
        const double n = a.seeds;
        row.wall_ms = wall / n;
        row.seam = seam / n;
        row.low = low / n;
        row.mid = mid / n;
        row.high = high / n;
        row.recon = recon / n;
        log << "  " << row.variant << ": nfe " << row.nfe << ", recon " << row.recon << ", high " << row.high
            << "\n";
        rows.push_back(std::move(row));
    };

    CascadeConfig baseline = cfg.cascade;
    baseline.level_schedule = {a.baseline_steps, T - 1};
    run_variant({"baseline_full_inversion", "baseline", std::to_string(T - 1)}, baseline);

    for (int depth : a.depths) {
        CascadeConfig vc = cfg.cascade;
        vc.level_schedule.depth = depth;
        vc.lambda = 0.0;
        run_variant({"partial_depth_" + std::to_string(depth), "depth", std::to_string(depth)}, vc);
    }
    for (BlendMode mode : a.blend_modes) {
        CascadeConfig vc = cfg.cascade;
        vc.blend = mode;
        run_variant({"blend_" + std::string(to_string(mode)), "blend", std::string(to_string(mode))}, vc);
    }
    {
        // Constant patches that disagree pairwise, stitched with each mode.
        const Grid base = load_input(cfg);
        const auto den = make_denoiser(cfg, patch_shape(cfg, base));
        const auto [ph, pw] = resolve_patch_size(cfg.cascade, *den, base);
        const Grid canvas = up(base, cfg.cascade.up_space, cfg.cascade.codec);
        const TileLayout layout = build_layout(canvas.height(), canvas.width(), ph, pw, cfg.cascade.overlap);
        const auto patches = fixtures::conflicting_patches(layout);
        for (BlendMode mode : a.blend_modes) {
            const Grid stitched = blend(patches, layout, build_masks(layout, mode, cfg.cascade.sigma));
            AblateRow row{"conflict_" + std::string(to_string(mode)), "conflict", std::string(to_string(mode))};
            row.seam = seam_energy(stitched, layout);
            log << "  " << row.variant << ": seam " << row.seam << "\n";
            rows.push_back(std::move(row));
        }
    }
    for (double lambda : a.lambdas) {
        CascadeConfig vc = cfg.cascade;
        vc.lambda = lambda;
        run_variant({"lambda_" + format_value(lambda), "lambda", format_value(lambda)}, vc);
    }

    std::ostringstream csv;
    csv << "variant,group,value,nfe,inversion_nfe,wall_ms,seam_ratio,band_low,band_mid,band_high,recon_rmse\n";
    for (const auto& r : rows) {
        csv << r.variant << ',' << r.group << ',' << r.value << ',' << r.nfe << ',' << r.inversion_nfe << ','
            << csv_number(r.wall_ms) << ',' << csv_number(r.seam) << ',' << csv_number(r.low) << ','
            << csv_number(r.mid) << ',' << csv_number(r.high) << ',' << csv_number(r.recon) << '\n';
    }
    const auto dir = prepare_output(cfg);
    write_text_atomic(dir / "ablation.csv", csv.str());
    log << "wrote " << (dir / "ablation.csv").string() << "\n";
    return kExitOk;
}

int cmd_bench(const RunConfig& cfg, std::ostream& log) {
    const auto& b = cfg.bench;
    const Grid probe = load_input(cfg);
    const Shape patch = patch_shape(cfg, probe);
    const Shape canvas_shape{patch.channels, patch.height * static_cast<std::size_t>(b.ratio),
                             patch.width * static_cast<std::size_t>(b.ratio)};
    const Grid canvas = fixtures::smooth(canvas_shape, cfg.cascade.seed);
    const auto den = make_denoiser(cfg, patch);
    const int T = cfg.cascade.schedule.steps();

    json cases = json::array();
    bool ratios_hold = true;
    for (double overlap : b.overlaps) {
        json variants = json::object();
        std::uint64_t fast_nfe = 0;
        std::uint64_t base_nfe = 0;
        double fast_ms = 0.0;
        double base_ms = 0.0;
        std::size_t patches = 0;
        for (const bool baseline : {false, true}) {
            CascadeConfig vc = cfg.cascade;
            vc.levels = 1;
            vc.level_overrides.clear();
            vc.overlap = overlap;
            vc.level_schedule = baseline ? LevelSchedule{b.baseline_steps, T - 1} : cfg.cascade.level_schedule;
            vc.validate();
            CountingDenoiser counter(*den);
            LevelReport rep;
            const auto start = Clock::now();
            refine_canvas(canvas, counter, vc, 0, patch.height, patch.width, &rep);
            const double ms = ms_since(start);
            patches = rep.layout->patch_count();
            if (counter.calls() != rep.nfe_reverse + rep.nfe_inversion) {
                throw NumericError("denoiser call count disagrees with NFE accounting");
            }
            variants[baseline ? "baseline" : "fast"] = {{"steps", rep.grid.size()},
                                                        {"depth", rep.grid.highest()},
                                                        {"nfe", rep.nfe_reverse},
                                                        {"inversion_nfe", rep.nfe_inversion},
                                                        {"denoiser_calls", counter.calls()},
                                                        {"wall_ms", ms}};
            (baseline ? base_nfe : fast_nfe) = rep.nfe_reverse;
            (baseline ? base_ms : fast_ms) = ms;
        }
        const auto fast_steps = static_cast<std::uint64_t>(variants["fast"]["steps"].get<int>());
        const std::uint64_t expected = static_cast<std::uint64_t>(b.baseline_steps) / fast_steps;
        const bool exact = fast_nfe == patches * fast_steps && base_nfe == patches * b.baseline_steps &&
                           base_nfe == expected * fast_nfe && b.baseline_steps % fast_steps == 0;
        ratios_hold = ratios_hold && exact;
        const double ratio = static_cast<double>(base_nfe) / static_cast<double>(fast_nfe);
        cases.push_back({{"overlap", overlap},
                         {"patches", patches},
                         {"variants", variants},
                         {"nfe_ratio", ratio},
                         {"nfe_ratio_exact", exact},
                         {"fast_wall_faster", fast_ms < base_ms}});
        log << "overlap " << overlap << ": " << patches << " patches, nfe " << fast_nfe << " vs " << base_nfe
            << " (ratio " << ratio << "), wall " << fast_ms << " ms vs " << base_ms << " ms\n";
    }
    if (cases.size() >= 2) {
        const double a = cases[0]["patches"].get<double>();
        const double z = cases[cases.size() - 1]["patches"].get<double>();
        log << "patch ratio first/last overlap: " << a / z << "\n";
    }

    const json report = {{"canvas", {canvas_shape.channels, canvas_shape.height, canvas_shape.width}},
                         {"patch", {patch.height, patch.width}},
                         {"ratio", b.ratio},
                         {"denoiser", den->capabilities().model_name},
                         {"cases", cases}};
    const auto dir = prepare_output(cfg);
    write_text_atomic(dir / "bench.json", report.dump(2) + "\n");
    log << "wrote " << (dir / "bench.json").string() << "\n";
    if (!ratios_hold) throw NumericError("NFE ratio does not match the step-count ratio");
    return kExitOk;
}

int cmd_masks(const RunConfig& cfg, std::ostream& log) {
    const Grid base = load_input(cfg);
    const auto den = make_denoiser(cfg, patch_shape(cfg, base));
    const auto [ph, pw] = resolve_patch_size(cfg.cascade, *den, base);
    const Grid canvas = up(base, cfg.cascade.up_space, cfg.cascade.codec);
    const TileLayout layout = build_layout(canvas.height(), canvas.width(), ph, pw, cfg.cascade.overlap);
    const BlendMaskSet masks = build_masks(layout, cfg.cascade.blend, cfg.cascade.sigma);
    const Grid weights = canvas_weights(layout, masks);
    const Grid sum = weight_sum(layout, masks);
    const auto stats = compute_stats(sum);

    const auto dir = prepare_output(cfg);
    write_rgf(dir / "masks.rgf", weights);
    write_rgf(dir / "weight_sum.rgf", sum);
    Grid first(1, canvas.height(), canvas.width());
    std::copy_n(weights.channel(0).begin(), first.size(), first.values().begin());
    write_pnm(dir / "mask_0.pgm", first);
    const json info = {{"mode", std::string(to_string(masks.mode))},
                       {"sigma", masks.sigma},
                       {"layout", layout_json(layout)},
                       {"weight_sum", {{"min", stats.min}, {"max", stats.max}}}};
    write_text_atomic(dir / "masks.json", info.dump(2) + "\n");
    log << layout.patch_count() << " masks (" << to_string(masks.mode) << ", sigma " << masks.sigma
        << "), weight sum in [" << stats.min << ", " << stats.max << "]\n";
    return kExitOk;
}

int cmd_inspect(const std::vector<std::filesystem::path>& paths, std::ostream& out) {
    json all = json::array();
    for (const auto& p : paths) {
        const auto ext = p.extension().string();
        const Grid g = ext == ".pgm" || ext == ".ppm" ? read_pnm(p) : read_rgf(p);
        const auto s = compute_stats(g);
        json j = {{"path", p.string()},
                  {"shape", {g.channels(), g.height(), g.width()}},
                  {"min", s.min},
                  {"max", s.max},
                  {"mean", s.mean},
                  {"stddev", s.stddev},
                  {"non_finite", s.non_finite}};
        if (s.non_finite == 0 && spectral_size_supported(g.shape())) j["bands"] = bands_json(radial_band_energy(g));
        all.push_back(std::move(j));
    }
    out << all.dump(2) << "\n";
    return kExitOk;
}

} // namespace tilediff
