#include "sacseg/cli.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "sacseg/io.hpp"

namespace sacseg {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void usage(const std::string& msg) { throw Error(ErrorKind::UsageError, msg); }

void add_pipeline_flags(CLI::App* app, Command& cmd, std::string& conn, std::string& flood, std::string& objects) {
    app->add_option("-i,--input", cmd.input, "input B-scan (PGM or grayscale PNG)");
    app->add_option("-o,--outdir", cmd.outdir, "output directory")->required();
    app->add_option("--truth", cmd.truth, "ground-truth label PGM for overseg metrics");
    app->add_option("--threshold", cmd.cfg.threshold, "keep pixels <= this value (0..255)");
    app->add_option("--conn", conn, "four|eight");
    app->add_option("--flood-on", flood, "gradient|raw");
    app->add_option("--objects", objects, "dark|bright");
    app->add_flag("--hann-taper", cmd.cfg.hann_taper, "apply the 2D Hann taper first");
    app->add_option("--hann-block", cmd.cfg.hann_block, "taper tile size (0 = full image)");
    app->add_option("--fg-se-radius", cmd.cfg.fg_se_radius, "marker disk radius (0 = scale with image)");
    app->add_option("--cv-mu", cmd.cfg.chan_vese.mu, "Chan-Vese length weight");
    app->add_option("--cv-iters", cmd.cfg.chan_vese.max_iters, "Chan-Vese iteration cap");
    app->add_option("--cv-tol", cmd.cfg.chan_vese.tol, "Chan-Vese changed-pixel stop fraction");
    app->add_flag("--dump-intermediates", cmd.dump_intermediates, "write binary/gradient/marker/lines PNGs");
    app->add_option("--volume", cmd.volume, "directory of B-scans, each segmented independently");
}

std::pair<int, int> parse_size(const std::string& s) {
    const auto x = s.find('x');
    if (x == std::string::npos) usage("--size: expected WxH, got '" + s + "'");
    try {
        std::size_t a = 0, b = 0;
        const int w = std::stoi(s.substr(0, x), &a);
        const int h = std::stoi(s.substr(x + 1), &b);
        if (a != x || b != s.size() - x - 1 || w <= 0 || h <= 0) throw std::invalid_argument(s);
        return {w, h};
    } catch (const std::logic_error&) {
        usage("--size: expected WxH with positive integers, got '" + s + "'");
    }
}

Reflector parse_reflector(const std::string& s) {
    const auto c = s.find(':');
    if (c == std::string::npos) usage("--reflector: expected f:a, got '" + s + "'");
    try {
        std::size_t a = 0, b = 0;
        Reflector r{std::stoi(s.substr(0, c), &a), std::stod(s.substr(c + 1), &b)};
        if (a != c || b != s.size() - c - 1 || !(r.amplitude > 0.0)) throw std::invalid_argument(s);
        return r;
    } catch (const std::logic_error&) {
        usage("--reflector: expected integer bin and positive amplitude, got '" + s + "'");
    }
}

}  // namespace

Command parse_args(const std::vector<std::string>& argv) {
    Command cmd;
    CLI::App app{"modified marker-based watershed segmentation of OCT B-scans", "sacseg"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::string conn = "four", flood = "gradient", objects = "dark";
    auto* seg = app.add_subcommand("segment", "run the modified pipeline");
    auto* base = app.add_subcommand("baseline", "plain watershed of the gradient");
    auto* cmp = app.add_subcommand("compare", "run both and report the timing ratio");
    for (auto* s : {seg, base, cmp}) add_pipeline_flags(s, cmd, conn, flood, objects);

    auto* synth = app.add_subcommand("synth", "write a synthetic phantom and its truth");
    std::string size = "512x512";
    synth->add_option("--sacs", cmd.phantom.n_sacs, "number of sacs");
    synth->add_option("--seed", cmd.phantom.seed, "RNG seed");
    synth->add_option("--size", size, "WxH");
    synth->add_option("--speckle", cmd.phantom.speckle_sigma, "multiplicative speckle sigma");
    synth->add_option("--wall", cmd.phantom.wall_intensity, "wall intensity");
    synth->add_option("--sac", cmd.phantom.sac_intensity, "sac intensity");
    synth->add_option("-o,--outdir", cmd.outdir, "output directory")->required();

    auto* ascan = app.add_subcommand("ascan", "reconstruct a synthetic A-scan");
    std::vector<std::string> refl;
    std::string window = "none";
    ascan->add_option("--n", cmd.n, "samples per A-scan");
    ascan->add_option("--reflector", refl, "depth_bin:amplitude (repeatable)");
    ascan->add_option("--window", window, "none|hann");
    ascan->add_option("--noise", cmd.noise, "additive gaussian sigma");
    ascan->add_option("--seed", cmd.seed, "RNG seed");
    ascan->add_option("-o,--outdir", cmd.outdir, "output directory")->required();

    std::vector<std::string> args(argv.rbegin(), argv.rend());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        cmd.help = true;
        cmd.help_text = app.help();
        for (auto* s : app.get_subcommands()) cmd.help_text = s->help();
        return cmd;
    } catch (const CLI::CallForAllHelp&) {
        cmd.help = true;
        cmd.help_text = app.help("", CLI::AppFormatMode::All);
        return cmd;
    } catch (const CLI::ParseError& e) {
        usage(e.what());
    }

    if (seg->parsed()) cmd.sub = Subcommand::Segment;
    else if (base->parsed()) cmd.sub = Subcommand::Baseline;
    else if (cmp->parsed()) cmd.sub = Subcommand::Compare;
    else if (synth->parsed()) cmd.sub = Subcommand::Synth;
    else cmd.sub = Subcommand::Ascan;

    if (cmd.sub == Subcommand::Segment || cmd.sub == Subcommand::Baseline || cmd.sub == Subcommand::Compare) {
        if (cmd.input.empty() == cmd.volume.empty()) usage("exactly one of --input or --volume is required");
        if (cmd.sub == Subcommand::Compare && !cmd.volume.empty()) usage("--volume: not supported by compare");
        if (!(cmd.cfg.threshold >= 0.0 && cmd.cfg.threshold <= 255.0)) usage("--threshold: must lie in [0,255]");
        if (conn == "four") cmd.cfg.conn = Connectivity::Four;
        else if (conn == "eight") cmd.cfg.conn = Connectivity::Eight;
        else usage("--conn: expected four|eight, got '" + conn + "'");
        if (flood == "gradient") cmd.cfg.flood_on = FloodOn::Gradient;
        else if (flood == "raw") cmd.cfg.flood_on = FloodOn::Raw;
        else usage("--flood-on: expected gradient|raw, got '" + flood + "'");
        if (objects == "dark") cmd.cfg.objects = Objects::Dark;
        else if (objects == "bright") cmd.cfg.objects = Objects::Bright;
        else usage("--objects: expected dark|bright, got '" + objects + "'");
        if (cmd.cfg.fg_se_radius < 0) usage("--fg-se-radius: must be >= 0");
        if (cmd.cfg.hann_block < 0 || cmd.cfg.hann_block == 1) usage("--hann-block: must be 0 or >= 2");
        if (cmd.cfg.chan_vese.mu < 0.0) usage("--cv-mu: must be >= 0");
        if (cmd.cfg.chan_vese.max_iters < 1) usage("--cv-iters: must be >= 1");
        if (!(cmd.cfg.chan_vese.tol > 0.0)) usage("--cv-tol: must be > 0");
        cmd.cfg.keep_intermediates = cmd.dump_intermediates;
    } else if (cmd.sub == Subcommand::Synth) {
        const auto [w, h] = parse_size(size);
        cmd.phantom.width = w;
        cmd.phantom.height = h;
        if (cmd.phantom.n_sacs < 1) usage("--sacs: must be >= 1");
        if (!(cmd.phantom.speckle_sigma >= 0.0)) usage("--speckle: must be >= 0");
    } else {
        if (cmd.n < 2) usage("--n: must be >= 2");
        if (window == "none") cmd.window = Window::None;
        else if (window == "hann") cmd.window = Window::Hann;
        else usage("--window: expected none|hann, got '" + window + "'");
        if (!(cmd.noise >= 0.0)) usage("--noise: must be >= 0");
        for (const auto& r : refl) cmd.reflectors.push_back(parse_reflector(r));
    }
    return cmd;
}

namespace {

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(ErrorKind::IoError, "cannot write " + p.string());
    f << text;
    if (!f) throw Error(ErrorKind::IoError, "write failed: " + p.string());
}

void ensure_dir(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec || !fs::is_directory(p)) throw Error(ErrorKind::IoError, "cannot create directory " + p.string());
}

GrayImage stretch(const GrayImage& img) {
    double hi = 0.0;
    for (double v : img.pixels()) hi = std::max(hi, v);
    GrayImage out = img;
    if (hi > 0.0) {
        for (auto& v : out.pixels()) v = v * 255.0 / hi;
    }
    return out;
}

void write_report(const SegmentationReport& rep, const fs::path& dir, const std::string& prefix, bool dump) {
    write_label_pgm(rep.labels, dir / (prefix + "labels.pgm"));
    write_label_png(rep.labels, dir / (prefix + "labels.png"));
    write_text(dir / (prefix + "stats.csv"), stats_csv(rep));
    if (dump && rep.intermediates) {
        const auto& im = *rep.intermediates;
        write_mask_png(im.binary, dir / (prefix + "binary.png"));
        write_gray_png(stretch(im.gradient), dir / (prefix + "gradient.png"));
        write_mask_png(im.fg_markers, dir / (prefix + "fg_markers.png"));
        write_mask_png(im.bg_markers, dir / (prefix + "bg_markers.png"));
        write_mask_png(im.watershed_lines, dir / (prefix + "lines.png"));
    }
}

std::optional<OversegMetrics> metrics_for(const SegmentationReport& rep, const LabelMap* truth) {
    if (!truth) return std::nullopt;
    return overseg_metrics(rep, *truth);
}

bool is_image(const fs::path& p) {
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".pgm" || ext == ".png";
}

int run_segment(const Command& cmd, std::ostream& out) {
    const bool modified = cmd.sub == Subcommand::Segment;
    auto run = [&](const GrayImage& img) { return modified ? run_modified(img, cmd.cfg) : run_baseline(img, cmd.cfg); };
    const char* mode = modified ? "modified" : "baseline";

    if (cmd.volume.empty()) {
        const GrayImage img = read_gray(cmd.input);
        std::optional<LabelMap> truth;
        if (!cmd.truth.empty()) truth = read_label_pgm(cmd.truth);
        ensure_dir(cmd.outdir);
        const auto rep = run(img);
        write_report(rep, cmd.outdir, "", cmd.dump_intermediates);
        out << metrics_line(rep, metrics_for(rep, truth ? &*truth : nullptr), mode) << '\n';
        return 0;
    }

    if (!fs::is_directory(cmd.volume)) throw Error(ErrorKind::FileNotFound, "no such directory: " + cmd.volume.string());
    std::vector<fs::path> slices;
    for (const auto& e : fs::directory_iterator(cmd.volume)) {
        if (e.is_regular_file() && is_image(e.path())) slices.push_back(e.path());
    }
    std::sort(slices.begin(), slices.end());
    if (slices.empty()) throw Error(ErrorKind::FileNotFound, "no PGM/PNG images in " + cmd.volume.string());
    ensure_dir(cmd.outdir);

    // slices are independent; fan out in batches of the core count
    const std::size_t batch = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t start = 0; start < slices.size(); start += batch) {
        std::vector<std::future<SegmentationReport>> jobs;
        const std::size_t end = std::min(slices.size(), start + batch);
        for (std::size_t i = start; i < end; ++i) {
            jobs.push_back(std::async(std::launch::async, [&, i] { return run(read_gray(slices[i])); }));
        }
        for (std::size_t i = start; i < end; ++i) {
            const auto rep = jobs[i - start].get();
            const fs::path dir = cmd.outdir / slices[i].stem();
            ensure_dir(dir);
            write_report(rep, dir, "", cmd.dump_intermediates);
            out << metrics_line(rep, std::nullopt, mode, slices[i].filename().string()) << '\n';
        }
    }
    return 0;
}

int run_compare(const Command& cmd, std::ostream& out) {
    const GrayImage img = read_gray(cmd.input);
    std::optional<LabelMap> truth;
    if (!cmd.truth.empty()) truth = read_label_pgm(cmd.truth);
    ensure_dir(cmd.outdir);
    const auto base = run_baseline(img, cmd.cfg);
    const auto mod = run_modified(img, cmd.cfg);
    write_report(base, cmd.outdir, "baseline_", cmd.dump_intermediates);
    write_report(mod, cmd.outdir, "modified_", cmd.dump_intermediates);
    const LabelMap* t = truth ? &*truth : nullptr;
    out << metrics_line(base, metrics_for(base, t), "baseline") << '\n';
    out << metrics_line(mod, metrics_for(mod, t), "modified") << '\n';
    nlohmann::ordered_json j;
    j["timing_ratio"] = base.elapsed_ms > 0.0 ? mod.elapsed_ms / base.elapsed_ms : 0.0;
    out << j.dump() << '\n';
    return 0;
}

int run_synth(const Command& cmd, std::ostream& out) {
    const Phantom ph = synth_phantom(cmd.phantom);
    ensure_dir(cmd.outdir);
    write_gray_pgm(ph.image, cmd.outdir / "phantom.pgm");
    write_label_pgm(ph.truth, cmd.outdir / "truth.pgm");
    write_label_png(ph.truth, cmd.outdir / "truth.png");
    nlohmann::ordered_json j;
    j["width"] = ph.image.width();
    j["height"] = ph.image.height();
    j["n_sacs"] = ph.n_sacs;
    j["seed"] = ph.seed;
    out << j.dump() << '\n';
    return 0;
}

int run_ascan(const Command& cmd, std::ostream& out) {
    const auto scan = synth_interferogram(cmd.reflectors, cmd.n, cmd.noise, cmd.seed);
    const auto prof = reconstruct_ascan(scan, cmd.window);
    ensure_dir(cmd.outdir);
    std::ostringstream csv;
    csv << "bin,magnitude\n";
    char buf[64];
    // the Hann main lobe smears the DC offset into bin 1; skip it when windowed
    const std::size_t first = std::min(prof.magnitudes.size() - 1, std::size_t{cmd.window == Window::Hann ? 2u : 1u});
    std::size_t peak = first;
    for (std::size_t k = 0; k < prof.magnitudes.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.9g", prof.magnitudes[k]);
        csv << k << ',' << buf << '\n';
        if (k > first && prof.magnitudes[k] > prof.magnitudes[peak]) peak = k;
    }
    write_text(cmd.outdir / "ascan.csv", csv.str());
    nlohmann::ordered_json j;
    j["n"] = cmd.n;
    j["peak_bin"] = peak;
    out << j.dump() << '\n';
    return 0;
}

}  // namespace

int execute(const Command& cmd, std::ostream& out, std::ostream& err) {
    if (cmd.help) {
        out << cmd.help_text;
        return 0;
    }
    try {
        switch (cmd.sub) {
            case Subcommand::Segment:
            case Subcommand::Baseline: return run_segment(cmd, out);
            case Subcommand::Compare: return run_compare(cmd, out);
            case Subcommand::Synth: return run_synth(cmd, out);
            case Subcommand::Ascan: return run_ascan(cmd, out);
        }
    } catch (const Error& e) {
        err << "sacseg: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return e.kind() == ErrorKind::FileNotFound || e.kind() == ErrorKind::UsageError ? 1 : 2;
    } catch (const std::exception& e) {
        err << "sacseg: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    Command cmd;
    try {
        cmd = parse_args(argv);
    } catch (const Error& e) {
        err << "sacseg: " << e.what() << "\nRun with --help for usage.\n";
        return 1;
    }
    return execute(cmd, out, err);
}

}  // namespace sacseg
