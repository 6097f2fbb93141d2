#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sacseg/octsim.hpp"
#include "sacseg/pipeline.hpp"

namespace sacseg {

enum class Subcommand { Segment, Baseline, Synth, Ascan, Compare };

struct Command {
    Subcommand sub = Subcommand::Segment;
    std::filesystem::path input;
    std::filesystem::path outdir;
    std::filesystem::path truth;   // optional ground truth labels (segment/baseline/compare)
    std::filesystem::path volume;  // directory of B-scans (segment/baseline)
    PipelineConfig cfg;
    bool dump_intermediates = false;

    PhantomParams phantom;  // synth
    int n = 1024;           // ascan
    std::vector<Reflector> reflectors;
    Window window = Window::None;
    double noise = 0.0;
    std::uint64_t seed = 42;

    bool help = false;
    std::string help_text;
};

/// argv excludes the program name. Throws Error(UsageError) naming the bad flag.
Command parse_args(const std::vector<std::string>& argv);

/// Runs a parsed command; returns 0 on success, 2 on processing failure
/// (1 for a missing input file).
int execute(const Command& cmd, std::ostream& out, std::ostream& err);

/// parse_args + execute with the documented exit codes.
int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace sacseg
