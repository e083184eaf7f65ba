#pragma once

#include "kgpe/units.hpp"
#include "kgpe/wigner.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace kgpe::io {

inline const std::vector<std::string> subcommands{
    "params-table", "poincare", "ground-state", "evolve",    "wigner",
    "wigner-avg",   "liouville", "depletion",   "render"};

struct CenterSpec {
    enum class Kind { none, stable, unstable, value } kind = Kind::none;
    double value = 0.0;
};

struct RunConfig {
    std::string command;
    ScaledParams params{1.0, 1.0, 0.0, std::numbers::pi / 3.0};
    int resonance_r = 1;
    int resonance_q = 6;
    int n_points = 1024;
    double half_width = 0.0; // 0 selects the default for the centre
    int kicks = 100;
    int substeps = 2048;
    CenterSpec center;
    bool tau_explicit = false; // tau_h given directly instead of 2 pi r / q
    std::uint64_t seed = 1;
    std::filesystem::path output = ".";
    std::filesystem::path input;
    int dump_every = 0; // 0 disables field dumps
    int modes = 15;
    std::size_t particles = 1'000'000;
    int ensemble_substeps = 1024;
    double bandwidth_cells = 4.0;
    int trajectories = 40;

    // Centre position in harmonic units; 0 when none was given.
    double center_x() const;
};

// Raised for bad command lines; exit_code is 0 for --help and 2 otherwise.
class UsageError : public std::runtime_error {
public:
    UsageError(const std::string& text, int exit_code)
        : std::runtime_error(text), exit_code_(exit_code) {}
    int exit_code() const { return exit_code_; }

private:
    int exit_code_;
};

// `kgpe <subcommand> [--config file] [--key value ...]`. The config file holds flat
// `key = value` lines using the long option names; flags given on the command line win.
RunConfig parse_config(int argc, const char* const* argv);

// Flat `key = value` text that parse_config accepts back through --config.
std::string config_text(const RunConfig& config);

// Resolves `name` inside `root`; rejects absolute names and anything escaping root.
std::filesystem::path confined_path(const std::filesystem::path& root,
                                    const std::filesystem::path& name);

std::string sha256_file(const std::filesystem::path& path);

struct ManifestFile {
    std::string name;
    std::uintmax_t bytes = 0;
    std::string sha256;
};

class RunManifest {
public:
    RunManifest(RunConfig config, std::string version);

    void add_diagnostic(const std::string& key, double value);
    void add_file(const std::filesystem::path& path); // inside the output directory
    const std::vector<ManifestFile>& files() const { return files_; }

    // Writes manifest.json via a temporary file and rename.
    std::filesystem::path write() const;

private:
    RunConfig config_;
    std::string version_;
    std::string started_;
    std::map<std::string, double> diagnostics_;
    std::vector<ManifestFile> files_;
};

enum class Colormap {
    diverging,  // zero at mid-gray, max positive black, min negative white
    sequential, // zero white, max black
};

// Row-major matrix (row 0 drawn at the top) to binary PPM (P6, maxval 255), plus a
// sidecar `<path>.txt` recording the value drawn as zero and the data range.
void emit_pseudocolor(const std::vector<double>& values, int rows, int cols, Colormap map,
                      const std::filesystem::path& path);

// Wigner plane with x across and p increasing upwards.
void emit_wigner_image(const wigner::WignerGrid& w, Colormap map,
                       const std::filesystem::path& path);

// `# a,b,c` header then comma-separated rows at 17 significant digits.
void write_series(const std::filesystem::path& path, const std::vector<std::string>& header,
                  const std::vector<std::vector<double>>& rows);

struct Series {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
Series read_series(const std::filesystem::path& path);

} // namespace kgpe::io
