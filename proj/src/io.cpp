#include "kgpe/io.hpp"

#include "kgpe/classical.hpp"
#include "kgpe/error.hpp"
#include "kgpe/gpe.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <memory>
#include <sstream>

namespace kgpe::io {

namespace {

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CenterSpec parse_center(const std::string& s)
{
    if (s == "stable")
        return {CenterSpec::Kind::stable, 0.0};
    if (s == "unstable")
        return {CenterSpec::Kind::unstable, 0.0};
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v))
        throw UsageError("--center must be stable, unstable or a number, got '" + s + "'", 2);
    return {CenterSpec::Kind::value, v};
}

std::string center_text(const CenterSpec& c)
{
    switch (c.kind) {
    case CenterSpec::Kind::stable: return "stable";
    case CenterSpec::Kind::unstable: return "unstable";
    case CenterSpec::Kind::value: return fmt(c.value);
    case CenterSpec::Kind::none: break;
    }
    return "";
}

std::string utc_now()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool needs_center(const std::string& cmd)
{
    return cmd == "evolve" || cmd == "wigner-avg" || cmd == "liouville" || cmd == "depletion";
}

bool needs_input(const std::string& cmd)
{
    return cmd == "wigner" || cmd == "render";
}

} // namespace

double RunConfig::center_x() const
{
    switch (center.kind) {
    case CenterSpec::Kind::stable: return gpe::center_position(gpe::Center::stable, params.eta);
    case CenterSpec::Kind::unstable:
        return gpe::center_position(gpe::Center::unstable, params.eta);
    case CenterSpec::Kind::value: return center.value;
    case CenterSpec::Kind::none: break;
    }
    return 0.0;
}

RunConfig parse_config(int argc, const char* const* argv)
{
    RunConfig cfg;
    CLI::App app{"Kicked harmonic oscillator and condensate dynamics"};
    app.name("kgpe");
    app.require_subcommand(1, 1);
    app.set_config("--config", "", "flat key = value file; command-line flags take precedence");
    app.allow_config_extras(false);

    std::string center;
    double tau = 0.0;
    app.add_option("--eta", cfg.params.eta, "Lamb-Dicke parameter")->capture_default_str();
    app.add_option("--upsilon", cfg.params.upsilon, "nonlinearity")->capture_default_str();
    app.add_option("--kappa", cfg.params.kappa, "kick strength")->capture_default_str();
    auto* r = app.add_option("--r", cfg.resonance_r, "resonance numerator")->capture_default_str();
    auto* q = app.add_option("--q", cfg.resonance_q, "resonance denominator")->capture_default_str();
    app.add_option("--tau", tau, "kick period tau_h (instead of 2 pi r / q)")
        ->excludes(r)
        ->excludes(q);
    app.add_option("--points", cfg.n_points, "grid points (power of two)")->capture_default_str();
    app.add_option("--half-width", cfg.half_width, "grid half width, 0 for automatic")
        ->capture_default_str();
    app.add_option("--kicks", cfg.kicks, "number of kicks")->capture_default_str();
    app.add_option("--substeps", cfg.substeps, "GPE substeps per kick period")
        ->capture_default_str();
    app.add_option("--center", center, "stable, unstable or an explicit position");
    app.add_option("--seed", cfg.seed, "sampling seed")->capture_default_str();
    app.add_option("--out", cfg.output, "output directory")->capture_default_str();
    app.add_option("--input", cfg.input, "input file (render, wigner)");
    app.add_option("--dump-every", cfg.dump_every, "field dump cadence in kicks, 0 = off")
        ->capture_default_str();
    app.add_option("--modes", cfg.modes, "Bogoliubov mode count")->capture_default_str();
    app.add_option("--particles", cfg.particles, "ensemble size")->capture_default_str();
    app.add_option("--ensemble-substeps", cfg.ensemble_substeps,
                   "ensemble substeps per kick period")
        ->capture_default_str();
    app.add_option("--bandwidth-cells", cfg.bandwidth_cells, "density kernel width in dx")
        ->capture_default_str();
    app.add_option("--trajectories", cfg.trajectories, "Poincare seeds")->capture_default_str();

    const std::vector<std::pair<std::string, std::string>> help{
        {"params-table", "Table of experimental (lambda, nu) scalings and ground-state mu"},
        {"poincare", "Classical stochastic-web Poincare section"},
        {"ground-state", "Imaginary-time ground state"},
        {"evolve", "Kicked GPE evolution from a displaced ground state"},
        {"wigner", "Wigner function of a field dump"},
        {"wigner-avg", "Time-averaged Wigner function over a kicked run"},
        {"liouville", "Semiclassical mean-field ensemble"},
        {"depletion", "Bogoliubov depletion estimate"},
        {"render", "Pseudocolor image of a Wigner-plane dump"}};
    for (const auto& [name, text] : help)
        app.add_subcommand(name, text)->fallthrough();

    const bool empty = argc <= 1;
    try {
        if (empty)
            throw CLI::CallForHelp();
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        throw UsageError(app.help(), empty ? 2 : 0);
    } catch (const CLI::ParseError& e) {
        throw UsageError(std::string(e.what()) + "\n" + app.help(), 2);
    }

    cfg.command = app.get_subcommands().front()->get_name();
    if (!center.empty())
        cfg.center = parse_center(center);
    if (app.count("--tau") > 0) {
        cfg.params.tau_h = tau;
        cfg.tau_explicit = true;
    } else {
        const classical::ResonanceSpec spec{cfg.resonance_r, cfg.resonance_q};
        try {
            spec.validate();
        } catch (const DomainError& e) {
            throw UsageError(e.what(), 2);
        }
        cfg.params.tau_h = spec.tau_h();
    }
    if (needs_center(cfg.command) && cfg.center.kind == CenterSpec::Kind::none)
        throw UsageError(cfg.command + " requires --center", 2);
    if (needs_input(cfg.command) && cfg.input.empty())
        throw UsageError(cfg.command + " requires --input", 2);
    try {
        cfg.params.validate();
    } catch (const DomainError& e) {
        throw UsageError(e.what(), 2);
    }
    if (cfg.kicks < 0 || cfg.substeps < 1 || cfg.modes < 1 || cfg.particles < 1 ||
        cfg.ensemble_substeps < 1 || cfg.dump_every < 0 || cfg.trajectories < 1 ||
        cfg.half_width < 0.0 || cfg.bandwidth_cells < 1.0)
        throw UsageError("count and size options must be positive", 2);
    if (cfg.n_points < 16 || (cfg.n_points & (cfg.n_points - 1)) != 0)
        throw UsageError("--points must be a power of two >= 16", 2);
    return cfg;
}

std::string config_text(const RunConfig& c)
{
    std::ostringstream out;
    out << "eta = " << fmt(c.params.eta) << "\n"
        << "upsilon = " << fmt(c.params.upsilon) << "\n"
        << "kappa = " << fmt(c.params.kappa) << "\n";
    if (c.tau_explicit)
        out << "tau = " << fmt(c.params.tau_h) << "\n";
    else
        out << "r = " << c.resonance_r << "\nq = " << c.resonance_q << "\n";
    out << "points = " << c.n_points << "\n"
        << "half-width = " << fmt(c.half_width) << "\n"
        << "kicks = " << c.kicks << "\n"
        << "substeps = " << c.substeps << "\n";
    if (c.center.kind != CenterSpec::Kind::none)
        out << "center = " << center_text(c.center) << "\n";
    out << "seed = " << c.seed << "\n"
        << "out = \"" << c.output.string() << "\"\n";
    if (!c.input.empty())
        out << "input = \"" << c.input.string() << "\"\n";
    out << "dump-every = " << c.dump_every << "\n"
        << "modes = " << c.modes << "\n"
        << "particles = " << c.particles << "\n"
        << "ensemble-substeps = " << c.ensemble_substeps << "\n"
        << "bandwidth-cells = " << fmt(c.bandwidth_cells) << "\n"
        << "trajectories = " << c.trajectories << "\n";
    return out.str();
}

std::filesystem::path confined_path(const std::filesystem::path& root,
                                    const std::filesystem::path& name)
{
    if (name.empty() || name.is_absolute())
        throw DomainError("output name must be relative: '" + name.string() + "'");
    const auto base = root.lexically_normal();
    const auto full = (base / name).lexically_normal();
    const auto rel = full.lexically_relative(base);
    if (rel.empty() || rel == "." || *rel.begin() == "..")
        throw DomainError("output '" + name.string() + "' escapes " + root.string());
    return full;
}

std::string sha256_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ResourceError("cannot read " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                                 EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw ResourceError("sha256 unavailable");
    std::array<char, 1 << 16> buf;
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0)
            EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::string hex;
    char two[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(two, sizeof two, "%02x", md[i]);
        hex += two;
    }
    return hex;
}

RunManifest::RunManifest(RunConfig config, std::string version)
    : config_(std::move(config)), version_(std::move(version)), started_(utc_now())
{
}

void RunManifest::add_diagnostic(const std::string& key, double value)
{
    diagnostics_[key] = value;
}

void RunManifest::add_file(const std::filesystem::path& path)
{
    const auto rel = path.lexically_normal().lexically_relative(config_.output.lexically_normal());
    confined_path(config_.output, rel);
    files_.push_back({rel.generic_string(), std::filesystem::file_size(path), sha256_file(path)});
}

std::filesystem::path RunManifest::write() const
{
    nlohmann::ordered_json j;
    j["command"] = config_.command;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    std::istringstream lines(config_text(config_));
    for (std::string line; std::getline(lines, line);) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos)
            cfg[line.substr(0, eq)] = line.substr(eq + 3);
    }
    j["config"] = cfg;
    j["version"] = version_;
    j["started"] = started_;
    j["finished"] = utc_now();
    nlohmann::ordered_json diag = nlohmann::ordered_json::object();
    for (const auto& [k, v] : diagnostics_)
        diag[k] = v;
    j["diagnostics"] = diag;
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const auto& f : files_)
        files.push_back({{"name", f.name}, {"bytes", f.bytes}, {"sha256", f.sha256}});
    j["files"] = files;

    const auto final_path = confined_path(config_.output, "manifest.json");
    const auto tmp = confined_path(config_.output, "manifest.json.tmp");
    {
        std::ofstream out(tmp);
        out << j.dump(2) << "\n";
        if (!out)
            throw ResourceError("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, final_path);
    return final_path;
}

void emit_pseudocolor(const std::vector<double>& values, int rows, int cols, Colormap map,
                      const std::filesystem::path& path)
{
    if (rows < 1 || cols < 1 || values.size() != static_cast<std::size_t>(rows) * cols)
        throw DomainError("emit_pseudocolor: matrix shape does not match its data");
    double lo = 0.0, hi = 0.0;
    for (double v : values) {
        if (!std::isfinite(v))
            throw DomainError("emit_pseudocolor: non-finite value");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::vector<unsigned char> pixels(values.size() * 3);
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double v = values[k];
        double level;
        if (map == Colormap::diverging) {
            if (v > 0.0)
                level = 128.0 * (1.0 - v / hi);
            else if (v < 0.0)
                level = 128.0 + 127.0 * (v / lo);
            else
                level = 128.0;
        } else {
            level = hi > 0.0 ? 255.0 * (1.0 - std::clamp(v / hi, 0.0, 1.0)) : 255.0;
        }
        const auto g = static_cast<unsigned char>(std::lround(std::clamp(level, 0.0, 255.0)));
        pixels[3 * k] = pixels[3 * k + 1] = pixels[3 * k + 2] = g;
    }
    {
        std::ofstream out(path, std::ios::binary);
        out << "P6\n" << cols << " " << rows << "\n255\n";
        out.write(reinterpret_cast<const char*>(pixels.data()),
                  static_cast<std::streamsize>(pixels.size()));
        if (!out)
            throw ResourceError("cannot write image " + path.string());
    }
    auto side = path;
    side += ".txt";
    std::ofstream meta(side);
    meta << "colormap = " << (map == Colormap::diverging ? "diverging" : "sequential") << "\n"
         << "zero_value = 0.0\n"
         << "zero_gray = " << (map == Colormap::diverging ? 128 : 255) << "\n"
         << "min = " << fmt(lo) << "\n"
         << "max = " << fmt(hi) << "\n";
    if (!meta)
        throw ResourceError("cannot write " + side.string());
}

void emit_wigner_image(const wigner::WignerGrid& w, Colormap map,
                       const std::filesystem::path& path)
{
    std::vector<double> image(w.values.size());
    for (int j = 0; j < w.np; ++j)
        for (int i = 0; i < w.nx; ++i)
            image[static_cast<std::size_t>(w.np - 1 - j) * w.nx + i] = w.at(i, j);
    emit_pseudocolor(image, w.np, w.nx, map, path);
}

void write_series(const std::filesystem::path& path, const std::vector<std::string>& header,
                  const std::vector<std::vector<double>>& rows)
{
    for (const auto& row : rows)
        if (row.size() != header.size())
            throw DomainError("write_series: row arity differs from header");
    std::ofstream out(path);
    out << "# ";
    for (std::size_t k = 0; k < header.size(); ++k)
        out << (k ? "," : "") << header[k];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k)
            out << (k ? "," : "") << fmt(row[k]);
        out << "\n";
    }
    if (!out)
        throw ResourceError("cannot write series " + path.string());
}

Series read_series(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ResourceError("cannot read series " + path.string());
    Series s;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
        throw FormatError(path.string() + ": missing '# ' header");
    std::istringstream head(line.substr(2));
    for (std::string field; std::getline(head, field, ',');)
        s.header.push_back(field);
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<double> row;
        std::istringstream cells(line);
        for (std::string field; std::getline(cells, field, ',');) {
            char* end = nullptr;
            const double v = std::strtod(field.c_str(), &end);
            if (end == field.c_str() || *end != '\0')
                throw FormatError(path.string() + ": bad number '" + field + "'");
            row.push_back(v);
        }
        if (row.size() != s.header.size())
            throw FormatError(path.string() + ": row arity differs from header");
        s.rows.push_back(std::move(row));
    }
    return s;
}

} // namespace kgpe::io
