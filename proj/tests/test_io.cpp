#include "kgpe/error.hpp"
#include "kgpe/io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

using namespace kgpe;
using namespace kgpe::io;

namespace fs = std::filesystem;

namespace {

RunConfig parse(std::vector<std::string> args)
{
    args.insert(args.begin(), "kgpe");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    return parse_config(static_cast<int>(argv.size()), argv.data());
}

int exit_code_of(std::vector<std::string> args)
{
    try {
        parse(std::move(args));
    } catch (const UsageError& e) {
        return e.exit_code();
    }
    return -1;
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("kgpe_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

// Pixel bytes of a P6 file written by emit_pseudocolor.
std::vector<unsigned char> ppm_pixels(const fs::path& p, int& rows, int& cols)
{
    std::ifstream in(p, std::ios::binary);
    std::string magic;
    int maxval;
    in >> magic >> cols >> rows >> maxval;
    in.get();
    std::vector<unsigned char> px(static_cast<std::size_t>(rows) * cols * 3);
    in.read(reinterpret_cast<char*>(px.data()), static_cast<std::streamsize>(px.size()));
    return px;
}

} // namespace

TEST_CASE("command-line parsing")
{
    const RunConfig c = parse({"evolve", "--center", "unstable", "--eta", "2", "--upsilon", "1"});
    CHECK(c.command == "evolve");
    CHECK(c.params.eta == 2.0);
    CHECK(c.params.upsilon == 1.0);
    CHECK(c.params.kappa == 1.0);
    CHECK(c.params.tau_h == doctest::Approx(std::numbers::pi / 3).epsilon(1e-15));
    CHECK(c.center_x() == doctest::Approx(std::numbers::sqrt2 * std::numbers::pi / 2));

    const RunConfig s = parse({"evolve", "--center", "stable", "--eta", "1"});
    CHECK(s.center_x() == doctest::Approx(2 * std::numbers::sqrt2 * std::numbers::pi));
    CHECK(parse({"evolve", "--center", "1.5"}).center_x() == 1.5);
    CHECK(parse({"ground-state"}).center_x() == 0.0);

    const RunConfig t = parse({"poincare", "--tau", "0.5"});
    CHECK(t.tau_explicit);
    CHECK(t.params.tau_h == 0.5);
    CHECK(parse({"poincare", "--r", "1", "--q", "4"}).params.tau_h ==
          doctest::Approx(std::numbers::pi / 2));

    CHECK(exit_code_of({}) == 2);
    CHECK(exit_code_of({"--help"}) == 0);
    CHECK(exit_code_of({"nonsense"}) == 2);
    CHECK(exit_code_of({"evolve"}) == 2);
    CHECK(exit_code_of({"wigner"}) == 2);
    CHECK(exit_code_of({"poincare", "--tau", "1", "--q", "4"}) == 2);
    CHECK(exit_code_of({"poincare", "--q", "0"}) == 2);
    CHECK(exit_code_of({"poincare", "--eta", "-1"}) == 2);
    CHECK(exit_code_of({"poincare", "--points", "1000"}) == 2);
    CHECK(exit_code_of({"evolve", "--center", "sideways"}) == 2);
    CHECK(exit_code_of({"evolve", "--center", "1", "--kicks", "-3"}) == 2);
}

TEST_CASE("config files and overrides")
{
    const fs::path dir = scratch("config");
    const fs::path cfg = dir / "run.cfg";
    {
        std::ofstream out(cfg);
        out << "eta = 2\nupsilon = 10\nkicks = 7\ncenter = stable\n";
    }
    const RunConfig c = parse({"evolve", "--config", cfg.string(), "--upsilon", "3"});
    CHECK(c.params.eta == 2.0);
    CHECK(c.params.upsilon == 3.0);
    CHECK(c.kicks == 7);
    CHECK(c.center.kind == CenterSpec::Kind::stable);

    {
        std::ofstream out(cfg);
        out << "eta = 2\ncolour = blue\n";
    }
    CHECK(exit_code_of({"poincare", "--config", cfg.string()}) == 2);

    // config_text round-trips through --config.
    RunConfig orig = parse({"depletion", "--center", "0.3", "--eta", "0.7", "--upsilon", "0.1",
                            "--kappa", "0.9", "--tau", "1.1", "--modes", "4", "--seed", "99"});
    {
        std::ofstream out(cfg);
        out << config_text(orig);
    }
    const RunConfig back = parse({"depletion", "--config", cfg.string()});
    CHECK(back.params.eta == orig.params.eta);
    CHECK(back.params.upsilon == orig.params.upsilon);
    CHECK(back.params.kappa == orig.params.kappa);
    CHECK(back.params.tau_h == orig.params.tau_h);
    CHECK(back.center.value == orig.center.value);
    CHECK(back.modes == 4);
    CHECK(back.seed == 99);
    CHECK(config_text(back) == config_text(orig));
}

TEST_CASE("output paths stay inside the output directory")
{
    const fs::path root = "/tmp/out";
    CHECK(confined_path(root, "a.csv") == fs::path("/tmp/out/a.csv"));
    CHECK(confined_path(root, "sub/a.csv") == fs::path("/tmp/out/sub/a.csv"));
    CHECK_THROWS_AS(confined_path(root, "/etc/passwd"), DomainError);
    CHECK_THROWS_AS(confined_path(root, "../a.csv"), DomainError);
    CHECK_THROWS_AS(confined_path(root, "sub/../../a.csv"), DomainError);
}

TEST_CASE("sha256 and manifest")
{
    const fs::path dir = scratch("manifest");
    {
        std::ofstream out(dir / "abc.txt", std::ios::binary);
        out << "abc";
    }
    CHECK(sha256_file(dir / "abc.txt") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");

    write_series(dir / "s.csv", {"a", "b"}, {{1, 2}, {3, 4}});
    RunConfig cfg = parse({"poincare"});
    cfg.output = dir;
    RunManifest m(cfg, "1.0.0");
    m.add_file(dir / "abc.txt");
    m.add_file(dir / "s.csv");
    m.add_diagnostic("score", 0.5);
    const fs::path path = m.write();
    CHECK(path == dir / "manifest.json");
    CHECK_FALSE(fs::exists(dir / "manifest.json.tmp"));

    const auto j = nlohmann::json::parse(slurp(path));
    CHECK(j["command"] == "poincare");
    CHECK(j["version"] == "1.0.0");
    CHECK(j["diagnostics"]["score"] == 0.5);
    REQUIRE(j["files"].size() == 2);
    for (const auto& f : j["files"]) {
        const fs::path p = dir / f["name"].get<std::string>();
        CHECK(f["sha256"] == sha256_file(p));
        CHECK(f["bytes"] == fs::file_size(p));
    }
    CHECK_THROWS_AS(m.add_file("/etc/hostname"), DomainError);
}

TEST_CASE("series files")
{
    const fs::path dir = scratch("series");
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> d(-1e3, 1e3);
    std::vector<std::vector<double>> rows(50, std::vector<double>(3));
    for (auto& r : rows)
        for (auto& v : r)
            v = d(gen) * std::pow(10.0, static_cast<int>(gen() % 40) - 20);
    rows[0] = {0.1, 1.0 / 3.0, -0.0};
    write_series(dir / "x.csv", {"kick", "t", "value"}, rows);
    const Series s = read_series(dir / "x.csv");
    CHECK(s.header == std::vector<std::string>{"kick", "t", "value"});
    CHECK(s.rows == rows);

    write_series(dir / "empty.csv", {"a"}, {});
    CHECK(slurp(dir / "empty.csv") == "# a\n");
    CHECK(read_series(dir / "empty.csv").rows.empty());

    CHECK_THROWS_AS(write_series(dir / "bad.csv", {"a", "b"}, {{1.0}}), DomainError);
    {
        std::ofstream out(dir / "bad.csv");
        out << "a,b\n1,2\n";
    }
    CHECK_THROWS_AS(read_series(dir / "bad.csv"), FormatError);
    {
        std::ofstream out(dir / "bad.csv");
        out << "# a,b\n1,2,3\n";
    }
    CHECK_THROWS_AS(read_series(dir / "bad.csv"), FormatError);
}

TEST_CASE("pseudocolor images")
{
    const fs::path dir = scratch("image");
    int rows = 0, cols = 0;

    emit_pseudocolor(std::vector<double>(12, 0.0), 3, 4, Colormap::diverging, dir / "z.ppm");
    for (unsigned char g : ppm_pixels(dir / "z.ppm", rows, cols))
        CHECK(g == 128);
    CHECK(rows == 3);
    CHECK(cols == 4);

    emit_pseudocolor({-2.0, 0.0, 1.0, 0.5}, 1, 4, Colormap::diverging, dir / "d.ppm");
    const auto d = ppm_pixels(dir / "d.ppm", rows, cols);
    CHECK(d[0] == 255);
    CHECK(d[3] == 128);
    CHECK(d[6] == 0);
    CHECK(d[9] == 64);

    emit_pseudocolor({0.0, 2.0, 1.0}, 1, 3, Colormap::sequential, dir / "s.ppm");
    const auto s = ppm_pixels(dir / "s.ppm", rows, cols);
    CHECK(s[0] == 255);
    CHECK(s[3] == 0);
    CHECK(s[6] == 128);

    // A positive Gaussian still records zero as the reference level.
    std::vector<double> g(64 * 64);
    for (int j = 0; j < 64; ++j)
        for (int i = 0; i < 64; ++i)
            g[j * 64 + i] = std::exp(-0.01 * ((i - 32) * (i - 32) + (j - 32) * (j - 32)));
    emit_pseudocolor(g, 64, 64, Colormap::diverging, dir / "g.ppm");
    const std::string side = slurp(dir / "g.ppm.txt");
    CHECK(side.find("zero_value = 0.0\n") != std::string::npos);
    CHECK(side.find("zero_gray = 128\n") != std::string::npos);

    CHECK_THROWS_AS(emit_pseudocolor({1.0, 2.0}, 2, 2, Colormap::diverging, dir / "x.ppm"),
                    DomainError);
    CHECK_THROWS_AS(emit_pseudocolor({NAN}, 1, 1, Colormap::diverging, dir / "x.ppm"),
                    DomainError);
}
