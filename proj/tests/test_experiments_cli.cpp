#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ilw/experiments.hpp"

using namespace ilw;
using namespace ilw::lab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("ilw-lab-test-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

ConfigText parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config_text(is);
}

int exit_code(const std::string& args) {
  const std::string cmd = std::string(ILW_LAB_BINARY) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Commands, TableRoundTrip) {
  for (const auto& [name, cmd] : command_table()) EXPECT_EQ(command_name(parse_command(name)), name);
  EXPECT_THROW(parse_command("nope"), UsageError);
}

TEST(Config, ParsesSectionsAndComments) {
  const auto t = parse("N = 64   # grid\n\n[simulate]\nT = 0.5\n dt=1e-3 \n");
  EXPECT_EQ(t.sections.at("").at("N"), "64");
  EXPECT_EQ(t.sections.at("simulate").at("T"), "0.5");
  EXPECT_EQ(t.sections.at("simulate").at("dt"), "1e-3");
  EXPECT_THROW(parse("[simulate\n"), UsageError);
  EXPECT_THROW(parse("novalue\n"), UsageError);
  EXPECT_THROW(parse(" = 3\n"), UsageError);
}

TEST(Config, PrecedenceDefaultsFileSectionFlags) {
  const auto t = parse("N = 64\nT = 0.3\n[simulate]\nT = 0.5\ndt = 0.01\n[wave]\nT = 9\n");
  const auto c = resolve_config(Command::simulate, &t, {{"dt", "0.002"}});
  EXPECT_EQ(c.n, 64u);
  EXPECT_DOUBLE_EQ(c.final_time, 0.5);
  EXPECT_DOUBLE_EQ(c.dt, 0.002);
  EXPECT_DOUBLE_EQ(c.period, 2.0 * kPi);  // command default
  EXPECT_EQ(c.echo.at("N"), "64");
}

TEST(Config, Errors) {
  EXPECT_THROW(resolve_config(Command::simulate, nullptr, {{"bogus", "1"}}), UsageError);
  const auto t = parse("[nosuch]\nN = 4\n");
  EXPECT_THROW(resolve_config(Command::simulate, &t, {}), UsageError);
  EXPECT_THROW(resolve_config(Command::simulate, nullptr, {{"N", "abc"}}), ContractError);
  EXPECT_THROW(resolve_config(Command::simulate, nullptr, {{"dt", "-1"}}), ContractError);
  EXPECT_THROW(resolve_config(Command::beta, nullptr, {{"s", "-0.7"}}), ContractError);
}

TEST(Config, SweepsAndAutoKappa) {
  const auto g = resolve_config(Command::gronwall, nullptr, {{"delta", "0.5"}});
  ASSERT_EQ(g.deltas.size(), 1u);
  EXPECT_DOUBLE_EQ(g.deltas[0], 0.5);
  const auto s = resolve_config(Command::smoothing, nullptr, {{"s_pairs", "-0.5:1,0:2"}});
  ASSERT_EQ(s.s_pairs.size(), 2u);
  EXPECT_DOUBLE_EQ(s.s_pairs[1].second, 2.0);
  const auto b = resolve_config(Command::beta, nullptr, {{"kappa", "auto"}});
  EXPECT_FALSE(b.kappa.has_value());
  EXPECT_DOUBLE_EQ(*resolve_config(Command::beta, nullptr, {{"kappa", "8"}}).kappa, 8.0);
}

TEST(Config, SampleFilesResolve) {
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(ILW_CONFIG_DIR)) {
    const auto cmd = parse_command(entry.path().stem().string());
    const auto file = parse_config_file(entry.path());
    EXPECT_NO_THROW(resolve_config(cmd, &file, {})) << entry.path();
    ++count;
  }
  EXPECT_EQ(count, command_table().size());
}

TEST(ParallelMap, KeepsIndexOrderAndRethrows) {
  const auto v = parallel_map(50, [](std::size_t i) { return i * i; }, 4);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], i * i);
  EXPECT_THROW(parallel_map(
                   8,
                   [](std::size_t i) {
                     if (i == 5) throw std::runtime_error("x");
                     return i;
                   },
                   3),
               std::runtime_error);
}

TEST(Snapshot, RoundTripIsBitExact) {
  const SpectralGrid g(2.5, 32);
  const auto u = sample_function(g, [](double x) { return std::sin(x) + 0.1 * std::cos(7.0 * x); });
  std::stringstream ss;
  io::write_snapshot(ss, u);
  EXPECT_EQ(ss.str().size(), 16u + 32u * 16u);
  EXPECT_EQ(ss.str().substr(0, 4), "ILWS");
  const auto v = io::read_snapshot(ss);
  EXPECT_EQ(v.grid(), g);
  for (std::size_t k = 0; k < 32; ++k) EXPECT_EQ(v.coeffs()[k], u.coeffs()[k]);
  std::stringstream bad("XXXX");
  EXPECT_THROW(io::read_snapshot(bad), std::runtime_error);
}

TEST(Csv, FormatsRoundTrip) {
  io::CsvTable t{{"a", "b"}, {}};
  t.add({0.1, 1.0 / 3.0});
  EXPECT_THROW(t.add({1.0}), DimensionError);
  std::ostringstream os;
  io::write_csv(os, t);
  EXPECT_EQ(os.str(), "a,b\n0.10000000000000001,0.33333333333333331\n");
  EXPECT_EQ(std::stod(io::format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Run, SimulateIsDeterministic) {
  KeyValues f{{"N", "64"}, {"T", "0.05"}, {"dt", "1e-3"}, {"seed", "7"}};
  std::string first;
  for (int i = 0; i < 2; ++i) {
    const auto dir = scratch("det" + std::to_string(i));
    f["output_dir"] = dir.string();
    std::ostringstream log;
    EXPECT_EQ(run(resolve_config(Command::simulate, nullptr, f), log), 0) << log.str();
    const auto csv = slurp(dir / "diagnostics.csv") + slurp(dir / "final_state.bin");
    if (i == 0) first = csv;
    else EXPECT_EQ(csv, first);
    const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
    EXPECT_EQ(m["version"], kVersion);
    EXPECT_TRUE(m["pass"].get<bool>());
  }
}

TEST(Run, TwoDepthWithVanishingSecondWeightMatchesSingleDepth) {
  const SpectralGrid g(100.0, 256);
  const auto u0 = sample_function(g, [](double x) { return std::exp(-(x - 50.0) * (x - 50.0)); });
  for (Frame f : {Frame::original, Frame::renormalized}) {
    const auto a = evolve_to(make_two_depth(1.0, 0.0, 2.0, 3.0, g, f), u0, 0.5, 1e-2);
    const auto b = evolve_to(make_ilw(2.0, g, f), u0, 0.5, 1e-2);
    EXPECT_LT(l2_norm(combine(1.0, a, -1.0, b)), 1e-12 * l2_norm(b));
  }
}

TEST(Run, TwoDepthFrameToggleGivesSameDiscrepancies) {
  std::vector<double> d[2];
  int i = 0;
  for (const char* frame : {"original", "renormalized"}) {
    const auto dir = scratch(std::string("frame-") + frame);
    const auto c = resolve_config(Command::twodepth, nullptr,
                                  {{"frame", frame}, {"T", "0.5"}, {"N", "256"}, {"output_dir", dir.string()}});
    std::ostringstream log;
    run(c, log);
    d[i++] = nlohmann::json::parse(slurp(dir / "report.json"))["discrepancy"].get<std::vector<double>>();
  }
  ASSERT_EQ(d[0].size(), d[1].size());
  // frames differ only by integration error in the co-moving shift
  for (std::size_t k = 0; k < d[0].size(); ++k) EXPECT_NEAR(d[0][k], d[1][k], 1e-9);
}

TEST(Binary, ExitCodes) {
  EXPECT_EQ(exit_code(""), 1);
  EXPECT_EQ(exit_code("nosuch"), 1);
  EXPECT_EQ(exit_code("simulate --bogus 1"), 1);
  EXPECT_EQ(exit_code("simulate --N abc"), 1);
  EXPECT_EQ(exit_code("simulate --help"), 0);
  const auto dir = scratch("bin");
  EXPECT_EQ(exit_code("simulate --N 64 --T 0.02 --output_dir " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "report.json"));
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  const auto cfg = dir / "bad.cfg";
  std::ofstream(cfg) << "[simulate]\nwhatever = 1\n";
  EXPECT_EQ(exit_code("simulate --config " + cfg.string()), 1);
  // a check that cannot pass reports through exit status 3
  EXPECT_EQ(exit_code("simulate --N 64 --T 0.02 --drift_tol 0 --amplitude 5 --output_dir " + dir.string()), 3);
}
