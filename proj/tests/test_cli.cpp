#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "commands.hpp"
#include "kinship/mcengine.hpp"
#include "kinship/powerest.hpp"

using namespace kinship;
using namespace kinship::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("kinship_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

void write_file(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TableSource synth(const TempDir& dir, std::vector<std::string> subpops, double divergence = 0.1) {
  SynthArgs a;
  a.subpops = std::move(subpops);
  a.loci = 5;
  a.alleles = 5;
  a.divergence = divergence;
  a.out_freqs = dir / "f.csv";
  a.out_meta = dir / "t.meta";
  std::ostringstream out, err;
  REQUIRE(cmd_synth_freqs(a, out, err) == kExitOk);
  return {"", a.out_meta};
}

RunSpec run(const TableSource& src, const std::string& out_dir) {
  RunSpec spec;
  spec.source = src;
  spec.replicates = 20'000;
  spec.seed = 9;
  spec.out_dir = out_dir;
  return spec;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("hypothesis presets") {
    CHECK(resolve_hypothesis({"parent-child", {}, {}}).default_alpha == kParentChildAlpha);
    CHECK(resolve_hypothesis({"half-sib-paper", {}, {}}).theta1 == ThetaIBD::half_sib_paper());
    CHECK(resolve_hypothesis({"half-sib-standard", {}, {}}).theta1 == ThetaIBD::half_sib_standard());
    CHECK(resolve_hypothesis({"custom", {}, "0.5,0.25,0.25"}).theta1 == ThetaIBD(0.5, 0.25, 0.25));
    CHECK_THROWS(resolve_hypothesis({"custom", {}, {}}));
    CHECK_THROWS(resolve_hypothesis({"cousin", {}, {}}));
  }

  TEST_CASE("lr prints the worked example") {
    TempDir dir("lr");
    write_file(dir / "t.meta", "subpops = Thai\nproportions = 1\n");
    write_file(dir / "f.csv", "subpop,locus,allele,freq\nThai,D3S1358,13,0.15\nThai,D3S1358,14,0.20\n"
                              "Thai,D3S1358,15,0.65\n");
    write_file(dir / "a.csv", "locus,allele1,allele2\nD3S1358,13,14\n");
    write_file(dir / "b.csv", "locus,allele1,allele2\nD3S1358,14,13\n");
    LrArgs args{{dir / "f.csv", dir / "t.meta"}, {"parent-child", {}, {}}, dir / "a.csv", dir / "b.csv", {}};
    std::ostringstream out, err;
    CHECK(cmd_lr(args, out, err) == kExitOk);
    CHECK(out.str().find("2.91667") != std::string::npos);

    write_file(dir / "c.csv", "locus,allele1,allele2\nD3S1358,13,99\n");
    args.profile2 = dir / "c.csv";
    std::ostringstream out2, err2;
    CHECK(cmd_lr(args, out2, err2) == kExitValidation);
    CHECK(err2.str().find("UnknownAllele") != std::string::npos);
    CHECK(err2.str().find("c.csv") != std::string::npos);
  }

  TEST_CASE("lr on duplicated subpopulations gives equal statistics") {
    TempDir dir("lrdup");
    write_file(dir / "t.meta", "subpops = A, B\nproportions = 0.4, 0.6\n");
    write_file(dir / "f.csv", "subpop,locus,allele,freq\nA,L,1,0.3\nA,L,2,0.7\nB,L,1,0.3\nB,L,2,0.7\n");
    write_file(dir / "a.csv", "locus,allele1,allele2\nL,1,2\n");
    write_file(dir / "b.csv", "locus,allele1,allele2\nL,1,1\n");
    LrArgs args{{dir / "f.csv", dir / "t.meta"}, {"full-sib", {}, {}}, dir / "a.csv", dir / "b.csv", {}};
    std::ostringstream out, err;
    REQUIRE(cmd_lr(args, out, err) == kExitOk);
    std::istringstream lines(out.str());
    std::string line;
    std::set<std::string> values;
    bool in_stats = false;
    while (std::getline(lines, line)) {
      if (line.rfind("statistic", 0) == 0) {
        in_stats = true;
        continue;
      }
      if (in_stats && !line.empty()) values.insert(line.substr(10));
    }
    CHECK(values.size() == 1);
  }

  TEST_CASE("power writes byte-identical outputs for a fixed seed") {
    TempDir dir("power");
    const auto src = synth(dir, {"S1", "S2", "S3"});
    auto spec = run(src, dir / "a");
    std::ostringstream out, err;
    REQUIRE(cmd_power(spec, out, err) == kExitOk);
    spec.out_dir = dir / "b";
    spec.workers = 3;
    std::ostringstream out2, err2;
    REQUIRE(cmd_power(spec, out2, err2) == kExitOk);
    CHECK(out.str() == out2.str());
    for (const char* f : {"power.csv", "power.json"}) {
      CHECK(read_file(dir / (std::string("a/") + f)) == read_file(dir / (std::string("b/") + f)));
    }
    std::istringstream csv(read_file(dir / "a/power.csv"));
    CHECK(read_power_csv(csv).size() == 7);
  }

  TEST_CASE("power guards on alpha * B") {
    TempDir dir("guard");
    const auto src = synth(dir, {"S1", "S2"});
    auto spec = run(src, dir / "o");
    spec.replicates = 10'000;
    spec.alphas = {0.0002};
    std::ostringstream out, err;
    CHECK(cmd_power(spec, out, err) == kExitOk);
    CHECK(err.str().find("AlphaTooSmallForB") != std::string::npos);

    spec.alphas = {0.00002};
    std::ostringstream out2, err2;
    CHECK(cmd_power(spec, out2, err2) == kExitRuntime);

    spec.alphas = {1.5};
    std::ostringstream out3, err3;
    CHECK(cmd_power(spec, out3, err3) == kExitValidation);
  }

  TEST_CASE("validation failures exit 2") {
    TempDir dir("bad");
    write_file(dir / "t.meta", "subpops = A, B\nproportions = 0.4, 0.7\n");
    write_file(dir / "f.csv", "subpop,locus,allele,freq\nA,L,1,1\nB,L,1,1\n");
    std::ostringstream out, err;
    CHECK(cmd_validate({{dir / "f.csv", dir / "t.meta"}, {}}, out, err) == kExitValidation);
    CHECK(err.str().find("ProportionSumOutOfTolerance") != std::string::npos);
    CHECK(cmd_validate({{dir / "missing.csv", dir / "t.meta"}, {}}, out, err) == kExitValidation);
  }

  TEST_CASE("power-curve writes a readable curve per statistic") {
    TempDir dir("curve");
    const auto src = synth(dir, {"S1", "S2"});
    auto spec = run(src, dir / "o");
    spec.stats = "LAF,CB";
    spec.alpha_grid = {1e-3, 5e-3, 1e-2};
    std::ostringstream out, err;
    REQUIRE(cmd_power_curve(spec, out, err) == kExitOk);
    std::istringstream in(read_file(dir / "o/power_curve.csv"));
    const auto curves = read_curve_csv(in);
    REQUIRE(curves.size() == 2);
    CHECK(curves[1].statistic == Statistic::CB);
    CHECK(curves[0].points.size() == 3);
  }

  TEST_CASE("subpop-bias") {
    TempDir dir("bias");
    {
      const auto one = synth(dir, {"Only"});
      std::ostringstream out, err;
      CHECK(cmd_subpop_bias(run(one, dir / "o1"), out, err) == kExitValidation);
      CHECK(err.str().find("requires >=2 subpopulations") != std::string::npos);
    }
    const auto twin = synth(dir, {"X", "Y"}, 0.0);
    auto spec = run(twin, dir / "o2");
    spec.stats = "LAF";
    spec.alphas = {0.01};
    std::ostringstream out, err;
    REQUIRE(cmd_subpop_bias(spec, out, err) == kExitOk);
    CHECK(out.str().find("[OK]") != std::string::npos);
    CHECK(fs::exists(dir / "o2/subpop_curve_X.csv"));
    CHECK(fs::exists(dir / "o2/subpop_curve_Y.csv"));
    std::istringstream in(read_file(dir / "o2/diff_ci_LAF_alpha0.01.csv"));
    const auto diffs = read_diff_csv(in);
    REQUIRE(diffs.size() == 1);
    CHECK(diffs[0].ci.low <= 0.0);
    CHECK(diffs[0].ci.high >= 0.0);
    CHECK(std::abs(diffs[0].ci.estimate) < 0.03);
  }

  TEST_CASE("dumped samples round trip") {
    TempDir dir("dump");
    const auto src = synth(dir, {"S1", "S2"});
    auto spec = run(src, dir / "o");
    spec.replicates = 2000;
    spec.alphas = {0.01};
    spec.dump_samples = true;
    std::ostringstream out, err;
    REQUIRE(cmd_power(spec, out, err) == kExitOk);
    std::istringstream in(read_file(dir / "o/samples_alt.csv"));
    const auto m = read_sample_csv(in);
    CHECK(m.replicates() == 2000);
    CHECK(m.statistics.size() == 7);
  }
}
