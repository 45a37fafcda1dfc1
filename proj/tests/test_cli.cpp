#include "oracles.hpp"

#include "transop/cli.hpp"
#include "transop/io.hpp"
#include "transop/operators.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

namespace transop {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("transop_cli_" + std::string(
                                                            ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(Cli, NoSubcommandIsUsageError) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"synth", "--n", "abc"}).code, 1);
}

TEST_F(Cli, HelpExitsZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("bench"), std::string::npos);
}

TEST_F(Cli, SynthToStdoutAndFile) {
  const auto r = run({"synth", "--n", "5", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(points_from_csv(r.out).size(), 5u);
  ASSERT_EQ(run({"synth", "--n", "5", "--seed", "3", "--out", path("d.csv")}).code, 0);
  EXPECT_EQ(read_file(path("d.csv")), r.out);
  EXPECT_EQ(run({"synth", "--kind", "spiral"}).code, 1);
}

TEST_F(Cli, TruthModelHasTwoOperators) {
  ASSERT_EQ(run({"synth", "--kind", "two_class", "--n", "4", "--truth", path("t.json")}).code, 0);
  EXPECT_EQ(dictionary_from_json(read_file(path("t.json"))).dict.count(), 2);
}

TEST_F(Cli, ConfigFileFillsMissingFlags) {
  write_file_atomic(path("c.cfg"), "n = 7\nseed = 5\n");
  const auto from_cfg = run({"synth", "--config", path("c.cfg")});
  ASSERT_EQ(from_cfg.code, 0) << from_cfg.err;
  EXPECT_EQ(from_cfg.out, run({"synth", "--n", "7", "--seed", "5"}).out);
  // The command line wins over the file.
  const auto override = run({"synth", "--config", path("c.cfg"), "--n", "3"});
  EXPECT_EQ(points_from_csv(override.out).size(), 3u);
}

TEST_F(Cli, UnknownConfigKeyIsUsageError) {
  write_file_atomic(path("c.cfg"), "bogus = 1\n");
  const auto r = run({"synth", "--config", path("c.cfg")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bogus"), std::string::npos);
}

TEST_F(Cli, MissingFileIsRuntimeError) {
  const auto r = run({"pair", "--data", path("none.csv")});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u);
  EXPECT_EQ(r.err.find('\n'), r.err.size() - 1);
}

TEST_F(Cli, TrainInferPipeline) {
  ASSERT_EQ(run({"synth", "--n", "40", "--seed", "1", "--out", path("d.csv")}).code, 0);
  ASSERT_EQ(run({"pair", "--data", path("d.csv"), "--k", "2", "--out", path("p.csv")}).code, 0);
  const auto train = run({"train", "--data", path("d.csv"), "--pairs", path("p.csv"), "--epochs", "2",
                          "--batch_size", "20", "--latent_scale", "10", "--log", path("log.csv"), "--out",
                          path("m.json")});
  ASSERT_EQ(train.code, 0) << train.err;
  EXPECT_EQ(dictionary_from_json(read_file(path("m.json"))).latent_scale, 10.0);
  EXPECT_EQ(parse_csv(read_file(path("log.csv")), true).rows.size(), 4u);

  const auto inf = run({"infer", "--model", path("m.json"), "--data", path("d.csv"), "--pairs", path("p.csv")});
  ASSERT_EQ(inf.code, 0) << inf.err;
  const auto table = parse_csv(inf.out, true);
  EXPECT_EQ(table.header.back(), "c_0");
  EXPECT_EQ(table.rows.size(), 40u);
  const auto threaded = run({"infer", "--model", path("m.json"), "--data", path("d.csv"), "--pairs",
                             path("p.csv"), "--threads", "3"});
  EXPECT_EQ(threaded.out, inf.out);
}

TEST_F(Cli, PairIndexOutOfRange) {
  ASSERT_EQ(run({"synth", "--n", "4", "--out", path("d.csv")}).code, 0);
  write_file_atomic(path("p.csv"), "anchor_index,neighbor_index\n0,9\n");
  ASSERT_EQ(run({"synth", "--n", "2", "--truth", path("m.json"), "--out", path("unused.csv")}).code, 0);
  const auto r = run({"infer", "--model", path("m.json"), "--data", path("d.csv"), "--pairs", path("p.csv")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("row 0"), std::string::npos);
}

TEST_F(Cli, BenchIsReproducibleWithoutTiming) {
  const auto a = run({"bench", "--pairs", "4", "--seed", "2"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, run({"bench", "--pairs", "4", "--seed", "2"}).out);
  const auto table = parse_csv(a.out, true);
  EXPECT_EQ(table.header, (std::vector<std::string>{"pair_index", "method", "iterations", "final_objective",
                                                    "recon_error", "wall_time_ns"}));
  ASSERT_EQ(table.rows.size(), 8u);
  EXPECT_EQ(table.rows[0][1], "prox");
  EXPECT_EQ(table.rows[1][1], "subgrad");
  EXPECT_EQ(table.rows[0][5], "0");
  const auto timed = parse_csv(run({"bench", "--pairs", "1", "--timing", "--methods", "prox"}).out, true);
  ASSERT_EQ(timed.rows.size(), 1u);
  EXPECT_GT(parse_int(timed.rows[0][5]), 0);
  EXPECT_EQ(run({"bench", "--methods", "newton"}).code, 1);
}

TEST_F(Cli, StabilityWritesTrace) {
  ASSERT_EQ(run({"synth", "--n", "2", "--truth", path("m.json"), "--out", path("d.csv")}).code, 0);
  const auto r = run({"stability", "--model", path("m.json"), "--trace_op", "0", "--samples", "5", "--trace_out",
                      path("t.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "operator_index,metric,magnitude");
  EXPECT_EQ(parse_csv(read_file(path("t.csv")), true).rows.size(), 5u);
  EXPECT_EQ(run({"stability", "--model", path("m.json"), "--trace_op", "0"}).code, 1);
}

TEST_F(Cli, ClassifierEncoderSpread) {
  ASSERT_EQ(run({"synth", "--kind", "two_class", "--n", "20", "--truth", path("m.json"), "--out", path("d.csv")})
                .code,
            0);
  ASSERT_EQ(run({"classifier", "--data", path("d.csv"), "--epochs", "50", "--out", path("c.json")}).code, 0);
  const auto enc = run({"encoder", "--data", path("d.csv"), "--model", path("m.json"), "--classifier",
                        path("c.json"), "--hidden", "4", "--epochs", "2", "--batch_size", "10", "--curve",
                        path("curve.csv"), "--out", path("e.json")});
  ASSERT_EQ(enc.code, 0) << enc.err;
  EXPECT_EQ(parse_csv(read_file(path("curve.csv")), true).rows.size(), 2u);
  const auto spread = run({"spread", "--encoder", path("e.json"), "--data", path("d.csv")});
  ASSERT_EQ(spread.code, 0) << spread.err;
  EXPECT_EQ(spread.out.substr(0, spread.out.find('\n')), "class,op_0,op_1");
}

TEST_F(Cli, SampleAndPaths) {
  ASSERT_EQ(run({"synth", "--n", "6", "--truth", path("m.json"), "--out", path("d.csv")}).code, 0);
  const auto s = run({"sample", "--model", path("m.json"), "--data", path("d.csv"), "--samples", "3"});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(points_from_csv(s.out).size(), 18u);
  EXPECT_EQ(run({"sample", "--model", path("m.json"), "--data", path("d.csv"), "--samples", "0"}).code, 1);

  write_file_atomic(path("p.csv"), "anchor_index,neighbor_index\n0,1\n");
  const auto p = run({"paths", "--model", path("m.json"), "--data", path("d.csv"), "--pairs", path("p.csv"),
                      "--t", "0,1,2"});
  ASSERT_EQ(p.code, 0) << p.err;
  const auto rows = parse_numeric_rows(parse_csv(p.out, true));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0](1), points_from_csv(read_file(path("d.csv")))[0].z(0));
  EXPECT_EQ(run({"paths", "--model", path("m.json"), "--data", path("d.csv"), "--pairs", path("p.csv"),
                 "--pair_index", "4"})
                .code,
            2);
}

TEST_F(Cli, SynthTwiceIsByteIdentical) {
  ASSERT_EQ(run({"synth", "--kind", "rotation", "--n", "500", "--seed", "7", "--out", path("a.csv")}).code, 0);
  ASSERT_EQ(run({"synth", "--kind", "rotation", "--n", "500", "--seed", "7", "--out", path("b.csv")}).code, 0);
  EXPECT_EQ(read_file(path("a.csv")), read_file(path("b.csv")));
}

TEST_F(Cli, BenchRowCount) {
  const auto r = run({"bench", "--pairs", "100", "--methods", "prox,subgrad"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(parse_csv(r.out, true).rows.size(), 200u);
}

// Train on rotation pairs, then infer a held-out pair rotated by 0.3 and
// compare with a grid search over the learned operator's objective.
TEST_F(Cli, HeldOutPairMatchesGridOracle) {
  ASSERT_EQ(run({"synth", "--n", "200", "--seed", "1", "--out", path("d.csv")}).code, 0);
  ASSERT_EQ(run({"pair", "--data", path("d.csv"), "--k", "3", "--out", path("p.csv")}).code, 0);
  const auto train = run({"train", "--data", path("d.csv"), "--pairs", path("p.csv"), "--epochs", "8",
                          "--batch_size", "50", "--latent_scale", "10", "--gamma", "1e-6", "--out", path("m.json")});
  ASSERT_EQ(train.code, 0) << train.err;

  Vector z0(2);
  z0 << 0.6, 0.8;
  const Vector z1 = oracle::rotation(0.3) * z0;
  write_file_atomic(path("held.csv"), points_to_csv({{z0, std::nullopt}, {z1, std::nullopt}}));
  write_file_atomic(path("held_pairs.csv"), "anchor_index,neighbor_index\n0,1\n");
  const double zeta = 0.01;
  const auto inf = run({"infer", "--model", path("m.json"), "--data", path("held.csv"), "--pairs",
                        path("held_pairs.csv"), "--zeta", "0.01"});
  ASSERT_EQ(inf.code, 0) << inf.err;
  const double c = parse_double(parse_csv(inf.out, true).rows[0].back());

  const StoredModel model = dictionary_from_json(read_file(path("m.json")));
  const Matrix psi = model.dict.op(0);
  const Vector s0 = model.latent_scale * z0;
  const Vector s1 = model.latent_scale * z1;
  const auto f = [&](double x) {
    return 0.5 * (s1 - oracle::taylor_expm(x * psi) * s0).squaredNorm() + zeta * std::abs(x);
  };
  const double scale = 0.3 / psi.norm() * std::sqrt(2.0);  // expected magnitude of the coefficient
  const double best = oracle::grid_argmin(f, -4.0 * scale, 4.0 * scale, 1e-4);
  EXPECT_NEAR(c, best, 5e-3);
}

}  // namespace
}  // namespace transop
