// Copyright 2026 The sslab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "sslab/config.hpp"
#include "sslab/csv.hpp"
#include "sslab/haar.hpp"
#include "sslab/harness.hpp"
#include "sslab/pgm.hpp"
#include "sslab/rng.hpp"
#include "test_util.hpp"

namespace sslab {
namespace {

using harness::CmdAttack;
using harness::CmdEmbed;
using harness::CmdExtract;
using harness::CmdGen;
using harness::CmdImageEmbed;
using harness::CmdImageExtract;
using harness::CmdOptimize;
using harness::CmdOracleCheck;
using harness::CmdSweepAlpha;
using harness::CmdSweepAttack;
using harness::CmdSweepDomains;
using test_util::RunCommand;
using test_util::ScratchDir;

TEST(Config, ParsesFileSyntax) {
  Config cfg = harness::DefaultConfig();
  cfg.ParseString("# comment\nm = 128\n\n  lambda=0.5  # trailing\npostfilter = yes\n");
  EXPECT_EQ(cfg.GetCount("m"), 128u);
  EXPECT_DOUBLE_EQ(cfg.GetReal("lambda"), 0.5);
  EXPECT_TRUE(cfg.GetBool("postfilter"));
  EXPECT_EQ(cfg.GetString("profile"), "ramp:0.5:20");
}

TEST(Config, RejectsUnknownKeysWithLocation) {
  Config cfg = harness::DefaultConfig();
  try {
    cfg.ParseString("m = 4\nbogus = 1\n");
    FAIL() << "no error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
  }
  EXPECT_THROW(cfg.Set("nope", "1"), ConfigError);
  EXPECT_THROW(cfg.ParseString("no equals sign\n"), ConfigError);
}

TEST(Config, TypedGettersValidate) {
  Config cfg = harness::DefaultConfig();
  cfg.Set("m", "-3");
  EXPECT_THROW(cfg.GetCount("m"), ConfigError);
  cfg.Set("m", "12x");
  EXPECT_THROW(cfg.GetCount("m"), ConfigError);
  cfg.Set("lambda", "abc");
  EXPECT_THROW(cfg.GetReal("lambda"), ConfigError);
  cfg.Set("postfilter", "maybe");
  EXPECT_THROW(cfg.GetBool("postfilter"), ConfigError);
  cfg.Set("postfilter", "off");
  EXPECT_FALSE(cfg.GetBool("postfilter"));
  EXPECT_FALSE(cfg.IsSet("d_xy_per_site"));
}

TEST(Config, LaterSettingsOverride) {
  Config cfg = harness::DefaultConfig();
  cfg.ParseString("n = 10\n");
  cfg.Set("n", "20");
  EXPECT_EQ(cfg.GetCount("n"), 20u);
  const auto resolved = cfg.Resolved();
  ASSERT_EQ(resolved.size(), harness::Schema().size());
  EXPECT_EQ(resolved.front().first, harness::Schema().front().name);
}

TEST(Csv, SeventeenDigitsRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, std::nextafter(1.0, 2.0), 6.02214076e23, -2.5e-300}) {
    EXPECT_EQ(std::stod(FormatReal(v)), v);
  }
  std::ostringstream out;
  CsvWriter w(out);
  w.Comments({{"alpha", "0.5"}});
  w.Header({"a", "b"});
  w.Row(CsvRow(1.0 / 3.0, std::string("x")));
  EXPECT_THROW(w.Row({"1"}), std::logic_error);
  std::istringstream in(out.str());
  const CsvTable t = ReadCsv(in);
  EXPECT_EQ(t.Meta("alpha"), "0.5");
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.Numbers("a")[0], 1.0 / 3.0);
  EXPECT_EQ(t.Texts("b")[0], "x");
  EXPECT_TRUE(std::isnan(CsvTable::Number("")));
  EXPECT_THROW(t.Column("zzz"), std::runtime_error);
}

TEST(Pgm, RoundTrip) {
  const GrayImage img = test_util::SyntheticImage(24, 16, 3);
  std::stringstream buf;
  WritePgm(buf, img);
  const GrayImage back = ReadPgm(buf);
  EXPECT_EQ(back.width, 24u);
  EXPECT_EQ(back.height, 16u);
  EXPECT_EQ(back.pixels, img.pixels);
}

TEST(Pgm, HeaderComments) {
  std::string data = "P5\n# made by hand\n2 1\n255\n";
  data.push_back(static_cast<char>(7));
  data.push_back(static_cast<char>(200));
  std::istringstream in(data);
  const GrayImage img = ReadPgm(in);
  EXPECT_EQ(img.at(0, 1), 200);
}

TEST(Pgm, RejectsMalformedFiles) {
  auto read = [](const std::string& s) {
    std::istringstream in(s);
    return ReadPgm(in);
  };
  EXPECT_THROW(read("P2\n2 2\n255\n1234"), PgmError);
  EXPECT_THROW(read("P5\n2 2\n255\n12"), PgmError);
  EXPECT_THROW(read("P5\n2 2\n65535\n12345678"), PgmError);
  EXPECT_THROW(read("P5\nx 2\n255\n1234"), PgmError);
  EXPECT_THROW(read("P5\n0 2\n255\n"), PgmError);
  EXPECT_THROW(ReadPgm(std::string("/nonexistent/file.pgm")), PgmError);
}

TEST(Haar, InverseRestoresInput) {
  const std::size_t rows = 64, cols = 32;
  std::vector<double> data(rows * cols);
  for (std::size_t k = 0; k < data.size(); ++k) data[k] = 100.0 * CounterGaussian(1, Stream::kHost, k);
  auto copy = data;
  HaarForward2D(copy, rows, cols, 4);
  double energy_in = 0.0, energy_out = 0.0;
  for (std::size_t k = 0; k < data.size(); ++k) {
    energy_in += data[k] * data[k];
    energy_out += copy[k] * copy[k];
  }
  EXPECT_NEAR(energy_out, energy_in, 1e-10 * energy_in);
  HaarInverse2D(copy, rows, cols, 4);
  for (std::size_t k = 0; k < data.size(); ++k) ASSERT_NEAR(copy[k], data[k], 1e-10);
}

TEST(Haar, ShapeErrorsAndSubbands) {
  std::vector<double> data(12 * 8);
  EXPECT_THROW(HaarForward2D(data, 12, 8, 3), std::invalid_argument);
  EXPECT_THROW(HaarInverse2D(data, 12, 8, -1), std::invalid_argument);
  std::vector<double> odd(12 * 9);
  EXPECT_THROW(HaarForward2D(odd, 12, 9, 1), std::invalid_argument);
  EXPECT_THROW(HaarForward2D(odd, 12, 8, 1), std::invalid_argument);
  const auto bands = DetailSubbands(16, 16, 2);
  ASSERT_EQ(bands.size(), 6u);
  std::size_t count = 0;
  for (const auto& b : bands) count += b.rows * b.cols;
  EXPECT_EQ(count, 16u * 16u - 16u);
}

TEST(ImageSites, RejectsIndivisibleDimensions) {
  const GrayImage img = test_util::SyntheticImage(20, 16, 1);
  EXPECT_THROW(harness::DecomposeImage(img, 3), PgmError);
  EXPECT_NO_THROW(harness::DecomposeImage(img, 2));
}

TEST(SweepDomains, RowsAreConsistent) {
  const auto run = RunCommand(CmdSweepDomains, {{"lambda", "0.2"}, {"n", "1"}, {"weights", "unit"},
                                         {"alpha_points", "25"}, {"sigma_points", "20"}});
  ASSERT_EQ(run.code, 0);
  const auto& t = run.table;
  ASSERT_EQ(t.rows.size(), 500u);
  const auto label = t.Texts("regime");
  const auto je = t.Numbers("J_E");
  const auto jw = t.Numbers("J_W");
  const auto ji = t.Numbers("J_I");
  std::set<std::string> seen(label.begin(), label.end());
  EXPECT_EQ(seen, (std::set<std::string>{"D1", "D2", "D3"}));
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    if (label[k] == "D2") {
      EXPECT_LE(ji[k], std::min(je[k], jw[k]) + 1e-12);
    } else {
      EXPECT_TRUE(std::isnan(ji[k]));
    }
  }
  EXPECT_EQ(t.Meta("lambda"), "0.2");
}

TEST(SweepAlpha, PostfilterColumnAndZeroTail) {
  const auto run = RunCommand(CmdSweepAlpha, {{"n", "100"}, {"sigma_min", "1"}, {"sigma_max", "100"},
                                       {"sigma_points", "100"}});
  ASSERT_EQ(run.code, 0);
  const auto sx2 = run.table.Numbers("sigma_x_sq");
  const auto plain = run.table.Numbers("alpha_no_postfilter");
  const auto filtered = run.table.Numbers("alpha_postfilter");
  for (std::size_t k = 0; k < sx2.size(); ++k) {
    const double sx = std::sqrt(sx2[k]);
    EXPECT_NEAR(filtered[k], std::sqrt(0.002) / std::sqrt(1.0 + sx) * sx2[k], 1e-12 * filtered[k]);
  }
  EXPECT_EQ(plain.back(), 0.0);
  EXPECT_GT(*std::max_element(plain.begin(), plain.end()), 0.0);
}

TEST(SweepAttack, SawgnOrderingAndZeroRow) {
  const auto run = RunCommand(CmdSweepAttack, {{"m", "512"}, {"n", "32"}, {"d_xy_per_site", "1"},
                                        {"attack_min", "0"}, {"attack_max", "2"},
                                        {"attack_points", "5"}});
  ASSERT_EQ(run.code, 0);
  const auto& t = run.table;
  ASSERT_EQ(t.rows.size(), 5u);
  const auto dist = t.Numbers("attack_distortion_per_site");
  EXPECT_DOUBLE_EQ(dist[0], 1.0);
  const auto prop = t.Numbers("ebn0_proposed");
  const auto cst = t.Numbers("ebn0_const_alpha");
  const auto lin = t.Numbers("ebn0_prop_alpha");
  const auto ber = t.Numbers("ber_proposed");
  for (std::size_t k = 0; k < prop.size(); ++k) {
    if (std::isnan(prop[k])) continue;
    EXPECT_NEAR(ber[k], NormalCdf(-std::sqrt(prop[k])), 1e-15);
    if (k > 0 && !std::isnan(cst[k]) && !std::isnan(lin[k])) {
      EXPECT_GE(prop[k], cst[k]);
      EXPECT_GE(prop[k], lin[k]);
    }
  }
  EXPECT_FALSE(std::isnan(prop[0]));
  EXPECT_THROW(RunCommand(CmdSweepAttack, {{"m", "64"}}), ConfigError);
  EXPECT_THROW(RunCommand(CmdSweepAttack, {{"m", "64"}, {"d_xy_per_site", "1"}, {"postfilter", "true"}}),
               ConfigError);
}

TEST(SweepAttack, QuantizationBerGrowsWithStep) {
  const auto run = RunCommand(CmdSweepAttack, {{"m", "256"}, {"n", "16"}, {"d_xy_per_site", "0.5"},
                                        {"attack_mode", "quant"}, {"attack_min", "0"},
                                        {"attack_max", "40"}, {"attack_points", "3"},
                                        {"trials", "20"}});
  ASSERT_EQ(run.code, 0);
  const auto eb = run.table.Numbers("ebn0_proposed");
  const auto dist = run.table.Numbers("attack_distortion_per_site");
  EXPECT_GT(eb[0], eb[1]);
  EXPECT_GT(eb[1], eb[2]);
  EXPECT_LT(dist[0], dist[2]);
  const auto ber = run.table.Numbers("ber_proposed");
  EXPECT_LE(ber[0], ber[2]);
}

TEST(OracleCheck, ByteIdenticalReruns) {
  const std::vector<std::pair<std::string, std::string>> s{{"cases", "12"}, {"grid_points", "120"},
                                                           {"alpha_grid_points", "200"}};
  const auto a = RunCommand(CmdOracleCheck, s);
  const auto b = RunCommand(CmdOracleCheck, s);
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.text, b.text);
  EXPECT_EQ(a.table.Meta("result.passed"), "true");
  EXPECT_EQ(a.table.rows.size(), 24u);
}

TEST(OracleCheck, ZeroToleranceFailsAndSkipsAlpha) {
  const auto run = RunCommand(CmdOracleCheck, {{"cases", "3"}, {"grid_points", "40"}, {"tolerance", "0"}});
  EXPECT_EQ(run.code, 1);
  EXPECT_EQ(run.table.Meta("result.passed"), "false");
  EXPECT_NE(run.table.Meta("result.alpha_suite").find("skipped"), std::string::npos);
  EXPECT_THROW(RunCommand(CmdOracleCheck, {{"suite", "other"}}), ConfigError);
}

TEST(Optimize, ReportMatchesSolver) {
  const auto run = RunCommand(CmdOptimize, {{"m", "64"}, {"n", "8"}});
  ASSERT_EQ(run.code, 0);
  const auto rho = run.table.Numbers("rho");
  double sum = 0.0;
  for (double r : rho) sum += r;
  EXPECT_NEAR(std::stod(run.table.Meta("result.eb_n0")), sum, 1e-12 * sum);
  EXPECT_EQ(rho.size(), 64u);
}

void WriteText(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

TEST(Pipeline, GenEmbedAttackExtract) {
  const auto dir = ScratchDir();
  const std::vector<std::pair<std::string, std::string>> base{{"m", "2000"}, {"n", "8"}, {"seed", "4"}};
  auto with = [&](std::vector<std::pair<std::string, std::string>> extra) {
    auto s = base;
    s.insert(s.end(), extra.begin(), extra.end());
    return s;
  };
  const auto gen = RunCommand(CmdGen, base);
  ASSERT_EQ(gen.code, 0);
  WriteText(dir / "host.csv", gen.text);
  const auto emb = RunCommand(CmdEmbed, with({{"input", (dir / "host.csv").string()}, {"d_xy_per_site", "1"}}));
  ASSERT_EQ(emb.code, 0);
  EXPECT_NEAR(std::stod(emb.table.Meta("result.d_xy")), 2000.0, 2.0);
  WriteText(dir / "marked.csv", emb.text);
  const auto att = RunCommand(CmdAttack, with({{"input", (dir / "marked.csv").string()}, {"attack", "optimal"}}));
  ASSERT_EQ(att.code, 0);
  WriteText(dir / "attacked.csv", att.text);
  const auto ext = RunCommand(CmdExtract, with({{"input", (dir / "attacked.csv").string()}}));
  ASSERT_EQ(ext.code, 0);
  EXPECT_EQ(std::stod(ext.table.Meta("result.ber")), 0.0);
  const auto truth = ext.table.Numbers("truth");
  const auto hard = ext.table.Numbers("hard");
  EXPECT_EQ(truth, hard);
  const auto again = RunCommand(CmdExtract, with({{"input", (dir / "attacked.csv").string()}}));
  EXPECT_EQ(again.text, ext.text);
}

TEST(Pipeline, InfeasibleBudgetExitsTwo) {
  const auto dir = ScratchDir();
  const auto gen = RunCommand(CmdGen, {{"m", "100"}});
  WriteText(dir / "host.csv", gen.text);
  const auto emb = RunCommand(CmdEmbed, {{"m", "100"}, {"input", (dir / "host.csv").string()},
                                  {"d_xy_per_site", "1"}, {"d_xy_prime_per_site", "1e-6"}});
  EXPECT_EQ(emb.code, 2);
}

TEST(Image, EmbedExtractRoundTrip) {
  const auto dir = ScratchDir();
  WritePgm((dir / "in.pgm").string(), test_util::SyntheticImage(128, 128, 5));
  const std::vector<std::pair<std::string, std::string>> files{
      {"image_in", (dir / "in.pgm").string()}, {"image_out", (dir / "out.pgm").string()},
      {"key_file", (dir / "key.cfg").string()}, {"n", "16"}, {"d_xy_per_site", "1"}};
  const auto emb = RunCommand(CmdImageEmbed, files);
  ASSERT_EQ(emb.code, 0);
  EXPECT_EQ(emb.table.Meta("result.pixel_mean_abs_change_within_bound"), "true") << emb.text;
  std::ifstream first(dir / "out.pgm", std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(first)), std::istreambuf_iterator<char>());
  const auto again = RunCommand(CmdImageEmbed, files);
  std::ifstream second(dir / "out.pgm", std::ios::binary);
  EXPECT_EQ(bytes, std::string((std::istreambuf_iterator<char>(second)), std::istreambuf_iterator<char>()));
  EXPECT_EQ(emb.text, again.text);

  const std::vector<std::pair<std::string, std::string>> read{
      {"image_in", (dir / "out.pgm").string()}, {"key_file", (dir / "key.cfg").string()}};
  const auto ext = RunCommand(CmdImageExtract, read);
  ASSERT_EQ(ext.code, 0);
  EXPECT_EQ(std::stod(ext.table.Meta("result.ber")), 0.0);

  double prev_eb = std::numeric_limits<double>::infinity();
  for (const char* step : {"8", "32", "96"}) {
    auto s = read;
    s.emplace_back("quant_step", step);
    const auto q = RunCommand(CmdImageExtract, s);
    const double eb = std::stod(q.table.Meta("result.eb_n0"));
    EXPECT_LT(eb, prev_eb);
    prev_eb = eb;
  }
}

TEST(Image, RejectsDimensionMismatch) {
  const auto dir = ScratchDir();
  WritePgm((dir / "a.pgm").string(), test_util::SyntheticImage(64, 64, 1));
  WritePgm((dir / "b.pgm").string(), test_util::SyntheticImage(64, 32, 1));
  ASSERT_EQ(RunCommand(CmdImageEmbed, {{"image_in", (dir / "a.pgm").string()},
                                {"image_out", (dir / "o.pgm").string()},
                                {"key_file", (dir / "k.cfg").string()}, {"n", "4"}, {"window", "5"}})
                .code,
            0);
  EXPECT_THROW(RunCommand(CmdImageExtract, {{"image_in", (dir / "b.pgm").string()},
                                     {"key_file", (dir / "k.cfg").string()}}),
               std::exception);
  WriteText(dir / "bad.pgm", "P5\n64 64\n255\nshort");
  EXPECT_THROW(RunCommand(CmdImageEmbed, {{"image_in", (dir / "bad.pgm").string()},
                                   {"image_out", (dir / "o.pgm").string()},
                                   {"key_file", (dir / "k.cfg").string()}}),
               PgmError);
}

}  // namespace
}  // namespace sslab
