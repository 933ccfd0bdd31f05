// Copyright 2026  The distse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "distse/metrics.h"
#include "distse/speech_synth.h"
#include "distse/text_format.h"
#include "distse/wav_io.h"
#include "test_util.h"

namespace distse {
namespace {

using testing::RandomWave;
using testing::ScratchDir;

Waveform Speech(double seconds, int rate, uint64_t seed) {
  SpeechSynthConfig sc;
  sc.duration_s = seconds;
  sc.sample_rate = rate;
  return SynthesizeSpeechLike(sc, seed);
}

Waveform Add(const Waveform &a, const Waveform &b, double gb = 1.0) {
  Waveform o = a;
  for (size_t i = 0; i < o.size(); ++i) o.samples[i] += gb * b.samples[i];
  return o;
}

Waveform Scaled(const Waveform &a, double g) {
  Waveform o = a;
  for (double &v : o.samples) v *= g;
  return o;
}

TEST(SegSnr, ClosedForms) {
  const Waveform x = Speech(1.0, 8000, 1);
  EXPECT_DOUBLE_EQ(SegmentalSnr(x, x), 35.0);
  EXPECT_NEAR(SegmentalSnr(x, Scaled(x, 2.0)), 0.0, 1e-9);
  EXPECT_NEAR(SegmentalSnr(x, Scaled(x, -1.0)), 10 * std::log10(0.25), 1e-9);
  // Zero output: error equals signal in every frame.
  EXPECT_NEAR(SegmentalSnr(x, Scaled(x, 0.0)), 0.0, 1e-9);
}

TEST(SegSnr, ClampsLowFrames) {
  const Waveform x = Speech(1.0, 8000, 2);
  EXPECT_DOUBLE_EQ(SegmentalSnr(x, Scaled(x, 1000.0)), -10.0);
}

TEST(SegSnr, SkipsSilentFrames) {
  Waveform x = Speech(1.0, 8000, 3);
  Waveform padded = x;
  padded.samples.insert(padded.samples.begin(), 2048, 0.0);
  Waveform test = Scaled(padded, -1.0);
  // error only where every covering 512/256 frame is silent; the frame at 1792 straddles speech
  for (size_t i = 0; i < 1792; ++i) test.samples[i] = 0.3;
  EXPECT_NEAR(SegmentalSnr(padded, test), 10 * std::log10(0.25), 1e-9);
  Waveform silent = x;
  for (double &v : silent.samples) v = 0.0;
  EXPECT_THROW(SegmentalSnr(silent, x), Error);
  EXPECT_THROW(SegmentalSnr(x, RandomWave(10, 8000, 1)), Error);
}

TEST(Ssnri, Identities) {
  const Waveform x = Speech(1.0, 8000, 4);
  const Waveform noisy = Add(x, RandomWave(x.size(), 8000, 5, 0.05));
  EXPECT_EQ(Ssnri(x, noisy, noisy), 0.0);
  EXPECT_NEAR(Ssnri(x, noisy, x), 35.0 - SegmentalSnr(x, noisy), 1e-12);
  EXPECT_GT(Ssnri(x, noisy, x), 0.0);
  const Waveform worse = Add(x, RandomWave(x.size(), 8000, 6, 0.2));
  EXPECT_LT(Ssnri(x, noisy, worse), 0.0);
}

TEST(Stoi, SelfIsOne) {
  for (int rate : {8000, 10000, 16000}) {
    const Waveform x = Speech(2.0, rate, 7);
    EXPECT_NEAR(Stoi(x, x), 1.0, 1e-6) << rate;
  }
}

TEST(Stoi, ScaleInvariant) {
  const Waveform x = Speech(2.0, 16000, 8);
  const Waveform y = Add(x, RandomWave(x.size(), 16000, 9, 0.05));
  const double base = Stoi(x, y);
  for (double g : {0.01, 0.5, 3.0, 100.0}) EXPECT_NEAR(Stoi(x, Scaled(y, g)), base, 1e-6);
}

// Envelope clipping biases independent pairs well above zero (pystoi gives
// 0.43 on the frozen pair); the property is that noise alone scores far
// below even a 0 dB mixture.
TEST(Stoi, IndependentNoiseScoresFarBelowMixture) {
  const Waveform x = Speech(3.0, 16000, 10);
  const Waveform n = RandomWave(x.size(), 16000, 11);
  const double g = std::sqrt(x.Energy() / n.Energy());
  const double alone = Stoi(x, Scaled(n, g));
  const double mixed = Stoi(x, Add(x, n, g));
  EXPECT_LT(alone, 0.5);
  EXPECT_GT(mixed - alone, 0.2);
}

TEST(Stoi, MonotoneInSnr) {
  const Waveform x = Speech(3.0, 16000, 12);
  const Waveform n = RandomWave(x.size(), 16000, 13);
  const double g = std::sqrt(x.Energy() / n.Energy());
  const double hi = Stoi(x, Add(x, n, g * std::pow(10.0, -5.0 / 20)));
  const double lo = Stoi(x, Add(x, n, g * std::pow(10.0, 5.0 / 20)));
  EXPECT_GE(hi, lo);
  EXPECT_GE(lo, 0.0);
  EXPECT_LE(hi, 1.0);
}

TEST(Stoi, Errors) {
  const Waveform x = Speech(0.2, 16000, 14);
  EXPECT_THROW(Stoi(x, x), Error);
  const Waveform y = Speech(1.0, 16000, 14);
  EXPECT_THROW(Stoi(y, Speech(1.1, 16000, 14)), Error);
}

// Frozen reference values from pystoi 0.4.1 (tests/oracles/make_stoi_oracle.py).
TEST(Stoi, MatchesReferenceImplementation) {
  const std::string dir = DISTSE_TEST_DATA_DIR;
  const CsvTable t = ReadCsv(dir + "/stoi_oracle.csv");
  ASSERT_EQ(t.rows.size(), 5u);
  for (const auto &row : t.rows) {
    const Waveform clean = ReadWav(dir + "/" + row[0] + "_clean.wav");
    const Waveform deg = ReadWav(dir + "/" + row[0] + "_deg.wav");
    EXPECT_EQ(clean.sample_rate, std::stoi(row[1]));
    EXPECT_NEAR(Stoi(clean, deg), std::stod(row[2]), 1e-6) << row[0];
  }
}

class EvalFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    clean_ = Speech(1.5, 8000, 20);
    noisy_ = Add(clean_, RandomWave(clean_.size(), 8000, 21, 0.05));
    WriteWav(dir_ / "clean.wav", clean_);
    WriteWav(dir_ / "noisy.wav", noisy_);
    WriteWav(dir_ / "enh.wav", Add(clean_, RandomWave(clean_.size(), 8000, 22, 0.01)));
  }
  ScratchDir dir_{"eval"};
  Waveform clean_, noisy_;
};

TEST_F(EvalFixture, IdentityManifestHasZeroSsnri) {
  std::vector<EvalEntry> entries;
  for (const char *ch : {"m1", "m4"})
    entries.push_back({"u1", kNoisySystem, ch, "white", 0.0, dir_ / "clean.wav", dir_ / "noisy.wav",
                       dir_ / "noisy.wav"});
  WriteEvalManifest(dir_ / "manifest.csv", entries);
  const auto back = ReadEvalManifest(dir_ / "manifest.csv");
  ASSERT_EQ(back.size(), 2u);
  const EvalReport r = Evaluate(back, {128, 64, -10, 35});
  for (const EvalRow &row : r.rows) {
    EXPECT_EQ(row.ssnri, 0.0);
    EXPECT_NEAR(row.stoi, Stoi(ReadWav(dir_ / "clean.wav"), ReadWav(dir_ / "noisy.wav")), 1e-12);
  }
  const std::string csv = ReportToCsv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kReportHeader);
  EXPECT_NE(csv.find(",0.000000\n"), std::string::npos);
}

TEST_F(EvalFixture, ManifestPathsAreRelativeToManifest) {
  std::filesystem::create_directories(dir_ / "sub");
  std::vector<EvalEntry> entries{{"u1", "DNN-F", "m1", "pink", -5.0, dir_ / "clean.wav",
                                  dir_ / "noisy.wav", dir_ / "enh.wav"}};
  WriteEvalManifest(dir_ / "sub/manifest.csv", entries);
  const std::string text = testing::FileBytes(dir_ / "sub/manifest.csv");
  EXPECT_NE(text.find("../clean.wav"), std::string::npos) << text;
  const auto back = ReadEvalManifest(dir_ / "sub/manifest.csv");
  const EvalRow row = EvaluateEntry(back[0], {128, 64, -10, 35});
  EXPECT_GT(row.ssnri, 0.0);
  EXPECT_EQ(row.snr_db, -5.0);
}

TEST_F(EvalFixture, MissingFileIsNamed) {
  std::vector<EvalEntry> entries{{"u1", "DNN-S", "m1", "pink", 0.0, dir_ / "clean.wav",
                                  dir_ / "noisy.wav", dir_ / "nope.wav"}};
  try {
    Evaluate(entries, {});
    FAIL();
  } catch (const Error &e) {
    EXPECT_NE(std::string(e.what()).find("nope.wav"), std::string::npos);
  }
}

TEST(Report, CsvRoundTripAndSummary) {
  EvalReport r;
  r.rows = {{"u1", "noisy", "m1", "white", 0, 0.7, 2.0, 0.0},
            {"u1", "DNN-S", "m1", "white", 0, 0.75, 5.0, 3.0},
            {"u1", "DNN-S", "m7", "white", 0, 0.65, 3.0, 1.0},
            {"u1", "DNN-F", "m1", "white", 0, 0.8, 6.0, 4.0},
            {"u1", "DNN-C", "m1", "white", 0, 0.85, 7.0, 5.0}};
  EXPECT_NEAR(r.MeanSsnri("DNN-S"), 2.0, 1e-12);
  EXPECT_NEAR(r.MeanStoi("DNN-S", "m7"), 0.65, 1e-12);
  EXPECT_EQ(r.Systems(), (std::vector<std::string>{"noisy", "DNN-S", "DNN-F", "DNN-C"}));
  EXPECT_EQ(r.Channels(), (std::vector<std::string>{"m1", "m7"}));
  ScratchDir dir("report");
  WriteTextFile(dir / "r.csv", ReportToCsv(r));
  const EvalReport back = ReportFromCsv(dir / "r.csv");
  ASSERT_EQ(back.rows.size(), r.rows.size());
  EXPECT_EQ(ReportToCsv(back), ReportToCsv(r));
  const std::string s = FormatSummary(r);
  const std::string cmp = s.substr(s.find("System comparison"));
  EXPECT_NE(cmp.find("DNN-S"), std::string::npos);
  EXPECT_NE(cmp.find("DNN-C"), std::string::npos);
  EXPECT_EQ(cmp.find("noisy"), std::string::npos);
}

}  // namespace
}  // namespace distse
