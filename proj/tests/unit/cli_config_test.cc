// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <gtest/gtest.h>

#include "cli_config.h"
#include "tasres/error.h"

namespace tasres::cli {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(CliConfigTest, DefaultHyperparameters) {
  const CliConfig c;
  EXPECT_EQ(c.model.enc_filters, 512);
  EXPECT_EQ(c.model.bottleneck, 256);
  EXPECT_EQ(c.model.repeats, 4);
  EXPECT_EQ(c.train.lr_init, 1e-3);
  EXPECT_EQ(c.train.clip_norm, 5.0);
  EXPECT_EQ(c.train.lr_halve_patience, 4);
  EXPECT_EQ(c.synth.ser_set, (std::vector<double>{-12.2, -14.2, -16.2, -18.2}));
  EXPECT_EQ(c.laec.transition, 0.999);
}

TEST(CliConfigTest, DumpReparsesIdentically) {
  CliConfig c;
  SetValue(c, "model.variant", "L");
  SetValue(c, "model.eln_alpha", "0.95");
  SetValue(c, "train.lr_init", "0.0003");
  SetValue(c, "synth.ser_set", "-14.2, -18.2");
  SetValue(c, "synth.near_dir", "/data/near");
  SetValue(c, "eval.mode", "oracle_mask");
  SetValue(c, "eval.split", "val");
  const std::string text = DumpIni(c);
  std::vector<std::string> keys;
  const CliConfig back = ParseIni(text, &keys);
  EXPECT_EQ(DumpIni(back), text);
  EXPECT_EQ(ToKeyValues(back), ToKeyValues(c));
  EXPECT_EQ(keys.size(), ToKeyValues(c).size());
  EXPECT_EQ(back.synth.ser_set, (std::vector<double>{-14.2, -18.2}));
  EXPECT_EQ(back.eval.mode, train::EvalMode::kOracleMask);
  EXPECT_EQ(back.model.variant, model::Variant::kL);
}

TEST(CliConfigTest, PartialFileKeepsDefaults) {
  const CliConfig c = ParseIni("[train]\nepochs = 3\n\n[laec]\nblock_len = 512\n");
  EXPECT_EQ(c.train.epochs, 3);
  EXPECT_EQ(c.laec.block_len, 512);
  EXPECT_EQ(c.model.enc_filters, 512);
}

TEST(CliConfigTest, RejectsUnknownAndMalformed) {
  EXPECT_EQ(CodeOf([] { ParseIni("[train]\nepoch = 3\n"); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { ParseIni("[nope]\nepochs = 3\n"); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { ParseIni("[train]\nepochs = three\n"); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { ParseIni("[train\nepochs = 3\n"); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { ParseIni("[eval]\nmode = magic\n"); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { ParseIni("[model]\nshare_output_block = maybe\n"); }), ErrorCode::kConfig);
  CliConfig bad;
  bad.train.lr_halve_patience = 0;
  EXPECT_EQ(CodeOf([&] { bad.Validate(); }), ErrorCode::kConfig);
}

}  // namespace
}  // namespace tasres::cli
