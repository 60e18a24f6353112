// Copyright 2026 The txc Authors
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

#include "cli.h"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "txc/analyzer.h"
#include "txc/codec.h"
#include "txc/dataset.h"
#include "txc/error.h"
#include "txc/eval.h"
#include "txc/global_motion.h"
#include "txc/nn/net.h"
#include "txc/parallel.h"
#include "txc/synthetic_video.h"
#include "txc/texture_mask.h"
#include "txc/y4m.h"

namespace txc {
namespace {

namespace fs = std::filesystem;

constexpr char kToolVersion[] = "1.0.0";

std::string VersionText() {
  return std::string("txc ") + kToolVersion + " (bitstream TXC1 v" +
         std::to_string(kBitstreamVersion) + ", weights TXNN v" +
         std::to_string(nn::kWeightFileVersion) + ", dataset TXDS v1)";
}

struct Globals {
  uint64_t seed = 1;
  int threads = 1;
  bool verbose = false;
};

std::vector<uint8_t> ReadBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteBytes(const fs::path& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("cannot write " + path.string());
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

std::string ReadText(const fs::path& path) {
  const auto bytes = ReadBytes(path);
  return {bytes.begin(), bytes.end()};
}

void EnsureParent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

nn::Net<float> LoadNet(const fs::path& path, const std::string& arch) {
  nn::Net<float> net(nn::NetSpec::Parse(arch));
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  nn::LoadParams(net, in);
  return net;
}

// ---------------------------------------------------------------------------

struct GenDataArgs {
  std::string out;
  SynthConfig synth;
};

void RunGenData(const GenDataArgs& a, const Globals& g, std::ostream& out) {
  const PatchDataset data = SynthesizeDataset(a.synth, g.seed);
  EnsureParent(a.out);
  SaveDataset(data, a.out);
  out << "patches " << data.size() << " texture " << data.class_counts[0]
      << " non-texture " << data.class_counts[1] << "\n";
}

struct TrainArgs {
  std::string data;
  std::string out;
  std::string log;
  std::string arch = nn::NetSpec{}.ToString();
  int epochs = 20;
  double lr = 0.01;
  double momentum = 0.9;
  double decay = 0.0005;
  int batch = 512;
  double val_fraction = 0.1;
  double target = 0;
};

void RunTrain(const TrainArgs& a, const Globals& g, std::ostream& out,
              std::ostream& err) {
  const PatchDataset data = LoadDataset(a.data);
  const auto [train, val] = SplitDataset(data, a.val_fraction, g.seed);
  nn::TrainConfig cfg;
  cfg.learning_rate = a.lr;
  cfg.momentum = a.momentum;
  cfg.weight_decay = a.decay;
  cfg.batch_size = a.batch;
  cfg.epochs = a.epochs;
  cfg.rng_seed = g.seed;
  const PatchDataset* validation = val.size() > 0 ? &val : nullptr;
  auto log_epoch = [&](const EpochLog& e) {
    out << "epoch " << e.epoch << " loss " << e.loss << " train_acc "
        << e.train_accuracy << " val_balanced_acc " << e.val_balanced_accuracy
        << "\n";
    out.flush();
    return !(a.target > 0 && e.val_balanced_accuracy >= a.target);
  };
  if (g.verbose) {
    err << "train " << train.size() << " patches, validation " << val.size()
        << "\n";
  }
  TrainResult result = TrainClassifier(train, cfg, nn::NetSpec::Parse(a.arch),
                                       validation, log_epoch);
  EnsureParent(a.out);
  {
    std::ofstream w(a.out, std::ios::binary);
    nn::SaveParams(result.net, w);
    if (!w) throw Error("cannot write " + a.out);
  }
  if (!a.log.empty()) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& e : result.log) {
      doc.push_back({{"epoch", e.epoch},
                     {"loss", e.loss},
                     {"train_accuracy", e.train_accuracy},
                     {"val_balanced_accuracy", e.val_balanced_accuracy}});
    }
    EnsureParent(a.log);
    WriteText(a.log, doc.dump(2) + "\n");
  }
}

struct SegmentArgs {
  std::string weights;
  std::string input;
  std::string out_dir;
  std::string stem;
  std::string arch = nn::NetSpec{}.ToString();
  double threshold = 0.5;
  int min_region = 0;
};

void RunSegment(const SegmentArgs& a, std::ostream& out) {
  nn::Net<float> net = LoadNet(a.weights, a.arch);
  const Sequence seq = ReadY4mFile(a.input);
  std::vector<TextureMask> masks;
  long long texture = 0, cells = 0;
  for (size_t i = 0; i < seq.size(); ++i) {
    TextureMask m = SegmentFrame(PadFrame(seq.frames[i]), net, a.threshold);
    m = CleanMask(m, a.min_region);
    m.frame_index = static_cast<int>(i);
    texture += m.TextureCount();
    cells += static_cast<long long>(m.grid_w) * m.grid_h;
    masks.push_back(std::move(m));
  }
  const std::string stem =
      a.stem.empty() ? fs::path(a.input).stem().string() : a.stem;
  fs::create_directories(a.out_dir);
  WriteMasks(masks, a.out_dir, stem);
  out << "frames " << masks.size() << " texture_cells " << texture << " of "
      << cells << "\n";
}

struct MotionArgs {
  std::string cur;
  std::string ref;
  std::string mask;
  std::string model = "rotzoom";
  int cur_frame = 0;
  int ref_frame = 0;
};

void RunMotion(const MotionArgs& a, const Globals& g, std::ostream& out,
               std::ostream& err) {
  auto pick = [](const std::string& path, int index) {
    const Sequence s = ReadY4mFile(path);
    if (index < 0 || index >= static_cast<int>(s.size())) {
      throw Error("frame index out of range for " + path);
    }
    return PadFrame(s.frames[index]);
  };
  const Frame cur = pick(a.cur, a.cur_frame);
  const Frame ref = pick(a.ref, a.ref_frame);
  const TextureMask mask = ReadMaskPgm(a.mask);
  if (!mask.Matches(cur)) throw Error("mask dimensions do not match frame");
  MotionSearchConfig search;
  search.ransac_seed = g.seed;
  const MotionEstimate est =
      EstimateTextureMotion(cur, ref, mask, ParseMotionModel(a.model), search);
  out << est.motion.ToString() << "\n";
  if (g.verbose) {
    err << "model " << MotionModelName(est.kind) << " correspondences "
        << est.correspondences << " inliers " << est.inlier_fraction << "\n";
  }
  if (!est.warning.empty()) err << "warning: " << est.warning << "\n";
}

struct EncodeArgs {
  std::string input;
  std::string masks;
  std::string out;
  std::string stats;
  std::string model = "rotzoom";
  int q = 24;
  int gf = 8;
  bool no_texture = false;
};

void RunEncode(const EncodeArgs& a, const Globals& g, std::ostream& out) {
  const Sequence seq = ReadY4mFile(a.input);
  EncoderConfig cfg;
  cfg.q_level = a.q;
  cfg.gf_group_size = a.gf;
  cfg.texture_mode = !a.no_texture;
  cfg.model = ParseMotionModel(a.model);
  cfg.motion.ransac_seed = g.seed;
  std::vector<TextureMask> masks;
  if (cfg.texture_mode) {
    if (a.masks.empty()) throw Error("--masks is required unless --no-texture");
    masks = LoadMasks(a.masks, fs::path(a.input).stem().string(),
                      static_cast<int>(seq.size()));
  }
  const EncodeResult r = EncodeSequence(seq, masks, cfg);
  EnsureParent(a.out);
  WriteBytes(a.out, r.bitstream);
  if (!a.stats.empty()) {
    EnsureParent(a.stats);
    WriteText(a.stats, StatsToJson(r.stats, r.bitstream.size()));
  }
  out << "frames " << seq.size() << " bytes " << r.bitstream.size()
      << " bits_per_frame "
      << BitsPerFrame(r.bitstream.size(), static_cast<int>(seq.size())) << "\n";
}

struct DecodeArgs {
  std::string in;
  std::string out;
};

void RunDecode(const DecodeArgs& a, std::ostream& out) {
  const Sequence seq = DecodeSequence(ReadBytes(a.in));
  EnsureParent(a.out);
  WriteY4mFile(seq, a.out);
  out << "frames " << seq.size() << "\n";
}

struct SweepArgs {
  std::string input;
  std::string masks;
  std::string out;
  std::string bitstreams;
  std::string model = "rotzoom";
  std::string method = "cubic";
  std::vector<int> q{16, 24, 28, 32};
  int gf = 8;
};

fs::path SiblingPath(const fs::path& report, const std::string& tag) {
  fs::path p = report;
  p.replace_extension();
  return p.string() + "." + tag + ".json";
}

void RunSweep(const SweepArgs& a, const Globals& g, std::ostream& out) {
  const Sequence seq = ReadY4mFile(a.input);
  const auto masks = LoadMasks(a.masks, fs::path(a.input).stem().string(),
                               static_cast<int>(seq.size()));
  SweepOptions opt;
  opt.q_levels = a.q;
  opt.encoder.gf_group_size = a.gf;
  opt.encoder.model = ParseMotionModel(a.model);
  opt.encoder.motion.ransac_seed = g.seed;
  opt.method = ParseBdMethod(a.method);
  const SweepReport report = RdSweep(seq, masks, opt);
  EnsureParent(a.out);
  WriteText(a.out, SweepToJson(report));
  WriteText(SiblingPath(a.out, "baseline"), CurveToJson(report, false));
  WriteText(SiblingPath(a.out, "texture"), CurveToJson(report, true));
  if (!a.bitstreams.empty()) {
    fs::create_directories(a.bitstreams);
    const std::string stem = fs::path(a.input).stem().string();
    for (size_t i = 0; i < report.rows.size(); ++i) {
      const std::string q = std::to_string(report.rows[i].q_level);
      WriteBytes(fs::path(a.bitstreams) / (stem + ".q" + q + ".baseline.txc1"),
                 report.baseline_streams[i]);
      WriteBytes(fs::path(a.bitstreams) / (stem + ".q" + q + ".texture.txc1"),
                 report.texture_streams[i]);
    }
  }
  out << SweepToTable(report);
}

struct BdArgs {
  std::string baseline;
  std::string test;
  std::string method;
};

void RunBd(const BdArgs& a, std::ostream& out, std::ostream& err) {
  const std::string base_text = ReadText(a.baseline);
  const RdCurve base = CurveFromJson(base_text);
  const RdCurve test = CurveFromJson(ReadText(a.test));
  std::string method = a.method;
  if (method.empty()) {
    const auto doc = nlohmann::json::parse(base_text);
    method = doc.value("method", std::string("cubic"));
  }
  const BdMethod m = ParseBdMethod(method);
  std::vector<std::string> warnings;
  nlohmann::ordered_json doc;
  doc["method"] = BdMethodName(m);
  doc["bd_rate_percent"] = BdRate(base, test, m, &warnings);
  doc["bd_psnr_db"] = BdPsnr(base, test, m, &warnings);
  out << doc.dump(2) << "\n";
  for (const auto& w : warnings) err << "warning: " << w << "\n";
}

struct GenVideoArgs {
  std::string out;
  std::string masks;
  PanningVideoConfig video;
};

void RunGenVideo(const GenVideoArgs& a, const Globals& g, std::ostream& out) {
  const SyntheticVideo v = GeneratePanningVideo(a.video, g.seed);
  EnsureParent(a.out);
  WriteY4mFile(v.sequence, a.out);
  if (!a.masks.empty()) {
    fs::create_directories(a.masks);
    WriteMasks(v.masks, a.masks, fs::path(a.out).stem().string());
  }
  out << "frames " << v.sequence.size() << " " << a.video.width << "x"
      << a.video.height << "\n";
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Texture-synthesis video coding toolkit", "txc"};
  app.set_version_flag("--version", VersionText());
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice");
  app.add_option("--threads", g.threads, "Worker threads for parallel kernels")
      ->check(CLI::Range(1, 256));
  app.add_flag("--verbose", g.verbose, "Extra diagnostics on stderr");

  GenDataArgs gd;
  auto* c_gd = app.add_subcommand("gen-data", "Synthesize the patch dataset");
  c_gd->add_option("--out", gd.out, "Dataset file (.txds)")->required();
  c_gd->add_option("--texture-count", gd.synth.texture_count)
      ->check(CLI::PositiveNumber);
  c_gd->add_option("--ratio", gd.synth.nontexture_ratio,
                   "Non-texture patches per texture patch")
      ->check(CLI::NonNegativeNumber);
  c_gd->add_option("--source-size", gd.synth.texture_source_size);
  c_gd->add_option("--scene-size", gd.synth.scene_size);

  TrainArgs tr;
  auto* c_tr = app.add_subcommand("train", "Train the block classifier");
  c_tr->add_option("--data", tr.data, "Dataset file")->required();
  c_tr->add_option("--out", tr.out, "Weight file (.txnn)")->required();
  c_tr->add_option("--log", tr.log, "Per-epoch log as JSON");
  c_tr->add_option("--arch", tr.arch, "Network spec string");
  c_tr->add_option("--epochs", tr.epochs)->check(CLI::NonNegativeNumber);
  c_tr->add_option("--lr", tr.lr);
  c_tr->add_option("--momentum", tr.momentum);
  c_tr->add_option("--decay", tr.decay);
  c_tr->add_option("--batch", tr.batch)->check(CLI::PositiveNumber);
  c_tr->add_option("--val-fraction", tr.val_fraction)->check(CLI::Range(0.0, 0.5));
  c_tr->add_option("--target-accuracy", tr.target,
                   "Stop once validation balanced accuracy reaches this");

  SegmentArgs sg;
  auto* c_sg = app.add_subcommand("segment", "Write per-frame texture masks");
  c_sg->add_option("--weights", sg.weights)->required();
  c_sg->add_option("--input", sg.input, "Y4M input")->required();
  c_sg->add_option("--out-dir", sg.out_dir)->required();
  c_sg->add_option("--stem", sg.stem, "Mask file stem (default: input stem)");
  c_sg->add_option("--arch", sg.arch);
  c_sg->add_option("--threshold", sg.threshold)->check(CLI::Range(0.0, 1.0));
  c_sg->add_option("--min-region", sg.min_region)->check(CLI::NonNegativeNumber);

  MotionArgs mo;
  auto* c_mo = app.add_subcommand("motion", "Estimate texture motion");
  c_mo->add_option("--cur", mo.cur, "Y4M holding the current frame")->required();
  c_mo->add_option("--ref", mo.ref, "Y4M holding the reference frame")->required();
  c_mo->add_option("--mask", mo.mask, "Mask PGM of the current frame")->required();
  c_mo->add_option("--model", mo.model)
      ->check(CLI::IsMember({"translation", "rotzoom", "affine"}));
  c_mo->add_option("--cur-frame", mo.cur_frame);
  c_mo->add_option("--ref-frame", mo.ref_frame);

  EncodeArgs en;
  auto* c_en = app.add_subcommand("encode", "Encode a Y4M sequence");
  c_en->add_option("--input", en.input)->required();
  c_en->add_option("--masks", en.masks, "Mask directory");
  c_en->add_option("--out", en.out)->required();
  c_en->add_option("--stats", en.stats, "Per-frame stats JSON");
  c_en->add_option("--q", en.q)->check(CLI::Range(1, 63));
  c_en->add_option("--gf", en.gf)->check(CLI::Range(4, 16));
  c_en->add_option("--model", en.model)
      ->check(CLI::IsMember({"translation", "rotzoom", "affine"}));
  c_en->add_flag("--no-texture", en.no_texture, "Baseline coding");

  DecodeArgs de;
  auto* c_de = app.add_subcommand("decode", "Decode a TXC1 bitstream");
  c_de->add_option("--in", de.in)->required();
  c_de->add_option("--out", de.out)->required();

  SweepArgs sw;
  auto* c_sw = app.add_subcommand("rd-sweep", "Baseline vs texture RD sweep");
  c_sw->add_option("--input", sw.input)->required();
  c_sw->add_option("--masks", sw.masks)->required();
  c_sw->add_option("--out", sw.out, "Report JSON")->required();
  c_sw->add_option("--q", sw.q)->delimiter(',')->check(CLI::Range(1, 63));
  c_sw->add_option("--gf", sw.gf)->check(CLI::Range(4, 16));
  c_sw->add_option("--model", sw.model)
      ->check(CLI::IsMember({"translation", "rotzoom", "affine"}));
  c_sw->add_option("--method", sw.method)->check(CLI::IsMember({"cubic", "pchip"}));
  c_sw->add_option("--bitstreams", sw.bitstreams, "Directory for the bitstreams");

  BdArgs bd;
  auto* c_bd = app.add_subcommand("bd", "BD-RATE / BD-PSNR of two curves");
  c_bd->add_option("--baseline", bd.baseline)->required();
  c_bd->add_option("--test", bd.test)->required();
  c_bd->add_option("--method", bd.method)->check(CLI::IsMember({"cubic", "pchip"}));

  GenVideoArgs gv;
  auto* c_gv = app.add_subcommand("gen-video", "Synthetic panning-texture clip");
  c_gv->add_option("--out", gv.out, "Y4M output")->required();
  c_gv->add_option("--masks", gv.masks, "Directory for ground-truth masks");
  c_gv->add_option("--width", gv.video.width)->check(CLI::Range(16, 4096));
  c_gv->add_option("--height", gv.video.height)->check(CLI::Range(16, 4096));
  c_gv->add_option("--frames", gv.video.frames)->check(CLI::Range(1, 65535));
  c_gv->add_option("--pan-x", gv.video.pan_x);
  c_gv->add_option("--pan-y", gv.video.pan_y);
  c_gv->add_option("--blobs", gv.video.blobs)->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    SetNumThreads(g.threads);
    if (c_gd->parsed()) RunGenData(gd, g, out);
    if (c_tr->parsed()) RunTrain(tr, g, out, err);
    if (c_sg->parsed()) RunSegment(sg, out);
    if (c_mo->parsed()) RunMotion(mo, g, out, err);
    if (c_en->parsed()) RunEncode(en, g, out);
    if (c_de->parsed()) RunDecode(de, out);
    if (c_sw->parsed()) RunSweep(sw, g, out);
    if (c_bd->parsed()) RunBd(bd, out, err);
    if (c_gv->parsed()) RunGenVideo(gv, g, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace txc
