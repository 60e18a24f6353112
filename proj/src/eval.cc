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

#include "txc/eval.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "txc/error.h"
#include "txc/parallel.h"

namespace txc {

double PsnrNonTexture(const Sequence& orig, const Sequence& decoded,
                      const std::vector<TextureMask>& masks) {
  if (orig.size() != decoded.size()) throw Error("frame count mismatch");
  if (masks.size() < orig.size()) throw Error("missing texture mask");
  double sse = 0;
  long long count = 0;
  for (size_t f = 0; f < orig.size(); ++f) {
    const Frame a = PadFrame(orig.frames[f]);
    const Frame b = PadFrame(decoded.frames[f]);
    if (a.width() != b.width() || a.height() != b.height() ||
        a.display_width != b.display_width ||
        a.display_height != b.display_height) {
      throw Error("frame dimensions differ");
    }
    const TextureMask& mask = masks[f];
    if (!mask.Matches(a)) throw Error("mask dimensions do not match frame");
    for (int by = 0; by < mask.grid_h; ++by) {
      for (int bx = 0; bx < mask.grid_w; ++bx) {
        if (mask.IsTexture(bx, by)) continue;
        const int x1 = std::min((bx + 1) * kBlockGrid, a.display_width);
        const int y1 = std::min((by + 1) * kBlockGrid, a.display_height);
        for (int y = by * kBlockGrid; y < y1; ++y) {
          for (int x = bx * kBlockGrid; x < x1; ++x) {
            const double d = a.y.at(x, y) - b.y.at(x, y);
            sse += d * d;
            ++count;
          }
        }
      }
    }
  }
  if (count == 0) throw Error("empty evaluation region");
  if (sse == 0) return kPsnrCap;
  const double mse = sse / static_cast<double>(count);
  return std::min(kPsnrCap, 10.0 * std::log10(255.0 * 255.0 / mse));
}

double BitsPerFrame(size_t file_bytes, int frame_count) {
  if (frame_count < 1) throw Error("frame count must be positive");
  return 8.0 * static_cast<double>(file_bytes) / frame_count;
}

const char* BdMethodName(BdMethod method) {
  return method == BdMethod::kCubic ? "cubic" : "pchip";
}

BdMethod ParseBdMethod(const std::string& name) {
  if (name == "cubic") return BdMethod::kCubic;
  if (name == "pchip") return BdMethod::kPchip;
  throw Error("unknown BD method '" + name + "'");
}

// ---------------------------------------------------------------------------

PolyFit::PolyFit(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 2 || y.size() != x.size()) throw Error("need at least two points");
  const int degree = std::min(3, n - 1);
  for (double v : x) center_ += v;
  center_ /= n;
  scale_ = 0;
  for (double v : x) scale_ = std::max(scale_, std::abs(v - center_));
  if (!(scale_ > 0)) throw Error("degenerate curve: all abscissae equal");
  Eigen::MatrixXd a(n, degree + 1);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    const double u = (x[i] - center_) / scale_;
    double p = 1;
    for (int k = 0; k <= degree; ++k, p *= u) a(i, k) = p;
    b(i) = y[i];
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  coeffs_.assign(c.data(), c.data() + c.size());
}

double PolyFit::operator()(double x) const {
  const double u = (x - center_) / scale_;
  double s = 0;
  for (size_t k = coeffs_.size(); k-- > 0;) s = s * u + coeffs_[k];
  return s;
}

double PolyFit::Integral(double a, double b) const {
  const double ua = (a - center_) / scale_;
  const double ub = (b - center_) / scale_;
  double s = 0;
  for (size_t k = 0; k < coeffs_.size(); ++k) {
    const double e = static_cast<double>(k + 1);
    s += coeffs_[k] * (std::pow(ub, e) - std::pow(ua, e)) / e;
  }
  return s * scale_;
}

Pchip::Pchip(const std::vector<double>& x, const std::vector<double>& y)
    : x_(x), y_(y) {
  const size_t n = x.size();
  if (n < 2 || y.size() != n) throw Error("need at least two points");
  for (size_t i = 1; i < n; ++i) {
    if (!(x[i] > x[i - 1])) throw Error("pchip abscissae must be increasing");
  }
  std::vector<double> h(n - 1), m(n - 1);
  for (size_t k = 0; k + 1 < n; ++k) {
    h[k] = x[k + 1] - x[k];
    m[k] = (y[k + 1] - y[k]) / h[k];
  }
  d_.assign(n, 0);
  if (n == 2) {
    d_[0] = d_[1] = m[0];
    return;
  }
  for (size_t k = 1; k + 1 < n; ++k) {
    if (m[k - 1] * m[k] <= 0) continue;
    const double w1 = 2 * h[k] + h[k - 1];
    const double w2 = h[k] + 2 * h[k - 1];
    d_[k] = (w1 + w2) / (w1 / m[k - 1] + w2 / m[k]);
  }
  // Shape-preserving three-point end slopes.
  auto edge = [](double h0, double h1, double m0, double m1) {
    double d = ((2 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if (std::signbit(d) != std::signbit(m0) || m0 == 0) {
      d = 0;
    } else if (std::signbit(m0) != std::signbit(m1) &&
               std::abs(d) > 3 * std::abs(m0)) {
      d = 3 * m0;
    }
    return d;
  };
  d_[0] = edge(h[0], h[1], m[0], m[1]);
  d_[n - 1] = edge(h[n - 2], h[n - 3], m[n - 2], m[n - 3]);
}

namespace {

size_t Segment(const std::vector<double>& x, double v) {
  const auto it = std::upper_bound(x.begin() + 1, x.end() - 1, v);
  return static_cast<size_t>(it - x.begin()) - 1;
}

}  // namespace

double Pchip::operator()(double x) const {
  const size_t k = Segment(x_, x);
  const double h = x_[k + 1] - x_[k];
  const double t = (x - x_[k]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y_[k] + (t3 - 2 * t2 + t) * h * d_[k] +
         (-2 * t3 + 3 * t2) * y_[k + 1] + (t3 - t2) * h * d_[k + 1];
}

double Pchip::Integral(double a, double b) const {
  if (b < a) return -Integral(b, a);
  // Antiderivatives of the four Hermite basis functions.
  auto anti = [](double t, const double c[4]) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double t4 = t3 * t;
    return c[0] * (t4 / 2 - t3 + t) + c[1] * (t4 / 4 - 2 * t3 / 3 + t2 / 2) +
           c[2] * (-t4 / 2 + t3) + c[3] * (t4 / 4 - t3 / 3);
  };
  double s = 0;
  const size_t last = x_.size() - 2;
  for (size_t k = Segment(x_, a); k <= last; ++k) {
    const double lo = (k == 0) ? -INFINITY : x_[k];
    const double hi = (k == last) ? INFINITY : x_[k + 1];
    const double sa = std::max(a, lo);
    const double sb = std::min(b, hi);
    if (sb <= sa) {
      if (lo >= b) break;
      continue;
    }
    const double h = x_[k + 1] - x_[k];
    const double c[4] = {y_[k], h * d_[k], y_[k + 1], h * d_[k + 1]};
    s += h * (anti((sb - x_[k]) / h, c) - anti((sa - x_[k]) / h, c));
  }
  return s;
}

// ---------------------------------------------------------------------------

namespace {

struct Series {
  std::vector<double> x, y;
};

// Sorts by abscissa; abscissa/ordinate are psnr/log-rate or log-rate/psnr.
Series Prepare(const RdCurve& curve, bool psnr_axis, const char* name,
               std::vector<std::string>* warnings) {
  if (curve.size() < 2) throw Error(std::string(name) + " curve needs >= 2 points");
  RdCurve c = curve;
  for (const auto& p : c) {
    if (!(p.rate > 0) || !std::isfinite(p.rate) || !std::isfinite(p.psnr)) {
      throw Error(std::string(name) + " curve has an invalid point");
    }
  }
  std::sort(c.begin(), c.end(),
            [](const RdPoint& a, const RdPoint& b) { return a.rate < b.rate; });
  for (size_t i = 1; i < c.size(); ++i) {
    if (!(c[i].rate > c[i - 1].rate && c[i].psnr > c[i - 1].psnr)) {
      if (warnings != nullptr) {
        warnings->push_back(std::string(name) + " curve is not monotone");
      }
      break;
    }
  }
  Series s;
  if (psnr_axis) {
    std::sort(c.begin(), c.end(), [](const RdPoint& a, const RdPoint& b) {
      return a.psnr < b.psnr;
    });
  }
  for (const auto& p : c) {
    s.x.push_back(psnr_axis ? p.psnr : std::log10(p.rate));
    s.y.push_back(psnr_axis ? std::log10(p.rate) : p.psnr);
  }
  return s;
}

double AverageDifference(const Series& base, const Series& test,
                         BdMethod method, const char* axis) {
  const double lo = std::max(base.x.front(), test.x.front());
  const double hi = std::min(base.x.back(), test.x.back());
  if (!(hi > lo)) throw Error(std::string("no ") + axis + " overlap");
  double ib, it;
  if (method == BdMethod::kCubic) {
    ib = PolyFit(base.x, base.y).Integral(lo, hi);
    it = PolyFit(test.x, test.y).Integral(lo, hi);
  } else {
    ib = Pchip(base.x, base.y).Integral(lo, hi);
    it = Pchip(test.x, test.y).Integral(lo, hi);
  }
  return (it - ib) / (hi - lo);
}

}  // namespace

double BdRate(const RdCurve& baseline, const RdCurve& test, BdMethod method,
              std::vector<std::string>* warnings) {
  const Series b = Prepare(baseline, true, "baseline", warnings);
  const Series t = Prepare(test, true, "test", warnings);
  const double avg = AverageDifference(b, t, method, "PSNR");
  return (std::pow(10.0, avg) - 1.0) * 100.0;
}

double BdPsnr(const RdCurve& baseline, const RdCurve& test, BdMethod method,
              std::vector<std::string>* warnings) {
  const Series b = Prepare(baseline, false, "baseline", warnings);
  const Series t = Prepare(test, false, "test", warnings);
  return AverageDifference(b, t, method, "rate");
}

RateSaving DataRateSaving(double rate_a, double rate_b) {
  if (!(rate_a > 0) || !(rate_b > 0)) throw Error("non-positive rate");
  const double hi = std::max(rate_a, rate_b);
  const double lo = std::min(rate_a, rate_b);
  return {(hi - lo) / hi * 100.0, rate_a < rate_b};
}

// ---------------------------------------------------------------------------

SweepReport RdSweep(const Sequence& seq, const std::vector<TextureMask>& masks,
                    const SweepOptions& options) {
  if (seq.empty()) throw Error("cannot sweep an empty sequence");
  if (options.q_levels.empty()) throw Error("no q levels given");
  std::vector<Frame> padded;
  for (const auto& f : seq.frames) padded.push_back(PadFrame(f));

  EncoderConfig base = options.encoder;
  base.texture_mode = false;
  base.trace = false;
  EncoderConfig tex = base;
  tex.texture_mode = !options.texture_off_both;
  base.Validate();

  const auto base_motion = EstimateSequenceMotion(padded, masks, base);
  const auto tex_motion = tex.texture_mode
                              ? EstimateSequenceMotion(padded, masks, tex)
                              : base_motion;

  const int levels = static_cast<int>(options.q_levels.size());
  const int frames = static_cast<int>(seq.size());
  std::vector<std::vector<uint8_t>> streams(2 * levels);
  std::vector<double> psnr(2 * levels);
  std::vector<std::exception_ptr> errors(2 * levels);
#pragma omp parallel for schedule(dynamic) num_threads(txc::NumThreads())
  for (int job = 0; job < 2 * levels; ++job) {
    try {
      const bool texture_arm = job >= levels;
      EncoderConfig cfg = texture_arm ? tex : base;
      cfg.q_level = options.q_levels[job % levels];
      const auto enc = EncodeSequence(seq, masks, cfg,
                                      texture_arm ? &tex_motion : &base_motion);
      const Sequence decoded = DecodeSequence(enc.bitstream);
      psnr[job] = PsnrNonTexture(seq, decoded, masks);
      streams[job] = enc.bitstream;
    } catch (...) {
      errors[job] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SweepReport report;
  report.method = options.method;
  report.frame_count = frames;
  for (int i = 0; i < levels; ++i) {
    SweepRow row;
    row.q_level = options.q_levels[i];
    row.baseline_bytes = streams[i].size();
    row.texture_bytes = streams[levels + i].size();
    row.baseline_rate = BitsPerFrame(row.baseline_bytes, frames);
    row.texture_rate = BitsPerFrame(row.texture_bytes, frames);
    row.baseline_psnr = psnr[i];
    row.texture_psnr = psnr[levels + i];
    row.saving = DataRateSaving(row.baseline_rate, row.texture_rate);
    report.rows.push_back(row);
    report.baseline.push_back({row.baseline_rate, row.baseline_psnr});
    report.texture.push_back({row.texture_rate, row.texture_psnr});
  }
  auto by_rate = [](const RdPoint& a, const RdPoint& b) { return a.rate < b.rate; };
  std::sort(report.baseline.begin(), report.baseline.end(), by_rate);
  std::sort(report.texture.begin(), report.texture.end(), by_rate);
  report.bd_rate =
      BdRate(report.baseline, report.texture, options.method, &report.warnings);
  report.bd_psnr =
      BdPsnr(report.baseline, report.texture, options.method, &report.warnings);
  std::sort(report.warnings.begin(), report.warnings.end());
  report.warnings.erase(
      std::unique(report.warnings.begin(), report.warnings.end()),
      report.warnings.end());
  report.baseline_streams.assign(streams.begin(), streams.begin() + levels);
  report.texture_streams.assign(streams.begin() + levels, streams.end());
  return report;
}

namespace {

nlohmann::ordered_json CurveJson(const SweepReport& report, bool texture_arm) {
  nlohmann::ordered_json curve;
  curve["label"] = texture_arm ? "texture" : "baseline";
  curve["method"] = BdMethodName(report.method);
  auto points = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    points.push_back({{"q_level", row.q_level},
                      {"rate", texture_arm ? row.texture_rate : row.baseline_rate},
                      {"psnr", texture_arm ? row.texture_psnr : row.baseline_psnr},
                      {"bytes",
                       texture_arm ? row.texture_bytes : row.baseline_bytes}});
  }
  curve["points"] = points;
  return curve;
}

}  // namespace

std::string SweepToJson(const SweepReport& report) {
  nlohmann::ordered_json doc;
  doc["frame_count"] = report.frame_count;
  doc["method"] = BdMethodName(report.method);
  doc["bd_rate_percent"] = report.bd_rate;
  doc["bd_psnr_db"] = report.bd_psnr;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"q_level", r.q_level},
                    {"baseline_bits_per_frame", r.baseline_rate},
                    {"texture_bits_per_frame", r.texture_rate},
                    {"data_rate_saving_percent", r.saving.percent},
                    {"smaller_rate", r.texture_rate < r.baseline_rate   ? "texture"
                                     : r.baseline_rate < r.texture_rate ? "baseline"
                                                                        : "equal"},
                    {"baseline_psnr_db", r.baseline_psnr},
                    {"texture_psnr_db", r.texture_psnr}});
  }
  doc["rows"] = rows;
  doc["baseline"] = CurveJson(report, false);
  doc["texture"] = CurveJson(report, true);
  doc["warnings"] = report.warnings;
  return doc.dump(2) + "\n";
}

std::string CurveToJson(const SweepReport& report, bool texture_arm) {
  return CurveJson(report, texture_arm).dump(2) + "\n";
}

RdCurve CurveFromJson(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed curve file: ") + e.what());
  }
  if (!doc.contains("points") || !doc["points"].is_array()) {
    throw Error("curve file has no points array");
  }
  RdCurve curve;
  for (const auto& p : doc["points"]) {
    if (!p.contains("rate") || !p.contains("psnr") || !p["rate"].is_number() ||
        !p["psnr"].is_number()) {
      throw Error("curve point lacks numeric rate/psnr");
    }
    curve.push_back({p["rate"].get<double>(), p["psnr"].get<double>()});
  }
  return curve;
}

std::string SweepToTable(const SweepReport& report) {
  std::ostringstream os;
  os << std::fixed;
  os << "q-level  baseline bits/frame  texture bits/frame  saving(%)  "
        "baseline PSNR  texture PSNR\n";
  for (const auto& r : report.rows) {
    os << std::setw(7) << r.q_level << "  " << std::setw(19)
       << std::setprecision(1) << r.baseline_rate << "  " << std::setw(18)
       << r.texture_rate << "  " << std::setw(9) << std::setprecision(2)
       << r.saving.percent << (r.texture_rate <= r.baseline_rate ? " " : "*")
       << " " << std::setw(13) << std::setprecision(2) << r.baseline_psnr
       << "  " << std::setw(12) << r.texture_psnr << "\n";
  }
  os << "BD-RATE " << std::setprecision(2) << report.bd_rate << " %  BD-PSNR "
     << std::setprecision(3) << report.bd_psnr << " dB  ("
     << BdMethodName(report.method) << ")\n";
  for (const auto& w : report.warnings) os << "warning: " << w << "\n";
  if (std::any_of(report.rows.begin(), report.rows.end(), [](const SweepRow& r) {
        return r.texture_rate > r.baseline_rate;
      })) {
    os << "* texture mode used more bits at this level\n";
  }
  return os.str();
}

}  // namespace txc
