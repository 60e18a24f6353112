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

#include "txc/global_motion.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>

#include "txc/error.h"
#include "txc/parallel.h"

namespace txc {

AffineMotion AffineMotion::RotZoom(double zoom, double angle_rad, double tx,
                                   double ty) {
  const double c = zoom * std::cos(angle_rad);
  const double s = zoom * std::sin(angle_rad);
  return {c, -s, s, c, tx, ty};
}

bool AffineMotion::IsFinite() const {
  return std::isfinite(a11) && std::isfinite(a12) && std::isfinite(a21) &&
         std::isfinite(a22) && std::isfinite(tx) && std::isfinite(ty);
}

std::array<int32_t, 6> AffineMotion::ToFixed() const {
  std::array<int32_t, 6> q{};
  const double v[6] = {a11, a12, a21, a22, tx, ty};
  for (int i = 0; i < 6; ++i) {
    const double scaled = std::round(v[i] * 65536.0);
    q[i] = static_cast<int32_t>(
        std::clamp(scaled, static_cast<double>(INT32_MIN),
                   static_cast<double>(INT32_MAX)));
  }
  return q;
}

AffineMotion AffineMotion::FromFixed(const std::array<int32_t, 6>& q) {
  return {q[0] / 65536.0, q[1] / 65536.0, q[2] / 65536.0,
          q[3] / 65536.0, q[4] / 65536.0, q[5] / 65536.0};
}

std::string AffineMotion::ToString() const {
  std::ostringstream os;
  os.precision(10);
  os << a11 << " " << a12 << " " << a21 << " " << a22 << " " << tx << " "
     << ty;
  return os.str();
}

const char* MotionModelName(MotionModelKind kind) {
  switch (kind) {
    case MotionModelKind::kTranslation: return "translation";
    case MotionModelKind::kRotZoom: return "rotzoom";
    case MotionModelKind::kAffine: return "affine";
  }
  return "?";
}

MotionModelKind ParseMotionModel(const std::string& name) {
  if (name == "translation") return MotionModelKind::kTranslation;
  if (name == "rotzoom") return MotionModelKind::kRotZoom;
  if (name == "affine") return MotionModelKind::kAffine;
  throw Error("unknown motion model '" + name + "'");
}

int MinimalSampleSize(MotionModelKind kind) {
  switch (kind) {
    case MotionModelKind::kTranslation: return 1;
    case MotionModelKind::kRotZoom: return 2;
    case MotionModelKind::kAffine: return 3;
  }
  return 1;
}

// ---------------------------------------------------------------------------
// Block matching

namespace {

bool BetterMatch(int dx, int dy, uint32_t sad, const BlockMatch& best) {
  if (sad != best.sad) return sad < best.sad;
  const int l1 = std::abs(dx) + std::abs(dy);
  const int best_l1 = std::abs(best.dx) + std::abs(best.dy);
  if (l1 != best_l1) return l1 < best_l1;
  return dy != best.dy ? dy < best.dy : dx < best.dx;
}

void SearchWindow(const Plane& ref, int x, int y, int size, int range,
                  int* lo_x, int* hi_x, int* lo_y, int* hi_y) {
  *lo_x = std::max(-range, -x);
  *hi_x = std::min(range, ref.width - size - x);
  *lo_y = std::max(-range, -y);
  *hi_y = std::min(range, ref.height - size - y);
}

void CheckBlock(const Plane& cur, const Plane& ref, int x, int y, int size) {
  if (x < 0 || y < 0 || x + size > cur.width || y + size > cur.height ||
      ref.width < size || ref.height < size) {
    throw Error("block search outside frame");
  }
}

}  // namespace

BlockMatch FullSearchReference(const Plane& cur, const Plane& ref, int x,
                               int y, int size, int range) {
  CheckBlock(cur, ref, x, y, size);
  int lo_x, hi_x, lo_y, hi_y;
  SearchWindow(ref, x, y, size, range, &lo_x, &hi_x, &lo_y, &hi_y);
  BlockMatch best;
  for (int dy = lo_y; dy <= hi_y; ++dy) {
    for (int dx = lo_x; dx <= hi_x; ++dx) {
      uint32_t sad = 0;
      for (int j = 0; j < size; ++j) {
        for (int i = 0; i < size; ++i) {
          sad += static_cast<uint32_t>(
              std::abs(cur.at(x + i, y + j) - ref.at(x + dx + i, y + dy + j)));
        }
      }
      if (BetterMatch(dx, dy, sad, best)) best = {dx, dy, sad};
    }
  }
  return best;
}

BlockMatch FullSearch(const Plane& cur, const Plane& ref, int x, int y,
                      int size, int range) {
  CheckBlock(cur, ref, x, y, size);
  int lo_x, hi_x, lo_y, hi_y;
  SearchWindow(ref, x, y, size, range, &lo_x, &hi_x, &lo_y, &hi_y);
  BlockMatch best;
  for (int dy = lo_y; dy <= hi_y; ++dy) {
    for (int dx = lo_x; dx <= hi_x; ++dx) {
      uint32_t sad = 0;
      for (int j = 0; j < size && sad <= best.sad; ++j) {
        const uint8_t* a = cur.samples.data() +
                           static_cast<size_t>(y + j) * cur.width + x;
        const uint8_t* b = ref.samples.data() +
                           static_cast<size_t>(y + dy + j) * ref.width + x + dx;
        uint32_t row = 0;
        for (int i = 0; i < size; ++i) {
          row += static_cast<uint32_t>(a[i] > b[i] ? a[i] - b[i] : b[i] - a[i]);
        }
        sad += row;
      }
      if (BetterMatch(dx, dy, sad, best)) best = {dx, dy, sad};
    }
  }
  return best;
}

std::vector<BlockMatch> MatchBlocks(const Plane& cur, const Plane& ref,
                                    std::span<const std::array<int, 2>> origins,
                                    int size, int range) {
  std::vector<BlockMatch> out(origins.size());
  const int n = static_cast<int>(origins.size());
#pragma omp parallel for schedule(dynamic) num_threads(txc::NumThreads())
  for (int i = 0; i < n; ++i) {
    out[i] = FullSearch(cur, ref, origins[i][0], origins[i][1], size, range);
  }
  return out;
}

namespace {

// SAD against the reference displaced by (dx + fx/8, dy + fy/8), on samples
// scaled by 64 so the bilinear weights stay integral.
uint64_t SubpelSad(const Plane& cur, const Plane& ref, int x, int y, int size,
                   int dx, int dy, int fx8, int fy8) {
  // Normalize so the fractional parts lie in [0, 8).
  const int ix = dx + (fx8 >> 3);
  const int iy = dy + (fy8 >> 3);
  const int wx = fx8 & 7;
  const int wy = fy8 & 7;
  uint64_t sad = 0;
  for (int j = 0; j < size; ++j) {
    for (int i = 0; i < size; ++i) {
      const long long rx = x + i + ix;
      const long long ry = y + j + iy;
      const int p00 = ref.ClampedAt(rx, ry);
      const int p10 = ref.ClampedAt(rx + 1, ry);
      const int p01 = ref.ClampedAt(rx, ry + 1);
      const int p11 = ref.ClampedAt(rx + 1, ry + 1);
      const int v = (8 - wx) * (8 - wy) * p00 + wx * (8 - wy) * p10 +
                    (8 - wx) * wy * p01 + wx * wy * p11;
      sad += static_cast<uint64_t>(std::abs(cur.at(x + i, y + j) * 64 - v));
    }
  }
  return sad;
}

}  // namespace

std::array<double, 2> RefineSubpel(const Plane& cur, const Plane& ref, int x,
                                   int y, int size, const BlockMatch& match) {
  int fx = 0;
  int fy = 0;
  uint64_t best = SubpelSad(cur, ref, x, y, size, match.dx, match.dy, 0, 0);
  for (int step : {4, 2, 1}) {
    const int cx = fx;
    const int cy = fy;
    for (int sy = -1; sy <= 1; ++sy) {
      for (int sx = -1; sx <= 1; ++sx) {
        if (sx == 0 && sy == 0) continue;
        const int nx = cx + sx * step;
        const int ny = cy + sy * step;
        const uint64_t sad =
            SubpelSad(cur, ref, x, y, size, match.dx, match.dy, nx, ny);
        if (sad < best) {
          best = sad;
          fx = nx;
          fy = ny;
        }
      }
    }
  }
  return {fx / 8.0, fy / 8.0};
}

std::vector<Correspondence> TextureCorrespondences(
    const Frame& cur, const Frame& ref, const TextureMask& cur_mask,
    const MotionSearchConfig& config) {
  if (!cur_mask.Matches(cur) || cur.width() != ref.width() ||
      cur.height() != ref.height()) {
    throw Error("motion: mask or frame dimensions disagree");
  }
  std::vector<std::array<int, 2>> origins;
  for (int by = 0; by < cur_mask.grid_h; ++by) {
    for (int bx = 0; bx < cur_mask.grid_w; ++bx) {
      if (cur_mask.IsTexture(bx, by)) {
        origins.push_back({bx * kBlockGrid, by * kBlockGrid});
      }
    }
  }
  const auto matches =
      MatchBlocks(cur.y, ref.y, origins, kBlockGrid, config.search_range);
  std::vector<Correspondence> out(origins.size());
  const int n = static_cast<int>(origins.size());
#pragma omp parallel for schedule(dynamic) num_threads(txc::NumThreads())
  for (int i = 0; i < n; ++i) {
    const auto [ox, oy] = origins[i];
    const auto frac =
        RefineSubpel(cur.y, ref.y, ox, oy, kBlockGrid, matches[i]);
    const double cx = ox + (kBlockGrid - 1) / 2.0;
    const double cy = oy + (kBlockGrid - 1) / 2.0;
    out[i] = {cx, cy, cx + matches[i].dx + frac[0],
              cy + matches[i].dy + frac[1]};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model fitting

namespace {

// Solves the n x n system in place by Gaussian elimination with partial
// pivoting. Returns false if singular.
bool Solve(std::vector<double>& a, std::vector<double>& b, int n) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    }
    if (std::abs(a[pivot * n + col]) < 1e-12) return false;
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
      std::swap(b[col], b[pivot]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= a[r * n + c] * b[c];
    b[r] = s / a[r * n + r];
  }
  return true;
}

// Accumulates normal equations for rows `row . params = rhs`.
struct NormalEquations {
  explicit NormalEquations(int n) : n(n), ata(n * n, 0.0), atb(n, 0.0) {}
  void Add(std::span<const double> row, double rhs) {
    for (int i = 0; i < n; ++i) {
      atb[i] += row[i] * rhs;
      for (int j = 0; j < n; ++j) ata[i * n + j] += row[i] * row[j];
    }
  }
  int n;
  std::vector<double> ata;
  std::vector<double> atb;
};

}  // namespace

AffineMotion FitMotion(std::span<const Correspondence> points,
                       MotionModelKind kind) {
  if (static_cast<int>(points.size()) < MinimalSampleSize(kind)) {
    throw Error("too few correspondences for the motion model");
  }
  // Center for conditioning: fit x' - mx' against (x - mx, y - my).
  double mx = 0, my = 0, mrx = 0, mry = 0;
  for (const auto& p : points) {
    mx += p.x;
    my += p.y;
    mrx += p.ref_x;
    mry += p.ref_y;
  }
  const double n = static_cast<double>(points.size());
  mx /= n;
  my /= n;
  mrx /= n;
  mry /= n;

  AffineMotion m;
  switch (kind) {
    case MotionModelKind::kTranslation:
      m = AffineMotion::Translation(mrx - mx, mry - my);
      return m;
    case MotionModelKind::kRotZoom: {
      // x' = a x - b y, y' = b x + a y (centered); unknowns a, b.
      NormalEquations ne(2);
      for (const auto& p : points) {
        const double x = p.x - mx;
        const double y = p.y - my;
        ne.Add(std::array{x, -y}, p.ref_x - mrx);
        ne.Add(std::array{y, x}, p.ref_y - mry);
      }
      if (!Solve(ne.ata, ne.atb, 2)) throw Error("singular rotzoom fit");
      m.a11 = ne.atb[0];
      m.a12 = -ne.atb[1];
      m.a21 = ne.atb[1];
      m.a22 = ne.atb[0];
      break;
    }
    case MotionModelKind::kAffine: {
      NormalEquations nx(2);
      NormalEquations ny(2);
      for (const auto& p : points) {
        const std::array row{p.x - mx, p.y - my};
        nx.Add(row, p.ref_x - mrx);
        ny.Add(row, p.ref_y - mry);
      }
      if (!Solve(nx.ata, nx.atb, 2) || !Solve(ny.ata, ny.atb, 2)) {
        throw Error("singular affine fit");
      }
      m.a11 = nx.atb[0];
      m.a12 = nx.atb[1];
      m.a21 = ny.atb[0];
      m.a22 = ny.atb[1];
      break;
    }
  }
  m.tx = mrx - (m.a11 * mx + m.a12 * my);
  m.ty = mry - (m.a21 * mx + m.a22 * my);
  return m;
}

double ResidualPx(const AffineMotion& m, const Correspondence& c) {
  const auto p = m.Map(c.x, c.y);
  return std::hypot(p[0] - c.ref_x, p[1] - c.ref_y);
}

namespace {

struct RansacResult {
  AffineMotion motion;
  int inliers = 0;
};

RansacResult Ransac(std::span<const Correspondence> pts, MotionModelKind kind,
                    const MotionSearchConfig& config) {
  const int n = static_cast<int>(pts.size());
  const int k = MinimalSampleSize(kind);
  std::mt19937_64 rng(config.ransac_seed);
  std::uniform_int_distribution<int> pick(0, n - 1);

  auto score = [&](const AffineMotion& m, int* count, double* err) {
    *count = 0;
    *err = 0;
    for (const auto& c : pts) {
      const double r = ResidualPx(m, c);
      if (r <= config.ransac_threshold) {
        ++*count;
        *err += r;
      }
    }
  };

  RansacResult best;
  double best_err = 0;
  std::vector<Correspondence> sample(k);
  for (int it = 0; it < config.ransac_iterations; ++it) {
    std::array<int, 3> idx{};
    bool distinct = true;
    for (int s = 0; s < k; ++s) {
      idx[s] = pick(rng);
      for (int t = 0; t < s; ++t) distinct = distinct && idx[t] != idx[s];
      sample[s] = pts[idx[s]];
    }
    if (!distinct) continue;
    AffineMotion m;
    try {
      m = FitMotion(sample, kind);
    } catch (const Error&) {
      continue;  // degenerate sample
    }
    int count;
    double err;
    score(m, &count, &err);
    if (count > best.inliers || (count == best.inliers && err < best_err)) {
      best = {m, count};
      best_err = err;
    }
  }
  if (best.inliers < k) {
    // Every sample degenerate (or a single point): fit everything.
    best.motion = FitMotion(pts, kind);
    double err;
    score(best.motion, &best.inliers, &err);
  }
  // Two refits on the consensus set.
  for (int round = 0; round < 2; ++round) {
    std::vector<Correspondence> inliers;
    for (const auto& c : pts) {
      if (ResidualPx(best.motion, c) <= config.ransac_threshold) {
        inliers.push_back(c);
      }
    }
    if (static_cast<int>(inliers.size()) < k) break;
    try {
      best.motion = FitMotion(inliers, kind);
    } catch (const Error&) {
      break;
    }
    best.inliers = static_cast<int>(inliers.size());
  }
  return best;
}

}  // namespace

MotionEstimate EstimateTextureMotion(const Frame& cur, const Frame& ref,
                                     const TextureMask& cur_mask,
                                     MotionModelKind kind,
                                     const MotionSearchConfig& config) {
  const int cells = cur_mask.TextureCount();
  if (cells < 1) throw Error("no texture region");
  MotionEstimate est;
  est.kind = kind;
  if (cells < 6 && kind != MotionModelKind::kTranslation) {
    est.kind = MotionModelKind::kTranslation;
    est.fell_back = true;
    est.warning = "fewer than 6 texture cells; using a translational model";
  }
  const auto pts = TextureCorrespondences(cur, ref, cur_mask, config);
  est.correspondences = static_cast<int>(pts.size());
  RansacResult fit = Ransac(pts, est.kind, config);
  const double det = fit.motion.Det();
  if (!fit.motion.IsFinite() || std::abs(det) < 0.25 || std::abs(det) > 4) {
    fit = Ransac(pts, MotionModelKind::kTranslation, config);
    est.kind = MotionModelKind::kTranslation;
    est.fell_back = true;
    est.warning = "degenerate fit; using a translational model";
  }
  est.motion = fit.motion;
  est.inlier_fraction = static_cast<double>(fit.inliers) / pts.size();
  return est;
}

// ---------------------------------------------------------------------------
// Warping

void WarpBlock(const Plane& ref, const AffineMotion& m, bool chroma, int x0,
               int y0, int w, int h, uint8_t* dst, int dst_stride) {
  const auto q = m.ToFixed();
  // Positions carry `shift` fractional bits: Q16 for luma, Q17 for chroma so
  // that the halved translation stays exact.
  const int shift = chroma ? 17 : 16;
  const int64_t scale = chroma ? 2 : 1;
  for (int j = 0; j < h; ++j) {
    const int64_t y = y0 + j;
    for (int i = 0; i < w; ++i) {
      const int64_t x = x0 + i;
      const int64_t px = scale * (int64_t{q[0]} * x + int64_t{q[1]} * y) + q[4];
      const int64_t py = scale * (int64_t{q[2]} * x + int64_t{q[3]} * y) + q[5];
      const int64_t ix = px >> shift;
      const int64_t iy = py >> shift;
      const int fx = static_cast<int>((px >> (shift - 8)) & 255);
      const int fy = static_cast<int>((py >> (shift - 8)) & 255);
      const int p00 = ref.ClampedAt(ix, iy);
      const int p10 = ref.ClampedAt(ix + 1, iy);
      const int p01 = ref.ClampedAt(ix, iy + 1);
      const int p11 = ref.ClampedAt(ix + 1, iy + 1);
      const int v = (256 - fx) * (256 - fy) * p00 + fx * (256 - fy) * p10 +
                    (256 - fx) * fy * p01 + fx * fy * p11;
      dst[static_cast<size_t>(j) * dst_stride + i] =
          static_cast<uint8_t>((v + 32768) >> 16);
    }
  }
}

Frame WarpFrame(const Frame& ref, const AffineMotion& m) {
  Frame out = ref;
  WarpBlock(ref.y, m, false, 0, 0, ref.y.width, ref.y.height,
            out.y.samples.data(), out.y.width);
  WarpBlock(ref.u, m, true, 0, 0, ref.u.width, ref.u.height,
            out.u.samples.data(), out.u.width);
  WarpBlock(ref.v, m, true, 0, 0, ref.v.width, ref.v.height,
            out.v.samples.data(), out.v.width);
  return out;
}

std::array<std::array<double, 2>, 4> WarpRect(const AffineMotion& m,
                                              const BlockRect& rect) {
  const double x0 = rect.x;
  const double y0 = rect.y;
  const double x1 = rect.x + rect.size - 1;
  const double y1 = rect.y + rect.size - 1;
  return {m.Map(x0, y0), m.Map(x1, y0), m.Map(x0, y1), m.Map(x1, y1)};
}

}  // namespace txc
