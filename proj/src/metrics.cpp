#include "aaseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aaseg/rng.hpp"

namespace aaseg::metrics {

namespace {

struct OverlapCounts {
  int64_t a = 0, b = 0, both = 0;
};

OverlapCounts overlap(const BinaryMask3D& a, const BinaryMask3D& b) {
  if (!a.same_geometry(b)) throw Error("mask geometry mismatch");
  OverlapCounts c;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const bool fa = a.data[i] != 0, fb = b.data[i] != 0;
    c.a += fa;
    c.b += fb;
    c.both += (fa && fb);
  }
  return c;
}

}  // namespace

double dice(const BinaryMask3D& a, const BinaryMask3D& b) {
  const OverlapCounts c = overlap(a, b);
  if (c.a + c.b == 0) return 1.0;
  return 2.0 * static_cast<double>(c.both) / static_cast<double>(c.a + c.b);
}

double jaccard(const BinaryMask3D& a, const BinaryMask3D& b) {
  const OverlapCounts c = overlap(a, b);
  const int64_t uni = c.a + c.b - c.both;
  if (uni == 0) return 1.0;
  return static_cast<double>(c.both) / static_cast<double>(uni);
}

// ---------------------------------------------------------------------------
// minimum enclosing circle, Welzl's randomized incremental algorithm
// ---------------------------------------------------------------------------

namespace {

constexpr double kMecEps = 1e-9;

double dist(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

bool contains(const Circle& c, const Point2& p) {
  return dist(c.center, p) <= c.radius + kMecEps * (1.0 + c.radius);
}

Circle circle_two(const Point2& a, const Point2& b) {
  Circle c;
  c.center = {(a.x + b.x) / 2, (a.y + b.y) / 2};
  c.radius = dist(a, b) / 2;
  return c;
}

Circle circle_three(const Point2& a, const Point2& b, const Point2& p) {
  const double bx = b.x - a.x, by = b.y - a.y;
  const double cx = p.x - a.x, cy = p.y - a.y;
  const double d = 2 * (bx * cy - by * cx);
  if (std::abs(d) < 1e-14) {
    // collinear: span the two farthest apart
    Circle best = circle_two(a, b);
    for (const Circle& c : {circle_two(a, p), circle_two(b, p)})
      if (c.radius > best.radius) best = c;
    return best;
  }
  const double ux = (cy * (bx * bx + by * by) - by * (cx * cx + cy * cy)) / d;
  const double uy = (bx * (cx * cx + cy * cy) - cx * (bx * bx + by * by)) / d;
  Circle c;
  c.center = {a.x + ux, a.y + uy};
  c.radius = std::hypot(ux, uy);
  return c;
}

Circle trivial(const std::vector<Point2>& r) {
  switch (r.size()) {
    case 0:
      return {{0, 0}, 0};
    case 1:
      return {r[0], 0};
    case 2:
      return circle_two(r[0], r[1]);
    default:
      return circle_three(r[0], r[1], r[2]);
  }
}

Circle welzl(std::vector<Point2>& pts, std::size_t n, std::vector<Point2> r) {
  if (n == 0 || r.size() == 3) return trivial(r);
  const Point2 p = pts[n - 1];
  Circle c = welzl(pts, n - 1, r);
  if (contains(c, p)) return c;
  r.push_back(p);
  return welzl(pts, n - 1, std::move(r));
}

}  // namespace

Circle minimum_enclosing_circle(const std::vector<Point2>& points) {
  if (points.empty()) throw Error("minimum_enclosing_circle: empty point set");
  std::vector<Point2> pts = points;
  // deterministic shuffle keeps the expected-linear behaviour reproducible
  Rng rng(0x5eedULL ^ pts.size());
  for (std::size_t i = pts.size() - 1; i > 0; --i)
    std::swap(pts[i], pts[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int64_t>(i)))]);
  return welzl(pts, pts.size(), {});
}

// ---------------------------------------------------------------------------

DiameterResult max_axial_diameter(const BinaryMask3D& mask) {
  DiameterResult r;
  r.profile_mm.assign(static_cast<std::size_t>(mask.dims.nz), 0.0);
  for (int z = 0; z < mask.dims.nz; ++z) {
    std::vector<Point2> pts;
    for (int y = 0; y < mask.dims.ny; ++y)
      for (int x = 0; x < mask.dims.nx; ++x)
        if (mask.at(x, y, z))
          pts.push_back({x * mask.spacing.x, y * mask.spacing.y});
    if (pts.empty()) continue;
    const Circle c = minimum_enclosing_circle(pts);
    const double d = 2.0 * c.radius;
    r.profile_mm[static_cast<std::size_t>(z)] = d;
    if (d > r.max_diameter_mm || r.slice_index < 0) {
      if (d > r.max_diameter_mm) {
        r.max_diameter_mm = d;
        r.slice_index = z;
      } else if (r.slice_index < 0) {
        r.slice_index = z;  // first nonempty slice of an all-degenerate mask
      }
    }
  }
  return r;
}

std::pair<double, std::vector<double>> relative_volume_difference(
    const std::vector<std::pair<double, double>>& pred_true_volumes) {
  std::vector<double> per_case;
  for (const auto& [vp, vt] : pred_true_volumes) {
    if (!(vt > 0))
      throw Error("relative_volume_difference: ground-truth volume must be positive");
    per_case.push_back(std::abs(vp - vt) / vt);
  }
  const double mean =
      per_case.empty()
          ? 0.0
          : std::accumulate(per_case.begin(), per_case.end(), 0.0) / per_case.size();
  return {mean, per_case};
}

// ---------------------------------------------------------------------------
// Mann-Whitney U
// ---------------------------------------------------------------------------

namespace {

// midranks of the pooled sample
std::vector<double> midranks(std::vector<double> pooled) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });
  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

double rank_sum_u(const std::vector<double>& ranks,
                  const std::vector<std::size_t>& idx, std::size_t na) {
  double rs = 0;
  for (std::size_t i : idx) rs += ranks[i];
  return rs - static_cast<double>(na) * (na + 1) / 2.0;
}

// count assignments with U >= u_obs over all C(n, na) subsets
void enumerate(const std::vector<double>& ranks, std::size_t n, std::size_t na,
               std::size_t start, double rank_acc, std::size_t chosen,
               double threshold_rank_sum, int64_t& count, int64_t& total) {
  if (chosen == na) {
    ++total;
    if (rank_acc >= threshold_rank_sum - 1e-9) ++count;
    return;
  }
  for (std::size_t i = start; i + (na - chosen) <= n; ++i)
    enumerate(ranks, n, na, i + 1, rank_acc + ranks[i], chosen + 1,
              threshold_rank_sum, count, total);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

MannWhitneyResult mann_whitney_u(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw Error("mann_whitney_u: empty sample");
  const std::size_t na = a.size(), nb = b.size(), n = na + nb;
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::vector<double> ranks = midranks(pooled);

  double ra = 0;
  for (std::size_t i = 0; i < na; ++i) ra += ranks[i];
  MannWhitneyResult r;
  r.u_a = ra - static_cast<double>(na) * (na + 1) / 2.0;
  r.u_b = static_cast<double>(na) * nb - r.u_a;

  if (n <= 12) {
    r.exact = true;
    int64_t count = 0, total = 0;
    enumerate(ranks, n, na, 0, 0.0, 0, ra, count, total);
    r.p = static_cast<double>(count) / static_cast<double>(total);
  } else {
    const double mu = static_cast<double>(na) * nb / 2.0;
    // tie correction over groups of equal ranks
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0;
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_term += t * t * t - t;
      i = j + 1;
    }
    const double nn = static_cast<double>(n);
    const double var = (static_cast<double>(na) * nb / 12.0) *
                       (nn + 1.0 - tie_term / (nn * (nn - 1.0)));
    if (var <= 0) {
      r.p = 0.5;  // all observations tied
    } else {
      const double z = (r.u_a - mu - 0.5) / std::sqrt(var);
      r.p = normal_sf(z);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

MetricsReport evaluate_case(const BinaryMask3D& pred, const BinaryMask3D& gt,
                            const std::string& case_id, const std::string& stage) {
  if (!pred.same_geometry(gt)) throw Error("evaluate_case: mask geometry mismatch");
  MetricsReport m;
  m.case_id = case_id;
  m.stage = stage;
  m.dice = dice(pred, gt);
  m.jaccard = jaccard(pred, gt);

  const DiameterResult dp = max_axial_diameter(pred);
  const DiameterResult dg = max_axial_diameter(gt);
  m.max_diameter_mm = dp.max_diameter_mm;
  m.gt_max_diameter_mm = dg.max_diameter_mm;
  m.diameter_abs_err_mm = std::abs(dp.max_diameter_mm - dg.max_diameter_mm);
  m.slice_index = dp.slice_index;
  m.gt_slice_index = dg.slice_index;

  m.volume_mm3 = mask_volume_mm3(pred);
  m.gt_volume_mm3 = mask_volume_mm3(gt);
  if (m.gt_volume_mm3 > 0) {
    m.rel_vol_diff = std::abs(m.volume_mm3 - m.gt_volume_mm3) / m.gt_volume_mm3;
  } else {
    m.rel_vol_diff = 0;
    m.empty_pair = (m.volume_mm3 == 0);
  }
  return m;
}

}  // namespace aaseg::metrics
