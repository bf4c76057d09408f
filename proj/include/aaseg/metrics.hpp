#ifndef AASEG_METRICS_HPP
#define AASEG_METRICS_HPP

#include <string>
#include <utility>
#include <vector>

#include "aaseg/volume.hpp"

namespace aaseg::metrics {

struct Point2 {
  double x = 0, y = 0;
};

struct Circle {
  Point2 center;
  double radius = 0;
};

struct DiameterResult {
  double max_diameter_mm = 0;
  int slice_index = -1;  // -1 when the mask is empty
  std::vector<double> profile_mm;
};

struct MetricsReport {
  std::string case_id;
  std::string stage;  // "pre" or "post"
  double dice = 0;
  double jaccard = 0;
  double max_diameter_mm = 0;
  double gt_max_diameter_mm = 0;
  double diameter_abs_err_mm = 0;
  int slice_index = -1;
  int gt_slice_index = -1;
  double volume_mm3 = 0;
  double gt_volume_mm3 = 0;
  double rel_vol_diff = 0;
  bool empty_pair = false;  // both masks empty; overlap scores use the =1 convention
};

struct MannWhitneyResult {
  double u_a = 0;
  double u_b = 0;
  double p = 0;  // one-sided, alternative: a tends larger than b
  bool exact = false;
};

// overlap scores; both masks must share geometry. Empty-vs-empty = 1.
double dice(const BinaryMask3D& a, const BinaryMask3D& b);
double jaccard(const BinaryMask3D& a, const BinaryMask3D& b);

// smallest circle containing all points (Welzl); throws on empty input
Circle minimum_enclosing_circle(const std::vector<Point2>& points);

// per-axial-slice MEC of foreground voxel centers (in mm), max over slices
DiameterResult max_axial_diameter(const BinaryMask3D& mask);

// per case |V_pred - V_true| / V_true; V_true must be positive
std::pair<double, std::vector<double>> relative_volume_difference(
    const std::vector<std::pair<double, double>>& pred_true_volumes);

// exact enumeration when n_a + n_b <= 12, otherwise normal approximation
// with tie correction and continuity correction
MannWhitneyResult mann_whitney_u(const std::vector<double>& a,
                                 const std::vector<double>& b);

MetricsReport evaluate_case(const BinaryMask3D& pred, const BinaryMask3D& gt,
                            const std::string& case_id = "",
                            const std::string& stage = "");

}  // namespace aaseg::metrics

#endif
