#pragma once

#include <fstream>
#include <iomanip>

#include "scotlab/common.hpp"

namespace scotlab {

// (sample count, median error) points for one model on one task.
struct ScalingCurve {
  std::vector<std::pair<int64_t, double>> points;  // n_samples strictly increasing
  std::string model_id;
  std::string task_id;

  void validate(size_t min_points = 2) const {
    if (points.size() < min_points)
      throw ValueError("scaling curve needs >= " + std::to_string(min_points) + " points");
    for (size_t i = 0; i < points.size(); ++i) {
      if (points[i].second <= 0) throw ValueError("scaling curve needs positive errors");
      if (i > 0 && points[i].first <= points[i - 1].first)
        throw ValueError("scaling curve sample counts must be strictly increasing");
    }
  }

  double value_at(int64_t s) const {
    for (const auto& [n, e] : points)
      if (n == s) return e;
    throw ValueError("curve has no point at S = " + std::to_string(s));
  }
};

struct EgAg {
  double eg = 0;
  double ag = 0;
  bool eg_lower_bound = false;  // model already below the level at its smallest S
};

// Efficiency/Accuracy Gain against a reference curve. AG uses the exact
// curve points at S_ag. EG solves E_model(s) = E_ref(S_eg) by log-log
// linear interpolation along the model curve; 0.0 when the model never
// reaches the reference level inside its observed range.
inline EgAg eg_ag(const ScalingCurve& model, const ScalingCurve& ref, int64_t s_eg, int64_t s_ag) {
  model.validate();
  ref.validate();
  EgAg out;
  out.ag = ref.value_at(s_ag) / model.value_at(s_ag);

  const double level = ref.value_at(s_eg);
  const auto& pts = model.points;
  if (pts.front().second <= level) {
    out.eg = double(s_eg) / double(pts.front().first);
    out.eg_lower_bound = true;
    return out;
  }
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto [s0, e0] = pts[i];
    const auto [s1, e1] = pts[i + 1];
    if (e0 > level && e1 <= level) {
      double s = double(s1);
      if (e1 != level) {  // interpolate only on a strict crossing
        const double t = (std::log(level) - std::log(e0)) / (std::log(e1) - std::log(e0));
        s = std::exp(std::log(double(s0)) + t * (std::log(double(s1)) - std::log(double(s0))));
      }
      out.eg = double(s_eg) / s;
      return out;
    }
  }
  out.eg = 0.0;  // never reaches the reference level
  return out;
}

struct PowerLawFit {
  double c = 0;      // E(M) ~ c * M^(-alpha)
  double alpha = 0;
  double residual = 0;  // SSE in log-log space
};

inline PowerLawFit fit_power_law(const ScalingCurve& curve) {
  curve.validate(2);
  const size_t n = curve.points.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [m, e] : curve.points) {
    const double x = std::log(double(m)), y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = double(n) * sxx - sx * sx;
  if (denom == 0) throw ValueError("degenerate curve for power-law fit");
  const double slope = (double(n) * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / double(n);
  PowerLawFit fit;
  fit.alpha = -slope;
  fit.c = std::exp(intercept);
  for (const auto& [m, e] : curve.points) {
    const double r = std::log(e) - (intercept + slope * std::log(double(m)));
    fit.residual += r * r;
  }
  return fit;
}

struct BiphasicFit {
  int64_t m_pt = 0;      // breakpoint sample count
  double alpha_warmup = 0;
  double alpha_learning = 0;
  double c_warmup = 0;
  double c_learning = 0;
  double residual = 0;
};

// Two power laws joined at a breakpoint, found by exhaustive search over
// interior sample counts (the breakpoint belongs to both sides).
inline BiphasicFit fit_biphasic(const ScalingCurve& curve) {
  curve.validate(4);
  const auto& pts = curve.points;
  const int64_t n = int64_t(pts.size());
  BiphasicFit best;
  best.residual = std::numeric_limits<double>::infinity();
  for (int64_t b = 1; b <= n - 2; ++b) {
    ScalingCurve left{{pts.begin(), pts.begin() + b + 1}, curve.model_id, curve.task_id};
    ScalingCurve right{{pts.begin() + b, pts.end()}, curve.model_id, curve.task_id};
    const auto fl = fit_power_law(left);
    const auto fr = fit_power_law(right);
    const double sse = fl.residual + fr.residual;
    if (sse < best.residual) {
      best.residual = sse;
      best.m_pt = pts[size_t(b)].first;
      best.alpha_warmup = fl.alpha;
      best.alpha_learning = fr.alpha;
      best.c_warmup = fl.c;
      best.c_learning = fr.c;
    }
  }
  return best;
}

// ---------------------------------------------------------------- file IO

inline void write_scaling_csv(const ScalingCurve& curve, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  f << std::setprecision(17) << "n_samples,median_error\n";
  for (const auto& [n, e] : curve.points) f << n << "," << e << "\n";
}

inline ScalingCurve read_scaling_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read " + path.string());
  ScalingCurve curve;
  std::string line;
  std::getline(f, line);  // header
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const size_t comma = line.find(',');
    if (comma == std::string::npos) throw IoError("malformed scaling csv line: " + line);
    curve.points.emplace_back(std::stoll(line.substr(0, comma)),
                              std::stod(line.substr(comma + 1)));
  }
  return curve;
}

}  // namespace scotlab
