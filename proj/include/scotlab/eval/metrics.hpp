#pragma once

#include "scotlab/train/trainer.hpp"

namespace scotlab {

// How a model reaches the target time: one direct evaluation, a uniform
// autoregressive rollout of `steps` applications, or explicit times.
struct RolloutSchedule {
  enum class Kind { Direct, Homogeneous, Explicit };
  Kind kind = Kind::Direct;
  int64_t steps = 1;
  std::vector<double> times;  // explicit kind; strictly increasing to t*

  static RolloutSchedule direct() { return {}; }

  static RolloutSchedule homogeneous(int64_t steps) {
    if (steps < 1) throw ValueError("homogeneous rollout needs >= 1 step");
    return {Kind::Homogeneous, steps, {}};
  }

  static RolloutSchedule explicit_times(std::vector<double> times) {
    RolloutSchedule s{Kind::Explicit, int64_t(times.size()), std::move(times)};
    Scot<float>::validate_schedule(s.times);
    return s;
  }

  // "direct" | "homogeneous:K" | "explicit:t1,t2,..."
  static RolloutSchedule parse(const std::string& text) {
    if (text == "direct") return direct();
    if (text.rfind("homogeneous:", 0) == 0)
      return homogeneous(std::stoll(text.substr(12)));
    if (text.rfind("explicit:", 0) == 0) {
      std::vector<double> times;
      std::string rest = text.substr(9);
      size_t pos = 0;
      while (pos < rest.size()) {
        size_t next = rest.find(',', pos);
        if (next == std::string::npos) next = rest.size();
        times.push_back(std::stod(rest.substr(pos, next - pos)));
        pos = next + 1;
      }
      return explicit_times(std::move(times));
    }
    throw ValueError("bad rollout schedule '" + text +
                     "' (direct | homogeneous:K | explicit:t1,t2,...)");
  }

  std::string describe() const {
    switch (kind) {
      case Kind::Direct: return "direct";
      case Kind::Homogeneous: return "homogeneous:" + std::to_string(steps);
      case Kind::Explicit: {
        std::string s = "explicit:";
        for (size_t i = 0; i < times.size(); ++i)
          s += (i ? "," : "") + std::to_string(times[i]);
        return s;
      }
    }
    return "?";
  }

  std::vector<double> resolve(double t_star) const {
    switch (kind) {
      case Kind::Direct: return {t_star};
      case Kind::Homogeneous: {
        std::vector<double> t;
        for (int64_t i = 1; i <= steps; ++i) t.push_back(t_star * double(i) / double(steps));
        return t;
      }
      case Kind::Explicit: {
        if (times.empty() || std::abs(times.back() - t_star) > 1e-9)
          throw ValueError("explicit schedule must end at the target time");
        return times;
      }
    }
    throw ValueError("bad schedule kind");
  }
};

struct ErrorRecord {
  std::string task;
  std::string model_id;
  int64_t n_train = -1;            // annotation for scaling curves
  int64_t n_samples = 0;           // test-set size
  std::vector<int64_t> sample_ids; // aligned with per_sample
  std::vector<double> per_sample;  // relative L1 errors
  std::vector<int64_t> flagged;    // excluded zero-norm-target samples
  double median = 0;
  double nsr = 0;
  std::string schedule;
};

inline double median_of(std::vector<double> v) {
  if (v.empty()) throw ValueError("median of an empty set");
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Per-sample relative L1 over the functions of interest: each channel
// group is pooled (vector functions jointly), the mean over groups is the
// sample's error. Samples whose target norm vanishes are flagged and
// excluded from the median.
template <class T>
ErrorRecord median_rel_l1(const std::vector<Tensor<T>>& preds,
                          const std::vector<Tensor<T>>& targets,
                          const std::vector<std::vector<int>>& channel_groups) {
  if (preds.size() != targets.size()) throw ShapeError("median_rel_l1: count mismatch");
  if (channel_groups.empty()) throw ValueError("median_rel_l1: empty channel set");
  ErrorRecord rec;
  rec.n_samples = int64_t(preds.size());
  for (size_t s = 0; s < preds.size(); ++s) {
    if (preds[s].shape() != targets[s].shape())
      throw ShapeError("median_rel_l1: sample " + std::to_string(s) + " shape mismatch");
    const int64_t frame = preds[s].dim(1) * preds[s].dim(2);
    double sum_err = 0;
    bool degenerate = false;
    for (const auto& group : channel_groups) {
      double num = 0, den = 0;
      for (int c : group) {
        const T* p = preds[s].data() + int64_t(c) * frame;
        const T* t = targets[s].data() + int64_t(c) * frame;
        for (int64_t i = 0; i < frame; ++i) {
          num += std::abs(double(p[i] - t[i]));
          den += std::abs(double(t[i]));
        }
      }
      if (den == 0.0) {
        degenerate = true;
        break;
      }
      sum_err += num / den;
    }
    if (degenerate) {
      rec.flagged.push_back(int64_t(s));
    } else {
      rec.sample_ids.push_back(int64_t(s));
      rec.per_sample.push_back(sum_err / double(channel_groups.size()));
    }
  }
  if (!rec.per_sample.empty()) rec.median = median_of(rec.per_sample);
  return rec;
}

// Bilinear resampling between periodic node grids (x_i = i/N). Coarse
// nodes coincide with every (N_to/N_from)-th fine node, so an up-down
// round trip is exact.
inline std::vector<double> resample_bilinear(const std::vector<double>& field, int64_t n_from,
                                             int64_t n_to) {
  if (n_from == n_to) return field;
  std::vector<double> out(size_t(n_to * n_to));
  for (int64_t iy = 0; iy < n_to; ++iy)
    for (int64_t ix = 0; ix < n_to; ++ix) {
      const double x = double(ix) / double(n_to) * double(n_from);
      const double y = double(iy) / double(n_to) * double(n_from);
      const int64_t x0 = int64_t(std::floor(x)), y0 = int64_t(std::floor(y));
      const double fx = x - double(x0), fy = y - double(y0);
      auto at = [&](int64_t yy, int64_t xx) {
        return field[size_t(((yy % n_from + n_from) % n_from) * n_from +
                            ((xx % n_from + n_from) % n_from))];
      };
      out[size_t(iy * n_to + ix)] = (1 - fy) * ((1 - fx) * at(y0, x0) + fx * at(y0, x0 + 1)) +
                                    fy * ((1 - fx) * at(y0 + 1, x0) + fx * at(y0 + 1, x0 + 1));
    }
  return out;
}

struct EvaluateOptions {
  RolloutSchedule schedule;
  double target_time = -1;  // defaults to the last dataset time
  int64_t resample_to = -1; // evaluate at this resolution via bilinear resampling
  double noise_nsr = 0;     // per-channel input noise, std = nsr * RMS
  uint64_t noise_seed = 0;
  int64_t sample_begin = 0; // trajectory slice of the dataset
  int64_t sample_end = -1;  // -1: all
  std::string model_id;
  int64_t n_train = -1;
};

// Full evaluation driver: layout embedding, optional resampling of inputs
// to the model grid and outputs back, optional input noise, rollout per
// schedule, errors against clean targets.
template <class T>
class Evaluator {
 public:
  Evaluator(const Scot<T>& model, const TrajectoryDataset& data)
      : model_(model), data_(data), spec_(task_for(data.pde)) {
    const int64_t native = int64_t(spec_.channels.size());
    if (native == model_.config().in_channels) layout_ = false;
    else if (spec_.fits_fluid_layout && model_.config().in_channels == kFluidLayoutChannels)
      layout_ = true;
    else
      throw ValueError("dataset channels do not fit the model (task '" + spec_.pde + "')");
  }

  const TaskSpec& spec() const { return spec_; }

  ErrorRecord evaluate(const EvaluateOptions& opt) const {
    const double t_star = opt.target_time >= 0 ? opt.target_time : data_.times.back();
    const int64_t target_idx = snapshot_index(t_star);
    const auto schedule_times = spec_.steady ? std::vector<double>{1.0}
                                             : opt.schedule.resolve(t_star);
    const int64_t end = opt.sample_end < 0 ? data_.n_trajectories : opt.sample_end;

    std::vector<Tensor<T>> preds, targets;
    for (int64_t traj = opt.sample_begin; traj < end; ++traj) {
      preds.push_back(predict(traj, schedule_times, opt).back().second);
      targets.push_back(native_snapshot(traj, target_idx, opt.resample_to));
    }
    ErrorRecord rec = median_rel_l1(preds, targets, spec_.eval_groups);
    rec.task = data_.pde;
    rec.model_id = opt.model_id;
    rec.n_train = opt.n_train;
    rec.nsr = opt.noise_nsr;
    rec.schedule = opt.schedule.describe();
    return rec;
  }

  // (time, error) at every intermediate rollout state; each visited time
  // must have a ground-truth snapshot.
  std::vector<std::pair<double, double>> error_over_time(const EvaluateOptions& opt) const {
    const double t_star = opt.target_time >= 0 ? opt.target_time : data_.times.back();
    const auto schedule_times = opt.schedule.resolve(t_star);
    const int64_t end = opt.sample_end < 0 ? data_.n_trajectories : opt.sample_end;

    std::vector<std::vector<double>> per_time_errors(schedule_times.size());
    for (int64_t traj = opt.sample_begin; traj < end; ++traj) {
      auto states = predict(traj, schedule_times, opt);
      for (size_t si = 0; si < states.size(); ++si) {
        const int64_t idx = snapshot_index(states[si].first);
        auto target = native_snapshot(traj, idx, opt.resample_to);
        auto rec = median_rel_l1<T>({states[si].second}, {target}, spec_.eval_groups);
        if (!rec.per_sample.empty()) per_time_errors[si].push_back(rec.per_sample[0]);
      }
    }
    std::vector<std::pair<double, double>> curve;
    for (size_t si = 0; si < schedule_times.size(); ++si)
      curve.emplace_back(schedule_times[si], median_of(per_time_errors[si]));
    return curve;
  }

 private:
  int64_t snapshot_index(double t) const {
    for (size_t i = 0; i < data_.times.size(); ++i)
      if (std::abs(data_.times[i] - t) < 1e-9) return int64_t(i);
    throw ValueError("no ground-truth snapshot at t = " + std::to_string(t) +
                     " (no interpolation of ground truth)");
  }

  // model-layout input at t=0 for one trajectory, with optional noise and
  // resampling detour
  Tensor<T> model_input(int64_t traj, const EvaluateOptions& opt) const {
    const int64_t J = model_.config().grid_size;
    const int64_t cm = model_.config().in_channels;
    const int64_t native = int64_t(spec_.channels.size());
    Tensor<T> input({cm, J, J});
    if (layout_)
      for (int64_t slot = 0; slot < cm; ++slot)
        std::fill(input.data() + slot * J * J, input.data() + (slot + 1) * J * J,
                  T(spec_.layout_fill[size_t(slot)]));

    CounterRng noise_rng(opt.noise_seed, uint64_t(traj));
    for (int64_t c = 0; c < native; ++c) {
      const float* src = data_.field(traj, 0, c);
      std::vector<double> f(src, src + data_.frame());
      if (opt.noise_nsr > 0) {
        double rms = 0;
        for (double v : f) rms += v * v;
        rms = std::sqrt(rms / double(f.size()));
        const double std_dev = opt.noise_nsr * rms;
        for (double& v : f) v += noise_rng.normal(0.0, std_dev);
      }
      if (opt.resample_to > 0) f = resample_bilinear(f, data_.grid.n, opt.resample_to);
      f = resample_bilinear(f, opt.resample_to > 0 ? opt.resample_to : data_.grid.n, J);
      const int64_t slot = layout_ ? spec_.layout_slot[size_t(c)] : c;
      for (int64_t i = 0; i < J * J; ++i) input[slot * J * J + i] = T(f[size_t(i)]);
    }
    return input;
  }

  // rollout through the schedule; returns (time, native-channel field at
  // the evaluation resolution) per visited time
  std::vector<std::pair<double, Tensor<T>>> predict(int64_t traj,
                                                    const std::vector<double>& schedule_times,
                                                    const EvaluateOptions& opt) const {
    Tensor<T> state = model_input(traj, opt);
    std::vector<std::pair<double, Tensor<T>>> out;
    double prev = 0;
    for (double tt : schedule_times) {
      state = model_.forward(state, tt - prev);
      prev = tt;
      out.emplace_back(tt, to_native(state, opt.resample_to));
    }
    return out;
  }

  // model output -> native channels at the evaluation resolution
  Tensor<T> to_native(const Tensor<T>& model_out, int64_t resample_to) const {
    const int64_t J = model_.config().grid_size;
    const int64_t native = int64_t(spec_.channels.size());
    const int64_t n_eval = resample_to > 0 ? resample_to : data_.grid.n;
    Tensor<T> out({native, n_eval, n_eval});
    for (int64_t c = 0; c < native; ++c) {
      const int64_t slot = layout_ ? spec_.layout_slot[size_t(c)] : c;
      std::vector<double> f(size_t(J * J));
      for (int64_t i = 0; i < J * J; ++i) f[size_t(i)] = double(model_out[slot * J * J + i]);
      f = resample_bilinear(f, J, n_eval);
      for (int64_t i = 0; i < n_eval * n_eval; ++i) out[c * n_eval * n_eval + i] = T(f[size_t(i)]);
    }
    return out;
  }

  // ground-truth snapshot in native channels at the evaluation resolution
  Tensor<T> native_snapshot(int64_t traj, int64_t time_idx, int64_t resample_to) const {
    const int64_t native = int64_t(spec_.channels.size());
    const int64_t n_eval = resample_to > 0 ? resample_to : data_.grid.n;
    Tensor<T> out({native, n_eval, n_eval});
    for (int64_t c = 0; c < native; ++c) {
      const float* src = data_.field(traj, time_idx, c);
      std::vector<double> f(src, src + data_.frame());
      if (resample_to > 0) f = resample_bilinear(f, data_.grid.n, resample_to);
      for (int64_t i = 0; i < n_eval * n_eval; ++i) out[c * n_eval * n_eval + i] = T(f[size_t(i)]);
    }
    return out;
  }

  const Scot<T>& model_;
  const TrajectoryDataset& data_;
  TaskSpec spec_;
  bool layout_ = false;
};

// Uniform-bin histogram of the per-sample errors.
struct Histogram {
  std::vector<double> edges;   // bins + 1
  std::vector<int64_t> counts; // bins
};

inline Histogram error_histogram(const ErrorRecord& rec, int64_t bins) {
  if (rec.per_sample.empty()) throw ValueError("error_histogram: empty record");
  if (bins < 1) throw ValueError("error_histogram: bins must be >= 1");
  const double lo = *std::min_element(rec.per_sample.begin(), rec.per_sample.end());
  double hi = *std::max_element(rec.per_sample.begin(), rec.per_sample.end());
  if (hi == lo) hi = lo + 1e-12;
  Histogram h;
  h.counts.assign(size_t(bins), 0);
  for (int64_t b = 0; b <= bins; ++b)
    h.edges.push_back(lo + (hi - lo) * double(b) / double(bins));
  for (double e : rec.per_sample) {
    int64_t b = int64_t((e - lo) / (hi - lo) * double(bins));
    b = std::clamp<int64_t>(b, 0, bins - 1);
    ++h.counts[size_t(b)];
  }
  return h;
}

}  // namespace scotlab
