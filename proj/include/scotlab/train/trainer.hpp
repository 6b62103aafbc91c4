#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>

#include "scotlab/data/container.hpp"
#include "scotlab/data/tasks.hpp"
#include "scotlab/model/checkpoint.hpp"
#include "scotlab/model/scot.hpp"
#include "scotlab/optim.hpp"
#include "scotlab/train/loss.hpp"
#include "scotlab/train/pairs.hpp"

namespace scotlab {

// One dataset bound into a training run, with train/validation slices
// ([begin, end) trajectory ranges).
struct TaskBinding {
  const TrajectoryDataset* data = nullptr;
  TaskSpec spec;
  int64_t train_begin = 0, train_end = 0;
  int64_t val_begin = 0, val_end = 0;
};

struct TrainOptions {
  SamplerMode mode = SamplerMode::All2All;
  int64_t subset_stride = 1;
  int64_t batch = 8;
  int64_t epochs = 4;
  int64_t max_steps = -1;      // caps total steps when >= 0
  double lr = 1e-3;            // backbone group
  double lr_embed = -1;        // embed/recover group; defaults to lr
  double lr_norm = -1;         // time-norm group; defaults to lr
  double weight_decay = 1e-6;  // not applied to time-norm parameters
  double clip_norm = 5.0;
  double warmup_frac = 0.05;
  bool frozen_latent = false;  // backbone receives no updates at all
  uint64_t seed = 0;
  int64_t log_every = 25;

  double group_lr(ParamGroup g) const {
    switch (g) {
      case ParamGroup::Backbone: return lr;
      case ParamGroup::EmbedRecover: return lr_embed >= 0 ? lr_embed : lr;
      case ParamGroup::TimeNorm: return lr_norm >= 0 ? lr_norm : lr;
    }
    return lr;
  }
};

struct HistoryRow {
  int64_t step = 0;
  double lr = 0;
  double train_loss = 0;
  double val_loss = 0;
  bool has_val = false;
};

inline void write_history_csv(const std::vector<HistoryRow>& rows,
                              const std::filesystem::path& path, bool append = false) {
  std::ofstream f(path, append ? std::ios::app : std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  if (!append) f << "step,lr,train_loss,val_loss\n";
  f << std::setprecision(17);
  for (const auto& r : rows) {
    f << r.step << "," << r.lr << "," << r.train_loss << ",";
    if (r.has_val) f << r.val_loss;
    f << "\n";
  }
}

// Copies every parameter of `pretrained` into a fresh parameter set for
// `target_cfg`. With replace_embedding the embedding/recovery set keeps
// its fresh from-seed initialization; anything else must match shapes.
template <class T>
ScotParams<T> transfer_params(const ScotParams<T>& pretrained, const ScotConfig& target_cfg,
                              uint64_t seed, bool replace_embedding) {
  ScotParams<T> out(target_cfg, seed);
  const auto& replaced = replaced_embedding_params();
  for (size_t i = 0; i < out.size(); ++i) {
    auto& dst = out.param(i);
    const bool is_replaced =
        std::find(replaced.begin(), replaced.end(), dst.name) != replaced.end();
    if (replace_embedding && is_replaced) continue;
    if (!pretrained.has(dst.name))
      throw ValueError("pretrained checkpoint lacks parameter " + dst.name);
    const auto& src = pretrained.at(dst.name);
    if (src.shape() != dst.value.shape()) {
      if (is_replaced)
        throw ValueError("channel mismatch on " + dst.name + " (" + shape_str(src.shape()) +
                         " vs " + shape_str(dst.value.shape()) +
                         "); finetuning a different channel layout requires replace_embedding");
      throw ValueError("incompatible checkpoint manifest at " + dst.name + ": " +
                       shape_str(src.shape()) + " vs " + shape_str(dst.value.shape()));
    }
    std::copy(src.data(), src.data() + src.size(), dst.value.data());
  }
  return out;
}

template <class T>
struct Batch {
  Tensor<T> input;
  Tensor<T> target;
  Tensor<T> mask;  // [B, C]
  std::vector<double> lead;
};

// Training/evaluation pair assembly shared by the trainer and the
// evaluation module.
template <class T>
class BatchBuilder {
 public:
  BatchBuilder(std::vector<TaskBinding> tasks, int64_t model_channels, int64_t grid)
      : tasks_(std::move(tasks)), channels_(model_channels), grid_(grid) {
    for (const auto& t : tasks_) {
      if (t.data->grid.n != grid_)
        throw ValueError("dataset grid " + std::to_string(t.data->grid.n) +
                         " does not match model grid " + std::to_string(grid_));
      layout_mode_.push_back(decide_layout(t));
    }
  }

  const std::vector<TaskBinding>& tasks() const { return tasks_; }

  bool uses_fluid_layout(size_t task) const { return layout_mode_[task]; }

  // the snapshot pairs one trajectory of this task contributes
  std::vector<SnapshotPair> task_pairs(size_t task, SamplerMode mode, int64_t stride) const {
    const auto& t = tasks_[task];
    if (t.spec.steady) return {{0, t.data->n_time() - 1}};
    return enumerate_pairs(mode, t.data->times, stride);
  }

  std::vector<PairRef> build_pairs(SamplerMode mode, int64_t stride, bool train_slice) const {
    std::vector<PairRef> out;
    for (size_t ti = 0; ti < tasks_.size(); ++ti) {
      const auto& t = tasks_[ti];
      const auto pairs = task_pairs(ti, mode, stride);
      const int64_t lo = train_slice ? t.train_begin : t.val_begin;
      const int64_t hi = train_slice ? t.train_end : t.val_end;
      for (int64_t traj = lo; traj < hi; ++traj)
        for (const auto& [k, kbar] : pairs)
          out.push_back(PairRef{int32_t(ti), int32_t(traj), int32_t(k), int32_t(kbar)});
    }
    return out;
  }

  Batch<T> assemble(const std::vector<PairRef>& refs) const {
    const int64_t B = int64_t(refs.size());
    Batch<T> b;
    b.input = Tensor<T>({B, channels_, grid_, grid_});
    b.target = Tensor<T>({B, channels_, grid_, grid_});
    b.mask = Tensor<T>({B, channels_});
    for (int64_t i = 0; i < B; ++i) {
      const auto& r = refs[size_t(i)];
      const auto& t = tasks_[size_t(r.task)];
      fill_sample(t, layout_mode_[size_t(r.task)], r,
                  b.input.data() + i * channels_ * grid_ * grid_,
                  b.target.data() + i * channels_ * grid_ * grid_,
                  b.mask.data() + i * channels_);
      const double lead = t.spec.steady
                              ? 1.0
                              : t.data->times[size_t(r.kbar)] - t.data->times[size_t(r.k)];
      b.lead.push_back(lead);
    }
    return b;
  }

 private:
  bool decide_layout(const TaskBinding& t) const {
    const int64_t native = int64_t(t.spec.channels.size());
    if (native == channels_) return false;
    if (t.spec.fits_fluid_layout && channels_ == kFluidLayoutChannels) return true;
    throw ValueError("channel-layout conflict: task '" + t.spec.pde + "' has " +
                     std::to_string(native) + " channels, model expects " +
                     std::to_string(channels_));
  }

  void fill_sample(const TaskBinding& t, bool layout, const PairRef& r, T* input, T* target,
                   T* mask) const {
    const int64_t frame = grid_ * grid_;
    const int64_t native = int64_t(t.spec.channels.size());
    if (!layout) {
      for (int64_t c = 0; c < native; ++c) {
        const float* in = t.data->field(r.traj, r.k, c);
        const float* tg = t.data->field(r.traj, r.kbar, c);
        for (int64_t i = 0; i < frame; ++i) {
          input[c * frame + i] = T(in[i]);
          target[c * frame + i] = T(tg[i]);
        }
        mask[c] = T(t.spec.loss_mask_native[size_t(c)]);
      }
      return;
    }
    for (int64_t slot = 0; slot < channels_; ++slot) {
      const T fill = T(t.spec.layout_fill[size_t(slot)]);
      for (int64_t i = 0; i < frame; ++i) {
        input[slot * frame + i] = fill;
        target[slot * frame + i] = fill;
      }
      mask[slot] = T(t.spec.loss_mask_layout[size_t(slot)]);
    }
    for (int64_t c = 0; c < native; ++c) {
      const int64_t slot = t.spec.layout_slot[size_t(c)];
      const float* in = t.data->field(r.traj, r.k, c);
      const float* tg = t.data->field(r.traj, r.kbar, c);
      for (int64_t i = 0; i < frame; ++i) {
        input[slot * frame + i] = T(in[i]);
        target[slot * frame + i] = T(tg[i]);
      }
    }
  }

  std::vector<TaskBinding> tasks_;
  int64_t channels_;
  int64_t grid_;
  std::vector<bool> layout_mode_;
};

// Epoch-based trainer: one epoch is a seeded permutation over the full
// pair set; AdamW with cosine-warmup schedule, gradient clipping, and
// best-validation checkpoint retention.
template <class T>
class Trainer {
 public:
  Trainer(Scot<T> model, std::vector<TaskBinding> tasks, TrainOptions opt)
      : model_(std::move(model)),
        opt_(opt),
        builder_(std::move(tasks), model_.config().in_channels, model_.config().grid_size) {
    if (model_.config().in_channels != model_.config().out_channels)
      throw ValueError("trainer expects matching in/out channels");
    for (size_t i = 0; i < model_.params().size(); ++i) {
      const auto& p = model_.params().param(i);
      const bool trainable = !(opt_.frozen_latent && p.group == ParamGroup::Backbone);
      if (trainable) trainable_.push_back(i);
    }
    state_ = make_state();
    train_pairs_ = builder_.build_pairs(opt_.mode, opt_.subset_stride, /*train=*/true);
    val_pairs_ = builder_.build_pairs(opt_.mode, opt_.subset_stride, /*train=*/false);
    if (train_pairs_.empty()) throw ValueError("no training pairs (empty task mixture?)");
    steps_per_epoch_ = (int64_t(train_pairs_.size()) + opt_.batch - 1) / opt_.batch;
    total_steps_ = opt_.epochs * steps_per_epoch_;
    if (opt_.max_steps >= 0) total_steps_ = std::min(total_steps_, opt_.max_steps);
    schedule_ = LrSchedule::cosine_warmup(
        1.0, int64_t(std::llround(opt_.warmup_frac * double(total_steps_))), total_steps_);
  }

  int64_t steps_per_epoch() const { return steps_per_epoch_; }
  int64_t total_steps() const { return total_steps_; }
  int64_t pairs_per_epoch() const { return int64_t(train_pairs_.size()); }

  Scot<T>& model() { return model_; }
  const std::vector<HistoryRow>& history() const { return history_; }
  double best_val() const { return best_val_; }
  int64_t best_epoch() const { return best_epoch_; }

  // Parameters at the lowest validation loss (falls back to the final
  // parameters when no validation pairs exist).
  const ScotParams<T>& best_params() const { return best_ ? *best_ : model_.params(); }

  bool resume(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::exists(dir / "train_state.json")) return false;
    nlohmann::json st = nlohmann::json::parse(detail::read_file(dir / "train_state.json"));
    auto last = load_checkpoint<T>(dir / "last");
    for (size_t i = 0; i < model_.params().size(); ++i) {
      auto& dst = model_.params().param(i).value;
      const auto& src = last.param(i).value;
      std::copy(src.data(), src.data() + src.size(), dst.data());
    }
    load_optim(dir / "optim.bin");
    state_.t = st.at("adam_t").get<int64_t>();
    step_ = st.at("step").get<int64_t>();
    next_epoch_ = st.at("epoch_next").get<int64_t>();
    best_val_ = st.at("best_val").is_null() ? std::numeric_limits<double>::infinity()
                                            : st.at("best_val").get<double>();
    best_epoch_ = st.at("best_epoch").get<int64_t>();
    if (fs::exists(dir / "best" / "model.json"))
      best_ = std::make_unique<ScotParams<T>>(load_checkpoint<T>(dir / "best"));
    return true;
  }

  // stop_after_epoch (when >= 0) ends the call after that epoch while
  // keeping the configured schedule, emulating an interrupted run that a
  // later resume() continues.
  void run(const std::filesystem::path& out_dir = {}, int64_t stop_after_epoch = -1) {
    namespace fs = std::filesystem;
    const bool checkpointing = !out_dir.empty();
    if (checkpointing) fs::create_directories(out_dir);
    const bool resumed = next_epoch_ > 0;
    const int64_t last_epoch =
        stop_after_epoch >= 0 ? std::min(stop_after_epoch + 1, opt_.epochs) : opt_.epochs;

    for (int64_t epoch = next_epoch_; epoch < last_epoch && step_ < total_steps_; ++epoch) {
      std::vector<PairRef> perm = train_pairs_;
      shuffle_epoch(perm, opt_.seed, epoch);
      for (int64_t off = 0; off < int64_t(perm.size()) && step_ < total_steps_;
           off += opt_.batch) {
        const int64_t take = std::min<int64_t>(opt_.batch, int64_t(perm.size()) - off);
        std::vector<PairRef> refs(perm.begin() + off, perm.begin() + off + take);
        const double unit = lr_at(schedule_, std::min(step_ + 1, total_steps_));
        const double loss = train_step(refs, unit);
        ++step_;
        if (step_ % opt_.log_every == 0 || step_ == total_steps_)
          history_.push_back({step_, unit * opt_.lr, loss, 0, false});
      }
      if (!val_pairs_.empty()) {
        const double val = evaluate_pairs(val_pairs_);
        history_.push_back({step_, lr_at(schedule_, std::min(step_, total_steps_)) * opt_.lr,
                            history_.empty() ? 0.0 : history_.back().train_loss, val, true});
        if (val < best_val_) {
          best_val_ = val;
          best_epoch_ = epoch;
          best_ = std::make_unique<ScotParams<T>>(deep_clone(model_.params()));
        }
      }
      next_epoch_ = epoch + 1;
      if (checkpointing) save_state(out_dir);
    }
    const bool finished = next_epoch_ >= opt_.epochs || step_ >= total_steps_;
    if (finished && !best_) best_ = std::make_unique<ScotParams<T>>(deep_clone(model_.params()));
    if (checkpointing) {
      save_state(out_dir);
      if (best_) save_checkpoint(*best_, out_dir / "best");
      write_history_csv(history_, out_dir / "history.csv", /*append=*/resumed);
    }
  }

  // training-objective loss over an explicit pair list (used for
  // validation and by tests)
  double evaluate_pairs(const std::vector<PairRef>& pairs) {
    model_.params().detach_all();
    double total = 0;
    int64_t batches = 0;
    for (int64_t off = 0; off < int64_t(pairs.size()); off += opt_.batch) {
      const int64_t take = std::min<int64_t>(opt_.batch, int64_t(pairs.size()) - off);
      std::vector<PairRef> refs(pairs.begin() + off, pairs.begin() + off + take);
      Batch<T> b = builder_.assemble(refs);
      Tensor<T> pred = model_.forward_batch(b.input, b.lead);
      total += double(relative_l1_loss(pred, b.target, b.mask).item());
      ++batches;
    }
    return total / double(std::max<int64_t>(1, batches));
  }

  const std::vector<PairRef>& val_pairs() const { return val_pairs_; }
  const std::vector<PairRef>& train_pairs() const { return train_pairs_; }

 private:
  AdamWState<T> make_state() {
    AdamWState<T> st;
    for (size_t idx : trainable_) {
      st.m.push_back(zeros_like(model_.params().param(idx).value));
      st.v.push_back(zeros_like(model_.params().param(idx).value));
    }
    return st;
  }

  static ScotParams<T> deep_clone(const ScotParams<T>& src) {
    ScotParams<T> out(src.config(), 0);
    for (size_t i = 0; i < src.size(); ++i) {
      const auto& s = src.param(i).value;
      std::copy(s.data(), s.data() + s.size(), out.param(i).value.data());
    }
    return out;
  }

  double train_step(const std::vector<PairRef>& refs, double lr_unit) {
    Batch<T> b = builder_.assemble(refs);
    Tape<T> tape;
    model_.params().attach(tape);
    Tensor<T> pred = model_.forward_batch(b.input, b.lead);
    Tensor<T> loss = relative_l1_loss(pred, b.target, b.mask);
    tape.backward(loss);

    std::vector<Tensor<T>> params, grads;
    std::vector<double> lrs, wds;
    params.reserve(trainable_.size());
    for (size_t idx : trainable_) {
      auto& p = model_.params().param(idx);
      params.push_back(p.value);
      grads.push_back(tape.grad(p.value));
      lrs.push_back(opt_.group_lr(p.group) * lr_unit);
      wds.push_back(p.group == ParamGroup::TimeNorm ? 0.0 : opt_.weight_decay);
    }
    model_.params().detach_all();
    clip_grad_norm(grads, opt_.clip_norm);
    adamw_step(params, grads, state_, lrs, wds);
    return double(loss.item());
  }

  void save_state(const std::filesystem::path& dir) {
    save_checkpoint(model_.params(), dir / "last");
    save_optim(dir / "optim.bin");
    nlohmann::json st{{"epoch_next", next_epoch_}, {"step", step_},
                      {"adam_t", state_.t},        {"best_val", best_val_},
                      {"best_epoch", best_epoch_}, {"dtype", detail::dtype_name<T>()}};
    detail::write_file(dir / "train_state.json", st.dump(2) + "\n");
    if (best_) save_checkpoint(*best_, dir / "best");
  }

  void save_optim(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    for (const auto& m : state_.m)
      f.write(reinterpret_cast<const char*>(m.data()), std::streamsize(size_t(m.size()) * sizeof(T)));
    for (const auto& v : state_.v)
      f.write(reinterpret_cast<const char*>(v.data()), std::streamsize(size_t(v.size()) * sizeof(T)));
  }

  void load_optim(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path.string());
    for (auto& m : state_.m)
      f.read(reinterpret_cast<char*>(m.data()), std::streamsize(size_t(m.size()) * sizeof(T)));
    for (auto& v : state_.v)
      f.read(reinterpret_cast<char*>(v.data()), std::streamsize(size_t(v.size()) * sizeof(T)));
    if (!f) throw IoError("optimizer state truncated: " + path.string());
  }

  Scot<T> model_;
  TrainOptions opt_;
  BatchBuilder<T> builder_;
  std::vector<size_t> trainable_;
  AdamWState<T> state_;
  std::vector<PairRef> train_pairs_, val_pairs_;
  int64_t steps_per_epoch_ = 0, total_steps_ = 0;
  LrSchedule schedule_;
  int64_t step_ = 0, next_epoch_ = 0;
  std::vector<HistoryRow> history_;
  double best_val_ = std::numeric_limits<double>::infinity();
  int64_t best_epoch_ = -1;
  std::unique_ptr<ScotParams<T>> best_;
};

}  // namespace scotlab
