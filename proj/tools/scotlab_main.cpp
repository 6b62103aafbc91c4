// scotlab command-line driver: generate / pretrain / finetune / evaluate /
// rollout / fit-scaling. Every run echoes its effective settings to
// resolved_config.json in the output directory; reruns with identical
// config and seeds reproduce outputs bitwise. Logs go to stderr, artifacts
// to files. Exit codes: 0 success, 1 runtime failure, 2 config error.

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>

#include "scotlab/scotlab.hpp"

namespace {

using namespace scotlab;
using nlohmann::json;
namespace fs = std::filesystem;

uint64_t default_seed() {
  if (const char* env = std::getenv("SCOTLAB_SEED")) return std::strtoull(env, nullptr, 10);
  return 0;
}

void log_line(const std::string& msg) { std::fprintf(stderr, "[scotlab] %s\n", msg.c_str()); }

void write_resolved_config(const json& j, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  detail::write_file(out_dir / "resolved_config.json", j.dump(2) + "\n");
}

// JSON config file values act as defaults; explicit flags override them.
json load_config_file(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") return json::parse(detail::read_file(argv[i + 1]));
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a.rfind("--config=", 0) == 0) return json::parse(detail::read_file(a.substr(9)));
  }
  return json::object();
}

template <class T>
void from_config(const json& j, const char* key, T& value) {
  if (j.contains(key)) j.at(key).get_to(value);
}

// ------------------------------------------------------------- generate

struct GenerateCli {
  GenerateConfig cfg;
  std::string out;
};

int cmd_generate(const GenerateCli& g) {
  validate_generate_config(g.cfg);
  if (g.out.empty()) throw ValueError("generate needs --out");
  json resolved{{"command", "generate"}, {"pde", g.cfg.pde},       {"ic", g.cfg.ic},
                {"n_traj", g.cfg.n_traj}, {"grid", g.cfg.grid},     {"snapshots", g.cfg.snapshots},
                {"t_final", g.cfg.t_final}, {"seed", g.cfg.seed},   {"workers", g.cfg.workers},
                {"name", g.cfg.dataset_name()}, {"out", g.out}};
  write_resolved_config(resolved, g.out);
  const std::string hash = generate_dataset(g.cfg, g.out);
  log_line("dataset " + g.cfg.dataset_name() + " -> " + g.out + " (sha256:" + hash + ")");
  return 0;
}

// ------------------------------------------------------ train (shared)

struct TrainCli {
  std::vector<std::string> data_dirs;
  std::string out;
  std::string dtype = "f32";
  std::string mode = "all2all";
  int64_t subset_stride = 2;
  int64_t batch = 8;
  int64_t epochs = 10;
  int64_t max_steps = -1;
  double lr = 1e-3;
  double lr_embed = -1;
  double lr_norm = -1;
  double weight_decay = 1e-6;
  double warmup_frac = 0.05;
  int64_t val_traj = -1;     // last k trajectories per dataset; -1: auto
  int64_t train_size = -1;   // first k trajectories; -1: all remaining
  uint64_t seed = 0;
  int64_t log_every = 25;
  bool resume = false;
  // model hyperparameters (pretrain / from-scratch)
  int64_t embed_dim = 32;
  int64_t window = 4;
  int64_t patch = 4;
  int64_t levels = 3;
  std::vector<int64_t> blocks{2, 2, 2};
  std::vector<int64_t> heads{2, 4, 8};
  int64_t convnext_blocks = 2;
  int64_t bias_mlp_width = 64;
  // finetune
  std::string from_checkpoint;
  bool replace_embedding = false;
  bool frozen_latent = false;
  bool from_scratch = false;
};

void add_train_options(CLI::App* cmd, TrainCli& t, const json& cfg) {
  from_config(cfg, "data", t.data_dirs);
  from_config(cfg, "out", t.out);
  from_config(cfg, "dtype", t.dtype);
  from_config(cfg, "mode", t.mode);
  from_config(cfg, "subset_stride", t.subset_stride);
  from_config(cfg, "batch", t.batch);
  from_config(cfg, "epochs", t.epochs);
  from_config(cfg, "max_steps", t.max_steps);
  from_config(cfg, "lr", t.lr);
  from_config(cfg, "lr_embed", t.lr_embed);
  from_config(cfg, "lr_norm", t.lr_norm);
  from_config(cfg, "weight_decay", t.weight_decay);
  from_config(cfg, "warmup_frac", t.warmup_frac);
  from_config(cfg, "val_traj", t.val_traj);
  from_config(cfg, "train_size", t.train_size);
  from_config(cfg, "seed", t.seed);
  from_config(cfg, "log_every", t.log_every);
  from_config(cfg, "embed_dim", t.embed_dim);
  from_config(cfg, "window", t.window);
  from_config(cfg, "patch", t.patch);
  from_config(cfg, "levels", t.levels);
  from_config(cfg, "blocks", t.blocks);
  from_config(cfg, "heads", t.heads);
  from_config(cfg, "convnext_blocks", t.convnext_blocks);
  from_config(cfg, "bias_mlp_width", t.bias_mlp_width);

  cmd->add_option("--config", "JSON config file; flags override its fields")
      ->check(CLI::ExistingFile);
  cmd->add_option("--data", t.data_dirs, "dataset directories (repeatable)");
  cmd->add_option("--out", t.out, "output directory");
  cmd->add_option("--dtype", t.dtype, "f32 | f64")->check(CLI::IsMember({"f32", "f64"}));
  cmd->add_option("--mode", t.mode, "all2all | vanilla | all2all-subset");
  cmd->add_option("--subset-stride", t.subset_stride, "snapshot stride for all2all-subset");
  cmd->add_option("--batch", t.batch);
  cmd->add_option("--epochs", t.epochs);
  cmd->add_option("--max-steps", t.max_steps, "cap on total optimizer steps");
  cmd->add_option("--lr,--lr-backbone", t.lr, "max lr (backbone group)");
  cmd->add_option("--lr-embed", t.lr_embed, "embedding/recovery group lr");
  cmd->add_option("--lr-norm", t.lr_norm, "time-norm group lr");
  cmd->add_option("--weight-decay", t.weight_decay);
  cmd->add_option("--warmup-frac", t.warmup_frac, "linear warmup fraction of total steps");
  cmd->add_option("--val-traj", t.val_traj, "validation trajectories per dataset (from the end)");
  cmd->add_option("--train-size", t.train_size, "use only the first k trajectories");
  cmd->add_option("--seed", t.seed);
  cmd->add_option("--log-every", t.log_every);
  cmd->add_flag("--resume", t.resume, "resume from --out");
  cmd->add_option("--embed-dim", t.embed_dim);
  cmd->add_option("--window", t.window);
  cmd->add_option("--patch", t.patch);
  cmd->add_option("--levels", t.levels);
  cmd->add_option("--blocks", t.blocks);
  cmd->add_option("--heads", t.heads);
  cmd->add_option("--convnext-blocks", t.convnext_blocks);
  cmd->add_option("--bias-mlp-width", t.bias_mlp_width);
}

json train_resolved(const TrainCli& t, const std::string& command) {
  return json{{"command", command},
              {"data", t.data_dirs},
              {"out", t.out},
              {"dtype", t.dtype},
              {"mode", t.mode},
              {"subset_stride", t.subset_stride},
              {"batch", t.batch},
              {"epochs", t.epochs},
              {"max_steps", t.max_steps},
              {"lr", t.lr},
              {"lr_embed", t.lr_embed},
              {"lr_norm", t.lr_norm},
              {"weight_decay", t.weight_decay},
              {"warmup_frac", t.warmup_frac},
              {"val_traj", t.val_traj},
              {"train_size", t.train_size},
              {"seed", t.seed},
              {"log_every", t.log_every},
              {"embed_dim", t.embed_dim},
              {"window", t.window},
              {"patch", t.patch},
              {"levels", t.levels},
              {"blocks", t.blocks},
              {"heads", t.heads},
              {"convnext_blocks", t.convnext_blocks},
              {"bias_mlp_width", t.bias_mlp_width},
              {"from", t.from_checkpoint},
              {"replace_embedding", t.replace_embedding},
              {"frozen_latent", t.frozen_latent},
              {"from_scratch", t.from_scratch}};
}

struct LoadedTasks {
  std::vector<TrajectoryDataset> datasets;
  std::vector<TaskBinding> bindings;
  int64_t grid = 0;
  int64_t model_channels = 0;  // 4 when every task fits the fluid layout
};

LoadedTasks load_tasks(const TrainCli& t) {
  if (t.data_dirs.empty()) throw ValueError("need at least one --data dataset");
  LoadedTasks out;
  out.datasets.reserve(t.data_dirs.size());
  bool all_fluid = true;
  for (const auto& dir : t.data_dirs) {
    out.datasets.push_back(read_dataset(dir));
    const auto& ds = out.datasets.back();
    if (out.grid == 0) out.grid = ds.grid.n;
    if (ds.grid.n != out.grid) throw ValueError("datasets disagree on grid size");
    all_fluid = all_fluid && task_for(ds.pde).fits_fluid_layout;
  }
  const int64_t native = int64_t(task_for(out.datasets[0].pde).channels.size());
  out.model_channels = all_fluid ? kFluidLayoutChannels : native;
  for (auto& ds : out.datasets) {
    TaskBinding b;
    b.data = &ds;
    b.spec = task_for(ds.pde);
    const int64_t n = ds.n_trajectories;
    int64_t val = t.val_traj >= 0 ? t.val_traj : std::max<int64_t>(1, n / 10);
    val = std::min(val, n - 1);
    b.val_begin = n - val;
    b.val_end = n;
    b.train_begin = 0;
    b.train_end = t.train_size >= 0 ? std::min(t.train_size, n - val) : n - val;
    if (b.train_end <= b.train_begin) throw ValueError("empty training slice for " + ds.name);
    out.bindings.push_back(b);
  }
  return out;
}

TrainOptions to_train_options(const TrainCli& t) {
  TrainOptions opt;
  opt.mode = sampler_mode_from(t.mode);
  opt.subset_stride = t.subset_stride;
  opt.batch = t.batch;
  opt.epochs = t.epochs;
  opt.max_steps = t.max_steps;
  opt.lr = t.lr;
  opt.lr_embed = t.lr_embed;
  opt.lr_norm = t.lr_norm;
  opt.weight_decay = t.weight_decay;
  opt.warmup_frac = t.warmup_frac;
  opt.frozen_latent = t.frozen_latent;
  opt.seed = t.seed;
  opt.log_every = t.log_every;
  return opt;
}

ScotConfig model_config_from(const TrainCli& t, int64_t grid, int64_t channels) {
  ScotConfig cfg;
  cfg.grid_size = grid;
  cfg.patch_size = t.patch;
  cfg.window = t.window;
  cfg.embed_dim = t.embed_dim;
  cfg.levels = t.levels;
  cfg.blocks = t.blocks;
  cfg.heads = t.heads;
  cfg.convnext_blocks = t.convnext_blocks;
  cfg.bias_mlp_width = t.bias_mlp_width;
  cfg.in_channels = channels;
  cfg.out_channels = channels;
  cfg.validate();
  return cfg;
}

template <class T>
int run_pretrain(const TrainCli& t) {
  auto tasks = load_tasks(t);
  ScotConfig cfg = model_config_from(t, tasks.grid, tasks.model_channels);
  Trainer<T> trainer(Scot<T>(cfg, t.seed), tasks.bindings, to_train_options(t));
  if (t.resume && trainer.resume(t.out)) log_line("resumed from " + t.out);
  log_line("pretraining: " + std::to_string(trainer.pairs_per_epoch()) + " pairs/epoch, " +
           std::to_string(trainer.total_steps()) + " total steps");
  trainer.run(t.out);
  log_line("best validation loss " + std::to_string(trainer.best_val()) + " at epoch " +
           std::to_string(trainer.best_epoch()));
  return 0;
}

template <class T>
int run_finetune(const TrainCli& t) {
  auto tasks = load_tasks(t);
  if (tasks.bindings.size() != 1) throw ValueError("finetune expects exactly one dataset");
  const auto& spec = tasks.bindings[0].spec;
  const int64_t native = int64_t(spec.channels.size());

  ScotParams<T> params = [&]() {
    if (t.from_scratch)
      return ScotParams<T>(model_config_from(t, tasks.grid, tasks.model_channels), t.seed);
    if (t.from_checkpoint.empty()) throw ValueError("finetune needs --from or --from-scratch");
    ScotParams<T> pre = load_checkpoint<T>(t.from_checkpoint);
    ScotConfig cfg = pre.config();
    const bool fits_layout =
        spec.fits_fluid_layout && cfg.in_channels == kFluidLayoutChannels;
    bool replace = false;
    if (!fits_layout && cfg.in_channels != native) {
      if (!t.replace_embedding)
        throw ValueError("task channels (" + std::to_string(native) +
                         ") differ from checkpoint (" + std::to_string(cfg.in_channels) +
                         "); pass --replace-embedding");
      cfg.in_channels = native;
      cfg.out_channels = native;
      replace = true;
    }
    return transfer_params(pre, cfg, t.seed, replace);
  }();

  Trainer<T> trainer(Scot<T>(std::move(params)), tasks.bindings, to_train_options(t));
  if (t.resume && trainer.resume(t.out)) log_line("resumed from " + t.out);
  log_line("finetuning: " + std::to_string(trainer.pairs_per_epoch()) + " pairs/epoch, " +
           std::to_string(trainer.total_steps()) + " total steps");
  trainer.run(t.out);
  log_line("best validation loss " + std::to_string(trainer.best_val()) + " at epoch " +
           std::to_string(trainer.best_epoch()));
  return 0;
}

// ------------------------------------------------------------- evaluate

struct EvalCli {
  std::string checkpoint;
  std::string data;
  std::string out;
  std::string dtype = "f32";
  std::string rollout = "direct";
  double target_time = -1;
  int64_t resample_to = -1;
  double noise_nsr = 0;
  uint64_t noise_seed = 0;
  int64_t test_begin = 0;
  int64_t test_end = -1;
  int64_t n_train = -1;
  std::string model_id = "scot";
  std::string scaling_out;  // append (n_train, median) to this csv
  int64_t histogram_bins = 0;
  int64_t traj = -1;  // rollout command: single trajectory
};

template <class T>
int run_evaluate(const EvalCli& e, bool timeline_mode) {
  if (e.checkpoint.empty() || e.data.empty() || e.out.empty())
    throw ValueError("evaluate needs --checkpoint, --data and --out");
  auto ds = read_dataset(e.data);
  Scot<T> model(load_checkpoint<T>(e.checkpoint));
  Evaluator<T> ev(model, ds);

  EvaluateOptions opt;
  opt.schedule = RolloutSchedule::parse(e.rollout);
  opt.target_time = e.target_time;
  opt.resample_to = e.resample_to;
  opt.noise_nsr = e.noise_nsr;
  opt.noise_seed = e.noise_seed;
  opt.sample_begin = e.test_begin;
  opt.sample_end = e.test_end;
  opt.model_id = e.model_id;
  opt.n_train = e.n_train;
  if (timeline_mode && e.traj >= 0) {
    opt.sample_begin = e.traj;
    opt.sample_end = e.traj + 1;
  }

  fs::create_directories(e.out);
  if (timeline_mode) {
    auto curve = ev.error_over_time(opt);
    std::ofstream f(fs::path(e.out) / "timeline.csv");
    f << std::setprecision(17) << "t,error\n";
    for (auto [tt, err] : curve) f << tt << "," << err << "\n";
    log_line("timeline with " + std::to_string(curve.size()) + " points -> " + e.out);
    return 0;
  }

  ErrorRecord rec = ev.evaluate(opt);
  {
    std::ofstream f(fs::path(e.out) / "errors.csv");
    f << std::setprecision(17) << "sample_id,error\n";
    for (size_t i = 0; i < rec.per_sample.size(); ++i)
      f << rec.sample_ids[i] << "," << rec.per_sample[i] << "\n";
  }
  json record{{"task", rec.task},
              {"model_id", rec.model_id},
              {"median_rel_l1", rec.median},
              {"n_samples", rec.n_samples},
              {"n_flagged", rec.flagged.size()},
              {"flagged", rec.flagged},
              {"schedule", rec.schedule},
              {"nsr", rec.nsr},
              {"n_train", rec.n_train}};
  detail::write_file(fs::path(e.out) / "record.json", record.dump(2) + "\n");
  if (e.histogram_bins > 0) {
    auto h = error_histogram(rec, e.histogram_bins);
    std::ofstream f(fs::path(e.out) / "histogram.csv");
    f << std::setprecision(17) << "bin_lo,bin_hi,count\n";
    for (size_t b = 0; b < h.counts.size(); ++b)
      f << h.edges[b] << "," << h.edges[b + 1] << "," << h.counts[b] << "\n";
  }
  if (!e.scaling_out.empty()) {
    if (e.n_train < 0) throw ValueError("--scaling-out needs --n-train");
    const bool fresh = !fs::exists(e.scaling_out);
    std::ofstream f(e.scaling_out, std::ios::app);
    f << std::setprecision(17);
    if (fresh) f << "n_samples,median_error\n";
    f << e.n_train << "," << rec.median << "\n";
  }
  log_line("median relative L1 = " + std::to_string(rec.median) + " over " +
           std::to_string(rec.per_sample.size()) + " samples (" +
           std::to_string(rec.flagged.size()) + " flagged)");
  return 0;
}

// ----------------------------------------------------------- fit-scaling

struct FitCli {
  std::string model_curve;
  std::string ref_curve;
  std::string out;
  int64_t s_eg = 1024;
  int64_t s_ag = 128;
};

int run_fit_scaling(const FitCli& f) {
  if (f.model_curve.empty() || f.out.empty())
    throw ValueError("fit-scaling needs --model-curve and --out");
  ScalingCurve model = read_scaling_csv(f.model_curve);
  ScalingCurve ref = f.ref_curve.empty() ? model : read_scaling_csv(f.ref_curve);

  fs::create_directories(f.out);
  json fit_doc;
  const auto plaw = fit_power_law(model);
  fit_doc["power_law"] = {{"C", plaw.c}, {"alpha", plaw.alpha}, {"residual", plaw.residual}};
  if (model.points.size() >= 4) {
    const auto bi = fit_biphasic(model);
    fit_doc["biphasic"] = {{"M_pt", bi.m_pt},
                           {"alpha_warmup", bi.alpha_warmup},
                           {"alpha_learning", bi.alpha_learning},
                           {"C_warmup", bi.c_warmup},
                           {"C_learning", bi.c_learning},
                           {"residual", bi.residual}};
  }
  detail::write_file(fs::path(f.out) / "fit.json", fit_doc.dump(2) + "\n");

  const auto gains = eg_ag(model, ref, f.s_eg, f.s_ag);
  std::ofstream eg(fs::path(f.out) / "egag.csv");
  eg << std::setprecision(17) << "S_eg,S_ag,EG,AG,eg_lower_bound\n";
  eg << f.s_eg << "," << f.s_ag << "," << gains.eg << "," << gains.ag << ","
     << (gains.eg_lower_bound ? 1 : 0) << "\n";
  log_line("EG = " + std::to_string(gains.eg) + ", AG = " + std::to_string(gains.ag));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scotlab: operator-transformer lab for PDE surrogates"};
  app.require_subcommand(1);

  json cfg_file;
  try {
    cfg_file = load_config_file(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "[scotlab] config error: %s\n", e.what());
    return 2;
  }

  GenerateCli g;
  g.cfg.seed = default_seed();
  from_config(cfg_file, "pde", g.cfg.pde);
  from_config(cfg_file, "ic", g.cfg.ic);
  from_config(cfg_file, "n_traj", g.cfg.n_traj);
  from_config(cfg_file, "grid", g.cfg.grid);
  from_config(cfg_file, "snapshots", g.cfg.snapshots);
  from_config(cfg_file, "t_final", g.cfg.t_final);
  from_config(cfg_file, "seed", g.cfg.seed);
  from_config(cfg_file, "workers", g.cfg.workers);
  from_config(cfg_file, "name", g.cfg.name);
  from_config(cfg_file, "out", g.out);
  auto* generate = app.add_subcommand("generate", "generate a trajectory dataset");
  generate->add_option("--config", "JSON config file")->check(CLI::ExistingFile);
  generate->add_option("--pde", g.cfg.pde,
                       "ns | ns-tracer | fns | euler | wave | ace | poisson | helmholtz");
  generate->add_option("--ic", g.cfg.ic, "initial-condition kind");
  generate->add_option("--n", g.cfg.n_traj, "number of trajectories");
  generate->add_option("--grid", g.cfg.grid, "grid points per side");
  generate->add_option("--snapshots", g.cfg.snapshots);
  generate->add_option("--t-final", g.cfg.t_final);
  generate->add_option("--seed", g.cfg.seed);
  generate->add_option("--workers", g.cfg.workers);
  generate->add_option("--name", g.cfg.name);
  generate->add_option("--out", g.out, "dataset directory");

  TrainCli pre;
  pre.seed = default_seed();
  auto* pretrain = app.add_subcommand("pretrain", "pretrain on a task mixture");
  add_train_options(pretrain, pre, cfg_file);

  TrainCli fin;
  fin.seed = default_seed();
  fin.lr = 5e-5;  // finetuning defaults: backbone 5e-5, embed/norm 5e-4
  fin.lr_embed = 5e-4;
  fin.lr_norm = 5e-4;
  auto* finetune = app.add_subcommand("finetune", "finetune a pretrained checkpoint");
  add_train_options(finetune, fin, cfg_file);
  from_config(cfg_file, "from", fin.from_checkpoint);
  finetune->add_option("--from", fin.from_checkpoint, "pretrained checkpoint directory");
  finetune->add_flag("--replace-embedding", fin.replace_embedding,
                     "re-initialize embedding/recovery for a new channel layout");
  finetune->add_flag("--frozen-latent", fin.frozen_latent, "freeze the backbone");
  finetune->add_flag("--from-scratch", fin.from_scratch,
                     "train the same architecture without transfer");

  EvalCli ev;
  ev.noise_seed = default_seed();
  from_config(cfg_file, "checkpoint", ev.checkpoint);
  from_config(cfg_file, "data", ev.data);
  from_config(cfg_file, "out", ev.out);
  from_config(cfg_file, "rollout", ev.rollout);
  from_config(cfg_file, "noise_nsr", ev.noise_nsr);
  auto add_eval_options = [&](CLI::App* cmd) {
    cmd->add_option("--config", "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--checkpoint", ev.checkpoint, "model checkpoint directory");
    cmd->add_option("--data", ev.data, "dataset directory");
    cmd->add_option("--out", ev.out, "output directory");
    cmd->add_option("--dtype", ev.dtype)->check(CLI::IsMember({"f32", "f64"}));
    cmd->add_option("--rollout", ev.rollout, "direct | homogeneous:K | explicit:t1,...");
    cmd->add_option("--target-time", ev.target_time, "defaults to the final snapshot");
    cmd->add_option("--resample", ev.resample_to, "evaluate at this grid resolution");
    cmd->add_option("--noise-nsr", ev.noise_nsr, "input noise-to-signal ratio");
    cmd->add_option("--noise-seed", ev.noise_seed);
    cmd->add_option("--test-begin", ev.test_begin);
    cmd->add_option("--test-end", ev.test_end);
    cmd->add_option("--n-train", ev.n_train, "scaling-curve annotation");
    cmd->add_option("--model-id", ev.model_id);
  };
  auto* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint on a test dataset");
  add_eval_options(evaluate);
  evaluate->add_option("--scaling-out", ev.scaling_out, "append (n_train, median) to this CSV");
  evaluate->add_option("--histogram-bins", ev.histogram_bins, "also write histogram.csv");

  auto* rollout = app.add_subcommand("rollout", "error-over-time rollout study");
  add_eval_options(rollout);
  rollout->add_option("--traj", ev.traj, "restrict to a single trajectory");

  FitCli fit;
  from_config(cfg_file, "model_curve", fit.model_curve);
  from_config(cfg_file, "ref_curve", fit.ref_curve);
  from_config(cfg_file, "s_eg", fit.s_eg);
  from_config(cfg_file, "s_ag", fit.s_ag);
  auto* fit_scaling = app.add_subcommand("fit-scaling", "power-law / biphasic fits and EG/AG");
  fit_scaling->add_option("--config", "JSON config file")->check(CLI::ExistingFile);
  fit_scaling->add_option("--model-curve", fit.model_curve, "scaling.csv of the model");
  fit_scaling->add_option("--ref-curve", fit.ref_curve, "reference scaling.csv (default: self)");
  fit_scaling->add_option("--s-eg", fit.s_eg);
  fit_scaling->add_option("--s-ag", fit.s_ag);
  fit_scaling->add_option("--out", fit.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (*generate) return cmd_generate(g);
    if (*pretrain) {
      if (pre.out.empty()) throw ValueError("pretrain needs --out");
      write_resolved_config(train_resolved(pre, "pretrain"), pre.out);
      return pre.dtype == "f64" ? run_pretrain<double>(pre) : run_pretrain<float>(pre);
    }
    if (*finetune) {
      if (fin.out.empty()) throw ValueError("finetune needs --out");
      write_resolved_config(train_resolved(fin, "finetune"), fin.out);
      return fin.dtype == "f64" ? run_finetune<double>(fin) : run_finetune<float>(fin);
    }
    if (*evaluate || *rollout) {
      const bool timeline = bool(*rollout);
      if (ev.out.empty()) throw ValueError("need --out");
      json resolved{{"command", timeline ? "rollout" : "evaluate"},
                    {"checkpoint", ev.checkpoint},
                    {"data", ev.data},
                    {"out", ev.out},
                    {"dtype", ev.dtype},
                    {"rollout", ev.rollout},
                    {"target_time", ev.target_time},
                    {"resample", ev.resample_to},
                    {"noise_nsr", ev.noise_nsr},
                    {"noise_seed", ev.noise_seed},
                    {"test_begin", ev.test_begin},
                    {"test_end", ev.test_end},
                    {"n_train", ev.n_train},
                    {"model_id", ev.model_id}};
      write_resolved_config(resolved, ev.out);
      return ev.dtype == "f64" ? run_evaluate<double>(ev, timeline)
                               : run_evaluate<float>(ev, timeline);
    }
    if (*fit_scaling) {
      if (fit.out.empty()) throw ValueError("fit-scaling needs --out");
      json resolved{{"command", "fit-scaling"}, {"model_curve", fit.model_curve},
                    {"ref_curve", fit.ref_curve}, {"s_eg", fit.s_eg},
                    {"s_ag", fit.s_ag},           {"out", fit.out}};
      write_resolved_config(resolved, fit.out);
      return run_fit_scaling(fit);
    }
  } catch (const ValueError& e) {
    std::fprintf(stderr, "[scotlab] config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "[scotlab] error: %s\n", e.what());
    return 1;
  }
  return 0;
}
