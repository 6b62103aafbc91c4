#include <catch2/catch_amalgamated.hpp>

#include "scotlab/pde/generate.hpp"
#include "scotlab/train/trainer.hpp"

using namespace scotlab;

TEST_CASE("all2all enumeration matches brute force for K = 0..14") {
  for (int64_t K = 0; K <= 14; ++K) {
    std::vector<double> times;
    for (int64_t i = 0; i <= K; ++i) times.push_back(double(i) * 0.1);
    auto pairs = enumerate_all2all(K, times);
    CHECK(int64_t(pairs.size()) == (K + 1) * (K + 2) / 2);
    std::set<SnapshotPair> brute;
    for (int64_t k = 0; k <= K; ++k)
      for (int64_t kbar = k; kbar <= K; ++kbar) brute.insert({k, kbar});
    CHECK(std::set<SnapshotPair>(pairs.begin(), pairs.end()) == brute);
    // semigroup bookkeeping: lead time == target time - source time, and
    // each of the K+1 identity pairs is present
    int64_t identity = 0;
    for (auto [k, kbar] : pairs) {
      CHECK(times[size_t(kbar)] - times[size_t(k)] >= 0.0);
      if (k == kbar) ++identity;
    }
    CHECK(identity == K + 1);
  }
}

TEST_CASE("all2all of K=10 yields 66 pairs, K=2 the exact six") {
  std::vector<double> t11;
  for (int64_t i = 0; i <= 10; ++i) t11.push_back(double(i));
  CHECK(enumerate_all2all(10, t11).size() == 66);

  std::vector<double> t3{0, 1, 2};
  auto p = enumerate_all2all(2, t3);
  const std::vector<SnapshotPair> expect{{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};
  CHECK(p == expect);

  std::vector<double> t1{0.0};
  CHECK(enumerate_all2all(0, t1) == std::vector<SnapshotPair>{{0, 0}});
}

TEST_CASE("unsorted times are rejected") {
  std::vector<double> bad{0.0, 0.2, 0.1};
  CHECK_THROWS_AS(enumerate_all2all(2, bad), ValueError);
  CHECK_THROWS_AS(enumerate_vanilla(2, bad), ValueError);
}

TEST_CASE("vanilla pairs anchor at the initial snapshot") {
  std::vector<double> t11;
  for (int64_t i = 0; i <= 10; ++i) t11.push_back(double(i));
  auto v = enumerate_vanilla(10, t11);
  CHECK(v.size() == 11);
  auto a = enumerate_all2all(10, t11);
  std::set<SnapshotPair> all(a.begin(), a.end());
  for (auto& p : v) {
    CHECK(p.first == 0);
    CHECK(all.count(p) == 1);
  }
  std::vector<double> t1{0.0};
  CHECK(enumerate_vanilla(0, t1).size() == 1);
}

TEST_CASE("snapshot subsets contain the endpoints") {
  std::vector<double> t15;
  for (int64_t i = 0; i <= 14; ++i) t15.push_back(double(i));
  CHECK(select_subset(t15, 7) == std::vector<int64_t>{0, 7, 14});
  CHECK(select_subset(t15, 2).size() == 8);
  CHECK(enumerate_subset_all2all(t15, 2).size() == 36);
  CHECK(enumerate_subset_all2all(t15, 14).size() == 3);
  CHECK(enumerate_subset_all2all(t15, 7).size() == 6);
  CHECK(select_subset(t15, 1).size() == 15);
  // stride that does not divide K still ends at K
  auto s4 = select_subset(t15, 4);
  CHECK(s4 == std::vector<int64_t>{0, 4, 8, 12, 14});
}

TEST_CASE("relative L1 loss basics") {
  auto target = Tensor<double>::ones({2, 3, 4, 4});
  auto mask = Tensor<double>::ones({3});

  CHECK(relative_l1_loss(target, target, mask).item() == 0.0);

  auto zero = Tensor<double>::zeros({2, 3, 4, 4});
  CHECK(relative_l1_loss(zero, target, mask).item() == Catch::Approx(1.0).margin(1e-9));

  // masked channel with garbage does not change the loss
  CounterRng rng(3);
  auto pred = zero.clone();
  auto m2 = Tensor<double>::from({3}, {1, 1, 0});
  const double before = relative_l1_loss(pred, target, m2).item();
  for (int64_t i = 0; i < 2; ++i)
    for (int64_t j = 0; j < 16; ++j) pred[(i * 3 + 2) * 16 + j] = rng.uniform(-50, 50);
  const double after = relative_l1_loss(pred, target, m2).item();
  CHECK(before == after);

  // all channels masked is an error
  auto m0 = Tensor<double>::zeros({3});
  CHECK_THROWS_AS(relative_l1_loss(pred, target, m0), ValueError);
}

TEST_CASE("relative L1 loss is scale-aware") {
  CounterRng rng(8);
  Tensor<double> pred({1, 2, 8, 8}), target({1, 2, 8, 8});
  for (int64_t i = 0; i < pred.size(); ++i) {
    pred[i] = rng.uniform(-1, 1);
    target[i] = rng.uniform(0.5, 1.5);
  }
  auto mask = Tensor<double>::ones({2});
  const double base = relative_l1_loss(pred, target, mask).item();
  for (double lambda : {3.0, 0.125}) {
    auto ps = detail::ew_unary(pred, [lambda](double x) { return lambda * x; });
    auto ts = detail::ew_unary(target, [lambda](double x) { return lambda * x; });
    CHECK(std::abs(relative_l1_loss(ps, ts, mask).item() - base) < 1e-8);
  }
}

TEST_CASE("loss gradient matches finite differences") {
  CounterRng rng(21);
  Tensor<double> pred({1, 2, 4, 4}), target({1, 2, 4, 4});
  for (int64_t i = 0; i < pred.size(); ++i) {
    pred[i] = rng.uniform(-1, 1);
    target[i] = rng.uniform(0.5, 1.5);  // away from |.| kinks
  }
  auto mask = Tensor<double>::from({2}, {1, 0});
  Tape<double> tape;
  tape.watch(pred);
  auto loss = relative_l1_loss(pred, target, mask);
  tape.backward(loss);
  auto g = tape.grad(pred);
  pred.tape = nullptr;
  pred.node = -1;
  for (int64_t i : {int64_t(0), int64_t(7), int64_t(20), int64_t(31)}) {
    const double orig = pred[i];
    pred[i] = orig + 1e-6;
    const double fp = relative_l1_loss(pred, target, mask).item();
    pred[i] = orig - 1e-6;
    const double fm = relative_l1_loss(pred, target, mask).item();
    pred[i] = orig;
    const double fd = (fp - fm) / 2e-6;
    CHECK(std::abs(g[i] - fd) < 1e-5 * std::max(1.0, std::abs(fd)));
  }
}

namespace {

TrajectoryDataset make_dataset(const std::string& pde, const std::string& icname, int64_t n_traj,
                               int64_t grid, int64_t snaps, uint64_t seed, double t_final = 1.0) {
  GenerateConfig cfg;
  cfg.pde = pde;
  cfg.ic = icname;
  cfg.n_traj = n_traj;
  cfg.grid = grid;
  cfg.snapshots = snaps;
  cfg.seed = seed;
  cfg.t_final = t_final;
  auto trajs = generate_trajectories(cfg);
  namespace fs = std::filesystem;
  static int counter = 0;
  const fs::path dir =
      fs::temp_directory_path() / ("scotlab_train_ds_" + std::to_string(counter++));
  fs::remove_all(dir);
  write_dataset(trajs, dir, cfg.dataset_name(), dataset_boundary(cfg.pde));
  auto ds = read_dataset(dir);
  fs::remove_all(dir);
  return ds;
}

}  // namespace

TEST_CASE("two-task mixture counts 528 pairs per epoch") {
  auto ns = make_dataset("ns", "ns-pwc", 4, 16, 11, 1);
  auto euler = make_dataset("euler", "ce-rp", 4, 16, 11, 2);
  std::vector<TaskBinding> tasks{
      {&ns, task_for("ns"), 0, 4, 4, 4},
      {&euler, task_for("euler"), 0, 4, 4, 4},
  };
  Trainer<float> trainer(Scot<float>(ScotConfig::tiny(), 7), tasks, TrainOptions{});
  CHECK(trainer.pairs_per_epoch() == 528);  // 8 trajectories x 66
}

TEST_CASE("epoch permutation touches each pair exactly once") {
  std::vector<PairRef> pairs;
  for (int32_t t = 0; t < 3; ++t)
    for (int32_t k = 0; k < 10; ++k) pairs.push_back({0, t, k, k});
  auto perm = pairs;
  shuffle_epoch(perm, 42, 0);
  auto key = [](const PairRef& p) {
    return std::tuple<int32_t, int32_t, int32_t, int32_t>{p.task, p.traj, p.k, p.kbar};
  };
  std::multiset<std::tuple<int32_t, int32_t, int32_t, int32_t>> a, b;
  for (auto& p : pairs) a.insert(key(p));
  for (auto& p : perm) b.insert(key(p));
  CHECK(a == b);
  auto perm2 = pairs;
  shuffle_epoch(perm2, 42, 0);
  CHECK(std::equal(perm.begin(), perm.end(), perm2.begin(),
                   [&](const PairRef& x, const PairRef& y) { return key(x) == key(y); }));
}

TEST_CASE("zero backbone lr leaves the backbone bitwise unchanged") {
  auto ns = make_dataset("ns", "ns-pwc", 2, 16, 4, 3);
  std::vector<TaskBinding> tasks{{&ns, task_for("ns"), 0, 2, 0, 0}};
  TrainOptions opt;
  opt.lr = 0.0;
  opt.lr_embed = 1e-3;
  opt.lr_norm = 1e-3;
  opt.epochs = 1;
  opt.batch = 5;
  Scot<double> model(ScotConfig::tiny(), 11);
  auto before = std::make_unique<ScotParams<double>>(ScotParams<double>(ScotConfig::tiny(), 11));
  Trainer<double> trainer(std::move(model), tasks, opt);
  trainer.run();
  for (size_t i = 0; i < trainer.model().params().size(); ++i) {
    const auto& p = trainer.model().params().param(i);
    if (p.group == ParamGroup::Backbone)
      CHECK(bitwise_equal(p.value, before->param(i).value));
    else
      CHECK(!bitwise_equal(p.value, before->param(i).value));
  }
}

TEST_CASE("frozen latent updates only embed/recover and norm groups") {
  auto ns = make_dataset("ns", "ns-pwc", 2, 16, 4, 4);
  std::vector<TaskBinding> tasks{{&ns, task_for("ns"), 0, 2, 0, 0}};
  TrainOptions opt;
  opt.frozen_latent = true;
  opt.lr = 5e-4;
  opt.lr_embed = 5e-3;
  opt.lr_norm = 5e-3;
  opt.epochs = 1;
  opt.batch = 5;
  Scot<double> model(ScotConfig::tiny(), 13);
  ScotParams<double> before(ScotConfig::tiny(), 13);
  Trainer<double> trainer(std::move(model), tasks, opt);
  trainer.run();
  for (size_t i = 0; i < trainer.model().params().size(); ++i) {
    const auto& p = trainer.model().params().param(i);
    if (p.group == ParamGroup::Backbone)
      CHECK(bitwise_equal(p.value, before.param(i).value));
    else
      CHECK(!bitwise_equal(p.value, before.param(i).value));
  }
}

TEST_CASE("training reduces the loss on a tiny overfit run") {
  auto ns = make_dataset("ns", "ns-pwc", 1, 16, 5, 5);
  std::vector<TaskBinding> tasks{{&ns, task_for("ns"), 0, 1, 0, 0}};
  TrainOptions opt;
  opt.lr = 2e-3;
  opt.epochs = 12;
  opt.batch = 8;
  opt.log_every = 1;
  opt.seed = 1;
  Trainer<float> trainer(Scot<float>(ScotConfig::tiny(), 17), tasks, opt);
  trainer.run();
  const auto& h = trainer.history();
  REQUIRE(h.size() > 10);
  CHECK(h.back().train_loss < h.front().train_loss);
}

TEST_CASE("validation checkpoint keeps the argmin epoch") {
  auto ns = make_dataset("ns", "ns-pwc", 3, 16, 4, 6);
  std::vector<TaskBinding> tasks{{&ns, task_for("ns"), 0, 2, 2, 3}};
  TrainOptions opt;
  opt.lr = 1e-3;
  opt.epochs = 4;
  opt.batch = 10;
  Trainer<float> trainer(Scot<float>(ScotConfig::tiny(), 19), tasks, opt);
  trainer.run();
  CHECK(trainer.best_epoch() >= 0);
  CHECK(std::isfinite(trainer.best_val()));
  // the retained parameters reproduce the best validation loss
  Scot<float> best_model(ScotParams<float>(trainer.best_params().config(), 0));
  for (size_t i = 0; i < trainer.best_params().size(); ++i)
    std::copy(trainer.best_params().param(i).value.data(),
              trainer.best_params().param(i).value.data() +
                  trainer.best_params().param(i).value.size(),
              best_model.params().param(i).value.data());
  Trainer<float> probe(std::move(best_model), tasks, opt);
  CHECK(probe.evaluate_pairs(probe.val_pairs()) == Catch::Approx(trainer.best_val()));
}

TEST_CASE("resume reproduces the uninterrupted run bitwise at f64") {
  auto ns = make_dataset("ns", "ns-pwc", 2, 16, 4, 7);
  std::vector<TaskBinding> tasks{{&ns, task_for("ns"), 0, 2, 0, 0}};
  TrainOptions opt;
  opt.lr = 1e-3;
  opt.epochs = 4;
  opt.batch = 7;
  opt.seed = 3;

  namespace fs = std::filesystem;
  const fs::path full_dir = fs::temp_directory_path() / "scotlab_resume_full";
  const fs::path part_dir = fs::temp_directory_path() / "scotlab_resume_part";
  fs::remove_all(full_dir);
  fs::remove_all(part_dir);

  Trainer<double> full(Scot<double>(ScotConfig::tiny(), 23), tasks, opt);
  full.run(full_dir);

  Trainer<double> a(Scot<double>(ScotConfig::tiny(), 23), tasks, opt);
  a.run(part_dir, /*stop_after_epoch=*/1);
  Trainer<double> b(Scot<double>(ScotConfig::tiny(), 23), tasks, opt);
  REQUIRE(b.resume(part_dir));
  b.run(part_dir);

  for (size_t i = 0; i < full.model().params().size(); ++i)
    CHECK(bitwise_equal(full.model().params().param(i).value,
                        b.model().params().param(i).value));

  auto read_bytes = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  CHECK(read_bytes(full_dir / "last" / "weights.bin") ==
        read_bytes(part_dir / "last" / "weights.bin"));
  fs::remove_all(full_dir);
  fs::remove_all(part_dir);
}

TEST_CASE("transfer: same channels copies everything, replace re-draws the exact set") {
  ScotConfig cfg = ScotConfig::tiny();
  ScotParams<double> pre(cfg, 31);
  // same-channel transfer: every parameter equals the pretrained value
  auto same = transfer_params(pre, cfg, 99, /*replace_embedding=*/false);
  for (size_t i = 0; i < same.size(); ++i)
    CHECK(bitwise_equal(same.param(i).value, pre.param(i).value));

  // replaced-embedding transfer to a different channel count
  ScotConfig cfg3 = cfg;
  cfg3.in_channels = 3;
  cfg3.out_channels = 3;
  auto moved = transfer_params(pre, cfg3, 99, /*replace_embedding=*/true);
  ScotParams<double> fresh(cfg3, 99);
  const auto& replaced = replaced_embedding_params();
  for (size_t i = 0; i < moved.size(); ++i) {
    const auto& name = moved.param(i).name;
    const bool is_replaced = std::find(replaced.begin(), replaced.end(), name) != replaced.end();
    if (is_replaced)
      CHECK(bitwise_equal(moved.param(i).value, fresh.param(i).value));
    else
      CHECK(bitwise_equal(moved.param(i).value, pre.at(name)));
  }

  // channel mismatch without the flag is an error that names the issue
  try {
    transfer_params(pre, cfg3, 99, /*replace_embedding=*/false);
    FAIL("expected ValueError");
  } catch (const ValueError& e) {
    CHECK(std::string(e.what()).find("replace_embedding") != std::string::npos);
  }
}

TEST_CASE("steady tasks contribute exactly one unit-lead pair") {
  auto ds = make_dataset("poisson", "poisson-gauss", 3, 16, 2, 8);
  std::vector<TaskBinding> tasks{{&ds, task_for("poisson"), 0, 3, 0, 0}};
  ScotConfig cfg = ScotConfig::tiny();
  Trainer<float> trainer(Scot<float>(cfg, 37), tasks, TrainOptions{});
  CHECK(trainer.pairs_per_epoch() == 3);  // one pair per trajectory
  BatchBuilder<float> builder(tasks, cfg.in_channels, cfg.grid_size);
  auto pairs = builder.build_pairs(SamplerMode::All2All, 1, true);
  auto batch = builder.assemble(pairs);
  for (double lead : batch.lead) CHECK(lead == 1.0);
  // poisson sits in layout slot 0, other slots masked
  CHECK(batch.mask[0] == 1.0f);
  CHECK(batch.mask[1] == 0.0f);
}

TEST_CASE("mixture with incompatible channel layouts is rejected") {
  auto ns = make_dataset("ns", "ns-pwc", 1, 16, 3, 9);
  auto wave = make_dataset("wave", "wave-gauss-source", 1, 16, 3, 10);
  std::vector<TaskBinding> tasks{{&ns, task_for("ns"), 0, 1, 0, 0},
                                 {&wave, task_for("wave"), 0, 1, 0, 0}};
  CHECK_THROWS_AS(BatchBuilder<float>(tasks, 4, 16), ValueError);
}
