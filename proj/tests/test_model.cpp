#include <catch2/catch_amalgamated.hpp>

#include "scotlab/model/checkpoint.hpp"
#include "scotlab/model/scot.hpp"
#include "testutil.hpp"

using namespace scotlab;
using testutil::random_tensor;

namespace {

Tensor<double> random_field(const ScotConfig& c, uint64_t seed) {
  CounterRng rng(seed);
  Tensor<double> a({c.in_channels, c.grid_size, c.grid_size});
  for (int64_t i = 0; i < a.size(); ++i) a[i] = rng.uniform(-1, 1);
  return a;
}

double max_abs_diff(const Tensor<double>& a, const Tensor<double>& b) {
  double m = 0;
  for (int64_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("patch embedding reference oracle and one-hot column") {
  ScotConfig c = ScotConfig::tiny();
  Scot<double> model(c, 42);
  auto& P = model.params();
  const int64_t Pn = c.tokens_per_side(), p = c.patch_size, C = c.embed_dim;
  const double t = 0.37;

  // one-hot input: channel k=1, pixel (u,v)=(1,2) of patch (jy,jx)=(2,3)
  Tensor<double> a = Tensor<double>::zeros({c.in_channels, c.grid_size, c.grid_size});
  const int64_t jy = 2, jx = 3, k = 1, u = 1, v = 2;
  a[(k * c.grid_size + (jy * p + u)) * c.grid_size + (jx * p + v)] = 1.0;

  // reference: pre-norm token is one W_E column plus bias, then LN_t
  const auto& we = P.at("embed.w");
  const auto& be = P.at("embed.b");
  std::vector<double> prenorm(size_t(C), 0.0);
  for (int64_t i = 0; i < C; ++i)
    prenorm[size_t(i)] = be[i] + we[((i * c.in_channels + k) * p + u) * p + v];

  std::vector<double> expect(size_t(C), 0.0);
  {
    double mu = 0, var = 0;
    for (double x : prenorm) mu += x;
    mu /= double(C);
    for (double x : prenorm) var += (x - mu) * (x - mu);
    var /= double(C);
    for (int64_t i = 0; i < C; ++i) {
      const double xhat = (prenorm[size_t(i)] - mu) / std::sqrt(var + c.ln_eps);
      const double alpha = P.at("embed.norm.wa")[i] * t + P.at("embed.norm.ba")[i];
      const double beta = P.at("embed.norm.wb")[i] * t + P.at("embed.norm.bb")[i];
      expect[size_t(i)] = alpha * xhat + beta;
    }
  }

  Shape batched = {1, c.in_channels, c.grid_size, c.grid_size};
  auto tok = model.patch_embed(a.reshaped(batched), {t});
  REQUIRE(tok.shape() == Shape{1, Pn, Pn, C});
  for (int64_t i = 0; i < C; ++i)
    CHECK(tok[(jy * Pn + jx) * C + i] == Catch::Approx(expect[size_t(i)]).margin(1e-12));
}

TEST_CASE("patch count shape arithmetic") {
  ScotConfig c = ScotConfig::tiny();
  c.grid_size = 32;  // J=32, p=4 -> 8x8 = 64 tokens
  Scot<double> model(c, 1);
  auto tok = model.patch_embed(Tensor<double>::zeros({1, c.in_channels, 32, 32}), {0.5});
  CHECK(tok.shape() == Shape{1, 8, 8, c.embed_dim});
}

TEST_CASE("time layer norm: identity affine, constant token, statistics") {
  ScotConfig c = ScotConfig::tiny();
  Scot<double> model(c, 7);
  auto& P = model.params();
  const int64_t C = c.embed_dim;

  // identity affine (the init) at t=0 equals a plain layer norm
  CounterRng rng(3);
  Tensor<double> x({1, 5, C});
  for (int64_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(-2, 2);
  auto y = model.time_layer_norm(x, "embed.norm", {0.0});
  auto ref = standardize_lastdim(x, c.ln_eps);
  CHECK(max_abs_diff(y, ref) < 1e-12);

  // constant token: standardized part is 0, output equals beta(t)
  for (int64_t i = 0; i < C; ++i) {
    P.at("embed.norm.wb")[i] = 0.3;
    P.at("embed.norm.bb")[i] = -0.1;
  }
  auto cst = Tensor<double>::full({1, 2, C}, 3.25);
  const double t = 0.6;
  auto yc = model.time_layer_norm(cst, "embed.norm", {t});
  for (int64_t i = 0; i < yc.size(); ++i)
    CHECK(yc[i] == Catch::Approx(0.3 * t - 0.1).margin(1e-12));

  // pre-affine output is standardized on random tokens
  Tensor<double> big({1, 64, C});
  CounterRng rng2(9);
  for (int64_t i = 0; i < big.size(); ++i) big[i] = rng2.uniform(-3, 3);
  auto z = standardize_lastdim(big, c.ln_eps);
  for (int64_t row = 0; row < 64; ++row) {
    double mu = 0, var = 0;
    for (int64_t i = 0; i < C; ++i) mu += z[row * C + i];
    mu /= double(C);
    for (int64_t i = 0; i < C; ++i) var += (z[row * C + i] - mu) * (z[row * C + i] - mu);
    var /= double(C);
    CHECK(std::abs(mu) < 1e-6);
    CHECK(std::abs(var - 1.0) < 1e-4);
  }
}

TEST_CASE("relative position features and bias table") {
  auto [fx0, fy0] = rel_pos_features(0, 0);
  CHECK(fx0 == 0.0);
  CHECK(fy0 == 0.0);
  for (int64_t d = 1; d < 4; ++d) {
    auto [fp, unused1] = rel_pos_features(d, 0);
    auto [fm, unused2] = rel_pos_features(-d, 0);
    CHECK(fp == Catch::Approx(-fm));
    CHECK(fp == Catch::Approx(std::log1p(double(d))));
  }

  ScotConfig c = ScotConfig::tiny();
  c.window = 4;
  c.grid_size = 64;  // keep tiling valid: P=16, M*2^(L-1)=8
  Scot<double> model(c, 5);
  auto bias = model.position_bias("enc0.blk0.attn", c.heads[0]);
  CHECK(bias.shape() == Shape{c.heads[0], 16, 16});
}

TEST_CASE("wmsa: equal scores give uniform weights and the mean token") {
  ScotConfig c = ScotConfig::tiny();
  c.heads = {1, 1};
  Scot<double> model(c, 11);
  auto& P = model.params();
  const int64_t C = c.embed_dim, S = c.window * c.window;
  const std::string attn = "enc0.blk0.attn";
  // zero q/k projections and bias MLP output -> all scores equal
  for (auto name : {".wq", ".wk", ".bias.w2"})
    P.at(attn + name) = Tensor<double>::zeros(P.at(attn + name).shape());
  // value and output paths become the identity
  P.at(attn + ".wv") = Tensor<double>::zeros({C, C});
  P.at(attn + ".wo") = Tensor<double>::zeros({C, C});
  for (int64_t i = 0; i < C; ++i) {
    P.at(attn + ".wv")[i * C + i] = 1.0;
    P.at(attn + ".wo")[i * C + i] = 1.0;
  }
  P.at(attn + ".bv") = Tensor<double>::zeros({C});
  P.at(attn + ".bo") = Tensor<double>::zeros({C});

  CounterRng rng(13);
  Tensor<double> win({1, S, C});
  for (int64_t i = 0; i < win.size(); ++i) win[i] = rng.uniform(-1, 1);
  auto out = model.wmsa(win, attn, 1);
  for (int64_t j = 0; j < C; ++j) {
    double mean = 0;
    for (int64_t s = 0; s < S; ++s) mean += win[s * C + j];
    mean /= double(S);
    for (int64_t s = 0; s < S; ++s) CHECK(out[s * C + j] == Catch::Approx(mean).margin(1e-12));
  }
}

TEST_CASE("cyclic shift identities and membership") {
  ScotConfig c = ScotConfig::tiny();
  Scot<double> model(c, 1);
  CounterRng rng(2);
  Tensor<double> grid({1, 8, 8, 3});
  for (int64_t i = 0; i < grid.size(); ++i) grid[i] = rng.uniform(-1, 1);

  auto shifted = model.cyclic_shift(grid, 2);
  auto back = model.cyclic_shift(shifted, -2);
  CHECK(bitwise_equal(back, grid));

  // M=4: token at (0,0) moves to (2,2) under +M/2
  Tensor<double> probe = Tensor<double>::zeros({1, 8, 8, 1});
  probe[0] = 1.0;
  auto moved = model.cyclic_shift(probe, 2);
  CHECK(moved[(2 * 8 + 2) * 1] == 1.0);

  // P=8, M=4: after a -M/2 shift, tokens from four different original
  // windows share one window of the rolled grid
  auto window_of = [&](int64_t y, int64_t x) {
    const int64_t sy = (y - 2 + 8) % 8, sx = (x - 2 + 8) % 8;
    return std::pair<int64_t, int64_t>{sy / 4, sx / 4};
  };
  auto w22 = window_of(2, 2);
  CHECK(window_of(2, 5) == w22);
  CHECK(window_of(5, 2) == w22);
  CHECK(window_of(5, 5) == w22);
  // originally they sit in 4 distinct windows
  CHECK(std::pair<int64_t, int64_t>{2 / 4, 2 / 4} != std::pair<int64_t, int64_t>{2 / 4, 5 / 4});
}

TEST_CASE("swin block reduces to identity with zeroed output paths") {
  ScotConfig c = ScotConfig::tiny();
  Scot<double> model(c, 21);
  auto& P = model.params();
  const std::string pre = "enc0.blk0";
  for (auto name : {".attn.wo", ".attn.bo", ".mlp.w2", ".mlp.b2"})
    P.at(pre + name) = Tensor<double>::zeros(P.at(pre + name).shape());
  for (auto norm : {".norm1", ".norm2"}) {
    P.at(pre + norm + ".wb") = Tensor<double>::zeros({c.embed_dim});
    P.at(pre + norm + ".bb") = Tensor<double>::zeros({c.embed_dim});
  }
  CounterRng rng(5);
  Tensor<double> x({2, 4, 4, c.embed_dim});
  for (int64_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(-1, 1);
  auto y = model.swin_block(x, pre, 0, {0.4, 0.9}, false);
  CHECK(max_abs_diff(y, x) < 1e-12);
  auto ys = model.swin_block(x, pre, 0, {0.4, 0.9}, true);
  CHECK(max_abs_diff(ys, x) < 1e-12);
  CHECK(y.shape() == x.shape());
}

TEST_CASE("window locality of an unshifted block") {
  ScotConfig c = ScotConfig::tiny();  // P=4, M=2 -> 4 windows
  Scot<double> model(c, 33);
  CounterRng rng(6);
  Tensor<double> x({1, 4, 4, c.embed_dim});
  for (int64_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(-1, 1);
  auto base = model.swin_block(x, "enc0.blk0", 0, {0.5}, false);

  // perturb token (0,0) (window A); tokens in window B = rows/cols >= 2
  auto xp = x.clone();
  xp[0] += 0.125;
  auto pert = model.swin_block(xp, "enc0.blk0", 0, {0.5}, false);
  for (int64_t y = 0; y < 4; ++y)
    for (int64_t xx = 0; xx < 4; ++xx) {
      const bool same_window = y < 2 && xx < 2;
      double d = 0;
      for (int64_t ch = 0; ch < c.embed_dim; ++ch)
        d = std::max(d, std::abs(pert[(y * 4 + xx) * c.embed_dim + ch] -
                                 base[(y * 4 + xx) * c.embed_dim + ch]));
      if (same_window)
        CHECK(d > 0.0);
      else
        CHECK(d == 0.0);  // exact zero difference outside the window
    }
}

TEST_CASE("shifted block extends every receptive field past one window") {
  ScotConfig c = ScotConfig::tiny();  // P=4, M=2
  c.blocks = {2, 2};
  Scot<double> model(c, 34);
  CounterRng rng(61);
  Tensor<double> x({1, 4, 4, c.embed_dim});
  for (int64_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(-1, 1);
  auto run = [&](const Tensor<double>& in) {
    auto h = model.swin_block(in, "enc0.blk0", 0, {0.5}, false);
    return model.swin_block(h, "enc0.blk1", 0, {0.5}, true);
  };
  // influence[out][in] by perturbing every input token
  auto base = run(x);
  std::vector<std::vector<bool>> influenced(16, std::vector<bool>(16, false));
  for (int64_t in = 0; in < 16; ++in) {
    auto xp = x.clone();
    xp[in * c.embed_dim] += 0.1;
    auto out = run(xp);
    for (int64_t o = 0; o < 16; ++o) {
      double d = 0;
      for (int64_t ch = 0; ch < c.embed_dim; ++ch)
        d = std::max(d, std::abs(out[o * c.embed_dim + ch] - base[o * c.embed_dim + ch]));
      if (d > 0) influenced[size_t(o)][size_t(in)] = true;
    }
  }
  auto window_id = [](int64_t tok) { return (tok / 4 / 2) * 2 + (tok % 4) / 2; };
  for (int64_t o = 0; o < 16; ++o) {
    std::set<int64_t> windows;
    for (int64_t in = 0; in < 16; ++in)
      if (influenced[size_t(o)][size_t(in)]) windows.insert(window_id(in));
    CHECK(windows.size() > 1);
  }
}

TEST_CASE("patch merge and expand shapes, constants, roundtrip") {
  ScotConfig c = ScotConfig::tiny();
  c.grid_size = 32;  // P=8
  Scot<double> model(c, 55);
  auto& P = model.params();
  CounterRng rng(8);
  Tensor<double> x({1, 8, 8, c.embed_dim});
  for (int64_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(-1, 1);

  auto merged = model.patch_merge(x, 0, {0.5});
  CHECK(merged.shape() == Shape{1, 4, 4, 2 * c.embed_dim});

  // zero input -> beta(t) exactly
  for (int64_t i = 0; i < 2 * c.embed_dim; ++i) {
    P.at("merge0.norm.wb")[i] = 0.2;
    P.at("merge0.norm.bb")[i] = 0.05;
  }
  auto mz = model.patch_merge(Tensor<double>::zeros({1, 8, 8, c.embed_dim}), 0, {0.25});
  for (int64_t i = 0; i < mz.size(); ++i)
    CHECK(mz[i] == Catch::Approx(0.2 * 0.25 + 0.05).margin(1e-12));

  // merging a spatially-constant grid yields a spatially-constant grid
  Tensor<double> cg({1, 8, 8, c.embed_dim});
  for (int64_t yx = 0; yx < 64; ++yx)
    for (int64_t ch = 0; ch < c.embed_dim; ++ch) cg[yx * c.embed_dim + ch] = 0.1 * double(ch) - 0.2;
  auto mc = model.patch_merge(cg, 0, {0.7});
  for (int64_t yx = 1; yx < 16; ++yx)
    for (int64_t ch = 0; ch < 2 * c.embed_dim; ++ch)
      CHECK(mc[yx * 2 * c.embed_dim + ch] == Catch::Approx(mc[ch]).margin(1e-12));

  // expand: (4,4,2C) -> (8,8,C); merge∘expand round-trips shapes
  auto expanded = model.patch_expand(merged, 0, {0.5});
  CHECK(expanded.shape() == x.shape());
  auto remerged = model.patch_merge(expanded, 0, {0.5});
  CHECK(remerged.shape() == merged.shape());
}

TEST_CASE("convnext block: zero scale is identity, shape preserved") {
  ScotConfig c = ScotConfig::tiny();
  Scot<double> model(c, 77);
  auto& P = model.params();
  CounterRng rng(10);
  Tensor<double> x({2, 4, 4, c.embed_dim});
  for (int64_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(-1, 1);

  auto y = model.convnext_block(x, "skip0.cn0", {0.1, 0.9});
  CHECK(y.shape() == x.shape());

  P.at("skip0.cn0.gamma") = Tensor<double>::zeros({c.embed_dim});
  auto yz = model.convnext_block(x, "skip0.cn0", {0.1, 0.9});
  CHECK(max_abs_diff(yz, x) < 1e-15);
}

TEST_CASE("patch recovery: zero tokens, delta mixup, shapes") {
  ScotConfig c = ScotConfig::tiny();
  c.grid_size = 32;  // P=8, p=4 -> [n_out,32,32]
  Scot<double> model(c, 88);
  auto& P = model.params();

  // zero tokens and zero recovery bias -> zero field (mixup is linear)
  P.at("recover.b") = Tensor<double>::zeros({c.out_channels});
  auto zero_out = model.patch_recover_mixup(Tensor<double>::zeros({1, 8, 8, c.embed_dim}));
  REQUIRE(zero_out.shape() == Shape{1, c.out_channels, 32, 32});
  for (int64_t i = 0; i < zero_out.size(); ++i) CHECK(zero_out[i] == 0.0);

  // delta mixup kernel: recovery is the exact per-patch linear map
  P.at("mixup.w") = Tensor<double>::zeros({c.out_channels, c.out_channels, 5, 5});
  for (int64_t ch = 0; ch < c.out_channels; ++ch)
    P.at("mixup.w")[(ch * c.out_channels + ch) * 25 + 12] = 1.0;
  CounterRng rng(12);
  Tensor<double> tok({1, 8, 8, c.embed_dim});
  for (int64_t i = 0; i < tok.size(); ++i) tok[i] = rng.uniform(-1, 1);
  auto field = model.patch_recover_mixup(tok);
  // sample one pixel: patch (1,2), offset (3,1), channel 1
  const auto& wr = P.at("recover.w");
  const auto& br = P.at("recover.b");
  double expect = br[1];
  for (int64_t k = 0; k < c.embed_dim; ++k)
    expect += wr[((1 * c.embed_dim + k) * 4 + 3) * 4 + 1] * tok[(1 * 8 + 2) * c.embed_dim + k];
  CHECK(field[(1 * 32 + (1 * 4 + 3)) * 32 + (2 * 4 + 1)] == Catch::Approx(expect).margin(1e-12));
}

TEST_CASE("forward: shape, determinism, lead-time sensitivity and continuity") {
  ScotConfig c = ScotConfig::tiny();
  Scot<double> model(c, 99);
  // time-conditioning is the identity at init; make alpha(t) t-dependent
  CounterRng wrng(500);
  for (size_t i = 0; i < model.params().size(); ++i) {
    auto& p = model.params().param(i);
    if (p.group == ParamGroup::TimeNorm)
      for (int64_t j = 0; j < p.value.size(); ++j) p.value[j] += wrng.uniform(-0.05, 0.05);
  }
  auto a = random_field(c, 4);

  auto y1 = model.forward(a, 0.5);
  REQUIRE(y1.shape() == Shape{c.out_channels, c.grid_size, c.grid_size});
  auto y2 = model.forward(a, 0.5);
  CHECK(bitwise_equal(y1, y2));

  // t=0 vs t=1 differ (wa is random at init, so alpha depends on t)
  auto y0 = model.forward(a, 0.0);
  auto yt1 = model.forward(a, 1.0);
  CHECK(max_abs_diff(y0, yt1) > 1e-8);

  // continuity in t
  auto yd = model.forward(a, 0.5 + 1e-6);
  double norm = 0, diff = 0;
  for (int64_t i = 0; i < y1.size(); ++i) {
    norm += y1[i] * y1[i];
    diff += (yd[i] - y1[i]) * (yd[i] - y1[i]);
  }
  CHECK(std::sqrt(diff) < 1e-3 * std::sqrt(norm));
}

TEST_CASE("rollout: single entry bitwise, lead times, schedule validation") {
  ScotConfig c = ScotConfig::tiny();
  Scot<double> model(c, 123);
  auto a = random_field(c, 14);

  auto direct = model.forward(a, 0.8);
  auto single = model.rollout(a, {0.8});
  CHECK(bitwise_equal(direct, single));

  auto lead = rollout_lead_times({0.2, 0.7});
  REQUIRE(lead.size() == 2);
  CHECK(lead[0] == Catch::Approx(0.2));
  CHECK(lead[1] == Catch::Approx(0.5));

  auto hom = rollout_lead_times({0.25, 0.5, 0.75, 1.0});
  for (double lt : hom) CHECK(lt == Catch::Approx(0.25));

  CHECK_THROWS_AS(model.rollout(a, {0.5, 0.5}), ValueError);
  CHECK_THROWS_AS(model.rollout(a, {}), ValueError);
  CHECK_THROWS_AS(model.rollout(a, {-0.1, 0.5}), ValueError);
}

TEST_CASE("parameter groups partition the manifest") {
  ScotParams<double> params(ScotConfig::micro(), 3);
  int64_t backbone = 0, embed = 0, norm = 0;
  std::set<std::string> embed_names;
  for (size_t i = 0; i < params.size(); ++i) {
    const auto& p = params.param(i);
    switch (p.group) {
      case ParamGroup::Backbone: ++backbone; break;
      case ParamGroup::EmbedRecover: ++embed; embed_names.insert(p.name); break;
      case ParamGroup::TimeNorm: ++norm; break;
    }
    const bool is_norm_param =
        p.name.size() > 3 && (p.name.rfind(".wa") == p.name.size() - 3 ||
                              p.name.rfind(".ba") == p.name.size() - 3 ||
                              p.name.rfind(".wb") == p.name.size() - 3 ||
                              p.name.rfind(".bb") == p.name.size() - 3);
    CHECK(is_norm_param == (p.group == ParamGroup::TimeNorm));
  }
  CHECK(size_t(backbone + embed + norm) == params.size());
  CHECK(embed_names == std::set<std::string>{"embed.w", "embed.b", "recover.w", "recover.b",
                                             "mixup.w"});
}

TEST_CASE("init determinism and checkpoint roundtrip") {
  ScotConfig c = ScotConfig::tiny();
  ScotParams<double> a(c, 7), b(c, 7), d(c, 8);
  bool all_equal = true, any_diff = false;
  for (size_t i = 0; i < a.size(); ++i) {
    all_equal = all_equal && bitwise_equal(a.param(i).value, b.param(i).value);
    any_diff = any_diff || !bitwise_equal(a.param(i).value, d.param(i).value);
  }
  CHECK(all_equal);
  CHECK(any_diff);

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "scotlab_ckpt_test";
  fs::remove_all(dir);
  save_checkpoint(a, dir);
  auto loaded = load_checkpoint<double>(dir);
  for (size_t i = 0; i < a.size(); ++i)
    CHECK(bitwise_equal(a.param(i).value, loaded.param(i).value));

  Scot<double> m1(std::move(a)), m2(std::move(loaded));
  auto field = random_field(c, 5);
  CHECK(bitwise_equal(m1.forward(field, 0.3), m2.forward(field, 0.3)));
  fs::remove_all(dir);
}

TEST_CASE("checkpoint with mismatched embedding shape names the parameter") {
  namespace fs = std::filesystem;
  ScotConfig c = ScotConfig::tiny();
  const fs::path dir = fs::temp_directory_path() / "scotlab_ckpt_mismatch";
  fs::remove_all(dir);
  save_checkpoint(ScotParams<double>(c, 1), dir);
  // rewrite the stored config with a different channel count; the manifest
  // shapes no longer match the model built from it
  auto doc = nlohmann::json::parse(scotlab::detail::read_file(dir / "model.json"));
  doc["config"]["in_channels"] = c.in_channels + 1;
  scotlab::detail::write_file(dir / "model.json", doc.dump(2));
  try {
    load_checkpoint<double>(dir);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("embed.w") != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("model gradient spot-check vs finite differences") {
  ScotConfig c = ScotConfig::tiny();
  Scot<double> model(c, 200);
  auto a = random_field(c, 30);
  CounterRng rng(31);
  Tensor<double> wsum({c.out_channels, c.grid_size, c.grid_size});
  for (int64_t i = 0; i < wsum.size(); ++i) wsum[i] = rng.uniform(-1, 1);

  auto loss_value = [&]() {
    auto y = model.forward(a, 0.5);
    double s = 0;
    for (int64_t i = 0; i < y.size(); ++i) s += y[i] * wsum[i];
    return s;
  };

  // a handful of parameters across layer types
  const std::vector<std::string> picks{"embed.w",         "enc0.blk0.attn.wq",
                                       "enc0.blk0.attn.tau", "enc0.blk0.norm1.wa",
                                       "bot.blk0.mlp.w1", "merge0.w",
                                       "expand0.w1",      "skip0.cn0.dw.w",
                                       "recover.w",       "mixup.w"};
  for (const auto& name : picks) {
    Tape<double> tape;
    model.params().attach(tape);
    auto y = model.forward(a, 0.5);
    auto loss = sum_all(mul(y, wsum));
    tape.backward(loss);
    auto g = tape.grad(model.params().at(name));
    model.params().detach_all();

    auto& tensor = model.params().at(name);
    CounterRng pick_rng(detail::fnv1a(name));
    for (int rep = 0; rep < 3; ++rep) {
      const int64_t i = pick_rng.uniform_int(0, tensor.size() - 1);
      const double fd = testutil::central_diff(loss_value, tensor, i);
      INFO(name << "[" << i << "]");
      CHECK(testutil::rel_err(g[i], fd) < 1e-4);
    }
  }
}
