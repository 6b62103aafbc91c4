// Minimal library walkthrough: build a model, run one forward pass and a
// two-step rollout, then take a single gradient step on a toy objective.

#include <cstdio>

#include "scotlab/scotlab.hpp"

using namespace scotlab;

int main() {
  ScotConfig cfg = ScotConfig::micro();
  Scot<float> model(cfg, /*seed=*/42);
  std::printf("scOT-mu: %lld parameters\n",
              static_cast<long long>(model.params().count_scalars()));

  CounterRng rng(7);
  Tensor<float> a({cfg.in_channels, cfg.grid_size, cfg.grid_size});
  for (int64_t i = 0; i < a.size(); ++i) a[i] = float(rng.uniform(-1, 1));

  Tensor<float> direct = model.forward(a, 1.0);
  Tensor<float> rolled = model.rollout(a, {0.5, 1.0});
  double diff = 0;
  for (int64_t i = 0; i < direct.size(); ++i)
    diff = std::max(diff, std::abs(double(direct[i] - rolled[i])));
  std::printf("direct vs 2-step rollout max diff: %.3e\n", diff);

  // one optimizer step toward a damped copy of the current output
  Tensor<float> target = detail::ew_unary(direct, [](float x) { return 0.5f * x; });
  Tape<float> tape;
  model.params().attach(tape);
  Tensor<float> pred = model.forward(a, 1.0);
  Shape batched = pred.shape();
  batched.insert(batched.begin(), 1);
  Tensor<float> loss = relative_l1_loss(reshape(pred, batched),
                                        target.reshaped(batched),
                                        Tensor<float>::ones({cfg.out_channels}));
  tape.backward(loss);
  std::printf("loss before step: %.4f\n", double(loss.item()));

  std::vector<Tensor<float>> params, grads;
  for (size_t i = 0; i < model.params().size(); ++i) {
    params.push_back(model.params().param(i).value);
    grads.push_back(tape.grad(params.back()));
  }
  model.params().detach_all();
  clip_grad_norm(grads, 5.0);
  auto state = adamw_init(params);
  adamw_step(params, grads, state, 1e-3, 1e-6);

  Tensor<float> after = model.forward(a, 1.0);
  std::printf("output changed after one AdamW step: %s\n",
              bitwise_equal(after, direct) ? "no" : "yes");
  return 0;
}
