#pragma once

// scotlab: a desk-scale operator-transformer lab — dense tensors with
// reverse-mode autodiff, the scOT shifted-window transformer with
// lead-time conditioning, semigroup (all2all) training, a miniature PDE
// data-generation suite, and scaling-law evaluation tooling.

#include "scotlab/common.hpp"
#include "scotlab/rng.hpp"
#include "scotlab/tensor.hpp"
#include "scotlab/tape.hpp"
#include "scotlab/ops.hpp"
#include "scotlab/optim.hpp"
#include "scotlab/model/config.hpp"
#include "scotlab/model/params.hpp"
#include "scotlab/model/scot.hpp"
#include "scotlab/model/checkpoint.hpp"
#include "scotlab/data/container.hpp"
#include "scotlab/data/tasks.hpp"
#include "scotlab/pde/generate.hpp"
#include "scotlab/train/pairs.hpp"
#include "scotlab/train/loss.hpp"
#include "scotlab/train/trainer.hpp"
#include "scotlab/eval/metrics.hpp"
#include "scotlab/eval/scaling.hpp"
