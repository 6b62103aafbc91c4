#pragma once

#include "scotlab/common.hpp"

namespace scotlab {

// Per-task channel conventions: how a dataset's native channels embed
// into the shared 4-channel fluid layout [rho, u, v, p] (for mixtures and
// transfer), which channels the training loss sees, and which channel
// groups evaluation scores (vector-valued functions pooled per group).
struct TaskSpec {
  std::string pde;
  std::vector<std::string> channels;       // native dataset channels
  bool steady = false;                     // trains with fixed lead time 1
  bool fits_fluid_layout = false;          // can join the [rho,u,v,p] layout
  std::vector<int> layout_slot;            // native channel -> layout slot
  std::vector<double> layout_fill;         // constant fill per layout slot
  std::vector<int> loss_mask_layout;       // mask in the 4-channel layout
  std::vector<int> loss_mask_native;       // mask in the native layout
  std::vector<std::vector<int>> eval_groups;  // functions of interest
};

inline TaskSpec task_for(const std::string& pde) {
  TaskSpec t;
  t.pde = pde;
  if (pde == "ns") {
    t.channels = {"u", "v"};
    t.fits_fluid_layout = true;
    t.layout_slot = {1, 2};
    t.layout_fill = {1.0, 0.0, 0.0, 0.0};  // rho = 1, p masked
    t.loss_mask_layout = {0, 1, 1, 0};
    t.loss_mask_native = {1, 1};
    t.eval_groups = {{0, 1}};
  } else if (pde == "euler") {
    t.channels = {"rho", "u", "v", "p"};
    t.fits_fluid_layout = true;
    t.layout_slot = {0, 1, 2, 3};
    t.layout_fill = {0.0, 0.0, 0.0, 0.0};
    t.loss_mask_layout = {1, 1, 1, 1};
    t.loss_mask_native = {1, 1, 1, 1};
    t.eval_groups = {{0}, {1, 2}, {3}};
  } else if (pde == "ns-tracer") {
    t.channels = {"u", "v", "c"};
    t.loss_mask_native = {1, 1, 1};
    t.eval_groups = {{0, 1}, {2}};
  } else if (pde == "fns") {
    t.channels = {"u", "v", "f"};
    t.loss_mask_native = {1, 1, 1};
    t.eval_groups = {{0, 1}};
  } else if (pde == "wave") {
    t.channels = {"u", "v", "c"};
    t.loss_mask_native = {1, 1, 1};
    t.eval_groups = {{0}};
  } else if (pde == "ace") {
    t.channels = {"u"};
    t.fits_fluid_layout = true;
    t.layout_slot = {0};
    t.layout_fill = {0.0, 0.0, 0.0, 0.0};
    t.loss_mask_layout = {1, 0, 0, 0};
    t.loss_mask_native = {1};
    t.eval_groups = {{0}};
  } else if (pde == "poisson") {
    t.channels = {"u"};
    t.steady = true;
    t.fits_fluid_layout = true;
    t.layout_slot = {0};
    t.layout_fill = {0.0, 0.0, 0.0, 0.0};
    t.loss_mask_layout = {1, 0, 0, 0};
    t.loss_mask_native = {1};
    t.eval_groups = {{0}};
  } else if (pde == "helmholtz") {
    t.channels = {"u", "b"};
    t.steady = true;
    t.loss_mask_native = {1, 0};
    t.eval_groups = {{0}};
  } else {
    throw ValueError("unknown task: " + pde);
  }
  return t;
}

constexpr int64_t kFluidLayoutChannels = 4;

}  // namespace scotlab
