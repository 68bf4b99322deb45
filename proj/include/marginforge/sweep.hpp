#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace marginforge {

struct SweepOutcome {
  std::vector<double> errors;  // one per evaluated step
  std::size_t best = 0;        // first step attaining the minimum error
  bool capped = false;         // ran out of steps before stalling
};

/// Evaluates steps 0, 1, ... until `stalled(previous_error, error)` holds or
/// `max_steps` have run.
inline SweepOutcome sweep_until_stall(
    std::size_t max_steps, const std::function<double(std::size_t)>& evaluate,
    const std::function<bool(double, double)>& stalled) {
  SweepOutcome out;
  for (std::size_t step = 0; step < max_steps; ++step) {
    const double err = evaluate(step);
    out.errors.push_back(err);
    if (err < out.errors[out.best]) out.best = step;
    if (step > 0 && stalled(out.errors[step - 1], err)) return out;
  }
  out.capped = true;
  return out;
}

}  // namespace marginforge
