// Copyright 2026 The Monisum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "monisum/transmission.hpp"

#include <cmath>
#include <stdexcept>

namespace monisum::transmission {

void TransmitterParams::validate() const {
  if (!(budget > 0.0 && budget <= 1.0)) throw std::invalid_argument("budget must lie in (0,1]");
  if (!(v0 > 0.0) || !std::isfinite(v0)) throw std::invalid_argument("v0 must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
}

double penalty(const TransmitterState& state, std::span<const double> x) {
  if (!state.has_sent()) throw std::logic_error("penalty: nothing transmitted yet");
  if (state.last_sent.size() != x.size() || x.empty()) {
    throw std::invalid_argument("penalty: dimension mismatch");
  }
  double sum = 0.0;
  for (std::size_t r = 0; r < x.size(); ++r) {
    const double diff = state.last_sent[r] - x[r];
    sum += diff * diff;
  }
  return sum / static_cast<double>(x.size());
}

double v_schedule(double v0, double gamma, std::int64_t t) {
  if (!(v0 > 0.0)) throw std::invalid_argument("v_schedule: v0 must be positive");
  if (t < 1) throw std::invalid_argument("v_schedule: t must be >= 1");
  return v0 * std::pow(static_cast<double>(t + 1), gamma);
}

bool argmin_two_branch(double queue, double v_t, double penalty_if_silent, double budget) {
  const double silent = v_t * penalty_if_silent + queue * (0.0 - budget);
  const double send = v_t * 0.0 + queue * (1.0 - budget);
  return send < silent;
}

TransmissionDecision decide(const TransmitterState& state, const TransmitterParams& params,
                            std::span<const double> x, std::int64_t t) {
  TransmissionDecision d;
  d.v_t = v_schedule(params.v0, params.gamma, t);
  if (!state.has_sent()) {
    d.transmit = true;
    return d;
  }
  d.penalty_if_silent = penalty(state, x);
  d.transmit = transmit_rule(state.queue, d.v_t, d.penalty_if_silent);
  return d;
}

void update_queue(TransmitterState& state, const TransmitterParams& params, bool transmit,
                  std::span<const double> x, std::int64_t t) {
  state.queue += (transmit ? 1.0 : 0.0) - params.budget;
  if (params.project_queue && state.queue < 0.0) state.queue = 0.0;
  ++state.elapsed;
  if (transmit) {
    ++state.sent_count;
    state.last_sent.assign(x.begin(), x.end());
    state.last_sent_step = t;
  }
}

bool uniform_schedule(double budget, std::int64_t t) {
  if (t < 1) throw std::invalid_argument("uniform_schedule: t must be >= 1");
  const auto now = static_cast<double>(t);
  return std::floor(now * budget) > std::floor((now - 1.0) * budget);
}

Transmitter::Transmitter(TransmitterParams params, bool uniform)
    : params_(params), uniform_(uniform) {
  params_.validate();
}

bool Transmitter::step(std::span<const double> x) {
  const std::int64_t t = state_.elapsed + 1;
  if (uniform_) {
    last_ = {};
    last_.transmit = !state_.has_sent() || uniform_schedule(params_.budget, t);
  } else {
    last_ = decide(state_, params_, x, t);
  }
  update_queue(state_, params_, last_.transmit, x, t);
  return last_.transmit;
}

}  // namespace monisum::transmission
