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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

/// Per-node adaptive transmission under a long-run frequency budget.
///
/// Each node keeps a virtual queue Q that accumulates budget violation
/// (beta - B) and, at step t, picks beta in {0, 1} minimizing
///   V_t * F(beta) + Q * (beta - B),   V_t = V0 * (t + 1)^gamma,
/// where F(0) is the mean squared gap between the value the controller holds
/// and the current measurement and F(1) = 0. The two-branch minimum reduces
/// to "transmit iff Q < V_t * F(0)", ties staying silent.
namespace monisum::transmission {

struct TransmitterParams {
  double budget = 0.3;
  double v0 = 1e-12;
  double gamma = 0.65;
  bool project_queue = false;  // clamp Q at zero after each update

  void validate() const;
};

struct TransmitterState {
  double queue = 0.0;
  std::vector<double> last_sent;  // empty until the first transmission
  std::int64_t last_sent_step = 0;
  std::int64_t sent_count = 0;
  std::int64_t elapsed = 0;

  bool has_sent() const { return !last_sent.empty(); }
};

struct TransmissionDecision {
  bool transmit = false;
  double penalty_if_silent = 0.0;
  double v_t = 0.0;
};

/// (1/d) * ||last_sent - x||^2.
double penalty(const TransmitterState& state, std::span<const double> x);

/// V0 * (t + 1)^gamma, t >= 1.
double v_schedule(double v0, double gamma, std::int64_t t);

/// Literal two-branch argmin of V_t*F(beta) + Q*(beta - B) with beta=0 on ties.
bool argmin_two_branch(double queue, double v_t, double penalty_if_silent, double budget);

/// Closed form of argmin_two_branch.
inline bool transmit_rule(double queue, double v_t, double penalty_if_silent) {
  return queue < v_t * penalty_if_silent;
}

/// A node with nothing sent yet always transmits.
TransmissionDecision decide(const TransmitterState& state, const TransmitterParams& params,
                            std::span<const double> x, std::int64_t t);

/// Q <- Q + (beta - B); records x as last_sent when beta = 1.
void update_queue(TransmitterState& state, const TransmitterParams& params, bool transmit,
                  std::span<const double> x, std::int64_t t);

/// Fixed-interval baseline: transmit iff floor(t*B) > floor((t-1)*B).
bool uniform_schedule(double budget, std::int64_t t);

/// One node's agent: owns its state, consumes one measurement per step.
class Transmitter {
 public:
  explicit Transmitter(TransmitterParams params, bool uniform = false);

  /// Decides, updates the queue, and returns whether x was sent. Steps are
  /// 1-based and must be consecutive.
  bool step(std::span<const double> x);

  const TransmitterState& state() const { return state_; }
  const TransmitterParams& params() const { return params_; }
  const TransmissionDecision& last_decision() const { return last_; }

 private:
  TransmitterParams params_;
  bool uniform_;
  TransmitterState state_;
  TransmissionDecision last_;
};

}  // namespace monisum::transmission
