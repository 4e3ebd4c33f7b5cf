#pragma once

#include <array>
#include <vector>

#include "qmc/instance.hpp"
#include "qmc/refine.hpp"

namespace qmc {

struct AcoParams {
  int archive_size = 25;
  int ants = 2;
  Scalar q = 0.1;   // selection pressure
  Scalar xi = 0.85; // exploration scale
  friend bool operator==(const AcoParams&, const AcoParams&) = default;
};

// Discrete values each ACO parameter may take.
struct ParamSpace {
  std::vector<int> archive_sizes;
  std::vector<int> ants;
  std::vector<Scalar> q;
  std::vector<Scalar> xi;

  // Archive sizes {25,30} up to 50 items and {55,60} above; ants {2,3};
  // q in {0.0001,0.001,0.1,0.3}; xi in {0.80,0.85}.
  static ParamSpace for_items(int n);

  using Index = std::array<int, 4>;
  Index extents() const;
  int state_count() const;
  int state_of(const Index& idx) const;
  Index index_of(int state) const;
  AcoParams at(const Index& idx) const;
  bool contains(const AcoParams& params) const;
};

struct QLearningConfig {
  Scalar alpha = 0.1;
  Scalar gamma = 0.8;
  Scalar epsilon0 = 0.3;
  Scalar epsilon_min = 0.05;
};

// Relative improvement of the best fitness; zero when f_prev is not positive.
Scalar reward(Scalar f_prev, Scalar f_new);

// Q-learning over parameter configurations. A state is one configuration; an action keeps
// the configuration (0) or moves one parameter one step up (1 + 2p) or down (2 + 2p).
class ParamTuner {
 public:
  static constexpr int kActions = 9;

  ParamTuner(ParamSpace space, QLearningConfig config);

  // Uniform random configuration; clears the Q-table.
  AcoParams init(Rng& rng);

  // Credits `reward` to the last action, picks the next action epsilon-greedily and returns
  // the configuration it leads to. `progress` in [0,1] drives the linear epsilon decay.
  AcoParams step(Scalar reward, Scalar progress, Rng& rng);

  Scalar epsilon(Scalar progress) const;
  const AcoParams& current() const { return current_; }
  int state() const { return state_; }
  int last_action() const { return last_action_; }
  const RowMatrix& q_values() const { return q_; }
  const ParamSpace& space() const { return space_; }

  int apply_action(int state, int action) const;

 private:
  int choose_action(int state, Scalar epsilon, Rng& rng) const;

  ParamSpace space_;
  QLearningConfig config_;
  RowMatrix q_;
  int state_ = 0;
  int last_state_ = -1;
  int last_action_ = -1;
  AcoParams current_;
};

}  // namespace qmc
