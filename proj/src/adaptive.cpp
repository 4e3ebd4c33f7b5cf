#include "qmc/adaptive.hpp"

#include <algorithm>
#include <stdexcept>

namespace qmc {

ParamSpace ParamSpace::for_items(int n) {
  ParamSpace space;
  space.archive_sizes = n <= 50 ? std::vector<int>{25, 30} : std::vector<int>{55, 60};
  space.ants = {2, 3};
  space.q = {0.0001, 0.001, 0.1, 0.3};
  space.xi = {0.80, 0.85};
  return space;
}

ParamSpace::Index ParamSpace::extents() const {
  return {static_cast<int>(archive_sizes.size()), static_cast<int>(ants.size()), static_cast<int>(q.size()),
          static_cast<int>(xi.size())};
}

int ParamSpace::state_count() const {
  const Index e = extents();
  return e[0] * e[1] * e[2] * e[3];
}

int ParamSpace::state_of(const Index& idx) const {
  const Index e = extents();
  return ((idx[0] * e[1] + idx[1]) * e[2] + idx[2]) * e[3] + idx[3];
}

ParamSpace::Index ParamSpace::index_of(int state) const {
  const Index e = extents();
  Index idx{};
  for (int p = 3; p >= 0; --p) {
    idx[p] = state % e[p];
    state /= e[p];
  }
  return idx;
}

AcoParams ParamSpace::at(const Index& idx) const {
  return {archive_sizes[idx[0]], ants[idx[1]], q[idx[2]], xi[idx[3]]};
}

bool ParamSpace::contains(const AcoParams& p) const {
  auto has = [](const auto& values, auto v) { return std::find(values.begin(), values.end(), v) != values.end(); };
  return has(archive_sizes, p.archive_size) && has(ants, p.ants) && has(q, p.q) && has(xi, p.xi);
}

Scalar reward(Scalar f_prev, Scalar f_new) {
  if (f_prev <= 0) return 0;
  return (f_prev - f_new) / f_prev;
}

ParamTuner::ParamTuner(ParamSpace space, QLearningConfig config) : space_(std::move(space)), config_(config) {
  const ParamSpace::Index e = space_.extents();
  if (std::any_of(e.begin(), e.end(), [](int v) { return v < 1; }))
    throw std::invalid_argument("parameter space has an empty value list");
  if (config_.epsilon0 < 0 || config_.epsilon0 > 1 || config_.epsilon_min < 0 || config_.epsilon_min > 1)
    throw std::invalid_argument("epsilon must lie in [0, 1]");
  q_ = RowMatrix::Zero(space_.state_count(), kActions);
  current_ = space_.at(space_.index_of(0));
}

AcoParams ParamTuner::init(Rng& rng) {
  q_.setZero();
  state_ = std::uniform_int_distribution<int>(0, space_.state_count() - 1)(rng);
  last_state_ = last_action_ = -1;
  current_ = space_.at(space_.index_of(state_));
  return current_;
}

Scalar ParamTuner::epsilon(Scalar progress) const {
  progress = std::clamp(progress, 0.0, 1.0);
  return config_.epsilon0 + (config_.epsilon_min - config_.epsilon0) * progress;
}

int ParamTuner::apply_action(int state, int action) const {
  if (action == 0) return state;
  ParamSpace::Index idx = space_.index_of(state);
  const ParamSpace::Index e = space_.extents();
  const int param = (action - 1) / 2;
  const int dir = (action - 1) % 2 == 0 ? 1 : -1;
  idx[param] = std::clamp(idx[param] + dir, 0, e[param] - 1);
  return space_.state_of(idx);
}

int ParamTuner::choose_action(int state, Scalar eps, Rng& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < eps) return std::uniform_int_distribution<int>(0, kActions - 1)(rng);
  const Scalar best = q_.row(state).maxCoeff();
  std::vector<int> ties;
  for (int a = 0; a < kActions; ++a)
    if (q_(state, a) == best) ties.push_back(a);
  if (ties.size() == 1) return ties.front();
  return ties[std::uniform_int_distribution<std::size_t>(0, ties.size() - 1)(rng)];
}

AcoParams ParamTuner::step(Scalar r, Scalar progress, Rng& rng) {
  if (last_action_ >= 0) {
    Scalar& value = q_(last_state_, last_action_);
    value += config_.alpha * (r + config_.gamma * q_.row(state_).maxCoeff() - value);
  }
  const int action = choose_action(state_, epsilon(progress), rng);
  last_state_ = state_;
  last_action_ = action;
  state_ = apply_action(state_, action);
  current_ = space_.at(space_.index_of(state_));
  return current_;
}

}  // namespace qmc
