#include "qmc/aco.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace qmc {

Vector rank_weights(int k, Scalar q) {
  if (k < 1 || q <= 0) throw std::invalid_argument("rank_weights: need k >= 1 and q > 0");
  const Scalar qk = q * k;
  const Scalar scale = 1.0 / (qk * std::sqrt(2.0 * std::numbers::pi));
  Vector w(k);
  for (int l = 0; l < k; ++l) w[l] = scale * std::exp(-static_cast<Scalar>(l) * l / (2.0 * qk * qk));
  return w;
}

Vector selection_probs(const Eigen::Ref<const Vector>& weights) {
  const Scalar total = weights.sum();
  if (!(total > 0)) throw std::invalid_argument("selection_probs: weights must have a positive sum");
  return weights / total;
}

void Archive::update(std::vector<Evaluated> newcomers) {
  for (Evaluated& e : newcomers) entries_.push_back({std::move(e.rk), e.fitness, next_stamp_++});
  std::stable_sort(entries_.begin(), entries_.end(), [](const ArchiveEntry& a, const ArchiveEntry& b) {
    const auto order = compare(a.fitness, b.fitness);
    if (order != 0) return order < 0;
    return a.stamp > b.stamp;
  });
  if (size() > capacity_) entries_.resize(capacity_);
}

void Archive::set_capacity(int capacity) {
  if (capacity < 1) throw std::invalid_argument("archive capacity must be positive");
  capacity_ = capacity;
  if (size() > capacity_) entries_.resize(capacity_);
}

namespace {

Scalar dispersion(const Archive& archive, int l, int dim, Scalar xi, Scalar floor, Scalar fallback) {
  const int k = archive.size();
  if (k <= 1) return fallback;
  const Scalar center = archive.entries()[l].rk.keys[dim];
  Scalar total = 0;
  for (int e = 0; e < k; ++e)
    if (e != l) total += std::abs(archive.entries()[e].rk.keys[dim] - center);
  const Scalar value = xi * total / (k - 1);
  return value <= floor ? fallback : value;
}

}  // namespace

Scalar sigma(const Archive& archive, int l, int dim, Scalar xi, Scalar floor) {
  return dispersion(archive, l, dim, xi, floor, kDefaultSigma);
}

RandomKeys sample_ant(const Archive& archive, const AcoParams& params, Rng& rng, const SamplingOptions& options) {
  if (archive.empty()) throw std::invalid_argument("sample_ant: empty archive");
  const Vector probs = selection_probs(rank_weights(archive.size(), params.q));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  int chosen = archive.size() - 1;
  double acc = 0;
  for (int l = 0; l < archive.size(); ++l) {
    acc += probs[l];
    if (u < acc) {
      chosen = l;
      break;
    }
  }

  const Vector& center = archive.entries()[chosen].rk.keys;
  Vector keys(center.size());
  for (int i = 0; i < center.size(); ++i) {
    const Scalar sd = dispersion(archive, chosen, i, params.xi, options.sigma_floor, options.default_sigma);
    if (sd <= 0) {
      keys[i] = std::clamp(center[i], 0.0, RandomKeys::kMaxKey);
      continue;
    }
    std::normal_distribution<double> gauss(center[i], sd);
    Scalar value = gauss(rng);
    for (int redraw = 0; redraw < options.max_redraws && (value < 0 || value >= 1); ++redraw) value = gauss(rng);
    keys[i] = std::clamp(value, 0.0, RandomKeys::kMaxKey);
  }
  return RandomKeys(std::move(keys));
}

double DecodeCache::hit_rate() const {
  const auto total = hits_ + misses_;
  return total == 0 ? 0.0 : static_cast<double>(hits_) / static_cast<double>(total);
}

void DecodeCache::clear() {
  queue_.clear();
  map_.clear();
  hits_ = misses_ = 0;
}

Fitness DecodeCache::get_or_insert(const std::string& key, const std::function<Fitness()>& compute) {
  if (auto it = map_.find(key); it != map_.end()) {
    ++hits_;
    return it->second;
  }
  ++misses_;
  const Fitness value = compute();
  if (capacity_ == 0) return value;
  if (queue_.size() == capacity_) {
    map_.erase(queue_.front());
    queue_.pop_front();
  }
  queue_.push_back(key);
  map_.emplace(key, value);
  return value;
}

Evaluated nelder_mead(const Evaluated& start, const Evaluator& evaluate, const NelderMeadOptions& opt,
                      std::vector<Fitness>* trace) {
  Evaluated best = start;
  int used = 1;
  if (trace) trace->push_back(best.fitness);
  if (opt.budget <= 1) return best;

  const int dim = static_cast<int>(start.rk.keys.size());
  auto better = [](const Fitness& a, const Fitness& b) { return compare(a, b) < 0; };
  auto clamp = [](const Vector& x) -> Vector { return x.cwiseMax(0.0).cwiseMin(RandomKeys::kMaxKey); };
  auto eval = [&](const Vector& x) {
    RandomKeys rk(x);
    const Fitness f = evaluate(rk);
    ++used;
    if (better(f, best.fitness)) best = {std::move(rk), f};
    if (trace) trace->push_back(best.fitness);
    return f;
  };

  Eigen::MatrixXd simplex(dim, dim + 1);
  std::vector<Fitness> f(dim + 1);
  simplex.col(0) = start.rk.keys;
  f[0] = start.fitness;
  for (int i = 0; i < dim; ++i) {
    if (used >= opt.budget) return best;
    Vector x = start.rk.keys;
    x[i] += opt.step;
    if (x[i] >= 1) x[i] -= 1;
    x[i] = std::clamp(x[i], 0.0, RandomKeys::kMaxKey);
    simplex.col(i + 1) = x;
    f[i + 1] = eval(x);
  }

  std::vector<int> idx(dim + 1);
  while (used < opt.budget) {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return better(f[a], f[b]); });
    Eigen::MatrixXd sorted(dim, dim + 1);
    std::vector<Fitness> fs(dim + 1);
    for (int j = 0; j <= dim; ++j) {
      sorted.col(j) = simplex.col(idx[j]);
      fs[j] = f[idx[j]];
    }
    simplex.swap(sorted);
    f.swap(fs);

    const Scalar diameter = (simplex.rightCols(dim).colwise() - simplex.col(0)).cwiseAbs().maxCoeff();
    if (diameter < opt.tolerance) break;

    const Vector centroid = simplex.leftCols(dim).rowwise().mean();
    const Vector worst = simplex.col(dim);
    const Vector xr = clamp(centroid + opt.reflection * (centroid - worst));
    const Fitness fr = eval(xr);

    if (better(fr, f[0])) {
      if (used >= opt.budget) break;
      const Vector xe = clamp(centroid + opt.expansion * (xr - centroid));
      const Fitness fe = eval(xe);
      if (better(fe, fr)) {
        simplex.col(dim) = xe;
        f[dim] = fe;
      } else {
        simplex.col(dim) = xr;
        f[dim] = fr;
      }
    } else if (better(fr, f[dim - 1])) {
      simplex.col(dim) = xr;
      f[dim] = fr;
    } else {
      if (used >= opt.budget) break;
      const bool outside = better(fr, f[dim]);
      const Vector xc = clamp(outside ? Vector(centroid + opt.contraction * (xr - centroid))
                                      : Vector(centroid + opt.contraction * (worst - centroid)));
      const Fitness fc = eval(xc);
      if (outside ? !better(fr, fc) : better(fc, f[dim])) {
        simplex.col(dim) = xc;
        f[dim] = fc;
      } else {
        for (int j = 1; j <= dim && used < opt.budget; ++j) {
          simplex.col(j) = simplex.col(0) + opt.shrink * (simplex.col(j) - simplex.col(0));
          f[j] = eval(simplex.col(j));
        }
      }
    }
  }
  return best;
}

AcoEngine::AcoEngine(const Problem& problem, EngineConfig config, std::uint64_t seed)
    : problem_(problem),
      config_(std::move(config)),
      rng_(seed),
      cache_(config_.cache_capacity),
      tuner_(config_.space.value_or(ParamSpace::for_items(problem.n())), config_.qlearning) {}

Fitness AcoEngine::evaluate(const RandomKeys& rk) {
  ++evaluations_;
  const std::vector<int> order = sorted_item_order(rk);
  const DecodeConfig genes = decode_genes(rk);
  auto compute = [&] {
    ++decodes_;
    return decode(order, genes, problem_, config_.decode).fitness(problem_);
  };
  if (!config_.use_cache) return compute();
  return cache_.get_or_insert(cache_key(order, genes), compute);
}

void AcoEngine::consider(const Evaluated& e) {
  if (!incumbent_ || compare(e.fitness, incumbent_->fitness) < 0) {
    incumbent_ = e;
    incumbent_improved_ = true;
  }
}

void AcoEngine::fill_archive() {
  std::vector<Evaluated> fresh;
  for (int k = archive_.size(); k < archive_.capacity(); ++k) {
    RandomKeys rk = uniform_keys(problem_.n(), rng_);
    const Fitness f = evaluate(rk);
    fresh.push_back({std::move(rk), f});
  }
  for (const Evaluated& e : fresh) consider(e);
  archive_.update(std::move(fresh));
}

void AcoEngine::initialize() {
  cache_.clear();
  incumbent_.reset();
  generation_ = 0;
  params_ = tuner_.init(rng_);
  archive_ = Archive(params_.archive_size);

  const PackingSolution seed = semi_greedy(problem_, rng_, std::nullopt, config_.decode.max_relocation_iterations);
  RandomKeys rk = encode(seed, 1.0);
  const Fitness f = evaluate(rk);
  Evaluated anchor{std::move(rk), f};
  consider(anchor);
  archive_.update({anchor});
  fill_archive();
}

GenerationReport AcoEngine::run_generation(Scalar progress) {
  if (archive_.empty()) initialize();
  ++generation_;
  incumbent_improved_ = false;
  const std::uint64_t decodes_before = decodes_;
  const Scalar f_prev = archive_.best().fitness.objective;

  std::vector<Evaluated> newcomers;
  for (int a = 0; a < params_.ants; ++a) {
    RandomKeys rk = sample_ant(archive_, params_, rng_, config_.sampling);
    const Fitness f = evaluate(rk);
    newcomers.push_back({std::move(rk), f});
  }
  const auto leader = std::min_element(newcomers.begin(), newcomers.end(), [](const Evaluated& a, const Evaluated& b) {
    return compare(a.fitness, b.fitness) < 0;
  });
  Evaluated refined = nelder_mead(*leader, [this](const RandomKeys& rk) { return evaluate(rk); }, config_.nelder_mead);
  if (compare(refined.fitness, leader->fitness) < 0) newcomers.push_back(std::move(refined));

  for (const Evaluated& e : newcomers) consider(e);
  archive_.update(std::move(newcomers));

  GenerationReport report;
  report.generation = generation_;
  report.params = params_;
  report.reward = reward(f_prev, archive_.best().fitness.objective);

  params_ = tuner_.step(report.reward, progress, rng_);
  if (params_.archive_size != archive_.capacity()) {
    archive_.set_capacity(params_.archive_size);
    fill_archive();
  }
  report.best = archive_.best().fitness;
  report.improved = incumbent_improved_;
  report.cache_hit_rate = cache_.hit_rate();
  report.decodes = decodes_ - decodes_before;
  return report;
}

}  // namespace qmc
