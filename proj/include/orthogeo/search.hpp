#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "orthogeo/properties.hpp"

namespace orthogeo {

struct SearchOptions {
  /// Total number of margin evaluations.
  int budget = 5000;
  /// Share of the budget spent on random multistart draws.
  double explore_fraction = 0.4;
  int starts = 4;
  double min_step = 1e-7;
};

struct SearchResult {
  std::optional<Witness> witness;
  /// Best configuration found, whether or not it violates the property.
  Witness best;
  int evaluations = 0;
};

/// Maximizes the violation margin of `prop`: random multistart over trial
/// draws, then coordinate-wise pattern search on the points (and scalar
/// parameters) of the best starts. Reports a witness when the best margin
/// exceeds cfg.tol.
inline SearchResult search_counterexample(const SpaceHandle& space, Property prop, const TrialConfig& cfg,
                                          const SearchOptions& opt = {}) {
  cfg.validate();
  if (prop == Property::strict_convexity) throw std::invalid_argument("search does not apply to strict convexity");
  const SpaceHandle eval = evaluation_space(space, prop);
  const double threshold = pass_threshold(prop, cfg.tol);

  SearchResult res;
  auto margin_of = [&](const TrialSample& s) -> double {
    ++res.evaluations;
    try {
      return evaluate_trial(*eval, prop, s, cfg);
    } catch (const SkippedTrial&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  const int explore = std::max(1, static_cast<int>(opt.budget * opt.explore_fraction));
  std::vector<std::pair<double, int>> ranked;
  std::vector<TrialSample> draws;
  for (int i = 0; i < explore; ++i) {
    RandomStream rng = RandomStream::for_task(cfg.seed, static_cast<std::uint64_t>(i));
    draws.push_back(draw_trial(*eval, prop, cfg, rng));
    ranked.push_back({margin_of(draws.back()), i});
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });

  res.best = {space->name(), prop, draws[ranked.front().second], ranked.front().first, ranked.front().second};

  const int starts = std::min<int>(opt.starts, static_cast<int>(ranked.size()));
  const int per_start = std::max(0, (opt.budget - res.evaluations) / std::max(starts, 1));
  for (int k = 0; k < starts; ++k) {
    TrialSample cur = draws[ranked[k].second];
    double f = ranked[k].first;
    const int stop_at = res.evaluations + per_start;
    double step = 0.05 * eval->sampling_scale();
    double sstep = 0.05;
    while (step > opt.min_step * eval->sampling_scale() && res.evaluations < stop_at) {
      bool improved = false;
      for (std::size_t pi = 0; pi < cur.points.size() && res.evaluations < stop_at; ++pi) {
        for (std::size_t c = 0; c < eval->dim() && res.evaluations < stop_at; ++c) {
          for (double sign : {1.0, -1.0}) {
            auto moved = eval->perturb(cur.points[pi], c, sign * step);
            if (!moved) continue;
            TrialSample trial = cur;
            trial.points[pi] = *moved;
            const double g = margin_of(trial);
            if (g > f) {
              f = g;
              cur = std::move(trial);
              improved = true;
              break;
            }
          }
        }
      }
      for (std::size_t si = 0; si < cur.scalars.size() && res.evaluations < stop_at; ++si) {
        for (double sign : {1.0, -1.0}) {
          TrialSample trial = cur;
          trial.scalars[si] = std::clamp(trial.scalars[si] + sign * sstep, 0.0, 1.0);
          const double g = margin_of(trial);
          if (g > f) {
            f = g;
            cur = std::move(trial);
            improved = true;
            break;
          }
        }
      }
      if (!improved) {
        step *= 0.5;
        sstep *= 0.5;
      }
    }
    if (f > res.best.margin) res.best = {space->name(), prop, cur, f, ranked[k].second};
  }
  if (res.best.margin > threshold) res.witness = res.best;
  return res;
}

}  // namespace orthogeo
