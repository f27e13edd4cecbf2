#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dayflow/errors.hpp"
#include "dayflow/tpa.hpp"

namespace dayflow {

struct SimilarityWeights {
  double edge = 0.5;
  double node = 0.5;

  void validate() const {
    if (edge < 0.0 || node < 0.0 || std::abs(edge + node - 1.0) > 1e-9)
      throw ConfigError("similarity weights must be non-negative and sum to 1");
  }
};

// Per-model transition-frequency shares, including __start__/__end__ arcs.
inline std::map<Transition, double> edge_shares(const Tpa& tpa) {
  std::int64_t total = 0;
  for (const auto& [tr, count] : tpa.transitions) total += count;
  std::map<Transition, double> shares;
  for (const auto& [tr, count] : tpa.transitions)
    shares[tr] = static_cast<double>(count) / static_cast<double>(total);
  return shares;
}

namespace detail {

// Bray-Curtis similarity over the union of keys: 1 - sum|a-b| / sum(a+b).
template <typename Key>
double bray_curtis(const std::map<Key, double>& a,
                   const std::map<Key, double>& b) {
  double diff = 0.0;
  double mass = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      diff += std::abs(ia->second);
      mass += ia->second;
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      diff += std::abs(ib->second);
      mass += ib->second;
      ++ib;
    } else {
      diff += std::abs(ia->second - ib->second);
      mass += ia->second + ib->second;
      ++ia;
      ++ib;
    }
  }
  if (mass <= 0.0) return 0.0;
  return 1.0 - diff / mass;
}

// L1 similarity between two distributions: 1 - 0.5 * sum|a-b|.
inline double profile_similarity(const std::map<std::string, double>& a,
                                 const std::map<std::string, double>& b) {
  double diff = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      diff += ia->second;
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      diff += ib->second;
      ++ib;
    } else {
      diff += std::abs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return 1.0 - 0.5 * diff;
}

}  // namespace detail

// Core metric over pre-extracted share vectors; exposed so oracle tests can
// evaluate hand-built vectors without constructing models.
inline double weighted_similarity(const std::map<Transition, double>& edges_a,
                                  const std::map<Transition, double>& edges_b,
                                  const std::map<std::string, double>& dur_a,
                                  const std::map<std::string, double>& dur_b,
                                  const SimilarityWeights& weights) {
  weights.validate();
  const double edge_sim = detail::bray_curtis(edges_a, edges_b);
  const double node_sim = detail::profile_similarity(dur_a, dur_b);
  return weights.edge * edge_sim + weights.node * node_sim;
}

// Bounded [0,1] similarity of two models: Bray-Curtis over transition shares
// blended with L1 similarity of duration profiles.
inline double tpa_similarity(const Tpa& a, const Tpa& b,
                             const SimilarityWeights& weights) {
  return weighted_similarity(edge_shares(a), edge_shares(b),
                             duration_profile(a), duration_profile(b), weights);
}

// Dense symmetric matrix over day ids, ordered by id (= chronologically for
// ISO dates).
struct SimilarityMatrix {
  std::vector<std::string> ids;
  std::vector<double> values;  // row-major, size ids.size()^2

  std::size_t size() const { return ids.size(); }
  double at(std::size_t i, std::size_t j) const {
    return values[i * ids.size() + j];
  }
  double& at(std::size_t i, std::size_t j) {
    return values[i * ids.size() + j];
  }
};

inline SimilarityMatrix similarity_matrix(
    const std::vector<std::pair<std::string, Tpa>>& models,
    const SimilarityWeights& weights) {
  if (models.empty()) throw DataError("similarity matrix needs >= 1 model");
  weights.validate();
  std::vector<std::pair<std::string, const Tpa*>> ordered;
  ordered.reserve(models.size());
  for (const auto& [id, tpa] : models) ordered.emplace_back(id, &tpa);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i + 1 < ordered.size(); ++i)
    if (ordered[i].first == ordered[i + 1].first)
      throw DataError("duplicate day id '" + ordered[i].first +
                      "' in similarity matrix input");

  const std::size_t n = ordered.size();
  SimilarityMatrix m;
  m.ids.reserve(n);
  for (const auto& [id, tpa] : ordered) m.ids.push_back(id);
  m.values.assign(n * n, 0.0);

  std::vector<std::map<Transition, double>> edges(n);
  std::vector<std::map<std::string, double>> profiles(n);
  for (std::size_t i = 0; i < n; ++i) {
    edges[i] = edge_shares(*ordered[i].second);
    profiles[i] = duration_profile(*ordered[i].second);
  }
  for (std::size_t i = 0; i < n; ++i) {
    m.at(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double sim = weighted_similarity(edges[i], edges[j], profiles[i],
                                             profiles[j], weights);
      m.at(i, j) = sim;
      m.at(j, i) = sim;
    }
  }
  return m;
}

inline std::string matrix_to_csv(const SimilarityMatrix& m) {
  std::string out = "day";
  for (const auto& id : m.ids) out += "," + id;
  out += "\n";
  char buf[40];
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += m.ids[i];
    for (std::size_t j = 0; j < m.size(); ++j) {
      std::snprintf(buf, sizeof buf, ",%.9f", m.at(i, j));
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace dayflow
