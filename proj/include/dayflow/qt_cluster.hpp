#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dayflow/errors.hpp"
#include "dayflow/similarity.hpp"
#include "dayflow/tpa.hpp"

namespace dayflow {

struct QtParams {
  double similarity_threshold = 0.25;
  double join_fraction = 0.05;

  void validate() const {
    if (!(similarity_threshold > 0.0 && similarity_threshold < 1.0))
      throw ConfigError("similarity_threshold must be in (0,1)");
    if (!(join_fraction > 0.0 && join_fraction < 1.0))
      throw ConfigError("join_fraction must be in (0,1)");
  }
};

// Minimum surviving cluster size: ceil(join_fraction * n), floored at 2. The
// epsilon guards against ceil() tipping over on binary fractions such as
// 0.05 * 40.
inline std::int64_t min_cluster_size(double join_fraction, std::size_t n) {
  const auto implied = static_cast<std::int64_t>(
      std::ceil(join_fraction * static_cast<double>(n) - 1e-9));
  return std::max<std::int64_t>(2, implied);
}

// Day-id partition produced by QT clustering; clusters are ordered by size
// descending with ties broken by earliest member date.
struct Partition {
  std::vector<std::vector<std::string>> clusters;
  std::vector<std::string> outliers;
};

namespace detail {

// Greedy candidate for one seed: repeatedly add the still-available day with
// the highest minimum similarity to all current members, admitting only days
// at or above the threshold against every member (complete link). Ties break
// by day index, i.e. by date.
inline std::vector<std::size_t> grow_candidate(const SimilarityMatrix& m,
                                               const std::vector<bool>& available,
                                               std::size_t seed,
                                               double threshold) {
  const std::size_t n = m.size();
  std::vector<std::size_t> members = {seed};
  std::vector<double> min_sim(n);
  std::vector<bool> in_cluster(n, false);
  in_cluster[seed] = true;
  for (std::size_t d = 0; d < n; ++d) min_sim[d] = m.at(d, seed);
  while (true) {
    std::size_t best = n;
    for (std::size_t d = 0; d < n; ++d) {
      if (!available[d] || in_cluster[d] || min_sim[d] < threshold) continue;
      if (best == n || min_sim[d] > min_sim[best]) best = d;
    }
    if (best == n) break;
    members.push_back(best);
    in_cluster[best] = true;
    for (std::size_t d = 0; d < n; ++d)
      min_sim[d] = std::min(min_sim[d], m.at(d, best));
  }
  std::sort(members.begin(), members.end());
  return members;
}

}  // namespace detail

// Classic QT pass: grow a greedy complete-link candidate around every
// remaining seed, keep the largest (ties by earliest seed date), remove its
// members, repeat. Afterwards, clusters below the join-fraction minimum size
// dissolve into outliers.
inline Partition qt_cluster(const SimilarityMatrix& m, const QtParams& params) {
  params.validate();
  const std::size_t n = m.size();
  Partition out;
  if (n == 0) return out;

  std::vector<bool> available(n, true);
  std::size_t remaining = n;
  std::vector<std::vector<std::size_t>> kept;
  while (remaining > 0) {
    std::vector<std::size_t> best;
    for (std::size_t seed = 0; seed < n; ++seed) {
      if (!available[seed]) continue;
      auto candidate = detail::grow_candidate(m, available, seed,
                                              params.similarity_threshold);
      if (candidate.size() > best.size()) best = std::move(candidate);
      // Equal sizes keep the earlier seed's candidate (seeds scan in date
      // order), which is the documented tie-break.
    }
    for (std::size_t d : best) available[d] = false;
    remaining -= best.size();
    kept.push_back(std::move(best));
  }

  const std::int64_t min_size = min_cluster_size(params.join_fraction, n);
  std::vector<std::size_t> outlier_indices;
  for (auto& cluster : kept) {
    if (static_cast<std::int64_t>(cluster.size()) < min_size) {
      outlier_indices.insert(outlier_indices.end(), cluster.begin(),
                             cluster.end());
      continue;
    }
    std::vector<std::string> ids;
    ids.reserve(cluster.size());
    for (std::size_t d : cluster) ids.push_back(m.ids[d]);
    out.clusters.push_back(std::move(ids));
  }
  std::stable_sort(out.clusters.begin(), out.clusters.end(),
                   [](const auto& a, const auto& b) {
                     if (a.size() != b.size()) return a.size() > b.size();
                     return a.front() < b.front();
                   });
  std::sort(outlier_indices.begin(), outlier_indices.end());
  for (std::size_t d : outlier_indices) out.outliers.push_back(m.ids[d]);
  return out;
}

struct DayCluster {
  std::vector<std::string> members;
  Tpa model;
};

// QT result for one activity-level group: clusters with their merged models,
// plus the outlier days.
struct Clustering {
  std::vector<DayCluster> clusters;
  std::vector<std::string> outliers;
  QtParams params;
  SimilarityWeights weights;
};

// Full per-group pipeline: discover one model per day, build the similarity
// matrix, run QT, then discover one merged model per cluster from the member
// traces.
inline Clustering cluster_group(std::span<const DayTrace> group_traces,
                                const QtParams& params,
                                const SimilarityWeights& weights) {
  if (group_traces.empty()) throw DataError("cannot cluster an empty group");
  params.validate();
  weights.validate();

  std::map<std::string, const DayTrace*> by_id;
  std::vector<std::pair<std::string, Tpa>> models;
  models.reserve(group_traces.size());
  for (const auto& trace : group_traces) {
    if (!by_id.emplace(trace.date, &trace).second)
      throw DataError("duplicate day id '" + trace.date + "' in group");
    models.emplace_back(trace.date,
                        discover_tpa(std::span<const DayTrace>(&trace, 1)));
  }

  const SimilarityMatrix matrix = similarity_matrix(models, weights);
  const Partition partition = qt_cluster(matrix, params);

  Clustering out;
  out.params = params;
  out.weights = weights;
  out.outliers = partition.outliers;
  for (const auto& members : partition.clusters) {
    std::vector<DayTrace> member_traces;
    member_traces.reserve(members.size());
    for (const auto& id : members) member_traces.push_back(*by_id.at(id));
    out.clusters.push_back(DayCluster{members, discover_tpa(member_traces)});
  }
  return out;
}

inline nlohmann::json clustering_to_json(const Clustering& c) {
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& cluster : c.clusters) {
    clusters.push_back(
        {{"members", cluster.members}, {"tpa", tpa_to_json(cluster.model)}});
  }
  return {{"params",
           {{"similarity_threshold", c.params.similarity_threshold},
            {"join_fraction", c.params.join_fraction},
            {"edge_weight", c.weights.edge},
            {"node_weight", c.weights.node}}},
          {"clusters", std::move(clusters)},
          {"outliers", c.outliers}};
}

inline Clustering clustering_from_json(const nlohmann::json& j) {
  Clustering c;
  c.params.similarity_threshold = j.at("params").at("similarity_threshold");
  c.params.join_fraction = j.at("params").at("join_fraction");
  c.weights.edge = j.at("params").at("edge_weight");
  c.weights.node = j.at("params").at("node_weight");
  for (const auto& cl : j.at("clusters")) {
    DayCluster cluster;
    cluster.members = cl.at("members").get<std::vector<std::string>>();
    cluster.model = tpa_from_json(cl.at("tpa"));
    c.clusters.push_back(std::move(cluster));
  }
  c.outliers = j.at("outliers").get<std::vector<std::string>>();
  return c;
}

}  // namespace dayflow
