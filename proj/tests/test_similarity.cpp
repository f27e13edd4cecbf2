#include <doctest.h>

#include "dayflow/rng.hpp"
#include "dayflow/similarity.hpp"

using namespace dayflow;

namespace {

DayTrace make_trace(const std::string& date,
                    std::vector<std::pair<std::string, std::int64_t>> visits) {
  DayTrace t;
  t.date = date;
  t.subject = "p1";
  Instant entry = parse_instant(date + "T00:00:00Z");
  for (auto& [loc, dwell] : visits) {
    t.events.push_back(DayVisit{loc, entry, dwell});
    entry += dwell;
  }
  return t;
}

Tpa random_tpa(Rng& rng, int day_index, int room_base = 0) {
  static const char* rooms[] = {"Bedroom", "Kitchen", "LivingRoom", "Bathroom",
                                "Entrance", "Study", "Garage", "Garden"};
  char date[16];
  std::snprintf(date, sizeof date, "2020-%02d-%02d", 1 + day_index / 28,
                1 + day_index % 28);
  std::int64_t budget = kSecondsPerDay;
  std::vector<std::pair<std::string, std::int64_t>> visits;
  std::string prev;
  while (budget > 0) {
    std::string loc = rooms[room_base + rng.uniform_int(4)];
    while (loc == prev) loc = rooms[room_base + rng.uniform_int(4)];
    std::int64_t dwell = std::min<std::int64_t>(600 + rng.uniform_int(6 * 3600),
                                                budget);
    visits.emplace_back(loc, dwell);
    budget -= dwell;
    prev = loc;
  }
  return discover_tpa({make_trace(date, std::move(visits))});
}

// Naive re-statement of the metric for the brute-force matrix oracle.
double naive_similarity(const Tpa& a, const Tpa& b, const SimilarityWeights& w) {
  auto shares = [](const Tpa& t) {
    std::map<Transition, double> s;
    double total = 0;
    for (const auto& [tr, c] : t.transitions) total += static_cast<double>(c);
    for (const auto& [tr, c] : t.transitions)
      s[tr] = static_cast<double>(c) / total;
    return s;
  };
  const auto ea = shares(a);
  const auto eb = shares(b);
  std::map<Transition, double> all = ea;
  for (const auto& [k, v] : eb) all.try_emplace(k, 0.0);
  double diff = 0, mass = 0;
  for (const auto& [k, va] : all) {
    const double x = ea.count(k) ? ea.at(k) : 0.0;
    const double y = eb.count(k) ? eb.at(k) : 0.0;
    diff += std::abs(x - y);
    mass += x + y;
  }
  const double se = 1.0 - diff / mass;
  const auto pa = duration_profile(a);
  const auto pb = duration_profile(b);
  std::map<std::string, double> locs = pa;
  for (const auto& [k, v] : pb) locs.try_emplace(k, 0.0);
  double ldiff = 0;
  for (const auto& [k, v] : locs) {
    const double x = pa.count(k) ? pa.at(k) : 0.0;
    const double y = pb.count(k) ? pb.at(k) : 0.0;
    ldiff += std::abs(x - y);
  }
  const double sn = 1.0 - 0.5 * ldiff;
  return w.edge * se + w.node * sn;
}

}  // namespace

TEST_CASE("identical models score 1.0") {
  Rng rng(5);
  const Tpa a = random_tpa(rng, 1);
  CHECK(tpa_similarity(a, a, SimilarityWeights{}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("disjoint vocabularies score 0.0") {
  Rng rng(6);
  const Tpa a = random_tpa(rng, 1, 0);
  const Tpa b = random_tpa(rng, 2, 4);  // rooms 4..7, disjoint from 0..3
  CHECK(tpa_similarity(a, b, SimilarityWeights{}) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("hand-evaluated two-edge example scores 0.75") {
  // a: one edge A->B with share 1; b: A->B and B->A with share 0.5 each.
  // S_e = 1 - (|1-0.5| + |0-0.5|) / 2 = 0.5; equal profiles give S_n = 1;
  // sim = 0.5*0.5 + 0.5*1 = 0.75.
  std::map<Transition, double> ea = {{{"A", "B"}, 1.0}};
  std::map<Transition, double> eb = {{{"A", "B"}, 0.5}, {{"B", "A"}, 0.5}};
  std::map<std::string, double> prof = {{"A", 0.5}, {"B", 0.5}};
  CHECK(weighted_similarity(ea, eb, prof, prof, SimilarityWeights{}) ==
        doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("degenerate weights are rejected") {
  CHECK_THROWS_AS((SimilarityWeights{0.0, 0.0}.validate()), ConfigError);
  CHECK_THROWS_AS((SimilarityWeights{0.7, 0.7}.validate()), ConfigError);
  CHECK_THROWS_AS((SimilarityWeights{-0.2, 1.2}.validate()), ConfigError);
  CHECK_NOTHROW((SimilarityWeights{1.0, 0.0}.validate()));
}

TEST_CASE("metric properties on random model pairs") {
  Rng rng(42);
  for (int i = 0; i < 300; ++i) {
    const Tpa a = random_tpa(rng, i % 300);
    const Tpa b = random_tpa(rng, (i + 7) % 300);
    const double ew = 0.05 + 0.9 * rng.uniform01();
    const SimilarityWeights w{ew, 1.0 - ew};
    const double ab = tpa_similarity(a, b, w);
    const double ba = tpa_similarity(b, a, w);
    CHECK(ab == ba);                       // symmetry, bitwise
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(tpa_similarity(a, a, w) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("scale invariance: duplicating all traces leaves similarity fixed") {
  Rng rng(43);
  for (int i = 0; i < 50; ++i) {
    const Tpa a = random_tpa(rng, i);
    const Tpa b = random_tpa(rng, i + 100);
    // merge_tpa(a, a) doubles every raw frequency in a.
    const double before = tpa_similarity(a, b, SimilarityWeights{});
    const double after = tpa_similarity(merge_tpa(a, a), b, SimilarityWeights{});
    CHECK(after == doctest::Approx(before).epsilon(1e-9));
  }
}

TEST_CASE("mixing edge shares toward the other model raises edge similarity") {
  // Interpolate share vectors directly through the core metric.
  std::map<Transition, double> ea = {{{"A", "B"}, 0.8}, {{"B", "A"}, 0.2}};
  std::map<Transition, double> eb = {{{"A", "B"}, 0.2}, {{"B", "A"}, 0.8}};
  std::map<std::string, double> prof = {{"A", 0.5}, {"B", 0.5}};
  const SimilarityWeights w{1.0, 0.0};
  double prev = weighted_similarity(ea, eb, prof, prof, w);
  for (double t = 0.2; t <= 1.0001; t += 0.2) {
    std::map<Transition, double> mixed;
    for (const auto& [k, v] : ea)
      mixed[k] = (1.0 - t) * v + t * eb.at(k);
    const double sim = weighted_similarity(mixed, eb, prof, prof, w);
    CHECK(sim > prev);
    prev = sim;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("matrix: trivial shapes") {
  Rng rng(44);
  SUBCASE("one model gives the 1x1 identity") {
    const SimilarityMatrix m =
        similarity_matrix({{"2020-01-01", random_tpa(rng, 0)}}, SimilarityWeights{});
    REQUIRE(m.size() == 1);
    CHECK(m.at(0, 0) == 1.0);
  }
  SUBCASE("duplicated model shows up as an off-diagonal 1.0") {
    const Tpa a = random_tpa(rng, 1);
    const Tpa b = random_tpa(rng, 2);
    const SimilarityMatrix m = similarity_matrix(
        {{"2020-01-01", a}, {"2020-01-02", b}, {"2020-01-03", a}},
        SimilarityWeights{});
    REQUIRE(m.size() == 3);
    CHECK(m.at(0, 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.at(2, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.at(0, 1) < 1.0);
  }
}

TEST_CASE("matrix equals naive pairwise recomputation") {
  Rng rng(45);
  std::vector<std::pair<std::string, Tpa>> models;
  for (int i = 0; i < 5; ++i) {
    char date[16];
    std::snprintf(date, sizeof date, "2020-01-%02d", i + 1);
    models.emplace_back(date, random_tpa(rng, i));
  }
  const SimilarityWeights w{0.5, 0.5};
  const SimilarityMatrix m = similarity_matrix(models, w);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      const double expected =
          i == j ? 1.0
                 : naive_similarity(models[i].second, models[j].second, w);
      CHECK(m.at(i, j) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("matrix CSV export carries ids and the diagonal") {
  Rng rng(46);
  const SimilarityMatrix m = similarity_matrix(
      {{"2020-01-01", random_tpa(rng, 0)}, {"2020-01-02", random_tpa(rng, 1)}},
      SimilarityWeights{});
  const std::string csv = matrix_to_csv(m);
  CHECK(csv.find("day,2020-01-01,2020-01-02") == 0);
  CHECK(csv.find("2020-01-01,1.000000000,") != std::string::npos);
}
