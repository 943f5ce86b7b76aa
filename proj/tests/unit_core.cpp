#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include "core/features.hpp"
#include "core/intent_dist.hpp"
#include "core/preprocess.hpp"
#include "core/taxonomy.hpp"
#include "core/trace_io.hpp"
#include "core/util.hpp"

using namespace ipd;

namespace {

MultimodalSample random_sample(std::mt19937_64& rng, double t) {
  std::uniform_real_distribution<float> u(-3.0f, 3.0f);
  std::uniform_int_distribution<int> ev(0, kNumIntEvents - 1);
  std::uniform_int_distribution<int> ap(0, kNumApps - 1);
  MultimodalSample s;
  s.t = t;
  for (auto& v : s.imu) v = u(rng);
  for (auto& v : s.sys) v = std::abs(u(rng));
  s.int_rate = std::abs(u(rng));
  s.int_event = static_cast<IntEvent>(ev(rng));
  s.app = static_cast<App>(ap(rng));
  return s;
}

SessionTrace random_trace(uint64_t seed, int n, double rate_hz) {
  std::mt19937_64 rng(seed);
  SessionTrace t;
  t.user_id = "u_test";
  t.session_id = "s_test";
  t.subaction = Subaction::ViewEmails;
  t.platform = App::Gmail;
  t.rate_hz = rate_hz;
  for (int i = 0; i < n; ++i) t.samples.push_back(random_sample(rng, i / rate_hz));
  return t;
}

}  // namespace

TEST_CASE("taxonomy: three levels partition and map consistently") {
  CHECK(class_count(Granularity::Category) == 5);
  CHECK(class_count(Granularity::Action) == 9);
  CHECK(class_count(Granularity::Subaction) == 28);

  // Every subaction maps to exactly one action and category; NIO stays NIO.
  std::set<int> seen;
  for (int i = 0; i < kNumSubactions; ++i) {
    const auto s = static_cast<Subaction>(i);
    const TaxonomyLabel l = label_of(s);
    CHECK(l.subaction == s);
    CHECK(l.action == action_of(s));
    CHECK(l.category == category_of(l.action));
    seen.insert(class_index(l, Granularity::Subaction));
    CHECK((l.subaction == Subaction::Nio) == (l.category == Category::Nio));
  }
  CHECK(static_cast<int>(seen.size()) == kNumSubactions);

  // Name round-trips at every level.
  for (int i = 0; i < kNumSubactions; ++i) {
    const auto s = static_cast<Subaction>(i);
    CHECK(subaction_from_name(name(s)) == s);
  }
  for (int i = 0; i < kNumActions; ++i) {
    const auto a = static_cast<Action>(i);
    CHECK(action_from_name(name(a)) == a);
  }
  for (int i = 0; i < kNumCategories; ++i) {
    const auto c = static_cast<Category>(i);
    CHECK(category_from_name(name(c)) == c);
  }
  CHECK_THROWS_AS((void)subaction_from_name("NotASubaction"), std::invalid_argument);

  // taxonomy_lookup agrees with the enum mapping.
  const auto [act, cat] = taxonomy_lookup(name(Subaction::DeleteEmails));
  CHECK(act == std::string(name(action_of(Subaction::DeleteEmails))));
  CHECK(cat == std::string(name(category_of(action_of(Subaction::DeleteEmails)))));

  // NIO class index is consistent at each granularity.
  for (Granularity g :
       {Granularity::Category, Granularity::Action, Granularity::Subaction}) {
    const int nio = nio_class_index(g);
    CHECK(class_index(label_of(Subaction::Nio), g) == nio);
    // Class names are unique.
    std::set<std::string> names;
    for (int c = 0; c < class_count(g); ++c) names.emplace(class_name(g, c));
    CHECK(static_cast<int>(names.size()) == class_count(g));
  }
}

TEST_CASE("features: encode layout and exact enum round-trip") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const MultimodalSample s = random_sample(rng, 0.0);
    const FeatureVector v = encode_sample(s);
    for (int i = 0; i < kImuDim; ++i) CHECK(v[static_cast<size_t>(i)] == s.imu[static_cast<size_t>(i)]);
    for (int i = 0; i < kSysDim; ++i) CHECK(v[static_cast<size_t>(kImuDim + i)] == s.sys[static_cast<size_t>(i)]);
    CHECK(v[kIntRateIndex] == s.int_rate);
    CHECK(decode_event(v) == s.int_event);
    CHECK(decode_app(v) == s.app);
    // One-hot blocks: event block sums to 1, app block to 1 unless Other.
    float ev_sum = 0.0f, app_sum = 0.0f;
    for (int i = 0; i < kEventOneHotSlots; ++i) ev_sum += v[static_cast<size_t>(kEventOneHotBegin + i)];
    for (int i = 0; i < kAppOneHotSlots; ++i) app_sum += v[static_cast<size_t>(kAppOneHotBegin + i)];
    CHECK(ev_sum == 1.0f);
    CHECK(app_sum == (s.app == App::Other ? 0.0f : 1.0f));
  }
  // NaN rejected.
  MultimodalSample bad;
  bad.imu[0] = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS((void)encode_sample(bad), std::invalid_argument);

  // Identity/intent masks partition the layout.
  CHECK(kIdentityDim + kIntentDim == kFeatureDim);
  for (int i = 0; i < kFeatureDim; ++i) {
    CHECK(is_one_hot_dim(i) == (i >= kEventOneHotBegin));
  }
}

TEST_CASE("normalizer: range property and constant-feature rule") {
  std::mt19937_64 rng(11);
  std::vector<FeatureVector> vecs;
  for (int i = 0; i < 300; ++i) vecs.push_back(encode_sample(random_sample(rng, 0.0)));
  const NormalizationParams p = fit_normalizer(vecs);
  for (const auto& v : vecs) {
    const FeatureVector n = apply_normalizer(p, v);
    for (float x : n) {
      CHECK(x >= 0.0f);
      CHECK(x <= 1.0f);
    }
  }
  // Out-of-range values clamp.
  FeatureVector big{};
  big.fill(1e6f);
  const FeatureVector n = apply_normalizer(p, big);
  for (int i = 0; i < kIdentityDim; ++i) CHECK(n[static_cast<size_t>(i)] == 1.0f);

  // A constant column maps to 0.
  std::vector<FeatureVector> flat(5, vecs[0]);
  const NormalizationParams pf = fit_normalizer(flat);
  const FeatureVector nf = apply_normalizer(pf, vecs[0]);
  for (int i = 0; i < kIdentityDim; ++i) CHECK(nf[static_cast<size_t>(i)] == 0.0f);
  CHECK_THROWS_AS((void)fit_normalizer({}), std::invalid_argument);
}

TEST_CASE("resample_zoh: brute-force oracle over random irregular traces") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> gap(0.001, 0.4);
  for (int trial = 0; trial < 50; ++trial) {
    SessionTrace t = random_trace(1000 + static_cast<uint64_t>(trial), 1, 20.0);
    double at = t.samples[0].t;
    const int extra = 5 + static_cast<int>(rng() % 120);
    for (int i = 0; i < extra; ++i) {
      at += gap(rng);
      t.samples.push_back(random_sample(rng, at));
    }
    const double hz = 1.0 + static_cast<double>(rng() % 40);
    const SessionTrace g = resample_zoh(t, hz);

    // Expected sample count.
    const double t0 = t.samples.front().t, t1 = t.samples.back().t;
    CHECK(static_cast<int>(g.samples.size()) ==
          static_cast<int>(std::floor((t1 - t0) * hz)) + 1);
    // Each grid point must equal the latest source sample at or before it.
    for (size_t k = 0; k < g.samples.size(); ++k) {
      const double gt = t0 + static_cast<double>(k) / hz;
      const MultimodalSample* last = nullptr;
      for (const auto& s : t.samples) {
        if (s.t <= gt + 1e-9) last = &s;
      }
      REQUIRE(last != nullptr);
      CHECK(g.samples[k].imu[0] == last->imu[0]);
      CHECK(g.samples[k].app == last->app);
      CHECK(g.samples[k].int_event == last->int_event);
      CHECK(g.samples[k].t == doctest::Approx(gt).epsilon(1e-12));
    }
  }
  SessionTrace empty;
  CHECK_THROWS(resample_zoh(empty, 20.0));
  SessionTrace one = random_trace(5, 3, 20.0);
  std::swap(one.samples[0], one.samples[2]);  // unsorted
  CHECK_THROWS(resample_zoh(one, 20.0));
}

TEST_CASE("make_windows: count enumeration and content oracle") {
  // Window count = floor((n - span*rate) / (stride*rate)) + 1 over a grid of
  // n samples; verified for every n in 0..130 at the default geometry.
  for (int n = 0; n <= 130; ++n) {
    SessionTrace t = random_trace(77, std::max(n, 1), 20.0);
    t.samples.resize(static_cast<size_t>(n));
    const std::vector<Window> w = make_windows(t, 2.0, 1.0, 20.0);
    const int span = 40, stride = 20;
    const int expect = n < span ? 0 : (n - span) / stride + 1;
    CHECK_THROWS(make_windows(t, -2.0, 1.0, 20.0));
    CHECK_THROWS(make_windows(t, 2.0, 0.0, 20.0));
    CHECK_THROWS(make_windows(t, 0.001, 0.001, 20.0));  // below one sample
    CHECK(static_cast<int>(w.size()) == expect);
    for (size_t i = 0; i < w.size(); ++i) {
      CHECK(static_cast<int>(w[i].rows.size()) == span);
      CHECK(w[i].source_offset == static_cast<int>(i) * stride);
      CHECK(w[i].t_start ==
            doctest::Approx(t.samples[static_cast<size_t>(w[i].source_offset)].t));
      // Rows are the encoded grid samples.
      for (int r = 0; r < span; r += 13) {
        const FeatureVector expect_row =
            encode_sample(t.samples[static_cast<size_t>(w[i].source_offset + r)]);
        CHECK(w[i].rows[static_cast<size_t>(r)] == expect_row);
      }
    }
  }
}

TEST_CASE("trace io: jsonl round-trip is value-faithful to 1e-4 and byte-stable") {
  namespace fs = std::filesystem;
  fs::create_directories("data");
  const SessionTrace t = random_trace(99, 64, 20.0);
  write_session_jsonl(t, "data/roundtrip.jsonl");
  const SessionTrace r = read_session_jsonl("data/roundtrip.jsonl");
  REQUIRE(r.samples.size() == t.samples.size());
  CHECK(r.user_id == t.user_id);
  CHECK(r.session_id == t.session_id);
  CHECK(r.subaction == t.subaction);
  // Platform is re-derived on read as the dominant non-Other app.
  std::array<int, kNumApps> counts{};
  for (const auto& s : t.samples) counts[static_cast<size_t>(s.app)]++;
  int dominant = static_cast<int>(App::Other), best = 0;
  for (int a = 0; a < kNumApps - 1; ++a) {
    if (counts[static_cast<size_t>(a)] > best) {
      dominant = a;
      best = counts[static_cast<size_t>(a)];
    }
  }
  CHECK(static_cast<int>(r.platform) == dominant);
  // Values survive to within the 1e-4 serialization quantum.
  for (size_t i = 0; i < t.samples.size(); ++i) {
    CHECK(std::abs(r.samples[i].t - t.samples[i].t) < 1e-4);
    for (size_t d = 0; d < kImuDim; ++d) {
      CHECK(std::abs(r.samples[i].imu[d] - t.samples[i].imu[d]) < 1e-4f);
    }
    for (size_t d = 0; d < kSysDim; ++d) {
      CHECK(std::abs(r.samples[i].sys[d] - t.samples[i].sys[d]) < 1e-4f);
    }
    CHECK(std::abs(r.samples[i].int_rate - t.samples[i].int_rate) < 1e-4f);
    CHECK(r.samples[i].int_event == t.samples[i].int_event);
    CHECK(r.samples[i].app == t.samples[i].app);
  }
  // Writing the reread trace reproduces the file byte for byte.
  write_session_jsonl(r, "data/roundtrip2.jsonl");
  std::ifstream a("data/roundtrip.jsonl", std::ios::binary);
  std::ifstream b("data/roundtrip2.jsonl", std::ios::binary);
  const std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  const std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  CHECK_THROWS(read_session_jsonl("data/does_not_exist.jsonl"));
}

TEST_CASE("topk: sort oracle on random distributions") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    IntentDistribution d;
    d.granularity = Granularity::Subaction;
    d.nio_index = nio_class_index(Granularity::Subaction);
    const int C = 2 + static_cast<int>(rng() % 27);
    double sum = 0.0;
    for (int c = 0; c < C; ++c) {
      d.probs.push_back(u(rng));
      sum += d.probs.back();
    }
    for (double& p : d.probs) p /= sum;
    const int k = 1 + static_cast<int>(rng() % C);
    const auto got = topk(d, k);
    REQUIRE(static_cast<int>(got.size()) == k);
    // Oracle: stable index sort by descending probability.
    std::vector<int> idx(static_cast<size_t>(C));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
      return d.probs[static_cast<size_t>(a)] > d.probs[static_cast<size_t>(b)];
    });
    for (int i = 0; i < k; ++i) {
      CHECK(got[static_cast<size_t>(i)].first == idx[static_cast<size_t>(i)]);
      CHECK(got[static_cast<size_t>(i)].second ==
            d.probs[static_cast<size_t>(idx[static_cast<size_t>(i)])]);
    }
    CHECK_THROWS_AS((void)topk(d, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)topk(d, C + 1), std::invalid_argument);
  }
  // Tie-break: equal probabilities resolve to the smaller index.
  IntentDistribution tie;
  tie.probs = {0.25, 0.25, 0.25, 0.25};
  const auto got = topk(tie, 4);
  for (int i = 0; i < 4; ++i) CHECK(got[static_cast<size_t>(i)].first == i);
}

TEST_CASE("util: derive_seed and hex64 are stable and distinct") {
  CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
  CHECK(derive_seed(1, "a") != derive_seed(2, "a"));
  CHECK(derive_seed(1, "a", 0) != derive_seed(1, "a", 1));
  CHECK(derive_seed(1, "a") == derive_seed(1, "a"));
  CHECK(hex64(0) == "0000000000000000");
  CHECK(hex64(0xdeadbeefull) == "00000000deadbeef");
  CHECK(fnv1a64("abc") == fnv1a64("abc"));
  CHECK(fnv1a64("abc") != fnv1a64("abd"));
}
