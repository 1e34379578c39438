// Copyright 2026 The tritrain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <unordered_set>

#include "support.hpp"
#include "tritrain/common.hpp"
#include "tritrain/dataset.hpp"

namespace tritrain {
namespace {

using testing::Rng;
using testing::TempDir;

std::set<std::string> ids_of(std::span<const Example> ex) {
  std::set<std::string> out;
  for (const auto& e : ex) out.insert(e.id);
  return out;
}

LabeledDataset balanced(std::size_t n, std::size_t k) {
  std::vector<Example> ex;
  for (std::size_t i = 0; i < n; ++i) {
    ex.push_back({"e" + std::to_string(i), {static_cast<double>(i), 1.0},
                  static_cast<ClassIndex>(i % k)});
  }
  return LabeledDataset(Alphabet::numbered(k), std::move(ex));
}

// --- blobs ---------------------------------------------------------------------

TEST_CASE("generate_blobs with one class labels everything class 0") {
  const LabeledDataset ds = generate_blobs(10, 1, 2, 5.0, 1.0, 0);
  REQUIRE(ds.size() == 10);
  for (std::size_t i = 0; i < ds.size(); ++i) CHECK(ds.label(i) == 0);
}

TEST_CASE("generate_blobs is deterministic") {
  CHECK(format_csv(generate_blobs(50, 4, 3, 4.0, 1.0, 9)) ==
        format_csv(generate_blobs(50, 4, 3, 4.0, 1.0, 9)));
  CHECK(format_csv(generate_blobs(50, 4, 3, 4.0, 1.0, 9)) !=
        format_csv(generate_blobs(50, 4, 3, 4.0, 1.0, 10)));
}

TEST_CASE("well separated blobs are nearest-center separable") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const LabeledDataset ds = generate_blobs(300, 3, 2, 10.0, 1.0, seed);
    CHECK(testing::nearest_center_accuracy(ds) >= 0.99);
  }
}

TEST_CASE("blob centers respect the separation") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const BlobGenerator gen(6, 3, 4.0, 1.0, seed);
    const auto& c = gen.centers();
    REQUIRE(c.size() == 6);
    for (std::size_t a = 0; a < c.size(); ++a) {
      for (std::size_t b = a + 1; b < c.size(); ++b) {
        double d2 = 0;
        for (std::size_t j = 0; j < 3; ++j) d2 += (c[a][j] - c[b][j]) * (c[a][j] - c[b][j]);
        CHECK(std::sqrt(d2) >= 4.0);
      }
    }
  }
}

TEST_CASE("blob streams share centers but draw different samples") {
  const BlobGenerator gen(3, 2, 10.0, 1.0, 4);
  const LabeledDataset a = gen.sample(30, 0, "a");
  const LabeledDataset b = gen.sample(30, 1, "b");
  CHECK(a[0].features != b[0].features);
  CHECK(a[0].id == "a0");
  CHECK(b[29].id == "b29");
  const LabeledDataset g = generate_blobs(30, 3, 2, 10.0, 1.0, 4);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i].features == a[i].features);
}

TEST_CASE("generate_blobs rejects bad arguments") {
  CHECK_THROWS_AS(generate_blobs(2, 3, 2, 1.0, 1.0, 0), DatasetError);
  CHECK_THROWS_AS(generate_blobs(10, 3, 2, 1.0, 0.0, 0), DatasetError);
  CHECK_THROWS_AS(generate_blobs(10, 3, 2, 1.0, -1.0, 0), DatasetError);
}

// --- holdout --------------------------------------------------------------------

TEST_CASE("holdout 70/30 on 100 examples") {
  const LabeledDataset ds = balanced(100, 4);
  const Holdout h = holdout_split(ds, 0.7, false, 3);
  CHECK(h.train.size() == 70);
  CHECK(h.pool.size() == 30);
  std::set<std::string> all = ids_of(h.train.examples());
  for (const auto& e : h.pool.examples()) {
    CHECK(all.insert(e.id).second);
    CHECK_FALSE(e.label.has_value());
  }
  CHECK(all == ids_of(ds.examples()));
  // Hidden labels are the original labels.
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (h.pool.contains(ds[i].id)) CHECK(h.pool.hidden_label(ds[i].id) == ds.label(i));
  }
}

TEST_CASE("holdout with fraction 1 leaves an empty pool") {
  const LabeledDataset ds = balanced(20, 2);
  const Holdout h = holdout_split(ds, 1.0, false, 0);
  CHECK(h.pool.empty());
  CHECK(h.train == ds);
}

TEST_CASE("stratified holdout takes exact per-class floors") {
  const LabeledDataset ds = balanced(1000, 10);
  const Holdout h = holdout_split(ds, 0.7, true, 5);
  std::map<ClassIndex, std::size_t> per_class;
  for (std::size_t i = 0; i < h.train.size(); ++i) ++per_class[h.train.label(i)];
  REQUIRE(per_class.size() == 10);
  for (const auto& [c, n] : per_class) CHECK(n == 70);
}

TEST_CASE("stratified holdout preserves proportions within one example per class") {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + testing::uniform(rng, 5);
    const std::size_t n = k + testing::uniform(rng, 200);
    std::vector<Example> ex;
    for (std::size_t i = 0; i < n; ++i) {
      ex.push_back({"x" + std::to_string(i), {0.0}, static_cast<ClassIndex>(testing::uniform(rng, k))});
    }
    const LabeledDataset ds(Alphabet::numbered(k), std::move(ex));
    const double f = 0.05 + 0.95 * std::uniform_real_distribution<double>(0, 1)(rng);
    const Holdout h = holdout_split(ds, f, true, trial);
    std::vector<double> total(k), taken(k);
    for (std::size_t i = 0; i < ds.size(); ++i) total[ds.label(i)] += 1;
    for (std::size_t i = 0; i < h.train.size(); ++i) taken[h.train.label(i)] += 1;
    for (std::size_t c = 0; c < k; ++c) CHECK(std::abs(taken[c] - f * total[c]) <= 1.0);
    CHECK(h.train.size() + h.pool.size() == n);
  }
}

TEST_CASE("holdout is deterministic per seed") {
  const LabeledDataset ds = balanced(60, 3);
  CHECK(holdout_split(ds, 0.5, false, 1).train == holdout_split(ds, 0.5, false, 1).train);
  CHECK(holdout_split(ds, 0.5, false, 1).pool == holdout_split(ds, 0.5, false, 1).pool);
  CHECK_FALSE(holdout_split(ds, 0.5, false, 1).train == holdout_split(ds, 0.5, false, 2).train);
}

TEST_CASE("holdout rejects empty input and bad fractions") {
  CHECK_THROWS_AS(holdout_split(LabeledDataset(Alphabet::numbered(2), {}), 0.7, false, 0), DatasetError);
  const LabeledDataset ds = balanced(10, 2);
  CHECK_THROWS_AS(holdout_split(ds, 0.0, false, 0), DatasetError);
  CHECK_THROWS_AS(holdout_split(ds, 1.5, false, 0), DatasetError);
  CHECK_THROWS_AS(holdout_split(ds, -0.1, false, 0), DatasetError);
}

// --- three-way split ----------------------------------------------------------------

TEST_CASE("disjoint thirds of 9 are 3,3,3 and partition the base") {
  const LabeledDataset ds = balanced(9, 3);
  const ThreeParts parts = three_way_split(ds, SplitMode::DisjointThirds, 2);
  std::set<std::string> all;
  for (const auto& p : parts) {
    CHECK(p.size() == 3);
    for (const auto& e : p.examples()) CHECK(all.insert(e.id).second);
  }
  CHECK(all == ids_of(ds.examples()));
}

TEST_CASE("disjoint thirds round-trip for random sizes") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + testing::uniform(rng, 100);
    const LabeledDataset ds = balanced(n, 3);
    const ThreeParts parts = three_way_split(ds, SplitMode::DisjointThirds, trial);
    std::vector<Example> joined;
    std::size_t lo = n, hi = 0;
    for (const auto& p : parts) {
      lo = std::min(lo, p.size());
      hi = std::max(hi, p.size());
      joined.insert(joined.end(), p.examples().begin(), p.examples().end());
    }
    CHECK(hi - lo <= 1);
    std::vector<Example> base(ds.examples().begin(), ds.examples().end());
    auto by_id = [](const Example& a, const Example& b) { return a.id < b.id; };
    std::sort(joined.begin(), joined.end(), by_id);
    std::sort(base.begin(), base.end(), by_id);
    CHECK(joined == base);
  }
}

TEST_CASE("bootstrap split is deterministic") {
  const LabeledDataset ds = balanced(50, 2);
  const ThreeParts a = three_way_split(ds, SplitMode::Bootstrap, 8);
  const ThreeParts b = three_way_split(ds, SplitMode::Bootstrap, 8);
  for (int m = 0; m < 3; ++m) CHECK(a[m] == b[m]);
  CHECK_FALSE(a[0] == a[1]);
}

TEST_CASE("bootstrap parts hold about 1 - 1/e distinct ids") {
  // Oracle: expected distinct count of n draws with replacement from n items.
  const std::size_t n = 10000;
  const double expected = n * (1.0 - std::pow(1.0 - 1.0 / n, static_cast<double>(n)));
  CHECK(expected == doctest::Approx(6321.0).epsilon(0.001));
  // Independent simulation of the same quantity.
  Rng rng(99);
  std::unordered_set<std::size_t> seen;
  for (std::size_t i = 0; i < n; ++i) seen.insert(testing::uniform(rng, n));
  CHECK(std::abs(static_cast<double>(seen.size()) - expected) <= 0.02 * expected);

  const LabeledDataset ds = balanced(n, 2);
  const ThreeParts parts = three_way_split(ds, SplitMode::Bootstrap, 1);
  for (const auto& p : parts) {
    CHECK(std::abs(static_cast<double>(p.size()) - expected) <= 0.02 * expected);
    CHECK(ids_of(p.examples()).size() == p.size());
  }
}

TEST_CASE("three_way_split needs three examples") {
  CHECK_THROWS_AS(three_way_split(balanced(2, 2), SplitMode::DisjointThirds, 0), DatasetError);
  CHECK_THROWS_AS(three_way_split(balanced(2, 2), SplitMode::Bootstrap, 0), DatasetError);
}

// --- augmentation -----------------------------------------------------------------------

TEST_CASE("empty selections leave train and pool unchanged") {
  const Holdout h = holdout_split(balanced(100, 2), 0.7, false, 0);
  const Augmented a = apply_augmentation(h.train, h.pool, {});
  CHECK(a.train == h.train);
  CHECK(a.pool == h.pool);
}

TEST_CASE("five selections move five examples") {
  const Holdout h = holdout_split(balanced(100, 2), 0.7, false, 0);
  std::vector<Selection> sel;
  for (std::size_t i = 0; i < 5; ++i) {
    sel.push_back({h.pool.examples()[i * 3].id, 1, Provenance::Predicted});
  }
  const Augmented a = apply_augmentation(h.train, h.pool, sel);
  CHECK(a.train.size() == 75);
  CHECK(a.pool.size() == 25);
  const auto train_ids = ids_of(a.train.examples());
  for (const auto& e : a.pool.examples()) CHECK(train_ids.count(e.id) == 0);
  for (const auto& s : sel) {
    CHECK(train_ids.count(s.id) == 1);
    CHECK_FALSE(a.pool.contains(s.id));
  }
  // Assigned labels, not hidden ones, land in train.
  for (std::size_t i = 0; i < a.train.size(); ++i) {
    for (const auto& s : sel) {
      if (a.train[i].id == s.id) CHECK(a.train.label(i) == 1);
    }
  }
}

TEST_CASE("augmentation rejects consumed and duplicate ids") {
  const Holdout h = holdout_split(balanced(30, 2), 0.7, false, 0);
  const std::string id = h.pool.examples()[0].id;
  const Augmented a = apply_augmentation(h.train, h.pool, std::vector<Selection>{{id, 0, Provenance::GroundTruth}});
  CHECK_THROWS_AS(apply_augmentation(a.train, a.pool, std::vector<Selection>{{id, 0, Provenance::GroundTruth}}),
                  DatasetError);
  const std::string other = h.pool.examples()[1].id;
  CHECK_THROWS_AS(apply_augmentation(h.train, h.pool,
                                     std::vector<Selection>{{other, 0, Provenance::GroundTruth},
                                                            {other, 1, Provenance::GroundTruth}}),
                  DatasetError);
}

TEST_CASE("conservation over random augmentation sequences") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 10 + testing::uniform(rng, 90);
    Holdout h = holdout_split(balanced(n, 3), 0.5, false, trial);
    LabeledDataset train = h.train;
    UnlabeledPool pool = h.pool;
    while (!pool.empty()) {
      const std::size_t take = testing::uniform(rng, pool.size() + 1);
      std::vector<std::size_t> idx(pool.size());
      std::iota(idx.begin(), idx.end(), 0);
      std::shuffle(idx.begin(), idx.end(), rng);
      std::vector<Selection> sel;
      for (std::size_t i = 0; i < take; ++i) {
        sel.push_back({pool.examples()[idx[i]].id, static_cast<ClassIndex>(testing::uniform(rng, 3)),
                       Provenance::Predicted});
      }
      Augmented a = apply_augmentation(train, pool, sel);
      CHECK(a.train.size() + a.pool.size() == n);
      CHECK(a.train.size() == train.size() + take);
      const auto tids = ids_of(a.train.examples());
      for (const auto& e : a.pool.examples()) CHECK(tids.count(e.id) == 0);
      train = std::move(a.train);
      pool = std::move(a.pool);
    }
    CHECK(train.size() == n);
  }
}

// --- CSV ----------------------------------------------------------------------------

TEST_CASE("CSV round trip is exact") {
  TempDir dir;
  const LabeledDataset ds = generate_blobs(40, 3, 4, 3.0, 1.0, 2);
  write_csv(ds, dir / "d.csv");
  const LabeledDataset back = load_csv(dir / "d.csv");
  CHECK(back == ds);
  write_unlabeled_csv(ds.examples(), dir / "u.csv");
  const auto pool = load_unlabeled_csv(dir / "u.csv");
  REQUIRE(pool.size() == ds.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    CHECK(pool[i].id == ds[i].id);
    CHECK(pool[i].features == ds[i].features);
    CHECK_FALSE(pool[i].label.has_value());
  }
}

TEST_CASE("CSV ingestion infers the alphabet") {
  TempDir dir;
  testing::write_text(dir / "n.csv", "x,label\n1,10\n2,2\n3,2\n");
  const LabeledDataset num = load_csv(dir / "n.csv");
  CHECK(num.alphabet().names() == std::vector<std::string>{"2", "10"});
  CHECK(num[0].id == "row1");
  CHECK(num.dim() == 1);
  testing::write_text(dir / "s.csv", "id,label,a,b\nq,dog,1,2\nr,cat,3,4\n");
  const LabeledDataset str = load_csv(dir / "s.csv");
  CHECK(str.alphabet().names() == std::vector<std::string>{"cat", "dog"});
  CHECK(str[0].id == "q");
  CHECK(str.label(0) == 1);
  const LabeledDataset over = load_csv(dir / "s.csv", "label", Alphabet({"dog", "cat", "bird"}));
  CHECK(over.alphabet().size() == 3);
  CHECK(over.label(0) == 0);
  CHECK_THROWS_AS(load_csv(dir / "s.csv", "label", Alphabet({"dog"})), DatasetError);
}

TEST_CASE("CSV ingestion rejects malformed input") {
  TempDir dir;
  testing::write_text(dir / "empty.csv", "");
  CHECK_THROWS_AS(load_csv(dir / "empty.csv"), DatasetError);
  testing::write_text(dir / "header.csv", "id,label,x\n");
  CHECK_THROWS_AS(load_csv(dir / "header.csv"), DatasetError);
  testing::write_text(dir / "missing.csv", "id,label,x\na,0,\n");
  CHECK_THROWS_AS(load_csv(dir / "missing.csv"), DatasetError);
  testing::write_text(dir / "text.csv", "id,label,x\na,0,abc\n");
  CHECK_THROWS_AS(load_csv(dir / "text.csv"), DatasetError);
  testing::write_text(dir / "ragged.csv", "id,label,x\na,0,1,2\n");
  CHECK_THROWS_AS(load_csv(dir / "ragged.csv"), DatasetError);
  testing::write_text(dir / "dup.csv", "id,label,x\na,0,1\na,1,2\n");
  CHECK_THROWS_AS(load_csv(dir / "dup.csv"), DatasetError);
  testing::write_text(dir / "nolabel.csv", "id,x\na,1\n");
  CHECK_THROWS_AS(load_csv(dir / "nolabel.csv"), DatasetError);
  CHECK_THROWS_AS(load_csv(dir / "absent.csv"), DatasetError);
}

TEST_CASE("split mode and provenance names round trip") {
  for (SplitMode m : {SplitMode::DisjointThirds, SplitMode::Bootstrap}) {
    CHECK(parse_split_mode(split_mode_name(m)) == m);
  }
  CHECK(parse_split_mode("thirds") == SplitMode::DisjointThirds);
  CHECK_FALSE(parse_split_mode("halves").has_value());
  for (Provenance p : {Provenance::GroundTruth, Provenance::Predicted}) {
    CHECK(parse_provenance(provenance_name(p)) == p);
  }
}

}  // namespace
}  // namespace tritrain
