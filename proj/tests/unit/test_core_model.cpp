#include "support.hpp"

#include "poserefer/dataset_io.hpp"
#include "poserefer/error.hpp"
#include "poserefer/validation.hpp"
#include "poserefer/vocabulary.hpp"

#include <doctest.h>

#include <cctype>
#include <fstream>

using namespace poserefer;

namespace {

PoseFrame still_frame() {
  PoseFrame f;
  for (Channel c : kAllChannels) f[c] = {Vec3(1, 0, 0), Vec3(0, 0, 1)};
  return f;
}

// One room, two objects, one 30-frame reference.
Dataset small_dataset() {
  Dataset d;
  Scene s;
  s.room_id = "room_a";
  s.objects.push_back({"o1", Vec3(2, 0, 1), "RedVase", "vase"});
  s.objects.push_back({"o2", Vec3(0, 2, 1), "Chair", "chair"});
  d.scenes[s.room_id] = s;
  PoseTrack t;
  t.ref_id = "r1";
  t.frames.assign(30, still_frame());
  d.tracks[t.ref_id] = t;
  ReferenceEvent e;
  e.ref_id = "r1";
  e.room_id = "room_a";
  e.utterance_key = "the vase";
  e.phrase_start_s = 0.2;
  e.phrase_end_s = 0.6;
  e.hold_frame = 12;
  e.target_id = "o1";
  d.events.push_back(e);
  return d;
}

EmbeddingStore store_with(const std::string& key) {
  EmbeddingStore st(4);
  st.insert(key, Eigen::VectorXd::Ones(4));
  return st;
}

}  // namespace

TEST_CASE("normalize_category examples") {
  CategoryVocabulary vocab;
  CHECK(vocab.normalize("RedVase") == "vase");
  CHECK(vocab.normalize("vase") == "vase");
  CategoryVocabulary small_only({"small"});
  CHECK(small_only.normalize("SmallDiningTable") == "dining table");
  CHECK(small_only.canonical().count("dining table") == 1);
  CHECK(vocab.normalize("TVStand") == "tv stand");
  CHECK(vocab.normalize("coffee_table") == "coffee table");
}

TEST_CASE("normalize_category rejects all-modifier labels") {
  CategoryVocabulary vocab;
  CHECK_THROWS_AS(vocab.normalize("RedSmall"), ValidationError);
  CHECK_THROWS_AS(vocab.normalize(""), std::invalid_argument);
  auto c = vocab.canonicalize("RedSmall");
  CHECK(c.fell_back);
  CHECK(c.category == "red small");
}

TEST_CASE("lexicon and canonical set stay disjoint") {
  CategoryVocabulary vocab;
  vocab.normalize("BlueMug");
  vocab.normalize("WoodenShelf");
  for (const auto& c : vocab.canonical()) CHECK(vocab.modifier_lexicon().count(c) == 0);
}

TEST_CASE("normalize_category is idempotent and lowercase (property)") {
  const std::vector<std::string> pieces = {"Red", "Vase", "small", "Dining", "Table", "wood",
                                           "TV",  "Stand", "42",   "_",      "Glass", "lamp",
                                           "X",   "Big",   "-",    "Shelf",  "Tiny",  "cup"};
  CategoryVocabulary vocab;
  Rng rng(11);
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    std::string raw;
    const auto len = 1 + rng.below(4);
    for (std::uint64_t k = 0; k < len; ++k) raw += pieces[rng.below(pieces.size())];
    std::string once;
    try {
      once = vocab.normalize(raw);
    } catch (const ValidationError&) {
      continue;
    }
    ++checked;
    CHECK(vocab.normalize(once) == once);
    for (char ch : once) CHECK_FALSE(std::isupper(static_cast<unsigned char>(ch)));
    for (const auto& tok : split_label_tokens(once)) CHECK_FALSE(vocab.is_modifier(tok));
  }
  CHECK(checked >= 1000);
}

TEST_CASE("validate_reference") {
  const Dataset d = small_dataset();
  const auto st = store_with("the vase");

  SUBCASE("well-formed event is accepted") {
    CHECK(validate_reference(d.events[0], d, st).accepted());
  }
  SUBCASE("missing target") {
    auto e = d.events[0];
    e.target_id = "nope";
    auto r = validate_reference(e, d, st);
    CHECK(r.reason == RejectReason::MissingTarget);
    CHECK(to_string(r.reason) == "missing_target");
  }
  SUBCASE("hold_frame 5 clamps and is accepted") {
    auto e = d.events[0];
    e.hold_frame = 5;
    CHECK(validate_reference(e, d, st).accepted());
  }
  SUBCASE("unembedded utterance") {
    CHECK(validate_reference(d.events[0], d, store_with("other")).reason ==
          RejectReason::MissingTextFeatures);
  }
  SUBCASE("head/body window beyond the track") {
    auto e = d.events[0];
    e.phrase_start_s = 50.0;
    e.phrase_end_s = 51.0;
    CHECK(validate_reference(e, d, st).reason == RejectReason::EmptyHeadBodyWindow);
  }
  SUBCASE("filter_references keeps the reason") {
    Dataset bad = d;
    bad.events[0].target_id = "nope";
    auto f = filter_references(bad, st);
    CHECK(f.accepted.empty());
    REQUIRE(f.rejected.size() == 1);
    CHECK(f.rejected[0].second == RejectReason::MissingTarget);
  }
}

TEST_CASE("dataset save/load round trip is bit exact") {
  const auto dir = test::scratch_dir("core_roundtrip");
  SynthConfig cfg = test::tiny_synth(40);
  const Dataset d = gen_dataset(cfg).dataset;
  save_dataset(d, dir);
  const Dataset back = load_dataset(dir);
  CHECK(back == d);

  Dataset odd = small_dataset();
  odd.scenes["room_a"].objects[0].centroid = Vec3(0.1 + 0.2, 1.0 / 3.0, -2.5e-17);
  save_dataset(odd, dir);
  CHECK(load_dataset(dir) == odd);
}

TEST_CASE("load_dataset errors carry line numbers") {
  const auto dir = test::scratch_dir("core_errors");
  Dataset d = small_dataset();
  d.events.push_back(d.events[0]);
  d.events[1].ref_id = "r2";
  d.tracks["r2"] = d.tracks["r1"];
  d.tracks["r2"].ref_id = "r2";
  save_dataset(d, dir);
  // Duplicate the second line of events.jsonl under the first ref_id.
  {
    std::ifstream in(dir / kEventsFile);
    std::string l1, l2;
    std::getline(in, l1);
    std::getline(in, l2);
    in.close();
    std::ofstream out(dir / kEventsFile, std::ios::trunc);
    out << l1 << '\n' << l2 << '\n' << l1 << '\n';
  }
  try {
    load_dataset(dir);
    FAIL("expected a duplicate ref_id error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("duplicate ref_id") != std::string::npos);
  }

  {
    std::ofstream out(dir / kEventsFile, std::ios::trunc);
    out << "{\"ref_id\": \n";
  }
  try {
    load_dataset(dir);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
  }
}

TEST_CASE("invariant violations name the record") {
  Dataset d = small_dataset();
  d.events[0].target_id = "ghost";
  try {
    validate_dataset(d, CategoryVocabulary());
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("r1") != std::string::npos);
  }
  Dataset nc = small_dataset();
  nc.scenes["room_a"].objects[0].category = "RedVase";
  CHECK_THROWS_AS(validate_dataset(nc, CategoryVocabulary()), ValidationError);
}

TEST_CASE("empty events list is a valid dataset") {
  const auto dir = test::scratch_dir("core_empty");
  Dataset d = small_dataset();
  d.events.clear();
  d.tracks.clear();
  save_dataset(d, dir);
  const Dataset back = load_dataset(dir);
  CHECK(back.events.empty());
  CHECK(back == d);
}
