#include <cmath>

#include "doctest.h"
#include "helpers.h"
#include "ocp/corpus.h"
#include "ocp/error.h"
#include "ocp/labels.h"
#include "ocp/rng.h"

using namespace ocp;
using testing::code_of;
using testing::TempDir;
using testing::write_file;

namespace {

Label hard(const TweetRecord& r) { return std::get<HardLabel>(r.payload).value; }

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("hard tsv: two rows in order") {
  TempDir dir;
  write_file(dir / "a.tsv", "id\ttweet\tsubtask_a\n1\t@USER hi\tNOT\n2\td**n\tOFF\n");
  Dataset ds = load_hard_tsv(dir / "a.tsv", Task::kA, Language::kEn);
  REQUIRE(ds.size() == 2);
  CHECK(ds[0].id == "1");
  CHECK(ds[0].text == "@USER hi");
  CHECK(hard(ds[0]) == Label::kNot);
  CHECK(hard(ds[1]) == Label::kOff);
}

TEST_CASE("hard tsv: header only gives an empty dataset") {
  TempDir dir;
  write_file(dir / "a.tsv", "id\ttweet\tsubtask_a\n");
  CHECK(load_hard_tsv(dir / "a.tsv", Task::kA, Language::kEn).empty());
}

TEST_CASE("hard tsv: NULL rows for the task are skipped") {
  TempDir dir;
  write_file(dir / "b.tsv",
             "id\ttweet\tsubtask_a\tsubtask_b\n1\tx y\tOFF\tTIN\n2\tz\tNOT\tNULL\n3\tw\tOFF\tUNT\n");
  Dataset ds = load_hard_tsv(dir / "b.tsv", Task::kB, Language::kEn);
  REQUIRE(ds.size() == 2);
  CHECK(ds[0].id == "1");
  CHECK(ds[1].id == "3");
  CHECK(hard(ds[1]) == Label::kUnt);
}

TEST_CASE("hard tsv errors carry line numbers") {
  TempDir dir;
  write_file(dir / "m.tsv", "id\ttweet\n1\tx\n");
  CHECK(code_of([&] { load_hard_tsv(dir / "m.tsv", Task::kA, Language::kEn); }) == ErrorCode::kMissingColumn);

  write_file(dir / "d.tsv", "id\ttweet\tsubtask_a\n1\tx\tNOT\n1\ty\tOFF\n");
  try {
    load_hard_tsv(dir / "d.tsv", Task::kA, Language::kEn);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDuplicateId);
    CHECK(e.line() == 3);
  }

  write_file(dir / "e.tsv", "id\ttweet\tsubtask_a\n1\t   \tNOT\n");
  CHECK(code_of([&] { load_hard_tsv(dir / "e.tsv", Task::kA, Language::kEn); }) == ErrorCode::kEmptyText);

  write_file(dir / "r.tsv", "id\ttweet\tsubtask_a\n1\tx\n");
  try {
    load_hard_tsv(dir / "r.tsv", Task::kA, Language::kEn);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMalformedRow);
    CHECK(e.line() == 2);
  }

  write_file(dir / "u.tsv", "id\ttweet\tsubtask_a\n1\tx\tMAYBE\n");
  CHECK(code_of([&] { load_hard_tsv(dir / "u.tsv", Task::kA, Language::kEn); }) == ErrorCode::kUnknownLabel);
}

TEST_CASE("soft tsv: task A row") {
  TempDir dir;
  write_file(dir / "s.tsv", "id\ttext\taverage\tstd\n7\tsome text\t0.83\t0.12\n");
  Dataset ds = load_soft_tsv(dir / "s.tsv", Task::kA, Language::kEn);
  REQUIRE(ds.size() == 1);
  auto s = std::get<SoftScoreA>(ds[0].payload);
  CHECK(s.mean == doctest::Approx(0.83).epsilon(1e-15));
  CHECK(s.std == doctest::Approx(0.12).epsilon(1e-15));
  CHECK(ds.payload_kind() == PayloadKind::kSoft);
}

TEST_CASE("soft tsv: task C one-hot and non-stochastic rows") {
  TempDir dir;
  write_file(dir / "c.tsv", "id\ttext\taverage_ind\taverage_grp\taverage_oth\n1\tx\t1.0\t0.0\t0.0\n");
  Dataset ds = load_soft_tsv(dir / "c.tsv", Task::kC, Language::kEn);
  CHECK(std::get<SoftScoreC>(ds[0].payload) == SoftScoreC{1, 0, 0});

  write_file(dir / "bad.tsv", "id\ttext\taverage_ind\taverage_grp\taverage_oth\n1\tx\t0.5\t0.3\t0.1\n");
  CHECK(code_of([&] { load_soft_tsv(dir / "bad.tsv", Task::kC, Language::kEn); }) ==
        ErrorCode::kNonStochasticVector);
}

TEST_CASE("soft tsv: task C with std columns and small rounding is renormalised") {
  TempDir dir;
  write_file(dir / "c.tsv",
             "id\ttext\taverage_ind\taverage_grp\taverage_oth\tstd_ind\tstd_grp\tstd_oth\n"
             "1\tx\t0.5004\t0.3\t0.2\t0.1\t0.1\t0.1\n");
  Dataset ds = load_soft_tsv(dir / "c.tsv", Task::kC, Language::kEn);
  auto s = std::get<SoftScoreC>(ds[0].payload);
  CHECK(std::abs(s.p_ind + s.p_grp + s.p_oth - 1.0) < 1e-12);
}

TEST_CASE("soft tsv: out of range mean names the line") {
  try {
    load_soft_tsv(testing::fixture("soft_a_out_of_range.tsv"), Task::kA, Language::kEn);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kOutOfRangeScore);
    CHECK(e.line() == 3);
  }
}

TEST_CASE("join_gold") {
  TempDir dir;
  write_file(dir / "t.tsv", "id\ttweet\n1\ta\n2\tb\n3\tc\n");
  write_file(dir / "g.csv", "3,NOT\n1,OFF\n2,NOT\n");
  Dataset test = load_unlabeled_tsv(dir / "t.tsv", Task::kA, Language::kEn);
  Dataset joined = join_gold(test, dir / "g.csv");
  REQUIRE(joined.size() == 3);
  CHECK(joined[0].id == "1");
  CHECK(joined.label(0) == Label::kOff);
  CHECK(joined.label(2) == Label::kNot);

  write_file(dir / "missing.csv", "1,OFF\n2,NOT\n");
  try {
    join_gold(test, dir / "missing.csv");
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnmatchedId);
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }

  write_file(dir / "unknown.csv", "1,OFF\n2,NOT\n3,TIN\n");
  CHECK(code_of([&] { join_gold(test, dir / "unknown.csv"); }) == ErrorCode::kUnknownLabel);

  write_file(dir / "empty.csv", "");
  Dataset none(Task::kA, Language::kEn, PayloadKind::kNone, {});
  CHECK(join_gold(none, dir / "empty.csv").empty());
}

TEST_CASE("canonical round trip with escapes") {
  TempDir dir;
  std::vector<TweetRecord> recs = {
      {"1", "tab\there", Language::kEn, HardLabel{Task::kA, Label::kOff}},
      {"2", "line\nbreak and back\\slash", Language::kEn, HardLabel{Task::kA, Label::kNot}},
      {"3", "literal \\t stays", Language::kEn, HardLabel{Task::kA, Label::kNot}},
  };
  Dataset ds(Task::kA, Language::kEn, PayloadKind::kHard, recs, "fixture\twith tab");
  save_canonical(ds, dir / "c.tsv");
  CHECK(load_canonical(dir / "c.tsv") == ds);
  CHECK(unescape_field(escape_field("a\\tb\t\n\\")) == "a\\tb\t\n\\");
}

TEST_CASE("canonical round trip: random task C vectors") {
  TempDir dir;
  Rng rng(3);
  std::vector<TweetRecord> recs;
  for (int i = 0; i < 100; ++i) {
    double a = rng.uniform(), b = rng.uniform(), c = rng.uniform();
    double s = a + b + c;
    recs.push_back({"id" + std::to_string(i), "text " + std::to_string(i), Language::kDa,
                    SoftScoreC{a / s, b / s, c / s}});
  }
  Dataset ds(Task::kC, Language::kDa, PayloadKind::kSoft, recs);
  save_canonical(ds, dir / "c.tsv");
  Dataset back = load_canonical(dir / "c.tsv");
  REQUIRE(back.size() == ds.size());
  for (size_t i = 0; i < ds.size(); ++i) {
    auto x = std::get<SoftScoreC>(ds[i].payload);
    auto y = std::get<SoftScoreC>(back[i].payload);
    CHECK(std::abs(x.p_ind - y.p_ind) <= 1e-12);
    CHECK(std::abs(x.p_grp - y.p_grp) <= 1e-12);
    CHECK(std::abs(x.p_oth - y.p_oth) <= 1e-12);
    CHECK(back[i].id == ds[i].id);
  }
}

TEST_CASE("canonical: version mismatch") {
  TempDir dir;
  write_file(dir / "v.tsv", "#ocp-v9\tid\ttext\tlabel\n");
  CHECK(code_of([&] { load_canonical(dir / "v.tsv"); }) == ErrorCode::kSchemaVersionMismatch);
  CHECK(code_of([&] { load_canonical(dir / "nope.tsv"); }) == ErrorCode::kIoFailure);
}

TEST_CASE("dataset invariants") {
  std::vector<TweetRecord> dup = {{"1", "a", Language::kEn, HardLabel{Task::kA, Label::kOff}},
                                  {"1", "b", Language::kEn, HardLabel{Task::kA, Label::kOff}}};
  CHECK(code_of([&] { Dataset(Task::kA, Language::kEn, PayloadKind::kHard, dup); }) == ErrorCode::kDuplicateId);
  std::vector<TweetRecord> lang = {{"1", "a", Language::kDa, HardLabel{Task::kA, Label::kOff}}};
  CHECK_THROWS_AS(Dataset(Task::kA, Language::kEn, PayloadKind::kHard, lang), Error);
  std::vector<TweetRecord> wrong = {{"1", "a", Language::kEn, HardLabel{Task::kB, Label::kTin}}};
  CHECK_THROWS_AS(Dataset(Task::kA, Language::kEn, PayloadKind::kHard, wrong), Error);
}

TEST_CASE("property: parsing keeps file order") {
  TempDir dir;
  Rng rng(11);
  std::vector<size_t> order = rng.permutation(50);
  std::string body = "id\ttweet\tsubtask_a\n";
  for (size_t k : order) body += "id" + std::to_string(k) + "\ttext\t" + (k % 2 ? "OFF" : "NOT") + "\n";
  write_file(dir / "o.tsv", body);
  Dataset ds = load_hard_tsv(dir / "o.tsv", Task::kA, Language::kEn);
  for (size_t i = 0; i < order.size(); ++i) CHECK(ds[i].id == "id" + std::to_string(order[i]));
}

TEST_CASE("bundled OLID-style fixture: TIN outnumbers UNT") {
  Dataset b = load_hard_tsv(testing::fixture("olid_train.tsv"), Task::kB, Language::kEn);
  ClassStats s = class_distribution(b);
  CHECK(s.counts.at(Label::kTin) > s.counts.at(Label::kUnt));
}

}  // TEST_SUITE
