#include <catch2/catch_amalgamated.hpp>

#include "bubblestory/serialization.hpp"
#include "bubblestory/tendency.hpp"
#include "nb_oracle.hpp"

using namespace bubblestory;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<LabeledTweet> to_corpus(const std::vector<testing::CountDoc>& docs) {
  std::vector<LabeledTweet> out;
  for (const auto& d : docs) out.push_back({testing::render(d.tf), static_cast<Label>(d.label)});
  return out;
}

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::io_error;
}

const std::vector<LabeledTweet> kToy{{"leave eu", Label::leave}, {"remain eu", Label::remain}};

}  // namespace

TEST_CASE("clean_text", "[tendency]") {
  CHECK(clean_text("Vote LEAVE https://t.co/x NOW") == "vote leave now");
  CHECK(clean_text("Brexit\xe2\x9c\x97 d\xc3\xa9j\xc3\xa0") == "brexit dj");
  CHECK(clean_text("") == "");
  CHECK(clean_text("  a\t\tb \n HTTP://X.Y/z  c ") == "a b c");
  CHECK(clean_text("see http://a.b") == "see");
}

TEST_CASE("tokenize", "[tendency]") {
  using V = std::vector<std::string>;
  CHECK(tokenize("vote #brexit now") == V{"vote", "#brexit", "now"});
  CHECK(tokenize("2019 result") == V{"result"});
  CHECK(tokenize("# a1") == V{"a1"});
  CHECK(tokenize("a b c").empty());
  CHECK(tokenize("no_deal,#eu28!") == V{"no_deal", "#eu28"});
  CHECK(tokenize("x2y 9ab") == V{"x2y"});
}

TEST_CASE("seed hashtags", "[tendency]") {
  const auto seeds = SeedHashtags::referendum();
  CHECK(seeds.leave.size() == 7);
  CHECK(seeds.remain.size() == 7);
  CHECK(seed_label(seeds, "Out we go #VoteLeave") == Label::leave);
  CHECK(seed_label(seeds, "#StrongerIn together") == Label::remain);
  CHECK_FALSE(seed_label(seeds, "#voteleave #voteremain").has_value());
  CHECK_FALSE(seed_label(seeds, "nothing here").has_value());
}

TEST_CASE("fit on the toy corpus", "[tendency]") {
  const auto m = fit(kToy);
  CHECK(m.tfidf.tokens == std::vector<std::string>{"eu", "leave", "remain"});
  const double idf_eu = m.tfidf.idf(0);
  const double idf_side = m.tfidf.idf(1);
  CHECK_THAT(idf_eu, WithinAbs(1.0, 1e-15));
  CHECK_THAT(idf_side, WithinAbs(std::log(1.5) + 1.0, 1e-15));
  CHECK_THAT(m.tfidf.idf(2), WithinAbs(idf_side, 1e-15));
  for (int c = 0; c < 2; ++c) {
    CHECK_THAT(m.nb.feature_log_prob.row(c).array().exp().sum(), WithinAbs(1.0, 1e-9));
  }
  CHECK_THAT(m.nb.feature_log_prob(0, 1), WithinAbs(m.nb.feature_log_prob(1, 2), 1e-15));
  CHECK_THAT(m.nb.log_prior(0), WithinAbs(std::log(0.5), 1e-15));

  const double p_leave = predict_leave_prob(m, "leave");
  const double p_remain = predict_leave_prob(m, "remain");
  CHECK(p_leave > 0.5);
  CHECK(p_remain < 0.5);
  CHECK_THAT(p_remain, WithinAbs(1.0 - p_leave, 1e-12));
  CHECK(predict_leave_prob(m, "zzz") == 0.5);
  CHECK(predict_leave_prob(m, "") == 0.5);
}

TEST_CASE("fit preconditions", "[tendency]") {
  const std::vector<LabeledTweet> one_class{{"leave eu", Label::leave}, {"go now", Label::leave}};
  CHECK(code_of([&] { fit(one_class); }) == Errc::missing_class);
  const std::vector<LabeledTweet> empty{{"1 2 3", Label::leave}, {"\xf0\x9f\x98\x80", Label::remain}};
  CHECK(code_of([&] { fit(empty); }) == Errc::empty_vocabulary);
}

TEST_CASE("posteriors match a direct Bayes computation", "[tendency][oracle]") {
  std::size_t corpora = 0;
  testing::for_each_small_corpus(3, 4, [&](const std::vector<testing::CountDoc>& docs) {
    ++corpora;
    const auto corpus = to_corpus(docs);
    const auto model = fit(corpus);
    std::vector<std::vector<int>> queries{{1, 1, 1}, {2, 0, 1}, {0, 3, 0}};
    for (const auto& d : docs) queries.push_back(d.tf);
    for (const auto& q : queries) {
      const auto [leave, remain] = predict_proba(model, testing::render(q));
      REQUIRE_THAT(leave, WithinAbs(testing::oracle_leave_posterior(docs, 1.0, q), 1e-9));
      REQUIRE_THAT(leave + remain, WithinAbs(1.0, 1e-9));
    }
  });
  CHECK(corpora > 1000);
}

TEST_CASE("oracle agreement with other smoothing", "[tendency][oracle]") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> tf(0, 3);
  std::uniform_real_distribution<double> alpha(0.05, 3.0);
  for (int i = 0; i < 300; ++i) {
    std::vector<testing::CountDoc> docs;
    for (int d = 0; d < 4; ++d) {
      testing::CountDoc doc;
      doc.label = d % 2;
      for (int j = 0; j < 5; ++j) doc.tf.push_back(tf(rng));
      doc.tf[static_cast<std::size_t>(d)] += 1;
      docs.push_back(doc);
    }
    const double a = alpha(rng);
    const auto model = fit(to_corpus(docs), a);
    std::vector<int> q;
    for (int j = 0; j < 5; ++j) q.push_back(tf(rng));
    REQUIRE_THAT(predict_leave_prob(model, testing::render(q)),
                 WithinAbs(testing::oracle_leave_posterior(docs, a, q), 1e-9));
  }
}

TEST_CASE("swapping labels mirrors every prediction", "[tendency][property]") {
  testing::for_each_small_corpus(3, 3, [&](const std::vector<testing::CountDoc>& docs) {
    auto corpus = to_corpus(docs);
    const auto model = fit(corpus);
    for (auto& t : corpus) t.label = t.label == Label::leave ? Label::remain : Label::leave;
    const auto swapped = fit(corpus);
    for (const char* q : {"ta", "tb tc", "ta ta tc", "tc tb ta", "zz"}) {
      REQUIRE_THAT(predict_leave_prob(swapped, q), WithinAbs(1.0 - predict_leave_prob(model, q), 1e-9));
    }
  });
}

// Smoothed idf depends on the document count and alpha does not scale with
// the doubled feature mass, so predictions shift under duplication.
TEST_CASE("duplicating the corpus leaves predictions unchanged", "[tendency][property][!mayfail]") {
  const std::vector<LabeledTweet> corpus{{"leave eu now", Label::leave},
                                         {"remain eu", Label::remain},
                                         {"leave leave", Label::leave}};
  auto doubled = corpus;
  doubled.insert(doubled.end(), corpus.begin(), corpus.end());
  const auto a = fit(corpus);
  const auto b = fit(doubled);
  for (const char* q : {"leave", "eu", "remain now", "leave eu"}) {
    INFO(q);
    CHECK_THAT(predict_leave_prob(b, q), WithinAbs(predict_leave_prob(a, q), 1e-9));
  }
}

TEST_CASE("hashtag_tendency averages tweet posteriors", "[tendency]") {
  const std::vector<LabeledTweet> corpus{{"#out leave go", Label::leave},
                                         {"#in remain stay", Label::remain}};
  const auto m = fit(corpus);
  const std::vector<std::string> tweets{"leave go #x", "remain stay #x #in", "#in stay",
                                        "no tags here", "leave #out"};
  const auto scores = hashtag_tendency(m, tweets);
  REQUIRE(scores.size() == 3);
  CHECK(scores[0].hashtag == "#in");
  CHECK(scores[1].hashtag == "#out");
  CHECK(scores[2].hashtag == "#x");
  CHECK(scores[2].support == 2);
  const double expect_x =
      (predict_leave_prob(m, tweets[0]) + predict_leave_prob(m, tweets[1])) / 2.0;
  CHECK_THAT(scores[2].score, WithinAbs(expect_x, 1e-15));
  for (const auto& s : scores) {
    CHECK(s.score >= 0.0);
    CHECK(s.score <= 1.0);
    CHECK(s.support >= 1);
  }
  CHECK(write_scores_csv(scores).rfind("hashtag,score,support\n#in,", 0) == 0);
}

TEST_CASE("corpus readers", "[tendency]") {
  const auto corpus = read_labeled_jsonl(
      "{\"text\": \"a b\", \"label\": \"leave\"}\n\n{\"text\": \"c\", \"label\": \"remain\"}\n");
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[1].label == Label::remain);
  CHECK_THROWS_AS(read_labeled_jsonl("{\"text\": \"a\", \"label\": \"maybe\"}\n"), Error);
  CHECK_THROWS_AS(read_labeled_jsonl("not json\n"), Error);
  CHECK(read_tweet_lines("one\r\n\n  \ntwo").size() == 2);
}

TEST_CASE("model JSON round trip", "[tendency][json]") {
  const auto m = fit(kToy, 0.7);
  const auto back = tendency_model_from_json(parse_json(dump(to_json(m))));
  CHECK(back.tfidf.tokens == m.tfidf.tokens);
  CHECK(back.nb.alpha == 0.7);
  for (const char* q : {"leave", "eu", "remain eu"}) {
    CHECK(predict_leave_prob(back, q) == predict_leave_prob(m, q));
  }
}
