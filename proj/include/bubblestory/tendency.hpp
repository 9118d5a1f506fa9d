#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cmath>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace bubblestory {

enum class Label { leave = 0, remain = 1 };

std::string_view to_string(Label label) noexcept;
Label parse_label(std::string_view text);

struct LabeledTweet {
  std::string text;
  Label label = Label::leave;
};

/// Hashtags that pre-mark a tweet's side.
struct SeedHashtags {
  std::set<std::string> leave;
  std::set<std::string> remain;

  static SeedHashtags referendum();
};

/// Side implied by the seed hashtags a tweet carries; absent when it carries
/// none or both.
std::optional<Label> seed_label(const SeedHashtags& seeds, std::string_view raw_text);

/// Strips http(s) URLs and non-ASCII bytes, collapses whitespace, lowercases
/// and trims.
std::string clean_text(std::string_view raw);

/// Tokens start at a word boundary with a letter or '#', followed by one or
/// more of [a-z0-9_]. Digit-initial words and a bare '#' yield nothing.
std::vector<std::string> tokenize(std::string_view cleaned);

struct TfidfModel {
  /// Tokens in column order (sorted).
  std::vector<std::string> tokens;
  std::unordered_map<std::string, Eigen::Index> vocabulary;
  /// ln((1 + n_docs) / (1 + df)) + 1
  Eigen::VectorXd idf;

  Eigen::Index size() const noexcept { return idf.size(); }

  /// L2-normalized tf-idf vector of a raw text; unknown tokens ignored.
  Eigen::SparseVector<double> transform(std::string_view raw) const;
};

/// Multinomial naive Bayes over tf-idf features with uniform class priors.
/// Row 0 is leave, row 1 remain.
struct NbModel {
  double alpha = 1.0;
  Eigen::Vector2d log_prior = Eigen::Vector2d::Constant(std::log(0.5));
  Eigen::Matrix<double, 2, Eigen::Dynamic> feature_log_prob;
};

struct TendencyModel {
  TfidfModel tfidf;
  NbModel nb;
};

/// Throws Errc::missing_class or Errc::empty_vocabulary.
TendencyModel fit(std::span<const LabeledTweet> corpus, double alpha = 1.0);

/// (P(leave | text), P(remain | text)). Texts with no known token give
/// (0.5, 0.5).
std::pair<double, double> predict_proba(const TendencyModel& model, std::string_view text);

inline double predict_leave_prob(const TendencyModel& model, std::string_view text) {
  return predict_proba(model, text).first;
}

struct TendencyScore {
  std::string hashtag;
  double score = 0.5;
  std::size_t support = 0;
};

/// Mean leave probability over the tweets containing each hashtag, sorted by
/// hashtag.
std::vector<TendencyScore> hashtag_tendency(const TendencyModel& model,
                                            std::span<const std::string> tweets);

/// One `{"text": ..., "label": "leave"|"remain"}` object per line. Blank
/// lines are skipped.
std::vector<LabeledTweet> read_labeled_jsonl(std::string_view text);

/// One raw tweet per line; blank lines skipped.
std::vector<std::string> read_tweet_lines(std::string_view text);

std::string write_scores_csv(std::span<const TendencyScore> scores);

}  // namespace bubblestory
