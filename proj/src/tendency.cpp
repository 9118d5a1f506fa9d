#include "bubblestory/tendency.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "bubblestory/error.hpp"
#include "text_util.hpp"

namespace bubblestory {
namespace {

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool starts_with_scheme(std::string_view s, std::size_t at) {
  auto match = [&](std::string_view scheme) {
    if (s.size() - at < scheme.size()) return false;
    for (std::size_t i = 0; i < scheme.size(); ++i) {
      char c = s[at + i];
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      if (c != scheme[i]) return false;
    }
    return true;
  };
  return match("http://") || match("https://");
}

std::vector<std::vector<std::string>> tokenize_corpus(std::span<const LabeledTweet> corpus) {
  std::vector<std::vector<std::string>> docs;
  docs.reserve(corpus.size());
  for (const auto& tweet : corpus) docs.push_back(tokenize(clean_text(tweet.text)));
  return docs;
}

Eigen::SparseVector<double> weigh(const TfidfModel& model, const std::vector<std::string>& tokens) {
  std::map<Eigen::Index, double> counts;
  for (const auto& tok : tokens) {
    if (auto it = model.vocabulary.find(tok); it != model.vocabulary.end()) {
      counts[it->second] += 1.0;
    }
  }
  Eigen::SparseVector<double> v(model.size());
  double norm2 = 0.0;
  for (auto& [col, tf] : counts) {
    tf *= model.idf(col);
    norm2 += tf * tf;
  }
  if (norm2 == 0.0) return v;
  const double inv = 1.0 / std::sqrt(norm2);
  v.reserve(static_cast<Eigen::Index>(counts.size()));
  for (const auto& [col, w] : counts) v.insertBack(col) = w * inv;
  return v;
}

}  // namespace

std::string_view to_string(Label label) noexcept {
  return label == Label::leave ? "leave" : "remain";
}

Label parse_label(std::string_view text) {
  if (text == "leave") return Label::leave;
  if (text == "remain") return Label::remain;
  throw Error(Errc::bad_value, "label must be 'leave' or 'remain', got '" + std::string(text) + "'");
}

SeedHashtags SeedHashtags::referendum() {
  return {{"#voteleave", "#marchtoleave", "#takecontrol", "#leaveeu", "#standup4brexit", "#no2eu",
           "#nodeal"},
          {"#voteremain", "#peoplesvotemarch", "#bremain", "#remainernow", "#abtv", "#yeseu",
           "#strongerin"}};
}

std::optional<Label> seed_label(const SeedHashtags& seeds, std::string_view raw_text) {
  bool leave = false;
  bool remain = false;
  for (const auto& tok : tokenize(clean_text(raw_text))) {
    leave = leave || seeds.leave.contains(tok);
    remain = remain || seeds.remain.contains(tok);
  }
  if (leave == remain) return std::nullopt;
  return leave ? Label::leave : Label::remain;
}

std::string clean_text(std::string_view raw) {
  std::string kept;
  kept.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size();) {
    if (starts_with_scheme(raw, i)) {
      while (i < raw.size() && !is_space(raw[i])) ++i;
      continue;
    }
    const auto c = static_cast<unsigned char>(raw[i++]);
    if (c < 0x80) kept.push_back(static_cast<char>(c));
  }

  std::string out;
  out.reserve(kept.size());
  for (char c : kept) {
    if (is_space(c)) {
      if (!out.empty() && out.back() != ' ') out.push_back(' ');
    } else {
      out.push_back(c);
    }
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return detail::ascii_lower(out);
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!is_word_char(s[i])) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < s.size() && is_word_char(s[end])) ++end;
    const std::string_view word = s.substr(i, end - i);
    if (i > 0 && s[i - 1] == '#') {
      tokens.push_back("#" + std::string(word));
    } else if (word.size() >= 2 && word[0] >= 'a' && word[0] <= 'z') {
      tokens.emplace_back(word);
    }
    i = end;
  }
  return tokens;
}

Eigen::SparseVector<double> TfidfModel::transform(std::string_view raw) const {
  return weigh(*this, tokenize(clean_text(raw)));
}

TendencyModel fit(std::span<const LabeledTweet> corpus, double alpha) {
  if (!(alpha > 0.0)) throw Error(Errc::bad_value, "alpha must be > 0");
  bool has[2] = {false, false};
  for (const auto& t : corpus) has[static_cast<int>(t.label)] = true;
  if (!has[0] || !has[1]) {
    throw Error(Errc::missing_class, "training corpus needs at least one leave and one remain tweet");
  }

  const auto docs = tokenize_corpus(corpus);
  std::map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    std::set<std::string> unique(doc.begin(), doc.end());
    for (const auto& tok : unique) ++df[tok];
  }
  if (df.empty()) throw Error(Errc::empty_vocabulary, "no tokens survive cleaning");

  TendencyModel model;
  auto& tfidf = model.tfidf;
  tfidf.idf.resize(static_cast<Eigen::Index>(df.size()));
  const double n_docs = static_cast<double>(docs.size());
  for (const auto& [tok, count] : df) {
    const auto col = static_cast<Eigen::Index>(tfidf.tokens.size());
    tfidf.vocabulary.emplace(tok, col);
    tfidf.tokens.push_back(tok);
    tfidf.idf(col) = std::log((1.0 + n_docs) / (1.0 + static_cast<double>(count))) + 1.0;
  }

  Eigen::Matrix<double, 2, Eigen::Dynamic> feature_count =
      Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, tfidf.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const auto row = static_cast<Eigen::Index>(corpus[d].label);
    const auto v = weigh(tfidf, docs[d]);
    for (Eigen::SparseVector<double>::InnerIterator it(v); it; ++it) {
      feature_count(row, it.index()) += it.value();
    }
  }

  auto& nb = model.nb;
  nb.alpha = alpha;
  const Eigen::ArrayXXd smoothed = feature_count.array() + alpha;
  const Eigen::Array2d totals = smoothed.rowwise().sum();
  nb.feature_log_prob = smoothed.log().colwise() - totals.log();
  return model;
}

std::pair<double, double> predict_proba(const TendencyModel& model, std::string_view text) {
  const auto v = model.tfidf.transform(text);
  Eigen::Vector2d jll = model.nb.log_prior;
  for (Eigen::SparseVector<double>::InnerIterator it(v); it; ++it) {
    jll += it.value() * model.nb.feature_log_prob.col(it.index());
  }
  // Logistic form of the two-class normalization.
  const double leave = 1.0 / (1.0 + std::exp(jll(1) - jll(0)));
  const double remain = 1.0 / (1.0 + std::exp(jll(0) - jll(1)));
  return {leave, remain};
}

std::vector<TendencyScore> hashtag_tendency(const TendencyModel& model,
                                            std::span<const std::string> tweets) {
  struct Acc {
    double sum = 0.0;
    std::size_t n = 0;
  };
  std::map<std::string, Acc> acc;
  for (const auto& tweet : tweets) {
    const auto tokens = tokenize(clean_text(tweet));
    std::set<std::string> tags;
    for (const auto& tok : tokens) {
      if (tok.front() == '#') tags.insert(tok);
    }
    if (tags.empty()) continue;
    const double p = predict_leave_prob(model, tweet);
    for (const auto& tag : tags) {
      acc[tag].sum += p;
      ++acc[tag].n;
    }
  }
  std::vector<TendencyScore> out;
  out.reserve(acc.size());
  for (const auto& [tag, a] : acc) {
    out.push_back({tag, std::clamp(a.sum / static_cast<double>(a.n), 0.0, 1.0), a.n});
  }
  return out;
}

std::vector<LabeledTweet> read_labeled_jsonl(std::string_view text) {
  std::vector<LabeledTweet> corpus;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = detail::trim(text.substr(start, end - start));
    ++line_no;
    start = end + 1;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      corpus.push_back({j.at("text").get<std::string>(),
                        parse_label(j.at("label").get<std::string>())});
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::bad_value, "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return corpus;
}

std::vector<std::string> read_tweet_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!detail::trim(line).empty()) lines.emplace_back(line);
    start = end + 1;
  }
  return lines;
}

std::string write_scores_csv(std::span<const TendencyScore> scores) {
  std::string out = "hashtag,score,support\n";
  char buf[32];
  for (const auto& s : scores) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, s.score);
    out += s.hashtag + "," + std::string(buf, ptr) + "," + std::to_string(s.support) + "\n";
  }
  return out;
}

}  // namespace bubblestory
