#include "monost/lm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include <spdlog/spdlog.h>

#include "monost/error.hpp"

namespace monost {

namespace {

constexpr float kLog10Zero = -99.0f;

using Key = std::array<LmId, kMaxLmOrder>;

int compare_ids(std::span<const LmId> a, std::span<const LmId> b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

struct CountedKey {
  Key key;
  std::int64_t count;
};

// Sorted unique n-grams with their occurrence counts.
std::vector<CountedKey> count_sorted(std::vector<Key>& windows, int n) {
  auto less = [n](const Key& a, const Key& b) {
    return std::lexicographical_compare(a.begin(), a.begin() + n, b.begin(), b.begin() + n);
  };
  std::sort(windows.begin(), windows.end(), less);
  std::vector<CountedKey> out;
  for (const auto& w : windows) {
    if (!out.empty() && std::equal(w.begin(), w.begin() + n, out.back().key.begin()))
      ++out.back().count;
    else
      out.push_back({w, 1});
  }
  return out;
}

}  // namespace

std::size_t NGramTable::find(std::span<const LmId> ngram) const {
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    const int c = compare_ids(key(mid), ngram);
    if (c == 0) return mid;
    if (c < 0)
      lo = mid + 1;
    else
      hi = mid;
  }
  return npos;
}

std::pair<std::size_t, std::size_t> NGramTable::prefix_range(std::span<const LmId> prefix) const {
  auto before = [&](std::size_t i) { return compare_ids(key(i).first(prefix.size()), prefix) < 0; };
  auto not_after = [&](std::size_t i) { return compare_ids(key(i).first(prefix.size()), prefix) <= 0; };
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (before(mid)) lo = mid + 1; else hi = mid;
  }
  const std::size_t first = lo;
  hi = size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (not_after(mid)) lo = mid + 1; else hi = mid;
  }
  return {first, lo};
}

NGramLM::NGramLM(std::vector<std::string> vocab, std::vector<NGramTable> tables)
    : vocab_(std::move(vocab)), tables_(std::move(tables)) {
  if (tables_.empty()) throw InvalidArgument("language model needs at least one order");
  for (std::size_t i = 0; i < vocab_.size(); ++i) index_.emplace(vocab_[i], static_cast<LmId>(i));
  auto need = [&](std::string_view t) {
    auto it = index_.find(std::string(t));
    if (it == index_.end()) throw FormatError("language model vocabulary lacks " + std::string(t));
    return it->second;
  };
  unk_ = need(kUnkToken);
  bos_ = need(kBosToken);
  eos_ = need(kEosToken);

  const NGramTable& uni = tables_[0];
  for (std::size_t i = 0; i < uni.size(); ++i)
    if (uni.key(i)[0] != bos_) unigram_rank_.push_back(uni.key(i)[0]);
  std::stable_sort(unigram_rank_.begin(), unigram_rank_.end(), [&](LmId a, LmId b) {
    const LmId ka[1] = {a}, kb[1] = {b};
    return uni.log10p[uni.find(ka)] > uni.log10p[uni.find(kb)];
  });
}

LmId NGramLM::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? unk_ : it->second;
}

double NGramLM::score_ids(std::span<const LmId> history, LmId token) const {
  const std::size_t max_ctx = std::min(history.size(), static_cast<std::size_t>(order() - 1));
  std::array<LmId, kMaxLmOrder> buf{};
  double acc = 0.0;
  for (std::size_t len = max_ctx + 1; len-- > 0;) {
    const auto ctx = history.last(len);
    std::copy(ctx.begin(), ctx.end(), buf.begin());
    buf[len] = token;
    const NGramTable& t = tables_[len];
    const std::size_t hit = t.find(std::span<const LmId>(buf.data(), len + 1));
    if (hit != NGramTable::npos) return acc + t.log10p[hit];
    if (len > 0) {
      const NGramTable& c = tables_[len - 1];
      const std::size_t ci = c.find(ctx);
      if (ci != NGramTable::npos) acc += c.backoff[ci];
    }
  }
  // Unreachable for a well-formed model: every vocabulary word has a unigram.
  return acc + kLog10Zero;
}

double NGramLM::score(std::span<const std::string> history, std::string_view token) const {
  std::vector<LmId> ids;
  const std::size_t keep = std::min(history.size(), static_cast<std::size_t>(order() - 1));
  for (const auto& h : history.last(keep)) ids.push_back(id(h));
  return score_ids(ids, id(token));
}

double NGramLM::sentence_log10(std::span<const std::string> sentence) const {
  std::vector<LmId> hist{bos_};
  double total = 0.0;
  for (const auto& w : sentence) {
    const LmId t = id(w);
    total += score_ids(hist, t);
    hist.push_back(t);
  }
  return total + score_ids(hist, eos_);
}

std::vector<LmId> NGramLM::continuations(std::span<const LmId> history, std::size_t k) const {
  std::vector<LmId> cand;
  auto add = [&](LmId w) {
    if (w != bos_ && std::find(cand.begin(), cand.end(), w) == cand.end()) cand.push_back(w);
  };
  const std::size_t max_ctx = std::min(history.size(), static_cast<std::size_t>(order() - 1));
  for (std::size_t len = max_ctx; len > 0 && cand.size() < k; --len) {
    const auto ctx = history.last(len);
    const NGramTable& t = tables_[len];
    auto [lo, hi] = t.prefix_range(ctx);
    for (std::size_t i = lo; i < hi; ++i) add(t.key(i)[len]);
  }
  for (std::size_t i = 0; i < unigram_rank_.size() && cand.size() < k + k; ++i) add(unigram_rank_[i]);

  std::vector<std::pair<double, LmId>> scored;
  scored.reserve(cand.size());
  for (LmId w : cand) scored.emplace_back(score_ids(history, w), w);
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
  std::vector<LmId> out;
  for (std::size_t i = 0; i < scored.size() && i < k; ++i) out.push_back(scored[i].second);
  return out;
}

NGramLM train_lm(const Corpus& corpus, int order) {
  if (order < 1) throw InvalidArgument("language model order must be >= 1");
  if (order > kMaxLmOrder) throw InvalidArgument("language model order above " + std::to_string(kMaxLmOrder));
  if (corpus.total_tokens() == 0) throw InvalidArgument("cannot train a language model on an empty corpus");

  std::vector<std::string> vocab{std::string(kUnkToken), std::string(kBosToken), std::string(kEosToken)};
  std::vector<LmId> remap(corpus.vocab_size());
  for (std::size_t i = 0; i < corpus.vocab_size(); ++i) {
    const auto& tok = corpus.vocab()[i];
    if (tok == kUnkToken) remap[i] = 0;
    else if (tok == kBosToken) remap[i] = 1;
    else if (tok == kEosToken) remap[i] = 2;
    else {
      remap[i] = static_cast<LmId>(vocab.size());
      vocab.push_back(tok);
    }
  }
  constexpr LmId kBos = 1, kEos = 2;
  const auto n_orders = static_cast<std::size_t>(order);

  // Raw counts for every order.
  std::vector<std::vector<CountedKey>> raw(n_orders);
  {
    std::vector<std::vector<Key>> windows(n_orders);
    std::vector<LmId> padded;
    for (const auto& s : corpus.sentences()) {
      padded.assign(1, kBos);
      for (TokenId t : s) padded.push_back(remap[static_cast<std::size_t>(t)]);
      padded.push_back(kEos);
      for (std::size_t n = 1; n <= n_orders; ++n) {
        for (std::size_t p = 0; p + n <= padded.size(); ++p) {
          Key k{};
          std::copy(padded.begin() + static_cast<std::ptrdiff_t>(p),
                    padded.begin() + static_cast<std::ptrdiff_t>(p + n), k.begin());
          windows[n - 1].push_back(k);
        }
      }
    }
    for (std::size_t n = 1; n <= n_orders; ++n) {
      raw[n - 1] = count_sorted(windows[n - 1], static_cast<int>(n));
      std::vector<Key>().swap(windows[n - 1]);
    }
  }

  // Adjusted counts: continuation counts below the top order, except for
  // n-grams starting with <s>, which cannot be extended to the left.
  std::vector<std::vector<CountedKey>> adj(n_orders);
  adj[n_orders - 1] = raw[n_orders - 1];
  for (std::size_t n = n_orders - 1; n >= 1; --n) {
    std::vector<Key> suffixes;
    suffixes.reserve(raw[n].size());
    for (const auto& e : raw[n]) {
      Key k{};
      std::copy(e.key.begin() + 1, e.key.begin() + static_cast<std::ptrdiff_t>(n + 1), k.begin());
      suffixes.push_back(k);
    }
    auto continuation = count_sorted(suffixes, static_cast<int>(n));
    std::vector<CountedKey> merged;
    for (const auto& e : raw[n - 1]) {
      if (e.key[0] == kBos) {
        if (n > 1) merged.push_back(e);  // the bare <s> unigram is never predicted
        continue;
      }
      merged.push_back(e);
    }
    // Replace counts of non-<s> entries with continuation counts.
    std::size_t ci = 0;
    for (auto& e : merged) {
      if (e.key[0] == kBos) continue;
      while (ci < continuation.size() &&
             std::lexicographical_compare(continuation[ci].key.begin(), continuation[ci].key.begin() + static_cast<std::ptrdiff_t>(n),
                                          e.key.begin(), e.key.begin() + static_cast<std::ptrdiff_t>(n)))
        ++ci;
      e.count = (ci < continuation.size() &&
                 std::equal(e.key.begin(), e.key.begin() + static_cast<std::ptrdiff_t>(n), continuation[ci].key.begin()))
                    ? continuation[ci].count
                    : 0;
    }
    std::erase_if(merged, [](const CountedKey& e) { return e.count <= 0; });
    adj[n - 1] = std::move(merged);
  }

  NGramLM lm;
  lm.discounts_.resize(n_orders);
  for (std::size_t n = 1; n <= n_orders; ++n) {
    std::int64_t n1 = 0, n2 = 0;
    for (const auto& e : adj[n - 1]) {
      if (e.count == 1) ++n1;
      else if (e.count == 2) ++n2;
    }
    double d = (n1 > 0 && n2 > 0) ? static_cast<double>(n1) / static_cast<double>(n1 + 2 * n2) : 0.0;
    if (!(d > 0.0 && d < 1.0)) {
      d = 0.75;
      std::string msg = "order " + std::to_string(n) + ": count-of-counts n1=" + std::to_string(n1) +
                        ", n2=" + std::to_string(n2) + " cannot estimate a discount; using D=0.75";
      spdlog::warn("{}", msg);
      lm.warnings_.push_back(std::move(msg));
    }
    lm.discounts_[n - 1] = d;
  }

  std::vector<NGramTable> tables(n_orders);
  // Unigrams: every vocabulary word, interpolated with the uniform distribution
  // over all predictable words (everything except <s>).
  {
    NGramTable& t = tables[0];
    t.n = 1;
    const double d = lm.discounts_[0];
    std::vector<std::int64_t> a(vocab.size(), 0);
    for (const auto& e : adj[0]) a[static_cast<std::size_t>(e.key[0])] = e.count;
    double total = 0.0;
    std::size_t types = 0;
    for (std::size_t w = 0; w < vocab.size(); ++w) {
      if (static_cast<LmId>(w) == kBos) continue;
      total += static_cast<double>(a[w]);
      if (a[w] > 0) ++types;
    }
    const double predictable = static_cast<double>(vocab.size() - 1);
    const double gamma = d * static_cast<double>(types) / total;
    for (std::size_t w = 0; w < vocab.size(); ++w) {
      t.keys.push_back(static_cast<LmId>(w));
      t.backoff.push_back(0.0f);
      if (static_cast<LmId>(w) == kBos) {
        t.log10p.push_back(kLog10Zero);
        continue;
      }
      const double p = std::max(0.0, static_cast<double>(a[w]) - d) / total + gamma / predictable;
      t.log10p.push_back(static_cast<float>(std::log10(p)));
    }
  }

  for (std::size_t n = 2; n <= n_orders; ++n) {
    NGramTable& t = tables[n - 1];
    NGramTable& lower = tables[n - 2];
    t.n = static_cast<int>(n);
    const double d = lm.discounts_[n - 1];
    const auto& entries = adj[n - 1];
    std::size_t i = 0;
    while (i < entries.size()) {
      std::size_t j = i;
      double total = 0.0;
      while (j < entries.size() && std::equal(entries[j].key.begin(), entries[j].key.begin() + static_cast<std::ptrdiff_t>(n - 1),
                                              entries[i].key.begin())) {
        total += static_cast<double>(entries[j].count);
        ++j;
      }
      const double gamma = d * static_cast<double>(j - i) / total;
      const std::span<const LmId> ctx(entries[i].key.data(), n - 1);
      const std::size_t ci = lower.find(ctx);
      if (ci == NGramTable::npos) throw NumericError("internal: context missing from lower order");
      lower.backoff[ci] = static_cast<float>(std::log10(gamma));
      for (std::size_t e = i; e < j; ++e) {
        const std::span<const LmId> suffix(entries[e].key.data() + 1, n - 1);
        const std::size_t li = lower.find(suffix);
        if (li == NGramTable::npos) throw NumericError("internal: suffix missing from lower order");
        const double lower_p = std::pow(10.0, static_cast<double>(lower.log10p[li]));
        const double p = (static_cast<double>(entries[e].count) - d) / total + gamma * lower_p;
        t.keys.insert(t.keys.end(), entries[e].key.begin(), entries[e].key.begin() + static_cast<std::ptrdiff_t>(n));
        t.log10p.push_back(static_cast<float>(std::log10(p)));
        t.backoff.push_back(0.0f);
      }
      i = j;
    }
  }

  NGramLM built(std::move(vocab), std::move(tables));
  built.discounts_ = std::move(lm.discounts_);
  built.warnings_ = std::move(lm.warnings_);
  return built;
}

double perplexity(const NGramLM& lm, const std::vector<Sentence>& sentences) {
  double total = 0.0;
  std::size_t tokens = 0;
  for (const auto& s : sentences) {
    total += lm.sentence_log10(s);
    tokens += s.size() + 1;
  }
  if (tokens == 0 || sentences.empty()) throw InvalidArgument("perplexity of an empty corpus");
  return std::pow(10.0, -total / static_cast<double>(tokens));
}

double perplexity(const NGramLM& lm, const Corpus& corpus) { return perplexity(lm, corpus.text()); }

NGramLM null_lm() {
  NGramTable uni;
  uni.n = 1;
  uni.keys = {0, 1, 2};
  uni.log10p = {std::log10(0.5f), kLog10Zero, std::log10(0.5f)};
  uni.backoff = {0.0f, 0.0f, 0.0f};
  return NGramLM({std::string(kUnkToken), std::string(kBosToken), std::string(kEosToken)}, {uni});
}

void save_arpa(const NGramLM& lm, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write ARPA file: " + path.string());
  out << "\n\\data\\\n";
  for (int n = 1; n <= lm.order(); ++n) out << "ngram " << n << '=' << lm.table(n).size() << '\n';
  out << std::setprecision(8);
  for (int n = 1; n <= lm.order(); ++n) {
    const NGramTable& t = lm.table(n);
    out << "\n\\" << n << "-grams:\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
      out << t.log10p[i] << '\t';
      const auto key = t.key(i);
      for (std::size_t j = 0; j < key.size(); ++j) out << (j ? " " : "") << lm.vocab()[static_cast<std::size_t>(key[j])];
      if (n < lm.order()) out << '\t' << t.backoff[i];
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
  if (!out) throw IoError("error while writing ARPA file: " + path.string());
}

NGramLM load_arpa(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read ARPA file: " + path.string());
  const std::string where = path.string();
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  auto fail = [&](const std::string& msg) -> FormatError {
    return FormatError(where + ":" + std::to_string(lineno) + ": " + msg);
  };

  while (next_line() && line != "\\data\\") {
  }
  if (line != "\\data\\") throw fail("missing \\data\\ header");
  std::vector<std::size_t> counts;
  while (next_line()) {
    if (line.empty()) {
      if (!counts.empty()) break;
      continue;
    }
    if (line.rfind("ngram ", 0) != 0) throw fail("expected 'ngram N=count', got '" + line + "'");
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw fail("malformed ngram count line");
    const int n = std::stoi(line.substr(6, eq - 6));
    if (n != static_cast<int>(counts.size()) + 1) throw fail("ngram orders must be listed in sequence");
    counts.push_back(static_cast<std::size_t>(std::stoull(line.substr(eq + 1))));
  }
  if (counts.empty()) throw fail("no ngram counts in \\data\\ section");
  if (counts.size() > static_cast<std::size_t>(kMaxLmOrder)) throw fail("order exceeds supported maximum");

  struct RawEntry {
    std::vector<std::string> words;
    float logp;
    float bo;
  };
  std::vector<std::vector<RawEntry>> sections(counts.size());
  for (std::size_t n = 1; n <= counts.size(); ++n) {
    while (next_line() && line.empty()) {
    }
    if (line != "\\" + std::to_string(n) + "-grams:") throw fail("expected section header \\" + std::to_string(n) + "-grams:");
    while (next_line() && !line.empty()) {
      std::istringstream ls(line);
      RawEntry e{};
      std::string field;
      if (!(ls >> e.logp)) throw fail("bad probability field");
      for (std::size_t w = 0; w < n; ++w) {
        if (!(ls >> field)) throw fail("expected " + std::to_string(n) + " words");
        e.words.push_back(field);
      }
      e.bo = 0.0f;
      if (ls >> field) e.bo = std::stof(field);
      sections[n - 1].push_back(std::move(e));
    }
    if (sections[n - 1].size() != counts[n - 1])
      throw fail("section \\" + std::to_string(n) + "-grams: header declares " + std::to_string(counts[n - 1]) +
                 " entries, found " + std::to_string(sections[n - 1].size()));
  }
  while (next_line() && line.empty()) {
  }
  if (line != "\\end\\") throw fail("missing \\end\\ marker");

  std::vector<std::string> vocab;
  std::unordered_map<std::string, LmId> index;
  for (const auto& e : sections[0]) {
    if (index.emplace(e.words[0], static_cast<LmId>(vocab.size())).second) vocab.push_back(e.words[0]);
  }
  auto ensure = [&](std::string_view tok, float logp) {
    if (index.count(std::string(tok))) return;
    index.emplace(std::string(tok), static_cast<LmId>(vocab.size()));
    vocab.emplace_back(tok);
    sections[0].push_back({{std::string(tok)}, logp, 0.0f});
  };
  ensure(kUnkToken, -100.0f);
  ensure(kBosToken, kLog10Zero);
  ensure(kEosToken, -100.0f);

  std::vector<NGramTable> tables(sections.size());
  for (std::size_t n = 1; n <= sections.size(); ++n) {
    auto& sec = sections[n - 1];
    std::vector<std::pair<std::vector<LmId>, std::size_t>> order;
    order.reserve(sec.size());
    for (std::size_t i = 0; i < sec.size(); ++i) {
      std::vector<LmId> ids;
      for (const auto& w : sec[i].words) {
        auto it = index.find(w);
        if (it == index.end()) throw FormatError(where + ": word '" + w + "' missing from unigram section");
        ids.push_back(it->second);
      }
      order.emplace_back(std::move(ids), i);
    }
    std::sort(order.begin(), order.end());
    NGramTable& t = tables[n - 1];
    t.n = static_cast<int>(n);
    for (const auto& [ids, i] : order) {
      t.keys.insert(t.keys.end(), ids.begin(), ids.end());
      t.log10p.push_back(sec[i].logp);
      t.backoff.push_back(sec[i].bo);
    }
  }
  return NGramLM(std::move(vocab), std::move(tables));
}

}  // namespace monost
