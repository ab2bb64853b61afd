#include "monost/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "monost/error.hpp"

namespace monost {

namespace {

std::string to_lower_ascii(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool is_reserved(std::string_view token) {
  return token == kUnkToken || token == kBosToken || token == kEosToken;
}

// Opaque cipher name for index i: "q" followed by a base-26 letter code.
std::string cipher_name(std::size_t i) {
  std::string code;
  do {
    code.push_back(static_cast<char>('a' + i % 26));
    i /= 26;
  } while (i > 0);
  std::reverse(code.begin(), code.end());
  return "q" + code;
}

}  // namespace

Corpus Corpus::from_sentences(const std::vector<Sentence>& sentences) {
  Corpus c;
  std::unordered_map<std::string, std::size_t> first_seen;
  std::vector<std::string> order;
  std::vector<std::int64_t> raw_counts;
  for (const auto& s : sentences) {
    for (const auto& tok : s) {
      auto [it, inserted] = first_seen.try_emplace(tok, order.size());
      if (inserted) {
        order.push_back(tok);
        raw_counts.push_back(0);
      }
      ++raw_counts[it->second];
    }
  }

  std::vector<std::size_t> perm(order.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t b) { return raw_counts[a] > raw_counts[b]; });

  c.vocab_.reserve(order.size());
  c.counts_.reserve(order.size());
  for (std::size_t rank = 0; rank < perm.size(); ++rank) {
    c.vocab_.push_back(order[perm[rank]]);
    c.counts_.push_back(raw_counts[perm[rank]]);
    c.index_.emplace(c.vocab_.back(), static_cast<TokenId>(rank));
  }

  c.sentences_.reserve(sentences.size());
  for (const auto& s : sentences) {
    std::vector<TokenId> ids;
    ids.reserve(s.size());
    for (const auto& tok : s) ids.push_back(c.index_.at(tok));
    c.total_ += static_cast<std::int64_t>(ids.size());
    c.sentences_.push_back(std::move(ids));
  }
  return c;
}

Sentence Corpus::sentence(std::size_t i) const {
  const auto& ids = sentences_.at(i);
  Sentence out;
  out.reserve(ids.size());
  for (TokenId id : ids) out.push_back(vocab_[static_cast<std::size_t>(id)]);
  return out;
}

std::vector<Sentence> Corpus::text() const {
  std::vector<Sentence> out;
  out.reserve(sentences_.size());
  for (std::size_t i = 0; i < sentences_.size(); ++i) out.push_back(sentence(i));
  return out;
}

std::optional<TokenId> Corpus::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::int64_t Corpus::count(std::string_view token) const {
  auto i = id(token);
  return i ? counts_[static_cast<std::size_t>(*i)] : 0;
}

std::vector<std::string> Corpus::most_frequent(std::size_t k) const {
  k = std::min(k, vocab_.size());
  return {vocab_.begin(), vocab_.begin() + static_cast<std::ptrdiff_t>(k)};
}

std::vector<std::string> split_whitespace(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string join_tokens(const Sentence& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::vector<Sentence> read_sentences(const std::filesystem::path& path, bool lowercase) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read corpus file: " + path.string());
  std::vector<Sentence> sentences;
  std::string line;
  while (std::getline(in, line)) {
    auto toks = split_whitespace(lowercase ? to_lower_ascii(line) : line);
    if (!toks.empty()) sentences.push_back(std::move(toks));
  }
  if (in.bad()) throw IoError("error while reading corpus file: " + path.string());
  return sentences;
}

Corpus build_corpus(std::vector<Sentence> sentences, const LoadOptions& options) {
  if (options.min_count > 1) {
    std::unordered_map<std::string, std::int64_t> counts;
    for (const auto& s : sentences)
      for (const auto& t : s) ++counts[t];
    for (auto& s : sentences)
      for (auto& t : s)
        if (counts[t] < options.min_count) t = std::string(kUnkToken);
  }
  Corpus corpus = Corpus::from_sentences(sentences);
  const bool only_unk = corpus.vocab_size() == 1 && corpus.vocab()[0] == kUnkToken;
  if (corpus.total_tokens() == 0 || only_unk)
    throw InvalidArgument("corpus is empty after min_count filtering");
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& options) {
  return build_corpus(read_sentences(path, options.lowercase), options);
}

void write_sentences(const std::vector<Sentence>& sentences, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path.string());
  for (const auto& s : sentences) out << join_tokens(s) << '\n';
  if (!out) throw IoError("error while writing file: " + path.string());
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  write_sentences(corpus.text(), path);
}

void write_lexicon(const Lexicon& lexicon, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write lexicon: " + path.string());
  for (const auto& [src, tgt] : lexicon) out << src << '\t' << tgt << '\n';
}

Lexicon read_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read lexicon: " + path.string());
  Lexicon lex;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected source<TAB>target");
    auto second_tab = line.find('\t', tab + 1);
    lex.emplace_back(line.substr(0, tab), line.substr(tab + 1, second_tab == std::string::npos
                                                                  ? std::string::npos
                                                                  : second_tab - tab - 1));
  }
  return lex;
}

CipherSpec make_cipher_spec(const Corpus& corpus, std::uint64_t seed) {
  CipherSpec spec;
  spec.seed = seed;
  const auto& vocab = corpus.vocab();
  std::vector<std::size_t> perm(vocab.size());
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(derive_seed(seed, 0xC1));
  for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[uniform_index(rng, i)]);
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    spec.token_map[vocab[i]] = is_reserved(vocab[i]) ? vocab[i] : cipher_name(perm[i]);
  }
  return spec;
}

CipherResult make_cipher_corpus(const Corpus& corpus, const CipherSpec& spec) {
  const CipherSpec resolved = spec.token_map.empty() ? make_cipher_spec(corpus, spec.seed) : spec;

  std::vector<std::string> renamed(corpus.vocab_size());
  std::set<std::string> images;
  for (std::size_t i = 0; i < corpus.vocab_size(); ++i) {
    const auto& tok = corpus.vocab()[i];
    auto it = resolved.token_map.find(tok);
    renamed[i] = it == resolved.token_map.end() ? tok : it->second;
    if (!images.insert(renamed[i]).second)
      throw InvalidArgument("cipher token_map is not a bijection: '" + renamed[i] + "' used twice");
  }

  std::vector<Sentence> out;
  out.reserve(corpus.num_sentences());
  for (const auto& ids : corpus.sentences()) {
    Sentence s;
    s.reserve(ids.size());
    for (TokenId id : ids) s.push_back(renamed[static_cast<std::size_t>(id)]);
    out.push_back(std::move(s));
  }

  CipherResult result;
  result.corpus = Corpus::from_sentences(out);
  result.lexicon.reserve(corpus.vocab_size());
  for (std::size_t i = 0; i < corpus.vocab_size(); ++i)
    result.lexicon.emplace_back(corpus.vocab()[i], renamed[i]);
  return result;
}

void validate(const SegmentationNoiseSpec& spec) {
  auto ok = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!ok(spec.p_split) || !ok(spec.p_merge))
    throw InvalidArgument("segmentation noise probabilities must lie in [0, 1]");
}

Sentence segment_sentence(const Sentence& tokens, double p_split, double p_merge, Rng& rng) {
  const std::size_t n = tokens.size();
  std::vector<char> split(n, 0);
  for (std::size_t i = 0; i < n; ++i) split[i] = uniform01(rng) < p_split ? 1 : 0;

  Sentence out;
  out.reserve(n + n / 4 + 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (split[i]) {
      out.push_back(tokens[i] + "#0");
      out.push_back(tokens[i] + "#1");
      continue;
    }
    if (i + 1 < n && !split[i + 1] && uniform01(rng) < p_merge) {
      out.push_back(tokens[i] + "+" + tokens[i + 1]);
      ++i;
      continue;
    }
    out.push_back(tokens[i]);
  }
  return out;
}

Corpus apply_segmentation_noise(const Corpus& corpus, const SegmentationNoiseSpec& spec) {
  validate(spec);
  Rng rng(derive_seed(spec.seed, 0x5E6));
  std::vector<Sentence> out;
  out.reserve(corpus.num_sentences());
  for (std::size_t i = 0; i < corpus.num_sentences(); ++i)
    out.push_back(segment_sentence(corpus.sentence(i), spec.p_split, spec.p_merge, rng));
  return Corpus::from_sentences(out);
}

}  // namespace monost
