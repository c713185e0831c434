#include "emtl/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "emtl/errors.hpp"
#include "emtl/prng.hpp"
#include "json.hpp"

namespace emtl {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

bool is_keep_char(unsigned char c) { return (c >= 'a' && c <= 'z') || c >= 0x80; }

std::string file_stem(const std::string& path) {
  auto slash = path.find_last_of("/\\");
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = base.find_last_of('.');
  return dot == std::string::npos ? base : base.substr(0, dot);
}

}  // namespace

CorpusStats Corpus::stats() const {
  CorpusStats s;
  s.total = size();
  std::vector<int> ek(6, 0), pl(8, 0);
  int ek_tagged = 0, pl_tagged = 0;
  for (const Sample& sm : samples) {
    s.label_counts[static_cast<std::size_t>(sm.label)]++;
    if (sm.emotion_ekman) {
      ek[static_cast<std::size_t>(*sm.emotion_ekman)]++;
      ++ek_tagged;
    }
    if (sm.emotion_plutchik) {
      pl[static_cast<std::size_t>(*sm.emotion_plutchik)]++;
      ++pl_tagged;
    }
    if (sm.domain) s.domain_counts[*sm.domain]++;
  }
  if (ek_tagged == s.total && s.total > 0) s.ekman_counts = std::move(ek);
  if (pl_tagged == s.total && s.total > 0) s.plutchik_counts = std::move(pl);
  return s;
}

ContractionDict ContractionDict::from_entries(const std::map<std::string, std::string>& entries) {
  ContractionDict d;
  for (const auto& [key, expansion] : entries) {
    if (key.empty()) continue;
    if (key[0] == '\'' || key == "n't")
      d.suffixes.emplace_back(key, expansion);
    else
      d.exact[key] = expansion;
  }
  std::sort(d.suffixes.begin(), d.suffixes.end(), [](const auto& a, const auto& b) {
    if (a.first.size() != b.first.size()) return a.first.size() > b.first.size();
    return a.first < b.first;
  });
  return d;
}

ContractionDict default_contractions() {
  // Versioned v1 dictionary; data/contractions.tsv ships the same entries.
  return ContractionDict::from_entries({
      {"it's", "it is"},
      {"can't", "cannot"},
      {"won't", "will not"},
      {"n't", "not"},
      {"'ll", "will"},
      {"'re", "are"},
      {"'ve", "have"},
      {"'m", "am"},
      {"'d", "would"},
  });
}

ContractionDict load_contractions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open contraction dictionary: " + path);
  std::map<std::string, std::string> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw InvalidInput(path + ":" + std::to_string(line_no) + ": expected contraction<TAB>expansion");
    entries[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return ContractionDict::from_entries(entries);
}

std::vector<std::string> preprocess_text(const std::string& raw, const ContractionDict& dict) {
  // Curly quotes and dashes show up constantly in scraped text; fold them to
  // their ASCII forms so contraction matching and punctuation removal see them.
  static const std::vector<std::pair<std::string, std::string>> folds = {
      {"\xe2\x80\x98", "'"}, {"\xe2\x80\x99", "'"},  {"\xe2\x80\x9c", "\""},
      {"\xe2\x80\x9d", "\""}, {"\xe2\x80\x93", "-"}, {"\xe2\x80\x94", "-"},
      {"\xe2\x80\xa6", "..."},
  };
  std::string lowered = raw;
  for (const auto& [from, to] : folds) {
    std::size_t pos = 0;
    while ((pos = lowered.find(from, pos)) != std::string::npos) {
      lowered.replace(pos, from.size(), to);
      pos += to.size();
    }
  }
  for (char& c : lowered)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');

  std::vector<std::string> out;
  auto emit_cleaned = [&out](const std::string& piece) {
    std::string cleaned;
    for (unsigned char c : piece)
      if (is_keep_char(c)) cleaned.push_back(static_cast<char>(c));
    if (!cleaned.empty()) out.push_back(std::move(cleaned));
  };

  std::istringstream words(lowered);
  std::string token;
  while (words >> token) {
    std::string expanded;
    if (auto it = dict.exact.find(token); it != dict.exact.end()) {
      expanded = it->second;
    } else {
      for (const auto& [suffix, expansion] : dict.suffixes) {
        if (token.size() > suffix.size() &&
            token.compare(token.size() - suffix.size(), suffix.size(), suffix) == 0) {
          expanded = token.substr(0, token.size() - suffix.size()) + " " + expansion;
          break;
        }
      }
    }
    if (expanded.empty()) {
      emit_cleaned(token);
    } else {
      std::istringstream pieces(expanded);
      std::string piece;
      while (pieces >> piece) emit_cleaned(piece);
    }
  }
  return out;
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open corpus file: " + path);

  static const std::set<std::string> known_keys = {
      "id", "text", "label", "emotion_ekman", "emotion_plutchik", "domain", "event"};

  Corpus corpus;
  corpus.name = file_stem(path);
  std::set<std::string> warned;
  std::set<std::string> seen_ids;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& msg) {
    throw InvalidInput(path + ":" + std::to_string(line_no) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      fail(std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) fail("line is not a JSON object");

    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!known_keys.count(it.key()) && warned.insert(it.key()).second)
        std::cerr << "warning: " << path << ": ignoring unknown key \"" << it.key() << "\"\n";
    }

    Sample s;
    if (!obj.contains("text") || !obj["text"].is_string()) fail("missing or non-string \"text\"");
    s.text = obj["text"].get<std::string>();
    if (!obj.contains("label") || !obj["label"].is_number_integer())
      fail("missing or non-integer \"label\"");
    s.label = obj["label"].get<int>();
    if (s.label != 0 && s.label != 1) fail("label must be 0 or 1, got " + std::to_string(s.label));

    if (obj.contains("id") && !obj["id"].is_null()) {
      if (!obj["id"].is_string()) fail("\"id\" must be a string");
      s.id = obj["id"].get<std::string>();
    } else {
      s.id = std::to_string(line_no);
    }
    if (!seen_ids.insert(s.id).second) fail("duplicate id \"" + s.id + "\"");

    auto read_emotion = [&](const char* key, int n_classes) -> std::optional<int> {
      if (!obj.contains(key) || obj[key].is_null()) return std::nullopt;
      if (!obj[key].is_number_integer()) fail(std::string("\"") + key + "\" must be an integer");
      int v = obj[key].get<int>();
      if (v < 0 || v >= n_classes)
        fail(std::string("\"") + key + "\" index " + std::to_string(v) + " outside [0," +
             std::to_string(n_classes) + ")");
      return v;
    };
    s.emotion_ekman = read_emotion("emotion_ekman", 6);
    s.emotion_plutchik = read_emotion("emotion_plutchik", 8);

    if (obj.contains("domain") && !obj["domain"].is_null()) {
      if (!obj["domain"].is_string()) fail("\"domain\" must be a string");
      s.domain = obj["domain"].get<std::string>();
    }
    if (obj.contains("event") && !obj["event"].is_null()) {
      if (!obj["event"].is_string()) fail("\"event\" must be a string");
      s.event = obj["event"].get<std::string>();
    }
    corpus.samples.push_back(std::move(s));
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write corpus file: " + path);
  for (const Sample& s : corpus.samples) {
    ordered_json obj;
    obj["id"] = s.id;
    obj["text"] = s.text;
    obj["label"] = s.label;
    if (s.emotion_ekman) obj["emotion_ekman"] = *s.emotion_ekman;
    if (s.emotion_plutchik) obj["emotion_plutchik"] = *s.emotion_plutchik;
    if (s.domain) obj["domain"] = *s.domain;
    if (s.event) obj["event"] = *s.event;
    out << obj.dump() << "\n";
  }
}

std::pair<Corpus, Corpus> stratified_split(const Corpus& corpus, double test_fraction,
                                           std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw InvalidInput("stratified_split: test_fraction must be in (0,1), got " +
                       std::to_string(test_fraction));

  std::array<std::vector<int>, 2> by_label;
  for (int i = 0; i < corpus.size(); ++i)
    by_label[static_cast<std::size_t>(corpus.samples[static_cast<std::size_t>(i)].label)].push_back(i);

  std::vector<bool> in_test(static_cast<std::size_t>(corpus.size()), false);
  for (int label = 0; label < 2; ++label) {
    auto& idx = by_label[static_cast<std::size_t>(label)];
    const int n = static_cast<int>(idx.size());
    if (n < 2)
      throw InvalidInput("stratified_split: class " + std::to_string(label) + " has " +
                         std::to_string(n) + " sample(s); need at least 2");
    RngStream rng(seed, "split/label" + std::to_string(label));
    seeded_shuffle(idx, rng);
    int n_test = static_cast<int>(std::lround(test_fraction * n));
    n_test = std::clamp(n_test, 1, n - 1);
    for (int i = 0; i < n_test; ++i) in_test[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = true;
  }

  Corpus train, test;
  train.name = corpus.name;
  test.name = corpus.name;
  for (int i = 0; i < corpus.size(); ++i) {
    const Sample& s = corpus.samples[static_cast<std::size_t>(i)];
    (in_test[static_cast<std::size_t>(i)] ? test : train).samples.push_back(s);
  }
  return {std::move(train), std::move(test)};
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& token_lists,
                             int min_freq, int max_size) {
  if (max_size < 2) throw InvalidInput("Vocabulary: max_size must be at least 2");
  if (min_freq < 1) throw InvalidInput("Vocabulary: min_freq must be at least 1");

  std::map<std::string, int> freq;  // ordered: lexicographic tie-break for free
  for (const auto& tokens : token_lists)
    for (const auto& t : tokens) freq[t]++;

  std::vector<std::pair<std::string, int>> ranked;
  ranked.reserve(freq.size());
  for (auto& [tok, f] : freq)
    if (f >= min_freq) ranked.emplace_back(tok, f);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  Vocabulary v;
  v.max_size_ = max_size;
  v.min_freq_ = min_freq;
  const int capacity = max_size - 2;
  for (const auto& [tok, f] : ranked) {
    if (static_cast<int>(v.tokens_.size()) - 2 >= capacity) break;
    v.map_.emplace(tok, static_cast<int>(v.tokens_.size()));
    v.tokens_.push_back(tok);
  }
  return v;
}

Vocabulary Vocabulary::from_saved(const std::vector<std::string>& tokens, int max_size,
                                  int min_freq) {
  if (tokens.size() < 2 || tokens[0] != "<pad>" || tokens[1] != "<unk>")
    throw InvalidInput("vocabulary: token list must start with <pad>, <unk>");
  Vocabulary v;
  v.max_size_ = max_size;
  v.min_freq_ = min_freq;
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    if (!v.map_.emplace(tokens[i], static_cast<int>(i)).second)
      throw InvalidInput("vocabulary: duplicate token \"" + tokens[i] + "\"");
    v.tokens_.push_back(tokens[i]);
  }
  return v;
}

void save_vocab(const Vocabulary& vocab, const std::string& path) {
  ordered_json doc;
  doc["format"] = "emtl-vocab/1";
  doc["max_size"] = vocab.max_size();
  doc["min_freq"] = vocab.min_freq();
  std::vector<std::string> tokens;
  tokens.reserve(static_cast<std::size_t>(vocab.size()));
  for (int i = 0; i < vocab.size(); ++i) tokens.push_back(vocab.token(i));
  doc["tokens"] = std::move(tokens);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write vocabulary: " + path);
  out << doc.dump(1) << "\n";
}

Vocabulary load_vocab(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open vocabulary: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InvalidInput(path + ": malformed vocabulary: " + e.what());
  }
  if (doc.value("format", "") != "emtl-vocab/1")
    throw InvalidInput(path + ": not an emtl vocabulary file");
  return Vocabulary::from_saved(doc.at("tokens").get<std::vector<std::string>>(),
                                doc.at("max_size").get<int>(), doc.at("min_freq").get<int>());
}

Vocabulary build_vocab(const Corpus& corpus, const ContractionDict& dict, int min_freq,
                       int max_size) {
  std::vector<std::vector<std::string>> token_lists;
  token_lists.reserve(corpus.samples.size());
  for (const Sample& s : corpus.samples) token_lists.push_back(preprocess_text(s.text, dict));
  return Vocabulary::build(token_lists, min_freq, max_size);
}

EncodedSample encode(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                     int max_len) {
  if (max_len <= 0) throw InvalidInput("encode: max_len must be positive");
  EncodedSample e;
  e.token_ids.assign(static_cast<std::size_t>(max_len), Vocabulary::kPad);
  e.true_length = std::min(static_cast<int>(tokens.size()), max_len);
  for (int i = 0; i < e.true_length; ++i)
    e.token_ids[static_cast<std::size_t>(i)] = vocab.id(tokens[static_cast<std::size_t>(i)]);
  return e;
}

EncodedSample encode(const Sample& sample, const ContractionDict& dict, const Vocabulary& vocab,
                     int max_len) {
  EncodedSample e = encode(preprocess_text(sample.text, dict), vocab, max_len);
  e.id = sample.id;
  e.label = sample.label;
  if (sample.emotion_ekman) e.emotion_ekman = *sample.emotion_ekman;
  if (sample.emotion_plutchik) e.emotion_plutchik = *sample.emotion_plutchik;
  return e;
}

std::map<std::string, int> build_domain_index(const Corpus& corpus) {
  std::map<std::string, int> index;
  for (const Sample& s : corpus.samples)
    if (s.domain) index.emplace(*s.domain, 0);
  int next = 0;
  for (auto& [domain, id] : index) id = next++;
  return index;
}

EncodedCorpus encode_corpus(const Corpus& corpus, const ContractionDict& dict,
                            const Vocabulary& vocab, int max_len,
                            const std::map<std::string, int>* domain_index) {
  EncodedCorpus ec;
  ec.name = corpus.name;
  ec.max_len = max_len;
  ec.samples.reserve(corpus.samples.size());
  for (const Sample& s : corpus.samples) {
    EncodedSample e = encode(s, dict, vocab, max_len);
    if (domain_index && s.domain) {
      auto it = domain_index->find(*s.domain);
      e.domain_index = it == domain_index->end() ? -1 : it->second;
    }
    ec.samples.push_back(std::move(e));
  }
  return ec;
}

}  // namespace emtl
