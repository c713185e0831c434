#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace emtl {

// One annotated text record. Label 0 is non-rumour/real, label 1 is
// rumour/fake; the positive class throughout is 1.
struct Sample {
  std::string id;
  std::string text;
  int label = 0;
  std::optional<int> emotion_ekman;     // 0..5
  std::optional<int> emotion_plutchik;  // 0..7
  std::optional<std::string> domain;
  std::optional<std::string> event;
};

struct CorpusStats {
  int total = 0;
  std::array<int, 2> label_counts{0, 0};
  std::vector<int> ekman_counts;     // size 6 when every sample is tagged, else empty
  std::vector<int> plutchik_counts;  // size 8 when every sample is tagged, else empty
  std::map<std::string, int> domain_counts;
};

struct Corpus {
  std::string name;
  std::vector<Sample> samples;

  int size() const { return static_cast<int>(samples.size()); }
  CorpusStats stats() const;
};

// Contraction dictionary: whole-token entries ("can't" -> "cannot") plus
// suffix rules, recognized by keys that start with an apostrophe or equal
// "n't" ("'ll" -> "will"). Exact entries win over suffix rules; suffix rules
// apply longest first and require a non-empty remaining prefix.
struct ContractionDict {
  std::map<std::string, std::string> exact;
  std::vector<std::pair<std::string, std::string>> suffixes;  // sorted longest first

  static ContractionDict from_entries(const std::map<std::string, std::string>& entries);
};

ContractionDict default_contractions();
// UTF-8 file, lines "contraction<TAB>expansion"
ContractionDict load_contractions(const std::string& path);

// lowercase -> expand contractions on whole tokens -> delete punctuation and
// digits -> split on whitespace. Idempotent; never emits uppercase, digits or
// punctuation. Bytes >= 0x80 pass through untouched.
std::vector<std::string> preprocess_text(const std::string& raw, const ContractionDict& dict);

// JSONL, one object per line:
// {"id": str, "text": str, "label": 0|1, "emotion_ekman": int?,
//  "emotion_plutchik": int?, "domain": str?, "event": str?}
// Unknown keys are ignored with a warning; missing "id" takes the line number.
Corpus load_corpus(const std::string& path);
void save_corpus(const Corpus& corpus, const std::string& path);

// Deterministic per-class split; proportions preserved within one sample.
// Every label class needs at least 2 samples. Same inputs, same split.
std::pair<Corpus, Corpus> stratified_split(const Corpus& corpus, double test_fraction,
                                           std::uint64_t seed);

class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  // Tokens with frequency >= min_freq ranked by (frequency desc, token asc),
  // truncated to max_size - 2 after the reserved pad/unk slots.
  static Vocabulary build(const std::vector<std::vector<std::string>>& token_lists, int min_freq,
                          int max_size);

  int id(const std::string& token) const {
    auto it = map_.find(token);
    return it == map_.end() ? kUnk : it->second;
  }
  bool contains(const std::string& token) const { return map_.count(token) > 0; }
  const std::string& token(int id) const { return tokens_[static_cast<std::size_t>(id)]; }
  int size() const { return static_cast<int>(tokens_.size()); }
  int max_size() const { return max_size_; }
  int min_freq() const { return min_freq_; }

  // tokens in index order, reserved slots first; inverse of build
  static Vocabulary from_saved(const std::vector<std::string>& tokens, int max_size, int min_freq);

 private:
  std::unordered_map<std::string, int> map_;
  std::vector<std::string> tokens_{"<pad>", "<unk>"};
  int max_size_ = 0;
  int min_freq_ = 0;
};

void save_vocab(const Vocabulary& vocab, const std::string& path);
Vocabulary load_vocab(const std::string& path);

Vocabulary build_vocab(const Corpus& corpus, const ContractionDict& dict, int min_freq = 1,
                       int max_size = 20000);

struct EncodedSample {
  std::string id;
  std::vector<int> token_ids;  // exactly max_len entries, right-padded
  int true_length = 0;
  int label = 0;
  int emotion_ekman = -1;
  int emotion_plutchik = -1;
  int domain_index = -1;
};

struct EncodedCorpus {
  std::string name;
  int max_len = 0;
  std::vector<EncodedSample> samples;

  int size() const { return static_cast<int>(samples.size()); }
};

EncodedSample encode(const std::vector<std::string>& tokens, const Vocabulary& vocab, int max_len);
EncodedSample encode(const Sample& sample, const ContractionDict& dict, const Vocabulary& vocab,
                     int max_len);

// Domain tags sorted lexicographically; index is stable for a given corpus.
std::map<std::string, int> build_domain_index(const Corpus& corpus);

EncodedCorpus encode_corpus(const Corpus& corpus, const ContractionDict& dict,
                            const Vocabulary& vocab, int max_len,
                            const std::map<std::string, int>* domain_index = nullptr);

}  // namespace emtl
