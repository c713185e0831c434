#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "emtl/corpus.hpp"

namespace emtl {

enum class SchemeKind { Ekman6, Plutchik8 };

// Class order is fixed and version-stable; the indices are part of the file
// format. Joy is index 0 in both schemes and serves as the fallback class.
struct EmotionScheme {
  SchemeKind kind;
  std::string name;
  std::vector<std::string> classes;

  int n() const { return static_cast<int>(classes.size()); }
  // -1 when the class name is unknown
  int index_of(const std::string& class_name) const;
};

const EmotionScheme& ekman6();
const EmotionScheme& plutchik8();
const EmotionScheme& scheme_by_name(const std::string& name);  // "Ekman6" | "Plutchik8"

// Stable class -> color assignment shared by both schemes, used by plot
// emission so the same emotion gets the same color everywhere.
const std::map<std::string, std::string>& emotion_color_map();

class EmotionLexicon {
 public:
  // UTF-8 lines: token<TAB>scheme<TAB>class_name
  static EmotionLexicon load(const std::string& path);
  void add(const std::string& token, SchemeKind scheme, int class_index);
  const std::set<int>* classes_for(const std::string& token, SchemeKind scheme) const;
  int size() const { return static_cast<int>(entries_.size()); }

 private:
  // token -> per-scheme class index sets
  std::map<std::string, std::map<SchemeKind, std::set<int>>> entries_;
};

// argmax over per-class matched-token counts; ties break toward the lowest
// class index; zero matches yields (default_class, 0)
std::pair<int, int> lexicon_annotate(const std::vector<std::string>& tokens,
                                     const EmotionLexicon& lexicon, const EmotionScheme& scheme,
                                     int default_class = 0);

// JSONL whose first line is {"scheme": "Ekman6"|"Plutchik8"}, followed by
// {"id": str, "class": str|int} lines. Every corpus sample must be covered.
Corpus import_annotations(const Corpus& corpus, const std::string& path,
                          const EmotionScheme& scheme);

struct LexiconAnnotator {
  const EmotionLexicon* lexicon;
  ContractionDict contractions = default_contractions();
  int default_class = 0;
};
struct ImportAnnotator {
  std::string path;
};
using Annotator = std::variant<LexiconAnnotator, ImportAnnotator>;

// Tags every sample for the scheme; existing tags are overwritten with a
// warning. Never changes sample count, ids, text or veracity labels.
Corpus annotate_corpus(const Corpus& corpus, const Annotator& annotator,
                       const EmotionScheme& scheme);

}  // namespace emtl
