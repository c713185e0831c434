#include "emtl/emotion.hpp"

#include <fstream>
#include <iostream>

#include "emtl/errors.hpp"
#include "json.hpp"

namespace emtl {

namespace {
using json = nlohmann::json;
}

int EmotionScheme::index_of(const std::string& class_name) const {
  for (int i = 0; i < n(); ++i)
    if (classes[static_cast<std::size_t>(i)] == class_name) return i;
  return -1;
}

const EmotionScheme& ekman6() {
  static const EmotionScheme s{SchemeKind::Ekman6,
                               "Ekman6",
                               {"joy", "surprise", "anger", "sadness", "disgust", "fear"}};
  return s;
}

const EmotionScheme& plutchik8() {
  static const EmotionScheme s{
      SchemeKind::Plutchik8,
      "Plutchik8",
      {"joy", "surprise", "trust", "anger", "anticipation", "sadness", "disgust", "fear"}};
  return s;
}

const EmotionScheme& scheme_by_name(const std::string& name) {
  if (name == "Ekman6" || name == "ekman") return ekman6();
  if (name == "Plutchik8" || name == "plutchik") return plutchik8();
  throw InvalidInput("unknown emotion scheme \"" + name + "\" (expected Ekman6 or Plutchik8)");
}

const std::map<std::string, std::string>& emotion_color_map() {
  static const std::map<std::string, std::string> colors = {
      {"joy", "#edb120"},     {"surprise", "#ff7f0e"},     {"trust", "#17becf"},
      {"anger", "#d62728"},   {"anticipation", "#8c564b"}, {"sadness", "#1f77b4"},
      {"disgust", "#2ca02c"}, {"fear", "#9467bd"},
  };
  return colors;
}

EmotionLexicon EmotionLexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open lexicon file: " + path);
  EmotionLexicon lex;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw InvalidInput(path + ":" + std::to_string(line_no) +
                         ": expected token<TAB>scheme<TAB>class_name");
    std::string token = line.substr(0, t1);
    std::string scheme_name = line.substr(t1 + 1, t2 - t1 - 1);
    std::string class_name = line.substr(t2 + 1);
    const EmotionScheme& scheme = scheme_by_name(scheme_name);
    int idx = scheme.index_of(class_name);
    if (idx < 0)
      throw InvalidInput(path + ":" + std::to_string(line_no) + ": unknown class \"" + class_name +
                         "\" for scheme " + scheme.name);
    lex.add(token, scheme.kind, idx);
  }
  return lex;
}

void EmotionLexicon::add(const std::string& token, SchemeKind scheme, int class_index) {
  const EmotionScheme& s = scheme == SchemeKind::Ekman6 ? ekman6() : plutchik8();
  if (class_index < 0 || class_index >= s.n())
    throw InvalidInput("lexicon: class index " + std::to_string(class_index) +
                       " out of range for " + s.name);
  entries_[token][scheme].insert(class_index);
}

const std::set<int>* EmotionLexicon::classes_for(const std::string& token,
                                                 SchemeKind scheme) const {
  auto it = entries_.find(token);
  if (it == entries_.end()) return nullptr;
  auto sit = it->second.find(scheme);
  return sit == it->second.end() ? nullptr : &sit->second;
}

std::pair<int, int> lexicon_annotate(const std::vector<std::string>& tokens,
                                     const EmotionLexicon& lexicon, const EmotionScheme& scheme,
                                     int default_class) {
  std::vector<int> counts(static_cast<std::size_t>(scheme.n()), 0);
  int matched = 0;
  for (const std::string& tok : tokens) {
    const std::set<int>* classes = lexicon.classes_for(tok, scheme.kind);
    if (!classes) continue;
    ++matched;
    for (int c : *classes) counts[static_cast<std::size_t>(c)]++;
  }
  if (matched == 0) return {default_class, 0};
  int best = 0;
  for (int c = 1; c < scheme.n(); ++c)
    if (counts[static_cast<std::size_t>(c)] > counts[static_cast<std::size_t>(best)]) best = c;
  return {best, matched};
}

Corpus import_annotations(const Corpus& corpus, const std::string& path,
                          const EmotionScheme& scheme) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open annotation file: " + path);

  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& msg) {
    throw InvalidInput(path + ":" + std::to_string(line_no) + ": " + msg);
  };

  // header
  if (!std::getline(in, line)) throw InvalidInput(path + ": empty annotation file");
  ++line_no;
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    fail(std::string("malformed header: ") + e.what());
  }
  if (!header.contains("scheme") || !header["scheme"].is_string())
    fail("header must be {\"scheme\": \"Ekman6\"|\"Plutchik8\"}");
  if (header["scheme"].get<std::string>() != scheme.name)
    fail("annotation file is for scheme " + header["scheme"].get<std::string>() +
         ", expected " + scheme.name);

  std::map<std::string, int> tags;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      fail(std::string("malformed JSON: ") + e.what());
    }
    if (!obj.contains("id") || !obj["id"].is_string()) fail("missing or non-string \"id\"");
    std::string id = obj["id"].get<std::string>();
    if (!obj.contains("class")) fail("missing \"class\"");
    int idx = -1;
    if (obj["class"].is_string()) {
      idx = scheme.index_of(obj["class"].get<std::string>());
      if (idx < 0)
        fail("unknown class \"" + obj["class"].get<std::string>() + "\" for scheme " + scheme.name);
    } else if (obj["class"].is_number_integer()) {
      idx = obj["class"].get<int>();
      if (idx < 0 || idx >= scheme.n())
        fail("class index " + std::to_string(idx) + " outside [0," + std::to_string(scheme.n()) + ")");
    } else {
      fail("\"class\" must be a string or an integer");
    }
    if (!tags.emplace(id, idx).second) fail("duplicate id \"" + id + "\"");
  }

  std::vector<std::string> missing;
  for (const Sample& s : corpus.samples)
    if (!tags.count(s.id)) missing.push_back(s.id);
  if (!missing.empty()) {
    std::string msg = path + ": annotations missing for " + std::to_string(missing.size()) +
                      " sample(s):";
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) msg += " " + missing[i];
    if (missing.size() > 10) msg += " ...";
    throw InvalidInput(msg);
  }

  Corpus out = corpus;
  for (Sample& s : out.samples) {
    int idx = tags.at(s.id);
    if (scheme.kind == SchemeKind::Ekman6)
      s.emotion_ekman = idx;
    else
      s.emotion_plutchik = idx;
  }
  return out;
}

Corpus annotate_corpus(const Corpus& corpus, const Annotator& annotator,
                       const EmotionScheme& scheme) {
  bool already_tagged = false;
  for (const Sample& s : corpus.samples) {
    const auto& tag = scheme.kind == SchemeKind::Ekman6 ? s.emotion_ekman : s.emotion_plutchik;
    if (tag) {
      already_tagged = true;
      break;
    }
  }
  if (already_tagged)
    std::cerr << "warning: corpus \"" << corpus.name << "\" already carries " << scheme.name
              << " tags; overwriting\n";

  if (const auto* import = std::get_if<ImportAnnotator>(&annotator))
    return import_annotations(corpus, import->path, scheme);

  const auto& lex = std::get<LexiconAnnotator>(annotator);
  Corpus out = corpus;
  for (Sample& s : out.samples) {
    auto [cls, matched] = lexicon_annotate(preprocess_text(s.text, lex.contractions),
                                           *lex.lexicon, scheme, lex.default_class);
    (void)matched;
    if (scheme.kind == SchemeKind::Ekman6)
      s.emotion_ekman = cls;
    else
      s.emotion_plutchik = cls;
  }
  return out;
}

}  // namespace emtl
