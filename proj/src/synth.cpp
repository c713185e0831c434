#include "emtl/synth.hpp"

#include <fstream>

#include "emtl/errors.hpp"
#include "emtl/prng.hpp"
#include "json.hpp"

namespace emtl {

namespace {

constexpr int kEmotionPoolWords = 6;
constexpr int kLabelPoolWords = 8;
constexpr int kFillerWords = 30;

void validate(const SynthConfig& c) {
  if (c.n < 4) throw InvalidInput("synth: need at least 4 samples");
  if (c.emotion_label_corr < 0.0 || c.emotion_label_corr > 1.0)
    throw InvalidInput("synth: emotion_label_corr must lie in [0,1]");
  if (c.label_noise < 0.0 || c.label_noise > 0.5)
    throw InvalidInput("synth: label_noise must lie in [0,0.5]");
  if (c.label_token_fidelity < 0.0 || c.label_token_fidelity > 1.0)
    throw InvalidInput("synth: label_token_fidelity must lie in [0,1]");
  if (c.domain.empty()) throw InvalidInput("synth: domain prefix must be non-empty");
}

}  // namespace

std::vector<int> emotion_pool_for_label(const EmotionScheme& scheme, int label) {
  if (scheme.kind == SchemeKind::Ekman6) {
    // rumours: sadness, surprise; non-rumours: joy, fear
    return label == 1 ? std::vector<int>{scheme.index_of("sadness"), scheme.index_of("surprise")}
                      : std::vector<int>{scheme.index_of("joy"), scheme.index_of("fear")};
  }
  return label == 1 ? std::vector<int>{scheme.index_of("sadness"), scheme.index_of("surprise")}
                    : std::vector<int>{scheme.index_of("trust"), scheme.index_of("fear")};
}

Corpus synth_corpus(const SynthConfig& config) {
  validate(config);
  const EmotionScheme& scheme = scheme_by_name(config.scheme);
  RngStream rng(config.seed, "synth/" + config.domain);

  Corpus corpus;
  corpus.name = config.domain;
  corpus.samples.reserve(static_cast<std::size_t>(config.n));

  // tokens must survive preprocessing, which deletes digits: spell indices
  // with letters instead
  auto letters = [](int v) {
    std::string s;
    s.push_back(static_cast<char>('a' + v % 26));
    s.push_back(static_cast<char>('a' + (v / 26) % 26));
    return s;
  };
  auto emo_token = [&](int cls, int j) {
    return config.domain + "emo" + letters(cls) + letters(j);
  };
  auto label_token = [&](int label, int j) {
    return config.domain + (label == 1 ? "labpos" : "labneg") + letters(j);
  };
  auto filler_token = [&](int j) { return config.domain + "fill" + letters(j); };

  for (int i = 0; i < config.n; ++i) {
    const int true_label = rng.uniform() < 0.5 ? 0 : 1;

    int emotion;
    if (rng.uniform() < config.emotion_label_corr) {
      std::vector<int> pool = emotion_pool_for_label(scheme, true_label);
      emotion = pool[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(pool.size())))];
    } else {
      emotion = rng.uniform_int(scheme.n());
    }

    std::vector<std::string> tokens;
    for (int t = 0; t < config.emotion_tokens; ++t)
      tokens.push_back(emo_token(emotion, rng.uniform_int(kEmotionPoolWords)));
    for (int t = 0; t < config.label_tokens; ++t) {
      int src = rng.uniform() < config.label_token_fidelity ? true_label : 1 - true_label;
      tokens.push_back(label_token(src, rng.uniform_int(kLabelPoolWords)));
    }
    for (int t = 0; t < config.filler_tokens; ++t)
      tokens.push_back(filler_token(rng.uniform_int(kFillerWords)));
    seeded_shuffle(tokens, rng);

    Sample s;
    s.id = config.domain + "-" + std::to_string(i);
    std::string text;
    for (const std::string& tok : tokens) {
      if (!text.empty()) text += " ";
      text += tok;
    }
    s.text = std::move(text);
    s.label = rng.uniform() < config.label_noise ? 1 - true_label : true_label;
    if (scheme.kind == SchemeKind::Ekman6)
      s.emotion_ekman = emotion;
    else
      s.emotion_plutchik = emotion;
    s.domain = config.domain;
    corpus.samples.push_back(std::move(s));
  }
  return corpus;
}

void write_synth_params(const SynthConfig& config, const std::string& path) {
  const EmotionScheme& scheme = scheme_by_name(config.scheme);
  nlohmann::ordered_json doc;
  doc["generator"] = "emtl-synth/1";
  doc["n"] = config.n;
  doc["scheme"] = scheme.name;
  doc["emotion_label_corr"] = config.emotion_label_corr;
  doc["label_noise"] = config.label_noise;
  doc["label_token_fidelity"] = config.label_token_fidelity;
  doc["emotion_tokens"] = config.emotion_tokens;
  doc["label_tokens"] = config.label_tokens;
  doc["filler_tokens"] = config.filler_tokens;
  doc["domain"] = config.domain;
  doc["seed"] = config.seed;
  doc["emotion_pool_label0"] = emotion_pool_for_label(scheme, 0);
  doc["emotion_pool_label1"] = emotion_pool_for_label(scheme, 1);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write synth params: " + path);
  out << doc.dump(1) << "\n";
}

}  // namespace emtl
