#pragma once

#include <cstdint>
#include <string>

#include "emtl/corpus.hpp"
#include "emtl/emotion.hpp"

namespace emtl {

// Synthetic veracity corpus with a planted emotion-legitimacy correlation.
// Each sample draws a true label, then an emotion class from the label's pool
// with probability emotion_label_corr (uniform otherwise), then emits
// emotion-, label- and filler tokens prefixed by the domain string. The
// observed label flips with probability label_noise. Two corpora generated
// with different domain prefixes share no content vocabulary.
struct SynthConfig {
  int n = 1000;
  std::string scheme = "ekman";  // ekman | plutchik
  double emotion_label_corr = 0.8;
  double label_noise = 0.10;
  // probability each label token comes from the true label's pool; 1.0 with
  // label_noise 0 yields a strictly separable corpus
  double label_token_fidelity = 0.75;
  int emotion_tokens = 4;
  int label_tokens = 2;
  int filler_tokens = 6;
  std::string domain = "alpha";
  std::uint64_t seed = 1;
};

Corpus synth_corpus(const SynthConfig& config);

// Ground-truth generation parameters, including the emotion pools per label.
void write_synth_params(const SynthConfig& config, const std::string& path);

// label -> emotion-class pool used by the generator (rumours lean sadness and
// surprise, non-rumours joy/trust and fear)
std::vector<int> emotion_pool_for_label(const EmotionScheme& scheme, int label);

}  // namespace emtl
