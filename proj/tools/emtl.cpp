// Command-line entry point. Exit codes: 0 success, 1 runtime failure,
// 2 invalid config or input.

#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "emtl/corpus.hpp"
#include "emtl/emotion.hpp"
#include "emtl/errors.hpp"
#include "emtl/experiment.hpp"
#include "emtl/synth.hpp"

namespace {

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

struct OverrideFlags {
  std::string seed, alpha, epochs;

  std::map<std::string, std::string> to_map() const {
    std::map<std::string, std::string> m;
    if (!seed.empty()) m["seed"] = seed;
    if (!alpha.empty()) m["alpha"] = alpha;
    if (!epochs.empty()) m["epochs"] = epochs;
    return m;
  }
};

void add_override_flags(CLI::App* cmd, OverrideFlags& flags) {
  cmd->add_option("--seed", flags.seed, "override the config seed");
  cmd->add_option("--alpha", flags.alpha, "override the auxiliary loss weight");
  cmd->add_option("--epochs", flags.epochs, "override the epoch count");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"emtl - emotion-aware multi-task text veracity experiments"};
  app.require_subcommand(1);

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "lowercase, de-contract and clean a corpus");
  std::string pre_in, pre_out, pre_contractions;
  pre->add_option("--in", pre_in, "input corpus JSONL")->required();
  pre->add_option("--out", pre_out, "output corpus JSONL")->required();
  pre->add_option("--contractions", pre_contractions, "contraction dictionary TSV");

  // annotate
  auto* ann = app.add_subcommand("annotate", "tag a corpus with emotion classes");
  std::string ann_in, ann_out, ann_scheme = "ekman", ann_lexicon, ann_import;
  ann->add_option("--in", ann_in, "input corpus JSONL")->required();
  ann->add_option("--out", ann_out, "output corpus JSONL")->required();
  ann->add_option("--scheme", ann_scheme, "ekman or plutchik");
  ann->add_option("--lexicon", ann_lexicon, "lexicon TSV (token<TAB>scheme<TAB>class)");
  ann->add_option("--import", ann_import, "precomputed annotations JSONL");

  // run / cross / sweep
  auto* run = app.add_subcommand("run", "train and evaluate one configuration");
  std::string run_config;
  OverrideFlags run_over;
  run->add_option("--config", run_config, "experiment config JSON")->required();
  add_override_flags(run, run_over);

  auto* cross = app.add_subcommand("cross", "train in-domain, evaluate on a cross-domain corpus");
  std::string cross_config;
  OverrideFlags cross_over;
  cross->add_option("--config", cross_config, "experiment config JSON")->required();
  add_override_flags(cross, cross_over);

  auto* sweep = app.add_subcommand("sweep", "alpha grid sweep with curve CSV and SVG");
  std::string sweep_config, sweep_models;
  OverrideFlags sweep_over;
  sweep->add_option("--config", sweep_config, "experiment config JSON")->required();
  sweep->add_option("--models", sweep_models, "comma list of encoder kinds (default: config's)");
  add_override_flags(sweep, sweep_over);

  // pca
  auto* pca = app.add_subcommand("pca", "3-component PCA legitimacy views");
  emtl::PcaArgs pca_args;
  std::string pca_schemes = "ekman";
  pca->add_option("--corpus", pca_args.corpus_path, "annotated corpus JSONL")->required();
  pca->add_option("--schemes", pca_schemes, "comma list: ekman,plutchik");
  pca->add_option("--embeddings", pca_args.embeddings_path, "imported embeddings JSONL");
  pca->add_option("--run-dir", pca_args.run_dir, "run directory with checkpoint.json + vocab.json");
  pca->add_option("--out", pca_args.out_dir, "output directory")->required();

  // report
  auto* report = app.add_subcommand("report", "aggregate run metrics into a results table");
  std::string report_dir;
  report->add_option("--dir", report_dir, "directory containing run outputs")->required();

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus with planted correlation");
  emtl::SynthConfig synth_cfg;
  std::string synth_out, synth_params_out;
  synth->add_option("--out", synth_out, "output corpus JSONL")->required();
  synth->add_option("--params-out", synth_params_out, "ground-truth parameters JSON");
  synth->add_option("--n", synth_cfg.n, "sample count");
  synth->add_option("--scheme", synth_cfg.scheme, "ekman or plutchik");
  synth->add_option("--corr", synth_cfg.emotion_label_corr, "emotion-legitimacy correlation");
  synth->add_option("--noise", synth_cfg.label_noise, "label noise rate");
  synth->add_option("--fidelity", synth_cfg.label_token_fidelity, "label token fidelity");
  synth->add_option("--domain", synth_cfg.domain, "domain prefix and tag");
  synth->add_option("--seed", synth_cfg.seed, "generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (pre->parsed()) {
      emtl::ContractionDict dict = pre_contractions.empty()
                                       ? emtl::default_contractions()
                                       : emtl::load_contractions(pre_contractions);
      emtl::Corpus corpus = emtl::load_corpus(pre_in);
      for (emtl::Sample& s : corpus.samples) {
        std::vector<std::string> tokens = emtl::preprocess_text(s.text, dict);
        std::string joined;
        for (const std::string& t : tokens) {
          if (!joined.empty()) joined += " ";
          joined += t;
        }
        s.text = std::move(joined);
      }
      emtl::save_corpus(corpus, pre_out);
      std::cout << "preprocessed " << corpus.size() << " samples -> " << pre_out << "\n";
    } else if (ann->parsed()) {
      if (ann_lexicon.empty() == ann_import.empty())
        throw emtl::InvalidInput(
            "annotate: exactly one of --lexicon and --import must be given");
      const emtl::EmotionScheme& scheme = emtl::scheme_by_name(ann_scheme);
      emtl::Corpus corpus = emtl::load_corpus(ann_in);
      emtl::Corpus tagged;
      if (!ann_import.empty()) {
        tagged = emtl::annotate_corpus(corpus, emtl::ImportAnnotator{ann_import}, scheme);
      } else {
        emtl::EmotionLexicon lexicon = emtl::EmotionLexicon::load(ann_lexicon);
        tagged = emtl::annotate_corpus(corpus, emtl::LexiconAnnotator{&lexicon}, scheme);
      }
      emtl::save_corpus(tagged, ann_out);
      std::cout << "annotated " << tagged.size() << " samples with " << scheme.name << " -> "
                << ann_out << "\n";
    } else if (run->parsed()) {
      emtl::ResultsRow row = emtl::cmd_run(emtl::load_config(run_config), run_over.to_map());
      std::cout << emtl::results_csv_header() << "\n" << emtl::results_row_csv(row) << "\n";
    } else if (cross->parsed()) {
      auto rows = emtl::cmd_cross(emtl::load_config(cross_config), cross_over.to_map());
      std::cout << emtl::results_csv_header() << "\n";
      for (const auto& row : rows) std::cout << emtl::results_row_csv(row) << "\n";
    } else if (sweep->parsed()) {
      std::vector<emtl::EncoderKind> kinds;
      for (const std::string& name : split_list(sweep_models))
        kinds.push_back(emtl::encoder_kind_from(name));
      emtl::cmd_sweep(emtl::load_config(sweep_config), kinds, sweep_over.to_map());
    } else if (pca->parsed()) {
      pca_args.schemes = split_list(pca_schemes);
      emtl::cmd_pca(pca_args);
      std::cout << "pca views written to " << pca_args.out_dir << "\n";
    } else if (report->parsed()) {
      emtl::ReportSummary summary = emtl::cmd_report(report_dir);
      std::cout << summary.rows << " run(s) -> " << summary.csv_path << ", " << summary.md_path
                << "\n";
    } else if (synth->parsed()) {
      emtl::Corpus corpus = emtl::synth_corpus(synth_cfg);
      emtl::save_corpus(corpus, synth_out);
      if (!synth_params_out.empty()) emtl::write_synth_params(synth_cfg, synth_params_out);
      std::cout << "generated " << corpus.size() << " samples -> " << synth_out << "\n";
    }
  } catch (const emtl::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
