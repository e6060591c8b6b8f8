// Copyright 2026 The rvvt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// rvvt command-line front end. Talks to the library only through rvvt.h.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rvvt/rvvt.h"

namespace {

struct Failure {
  rvvt_status status;
};

void check(rvvt_status s) {
  if (s != RVVT_OK) throw Failure{s};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
template <typename T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, Deleter<T, Free>>;

using Elf = Handle<rvvt_elf, rvvt_elf_free>;
using Tokens = Handle<rvvt_tokens, rvvt_tokens_free>;
using Corpus = Handle<rvvt_corpus, rvvt_corpus_free>;
using Vocab = Handle<rvvt_vocab, rvvt_vocab_free>;
using Dataset = Handle<rvvt_dataset, rvvt_dataset_free>;
using Trace = Handle<rvvt_trace, rvvt_trace_free>;
using Model = Handle<rvvt_model, rvvt_model_free>;
using Predictions = Handle<rvvt_predictions, rvvt_predictions_free>;
using String = Handle<char, rvvt_string_free>;

template <typename H, typename F, typename... Args>
H make(F f, Args... args) {
  typename H::pointer p = nullptr;
  check(f(args..., &p));
  return H(p);
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  f << text;
  if (!f) {
    std::cerr << "rvvt: cannot write " << out << "\n";
    throw Failure{RVVT_IO};
  }
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ','))
    if (!part.empty()) out.push_back(std::stoul(part));
  return out;
}

bool is_windowed_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::string header;
  std::getline(in, header);
  return header.rfind("window_start_row", 0) == 0;
}

Dataset open_dataset(const std::string& path, const rvvt_vocab* vocab = nullptr) {
  if (is_windowed_csv(path)) return make<Dataset>(rvvt_dataset_read_windowed, path.c_str());
  return make<Dataset>(rvvt_dataset_read_features, path.c_str(), vocab);
}

Vocab open_vocab(const std::string& path) {
  if (path.empty()) return nullptr;
  return make<Vocab>(rvvt_vocab_read, path.c_str());
}

struct MlpFlags {
  double lr = 0.05;
  std::size_t epochs = 200;
  std::size_t batch = 16;
  double l2 = 0.0;
  std::string hidden = "64,32";
  std::size_t freeze = 0;
  std::vector<std::size_t> hidden_sizes;

  void add(CLI::App* c, const std::string& prefix = "") {
    c->add_option("--" + prefix + "lr", lr, "Learning rate")->capture_default_str();
    c->add_option("--" + prefix + "epochs", epochs, "Training epochs")->capture_default_str();
    c->add_option("--" + prefix + "batch", batch, "Mini-batch size")->capture_default_str();
    c->add_option("--" + prefix + "l2", l2, "L2 penalty")->capture_default_str();
    c->add_option("--" + prefix + "hidden", hidden, "Hidden layer widths, comma separated")->capture_default_str();
  }

  rvvt_mlp_config config(std::uint64_t seed) {
    rvvt_mlp_config c;
    rvvt_mlp_config_init(&c);
    hidden_sizes = parse_sizes(hidden);
    c.learning_rate = lr;
    c.epochs = epochs;
    c.batch_size = batch;
    c.l2_penalty = l2;
    c.seed = seed;
    c.frozen_layers = freeze;
    c.hidden = hidden_sizes.data();
    c.hidden_count = hidden_sizes.size();
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RISC-V binary and counter-trace analysis toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rvvt_version()));

  std::uint64_t seed = 1;
  std::string out;
  auto common = [&](CLI::App* c, bool out_required = false) {
    c->add_option("--seed", seed, "Random seed")->capture_default_str();
    auto* o = c->add_option("--out", out, "Output path ('-' for stdout)");
    if (out_required) o->required();
  };

  std::string in, corpus_dir, vocab_path, vocab_out, features_path, model_path, kind, class_names;
  std::function<void()> run;

  // inspect-elf
  auto* c_inspect = app.add_subcommand("inspect-elf", "Print ELF header and section summary");
  c_inspect->add_option("--in", in, "ELF file")->required();
  common(c_inspect);
  c_inspect->callback([&] {
    run = [&] {
      auto elf = make<Elf>(rvvt_elf_load, in.c_str());
      auto text = make<String>(rvvt_elf_describe, elf.get());
      emit(out, text.get());
    };
  });

  // decode
  auto* c_decode = app.add_subcommand("decode", "Decode executable sections to an opcode token file");
  c_decode->add_option("--in", in, "ELF file")->required();
  common(c_decode, true);
  c_decode->callback([&] {
    run = [&] {
      auto elf = make<Elf>(rvvt_elf_load, in.c_str());
      auto tokens = make<Tokens>(rvvt_tokens_from_elf, elf.get());
      check(rvvt_tokens_write(tokens.get(), out.c_str()));
    };
  });

  // features
  std::size_t n = 2, max_vocab = 1000, min_df = 1;
  std::string selection = "frequency", norm = "relfreq";
  auto* c_features = app.add_subcommand("features", "Build an n-gram vocabulary and feature CSV from a corpus");
  c_features->add_option("--corpus", corpus_dir, "Corpus directory with labels.csv")->required();
  c_features->add_option("--n", n, "n-gram length")->capture_default_str();
  c_features->add_option("--max-vocab", max_vocab, "Vocabulary size cap (0 = unlimited)")->capture_default_str();
  c_features->add_option("--min-df", min_df, "Minimum document frequency")->capture_default_str();
  c_features->add_option("--select", selection, "frequency|info_gain")->capture_default_str();
  c_features->add_option("--norm", norm, "relfreq|tfidf|raw")->capture_default_str();
  c_features->add_option("--vocab", vocab_path, "Reuse an existing vocabulary instead of building one");
  c_features->add_option("--vocab-out", vocab_out, "Where to write the vocabulary");
  common(c_features, true);
  c_features->callback([&] {
    run = [&] {
      auto corpus = make<Corpus>(rvvt_corpus_read_dir, corpus_dir.c_str());
      Vocab vocab = open_vocab(vocab_path);
      if (!vocab) {
        rvvt_vocab_options o;
        rvvt_vocab_options_init(&o);
        o.n = n;
        o.max_size = max_vocab;
        o.min_doc_freq = min_df;
        o.selection = selection.c_str();
        vocab = make<Vocab>(rvvt_vocab_build, corpus.get(), &o);
      }
      if (!vocab_out.empty()) check(rvvt_vocab_write(vocab.get(), vocab_out.c_str()));
      auto data = make<Dataset>(rvvt_dataset_vectorize, corpus.get(), vocab.get(), norm.c_str());
      check(rvvt_dataset_write(data.get(), out.c_str()));
    };
  });

  // train-static
  MlpFlags mlp;
  double alpha = 1.0;
  std::string static_kind = "nb";
  auto* c_train = app.add_subcommand("train-static", "Train a naive Bayes or MLP classifier on a feature CSV");
  c_train->add_option("--features", features_path, "Feature CSV")->required();
  c_train->add_option("--vocab", vocab_path, "Vocabulary the features were built with");
  c_train->add_option("--model", static_kind, "nb|mlp")->capture_default_str();
  c_train->add_option("--alpha", alpha, "Naive Bayes smoothing")->capture_default_str();
  c_train->add_option("--class-names", class_names, "Class names, comma separated, in class-id order");
  mlp.add(c_train);
  common(c_train, true);
  c_train->callback([&] {
    run = [&] {
      Vocab vocab = open_vocab(vocab_path);
      auto data = open_dataset(features_path, vocab.get());
      if (!class_names.empty()) check(rvvt_dataset_set_class_names(data.get(), class_names.c_str()));
      Model model;
      if (static_kind == "nb") {
        model = make<Model>(rvvt_model_train_nb, data.get(), alpha);
      } else if (static_kind == "mlp") {
        const auto cfg = mlp.config(seed);
        model = make<Model>(rvvt_model_train_mlp, data.get(), &cfg);
      } else {
        std::cerr << "rvvt: --model must be nb or mlp\n";
        throw Failure{RVVT_INVALID_ARGUMENT};
      }
      check(rvvt_model_save(model.get(), out.c_str()));
    };
  });

  // fine-tune
  std::string base_path;
  auto* c_tune = app.add_subcommand("fine-tune", "Retrain the unfrozen layers of an MLP on new data");
  c_tune->add_option("--base", base_path, "Base MLP model")->required();
  c_tune->add_option("--features", features_path, "Feature CSV")->required();
  c_tune->add_option("--vocab", vocab_path, "Vocabulary the features were built with");
  c_tune->add_option("--freeze", mlp.freeze, "Weight layers to freeze, from the input side")->capture_default_str();
  mlp.add(c_tune);
  common(c_tune, true);
  c_tune->callback([&] {
    run = [&] {
      Vocab vocab = open_vocab(vocab_path);
      auto base = make<Model>(rvvt_model_load, base_path.c_str());
      auto data = open_dataset(features_path, vocab.get());
      const auto cfg = mlp.config(seed);
      auto model = make<Model>(rvvt_model_fine_tune, base.get(), data.get(), &cfg);
      check(rvvt_model_save(model.get(), out.c_str()));
    };
  });

  // classify
  auto* c_classify = app.add_subcommand("classify", "Apply a static model; writes id,predicted,score");
  c_classify->add_option("--model", model_path, "Model file")->required();
  auto* o_feat = c_classify->add_option("--features", features_path, "Feature CSV");
  auto* o_corp = c_classify->add_option("--corpus", corpus_dir, "Corpus directory (needs --vocab)");
  o_feat->excludes(o_corp);
  c_classify->add_option("--vocab", vocab_path, "Vocabulary");
  c_classify->add_option("--norm", norm, "relfreq|tfidf|raw (with --corpus)")->capture_default_str();
  common(c_classify, true);
  c_classify->callback([&] {
    run = [&] {
      auto model = make<Model>(rvvt_model_load, model_path.c_str());
      Vocab vocab = open_vocab(vocab_path);
      Dataset data;
      if (!corpus_dir.empty()) {
        if (!vocab) {
          std::cerr << "rvvt: --corpus needs --vocab\n";
          throw Failure{RVVT_INVALID_ARGUMENT};
        }
        auto corpus = make<Corpus>(rvvt_corpus_read_dir, corpus_dir.c_str());
        data = make<Dataset>(rvvt_dataset_vectorize, corpus.get(), vocab.get(), norm.c_str());
      } else if (!features_path.empty()) {
        data = open_dataset(features_path, vocab.get());
      } else {
        std::cerr << "rvvt: give --features or --corpus\n";
        throw Failure{RVVT_INVALID_ARGUMENT};
      }
      auto preds = make<Predictions>(rvvt_model_predict, model.get(), data.get());
      check(rvvt_predictions_write(preds.get(), out.c_str()));
    };
  });

  // trace-info
  auto* c_tinfo = app.add_subcommand("trace-info", "Summarize a counter trace CSV");
  c_tinfo->add_option("--in", in, "Trace CSV")->required();
  common(c_tinfo);
  c_tinfo->callback([&] {
    run = [&] {
      auto trace = make<Trace>(rvvt_trace_load, in.c_str());
      auto text = make<String>(rvvt_trace_describe, trace.get());
      emit(out, text.get());
    };
  });

  // windowize
  rvvt_window_options wopt;
  rvvt_window_options_init(&wopt);
  std::string stats = "mean,std", events, ratios, policy = "zero", spans_path;
  auto* c_win = app.add_subcommand("windowize", "Turn a trace into windowed statistics");
  c_win->add_option("--in", in, "Trace CSV")->required();
  c_win->add_option("--window", wopt.window_len, "Window length in rows")->capture_default_str();
  c_win->add_option("--stride", wopt.stride, "Stride in rows")->capture_default_str();
  c_win->add_option("--stats", stats, "Subset of mean,std,min,max,slope")->capture_default_str();
  c_win->add_option("--events", events, "Events to window, comma separated (default: all unless --ratios)");
  c_win->add_option("--ratios", ratios, "Derived ratios such as L3_MISS/L1D_MISS, comma separated");
  c_win->add_option("--policy", policy, "Zero-denominator policy: zero|epsilon")->capture_default_str();
  c_win->add_option("--spans", spans_path, "Anomaly spans CSV for multi-class labels");
  c_win->add_option("--min-overlap", wopt.min_overlap_rows, "Rows of a span needed to label a window")
      ->capture_default_str();
  common(c_win, true);
  c_win->callback([&] {
    run = [&] {
      auto trace = make<Trace>(rvvt_trace_load, in.c_str());
      if (!spans_path.empty()) check(rvvt_trace_read_spans(trace.get(), spans_path.c_str()));
      wopt.stats = stats.c_str();
      wopt.events = events.c_str();
      wopt.ratios = ratios.c_str();
      wopt.epsilon_policy = policy.c_str();
      auto data = make<Dataset>(rvvt_trace_windowize, trace.get(), &wopt);
      check(rvvt_dataset_write(data.get(), out.c_str()));
    };
  });

  // select-features
  std::string method = "fisher", include, selected_out;
  std::size_t bins = 10, budget = 4;
  auto* c_sel = app.add_subcommand("select-features", "Rank features and keep a counter budget, or fit PCA");
  c_sel->add_option("--in", in, "Windowed or feature CSV")->required();
  c_sel->add_option("--method", method, "fisher|pearson|mi|pca")->capture_default_str();
  c_sel->add_option("--bins", bins, "Bins for mutual information")->capture_default_str();
  c_sel->add_option("--budget", budget, "Features to keep (components for pca)")->capture_default_str();
  c_sel->add_option("--include", include, "Features always kept, comma separated");
  c_sel->add_option("--selected-out", selected_out, "Write the reduced dataset here");
  common(c_sel, true);
  c_sel->callback([&] {
    run = [&] {
      auto data = open_dataset(in);
      if (method == "pca") {
        auto model = make<Model>(rvvt_model_train_pca, data.get(), budget);
        check(rvvt_model_save(model.get(), out.c_str()));
        if (!selected_out.empty()) {
          auto reduced = make<Dataset>(rvvt_model_transform, model.get(), data.get());
          check(rvvt_dataset_write(reduced.get(), selected_out.c_str()));
        }
        return;
      }
      char* scores = nullptr;
      char* selected = nullptr;
      check(rvvt_select_features(data.get(), method.c_str(), bins, budget, include.c_str(), &scores, &selected));
      String s_scores(scores), s_selected(selected);
      emit(out, scores);
      std::cerr << "selected: " << selected << "\n";
      if (!selected_out.empty()) {
        auto reduced = make<Dataset>(rvvt_dataset_select_columns, data.get(), selected);
        check(rvvt_dataset_write(reduced.get(), selected_out.c_str()));
      }
    };
  });

  // train-detector
  rvvt_detector_config dcfg;
  rvvt_detector_config_init(&dcfg);
  std::string det_kind = "gauss", base_learner = "stump";
  MlpFlags stage2;
  stage2.epochs = 300;
  stage2.hidden = "16";
  bool two_stage_knn = false;
  auto* c_tdet = app.add_subcommand("train-detector", "Train an anomaly detector on windowed data");
  c_tdet->add_option("--in", in, "Windowed CSV")->required();
  c_tdet->add_option("--kind", det_kind, "gauss|knn|adaboost|bagging|two-stage")->capture_default_str();
  c_tdet->add_option("--percentile", dcfg.percentile, "Threshold percentile of training scores")
      ->capture_default_str();
  c_tdet->add_option("--k", dcfg.k, "Neighbours for knn")->capture_default_str();
  c_tdet->add_option("--rounds", dcfg.rounds, "Boosting rounds")->capture_default_str();
  c_tdet->add_option("--bags", dcfg.bags, "Bagging ensemble size")->capture_default_str();
  c_tdet->add_option("--base", base_learner, "Bagging base learner: stump|adaboost")->capture_default_str();
  c_tdet->add_flag("--stage1-knn", two_stage_knn, "Use kNN instead of the Gaussian for stage 1");
  c_tdet->add_option("--class-names", class_names, "Class names for the window labels, comma separated");
  stage2.add(c_tdet, "stage2-");
  common(c_tdet, true);
  c_tdet->callback([&] {
    run = [&] {
      auto data = open_dataset(in);
      if (!class_names.empty()) check(rvvt_dataset_set_class_names(data.get(), class_names.c_str()));
      dcfg.kind = det_kind.c_str();
      dcfg.base = base_learner.c_str();
      dcfg.seed = seed;
      dcfg.two_stage_knn = two_stage_knn ? 1 : 0;
      dcfg.stage2 = stage2.config(seed);
      auto model = make<Model>(rvvt_model_train_detector, data.get(), &dcfg);
      check(rvvt_model_save(model.get(), out.c_str()));
    };
  });

  // detect
  auto* c_detect = app.add_subcommand("detect", "Score windows; writes window_start_row,score,verdict");
  c_detect->add_option("--model", model_path, "Detector model")->required();
  c_detect->add_option("--in", in, "Windowed CSV")->required();
  common(c_detect, true);
  c_detect->callback([&] {
    run = [&] {
      auto model = make<Model>(rvvt_model_load, model_path.c_str());
      auto data = open_dataset(in);
      auto preds = make<Predictions>(rvvt_model_predict, model.get(), data.get());
      check(rvvt_predictions_write(preds.get(), out.c_str()));
    };
  });

  // synth-trace
  rvvt_synth_trace_options topt;
  rvvt_synth_trace_options_init(&topt);
  std::string anomaly_kind = "ratio_shift", spans_out, clean_out;
  auto* c_strace = app.add_subcommand("synth-trace", "Generate a two-phase trace with injected anomalies");
  c_strace->add_option("--rows", topt.rows, "Rows")->capture_default_str();
  c_strace->add_option("--period-ns", topt.period_ns, "Sampling period in ns")->capture_default_str();
  c_strace->add_option("--anomalies", topt.anomalies, "Number of anomalous spans")->capture_default_str();
  c_strace->add_option("--kind", anomaly_kind, "ratio_shift|spike|phase_swap")->capture_default_str();
  c_strace->add_option("--magnitude", topt.magnitude, "Multiplier or sigma units")->capture_default_str();
  c_strace->add_option("--span-len", topt.span_len, "Rows per span")->capture_default_str();
  c_strace->add_option("--spans-out", spans_out, "Write the anomaly spans CSV here");
  c_strace->add_option("--clean-out", clean_out, "Write the trace before injection here");
  common(c_strace, true);
  c_strace->callback([&] {
    run = [&] {
      topt.kind = anomaly_kind.c_str();
      topt.seed = seed;
      rvvt_trace* clean = nullptr;
      rvvt_trace* injected = nullptr;
      check(rvvt_synth_trace(&topt, clean_out.empty() ? nullptr : &clean, &injected));
      Trace t_clean(clean), t_injected(injected);
      check(rvvt_trace_write(injected, out.c_str()));
      if (!clean_out.empty()) check(rvvt_trace_write(clean, clean_out.c_str()));
      if (!spans_out.empty()) check(rvvt_trace_write_spans(injected, spans_out.c_str()));
    };
  });

  // synth-corpus
  std::string preset = "disjoint";
  std::size_t count = 200, min_len = 200, max_len = 400;
  auto* c_scorpus = app.add_subcommand("synth-corpus", "Generate a labelled Markov opcode corpus");
  c_scorpus->add_option("--preset", preset, "disjoint|identical|shifted")->capture_default_str();
  c_scorpus->add_option("--count", count, "Sequences")->capture_default_str();
  c_scorpus->add_option("--min-len", min_len, "Minimum length")->capture_default_str();
  c_scorpus->add_option("--max-len", max_len, "Maximum length")->capture_default_str();
  common(c_scorpus, true);
  c_scorpus->callback([&] {
    run = [&] {
      auto corpus = make<Corpus>(rvvt_corpus_synth, preset.c_str(), count, min_len, max_len, seed);
      check(rvvt_corpus_write_dir(corpus.get(), out.c_str()));
    };
  });

  // eval
  std::string pred_path, truth_path, positive;
  auto* c_eval = app.add_subcommand("eval", "Compare predictions with ground truth; writes a JSON report");
  c_eval->add_option("--pred", pred_path, "Prediction or detection CSV")->required();
  c_eval->add_option("--truth", truth_path, "labels.csv, labelled windowed CSV or feature CSV")->required();
  c_eval->add_option("--positive", positive, "Positive class name");
  c_eval->add_option("--class-names", class_names, "Class names in class-id order, comma separated");
  common(c_eval);
  c_eval->callback([&] {
    run = [&] {
      auto preds = make<Predictions>(rvvt_predictions_read, pred_path.c_str());
      char* report = nullptr;
      check(rvvt_evaluate(preds.get(), truth_path.c_str(), positive.empty() ? nullptr : positive.c_str(),
                          class_names.empty() ? nullptr : class_names.c_str(), &report));
      String s(report);
      emit(out, report);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;
  }

  try {
    run();
  } catch (const Failure& f) {
    if (f.status != RVVT_OK && *rvvt_last_error() != '\0') std::cerr << "rvvt: " << rvvt_last_error() << "\n";
    return rvvt_status_is_input_error(f.status) ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "rvvt: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
