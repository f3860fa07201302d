// ectc/cli.hpp

// Copyright 2026  ECTC Toolkit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ectc/checks.hpp"
#include "ectc/data_io.hpp"
#include "ectc/metrics.hpp"
#include "ectc/model.hpp"
#include "ectc/synth.hpp"

namespace ectc::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInfeasibleSupervision = 3;
inline constexpr int kExitNumeric = 4;
inline constexpr int kExitVocabMismatch = 5;

namespace detail {

inline std::string fmt(double value, const char* format = "%.4f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, value);
  return buf;
}

inline constexpr std::uint64_t kAnnotSeedSalt = 0x5eedA110cULL;

// Replaces stored annotations with anchors derived from ground-truth labels,
// in corpus order; align re-runs this to reproduce the training-time anchors.
inline void derive_annotations(std::vector<model::TrainingExample>& examples,
                               const std::string& annot_spec, std::uint64_t seed) {
  const synth::AnnotationSpec spec = synth::parse_annotation_spec(annot_spec);
  if (spec.plan == synth::AnnotationSpec::Plan::kNone) return;
  Rng rng(seed ^ kAnnotSeedSalt);
  for (model::TrainingExample& ex : examples) {
    if (ex.frame_labels.empty()) {
      throw InvalidInputError("record '" + ex.id +
                              "' has no frame labels to derive annotations from");
    }
    ex.anchors = synth::sample_annotations(ex.frame_labels, spec, rng);
  }
}

struct DataPaths {
  std::filesystem::path vocab;
  std::filesystem::path corpus;
};

inline DataPaths resolve_data(const std::string& data_dir, const std::string& split) {
  const std::filesystem::path dir(data_dir);
  DataPaths paths{dir / "vocab.txt", dir / (split + ".jsonl")};
  if (!std::filesystem::exists(paths.vocab)) {
    throw ParseError("no vocabulary file at " + paths.vocab.string());
  }
  if (!std::filesystem::exists(paths.corpus)) {
    throw ParseError("no corpus file at " + paths.corpus.string());
  }
  return paths;
}

struct VideoScores {
  std::string id;
  double frame_acc = 0.0;
  double unit_acc = 0.0;
  double jaccard = 0.0;
};

inline void print_probe(const checks::ProbeResult& probe) {
  std::cout << "check=" << probe.name << " trials=" << probe.trials
            << " max_err=" << fmt(probe.max_err, "%.3e")
            << " threshold=" << fmt(probe.threshold, "%.0e")
            << " status=" << (probe.pass ? "PASS" : "FAIL") << "\n";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

struct SynthOptions {
  std::string out_dir;
  std::string spec_file;
  std::string annot = "none";
  synth::SyntheticSpec spec;
  int num_test = 0;  // 0: ceil(num_videos / 4)
};

inline int run_synth(const SynthOptions& opt_in) {
  SynthOptions opt = opt_in;
  opt.spec.annot = synth::parse_annotation_spec(opt.annot);
  opt.spec.validate();
  const int num_test = opt.num_test > 0 ? opt.num_test : (opt.spec.num_videos + 3) / 4;

  std::filesystem::create_directories(opt.out_dir);
  const LabelVocab vocab = synth::make_vocab(opt.spec.num_actions);
  io::write_vocab(vocab, (std::filesystem::path(opt.out_dir) / "vocab.txt").string());

  synth::SyntheticSpec test_spec = opt.spec;
  test_spec.num_videos = num_test;
  const auto train = synth::generate_corpus(opt.spec, "train", 0);
  const auto test = synth::generate_corpus(test_spec, "test", 1);
  io::write_corpus(train, (std::filesystem::path(opt.out_dir) / "train.jsonl").string());
  io::write_corpus(test, (std::filesystem::path(opt.out_dir) / "test.jsonl").string());

  for (const auto& [name, corpus] : {std::pair{std::string("train"), &train},
                                     std::pair{std::string("test"), &test}}) {
    long frames = 0;
    for (const auto& record : *corpus) frames += record.features.rows();
    std::cout << "split=" << name << " records=" << corpus->size() << " frames=" << frames
              << " mean_frames=" << detail::fmt(static_cast<double>(frames) / corpus->size())
              << " within_segment_cosine="
              << detail::fmt(synth::mean_within_segment_cosine(*corpus)) << "\n";
  }
  return kExitSuccess;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainOptions {
  std::string data_dir;
  std::string out_path;
  std::string annot = "none";
  model::TrainConfig config;
};

inline int run_train(const TrainOptions& opt) {
  opt.config.validate();
  const auto paths = detail::resolve_data(opt.data_dir, "train");
  const LabelVocab vocab = io::read_vocab(paths.vocab.string());
  const auto corpus = io::read_corpus(paths.corpus.string(), vocab);
  auto examples = io::to_examples(corpus, vocab);
  detail::derive_annotations(examples, opt.annot, opt.config.seed);

  const auto result = model::train(std::move(examples), opt.config, vocab.size(),
                                   [](const model::EpochLog& log) {
                                     std::cout << "epoch=" << log.epoch
                                               << " mean_loss=" << detail::fmt(log.mean_loss, "%.6f");
                                     if (log.frame_acc >= 0.0) {
                                       std::cout << " train_frame_acc="
                                                 << detail::fmt(log.frame_acc);
                                     }
                                     std::cout << "\n";
                                   });

  io::Checkpoint ckpt;
  ckpt.vocab = vocab;
  ckpt.config = opt.config;
  ckpt.annot_spec = opt.annot == "none" ? "" : opt.annot;
  ckpt.params = result.params;
  io::save_checkpoint(ckpt, opt.out_path);
  std::cout << "checkpoint=" << opt.out_path << " records=" << corpus.size() << "\n";
  return kExitSuccess;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalOptions {
  std::string data_dir;
  std::string checkpoint;
  std::string report_path;
  std::string split = "test";
};

inline int run_eval(const EvalOptions& opt) {
  const io::Checkpoint ckpt = io::load_checkpoint(opt.checkpoint);
  const auto paths = detail::resolve_data(opt.data_dir, opt.split);
  const LabelVocab vocab = io::read_vocab(paths.vocab.string());
  io::require_same_vocab(ckpt.vocab, vocab);
  const auto corpus = io::read_corpus(paths.corpus.string(), vocab);
  const auto examples = io::to_examples(corpus, vocab, false);

  std::vector<detail::VideoScores> rows;
  for (const auto& ex : examples) {
    if (ex.frame_labels.empty()) {
      throw InvalidInputError("record '" + ex.id + "' has no ground-truth labels to evaluate");
    }
    detail::VideoScores row;
    row.id = ex.id;
    const Path pred = model::predict_frames(ckpt.params, ex.features);
    row.frame_acc = metrics::frame_accuracy(pred, ex.frame_labels);
    row.unit_acc =
        metrics::unit_accuracy(lattice::collapse(pred), lattice::collapse(ex.frame_labels));
    row.jaccard = metrics::jaccard(pred, metrics::to_segments(ex.frame_labels));
    rows.push_back(row);
    std::cout << "video=" << row.id << " frame_acc=" << detail::fmt(row.frame_acc)
              << " unit_acc=" << detail::fmt(row.unit_acc)
              << " jaccard=" << detail::fmt(row.jaccard) << "\n";
  }
  double fa = 0.0, ua = 0.0, jc = 0.0;
  for (const auto& row : rows) {
    fa += row.frame_acc;
    ua += row.unit_acc;
    jc += row.jaccard;
  }
  const double n = static_cast<double>(rows.size());
  std::cout << "aggregate videos=" << rows.size() << " frame_acc=" << detail::fmt(fa / n)
            << " unit_acc=" << detail::fmt(ua / n) << " jaccard=" << detail::fmt(jc / n)
            << "\n";

  if (!opt.report_path.empty()) {
    std::ofstream out(opt.report_path);
    if (!out) throw ParseError("cannot open report file for writing: " + opt.report_path);
    for (const auto& row : rows) {
      io::json j;
      j["id"] = row.id;
      j["frame_accuracy"] = row.frame_acc;
      j["unit_accuracy"] = row.unit_acc;
      j["jaccard"] = row.jaccard;
      out << j.dump() << "\n";
    }
    io::json agg;
    agg["id"] = "__aggregate__";
    agg["frame_accuracy"] = fa / n;
    agg["unit_accuracy"] = ua / n;
    agg["jaccard"] = jc / n;
    out << agg.dump() << "\n";
  }
  return kExitSuccess;
}

// ---------------------------------------------------------------------------
// align
// ---------------------------------------------------------------------------

struct AlignOptions {
  std::string data_dir;
  std::string checkpoint;
  std::string out_path;
};

// Posterior-target alignment of the training set: per video, the argmax of
// gamma under the checkpoint's supervision mode and similarity settings.
inline int run_align(const AlignOptions& opt) {
  const io::Checkpoint ckpt = io::load_checkpoint(opt.checkpoint);
  const auto paths = detail::resolve_data(opt.data_dir, "train");
  const LabelVocab vocab = io::read_vocab(paths.vocab.string());
  io::require_same_vocab(ckpt.vocab, vocab);
  const auto corpus = io::read_corpus(paths.corpus.string(), vocab);
  auto examples = io::to_examples(corpus, vocab);
  if (!ckpt.annot_spec.empty()) {
    detail::derive_annotations(examples, ckpt.annot_spec, ckpt.config.seed);
  }

  std::ofstream out;
  if (!opt.out_path.empty()) {
    out.open(opt.out_path);
    if (!out) throw ParseError("cannot open alignment file for writing: " + opt.out_path);
  }

  double fa = 0.0, jc = 0.0;
  int labeled = 0;
  for (auto& ex : examples) {
    const SimilarityTrack sim = similarity::build_track(
        ex.features, ckpt.config.similarity, ckpt.config.theta, ckpt.config.cluster_len,
        ckpt.config.cluster_iters);

    SparseAnnotations anchors;
    if (ckpt.config.mode == model::SupervisionMode::kSemi) {
      anchors = ex.anchors;
    } else if (ckpt.config.mode == model::SupervisionMode::kFull) {
      if (ex.frame_labels.empty()) {
        throw InvalidInputError("record '" + ex.id + "' has no labels for full supervision");
      }
      for (int t = 0; t < static_cast<int>(ex.frame_labels.size()); ++t) {
        anchors.anchors.emplace_back(t, ex.frame_labels[static_cast<std::size_t>(t)]);
      }
    }

    MatrixXd gamma;
    try {
      const auto cache = model::net_forward(ckpt.params, ex.features);
      const Lattice lat = lattice::forward_backward(cache.z, ex.ordering, sim,
                                                    anchors.empty() ? nullptr : &anchors);
      gamma = lattice::posterior_target(lat, cache.z, ex.ordering);
    } catch (const InfeasibleError& e) {
      throw InfeasibleSupervisionError("record '" + ex.id + "': " + e.what());
    }

    const int T = static_cast<int>(gamma.rows());
    Path alignment(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
      int best = 0;
      for (int k = 1; k < vocab.size(); ++k) {
        if (gamma(t, k) > gamma(t, best)) best = k;
      }
      alignment[static_cast<std::size_t>(t)] = best;
    }

    io::json j;
    j["id"] = ex.id;
    io::json names = io::json::array();
    for (int label : alignment) names.push_back(vocab.name_of(label));
    j["alignment"] = std::move(names);
    if (!ex.frame_labels.empty()) {
      const double frame_acc = metrics::frame_accuracy(alignment, ex.frame_labels);
      const double jacc = metrics::jaccard(alignment, metrics::to_segments(ex.frame_labels));
      j["frame_accuracy"] = frame_acc;
      j["jaccard"] = jacc;
      fa += frame_acc;
      jc += jacc;
      ++labeled;
      std::cout << "video=" << ex.id << " align_frame_acc=" << detail::fmt(frame_acc)
                << " align_jaccard=" << detail::fmt(jacc) << "\n";
    }
    if (out.is_open()) out << j.dump() << "\n";
  }
  if (labeled > 0) {
    std::cout << "aggregate videos=" << labeled
              << " align_frame_acc=" << detail::fmt(fa / labeled)
              << " align_jaccard=" << detail::fmt(jc / labeled) << "\n";
  }
  return kExitSuccess;
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

struct CheckOptions {
  int trials = 60;
  std::string sizes = "4,10,4";  // max actions, frames, labels
  std::uint64_t seed = 1;
  bool flip_gradient_sign = false;  // harness-sanity hook
};

inline int run_check(const CheckOptions& opt) {
  if (opt.trials == 0) {
    std::cout << "check=all trials=0 status=PASS\n";
    return kExitSuccess;
  }
  int max_actions = 4, max_frames = 10, max_labels = 4;
  if (std::sscanf(opt.sizes.c_str(), "%d,%d,%d", &max_actions, &max_frames, &max_labels) != 3 ||
      max_actions < 2 || max_frames < 2 || max_labels < 1) {
    throw InvalidInputError("--sizes must be 'A,T,S' with A>=2, T>=2, S>=1");
  }

  std::vector<checks::ProbeResult> probes;
  probes.push_back(checks::markov_normalization(opt.trials, opt.seed,
                                                std::min(3, max_actions),
                                                std::min(8, max_frames)));
  probes.push_back(checks::oracle_equivalence(opt.trials, opt.seed + 1, max_actions, max_frames,
                                              max_labels));
  probes.push_back(checks::ctc_reduction(opt.trials, opt.seed + 2, std::min(3, max_actions),
                                         std::min(8, max_frames), std::min(3, max_labels)));
  probes.push_back(checks::fd_gradient_ctc_limit(std::min(opt.trials, 10), opt.seed + 3,
                                                 std::min(8, max_frames), 1e-5,
                                                 opt.flip_gradient_sign));
  probes.push_back(checks::fb_identity_ctc_limit(opt.trials, opt.seed + 4,
                                                 std::min(3, max_actions),
                                                 std::min(8, max_frames),
                                                 std::min(3, max_labels)));
  probes.push_back(checks::semi_supervision_pruning(opt.seed + 5));

  bool all_pass = true;
  for (const auto& probe : probes) {
    detail::print_probe(probe);
    all_pass = all_pass && probe.pass;
  }
  std::cout << "measure=fb_identity_general_deviation value="
            << detail::fmt(checks::fb_identity_general_deviation(std::min(opt.trials, 20),
                                                                 opt.seed + 6),
                           "%.3e")
            << " (informational)\n";
  std::cout << "measure=fd_gradient_general_deviation value="
            << detail::fmt(checks::fd_gradient_general_deviation(std::min(opt.trials, 5),
                                                                 opt.seed + 7),
                           "%.3e")
            << " (informational)\n";
  std::cout << "check=all status=" << (all_pass ? "PASS" : "FAIL") << "\n";
  return all_pass ? kExitSuccess : kExitCheckFailure;
}

// ---------------------------------------------------------------------------
// Entry point.
// ---------------------------------------------------------------------------

inline int run(const std::vector<std::string>& args) {
  CLI::App app{"Weakly supervised sequence labeling with a similarity-reweighted "
               "alignment lattice"};
  app.require_subcommand(1);

  SynthOptions synth_opt;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth_cmd->add_option("--out", synth_opt.out_dir, "Output directory")->required();
  synth_cmd->add_option("--spec", synth_opt.spec_file, "JSON file with generator settings");
  synth_cmd->add_option("--actions", synth_opt.spec.num_actions, "Vocabulary size");
  synth_cmd->add_option("--dim", synth_opt.spec.feature_dim, "Feature dimension");
  synth_cmd->add_option("--scale", synth_opt.spec.prototype_scale, "Prototype scale");
  synth_cmd->add_option("--sigma", synth_opt.spec.noise_sigma, "Feature noise sigma");
  synth_cmd->add_option("--segments-min", synth_opt.spec.min_segments, "Min segments per video");
  synth_cmd->add_option("--segments-max", synth_opt.spec.max_segments, "Max segments per video");
  synth_cmd->add_option("--len-min", synth_opt.spec.min_segment_len, "Min segment length");
  synth_cmd->add_option("--len-max", synth_opt.spec.max_segment_len, "Max segment length");
  synth_cmd->add_option("--train", synth_opt.spec.num_videos, "Training videos");
  synth_cmd->add_option("--test", synth_opt.num_test, "Test videos (default train/4)");
  synth_cmd->add_option("--drift", synth_opt.spec.drift, "Within-segment drift");
  synth_cmd->add_option("--seed", synth_opt.spec.seed, "Generator seed");
  synth_cmd->add_option("--annot", synth_opt.annot,
                        "Stored anchors: none, per-segment-1, or a fraction");

  TrainOptions train_opt;
  std::string mode_name = "weak";
  std::string similarity_name = "none";
  auto* train_cmd = app.add_subcommand("train", "Train a model");
  train_cmd->add_option("--data", train_opt.data_dir, "Corpus directory")->required();
  train_cmd->add_option("--out", train_opt.out_path, "Checkpoint path")->required();
  train_cmd->add_option("--mode", mode_name, "weak|semi|uniform|full");
  train_cmd->add_option("--similarity", similarity_name, "none|kmeans|cosine|both");
  train_cmd->add_option("--theta", train_opt.config.theta, "Minimum-similarity floor");
  train_cmd->add_option("--hidden", train_opt.config.hidden, "Hidden units per direction");
  train_cmd->add_option("--lr", train_opt.config.learning_rate, "Learning rate");
  train_cmd->add_option("--weight-decay", train_opt.config.weight_decay, "L2 weight decay");
  train_cmd->add_option("--clip", train_opt.config.clip, "Elementwise gradient clip");
  train_cmd->add_option("--rms-decay", train_opt.config.rms_decay, "RMSProp decay");
  train_cmd->add_option("--rms-epsilon", train_opt.config.rms_epsilon, "RMSProp epsilon");
  train_cmd->add_option("--epochs", train_opt.config.epochs, "Training epochs");
  train_cmd->add_option("--seed", train_opt.config.seed, "Training seed");
  train_cmd->add_option("--cluster-len", train_opt.config.cluster_len,
                        "Mean cluster length for the kmeans similarity");
  train_cmd->add_option("--cluster-iters", train_opt.config.cluster_iters,
                        "Clustering iterations");
  train_cmd->add_option("--annot-fraction", train_opt.annot,
                        "Derive anchors from labels: per-segment-1 or a fraction");

  EvalOptions eval_opt;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval_cmd->add_option("--data", eval_opt.data_dir, "Corpus directory")->required();
  eval_cmd->add_option("--checkpoint", eval_opt.checkpoint, "Checkpoint path")->required();
  eval_cmd->add_option("--report", eval_opt.report_path, "Report file (JSON lines)");
  eval_cmd->add_option("--split", eval_opt.split, "Corpus split: test|train");

  AlignOptions align_opt;
  auto* align_cmd = app.add_subcommand("align", "Export training-set alignments");
  align_cmd->add_option("--data", align_opt.data_dir, "Corpus directory")->required();
  align_cmd->add_option("--checkpoint", align_opt.checkpoint, "Checkpoint path")->required();
  align_cmd->add_option("--out", align_opt.out_path, "Alignment file (JSON lines)");

  CheckOptions check_opt;
  auto* check_cmd = app.add_subcommand("check", "Self-check against the brute-force oracle");
  check_cmd->add_option("--trials", check_opt.trials, "Trials per probe");
  check_cmd->add_option("--sizes", check_opt.sizes, "Max instance sizes as 'A,T,S'");
  check_cmd->add_option("--seed", check_opt.seed, "Probe seed");
  check_cmd->add_flag("--flip-gradient-sign", check_opt.flip_gradient_sign,
                      "Negate the analytic gradient (harness sanity hook)")
      ->group("");  // hidden

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return kExitSuccess;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (synth_cmd->parsed()) {
      if (!synth_opt.spec_file.empty()) {
        std::ifstream in(synth_opt.spec_file);
        if (!in) throw ParseError("cannot open spec file: " + synth_opt.spec_file);
        io::json j;
        try {
          in >> j;
        } catch (const io::json::exception& e) {
          throw ParseError(std::string("spec file parse error: ") + e.what());
        }
        synth::SyntheticSpec file_spec;
        file_spec.num_actions = j.value("actions", file_spec.num_actions);
        file_spec.feature_dim = j.value("dim", file_spec.feature_dim);
        file_spec.prototype_scale = j.value("scale", file_spec.prototype_scale);
        file_spec.noise_sigma = j.value("sigma", file_spec.noise_sigma);
        file_spec.min_segments = j.value("segments_min", file_spec.min_segments);
        file_spec.max_segments = j.value("segments_max", file_spec.max_segments);
        file_spec.min_segment_len = j.value("len_min", file_spec.min_segment_len);
        file_spec.max_segment_len = j.value("len_max", file_spec.max_segment_len);
        file_spec.num_videos = j.value("train", file_spec.num_videos);
        file_spec.drift = j.value("drift", file_spec.drift);
        file_spec.seed = j.value("seed", file_spec.seed);
        // Inline flags override file values.
        for (const auto& [flag, apply] : std::vector<
                 std::pair<std::string, std::function<void(synth::SyntheticSpec&)>>>{
                 {"--actions", [&](auto& s) { s.num_actions = synth_opt.spec.num_actions; }},
                 {"--dim", [&](auto& s) { s.feature_dim = synth_opt.spec.feature_dim; }},
                 {"--scale", [&](auto& s) { s.prototype_scale = synth_opt.spec.prototype_scale; }},
                 {"--sigma", [&](auto& s) { s.noise_sigma = synth_opt.spec.noise_sigma; }},
                 {"--segments-min", [&](auto& s) { s.min_segments = synth_opt.spec.min_segments; }},
                 {"--segments-max", [&](auto& s) { s.max_segments = synth_opt.spec.max_segments; }},
                 {"--len-min", [&](auto& s) { s.min_segment_len = synth_opt.spec.min_segment_len; }},
                 {"--len-max", [&](auto& s) { s.max_segment_len = synth_opt.spec.max_segment_len; }},
                 {"--train", [&](auto& s) { s.num_videos = synth_opt.spec.num_videos; }},
                 {"--drift", [&](auto& s) { s.drift = synth_opt.spec.drift; }},
                 {"--seed", [&](auto& s) { s.seed = synth_opt.spec.seed; }}}) {
          if (synth_cmd->count(flag) > 0) apply(file_spec);
        }
        synth_opt.spec = file_spec;
      }
      return run_synth(synth_opt);
    }
    if (train_cmd->parsed()) {
      train_opt.config.mode = model::mode_from_string(mode_name);
      train_opt.config.similarity = similarity::mode_from_string(similarity_name);
      return run_train(train_opt);
    }
    if (eval_cmd->parsed()) {
      if (eval_opt.split != "test" && eval_opt.split != "train") {
        throw InvalidInputError("--split must be 'test' or 'train'");
      }
      return run_eval(eval_opt);
    }
    if (align_cmd->parsed()) return run_align(align_opt);
    if (check_cmd->parsed()) return run_check(check_opt);
  } catch (const InfeasibleSupervisionError& e) {
    std::cerr << "error: infeasible supervision: " << e.what() << "\n";
    return kExitInfeasibleSupervision;
  } catch (const InfeasibleError& e) {
    std::cerr << "error: infeasible: " << e.what() << "\n";
    return kExitInfeasibleSupervision;
  } catch (const NumericError& e) {
    std::cerr << "error: numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const VocabMismatchError& e) {
    std::cerr << "error: vocabulary mismatch: " << e.what() << "\n";
    return kExitVocabMismatch;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailure;
  }
  return kExitUsage;
}

}  // namespace ectc::cli
