// Copyright (c) 2026 The prosodiff Authors
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

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "prosodiff/config.h"
#include "prosodiff/corpus.h"
#include "prosodiff/eval.h"
#include "prosodiff/experiments.h"
#include "prosodiff/format.h"
#include "prosodiff/model.h"
#include "prosodiff/schedule.h"
#include "prosodiff/svg.h"
#include "prosodiff/trainer.h"

namespace fs = std::filesystem;
using prosodiff::RunConfig;

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
};

struct GuidanceFlags {
  std::optional<double> eta;
  std::optional<double> gamma;
  std::optional<double> tau;
};

void AddCommon(CLI::App* cmd, CommonFlags* f, bool out_required) {
  cmd->add_option("--config", f->config_path, "Run configuration JSON");
  cmd->add_option("--seed", f->seed, "Seed overriding the config");
  auto* out = cmd->add_option("--out", f->out, "Output directory");
  if (out_required) out->required();
}

void AddGuidance(CLI::App* cmd, GuidanceFlags* f) {
  cmd->add_option("--eta", f->eta, "Guiding scale");
  cmd->add_option("--gamma", f->gamma, "Correction scale in [0, 1]");
  cmd->add_option("--tau", f->tau, "Terminal temperature");
}

RunConfig ResolveConfig(const std::string& path, const CommonFlags& common) {
  RunConfig config = path.empty() ? RunConfig{} : prosodiff::LoadRunConfig(path);
  if (common.seed) config.seed = *common.seed;
  if (!common.out.empty()) config.output_dir = common.out;
  return config;
}

void ApplyGuidance(const GuidanceFlags& f, RunConfig* config) {
  if (f.eta) config->guidance.eta = *f.eta;
  if (f.gamma) config->guidance.gamma = *f.gamma;
  if (f.tau) config->guidance.tau = *f.tau;
}

void WriteResolved(const RunConfig& config, const std::string& dir) {
  config.Validate();
  fs::create_directories(dir);
  prosodiff::SaveRunConfig(config, (fs::path(dir) / "config.json").string());
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw std::invalid_argument("empty list item in '" + text + "'");
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::vector<double> ParseDoubles(const std::string& text) {
  std::vector<double> out;
  for (const std::string& s : SplitList(text)) out.push_back(prosodiff::ParseDouble(s));
  return out;
}

std::vector<int> ParseIds(const std::string& text) {
  std::vector<int> out;
  for (const std::string& s : SplitList(text)) {
    const double v = prosodiff::ParseDouble(s);
    if (v != static_cast<int>(v)) throw std::invalid_argument("not an integer: " + s);
    out.push_back(static_cast<int>(v));
  }
  return out;
}

// Run directory layout written by `train`.
struct RunPaths {
  std::string config;
  std::string checkpoint;
};

RunPaths LocateRun(const std::string& run, const std::string& checkpoint,
                   const std::string& config) {
  RunPaths p;
  p.config = !config.empty() ? config : (fs::path(run) / "config.json").string();
  p.checkpoint = !checkpoint.empty() ? checkpoint : (fs::path(run) / "model.bin").string();
  if (run.empty() && (checkpoint.empty() || config.empty())) {
    throw std::invalid_argument("give --run DIR, or both --checkpoint and --config");
  }
  return p;
}

int CmdGenData(const CommonFlags& common) {
  RunConfig config = ResolveConfig(common.config_path, common);
  config.Validate();
  const prosodiff::Corpus corpus = prosodiff::GenerateCorpus(config.corpus, config.seed);
  prosodiff::SaveCorpus(corpus, common.out);
  WriteResolved(config, common.out);
  std::cout << "wrote " << corpus.utterances.size() << " utterances ("
            << corpus.train.size() << " train, " << corpus.validation.size()
            << " validation) to " << common.out << "\n";
  return 0;
}

struct TrainFlags {
  std::string corpus;
  std::optional<int> steps;
  std::optional<int> batch_size;
  std::optional<double> learning_rate;
  std::string resume;
  bool no_text = false;
  bool style_bypass = false;
};

int CmdTrain(const CommonFlags& common, const TrainFlags& f) {
  RunConfig config = ResolveConfig(common.config_path, common);
  if (f.steps) config.train.steps = *f.steps;
  if (f.batch_size) config.train.batch_size = *f.batch_size;
  if (f.learning_rate) config.train.adam.learning_rate = *f.learning_rate;
  if (f.no_text) config.denoiser.use_text = false;
  if (f.style_bypass) config.denoiser.style_in_condition = false;
  WriteResolved(config, common.out);
  const prosodiff::Corpus corpus = prosodiff::LoadCorpus(f.corpus);
  prosodiff::RequireMatchingCorpus(config, corpus);
  prosodiff::ProsodyModel model =
      f.resume.empty() ? prosodiff::ProsodyModel(config, corpus.stats)
                       : prosodiff::ProsodyModel::Load(f.resume, config);
  const int first = model.step() + 1;
  prosodiff::TrainOptions options;
  options.output_dir = common.out;
  const int report = std::max(1, config.train.steps / 20);
  options.on_step = [&](const prosodiff::LossRow& r) {
    if (r.step % report == 0 || r.step == config.train.steps) {
      std::printf("step %d/%d loss_c %.5f loss_nc %.5f\n", r.step,
                  config.train.steps, r.loss_c, r.loss_nc);
      std::fflush(stdout);
    }
  };
  prosodiff::Train(model, corpus, options);
  std::cout << "trained steps " << first << ".." << model.step() << "; wrote "
            << (fs::path(common.out) / "model.bin").string() << "\n";
  return 0;
}

struct SampleFlags {
  std::string run;
  std::string checkpoint;
  std::string mode = "diversified";
  std::string text;
  std::string text_from;
  std::string reference;
  std::string corpus;
  std::optional<int> token;
  std::string weights;
  bool raw_weights = false;
  bool unconditional = false;
  bool zero_text = false;
  int count = 1;
  double scale_pitch = 1.0;
  double scale_energy = 1.0;
  double scale_duration = 1.0;
  bool diagnostics = false;
};

int CmdSample(const CommonFlags& common, const GuidanceFlags& g, const SampleFlags& f) {
  const RunPaths paths = LocateRun(f.run, f.checkpoint, common.config_path);
  RunConfig config = ResolveConfig(paths.config, common);
  ApplyGuidance(g, &config);
  if (f.count < 1) throw std::invalid_argument("--count must be >= 1");
  const prosodiff::ProsodyModel model = prosodiff::ProsodyModel::Load(paths.checkpoint, config);

  std::vector<int> ids;
  if (!f.text.empty()) {
    ids = ParseIds(f.text);
  } else if (!f.text_from.empty()) {
    ids = prosodiff::UtteranceFromCsv(prosodiff::ReadFile(f.text_from)).first;
  }

  std::optional<prosodiff::StyleCondition> style;
  std::vector<double> style_weights;
  std::string reference_used = f.reference;
  if (f.mode == "transfer") {
    if (f.reference.empty()) throw std::invalid_argument("transfer mode requires --reference");
    if (ids.empty()) throw std::invalid_argument("transfer mode requires --text or --text-from");
  } else if (f.mode == "control") {
    if (!f.token && f.weights.empty()) {
      throw std::invalid_argument("control mode requires --token or --weights");
    }
    if (ids.empty()) throw std::invalid_argument("control mode requires --text or --text-from");
    const int tokens = config.style.token_count;
    if (f.token) {
      style = model.bank().ConditionFromWeights(prosodiff::TokenWeights::OneHot(tokens, *f.token));
    } else if (f.raw_weights) {
      style = model.bank().ConditionFromRawWeights(ParseDoubles(f.weights));
    } else {
      style = model.bank().ConditionFromWeights(
          prosodiff::TokenWeights{ParseDoubles(f.weights)});
    }
  } else if (f.mode == "diversified") {
    if (f.reference.empty()) {
      if (f.corpus.empty()) {
        throw std::invalid_argument("diversified mode requires --reference or --corpus");
      }
      const prosodiff::Corpus corpus = prosodiff::LoadCorpus(f.corpus);
      prosodiff::Rng pick(config.seed, prosodiff::Stream::kEvaluation);
      const std::size_t k = static_cast<std::size_t>(
          pick.UniformInt(0, static_cast<std::int64_t>(corpus.train.size()) - 1));
      reference_used = (fs::path(f.corpus) / "utterances" /
                        (corpus.utterances[corpus.train[k]].id + ".csv")).string();
    }
  } else {
    throw std::invalid_argument("unknown mode '" + f.mode + "'");
  }
  if (!reference_used.empty()) {
    auto [ref_ids, ref] = prosodiff::UtteranceFromCsv(prosodiff::ReadFile(reference_used));
    if (ids.empty()) ids = ref_ids;
    auto [condition, weights] = model.EncodeReference(ref);
    style = condition;
    style_weights = weights.weights;
  }
  if (f.unconditional) style.reset();

  WriteResolved(config, common.out);
  nlohmann::ordered_json request;
  request["mode"] = f.mode;
  request["phoneme_ids"] = ids;
  request["reference"] = reference_used;
  request["token"] = f.token ? nlohmann::ordered_json(*f.token) : nlohmann::ordered_json();
  request["weights"] = f.weights;
  request["raw_weights"] = f.raw_weights;
  request["unconditional"] = f.unconditional;
  request["zero_text"] = f.zero_text;
  request["count"] = f.count;
  request["scale"] = {f.scale_pitch, f.scale_energy, f.scale_duration};
  prosodiff::WriteFile((fs::path(common.out) / "request.json").string(),
                       request.dump(2) + "\n");

  if (!style_weights.empty()) {
    std::string csv = "token,weight\n";
    for (std::size_t k = 0; k < style_weights.size(); ++k) {
      csv += std::to_string(k) + "," + prosodiff::FormatDouble(style_weights[k]) + "\n";
    }
    prosodiff::WriteFile((fs::path(common.out) / "style_weights.csv").string(), csv);
  }

  for (int i = 0; i < f.count; ++i) {
    prosodiff::GenerationRequest r;
    r.phoneme_ids = ids;
    r.style = style;
    r.guidance = config.guidance;
    r.seed = config.seed;
    r.index = static_cast<std::uint64_t>(i);
    r.zero_text = f.zero_text;
    r.scale = {f.scale_pitch, f.scale_energy, f.scale_duration};
    std::vector<prosodiff::StepDiagnostics> diag;
    const prosodiff::ProsodySequence out =
        prosodiff::Generate(model, r, f.diagnostics ? &diag : nullptr);
    char name[32];
    std::snprintf(name, sizeof(name), "sample_%03d", i);
    prosodiff::WriteFile((fs::path(common.out) / (std::string(name) + ".csv")).string(),
                         prosodiff::UtteranceToCsv(ids, out));
    if (f.diagnostics) {
      prosodiff::WriteFile(
          (fs::path(common.out) / (std::string(name) + "_diagnostics.csv")).string(),
          prosodiff::DiagnosticsToCsv(diag));
    }
  }
  std::cout << "wrote " << f.count << " samples to " << common.out << "\n";
  return 0;
}

struct EvalFlags {
  std::string run;
  std::string checkpoint;
  std::string corpus;
  std::optional<std::string> sweep;
  std::string only = "js,cv,transfer,tokens";
  bool svg = false;
};

std::string ReportRow(const std::string& metric, const std::string& channel, double v) {
  return metric + "," + channel + "," + prosodiff::FormatDouble(v) + "\n";
}

int CmdEval(const CommonFlags& common, const GuidanceFlags& g, const EvalFlags& f) {
  const RunPaths paths = LocateRun(f.run, f.checkpoint, common.config_path);
  RunConfig config = ResolveConfig(paths.config, common);
  ApplyGuidance(g, &config);
  if (f.sweep) config.eval.eta_sweep = ParseDoubles(*f.sweep);
  config.eval.Validate();
  std::set<std::string> parts;
  for (const std::string& p : SplitList(f.only)) {
    if (p != "js" && p != "cv" && p != "transfer" && p != "tokens") {
      throw std::invalid_argument("unknown evaluation '" + p + "'");
    }
    parts.insert(p);
  }
  const prosodiff::Corpus corpus = prosodiff::LoadCorpus(f.corpus);
  prosodiff::RequireMatchingCorpus(config, corpus);
  const prosodiff::ProsodyModel model = prosodiff::ProsodyModel::Load(paths.checkpoint, config);
  WriteResolved(config, common.out);
  const fs::path out(common.out);

  std::vector<const prosodiff::Utterance*> validation = corpus.Split(corpus.validation);
  std::string report = "metric,channel,value\n";
  std::vector<prosodiff::PlotSeries> js_series;
  if (parts.count("js")) {
    std::vector<const prosodiff::Utterance*> subset = validation;
    if (config.eval.js_utterances > 0 &&
        subset.size() > static_cast<std::size_t>(config.eval.js_utterances)) {
      subset.resize(static_cast<std::size_t>(config.eval.js_utterances));
    }
    const std::vector<prosodiff::SamplingPath> all = {
        prosodiff::SamplingPath::kConditional, prosodiff::SamplingPath::kUnconditional,
        prosodiff::SamplingPath::kZeroText};
    for (const auto& row :
         prosodiff::EvaluateDivergence(model, subset, all, config.guidance, config.seed)) {
      prosodiff::PlotSeries s{row.path, {}, {}};
      for (std::size_t c = 0; c < 3; ++c) {
        report += ReportRow("js_" + row.path, prosodiff::kChannelNames[c], row.grouped[c]);
        report += ReportRow("js_pooled_" + row.path, prosodiff::kChannelNames[c],
                            row.pooled[c]);
        s.y.push_back(row.grouped[c]);
      }
      js_series.push_back(s);
    }
  }
  const int high = prosodiff::HighVariationStyle(corpus);
  const int low = prosodiff::LowVariationStyle(corpus);
  std::vector<prosodiff::CvRow> cv_rows;
  if (parts.count("cv")) {
    cv_rows = prosodiff::CvSweep(model, prosodiff::ValidationOfStyle(corpus, high),
                                 config.eval.eta_sweep, config.guidance,
                                 config.eval.cv_samples, config.seed);
    prosodiff::WriteFile((out / "cv_sweep.csv").string(), prosodiff::CvRowsToCsv(cv_rows));
    for (const auto& r : cv_rows) {
      for (std::size_t c = 0; c < 3; ++c) {
        report += ReportRow("cv_eta_" + prosodiff::FormatDouble(r.eta),
                            prosodiff::kChannelNames[c], r.cv[c]);
      }
    }
  }
  std::vector<prosodiff::CvRow> transfer_rows;
  if (parts.count("transfer")) {
    const auto refs = prosodiff::ValidationOfStyle(corpus, high);
    const auto texts = prosodiff::ValidationOfStyle(corpus, low);
    if (refs.empty()) throw std::runtime_error("no validation utterance of the reference style");
    transfer_rows = prosodiff::TransferSweep(model, *refs.front(), texts,
                                             config.eval.transfer_etas, config.guidance,
                                             config.eval.transfer_samples, config.seed);
    prosodiff::WriteFile((out / "transfer.csv").string(),
                         prosodiff::CvRowsToCsv(transfer_rows));
    for (const auto& r : transfer_rows) {
      report += ReportRow("transfer_cv_eta_" + prosodiff::FormatDouble(r.eta),
                          prosodiff::kChannelNames[0], r.cv[0]);
    }
  }
  if (parts.count("tokens")) {
    const auto result = prosodiff::EvaluateTokenControl(
        model, validation, config.eval.samples_per_token, config.guidance,
        config.eval.baseline_repeats, config.seed);
    report += ReportRow("token_accuracy", "all", result.accuracy);
    report += ReportRow("token_random_baseline", "all", result.random_baseline);
  }
  prosodiff::WriteFile((out / "report.csv").string(), report);
  if (f.svg) {
    if (!js_series.empty()) {
      prosodiff::WriteFile((out / "js.svg").string(),
                           prosodiff::BarChartSvg("JS divergence by sampling path",
                                                  {"pitch", "energy", "duration"}, js_series));
    }
    auto cv_plot = [&](const std::vector<prosodiff::CvRow>& rows, const char* title,
                       const char* file) {
      if (rows.empty()) return;
      std::vector<prosodiff::PlotSeries> series(3);
      for (std::size_t c = 0; c < 3; ++c) series[c].name = prosodiff::kChannelNames[c];
      for (const auto& r : rows) {
        for (std::size_t c = 0; c < 3; ++c) {
          series[c].x.push_back(r.eta);
          series[c].y.push_back(r.cv[c]);
        }
      }
      prosodiff::WriteFile((out / file).string(),
                           prosodiff::LineChartSvg(title, "eta", "CV (%)", series));
    };
    cv_plot(cv_rows, "CV against guiding scale", "cv_sweep.svg");
    cv_plot(transfer_rows, "Transfer CV against guiding scale", "transfer.svg");
  }
  std::cout << report;
  return 0;
}

int CmdPlot(const std::string& input, const std::string& output, std::string title) {
  const std::string text = prosodiff::ReadFile(input);
  std::istringstream in(text);
  std::string header;
  std::getline(in, header);
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) rows.push_back(prosodiff::SplitCsvLine(line));
  }
  const std::vector<std::string> columns = prosodiff::SplitCsvLine(header);
  std::string svg;
  if (header == "metric,channel,value") {
    std::vector<std::string> categories;
    std::vector<prosodiff::PlotSeries> series;
    for (const auto& r : rows) {
      if (r.size() != 3) throw std::runtime_error("bad report row");
      auto cat = std::find(categories.begin(), categories.end(), r[1]);
      if (cat == categories.end()) categories.push_back(r[1]);
    }
    for (const auto& r : rows) {
      auto s = std::find_if(series.begin(), series.end(),
                            [&](const prosodiff::PlotSeries& p) { return p.name == r[0]; });
      if (s == series.end()) {
        series.push_back({r[0], {}, std::vector<double>(categories.size(), 0.0)});
        s = series.end() - 1;
      }
      const auto c = std::find(categories.begin(), categories.end(), r[1]) - categories.begin();
      s->y[static_cast<std::size_t>(c)] = prosodiff::ParseDouble(r[2]);
    }
    svg = prosodiff::BarChartSvg(title.empty() ? "Report" : title, categories, series);
  } else if (columns.size() >= 2) {
    std::vector<prosodiff::PlotSeries> series(columns.size() - 1);
    for (std::size_t k = 1; k < columns.size(); ++k) series[k - 1].name = columns[k];
    for (const auto& r : rows) {
      if (r.size() != columns.size()) throw std::runtime_error("ragged csv row");
      const double x = prosodiff::ParseDouble(r[0]);
      for (std::size_t k = 1; k < columns.size(); ++k) {
        series[k - 1].x.push_back(x);
        series[k - 1].y.push_back(prosodiff::ParseDouble(r[k]));
      }
    }
    svg = prosodiff::LineChartSvg(title.empty() ? input : title, columns[0], "value", series);
  } else {
    throw std::runtime_error("cannot plot csv with header '" + header + "'");
  }
  prosodiff::WriteFile(output, svg);
  std::cout << "wrote " << output << "\n";
  return 0;
}

void PrintError(const std::string& command, const std::string& message) {
  nlohmann::json j;
  j["error"] = message;
  j["command"] = command;
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diffusion prosody model with guided sampling"};
  app.require_subcommand(1);

  CommonFlags gen_common;
  auto* gen = app.add_subcommand("gen-data", "Generate the synthetic corpus");
  AddCommon(gen, &gen_common, true);

  CommonFlags train_common;
  TrainFlags train_flags;
  auto* train = app.add_subcommand("train", "Train both denoisers and the style bank");
  AddCommon(train, &train_common, true);
  train->add_option("--corpus", train_flags.corpus, "Corpus directory")->required();
  train->add_option("--steps", train_flags.steps, "Total optimisation steps");
  train->add_option("--batch-size", train_flags.batch_size, "Utterances per step");
  train->add_option("--lr", train_flags.learning_rate, "Adam learning rate");
  train->add_option("--resume", train_flags.resume, "Checkpoint to continue from");
  train->add_flag("--no-text", train_flags.no_text, "Train with zeroed text embeddings");
  train->add_flag("--style-bypass", train_flags.style_bypass,
                  "Feed the style vector to the gates instead of the condition sum");

  CommonFlags sample_common;
  GuidanceFlags sample_guidance;
  SampleFlags sample_flags;
  auto* sample = app.add_subcommand("sample", "Generate prosody");
  AddCommon(sample, &sample_common, true);
  AddGuidance(sample, &sample_guidance);
  sample->add_option("--run", sample_flags.run, "Training output directory");
  sample->add_option("--checkpoint", sample_flags.checkpoint, "Checkpoint file");
  sample->add_option("--mode", sample_flags.mode, "diversified, transfer or control")
      ->check(CLI::IsMember({"diversified", "transfer", "control"}));
  sample->add_option("--text", sample_flags.text, "Comma separated phoneme ids");
  sample->add_option("--text-from", sample_flags.text_from, "Take phoneme ids from a CSV");
  sample->add_option("--reference", sample_flags.reference, "Reference utterance CSV");
  sample->add_option("--corpus", sample_flags.corpus, "Corpus to draw a reference from");
  sample->add_option("--token", sample_flags.token, "One-hot style token id");
  sample->add_option("--weights", sample_flags.weights, "Comma separated token weights");
  sample->add_flag("--raw-weights", sample_flags.raw_weights,
                   "Accept token weights off the simplex");
  sample->add_flag("--unconditional", sample_flags.unconditional,
                   "Sample with the unconditional denoiser only");
  sample->add_flag("--zero-text", sample_flags.zero_text, "Zero the phoneme embedding");
  sample->add_option("--count", sample_flags.count, "Number of samples");
  sample->add_option("--scale-pitch", sample_flags.scale_pitch, "Pitch factor");
  sample->add_option("--scale-energy", sample_flags.scale_energy, "Energy factor");
  sample->add_option("--scale-duration", sample_flags.scale_duration, "Duration factor");
  sample->add_flag("--diagnostics", sample_flags.diagnostics,
                   "Write per-step rescale diagnostics");

  CommonFlags eval_common;
  GuidanceFlags eval_guidance;
  EvalFlags eval_flags;
  auto* eval = app.add_subcommand("eval", "Evaluate a trained run");
  AddCommon(eval, &eval_common, true);
  AddGuidance(eval, &eval_guidance);
  eval->add_option("--run", eval_flags.run, "Training output directory");
  eval->add_option("--checkpoint", eval_flags.checkpoint, "Checkpoint file");
  eval->add_option("--corpus", eval_flags.corpus, "Corpus directory")->required();
  eval->add_option("--sweep", eval_flags.sweep, "Comma separated guiding scales");
  eval->add_option("--only", eval_flags.only, "Subset of js,cv,transfer,tokens");
  eval->add_flag("--svg", eval_flags.svg, "Also write SVG charts");

  std::string plot_input, plot_output, plot_title;
  auto* plot = app.add_subcommand("plot", "Render a CSV produced by another command");
  plot->add_option("--input", plot_input, "CSV file")->required();
  plot->add_option("--out", plot_output, "SVG file")->required();
  plot->add_option("--title", plot_title, "Chart title");

  int schedule_steps = 200;
  std::string schedule_out;
  auto* schedule = app.add_subcommand("schedule", "Dump the noise schedule");
  schedule->add_option("--steps", schedule_steps, "Diffusion steps");
  schedule->add_option("--out", schedule_out, "CSV file (stdout when omitted)");

  std::string command = argc > 1 ? argv[1] : "prosodiff";
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    PrintError(command, e.what());
    return 2;
  }
  try {
    if (*gen) return command = "gen-data", CmdGenData(gen_common);
    if (*train) return command = "train", CmdTrain(train_common, train_flags);
    if (*sample) {
      command = "sample";
      return CmdSample(sample_common, sample_guidance, sample_flags);
    }
    if (*eval) return command = "eval", CmdEval(eval_common, eval_guidance, eval_flags);
    if (*plot) return command = "plot", CmdPlot(plot_input, plot_output, plot_title);
    if (*schedule) {
      command = "schedule";
      const std::string csv = prosodiff::NoiseSchedule::Cosine(schedule_steps).ToCsv();
      if (schedule_out.empty()) {
        std::cout << csv;
      } else {
        prosodiff::WriteFile(schedule_out, csv);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    PrintError(command, e.what());
    return 1;
  }
  return 0;
}
