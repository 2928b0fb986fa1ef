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

#include "prosodiff/trainer.h"

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "prosodiff/format.h"

namespace prosodiff {
namespace {

namespace fs = std::filesystem;

std::string CheckpointName(int step) {
  char name[32];
  std::snprintf(name, sizeof(name), "step_%06d.bin", step);
  return name;
}

}  // namespace

void RequireMatchingCorpus(const RunConfig& config, const Corpus& corpus) {
  if (!(corpus.config == config.corpus)) {
    throw std::invalid_argument(
        "corpus/config mismatch: corpus settings differ from the run config");
  }
  if (corpus.train.empty()) throw std::invalid_argument("corpus has no training split");
}

std::vector<LossRow> Train(ProsodyModel& model, const Corpus& corpus,
                           const TrainOptions& options) {
  const RunConfig& config = model.config();
  RequireMatchingCorpus(config, corpus);

  std::vector<Tensor> x0;
  std::vector<TextEmbedding> text;
  x0.reserve(corpus.train.size());
  for (std::size_t i : corpus.train) {
    const Utterance& u = corpus.utterances[i];
    x0.push_back(NormalizeTensor(u.prosody.values, model.stats()));
    text.push_back(model.text().Embed(u.phoneme_ids));
  }

  std::string loss_path;
  std::vector<LossRow> rows;
  if (!options.output_dir.empty()) {
    fs::create_directories(fs::path(options.output_dir) / "checkpoints");
    loss_path = (fs::path(options.output_dir) / "loss.csv").string();
    if (model.step() > 0 && fs::exists(loss_path)) {
      for (const LossRow& r : LossRowsFromCsv(ReadFile(loss_path))) {
        if (r.step <= model.step()) rows.push_back(r);
      }
    }
  }
  const std::size_t resumed_rows = rows.size();

  const auto last_index = static_cast<std::int64_t>(x0.size()) - 1;
  for (int step = model.step() + 1; step <= config.train.steps; ++step) {
    Rng rng(config.seed, Stream::kTraining, static_cast<std::uint64_t>(step));
    std::vector<TrainExample> batch;
    batch.reserve(static_cast<std::size_t>(config.train.batch_size));
    for (int b = 0; b < config.train.batch_size; ++b) {
      const auto k = static_cast<std::size_t>(rng.UniformInt(0, last_index));
      batch.push_back(TrainExample{&x0[k], text[k], &x0[k]});
    }
    const TrainLosses losses =
        TrainStep(model.conditional(), model.unconditional(), model.bank(),
                  batch, model.schedule(), config.train.adam, rng);
    model.set_step(step);
    rows.push_back({step, losses.conditional, losses.unconditional});
    if (options.on_step) options.on_step(rows.back());
    if (!options.output_dir.empty() && config.train.checkpoint_every > 0 &&
        step % config.train.checkpoint_every == 0) {
      model.Save((fs::path(options.output_dir) / "checkpoints" / CheckpointName(step))
                     .string());
      WriteFile(loss_path, LossRowsToCsv(rows));
    }
  }
  if (!options.output_dir.empty()) {
    WriteFile(loss_path, LossRowsToCsv(rows));
    model.Save((fs::path(options.output_dir) / "model.bin").string());
  }
  return std::vector<LossRow>(rows.begin() + static_cast<std::ptrdiff_t>(resumed_rows),
                              rows.end());
}

std::string LossRowsToCsv(const std::vector<LossRow>& rows) {
  std::string out = "step,loss_c,loss_nc\n";
  for (const LossRow& r : rows) {
    out += std::to_string(r.step) + "," + FormatDouble(r.loss_c) + "," +
           FormatDouble(r.loss_nc) + "\n";
  }
  return out;
}

std::vector<LossRow> LossRowsFromCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (line != "step,loss_c,loss_nc") {
    throw std::runtime_error("unexpected loss csv header: " + line);
  }
  std::vector<LossRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitCsvLine(line);
    if (f.size() != 3) throw std::runtime_error("bad loss csv row: " + line);
    rows.push_back({static_cast<int>(ParseDouble(f[0])), ParseDouble(f[1]),
                    ParseDouble(f[2])});
  }
  return rows;
}

}  // namespace prosodiff
