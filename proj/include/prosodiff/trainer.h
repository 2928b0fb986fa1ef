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

#ifndef PROSODIFF_TRAINER_H_
#define PROSODIFF_TRAINER_H_

#include <functional>
#include <string>
#include <vector>

#include "prosodiff/corpus.h"
#include "prosodiff/model.h"

namespace prosodiff {

struct LossRow {
  int step = 0;
  double loss_c = 0.0;
  double loss_nc = 0.0;
};

struct TrainOptions {
  // Written when non-empty: loss.csv, checkpoints/step_<n>.bin, model.bin.
  std::string output_dir;
  // Called after every step.
  std::function<void(const LossRow&)> on_step;
};

// Throws unless the corpus was generated from the run's corpus settings.
void RequireMatchingCorpus(const RunConfig& config, const Corpus& corpus);

// Runs steps model.step() + 1 .. config.train.steps. Step s draws its batch,
// diffusion steps and noise from the (seed, training, s) substream, so a run
// resumed from a checkpoint reproduces the uninterrupted run.
std::vector<LossRow> Train(ProsodyModel& model, const Corpus& corpus,
                           const TrainOptions& options = {});

std::string LossRowsToCsv(const std::vector<LossRow>& rows);
std::vector<LossRow> LossRowsFromCsv(const std::string& text);

}  // namespace prosodiff

#endif  // PROSODIFF_TRAINER_H_
