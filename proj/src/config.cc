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

#include "prosodiff/config.h"

#include <set>
#include <stdexcept>

#include "json.hpp"
#include "prosodiff/format.h"

namespace prosodiff {
namespace {

using Json = nlohmann::ordered_json;

// Reads optional keys from one JSON object and rejects any key it was not
// asked about.
class Section {
 public:
  Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) {
      throw std::invalid_argument("config: '" + path_ + "' must be an object");
    }
  }

  template <typename T>
  void Read(const char* key, T* out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      *out = it->template get<T>();
    } catch (const Json::exception&) {
      throw std::invalid_argument("config: bad value for '" + path_ + "." +
                                  key + "'");
    }
  }

  const Json* Child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void Finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw std::invalid_argument("config: unknown key '" + path_ + "." +
                                    it.key() + "'");
      }
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Json CorpusJson(const CorpusConfig& c) {
  Json j;
  j["styles"] = c.styles;
  j["utterances_per_style"] = c.utterances_per_style;
  j["min_length"] = c.min_length;
  j["max_length"] = c.max_length;
  j["vocab_size"] = c.vocab_size;
  j["validation_fraction"] = c.validation_fraction;
  j["pitch_base_gap"] = c.pitch_base_gap;
  j["separation_margin"] = c.separation_margin;
  return j;
}

void ReadCorpus(const Json& j, CorpusConfig* c) {
  Section s(j, "corpus");
  s.Read("styles", &c->styles);
  s.Read("utterances_per_style", &c->utterances_per_style);
  s.Read("min_length", &c->min_length);
  s.Read("max_length", &c->max_length);
  s.Read("vocab_size", &c->vocab_size);
  s.Read("validation_fraction", &c->validation_fraction);
  s.Read("pitch_base_gap", &c->pitch_base_gap);
  s.Read("separation_margin", &c->separation_margin);
  s.Finish();
}

Json DenoiserJson(const DenoiserConfig& c) {
  Json j;
  j["residual_layers"] = c.residual_layers;
  j["residual_channels"] = c.residual_channels;
  j["kernel_size"] = c.kernel_size;
  j["dilation_cycle"] = c.dilation_cycle;
  j["hidden_channels"] = c.hidden_channels;
  j["time_embedding_dim"] = c.time_embedding_dim;
  j["condition_dim"] = c.condition_dim;
  j["use_text"] = c.use_text;
  j["style_in_condition"] = c.style_in_condition;
  return j;
}

void ReadDenoiser(const Json& j, DenoiserConfig* c) {
  Section s(j, "denoiser");
  s.Read("residual_layers", &c->residual_layers);
  s.Read("residual_channels", &c->residual_channels);
  s.Read("kernel_size", &c->kernel_size);
  s.Read("dilation_cycle", &c->dilation_cycle);
  s.Read("hidden_channels", &c->hidden_channels);
  s.Read("time_embedding_dim", &c->time_embedding_dim);
  s.Read("condition_dim", &c->condition_dim);
  s.Read("use_text", &c->use_text);
  s.Read("style_in_condition", &c->style_in_condition);
  s.Finish();
}

Json StyleJson(const StyleConfig& c) {
  Json j;
  j["token_count"] = c.token_count;
  j["token_dim"] = c.token_dim;
  j["heads"] = c.heads;
  j["reference_channels"] = c.reference_channels;
  j["reference_kernel"] = c.reference_kernel;
  return j;
}

void ReadStyle(const Json& j, StyleConfig* c) {
  Section s(j, "style");
  s.Read("token_count", &c->token_count);
  s.Read("token_dim", &c->token_dim);
  s.Read("heads", &c->heads);
  s.Read("reference_channels", &c->reference_channels);
  s.Read("reference_kernel", &c->reference_kernel);
  s.Finish();
}

Json GuidanceJson(const GuidanceParams& g) {
  Json j;
  j["eta"] = g.eta;
  j["gamma"] = g.gamma;
  j["tau"] = g.tau;
  return j;
}

void ReadGuidance(const Json& j, GuidanceParams* g) {
  Section s(j, "guidance");
  s.Read("eta", &g->eta);
  s.Read("gamma", &g->gamma);
  s.Read("tau", &g->tau);
  s.Finish();
}

Json TrainJson(const TrainConfig& t) {
  Json j;
  j["steps"] = t.steps;
  j["batch_size"] = t.batch_size;
  j["learning_rate"] = t.adam.learning_rate;
  j["beta1"] = t.adam.beta1;
  j["beta2"] = t.adam.beta2;
  j["epsilon"] = t.adam.epsilon;
  j["checkpoint_every"] = t.checkpoint_every;
  return j;
}

void ReadTrain(const Json& j, TrainConfig* t) {
  Section s(j, "train");
  s.Read("steps", &t->steps);
  s.Read("batch_size", &t->batch_size);
  s.Read("learning_rate", &t->adam.learning_rate);
  s.Read("beta1", &t->adam.beta1);
  s.Read("beta2", &t->adam.beta2);
  s.Read("epsilon", &t->adam.epsilon);
  s.Read("checkpoint_every", &t->checkpoint_every);
  s.Finish();
}

Json EvalJson(const EvalConfig& e) {
  Json j;
  j["eta_sweep"] = e.eta_sweep;
  j["cv_samples"] = e.cv_samples;
  j["samples_per_token"] = e.samples_per_token;
  j["transfer_etas"] = e.transfer_etas;
  j["transfer_samples"] = e.transfer_samples;
  j["baseline_repeats"] = e.baseline_repeats;
  j["js_utterances"] = e.js_utterances;
  return j;
}

void ReadEval(const Json& j, EvalConfig* e) {
  Section s(j, "eval");
  s.Read("eta_sweep", &e->eta_sweep);
  s.Read("cv_samples", &e->cv_samples);
  s.Read("samples_per_token", &e->samples_per_token);
  s.Read("transfer_etas", &e->transfer_etas);
  s.Read("transfer_samples", &e->transfer_samples);
  s.Read("baseline_repeats", &e->baseline_repeats);
  s.Read("js_utterances", &e->js_utterances);
  s.Finish();
}

}  // namespace

void TrainConfig::Validate() const {
  if (steps < 0) throw std::invalid_argument("train.steps must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("train.batch_size must be >= 1");
  if (!(adam.learning_rate > 0.0)) {
    throw std::invalid_argument("train.learning_rate must be > 0");
  }
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) ||
      !(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    throw std::invalid_argument("adam betas must lie in [0, 1)");
  }
  if (!(adam.epsilon > 0.0)) throw std::invalid_argument("adam epsilon must be > 0");
  if (checkpoint_every < 0) {
    throw std::invalid_argument("train.checkpoint_every must be >= 0");
  }
}

void EvalConfig::Validate() const {
  if (eta_sweep.empty()) throw std::invalid_argument("eval.eta_sweep is empty");
  if (transfer_etas.empty()) {
    throw std::invalid_argument("eval.transfer_etas is empty");
  }
  for (const auto* list : {&eta_sweep, &transfer_etas}) {
    for (double eta : *list) {
      if (!(eta >= 0.0)) throw std::invalid_argument("eval etas must be >= 0");
    }
  }
  if (cv_samples < 1 || transfer_samples < 1) {
    throw std::invalid_argument("eval sample counts must be >= 1");
  }
  if (samples_per_token < 2) {
    throw std::invalid_argument("eval.samples_per_token must be >= 2");
  }
  if (baseline_repeats < 1 || js_utterances < 0) {
    throw std::invalid_argument("eval repeat counts must be positive");
  }
}

void RunConfig::Validate() const {
  corpus.Validate();
  denoiser.Validate();
  style.Validate();
  guidance.Validate();
  train.Validate();
  eval.Validate();
  if (diffusion_steps < 2) {
    throw std::invalid_argument("diffusion_steps must be >= 2");
  }
  if (style.token_dim != denoiser.condition_dim) {
    throw std::invalid_argument(
        "style.token_dim must equal denoiser.condition_dim");
  }
  if (output_dir.empty()) throw std::invalid_argument("output_dir is empty");
}

std::string RunConfigToJson(const RunConfig& c) {
  Json j;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["diffusion_steps"] = c.diffusion_steps;
  j["corpus"] = CorpusJson(c.corpus);
  j["denoiser"] = DenoiserJson(c.denoiser);
  j["style"] = StyleJson(c.style);
  j["guidance"] = GuidanceJson(c.guidance);
  j["train"] = TrainJson(c.train);
  j["eval"] = EvalJson(c.eval);
  return j.dump(2) + "\n";
}

RunConfig ParseRunConfig(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  RunConfig c;
  Section s(j, "");
  s.Read("seed", &c.seed);
  s.Read("output_dir", &c.output_dir);
  s.Read("diffusion_steps", &c.diffusion_steps);
  if (const Json* v = s.Child("corpus")) ReadCorpus(*v, &c.corpus);
  if (const Json* v = s.Child("denoiser")) ReadDenoiser(*v, &c.denoiser);
  if (const Json* v = s.Child("style")) ReadStyle(*v, &c.style);
  if (const Json* v = s.Child("guidance")) ReadGuidance(*v, &c.guidance);
  if (const Json* v = s.Child("train")) ReadTrain(*v, &c.train);
  if (const Json* v = s.Child("eval")) ReadEval(*v, &c.eval);
  s.Finish();
  c.Validate();
  return c;
}

RunConfig LoadRunConfig(const std::string& path) {
  return ParseRunConfig(ReadFile(path));
}

void SaveRunConfig(const RunConfig& config, const std::string& path) {
  WriteFile(path, RunConfigToJson(config));
}

}  // namespace prosodiff
