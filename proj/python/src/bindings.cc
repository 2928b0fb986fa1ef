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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "prosodiff/config.h"
#include "prosodiff/corpus.h"
#include "prosodiff/eval.h"
#include "prosodiff/guidance.h"
#include "prosodiff/model.h"
#include "prosodiff/schedule.h"
#include "prosodiff/trainer.h"

namespace py = pybind11;

namespace prosodiff {
namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Tensor ToTensor(const Array& a) {
  Shape shape(a.shape(), a.shape() + a.ndim());
  return Tensor(shape, std::vector<double>(a.data(), a.data() + a.size()));
}

Array ToArray(const Tensor& t) {
  Array out(std::vector<py::ssize_t>(t.shape().begin(), t.shape().end()));
  std::copy(t.values().begin(), t.values().end(), out.mutable_data());
  return out;
}

// [3, L] on the Python side.
ProsodySequence ToSequence(const Array& a) {
  if (a.ndim() != 2 || a.shape(0) != 3) {
    throw std::invalid_argument("prosody must have shape (3, L)");
  }
  return ProsodySequence(ToTensor(a).Reshaped({1, 3, static_cast<std::size_t>(a.shape(1))}));
}

Array FromSequence(const ProsodySequence& x) {
  return ToArray(x.values.Reshaped({3, x.length()}));
}

std::vector<ProsodySequence> ToSequences(const std::vector<Array>& list) {
  std::vector<ProsodySequence> out;
  for (const Array& a : list) out.push_back(ToSequence(a));
  return out;
}

GuidanceParams MakeGuidance(double eta, double gamma, double tau) {
  GuidanceParams p{eta, gamma, tau};
  p.Validate();
  return p;
}

}  // namespace
}  // namespace prosodiff

PYBIND11_MODULE(_prosodiff, m) {
  using namespace prosodiff;
  m.doc() = "Conditional diffusion model for phoneme-level prosody.";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const std::out_of_range& e) {
      PyErr_SetString(PyExc_IndexError, e.what());
    }
  });

  // Schedule and forward process.
  m.def("cosine_alpha_bars", [](int steps) {
    const NoiseSchedule s = NoiseSchedule::Cosine(steps);
    std::vector<double> out;
    for (int t = 0; t <= steps; ++t) out.push_back(s.alpha_bar(t));
    return out;
  }, py::arg("steps"), "alpha_bar for t = 0..T (index 0 is 1).");
  m.def("schedule_csv", [](int steps) { return NoiseSchedule::Cosine(steps).ToCsv(); },
        py::arg("steps"));
  m.def("forward_diffuse", [](const Array& x0, int t, const Array& eps, int steps) {
    return ToArray(ForwardDiffuse(ToTensor(x0), t, ToTensor(eps), NoiseSchedule::Cosine(steps)));
  }, py::arg("x0"), py::arg("t"), py::arg("eps"), py::arg("steps"));

  // Guidance.
  m.def("cfg_combine", [](const Array& eps_c, const Array& eps_nc, double eta) {
    return ToArray(CfgCombine(ToTensor(eps_c), ToTensor(eps_nc), eta));
  }, py::arg("eps_c"), py::arg("eps_nc"), py::arg("eta"));
  m.def("rescale", [](const Array& combined, const Array& eps_c, double gamma) {
    return ToArray(Rescale(ToTensor(combined), ToTensor(eps_c), gamma));
  }, py::arg("combined"), py::arg("eps_c"), py::arg("gamma"));
  m.def("draw_terminal", [](std::size_t batch, std::size_t length, double tau,
                            std::uint64_t seed) {
    Rng rng(seed, Stream::kSampling);
    return ToArray(DrawTerminal(batch, length, tau, rng));
  }, py::arg("batch"), py::arg("length"), py::arg("tau") = 1.0, py::arg("seed") = 0);

  // Configuration.
  m.def("default_config", [] { return RunConfigToJson(RunConfig{}); });
  m.def("normalize_config", [](const std::string& text) {
    return RunConfigToJson(ParseRunConfig(text));
  }, py::arg("json"), "Parses, validates and re-serializes a run config.");

  // Corpus.
  py::class_<Utterance>(m, "Utterance")
      .def_readonly("id", &Utterance::id)
      .def_readonly("phoneme_ids", &Utterance::phoneme_ids)
      .def_readonly("style_id", &Utterance::style_id)
      .def_property_readonly("prosody", [](const Utterance& u) { return FromSequence(u.prosody); });
  py::class_<Corpus>(m, "Corpus")
      .def_readonly("utterances", &Corpus::utterances)
      .def_readonly("train", &Corpus::train)
      .def_readonly("validation", &Corpus::validation)
      .def_readonly("seed", &Corpus::seed)
      .def("save", [](const Corpus& c, const std::string& dir) { SaveCorpus(c, dir); });
  m.def("generate_corpus", [](const std::string& config_json, std::optional<std::uint64_t> seed) {
    const RunConfig c = ParseRunConfig(config_json);
    return GenerateCorpus(c.corpus, seed.value_or(c.seed));
  }, py::arg("config_json") = "{}", py::arg("seed") = py::none());
  m.def("load_corpus", &LoadCorpus, py::arg("dir"));

  // Model.
  py::class_<ProsodyModel>(m, "Model")
      .def_static("load", [](const std::string& path, const std::string& config_json) {
        return ProsodyModel::Load(path, ParseRunConfig(config_json));
      }, py::arg("path"), py::arg("config_json") = "{}")
      .def_property_readonly("step", &ProsodyModel::step)
      .def("save", &ProsodyModel::Save, py::arg("path"))
      .def("token_weights", [](const ProsodyModel& model, const Array& reference) {
        return model.EncodeReference(ToSequence(reference)).second.weights;
      }, py::arg("reference"))
      .def("generate", [](const ProsodyModel& model, const std::vector<int>& phoneme_ids,
                          std::optional<Array> reference,
                          std::optional<std::vector<double>> token_weights, double eta,
                          double gamma, double tau, std::uint64_t seed, std::uint64_t index,
                          bool zero_text, std::array<double, 3> scale) {
        GenerationRequest r;
        r.phoneme_ids = phoneme_ids;
        if (reference && token_weights) {
          throw std::invalid_argument("pass either reference or token_weights");
        }
        if (reference) r.style = model.EncodeReference(ToSequence(*reference)).first;
        if (token_weights) {
          r.style = model.bank().ConditionFromWeights(TokenWeights::Normalized(*token_weights));
        }
        r.guidance = MakeGuidance(eta, gamma, tau);
        r.seed = seed;
        r.index = index;
        r.zero_text = zero_text;
        r.scale = scale;
        ProsodySequence out;
        {
          py::gil_scoped_release release;
          out = Generate(model, r);
        }
        return FromSequence(out);
      }, py::arg("phoneme_ids"), py::arg("reference") = py::none(),
         py::arg("token_weights") = py::none(), py::arg("eta") = 1.0, py::arg("gamma") = 0.7,
         py::arg("tau") = 1.0, py::arg("seed") = 0, py::arg("index") = 0,
         py::arg("zero_text") = false,
         py::arg("scale") = std::array<double, 3>{1.0, 1.0, 1.0});
  m.def("train", [](const std::string& config_json, const Corpus& corpus,
                    const std::string& output_dir) {
    const RunConfig config = ParseRunConfig(config_json);
    RequireMatchingCorpus(config, corpus);
    ProsodyModel model(config, corpus.stats);
    TrainOptions options;
    options.output_dir = output_dir;
    std::vector<LossRow> rows;
    {
      py::gil_scoped_release release;
      rows = Train(model, corpus, options);
    }
    std::vector<std::pair<double, double>> losses;
    for (const LossRow& r : rows) losses.emplace_back(r.loss_c, r.loss_nc);
    return py::make_tuple(std::move(model), losses);
  }, py::arg("config_json"), py::arg("corpus"), py::arg("output_dir") = "");

  // Metrics.
  m.def("js_divergence", [](const std::vector<double>& generated,
                            const std::vector<double>& reference) {
    return JsDivergence(generated, reference);
  }, py::arg("generated"), py::arg("reference"));
  m.def("pooled_js", [](const std::vector<Array>& generated, const std::vector<Array>& reference) {
    return PooledJs(ToSequences(generated), ToSequences(reference));
  }, py::arg("generated"), py::arg("reference"));
  m.def("coefficient_of_variation", [](const std::vector<double>& v) {
    return CoefficientOfVariation(v);
  }, py::arg("values"));
  m.def("descriptor", [](const Array& prosody) { return Descriptor(ToSequence(prosody)); },
        py::arg("prosody"));
}
