#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "evtab/corpus.hpp"
#include "evtab/errors.hpp"
#include "evtab/eval.hpp"
#include "evtab/evidence.hpp"
#include "evtab/ingest.hpp"
#include "evtab/pipeline.hpp"
#include "evtab/synthetic.hpp"

namespace py = pybind11;
using namespace evtab;

namespace {

Mode parse_mode(const std::string& s) {
  const auto m = mode_from_string(s);
  if (!m) throw py::value_error("mode must be zero, vanilla or full, not '" + s + "'");
  return *m;
}

py::dict row_dict(const EvidenceRow& r) {
  py::dict d;
  d["id"] = r.id;
  d["patients"] = r.patients;
  d["arm1"] = r.arm1;
  d["arm2"] = r.arm2;
  d["outcome"] = r.outcome;
  d["result1"] = r.result1;
  d["result2"] = r.result2;
  d["status"] = r.status;
  return d;
}

std::vector<std::string> label_names(const std::vector<Label>& labels) {
  std::vector<std::string> out;
  for (Label l : labels) out.emplace_back(to_string(l));
  return out;
}

InferenceOptions inference_options(double delta_a, double delta_r, bool strict) {
  InferenceOptions o;
  o.delta_a = delta_a;
  o.delta_r = delta_r;
  o.strict_same_sentence = strict;
  return o;
}

}  // namespace

PYBIND11_MODULE(_evtab, m) {
  m.doc() = "Evidence-table extraction core";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<TransportError>(m, "TransportError", base.ptr());
  py::register_exception<EmptyBody>(m, "EmptyBody", base.ptr());
  py::register_exception<Infeasible>(m, "Infeasible", base.ptr());
  py::register_exception<ModeUnsupported>(m, "ModeUnsupported", base.ptr());
  py::register_exception<CorpusTooSmall>(m, "CorpusTooSmall", base.ptr());
  py::register_exception<TooFewPairs>(m, "TooFewPairs", base.ptr());

  py::class_<Abstract>(m, "Abstract")
      .def_readonly("id", &Abstract::id)
      .def_readonly("title", &Abstract::title)
      .def_readonly("text", &Abstract::text)
      .def_readonly("structured", &Abstract::structured)
      .def_readonly("preprocessed", &Abstract::preprocessed)
      .def_property_readonly("tokens",
                             [](const Abstract& a) {
                               std::vector<std::string> out;
                               for (const Token& t : a.tokens) out.push_back(t.normalized);
                               return out;
                             })
      .def_property_readonly("gold",
                             [](const Abstract& a) {
                               std::vector<std::string> out;
                               for (const Token& t : a.tokens) out.emplace_back(to_string(t.gold));
                               return out;
                             })
      .def("annotated", &render_annotated)
      .def("__repr__", [](const Abstract& a) { return "<Abstract " + a.id + ">"; });

  py::class_<MaxEntModel>(m, "Model")
      .def_property_readonly("dim", &MaxEntModel::dim)
      .def_readonly("l2", &MaxEntModel::l2)
      .def("save", [](const MaxEntModel& model, const std::string& path) { save_model(path, model); })
      .def_static("load", &load_model)
      .def("encode", &encode_model)
      .def_static("decode", [](const std::string& bytes) { return decode_model(bytes); });

  m.def("parse_annotated", py::overload_cast<std::string_view>(&parse_annotated),
        py::arg("text"), "Abstract from text marked up with <P>, <A1>, ... tags");
  m.def("normalize_sentence", &normalize_sentence, py::arg("sentence"));
  m.def("build_query",
        [](const std::string& strategy) {
          const auto s = strategy_from_string(strategy);
          if (!s) throw py::value_error("unknown strategy '" + strategy + "'");
          return build_query(*s);
        },
        py::arg("strategy"));
  m.def("ingest_fixtures",
        [](const std::filesystem::path& dir, const std::string& query, std::size_t page_size) {
          FixtureTransport transport(dir);
          FetchConfig config;
          config.page_size = page_size;
          config.politeness_delay = std::chrono::milliseconds(0);
          std::vector<Abstract> out;
          for (const RawRecord& r : fetch(query, transport, config)) out.push_back(to_abstract(r));
          return out;
        },
        py::arg("directory"), py::arg("query"), py::arg("page_size") = 100,
        "Replays recorded search and fetch responses into abstracts");

  m.def("generate_synthetic",
        [](std::size_t n, std::uint64_t seed, const std::string& noise) {
          const auto level = noise_from_string(noise);
          if (!level) throw py::value_error("noise must be zero, low, medium or high");
          return generate_synthetic(n, seed, NoiseConfig::preset(*level));
        },
        py::arg("n"), py::arg("seed") = 1, py::arg("noise") = "medium");
  m.def("load_corpus", &load_corpus, py::arg("path"));
  m.def("save_corpus",
        [](const std::string& path, const std::vector<Abstract>& corpus) { save_corpus(path, corpus); },
        py::arg("path"), py::arg("corpus"));
  m.def("preprocess",
        [](std::vector<Abstract> corpus) {
          py::gil_scoped_release release;
          for (Abstract& a : corpus) preprocess(a);
          return corpus;
        },
        py::arg("corpus"), "Preprocessed copies of the abstracts");

  m.def("train",
        [](std::vector<Abstract> corpus, double l2, int max_iterations, double tolerance) {
          py::gil_scoped_release release;
          for (Abstract& a : corpus) preprocess(a);
          TrainConfig c;
          c.l2 = l2;
          c.max_iterations = max_iterations;
          c.tolerance = tolerance;
          return train(corpus, c);
        },
        py::arg("corpus"), py::arg("l2") = 1.0, py::arg("max_iterations") = 500,
        py::arg("tolerance") = 1e-6);

  m.def("predict",
        [](const MaxEntModel& model, Abstract abstract, const std::string& mode, double delta_a,
           double delta_r, bool strict) {
          preprocess(abstract);
          const Prediction p =
              predict(model, abstract, parse_mode(mode), inference_options(delta_a, delta_r, strict));
          py::dict d;
          d["mode"] = std::string(to_string(p.solution.mode));
          d["feasible"] = p.solution.feasible;
          d["objective"] = p.solution.objective;
          d["fell_back"] = p.fell_back;
          d["warning"] = p.warning;
          d["labels"] = label_names(p.solution.labels);
          if (p.solution.mode != Mode::Zero) d["row"] = row_dict(emit_evidence_table(abstract, p.solution));
          return d;
        },
        py::arg("model"), py::arg("abstract"), py::arg("mode") = "full",
        py::arg("delta_a") = kDefaultDelta, py::arg("delta_r") = kDefaultDelta,
        py::arg("strict_same_sentence") = false);

  m.def("evidence_table",
        [](const MaxEntModel& model, std::vector<Abstract> corpus, const std::string& mode,
           const std::string& format, unsigned workers) {
          const Mode md = parse_mode(mode);
          if (md == Mode::Zero) throw ModeUnsupported("zero mode has no unique heads");
          py::gil_scoped_release release;
          for (Abstract& a : corpus) preprocess(a);
          const auto predictions = predict_corpus(model, corpus, md, {}, workers);
          std::vector<EvidenceRow> rows;
          for (std::size_t i = 0; i < corpus.size(); ++i) {
            rows.push_back(emit_evidence_table(corpus[i], predictions[i].solution));
          }
          return format_evidence_table(rows, format == "csv" ? TableFormat::Csv : TableFormat::Tsv);
        },
        py::arg("model"), py::arg("corpus"), py::arg("mode") = "full", py::arg("format") = "tsv",
        py::arg("workers") = 1);

  m.def("kfold_json",
        [](std::vector<Abstract> corpus, std::size_t k, std::uint64_t seed, int max_iterations,
           unsigned workers) {
          py::gil_scoped_release release;
          EvalConfig c;
          c.train.max_iterations = max_iterations;
          c.workers = workers;
          return report_json(kfold(corpus, k, seed, c));
        },
        py::arg("corpus"), py::arg("k") = 10, py::arg("seed") = 1, py::arg("max_iterations") = 500,
        py::arg("workers") = 1);

  m.def("fold_assignment", &fold_assignment, py::arg("n"), py::arg("k"), py::arg("seed"));

  m.def("wilcoxon",
        [](const std::vector<double>& a, const std::vector<double>& b) {
          const WilcoxonResult r = wilcoxon_signed_rank(a, b);
          py::dict d;
          d["n"] = r.n;
          d["w_plus"] = r.w_plus;
          d["w_minus"] = r.w_minus;
          d["p_greater"] = r.p_greater;
          d["p_less"] = r.p_less;
          d["p_two_sided"] = r.p_two_sided;
          d["exact"] = r.exact;
          return d;
        },
        py::arg("a"), py::arg("b"));
}
