#include <sstream>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cbir/cli.hpp"
#include "cbir/database.hpp"
#include "cbir/error.hpp"
#include "cbir/eval.hpp"
#include "cbir/pipeline.hpp"
#include "cbir/retrieval.hpp"
#include "cbir/synthetic.hpp"

namespace py = pybind11;
using namespace cbir;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

Image to_image(const U8Array& array) {
  const auto info = array.request();
  if (info.ndim == 2 || (info.ndim == 3 && (info.shape[2] == 3 || info.shape[2] == 1))) {
    const auto h = static_cast<int>(info.shape[0]), w = static_cast<int>(info.shape[1]);
    const int channels = info.ndim == 2 ? 1 : static_cast<int>(info.shape[2]);
    const auto* src = static_cast<const std::uint8_t*>(info.ptr);
    Image img(w, h);
    for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i)
      for (int c = 0; c < 3; ++c) img.rgb[i * 3 + c] = src[i * channels + (channels == 3 ? c : 0)];
    return img;
  }
  throw py::value_error("expected an HxW or HxWx3 uint8 array");
}

py::array_t<std::uint8_t> to_array(const Image& img) {
  py::array_t<std::uint8_t> out({img.height, img.width, 3});
  std::copy(img.rgb.begin(), img.rgb.end(), out.mutable_data());
  return out;
}

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::vector<double> to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  return {a.data(), a.data() + a.size()};
}

std::array<double, 4> to_weights(const std::vector<double>& w) {
  if (w.size() != 4) throw py::value_error("expected four weights (CDH, LBP, CLD, EOH)");
  return {w[0], w[1], w[2], w[3]};
}

MetricId metric_of(const std::string& name) {
  const auto m = parse_metric(name);
  if (!m) throw py::value_error("unknown metric '" + name + "'");
  return *m;
}

py::dict descriptors_dict(const DescriptorSet& d) {
  py::dict out;
  out["cdh"] = to_array(d.cdh);
  out["lbp"] = to_array(d.lbp);
  out["cld"] = to_array(d.cld);
  out["eoh"] = to_array(d.eoh);
  return out;
}

py::list ranked_rows(const RankedList& list) {
  py::list rows;
  for (std::size_t r = 0; r < list.entries.size(); ++r) {
    const auto& e = list.entries[r];
    py::dict row;
    row["rank"] = r + 1;
    row["id"] = e.id;
    row["label"] = e.label;
    row["combined"] = e.combined;
    row["per_descriptor"] = std::vector<double>(e.per_descriptor.begin(), e.per_descriptor.end());
    rows.append(row);
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-descriptor content-based image retrieval";
  py::register_exception<Error>(m, "CbirError", PyExc_RuntimeError);

  m.attr("CDH_DIMS") = kCdhDims;
  m.attr("LBP_DIMS") = kLbpDims;
  m.attr("CLD_DIMS") = kCldDims;
  m.attr("EOH_DIMS") = kEohDims;

  // Descriptors take HxWx3 uint8 RGB arrays (HxW greyscale is replicated).
  m.def("compute_cdh", [](const U8Array& img) { return to_array(compute_cdh(to_image(img))); });
  m.def(
      "compute_lbp",
      [](const U8Array& img, int neighbors, int radius) {
        return to_array(compute_lbp(to_image(img), LbpParams{neighbors, radius}));
      },
      py::arg("image"), py::arg("neighbors") = 8, py::arg("radius") = 1);
  m.def("compute_cld", [](const U8Array& img) { return to_array(compute_cld(to_image(img))); });
  m.def(
      "compute_eoh", [](const U8Array& img, double threshold) { return to_array(compute_eoh(to_image(img), threshold)); },
      py::arg("image"), py::arg("threshold") = kDefaultEohThreshold);
  m.def("compute_all", [](const U8Array& img) { return descriptors_dict(compute_all(to_image(img))); });
  m.def("resize_bilinear", [](const U8Array& img, int w, int h) { return to_array(resize_bilinear(to_image(img), w, h)); });

  m.def(
      "distance",
      [](const std::string& metric, const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& b, bool as_printed) {
        return distance({metric_of(metric), as_printed}, to_vector(a), to_vector(b));
      },
      py::arg("metric"), py::arg("a"), py::arg("b"), py::arg("as_printed") = false);
  m.def("normalize_distances", [](const std::vector<double>& raw) { return normalize_distances(raw); });

  py::class_<PRCurve>(m, "PRCurve")
      .def_readonly("recall", &PRCurve::recall)
      .def_readonly("precision", &PRCurve::precision)
      .def_readonly("auc", &PRCurve::auc);
  m.def("pr_curve", [](const std::vector<std::uint32_t>& ranking, const std::vector<std::uint32_t>& relevant) {
    return pr_curve(ranking, RelevantSet(relevant.begin(), relevant.end()));
  });
  m.def("raw_pr_auc", [](const std::vector<std::uint32_t>& ranking, const std::vector<std::uint32_t>& relevant) {
    return raw_pr_auc(ranking, RelevantSet(relevant.begin(), relevant.end()));
  });

  m.def(
      "relevant_ratio_update",
      [](const std::vector<double>& w, double increment_factor, const std::vector<std::size_t>& solo,
         std::size_t combined) {
        if (solo.size() != 4) throw py::value_error("expected four solo counts");
        const auto up = relevant_ratio_update(to_weights(w), increment_factor, {solo[0], solo[1], solo[2], solo[3]},
                                              combined);
        return py::make_tuple(std::vector<double>(up.weights.begin(), up.weights.end()), up.substituted_zero);
      },
      py::arg("weights"), py::arg("increment_factor"), py::arg("solo_counts"), py::arg("combined_count"));
  m.def(
      "mean_difference_step",
      [](const std::vector<double>& w, int best, double step) {
        if (best < 0 || best > 3) throw py::value_error("best must be a descriptor index 0..3");
        const auto next = mean_difference_step(to_weights(w), static_cast<Descriptor>(best), step);
        return std::vector<double>(next.begin(), next.end());
      },
      py::arg("weights"), py::arg("best"), py::arg("step") = 0.05);

  py::class_<SplitAssignment>(m, "SplitAssignment")
      .def_readonly("train_ids", &SplitAssignment::train_ids)
      .def_readonly("test_ids", &SplitAssignment::test_ids)
      .def_readonly("seed", &SplitAssignment::seed);
  m.def("make_split", &make_split, py::arg("labels"), py::arg("seed") = kDefaultSplitSeed);

  m.def(
      "generate_synthetic",
      [](std::size_t classes, std::size_t per_class, std::uint64_t seed) {
        py::list out;
        for (const auto& s : generate_synthetic_images({classes, per_class, seed}))
          out.append(py::make_tuple(s.label, to_array(s.image)));
        return out;
      },
      py::arg("classes") = 4, py::arg("per_class") = 20, py::arg("seed") = 1);
  m.def(
      "write_synthetic_corpus",
      [](const std::filesystem::path& root, std::size_t classes, std::size_t per_class, std::uint64_t seed) {
        write_synthetic_corpus({classes, per_class, seed}, root);
      },
      py::arg("root"), py::arg("classes") = 4, py::arg("per_class") = 20, py::arg("seed") = 1);

  py::class_<FeatureDatabase>(m, "Database")
      .def_static(
          "ingest",
          [](const std::filesystem::path& root, std::uint64_t seed) { return ingest_database(root, seed); },
          py::arg("root"), py::arg("seed") = kDefaultSplitSeed)
      .def_static("load", &load_database, py::arg("path"))
      .def("save", [](const FeatureDatabase& db, const std::filesystem::path& p) { save_database(db, p); })
      .def(
          "extract",
          [](FeatureDatabase& db, double eoh_threshold) {
            DescriptorConfig config = descriptor_config(db.header);
            config.eoh_threshold = eoh_threshold;
            py::gil_scoped_release release;
            extract_descriptors(db, config);
          },
          py::arg("eoh_threshold") = kDefaultEohThreshold)
      .def(
          "train",
          [](FeatureDatabase& db, double c, int epochs, std::uint64_t seed, std::size_t top_k) {
            return train_database(db, TrainConfig{c, epochs, seed, top_k}).test_accuracy;
          },
          py::arg("c") = 1.0, py::arg("epochs") = 200, py::arg("seed") = 42, py::arg("top_k") = 3)
      .def("__len__", [](const FeatureDatabase& db) { return db.records.size(); })
      .def_property_readonly("labels", [](const FeatureDatabase& db) { return record_labels(db.records); })
      .def_property_readonly("split", [](const FeatureDatabase& db) { return db.split; })
      .def_property_readonly("has_model", [](const FeatureDatabase& db) { return db.model.has_value(); })
      .def("descriptors", [](const FeatureDatabase& db, std::uint32_t id) {
        if (id >= db.records.size()) throw py::index_error("unknown image id");
        return descriptors_dict(db.records[id].descriptors);
      })
      .def(
          "query",
          [](const FeatureDatabase& db, std::uint32_t id, const std::string& metric,
             std::optional<std::vector<double>> weights, std::optional<std::string> method, bool prune,
             std::size_t top_n) {
            QueryOptions o;
            o.metric = {metric_of(metric), false};
            if (weights) o.weights = WeightVector(to_weights(*weights), false);
            if (method) {
              const auto wm = parse_method(*method);
              if (!wm) throw py::value_error("unknown method '" + *method + "'");
              o.auto_method = *wm;
            }
            o.prune = prune;
            o.top_n = top_n;
            const QueryResult r = query(db.records, db.model ? &*db.model : nullptr, id, o);
            py::dict out;
            out["results"] = ranked_rows(r.ranked);
            const auto& w = r.ranked.weights.values();
            out["weights"] = std::vector<double>(w.begin(), w.end());
            out["pool_size"] = r.ranked.pool_size;
            std::vector<std::string> categories;
            for (const auto& c : r.categories) categories.push_back(c.label);
            out["categories"] = categories;
            return out;
          },
          py::arg("id"), py::arg("metric") = "canberra", py::arg("weights") = py::none(),
          py::arg("method") = py::none(), py::arg("prune") = true, py::arg("top_n") = 10)
      .def(
          "evaluate",
          [](const FeatureDatabase& db, std::size_t n_queries, std::uint64_t seed, const std::string& method,
             bool prune) {
            if (!db.split) throw py::value_error("database has no split");
            EvalConfig config;
            config.n_queries = n_queries;
            config.seed = seed;
            const auto wm = parse_method(method);
            if (!wm) throw py::value_error("unknown method '" + method + "'");
            config.method = *wm;
            config.prune = prune;
            static const IndexModel kNoModel;
            ExperimentReport report;
            {
              py::gil_scoped_release release;
              report = batch_evaluate(db.records, db.model ? *db.model : kNoModel, *db.split, config);
            }
            py::dict out;
            for (const auto& r : report.results) {
              py::dict row;
              for (std::size_t c = 0; c < report.configurations.size(); ++c) row[py::str(report.configurations[c])] = r.aucs[c];
              out[py::str(std::string(metric_label(r.metric)))] = row;
            }
            return out;
          },
          py::arg("n_queries") = 50, py::arg("seed") = 7, py::arg("method") = "ratio", py::arg("prune") = true)
      .def("to_json", &export_json);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = run_cli(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  });
}
