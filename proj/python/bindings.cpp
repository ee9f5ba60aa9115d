#include "latentsearch/config.hpp"
#include "latentsearch/diversity.hpp"
#include "latentsearch/errors.hpp"
#include "latentsearch/evolve.hpp"
#include "latentsearch/harness.hpp"
#include "latentsearch/report_io.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace py = pybind11;
namespace ls = latentsearch;

namespace {

using ObjectiveArg = std::variant<std::string, py::function>;

std::unique_ptr<ls::Objective> make_objective(const ObjectiveArg& objective, std::size_t dimension,
                                              const ls::LatentDistribution& dist, bool deterministic) {
    if (const auto* spec = std::get_if<std::string>(&objective)) {
        return ls::ObjectiveSpec::from_flag(*spec).build(dimension, dist);
    }
    py::function fn = std::get<py::function>(objective);
    return std::make_unique<ls::FunctionObjective>(
        dimension,
        [fn](std::span<const double> z) { return fn(std::vector<double>(z.begin(), z.end())).cast<double>(); },
        "python", deterministic);
}

py::object json_to_python(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json python_to_json(const py::object& obj) {
    if (py::isinstance<py::str>(obj)) {
        return nlohmann::json::parse(obj.cast<std::string>());
    }
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Latent-space (1+1)-ES with mixed mutation rates";
    m.attr("__version__") = std::string(ls::kVersion);
    m.attr("INF") = ls::kInfiniteAlpha;

    auto error = py::register_exception<ls::Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ls::ConfigError>(m, "ConfigError", error.ptr());
    py::register_exception<ls::EvaluationError>(m, "EvaluationError", error.ptr());
    py::register_exception<ls::TransportError>(m, "TransportError", error.ptr());
    py::register_exception<ls::InvariantViolation>(m, "InvariantViolation", error.ptr());

    py::class_<ls::RandomStream>(m, "RandomStream")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("next_u64", &ls::RandomStream::next_u64)
        .def("uniform", py::overload_cast<>(&ls::RandomStream::uniform))
        .def("standard_normal", &ls::RandomStream::standard_normal)
        .def("index", &ls::RandomStream::index, py::arg("n"));

    m.def("derive_seed", &ls::derive_seed, py::arg("base"), py::arg("cell"), py::arg("replica"));

    py::class_<ls::LatentDistribution>(m, "LatentDistribution")
        .def_static("standard_normal", &ls::LatentDistribution::standard_normal, py::arg("dimension"))
        .def_static("uniform_box",
                    py::overload_cast<std::size_t, double, double>(&ls::LatentDistribution::uniform_box),
                    py::arg("dimension"), py::arg("lo"), py::arg("hi"))
        .def_static("discrete_set",
                    py::overload_cast<std::size_t, std::vector<double>>(&ls::LatentDistribution::discrete_set),
                    py::arg("dimension"), py::arg("values"))
        .def_static("point_mass", &ls::LatentDistribution::point_mass, py::arg("value"))
        .def_static(
            "from_spec", [](const py::object& spec, std::size_t d) { return ls::DistributionSpec::from_json(python_to_json(spec)).build(d); },
            py::arg("spec"), py::arg("dimension"))
        .def_property_readonly("dimension", &ls::LatentDistribution::dimension)
        .def_property_readonly("kind", [](const ls::LatentDistribution& d) { return std::string(ls::to_string(d.kind())); })
        .def("sample", [](const ls::LatentDistribution& d, ls::RandomStream& rng) { return d.sample_full(rng).to_vector(); })
        .def("sample_marginal", &ls::LatentDistribution::sample_marginal, py::arg("i"), py::arg("rng"));

    m.def("clip", &ls::clip, py::arg("lo"), py::arg("hi"), py::arg("x"));
    m.def("sample_mutation_rate", &ls::sample_mutation_rate, py::arg("alpha"), py::arg("dimension"), py::arg("rng"));
    m.def(
        "mutate",
        [](const std::vector<double>& z, double rate, const ls::LatentDistribution& dist, ls::RandomStream& rng) {
            auto mut = ls::mutate(ls::LatentVector(z), rate, dist, rng);
            return py::make_tuple(mut.point.to_vector(), mut.indices);
        },
        py::arg("z"), py::arg("rate"), py::arg("distribution"), py::arg("rng"));
    m.def(
        "hamming_drift",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            return ls::hamming_drift(ls::LatentVector(a), ls::LatentVector(b));
        },
        py::arg("a"), py::arg("b"));
    m.def("drift_bound", &ls::drift_bound, py::arg("alpha"), py::arg("dimension"), py::arg("budget"));

    py::class_<ls::StepRecord>(m, "StepRecord")
        .def_readonly("iteration", &ls::StepRecord::iteration)
        .def_readonly("sampled_rate", &ls::StepRecord::sampled_rate)
        .def_readonly("mutated_indices", &ls::StepRecord::mutated_indices)
        .def_property_readonly("candidate_score", [](const ls::StepRecord& s) { return s.candidate_score.value; })
        .def_property_readonly("incumbent_score", [](const ls::StepRecord& s) { return s.incumbent_score.value; })
        .def_readonly("accepted", &ls::StepRecord::accepted);

    py::class_<ls::RunTrace>(m, "RunTrace")
        .def_property_readonly("start_point", [](const ls::RunTrace& t) { return t.start_point.to_vector(); })
        .def_property_readonly("final_point", [](const ls::RunTrace& t) { return t.final_point.to_vector(); })
        .def_readonly("steps", &ls::RunTrace::steps)
        .def_property_readonly("initial_score", [](const ls::RunTrace& t) { return t.initial_score.value; })
        .def_property_readonly("final_score", [](const ls::RunTrace& t) { return t.final_score.value; })
        .def_readonly("hamming_drift", &ls::RunTrace::hamming_drift)
        .def_readonly("evaluations", &ls::RunTrace::evaluations)
        .def_property_readonly("accepted_steps", &ls::RunTrace::accepted_steps)
        .def_property_readonly("mutated_union_size", &ls::RunTrace::mutated_union_size)
        .def("to_jsonl", [](const ls::RunTrace& t) {
            std::ostringstream out;
            ls::write_trace_jsonl(out, t);
            return out.str();
        })
        .def("summary", [](const ls::RunTrace& t) { return json_to_python(ls::run_summary_json(t, nullptr)); });

    m.def(
        "evolve",
        [](const ObjectiveArg& objective, const ls::LatentDistribution& distribution, std::uint64_t budget,
           double alpha, std::uint64_t seed, std::optional<std::vector<double>> start, bool reevaluate_incumbent,
           bool deterministic) {
            const std::size_t d = distribution.dimension();
            auto obj = make_objective(objective, d, distribution, deterministic);
            std::optional<ls::LatentVector> z0;
            if (start) {
                z0 = ls::LatentVector(*start);
            }
            return ls::evolve(*obj, distribution, ls::EvolConfig{d, budget, alpha, seed, reevaluate_incumbent}, z0);
        },
        py::arg("objective"), py::arg("distribution"), py::arg("budget"), py::arg("alpha"), py::arg("seed") = 0,
        py::arg("start") = py::none(), py::arg("reevaluate_incumbent") = false, py::arg("deterministic") = true,
        "Run the search. `objective` is a callable list[float] -> float or a spec string such as 'sphere'.");

    m.def(
        "random_pairing_diversity",
        [](const std::vector<std::vector<double>>& points, const std::string& metric, std::uint64_t seed) {
            std::vector<ls::LatentVector> pts;
            pts.reserve(points.size());
            for (const auto& p : points) {
                pts.emplace_back(p);
            }
            auto dm = ls::make_metric(metric);
            return json_to_python(ls::diversity_report_to_json(ls::random_pairing_diversity(pts, *dm, seed)));
        },
        py::arg("points"), py::arg("metric") = "euclidean", py::arg("seed") = 0);

    m.def(
        "run_campaign",
        [](const py::object& config, std::size_t parallel) {
            const auto campaign = ls::Campaign::from_json(python_to_json(config));
            ls::CampaignReport report;
            {
                py::gil_scoped_release release;
                report = ls::run_campaign(campaign, parallel);
            }
            return json_to_python(ls::campaign_report_to_json(report));
        },
        py::arg("config"), py::arg("parallel") = 1, "Run a campaign given as a dict or JSON string; returns the report dict.");

    m.def(
        "equivalence_check_random_search",
        [](const ObjectiveArg& objective, const ls::LatentDistribution& distribution, std::uint64_t budget,
           std::uint64_t seed, std::size_t replicas) {
            auto obj = make_objective(objective, distribution.dimension(), distribution, true);
            return ls::equivalence_check_random_search(distribution, *obj, budget, seed, replicas);
        },
        py::arg("objective"), py::arg("distribution"), py::arg("budget"), py::arg("seed"), py::arg("replicas"));
}
