#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>

#include "vlir/construction.hpp"
#include "vlir/distribution.hpp"
#include "vlir/mapping.hpp"
#include "vlir/oracles.hpp"
#include "vlir/quantities.hpp"
#include "vlir/source.hpp"

namespace py = pybind11;
using namespace vlir;

namespace {

double ext(const ExtendedReal& v) {
    return v.is_infinite() ? std::numeric_limits<double>::infinity() : v.value();
}

const char* method_name(Method m) {
    switch (m) {
    case Method::closed_form: return "closed_form";
    case Method::brute_force: return "brute_force";
    case Method::greedy: return "greedy";
    }
    return "?";
}

GLowerMode mode_of(const std::string& s) {
    if (s == "exact") return GLowerMode::exact;
    if (s == "greedy") return GLowerMode::greedy;
    if (s == "auto") return GLowerMode::auto_mode;
    throw std::invalid_argument("mode must be exact, greedy, or auto");
}

py::dict quantity_dict(const QuantityReport& r) {
    py::dict d;
    d["value"] = ext(r.value);
    d["method"] = method_name(r.method);
    if (r.witness_reduce_smallest) d["witness_reduce_smallest"] = *r.witness_reduce_smallest;
    if (r.witness_kept_counts) d["witness_kept_counts"] = *r.witness_kept_counts;
    return d;
}

FiniteDistribution dist_from_dict(unsigned base_k, const py::dict& atoms) {
    std::vector<std::pair<std::string, double>> pairs;
    for (auto item : atoms)
        pairs.emplace_back(py::cast<std::string>(item.first), py::cast<double>(item.second));
    return FiniteDistribution::from_pairs(base_k, pairs);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "variable-length intrinsic-randomness toolkit";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<CapacityError>(m, "CapacityError", PyExc_RuntimeError);

    py::class_<FiniteDistribution>(m, "Distribution")
        .def(py::init(&dist_from_dict), py::arg("K"), py::arg("atoms"))
        .def_property_readonly("K", &FiniteDistribution::base_K)
        .def("__len__", &FiniteDistribution::size)
        .def_property_readonly("min_prob", &FiniteDistribution::min_prob)
        .def("atoms",
             [](const FiniteDistribution& d) {
                 py::dict out;
                 for (std::size_t i = 0; i < d.size(); ++i) out[py::str(d.id(i))] = d.prob(i);
                 return out;
             })
        .def("__repr__", [](const FiniteDistribution& d) {
            return "Distribution(K=" + std::to_string(d.base_K()) +
                   ", atoms=" + std::to_string(d.size()) + ")";
        });

    py::class_<Spectrum>(m, "Spectrum")
        .def_property_readonly("K", &Spectrum::base_K)
        .def("entries",
             [](const Spectrum& s) {
                 std::vector<std::pair<double, double>> out;
                 for (const auto& e : s.entries()) out.emplace_back(e.value, e.multiplicity);
                 return out;
             })
        .def_property_readonly("total_mass", &Spectrum::total_mass)
        .def("__repr__", [](const Spectrum& s) {
            return "Spectrum(entries=" + std::to_string(s.entries().size()) + ")";
        });

    py::class_<SubDistribution>(m, "SubDistribution")
        .def_property_readonly("deficiency", &SubDistribution::deficiency)
        .def("values",
             [](const SubDistribution& q) {
                 py::dict out;
                 for (std::size_t i = 0; i < q.base().size(); ++i)
                     out[py::str(q.base().id(i))] = q.q(i);
                 return out;
             })
        .def("__repr__", [](const SubDistribution& q) {
            return "SubDistribution(deficiency=" + std::to_string(q.deficiency()) + ")";
        });

    py::class_<VariableLengthMap>(m, "Map")
        .def(py::init([](unsigned base_k, const py::dict& assign) {
                 std::vector<std::string> ids;
                 std::vector<Assignment> as;
                 for (auto item : assign) {
                     auto pair = py::cast<std::pair<uint32_t, uint64_t>>(item.second);
                     ids.push_back(py::cast<std::string>(item.first));
                     as.push_back(Assignment{pair.first, pair.second});
                 }
                 return VariableLengthMap(base_k, std::move(ids), std::move(as));
             }),
             py::arg("K"), py::arg("assign"))
        .def_property_readonly("K", &VariableLengthMap::base_K)
        .def("__len__", &VariableLengthMap::size)
        .def("assignments",
             [](const VariableLengthMap& mp) {
                 py::dict out;
                 for (std::size_t i = 0; i < mp.size(); ++i)
                     out[py::str(mp.id(i))] =
                         py::make_tuple(mp.assignment(i).length, mp.assignment(i).index);
                 return out;
             })
        .def("__repr__", [](const VariableLengthMap& mp) {
            return "Map(K=" + std::to_string(mp.base_K()) + ", atoms=" + std::to_string(mp.size()) + ")";
        });

    py::class_<SourceModel>(m, "Source")
        .def_static("iid", &SourceModel::iid, py::arg("symbols"))
        .def_static("mixture", &SourceModel::mixture, py::arg("alpha"), py::arg("first"),
                    py::arg("second"))
        .def_property_readonly("K", &SourceModel::base_K);

    m.def("entropy", py::overload_cast<const FiniteDistribution&>(&entropy), py::arg("dist"));
    m.def("entropy", py::overload_cast<const Spectrum&>(&entropy), py::arg("spectrum"));
    m.def("self_information",
          py::overload_cast<const FiniteDistribution&, std::string_view>(&self_information),
          py::arg("dist"), py::arg("atom"));
    m.def("variational_distance",
          py::overload_cast<const FiniteDistribution&, const FiniteDistribution&>(&variational_distance),
          py::arg("p"), py::arg("q"));
    m.def("spectrum_of", &spectrum_of, py::arg("dist"));

    m.def(
        "g_upper",
        [](const Spectrum& s, double delta) { return quantity_dict(g_upper(s, delta)); },
        py::arg("spectrum"), py::arg("delta"));
    m.def(
        "g_upper",
        [](const FiniteDistribution& d, double delta) {
            return quantity_dict(g_upper(spectrum_of(d), delta));
        },
        py::arg("dist"), py::arg("delta"));
    m.def("g_upper_witness", &g_upper_witness, py::arg("dist"), py::arg("delta"));
    m.def(
        "g_lower",
        [](const Spectrum& s, double delta, const std::string& mode) {
            return quantity_dict(g_lower(s, delta, mode_of(mode)));
        },
        py::arg("spectrum"), py::arg("delta"), py::arg("mode") = "auto");
    m.def(
        "g_lower",
        [](const FiniteDistribution& d, double delta, const std::string& mode) {
            return quantity_dict(g_lower(spectrum_of(d), delta, mode_of(mode)));
        },
        py::arg("dist"), py::arg("delta"), py::arg("mode") = "auto");
    m.def("h_quantile", &spectral_sup_quantile, py::arg("spectrum"), py::arg("eps"), py::arg("n"));

    m.def("mean_length",
          py::overload_cast<const VariableLengthMap&, const FiniteDistribution&>(&mean_length),
          py::arg("map"), py::arg("dist"));
    m.def("avg_variational_distance",
          py::overload_cast<const VariableLengthMap&, const FiniteDistribution&>(&avg_variational_distance),
          py::arg("map"), py::arg("dist"));
    m.def("per_class_sup_distance",
          py::overload_cast<const VariableLengthMap&, const FiniteDistribution&>(&per_class_sup_distance),
          py::arg("map"), py::arg("dist"));

    m.def("block_spectrum", &block_spectrum, py::arg("source"), py::arg("n"));
    m.def("block_distribution", &block_distribution, py::arg("source"), py::arg("n"));
    m.def(
        "rate_sequence",
        [](const SourceModel& src, double eps, double tau, const std::vector<long>& ns,
           const std::string& kind, int jobs) {
            RateKind k = kind == "g_upper"     ? RateKind::g_upper_rate
                         : kind == "g_lower"   ? RateKind::g_lower_rate
                         : kind == "h_quantile" ? RateKind::h_quantile
                                                : throw std::invalid_argument(
                                                      "kind must be g_upper, g_lower, or h_quantile");
            std::vector<std::pair<long, double>> out;
            for (const auto& [n, v] : rate_sequence(src, eps, tau, ns, k, jobs))
                out.emplace_back(n, ext(v));
            return out;
        },
        py::arg("source"), py::arg("eps"), py::arg("tau"), py::arg("ns"), py::arg("kind"),
        py::arg("jobs") = 1);

    m.def(
        "direct_construct",
        [](const FiniteDistribution& dist, const SubDistribution& q, double gamma, long n) {
            DirectConstruction dc = direct_construct(dist, q, gamma, n);
            py::dict g;
            g["distance_bound"] = dc.guarantees.distance_bound;
            g["length_bound"] = dc.guarantees.length_bound;
            g["n_threshold"] = dc.guarantees.n_threshold;
            g["gamma"] = dc.guarantees.gamma;
            g["tau"] = dc.guarantees.tau;
            g["case_per_slice"] = dc.guarantees.case_per_slice;
            py::dict out;
            out["map"] = dc.map;
            out["guarantees"] = g;
            return out;
        },
        py::arg("dist"), py::arg("q_tilde"), py::arg("gamma"), py::arg("n"));
    m.def(
        "rate_floor_witness",
        [](const FiniteDistribution& dist, double eps, double tau, double gamma, long n) {
            RateFloorWitness w = rate_floor_witness(dist, eps, tau, gamma, n);
            py::dict out;
            out["q_bar"] = w.q_bar;
            out["r0"] = w.r0;
            out["small_set_mass"] = w.small_set_mass;
            out["small_set_size"] = w.small_set_size;
            return out;
        },
        py::arg("dist"), py::arg("eps"), py::arg("tau"), py::arg("gamma"), py::arg("n"));

    m.def(
        "g_upper_vertex_oracle",
        [](const FiniteDistribution& d, double delta) {
            VertexProbeReport r = g_upper_vertex_oracle(d, delta);
            py::dict out;
            out["value"] = ext(r.value);
            out["probe_objectives"] = r.probe_objectives;
            return out;
        },
        py::arg("dist"), py::arg("delta"));
    m.def("g_lower_bruteforce", &g_lower_bruteforce, py::arg("dist"), py::arg("delta"));
    m.def("enumerate_maps", &enumerate_maps, py::arg("atom_ids"), py::arg("max_len"), py::arg("K"));
    m.def("sample_random_maps", &sample_random_maps, py::arg("dist"), py::arg("max_len"),
          py::arg("count"), py::arg("seed"));
    m.def(
        "converse_check",
        [](const FiniteDistribution& d, double delta, const std::vector<VariableLengthMap>& maps) {
            OracleReport r = converse_check(d, delta, maps);
            py::dict out;
            out["agreed"] = r.agreed;
            out["max_discrepancy"] = r.max_discrepancy;
            out["trials"] = r.trials;
            out["vacuous"] = r.vacuous;
            if (r.counterexample) out["counterexample"] = *r.counterexample;
            return out;
        },
        py::arg("dist"), py::arg("delta"), py::arg("maps"));
}
