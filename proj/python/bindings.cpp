#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rambig/experiment.hpp"

namespace py = pybind11;
using namespace rambig;

namespace {

DualShift shift_of(const std::string& name, double lambda) {
    if (name == "midrange") return DualShift::midrange();
    if (name == "median") return DualShift::median();
    if (name == "fixed") return DualShift::fixed(lambda);
    throw std::invalid_argument("shift must be midrange, median or fixed");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Robust MDPs with optimized norm weights";

    py::register_exception<InsufficientData>(m, "InsufficientData", PyExc_ValueError);

    py::enum_<NormKind>(m, "NormKind")
        .value("L1", NormKind::L1Weighted)
        .value("LInf", NormKind::LInfWeighted);
    py::enum_<Estimator>(m, "Estimator")
        .value("BCI", Estimator::BCI)
        .value("Hoeffding", Estimator::Hoeffding)
        .value("Bernstein", Estimator::Bernstein);
    py::enum_<ZSource>(m, "ZSource")
        .value("RobustUnweighted", ZSource::RobustUnweighted)
        .value("Nominal", ZSource::Nominal);
    py::enum_<DomainKind>(m, "DomainKind")
        .value("SingleBellman", DomainKind::SingleBellman)
        .value("RiverSwim", DomainKind::RiverSwim)
        .value("Inventory", DomainKind::Inventory)
        .value("Population", DomainKind::Population);

    // mdp core
    py::class_<TabularMdp>(m, "TabularMdp")
        .def(py::init<std::size_t, std::size_t, numvec, std::vector<numvec>, double, numvec>(),
             py::arg("states"), py::arg("actions"), py::arg("rewards"), py::arg("kernel"),
             py::arg("discount"), py::arg("initial"))
        .def_property_readonly("states", &TabularMdp::states)
        .def_property_readonly("actions", &TabularMdp::actions)
        .def_property_readonly("discount", &TabularMdp::discount)
        .def_property_readonly("rewards", &TabularMdp::rewards)
        .def_property_readonly("kernel", &TabularMdp::kernel)
        .def_property_readonly("initial", &TabularMdp::initial);

    py::class_<SampleStats>(m, "SampleStats")
        .def(py::init<std::size_t, std::size_t>())
        .def("add", &SampleStats::add, py::arg("source"), py::arg("action"), py::arg("target"),
             py::arg("count") = 1)
        .def_property_readonly("states", &SampleStats::states)
        .def_property_readonly("actions", &SampleStats::actions)
        .def("n", &SampleStats::n)
        .def("counts", &SampleStats::counts)
        .def("empirical", &SampleStats::empirical)
        .def(py::self == py::self);

    m.def(
        "value_iteration",
        [](const TabularMdp& mdp, double tol) {
            auto [v, pi] = value_iteration(mdp, tol);
            return py::make_tuple(v, pi.action_of);
        },
        py::arg("mdp"), py::arg("tol") = kDefaultTolerance);

    // ambiguity sets
    py::class_<AmbiguitySet>(m, "AmbiguitySet")
        .def(py::init([](NormKind norm, numvec weights, double budget, numvec nominal,
                         std::vector<std::size_t> support) {
                 AmbiguitySet set{norm, std::move(weights), budget, std::move(nominal),
                                  std::move(support)};
                 set.validate();
                 return set;
             }),
             py::arg("norm"), py::arg("weights"), py::arg("budget"), py::arg("nominal"),
             py::arg("support") = std::vector<std::size_t>{})
        .def_readonly("norm", &AmbiguitySet::norm)
        .def_readonly("weights", &AmbiguitySet::weights)
        .def_readonly("budget", &AmbiguitySet::budget)
        .def_readonly("nominal", &AmbiguitySet::nominal)
        .def_readonly("support", &AmbiguitySet::support);

    m.def(
        "worst_case",
        [](const numvec& z, const AmbiguitySet& set) {
            auto wc = worst_case(z, set);
            return py::make_tuple(wc.value, wc.argmin);
        },
        py::arg("z"), py::arg("set"), "(value, argmin) of min p'z over the set");
    m.def(
        "dual_lower_bound",
        [](const numvec& z, const AmbiguitySet& set, const std::string& shift, double lambda) {
            return dual_lower_bound(z, set, shift_of(shift, lambda));
        },
        py::arg("z"), py::arg("set"), py::arg("shift") = "midrange", py::arg("lambda_") = 0.0);

    m.def(
        "optimal_weights",
        [](const numvec& z, NormKind norm) {
            auto w = optimal_weights(z, norm);
            return py::make_tuple(w.weights, w.objective);
        },
        py::arg("z"), py::arg("norm"));

    // set sizing
    m.def("hoeffding_l1_psi", &hoeffding_l1_psi, py::arg("n"), py::arg("states"),
          py::arg("actions"), py::arg("delta"));
    m.def("weighted_l1_tail", &weighted_l1_tail, py::arg("psi"), py::arg("n"), py::arg("weights"),
          py::arg("strengthen") = false);
    m.def("weighted_linf_tail", &weighted_linf_tail, py::arg("psi"), py::arg("n"),
          py::arg("weights"));
    m.def("credible_index", &credible_index, py::arg("delta"), py::arg("m"));

    // pipeline
    py::class_<MethodSpec>(m, "MethodSpec")
        .def(py::init([](const std::string& text) { return parse_method(text); }),
             py::arg("text"))
        .def_readonly("estimator", &MethodSpec::estimator)
        .def_readonly("norm", &MethodSpec::norm)
        .def_readonly("weighted", &MethodSpec::weighted)
        .def("label", &MethodSpec::label)
        .def("__repr__", [](const MethodSpec& s) { return "MethodSpec('" + format_method(s) + "')"; });

    m.def(
        "run_weighted_pipeline",
        [](const SampleStats& stats, const TabularMdp& skeleton, const std::string& method,
           double delta, ZSource z_source, std::size_t posterior_draws, std::uint64_t seed) {
            PipelineConfig config;
            config.z_source = z_source;
            config.budget.posterior_draws = posterior_draws;
            config.posterior_seed = seed;
            auto r = run_weighted_pipeline(stats, skeleton, parse_method(method), delta, config);
            py::dict out;
            out["value"] = r.value;
            out["policy"] = r.policy.action_of;
            out["guaranteed_return"] = r.guaranteed_return;
            out["psi_mean"] = r.psi_mean();
            out["weights"] = r.weights_used;
            return out;
        },
        py::arg("stats"), py::arg("skeleton"), py::arg("method"), py::arg("delta"),
        py::arg("z_source") = ZSource::RobustUnweighted, py::arg("posterior_draws") = 10000,
        py::arg("seed") = 0);

    m.def(
        "single_update_guarantee",
        [](const SampleStats& stats, const numvec& values, const std::string& method, double delta,
           std::size_t posterior_draws, std::uint64_t seed) {
            PipelineConfig config;
            config.budget.posterior_draws = posterior_draws;
            config.posterior_seed = seed;
            auto r = single_update_guarantee(stats, values, parse_method(method), delta, config);
            return py::make_tuple(r.guaranteed_value, r.budget.psi, r.weights);
        },
        py::arg("stats"), py::arg("values"), py::arg("method"), py::arg("delta"),
        py::arg("posterior_draws") = 10000, py::arg("seed") = 0);

    // domains
    m.def(
        "make_domain",
        [](const std::string& name, const std::map<std::string, double>& params,
           const numvec& values) { return make_domain(parse_domain_kind(name), params, values).true_mdp; },
        py::arg("name"), py::arg("params") = std::map<std::string, double>{},
        py::arg("values") = numvec{}, "True MDP of a named domain");
    m.def(
        "simulate_dataset",
        [](const std::string& name, std::size_t samples_per_sa, std::uint64_t seed,
           const std::map<std::string, double>& params) {
            return simulate_dataset(make_domain(parse_domain_kind(name), params), samples_per_sa,
                                    seed);
        },
        py::arg("name"), py::arg("samples_per_sa"), py::arg("seed"),
        py::arg("params") = std::map<std::string, double>{});

    // experiments
    m.def(
        "run_experiment",
        [](const std::string& config_text, const std::filesystem::path& output_dir) {
            auto config = parse_config(config_text);
            config.output_dir = output_dir;
            return run_experiment(config);
        },
        py::arg("config_text"), py::arg("output_dir"),
        "Runs a config given as text; returns the results.csv path");
    m.def("emit_plot_data", &emit_plot_data, py::arg("results"), py::arg("out"));
    m.def("config_schema", &config_schema);
}
