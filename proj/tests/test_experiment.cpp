#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rambig/experiment.hpp"

using namespace rambig;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "rambig_test_experiment" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("parse a complete config") {
    auto c = parse_config("# comment\n"
                          "domain = inventory\n"
                          "states = 6   # small\n"
                          "methods = bci:l1:weighted, hoeffding:linf:unweighted\n"
                          "confidences = 0.5, 0.9\n"
                          "trials = 3\n"
                          "seed = 42\n"
                          "z_source = nominal\n");
    CHECK(c.domain == DomainKind::Inventory);
    CHECK(c.domain_params.at("states") == 6.0);
    REQUIRE(c.methods.size() == 2);
    CHECK(c.methods[1] == MethodSpec{Estimator::Hoeffding, NormKind::LInfWeighted, false});
    CHECK(c.confidences == std::vector<double>{0.5, 0.9});
    CHECK(c.trials == 3);
    CHECK(c.seed == 42);
    CHECK(c.z_source == ZSource::Nominal);
    CHECK(c.samples_per_sa == 100);
    CHECK(c.make_domain().true_mdp.states() == 6);
    CHECK(parse_config(c.describe()).describe() == c.describe());
}

TEST_CASE("config errors name the key") {
    CHECK(error_of("methods = bci:l1:weighted\n").find("key 'domain': required") !=
          std::string::npos);
    CHECK(error_of("domain = riverswim\nmethods = bci:l1:weighted\ncolour = red\n")
              .find("colour") != std::string::npos);
    auto dup = error_of("domain = riverswim\ndomain = riverswim\nmethods = bci:l1:weighted\n");
    CHECK(dup.find("line 2") != std::string::npos);
    CHECK(error_of("domain = riverswim\nmethods = bci:l3:weighted\n").find("methods") !=
          std::string::npos);
    CHECK(error_of("domain = riverswim\nmethods = bernstein:linf:weighted\n") != "");
    CHECK(error_of("domain = riverswim\nmethods = bci:l1:weighted\nconfidences = 1.5\n")
              .find("confidences") != std::string::npos);
    CHECK(error_of("domain = riverswim\nmethods = bci:l1:weighted\ntrials = -2\n")
              .find("trials") != std::string::npos);
    CHECK(error_of("domain = riverswim\nmethods = bci:l1:weighted\nvalues = 1,2,3,4,5\n")
              .find("values") != std::string::npos);
    CHECK(error_of("domain = riverswim\nmethods = bci:l1:weighted\nstates = 4\n") != "");
    CHECK(error_of("domain = riverswim\njust words\n").find("line 2") != std::string::npos);
}

TEST_CASE("method round trip") {
    for (auto text : {"bci:l1:weighted", "hoeffding:linf:unweighted", "bernstein:l1:unweighted"})
        CHECK(format_method(parse_method(text)) == text);
    CHECK_THROWS(parse_method("bci:l1"));
}

TEST_CASE("summary statistics") {
    MethodSpec m{Estimator::BCI, NormKind::L1Weighted, true};
    std::vector<ResultRow> rows;
    for (std::size_t t = 0; t < 4; ++t) rows.push_back({m, 0.9, t, double(t), 0.1, 0});
    auto s = summarize(rows);
    REQUIRE(s.size() == 1);
    CHECK(s[0].trials == 4);
    CHECK(s[0].mean == doctest::Approx(1.5));
    // sample SD of 0,1,2,3 is sqrt(5/3)
    CHECK(s[0].std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(s[0].min == 0.0);
    CHECK(s[0].max == 3.0);
}

TEST_CASE("experiment runs are deterministic and plot data matches") {
    auto c = parse_config("domain = single_bellman\n"
                          "methods = bci:l1:weighted, hoeffding:l1:unweighted\n"
                          "confidences = 0.5, 0.9\n"
                          "posterior_draws = 300\n"
                          "trials = 4\n"
                          "seed = 5\n");
    c.output_dir = temp_dir("a");
    auto first = run_experiment(c);
    c.output_dir = temp_dir("b");
    c.jobs = 3;
    auto second = run_experiment(c);
    CHECK(slurp(first) == slurp(second));
    CHECK(slurp(first).rfind(std::string(kResultsHeader) + "\n", 0) == 0);

    auto rows = read_results_csv(first);
    CHECK(rows.size() == 16);
    auto plot = emit_plot_data(first, temp_dir("plot") / "plot.csv");
    std::ifstream in(plot);
    std::string line;
    std::getline(in, line);
    CHECK(line == "series,method,norm,weighted,confidence,mean,std_error,trials");
    std::size_t n = 0;
    while (std::getline(in, line)) ++n;
    CHECK(n == 4);

    // recompute the first series' standard error from the raw rows
    auto summary = summarize(rows);
    double mean = 0.0, ss = 0.0;
    for (std::size_t t = 0; t < 4; ++t) mean += rows[t].guaranteed_return / 4.0;
    for (std::size_t t = 0; t < 4; ++t) ss += std::pow(rows[t].guaranteed_return - mean, 2);
    CHECK(summary[0].std_error == doctest::Approx(std::sqrt(ss / 3.0) / 2.0));
}

TEST_CASE("results reader reports bad lines") {
    auto dir = temp_dir("bad");
    {
        std::ofstream out(dir / "r.csv");
        out << kResultsHeader << "\nBCI,L1,true,0.5,0,1.0,0.1,0\nBCI,L1,maybe,0.5,1,1.0,0.1,0\n";
    }
    try {
        read_results_csv(dir / "r.csv");
        FAIL("expected an error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("seed streams differ") {
    CHECK(dataset_seed(1, 0) != dataset_seed(1, 1));
    CHECK(dataset_seed(1, 0) != posterior_seed(1, 0));
}
