#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nlibias/report.hpp"

using namespace nlibias;

namespace {

ComparisonReport sample_report() {
    Corpus train, test;
    int i = 0;
    for (int k = 0; k < 8; ++k) train.instances.push_back(make_instance("a" + std::to_string(i++), "p", "nobody is", Label::Contradiction));
    train.instances.push_back(make_instance("a" + std::to_string(i++), "p", "nobody is", Label::Neutral));
    train.instances.push_back(make_instance("a" + std::to_string(i++), "p", "tall human", Label::Neutral));
    test.instances.push_back(make_instance("t0", "p", "nobody is", Label::Contradiction));
    test.instances.push_back(make_instance("t1", "p", "some humans", Label::Entailment));
    const auto tt = count_bigrams(train, Side::Hypothesis, 1.0);
    return compare_splits(tt, count_bigrams(test, Side::Hypothesis, 1.0), rank_bigrams(tt, 0, 10));
}

} // namespace

TEST_CASE("format_number") {
    CHECK(format_number(0.75) == "0.75");
    CHECK(format_number(1.0 / 3) == "0.3333333333333333");
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(222.0) == "222");
    CHECK(format_number(INFINITY) == "inf");
    CHECK(format_odds(INFINITY) == "∞");
    CHECK(format_odds(8.0) == "8");
    CHECK(format_odds(13.681613) == "13.7");
    CHECK(format_odds(222.04) == "222");
    for (double x : {0.1, 1e-300, 123456.789, 2.0 / 3, 0.013943841529567180})
        CHECK(std::strtod(format_number(x).c_str(), nullptr) == x);
}

TEST_CASE("comparison CSV") {
    std::ostringstream out;
    write_comparison_csv(sample_report(), out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "bigram,split,count,p_contradiction,p_neutral,p_entailment,entropy,share");
    std::getline(in, line);
    // "nobody is": 8 C, 1 N, 0 E -> (9, 2, 1) / 12; share 9 of 10 bigrams.
    CHECK(line.rfind("nobody is,train,9,0.75,0.1666666666666666", 0) == 0);
    CHECK(line.substr(line.rfind(',')) == ",0.9");
    std::getline(in, line);
    CHECK(line.rfind("nobody is,test,1,0.5,0.25,0.25,", 0) == 0);
    CHECK(line.substr(line.rfind(',')) == ",0.5");
}

TEST_CASE("comparison JSON and SVG") {
    const auto rep = sample_report();
    const auto j = comparison_json(rep);
    CHECK(j["side"] == "hypothesis");
    CHECK(j["rows"][0]["bigram"] == "nobody is");
    CHECK(j["rows"][0]["train"]["odds"] == 8.0);
    CHECK(j["rows"][0]["train"]["argmax"] == "contradiction");
    CHECK(j["rows"][1]["test"]["count"] == 0);
    CHECK(j.contains("mean_test_entropy"));

    std::ostringstream svg;
    write_comparison_svg(rep, svg);
    const auto s = svg.str();
    CHECK(s.rfind("<svg", 0) == 0);
    CHECK(s.find("#d62728") != std::string::npos); // red: contradiction
    CHECK(s.find("#1f77b4") != std::string::npos); // blue: neutral
    CHECK(s.find("#2ca02c") != std::string::npos); // green: entailment
    CHECK(s.find("nobody is (test)") != std::string::npos);
    CHECK(s.find("0.9000") != std::string::npos);
}

TEST_CASE("trace CSV and manifest") {
    PruneTrace t;
    t.steps = {{1, "x", 0.25, 1}, {1, "y", 0.5, 2}};
    std::ostringstream out;
    write_trace_csv(t, out);
    CHECK(out.str() == "iteration,id,score,removed_total\n1,x,0.25,1\n1,y,0.5,2\n");
    CHECK(trace_summary_json(t)["removed"] == 2);

    RunManifest m;
    m.subcommand = "analyze";
    m.add_input("in.jsonl", Fingerprint{3, 0xabc});
    const auto j = m.to_json();
    CHECK(j["inputs"][0]["fingerprint"] == "3:0000000000000abc");
    CHECK(j["version"] == std::string(kToolVersion));
    CHECK(j["timestamp"].get<std::string>().size() == 20);
}
