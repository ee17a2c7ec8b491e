#include <doctest.h>

#include <string>

#include "corpsim/errors.hpp"
#include "corpsim/report.hpp"

using namespace corpsim;

namespace {

Report sample_report() {
  Report r;
  r.experiment = "register";
  r.seed = 5;
  r.grid = "desk";
  r.config = {{"pairs", 200}};
  const auto p1 = r.log("corpus_similarity", {{"corpus_a", "cc"}, {"corpus_b", "tw"}});
  const auto p2 = r.log("embedding_overlap", {{"nn", 10}});
  r.rows.push_back(ReportRow{"pairs",
                             {{"size", "200000"}, {"pair", "cc-tw"}},
                             {{"embedding_similarity", {24.8, p2}}, {"corpus_similarity", {0.72, p1}}}});
  r.rows.push_back(ReportRow{"pairs",
                             {{"size", "200000"}, {"pair", "cc,wk"}},
                             {{"embedding_similarity", {std::nullopt, p2}}, {"corpus_similarity", {0.59, p1}}}});
  r.rows.push_back(ReportRow{"correlation", {{"size", "200000"}}, {{"pearson_r", {0.999, 0}}}});
  r.charts.push_back(Chart{"Overlap <by> size", "size", "percent", {{"cc-tw", {{0.2, 24.8}, {0.4, 30.1}}}}});
  r.warnings.push_back("something odd");
  return r;
}

}  // namespace

TEST_CASE("provenance ids are one-based and sequential") {
  Report r;
  CHECK(r.log("a", {}) == 1);
  CHECK(r.log("b", {}) == 2);
  CHECK(r.provenance[1].op == "b");
}

TEST_CASE("json round trip") {
  const auto r = sample_report();
  const auto j = r.to_json();
  CHECK(j["experiment"] == "register");
  CHECK(j["tool_version"] == tool_version());
  CHECK(j["rows"][1]["values"][0][1].is_null());
  const auto back = Report::from_json(j);
  CHECK(back.to_json() == j);
  CHECK(back.rows[0].values[0].second.prov == 2);

  CHECK_THROWS_AS(Report::from_json(nlohmann::json{{"experiment", "x"}}), FormatError);
  auto broken = j;
  broken["rows"][0]["values"][0][1] = "text";
  CHECK_THROWS_AS(Report::from_json(broken), FormatError);
}

TEST_CASE("csv has one block per table") {
  const auto csv = sample_report().to_csv();
  CHECK(csv ==
        "table,size,pair,embedding_similarity,corpus_similarity\n"
        "pairs,200000,cc-tw,24.8,0.72\n"
        "pairs,200000,\"cc,wk\",,0.59\n"
        "\n"
        "table,size,pearson_r\n"
        "correlation,200000,0.999\n");
}

TEST_CASE("svg is standalone and escaped") {
  const auto svg = sample_report().to_svg();
  CHECK(svg.rfind("<svg xmlns=\"http://www.w3.org/2000/svg\"", 0) == 0);
  CHECK(svg.find("</svg>") == svg.size() - 7);
  CHECK(svg.find("Overlap &lt;by&gt; size") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(render_svg({}).find("</svg>") != std::string::npos);
}
