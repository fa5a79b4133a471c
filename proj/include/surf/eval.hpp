#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "surf/rank.hpp"

namespace surf {

struct Config;

struct ReferenceQuerySet {
    std::string scenario_id;
    std::vector<std::vector<std::string>> references;  // tokenised manual queries
};

struct LabeledScenario {
    std::string scenario_id;
    std::string trace_text;
    std::string context_code;
    std::set<std::string> relevant_urls;  // canonical
};

// Pyramid score of a candidate token set against manual reference queries.
// Token weight = number of references containing it (case-insensitive); the
// score divides the candidate's total weight by the best total any set of the
// same size could reach. Throws EmptyCandidate.
double pyramid_score(const std::vector<std::string>& candidate, const ReferenceQuerySet& refs);

struct PrecisionRecall {
    double precision = 0;
    double recall = 0;
    std::size_t hits = 0;
};

PrecisionRecall evaluate_ranking(const LabeledScenario& scenario, const std::vector<RankedResult>& results,
                                 std::size_t k);

inline const std::vector<std::size_t> kReportCutoffs{1, 5, 10, 30};

struct ScenarioReport {
    std::string scenario_id;
    std::string top_query;
    double pyramid = 0;
    std::map<std::size_t, PrecisionRecall> at;  // keyed by cutoff k
};

// Scenario directory: trace.txt, context.java, references.json,
// relevant_urls.json, providers/<id>/*.json, optional pages/index.json.
LabeledScenario load_scenario(const std::filesystem::path& dir);
ReferenceQuerySet load_references(const std::filesystem::path& dir);

ScenarioReport evaluate_scenario(const std::filesystem::path& dir, const Config& base);

// Every subdirectory holding a trace.txt, in name order.
std::vector<ScenarioReport> run_benchmark(const std::filesystem::path& bench_dir, const Config& base);

// scenario_id,pyramid,precision@1,recall@1,...,precision@30,recall@30 plus a mean row.
std::string to_csv(const std::vector<ScenarioReport>& reports);

}  // namespace surf
