#include "surf/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "surf/engine.hpp"
#include "surf/errors.hpp"
#include "surf/text.hpp"

namespace surf {

namespace {

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> whitespace_tokens(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace

double pyramid_score(const std::vector<std::string>& candidate, const ReferenceQuerySet& refs) {
    std::set<std::string> cand;
    for (const auto& t : candidate)
        if (!t.empty()) cand.insert(text::to_lower(t));
    if (cand.empty()) throw EmptyCandidate();

    std::map<std::string, int> weight;
    for (const auto& ref : refs.references) {
        std::set<std::string> seen;
        for (const auto& t : ref) seen.insert(text::to_lower(t));
        for (const auto& t : seen) ++weight[t];
    }

    double achieved = 0;
    for (const auto& t : cand)
        if (auto it = weight.find(t); it != weight.end()) achieved += it->second;

    std::vector<int> best;
    for (const auto& [t, w] : weight)
        if (w > 0) best.push_back(w);
    std::sort(best.begin(), best.end(), std::greater<>());
    double optimal = 0;
    for (std::size_t i = 0; i < std::min(best.size(), cand.size()); ++i) optimal += best[i];
    return optimal > 0 ? achieved / optimal : 0.0;
}

PrecisionRecall evaluate_ranking(const LabeledScenario& scenario, const std::vector<RankedResult>& results,
                                 std::size_t k) {
    if (k == 0) throw std::invalid_argument("k must be >= 1");
    PrecisionRecall pr;
    for (std::size_t i = 0; i < std::min(k, results.size()); ++i)
        if (scenario.relevant_urls.count(results[i].entry.canonical_url)) ++pr.hits;
    pr.precision = static_cast<double>(pr.hits) / static_cast<double>(k);
    pr.recall = scenario.relevant_urls.empty()
                    ? 0.0
                    : static_cast<double>(pr.hits) / static_cast<double>(scenario.relevant_urls.size());
    return pr;
}

LabeledScenario load_scenario(const std::filesystem::path& dir) {
    LabeledScenario s;
    s.scenario_id = dir.filename().string();
    s.trace_text = read_text(dir / "trace.txt");
    if (std::filesystem::exists(dir / "context.java")) s.context_code = read_text(dir / "context.java");
    const auto urls = nlohmann::json::parse(read_text(dir / "relevant_urls.json"));
    for (const auto& u : urls) s.relevant_urls.insert(canonicalize_url(u.get<std::string>()));
    if (s.relevant_urls.empty()) throw std::runtime_error(s.scenario_id + ": relevant_urls.json is empty");
    return s;
}

ReferenceQuerySet load_references(const std::filesystem::path& dir) {
    ReferenceQuerySet refs;
    refs.scenario_id = dir.filename().string();
    for (const auto& r : nlohmann::json::parse(read_text(dir / "references.json"))) {
        std::vector<std::string> tokens =
            r.is_string() ? whitespace_tokens(r.get<std::string>()) : r.get<std::vector<std::string>>();
        if (tokens.empty()) throw std::runtime_error(refs.scenario_id + ": empty reference query");
        refs.references.push_back(std::move(tokens));
    }
    if (refs.references.empty()) throw std::runtime_error(refs.scenario_id + ": no reference queries");
    return refs;
}

ScenarioReport evaluate_scenario(const std::filesystem::path& dir, const Config& base) {
    const auto scenario = load_scenario(dir);
    const auto refs = load_references(dir);
    auto engine = Engine::for_fixtures(dir, base);

    ScenarioReport report;
    report.scenario_id = scenario.scenario_id;
    const auto rec = engine->recommend(scenario.trace_text, scenario.context_code);
    report.top_query = rec.queries.front().text;
    report.pyramid = pyramid_score(rec.queries.front().tokens, refs);

    SearchRequest request;
    request.trace_text = scenario.trace_text;
    if (!scenario.context_code.empty()) request.context_code = scenario.context_code;
    const auto response = engine->search(request);
    for (auto k : kReportCutoffs) report.at[k] = evaluate_ranking(scenario, response.results, k);
    return report;
}

std::vector<ScenarioReport> run_benchmark(const std::filesystem::path& bench_dir, const Config& base) {
    std::vector<std::filesystem::path> dirs;
    for (const auto& e : std::filesystem::directory_iterator(bench_dir))
        if (e.is_directory() && std::filesystem::exists(e.path() / "trace.txt")) dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end());
    std::vector<ScenarioReport> reports;
    for (const auto& d : dirs) reports.push_back(evaluate_scenario(d, base));
    return reports;
}

std::string to_csv(const std::vector<ScenarioReport>& reports) {
    std::ostringstream out;
    out << "scenario_id,pyramid";
    for (auto k : kReportCutoffs) out << ",precision@" << k << ",recall@" << k;
    out << '\n';
    auto row = [&](const std::string& id, double pyramid, const std::map<std::size_t, PrecisionRecall>& at) {
        out << id << ',' << fmt(pyramid);
        for (auto k : kReportCutoffs) {
            const auto it = at.find(k);
            out << ',' << fmt(it == at.end() ? 0.0 : it->second.precision) << ','
                << fmt(it == at.end() ? 0.0 : it->second.recall);
        }
        out << '\n';
    };
    std::map<std::size_t, PrecisionRecall> mean;
    double mean_pyramid = 0;
    for (const auto& r : reports) {
        row(r.scenario_id, r.pyramid, r.at);
        mean_pyramid += r.pyramid;
        for (const auto& [k, pr] : r.at) {
            mean[k].precision += pr.precision;
            mean[k].recall += pr.recall;
        }
    }
    if (!reports.empty()) {
        const double n = static_cast<double>(reports.size());
        for (auto& [k, pr] : mean) {
            pr.precision /= n;
            pr.recall /= n;
        }
        row("mean", mean_pyramid / n, mean);
    }
    return out.str();
}

}  // namespace surf
