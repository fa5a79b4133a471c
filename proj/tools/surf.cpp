// surf: stack-trace driven web search from the command line.
#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "surf/config.hpp"
#include "surf/engine.hpp"
#include "surf/errors.hpp"
#include "surf/eval.hpp"
#include "surf/service.hpp"
#include "surf/watch.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitPipeline = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    if (path == "-") {
        std::ostringstream out;
        out << std::cin.rdbuf();
        return out.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

struct Common {
    std::string config_path;
    std::string fixtures_dir;
    std::string rank_weights;
    std::string token_weights;
    double damping = -1;
    bool json = false;
    bool table = false;

    surf::Config config() const {
        std::optional<std::filesystem::path> path;
        if (!config_path.empty()) path = config_path;
        auto cfg = surf::load_config(path);
        try {
            if (!rank_weights.empty()) cfg.rank_weights = surf::parse_rank_weights(rank_weights);
            if (!token_weights.empty()) cfg.token_weights = surf::parse_token_weights(token_weights);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        if (damping >= 0) {
            if (damping >= 1) throw UsageError("--damping must be in [0,1)");
            cfg.pagerank.damping = damping;
        }
        return cfg;
    }

    std::shared_ptr<surf::Engine> engine() const {
        auto cfg = config();
        if (!fixtures_dir.empty()) return surf::Engine::for_fixtures(fixtures_dir, cfg);
        return surf::Engine::live(cfg);
    }

    void add(CLI::App* app, bool search_flags) {
        app->add_option("--config", config_path, "JSON config file (default $SURF_CONFIG)");
        app->add_option("--weights", token_weights, "token metric weights pr,doi,freq");
        app->add_option("--damping", damping, "PageRank damping factor");
        if (search_flags) {
            app->add_option("--fixtures-dir", fixtures_dir, "replay recorded provider responses and pages");
            app->add_option("--rank-weights", rank_weights, "content,context,engine,popularity");
        }
        auto* j = app->add_flag("--json", json, "JSON output");
        auto* t = app->add_flag("--table", table, "table output (default)");
        j->excludes(t);
    }
};

void print_queries(const surf::Recommendation& rec, bool json, bool dot) {
    if (json) {
        std::cout << surf::queries_json(rec).dump(2) << "\n";
        return;
    }
    if (dot) {
        std::cout << rec.graph_dot;
        return;
    }
    std::cout << std::left << std::setw(4) << "#" << std::setw(8) << "score" << "query\n";
    for (const auto& q : rec.queries)
        std::cout << std::setw(4) << q.rank << std::setw(8) << std::fixed << std::setprecision(3) << q.score
                  << q.text << "\n";
}

std::string bar(double v) {
    const int n = static_cast<int>(v * 10 + 0.5);
    return std::string(n, '#') + std::string(10 - n, '.');
}

void print_results(const surf::SearchResponse& response, bool json) {
    for (const auto& w : response.warnings) std::cerr << "warning: " << w << "\n";
    if (json) {
        std::cout << surf::search_json(response).dump(2) << "\n";
        return;
    }
    std::cout << "query: " << response.query.text << "  (" << response.corpus_size << " pages)\n";
    for (std::size_t i = 0; i < response.results.size(); ++i) {
        const auto& r = response.results[i];
        std::cout << std::setw(3) << r.rank << ". " << std::fixed << std::setprecision(3) << r.final_score << "  "
                  << response.titles[i] << "\n      " << r.entry.canonical_url << "\n      content "
                  << bar(r.metrics.content_relevance) << " context " << bar(r.metrics.context_relevance)
                  << " engine " << bar(r.metrics.engine_confidence) << " votes " << bar(r.metrics.popularity)
                  << "\n";
    }
}

// Reads stdin or a file until EOF; with follow, keeps polling a file for growth.
int run_watch(const Common& common, const std::string& file, bool follow, bool auto_search, double debounce_s) {
    std::shared_ptr<surf::Engine> engine;
    if (auto_search) engine = common.engine();
    const auto cfg = common.config();
    surf::TraceWatcher watcher(file.empty() ? "stdin" : file,
                               std::chrono::milliseconds(static_cast<long long>(debounce_s * 1000)),
                               [] { return std::chrono::steady_clock::now(); }, cfg.query);

    auto emit = [&](const std::vector<surf::WatchEvent>& events) {
        for (const auto& e : events) {
            if (common.json)
                std::cout << surf::watch_event_json(e).dump() << "\n";
            else
                std::cout << "[" << e.source << "] " << e.trace.exception_type << "  ->  " << e.query.text << "\n";
            if (engine) {
                surf::SearchRequest req;
                req.query = e.query.text;
                req.trace_text = e.trace_text;
                try {
                    print_results(engine->search(req), common.json);
                } catch (const surf::Error& err) {
                    std::cerr << "search failed: " << err.what() << "\n";
                }
            }
            std::cout.flush();
        }
    };

    int fd = STDIN_FILENO;
    if (!file.empty()) {
        fd = ::open(file.c_str(), O_RDONLY);
        if (fd < 0) {
            std::cerr << "watch: " << file << ": " << std::strerror(errno) << "\n";
            return kExitPipeline;
        }
    }
    char buf[8192];
    for (;;) {
        const ssize_t n = ::read(fd, buf, sizeof buf);
        if (n < 0) {
            if (errno == EINTR) continue;
            std::cerr << "watch: read error: " << std::strerror(errno) << "\n";
            if (fd != STDIN_FILENO) ::close(fd);
            return kExitPipeline;
        }
        if (n == 0) {
            if (follow && fd != STDIN_FILENO) {
                std::this_thread::sleep_for(std::chrono::milliseconds(250));
                continue;
            }
            break;
        }
        emit(watcher.feed(std::string_view(buf, static_cast<std::size_t>(n))));
    }
    emit(watcher.flush());
    if (fd != STDIN_FILENO) ::close(fd);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"surf - search the web for a Java stack trace"};
    app.require_subcommand(1);

    Common common;
    std::string trace_file, code_file, query_text, listen, static_dir, watch_file, complete;
    bool no_context = false, dot = false, follow = false, auto_search = false;
    double debounce = 10.0;

    auto* queries = app.add_subcommand("queries", "recommend search queries for a trace");
    queries->add_option("--trace-file", trace_file, "stack trace ('-' for stdin)")->required();
    queries->add_option("--code-file", code_file, "context source code");
    queries->add_flag("--dot", dot, "print the token graph in DOT");
    queries->add_option("--complete", complete, "list tokens starting with a prefix");
    common.add(queries, false);

    auto* search = app.add_subcommand("search", "meta search and rank results");
    search->add_option("query", query_text, "search keywords (default: top recommended query)");
    search->add_option("--trace-file", trace_file, "stack trace ('-' for stdin)");
    search->add_option("--code-file", code_file, "context source code");
    search->add_flag("--no-context", no_context, "keyword matching only");
    common.add(search, true);

    auto* watch = app.add_subcommand("watch", "detect traces in a log stream");
    watch->add_option("--file", watch_file, "file to read instead of stdin");
    watch->add_flag("--follow", follow, "keep reading as the file grows");
    watch->add_flag("--auto-search", auto_search, "search for every detected trace");
    watch->add_option("--debounce", debounce, "seconds to suppress repeats of a trace")->check(CLI::NonNegativeNumber);
    common.add(watch, true);

    auto* serve = app.add_subcommand("serve", "run the HTTP JSON service");
    serve->add_option("--listen", listen, "host:port (default 127.0.0.1:7878)");
    serve->add_option("--static-dir", static_dir, "web UI files to serve at /");
    common.add(serve, true);

    auto* eval = app.add_subcommand("eval", "run the benchmark and print CSV");
    eval->add_option("--fixtures-dir", common.fixtures_dir, "benchmark directory")->required();
    eval->add_option("--config", common.config_path, "JSON config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*queries) {
            const auto trace = read_file(trace_file);
            const auto code = code_file.empty() ? std::string() : read_file(code_file);
            const auto engine = surf::Engine(common.config(), nullptr);
            const auto rec = engine.recommend(trace, code);
            if (!complete.empty()) {
                for (const auto& t : surf::complete_query(complete, rec.scoring.scores)) std::cout << t << "\n";
                return 0;
            }
            print_queries(rec, common.json, dot);
            return 0;
        }
        if (*search) {
            surf::SearchRequest req;
            if (!query_text.empty()) req.query = query_text;
            if (!trace_file.empty()) req.trace_text = read_file(trace_file);
            if (!code_file.empty()) req.context_code = read_file(code_file);
            req.associate_context = !no_context;
            if (!req.query && !req.trace_text) throw UsageError("give a query or --trace-file");
            print_results(common.engine()->search(req), common.json);
            return 0;
        }
        if (*watch) return run_watch(common, watch_file, follow, auto_search, debounce);
        if (*serve) {
            auto cfg = common.config();
            const auto [host, port] = surf::parse_listen_address(listen.empty() ? cfg.listen : listen);
            surf::ServiceOptions options;
            options.static_dir = static_dir;
            surf::Service service(common.engine(), options);
            std::cerr << "listening on " << host << ":" << port << "\n";
            if (!service.listen(host, port)) {
                std::cerr << "cannot listen on " << host << ":" << port << "\n";
                return kExitPipeline;
            }
            return 0;
        }
        if (*eval) {
            std::cout << surf::to_csv(surf::run_benchmark(common.fixtures_dir, common.config()));
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "surf: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "surf: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "surf: " << e.what() << "\n";
        return kExitPipeline;
    }
    return 0;
}
