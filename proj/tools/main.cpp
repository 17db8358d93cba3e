#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "graphblocks/compiler.hpp"
#include "graphblocks/graph.hpp"
#include "graphblocks/harness.hpp"
#include "graphblocks/runtime.hpp"

namespace gb = graphblocks;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDiagnostics = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitNetwork = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path);
    out << content;
}

int network_exit(gb::DiagCode code) {
    switch (code) {
        case gb::DiagCode::AuthError:
        case gb::DiagCode::RateLimited:
        case gb::DiagCode::TransportError:
        case gb::DiagCode::EmptyResponse:
            return kExitNetwork;
        default:
            return kExitDiagnostics;
    }
}

std::string render_diag(const gb::Diagnostic& d) {
    std::string line = std::string(gb::severity_name(gb::code_severity(d.code))) + " " +
                       gb::code_name(d.code) + ": " + d.message;
    return line;
}

void print_diags(const std::vector<gb::Diagnostic>& diags, bool as_json) {
    if (as_json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& d : diags) arr.push_back(gb::diagnostic_to_json(d));
        std::cout << arr.dump(2) << "\n";
        return;
    }
    for (const auto& d : diags) std::cout << render_diag(d) << "\n";
}

gb::GraphDoc load_graph(const std::string& path, const std::string& format) {
    std::string text = gb::extract_json(read_file(path));
    if (format == "alternative") return gb::alt_to_proposed(gb::parse_alt_graph(text), gb::Catalog::instance());
    return gb::parse_graph(text);
}

gb::Ablation ablation_or_throw(const std::string& name) {
    auto a = gb::ablation_from_name(name);
    if (!a) throw UsageError("unknown ablation '" + name + "'");
    return *a;
}

std::pair<gb::Ablation, gb::Ablation> parse_compare(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw UsageError("--compare expects the form ablationA:ablationB");
    return {ablation_or_throw(spec.substr(0, colon)), ablation_or_throw(spec.substr(colon + 1))};
}

void apply_config_file(const std::string& path, gb::EndpointConfig& endpoint,
                       gb::RunConfig& run_config) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError(std::string("config file: ") + e.what());
    }
    if (!doc.is_object()) throw UsageError("config file must hold a JSON object");
    endpoint.base_url = doc.value("base_url", endpoint.base_url);
    endpoint.model = doc.value("model", endpoint.model);
    endpoint.api_key = doc.value("api_key", endpoint.api_key);
    endpoint.temperature = doc.value("temperature", endpoint.temperature);
    endpoint.top_p = doc.value("top_p", endpoint.top_p);
    endpoint.max_completion_tokens =
        doc.value("max_completion_tokens", endpoint.max_completion_tokens);
    endpoint.reasoning_effort = doc.value("reasoning_effort", endpoint.reasoning_effort);
    endpoint.max_attempts = doc.value("max_attempts", endpoint.max_attempts);
    endpoint.timeout_seconds = doc.value("timeout_seconds", endpoint.timeout_seconds);
    endpoint.backoff_base_ms = doc.value("backoff_base_ms", endpoint.backoff_base_ms);
    run_config.max_ticks = doc.value("max_ticks", run_config.max_ticks);
    run_config.max_iterations_per_loop =
        doc.value("max_iterations_per_loop", run_config.max_iterations_per_loop);
    run_config.ticks_per_second = doc.value("ticks_per_second", run_config.ticks_per_second);
    run_config.ticks_per_statement =
        doc.value("ticks_per_statement", run_config.ticks_per_statement);
    run_config.seed = doc.value("seed", run_config.seed);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Typed block-graph toolkit: validate, compile, run and benchmark "
                 "sprite programs written as JSON node graphs"};
    app.name("graphblocks");
    app.require_subcommand(1);

    const gb::Catalog& catalog = gb::Catalog::instance();

    // --- reference ---------------------------------------------------------
    auto* cmd_ref = app.add_subcommand("reference", "Print the block reference JSON");
    std::string ref_style = "proposed";
    std::string ref_out;
    cmd_ref->add_option("--style", ref_style, "proposed, no_types or extra_description")
        ->check(CLI::IsMember({"proposed", "no_types", "extra_description"}));
    cmd_ref->add_option("-o,--output", ref_out, "Output file (default stdout)");

    // --- validate ----------------------------------------------------------
    auto* cmd_validate = app.add_subcommand("validate", "Validate a graph JSON file");
    std::string val_input, val_format = "proposed";
    bool val_json = false;
    cmd_validate->add_option("input", val_input, "Graph JSON file")->required();
    cmd_validate->add_option("--format", val_format, "Graph representation of the input")
        ->check(CLI::IsMember({"proposed", "alternative"}));
    cmd_validate->add_flag("--json", val_json, "Print diagnostics as JSON");

    // --- compile -----------------------------------------------------------
    auto* cmd_compile = app.add_subcommand("compile", "Compile a graph to script text");
    std::string comp_input, comp_format = "proposed", comp_out;
    cmd_compile->add_option("input", comp_input, "Graph JSON file")->required();
    cmd_compile->add_option("--format", comp_format, "Graph representation of the input")
        ->check(CLI::IsMember({"proposed", "alternative"}));
    cmd_compile->add_option("-o,--output", comp_out, "Output file (default stdout)");

    // --- run ---------------------------------------------------------------
    auto* cmd_run = app.add_subcommand("run", "Execute a graph (or script) and print its log");
    std::string run_input, run_format = "proposed", run_schedule_path;
    bool run_is_script = false, run_json = false;
    gb::RunConfig run_config;
    cmd_run->add_option("input", run_input, "Graph JSON file (or script with --script)")
        ->required();
    cmd_run->add_option("--format", run_format, "Graph representation of the input")
        ->check(CLI::IsMember({"proposed", "alternative"}));
    cmd_run->add_flag("--script", run_is_script, "Treat the input as script text");
    cmd_run->add_option("--schedule", run_schedule_path,
                        "Event schedule JSON (default: flag click at t=0)");
    cmd_run->add_option("--seed", run_config.seed, "Random seed");
    cmd_run->add_option("--max-ticks", run_config.max_ticks, "Tick cap");
    cmd_run->add_option("--max-loop", run_config.max_iterations_per_loop,
                        "Per-loop iteration cap");
    cmd_run->add_option("--ticks-per-second", run_config.ticks_per_second,
                        "Virtual ticks per second of block time");
    cmd_run->add_flag("--json", run_json, "Print final state, ticks and log as JSON");

    // --- convert -----------------------------------------------------------
    auto* cmd_convert = app.add_subcommand("convert", "Convert between graph representations");
    std::string conv_input, conv_to = "alternative", conv_out;
    cmd_convert->add_option("input", conv_input, "Graph JSON file")->required();
    cmd_convert->add_option("--to", conv_to, "Target representation")
        ->check(CLI::IsMember({"proposed", "alternative"}));
    cmd_convert->add_option("-o,--output", conv_out, "Output file (default stdout)");

    // --- bench -------------------------------------------------------------
    auto* cmd_bench = app.add_subcommand("bench", "Run the 20-prompt benchmark");
    std::vector<std::string> bench_ablations{"proposed"};
    int bench_runs = 5, bench_parallel = 1;
    bool bench_live = false;
    std::string bench_fixtures = "fixtures/runs", bench_records, bench_annotations, bench_config;
    std::string bench_base_url, bench_model;
    std::vector<std::string> bench_compares;
    cmd_bench->add_option("--ablation", bench_ablations,
                          "Ablations to evaluate (repeatable)")
        ->check(CLI::IsMember({"proposed", "no_types", "extra_description", "alternative"}));
    cmd_bench->add_option("--runs", bench_runs, "Independent runs per ablation");
    cmd_bench->add_flag("--live", bench_live,
                        "Query the model endpoint (default replays stored fixtures)");
    cmd_bench->add_option("--fixtures", bench_fixtures, "Fixture store directory");
    cmd_bench->add_option("--parallel", bench_parallel, "Worker threads");
    cmd_bench->add_option("--records", bench_records, "Write per-prompt verdicts CSV here");
    cmd_bench->add_option("--annotations", bench_annotations,
                          "Manual verdict overrides CSV");
    cmd_bench->add_option("--config", bench_config, "JSON config file (endpoint + run)");
    cmd_bench->add_option("--base-url", bench_base_url, "Chat-completions base URL");
    cmd_bench->add_option("--model", bench_model, "Model name");
    cmd_bench->add_option("--compare", bench_compares,
                          "Welch comparison a:b for the report (repeatable)");

    // --- stats -------------------------------------------------------------
    auto* cmd_stats = app.add_subcommand("stats", "Summarize verdict CSVs with Welch's t-test");
    std::vector<std::string> stats_inputs;
    std::vector<std::string> stats_compares;
    std::string stats_csv;
    cmd_stats->add_option("records", stats_inputs, "records.csv files")->required();
    cmd_stats->add_option("--compare", stats_compares,
                          "Welch comparison a:b (default: proposed vs the others)");
    cmd_stats->add_option("--csv", stats_csv, "Write the per-run summary CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (cmd_ref->parsed()) {
            gb::ReferenceStyle style = gb::ReferenceStyle::proposed;
            if (ref_style == "no_types") style = gb::ReferenceStyle::no_types;
            if (ref_style == "extra_description") style = gb::ReferenceStyle::extra_description;
            write_output(ref_out, catalog.emit_reference(style));
            return kExitOk;
        }

        if (cmd_validate->parsed()) {
            gb::GraphDoc graph = load_graph(val_input, val_format);
            auto diags = gb::validate(graph, catalog);
            print_diags(diags, val_json);
            return gb::has_errors(diags) ? kExitDiagnostics : kExitOk;
        }

        if (cmd_compile->parsed()) {
            gb::GraphDoc graph = load_graph(comp_input, comp_format);
            auto diags = gb::validate(graph, catalog);
            if (gb::has_errors(diags)) {
                print_diags(diags, false);
                return kExitDiagnostics;
            }
            write_output(comp_out, gb::emit_script(gb::compile(graph, catalog), catalog));
            return kExitOk;
        }

        if (cmd_run->parsed()) {
            gb::CompiledPlan plan;
            if (run_is_script) {
                plan = gb::parse_script(read_file(run_input), catalog);
            } else {
                gb::GraphDoc graph = load_graph(run_input, run_format);
                auto diags = gb::validate(graph, catalog);
                if (gb::has_errors(diags)) {
                    print_diags(diags, false);
                    return kExitDiagnostics;
                }
                plan = gb::compile(graph, catalog);
            }
            gb::EventSchedule schedule;
            if (run_schedule_path.empty()) {
                gb::TimedEvent flag;
                schedule.events.push_back(flag);
            } else {
                schedule = gb::parse_event_schedule(read_file(run_schedule_path));
            }
            gb::RunResult result = gb::run(plan, schedule, run_config);
            if (run_json) {
                nlohmann::json j;
                j["state"] = gb::state_to_json(result.final_state);
                j["ticks"] = result.ticks;
                j["termination"] = gb::termination_name(result.termination);
                j["log"] = result.log;
                if (result.error) j["error"] = gb::diagnostic_to_json(*result.error);
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << gb::render_log(result);
            }
            bool healthy = result.termination == gb::Termination::completed ||
                           result.termination == gb::Termination::stopped;
            return healthy ? kExitOk : kExitRuntime;
        }

        if (cmd_convert->parsed()) {
            std::string text = gb::extract_json(read_file(conv_input));
            std::string converted;
            if (conv_to == "alternative")
                converted = gb::serialize_alt_graph(gb::proposed_to_alt(gb::parse_graph(text), catalog));
            else
                converted = gb::serialize_graph(gb::alt_to_proposed(gb::parse_alt_graph(text), catalog));
            write_output(conv_out, converted);
            return kExitOk;
        }

        if (cmd_bench->parsed()) {
            gb::BenchOptions options;
            options.endpoint = gb::endpoint_from_env();
            if (!bench_config.empty())
                apply_config_file(bench_config, options.endpoint, options.run_config);
            if (!bench_base_url.empty()) options.endpoint.base_url = bench_base_url;
            if (!bench_model.empty()) options.endpoint.model = bench_model;
            options.ablations.clear();
            for (const auto& name : bench_ablations) {
                gb::Ablation a = ablation_or_throw(name);
                if (std::find(options.ablations.begin(), options.ablations.end(), a) ==
                    options.ablations.end())
                    options.ablations.push_back(a);
            }
            options.runs = bench_runs;
            options.mode = bench_live ? gb::BenchMode::live : gb::BenchMode::replay;
            options.fixtures_dir = bench_fixtures;
            options.parallel = bench_parallel;
            if (!bench_annotations.empty())
                options.annotations = gb::parse_annotations(read_file(bench_annotations));
            if (bench_live && options.endpoint.api_key.empty())
                gb::fail(gb::DiagCode::AuthError,
                         "live mode needs an API key (GRAPHBLOCKS_API_KEY or config file)");

            auto records = gb::run_bench(options, catalog);
            if (!bench_records.empty())
                write_output(bench_records, gb::records_to_csv(records));
            auto summaries = gb::summarize(records);
            std::vector<gb::Comparison> comparisons;
            for (const auto& spec : bench_compares) {
                auto [a, b] = parse_compare(spec);
                comparisons.push_back(gb::compare_ablations(summaries, a, b));
            }
            std::cout << gb::render_report(summaries, comparisons);
            return kExitOk;
        }

        if (cmd_stats->parsed()) {
            std::vector<gb::RunRecord> records;
            for (const auto& path : stats_inputs) {
                auto part = gb::records_from_csv(read_file(path));
                records.insert(records.end(), part.begin(), part.end());
            }
            auto summaries = gb::summarize(records);
            std::vector<gb::Comparison> comparisons;
            if (stats_compares.empty()) {
                bool has_proposed = false;
                for (const auto& s : summaries)
                    if (s.ablation == gb::Ablation::proposed) has_proposed = true;
                if (has_proposed)
                    for (const auto& s : summaries)
                        if (s.ablation != gb::Ablation::proposed &&
                            s.per_run_accuracy.size() >= 2)
                            comparisons.push_back(gb::compare_ablations(
                                summaries, gb::Ablation::proposed, s.ablation));
            } else {
                for (const auto& spec : stats_compares) {
                    auto [a, b] = parse_compare(spec);
                    comparisons.push_back(gb::compare_ablations(summaries, a, b));
                }
            }
            if (!stats_csv.empty()) write_output(stats_csv, gb::summary_to_csv(summaries));
            std::cout << gb::render_report(summaries, comparisons);
            return kExitOk;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const gb::PipelineError& e) {
        std::cerr << render_diag(e.diag()) << "\n";
        return network_exit(e.diag().code);
    }
    return kExitUsage;
}
